#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "periodbench/models.hpp"
#include "periodbench/parallel.hpp"
#include "periodbench/rng.hpp"

namespace periodbench {

struct GaussianBelief {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Particles are stored column-wise: particles.col(i) is the i-th state.
struct ParticleBelief {
  Eigen::MatrixXd particles;
  Eigen::VectorXd weights;

  Eigen::Index size() const noexcept { return particles.cols(); }
};

using Belief = std::variant<GaussianBelief, ParticleBelief>;

enum class FilterKind { KF, EKF, PF };

struct ResamplePolicy {
  enum class Kind { EveryStep, EssThreshold };
  Kind kind = Kind::EveryStep;
  double fraction = 0.5;  // EssThreshold only, in (0, 1]

  static ResamplePolicy every_step() { return {}; }
  static ResamplePolicy ess_threshold(double fraction) { return {Kind::EssThreshold, fraction}; }
};

struct FilterSpec {
  FilterKind kind = FilterKind::KF;
  int particle_count = 1;
  ResamplePolicy resample = ResamplePolicy::every_step();

  void validate() const;
  /// Particle count for cost purposes; KF and EKF count as one.
  int cost_units() const noexcept { return kind == FilterKind::PF ? particle_count : 1; }
};

const char* to_string(FilterKind kind) noexcept;

GaussianBelief kf_predict(const GaussianBelief& b, const Eigen::MatrixXd& F, const Eigen::MatrixXd& Q);
GaussianBelief kf_update(const GaussianBelief& b, const Eigen::MatrixXd& H, const Eigen::MatrixXd& R,
                         const Eigen::VectorXd& y);

double ungm_state_jacobian(double x);
double ungm_meas_jacobian(double x);

/// One EKF predict/update cycle. UNGM uses the analytic Jacobians; on the
/// linear CV system this is exactly a KF step.
GaussianBelief ekf_step(const GaussianBelief& b, const DiscreteSystem& system, int step_index,
                        const Eigen::VectorXd& y);

double ess(std::span<const double> weights);
inline double ess(const Eigen::VectorXd& w) { return ess(std::span<const double>(w.data(), w.size())); }

/// Systematic resampling with a caller-supplied offset u in [0, 1): sample
/// j is placed at (u + j) / N on the cumulative weight axis.
std::vector<std::size_t> systematic_resample(std::span<const double> weights, double u);
std::vector<std::size_t> systematic_resample(std::span<const double> weights, Rng& rng);

/// Bootstrap particle filter step. Resampling (if the policy asks for it) is
/// applied to the incoming weights before propagation, so the returned
/// belief carries the fresh likelihood weights and estimate() on it is the
/// pre-resampling weighted mean.
ParticleBelief pf_step(const ParticleBelief& b, const DiscreteSystem& system, int step_index,
                       const Eigen::VectorXd& y, const FilterSpec& spec, Rng& rng,
                       Execution exec = Execution::Parallel);

Eigen::VectorXd estimate(const GaussianBelief& b);
Eigen::VectorXd estimate(const ParticleBelief& b);
Eigen::VectorXd estimate(const Belief& b);

/// Particle cloud drawn from N(mean, cov) with uniform weights.
ParticleBelief sample_particles(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, int count, Rng& rng);

/// Uniform driver over the three filter kinds.
class RecursiveFilter {
 public:
  RecursiveFilter(const FilterSpec& spec, const DiscreteSystem& system, const Eigen::VectorXd& prior_mean,
                  const Eigen::MatrixXd& prior_cov, Rng& rng, Execution exec = Execution::Parallel);

  void step(int step_index, const Eigen::VectorXd& y, Rng& rng);
  Eigen::VectorXd estimate() const { return periodbench::estimate(belief_); }
  const Belief& belief() const noexcept { return belief_; }
  const FilterSpec& spec() const noexcept { return spec_; }

 private:
  FilterSpec spec_;
  const DiscreteSystem* system_;
  Execution exec_;
  Belief belief_;
};

}  // namespace periodbench
