#pragma once

#include <compare>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "periodbench/rng.hpp"

namespace periodbench {

/// Simulation time units elapsed per filter iteration. Always strictly positive.
class SamplingPeriod {
 public:
  explicit SamplingPeriod(double t);

  double value() const noexcept { return t_; }

  auto operator<=>(const SamplingPeriod&) const = default;

 private:
  double t_;
};

/// Univariate nonstationary growth model.
///
///   x_k = x/2 + 25 x / (1 + x^2) + A cos(r (k-1) t) + w_k,   w_k ~ N(0, q t)
///   y_k = x_k^2 / 20 + v_k,                                   v_k ~ N(0, meas_noise_var)
///
/// `q` is the noise variance accrued per unit of simulation time, so q = 10
/// gives the customary variance of 10 at t = 1.
struct UngmModel {
  double q = 10.0;
  double meas_noise_var = 1.0;
  double forcing_amplitude = 8.0;
  double forcing_rate = 1.2;

  void validate() const;
};

/// Nearly-constant-velocity target in the plane, state (x, vx, y, vy),
/// driven by white acceleration with per-axis standard deviations
/// sigma1, sigma2 and observed in position.
struct CvModel {
  double sigma1 = 1.0;
  double sigma2 = 0.1;
  double meas_noise_var = 1.0;

  void validate() const;
};

using Model = std::variant<UngmModel, CvModel>;

double ungm_drift(double x, int step_index, SamplingPeriod period, const UngmModel& model);
double ungm_transition_variance(const UngmModel& model, SamplingPeriod period);

// The CV matrices take a raw non-negative duration so the t -> 0 limit can be
// evaluated; everything that builds a system goes through SamplingPeriod.
Eigen::Matrix4d cv_transition_matrix(double t);
Eigen::Matrix<double, 4, 2> cv_noise_input_matrix(double t);
Eigen::Matrix4d cv_process_cov(const CvModel& model, double t);

inline Eigen::Matrix4d cv_transition_matrix(SamplingPeriod p) { return cv_transition_matrix(p.value()); }
inline Eigen::Matrix<double, 4, 2> cv_noise_input_matrix(SamplingPeriod p) { return cv_noise_input_matrix(p.value()); }
inline Eigen::Matrix4d cv_process_cov(const CvModel& m, SamplingPeriod p) { return cv_process_cov(m, p.value()); }

/// Symmetric square root S (S S^T = C) of a symmetric PSD matrix. Eigenvalues
/// in [-1e-12, 0) are clamped to zero; anything more negative is rejected.
Eigen::MatrixXd symmetric_sqrt_psd(const Eigen::MatrixXd& cov);

enum class ModelKind { Ungm, Cv };

/// A benchmark model instantiated at a particular sampling period.
class DiscreteSystem {
 public:
  ModelKind kind() const noexcept { return kind_; }
  int state_dim() const noexcept { return kind_ == ModelKind::Ungm ? 1 : 4; }
  int meas_dim() const noexcept { return kind_ == ModelKind::Ungm ? 1 : 2; }
  SamplingPeriod period() const noexcept { return period_; }
  bool is_linear() const noexcept { return kind_ == ModelKind::Cv; }

  const Model& model() const noexcept { return model_; }
  const UngmModel& ungm() const;
  const CvModel& cv() const;

  /// Deterministic successor of `x` at step `step_index` (k >= 1).
  Eigen::VectorXd transition(const Eigen::VectorXd& x, int step_index) const;
  Eigen::VectorXd measurement(const Eigen::VectorXd& x) const;

  /// Only defined for linear systems.
  const Eigen::MatrixXd& transition_matrix() const;
  const Eigen::MatrixXd& measurement_matrix() const;

  const Eigen::MatrixXd& process_noise_cov() const noexcept { return process_cov_; }
  const Eigen::MatrixXd& process_noise_sqrt() const noexcept { return process_sqrt_; }
  const Eigen::MatrixXd& measurement_noise_cov() const noexcept { return meas_cov_; }
  const Eigen::MatrixXd& measurement_noise_sqrt() const noexcept { return meas_sqrt_; }

  /// Inverse of R, or nullopt when R is singular (only possible through
  /// with_measurement_noise).
  const std::optional<Eigen::MatrixXd>& measurement_precision() const noexcept { return meas_precision_; }

  /// Copies of this system with a replaced noise covariance. The replacement
  /// must be symmetric PSD; used for noiseless checks and ablations.
  DiscreteSystem with_process_noise(const Eigen::MatrixXd& cov) const;
  DiscreteSystem with_measurement_noise(const Eigen::MatrixXd& cov) const;

  friend DiscreteSystem build_system(const Model& model, SamplingPeriod period);

 private:
  DiscreteSystem(ModelKind kind, Model model, SamplingPeriod period);
  void set_process_cov(const Eigen::MatrixXd& cov);
  void set_measurement_cov(const Eigen::MatrixXd& cov);

  ModelKind kind_;
  Model model_;
  SamplingPeriod period_;
  Eigen::MatrixXd transition_matrix_;
  Eigen::MatrixXd measurement_matrix_;
  Eigen::MatrixXd process_cov_;
  Eigen::MatrixXd process_sqrt_;
  Eigen::MatrixXd meas_cov_;
  Eigen::MatrixXd meas_sqrt_;
  std::optional<Eigen::MatrixXd> meas_precision_;
};

DiscreteSystem build_system(const Model& model, SamplingPeriod period);

/// Transition-noise magnitude used in reports: the UNGM variance, or trace Q for CV.
double noise_summary(const DiscreteSystem& system);

struct Trajectory {
  SamplingPeriod period;
  std::vector<Eigen::VectorXd> states;  // k = 0..K

  int steps() const noexcept { return static_cast<int>(states.size()) - 1; }
};

struct MeasurementSequence {
  std::vector<Eigen::VectorXd> measurements;  // k = 1..K stored at index k-1
};

/// Draws one sample from N(0, S S^T) given the square root S.
Eigen::VectorXd sample_gaussian(const Eigen::MatrixXd& sqrt_cov, Rng& rng);

Trajectory simulate_truth(const DiscreteSystem& system, const Eigen::VectorXd& x0, int steps, Rng& rng);
MeasurementSequence generate_measurements(const DiscreteSystem& system, const Trajectory& traj, Rng& rng);

/// Truth initial state used by every protocol: 0 for UNGM, (0, 1, 0, 1) for CV.
Eigen::VectorXd default_initial_state(const Model& model);
/// Covariance of the Gaussian prior shared by all filters: 10 for UNGM, I for CV.
Eigen::MatrixXd default_prior_cov(const Model& model);

}  // namespace periodbench
