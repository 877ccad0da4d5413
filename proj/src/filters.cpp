#include "periodbench/filters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "periodbench/errors.hpp"
#include "periodbench/particle_kernels.hpp"

namespace periodbench {
namespace {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& c) { return 0.5 * (c + c.transpose()); }

// Joseph-form update against an explicit predicted measurement, shared by KF and EKF.
GaussianBelief joseph_update(const GaussianBelief& b, const Eigen::MatrixXd& H, const Eigen::MatrixXd& R,
                             const Eigen::VectorXd& innovation) {
  const Eigen::MatrixXd S = H * b.cov * H.transpose() + R;
  Eigen::LLT<Eigen::MatrixXd> llt(symmetrized(S));
  if (llt.info() != Eigen::Success) throw NumericalFailure("innovation covariance is not positive definite");
  // K = P H^T S^-1, solved as S K^T = H P.
  const Eigen::MatrixXd K = llt.solve(H * b.cov).transpose();
  const Eigen::Index n = b.mean.size();
  const Eigen::MatrixXd I_KH = Eigen::MatrixXd::Identity(n, n) - K * H;
  GaussianBelief out;
  out.mean = b.mean + K * innovation;
  out.cov = symmetrized(I_KH * b.cov * I_KH.transpose() + K * R * K.transpose());
  return out;
}

bool should_resample(const ResamplePolicy& policy, const Eigen::VectorXd& weights) {
  if (policy.kind == ResamplePolicy::Kind::EveryStep) return true;
  return ess(weights) < policy.fraction * static_cast<double>(weights.size());
}

}  // namespace

void FilterSpec::validate() const {
  if (kind == FilterKind::PF && particle_count < 1) throw std::invalid_argument("particle_count must be >= 1");
  if (resample.kind == ResamplePolicy::Kind::EssThreshold && !(resample.fraction > 0.0 && resample.fraction <= 1.0)) {
    throw std::invalid_argument("ESS threshold fraction must lie in (0, 1]");
  }
}

const char* to_string(FilterKind kind) noexcept {
  switch (kind) {
    case FilterKind::KF: return "kf";
    case FilterKind::EKF: return "ekf";
    case FilterKind::PF: return "pf";
  }
  return "?";
}

GaussianBelief kf_predict(const GaussianBelief& b, const Eigen::MatrixXd& F, const Eigen::MatrixXd& Q) {
  const Eigen::Index n = b.mean.size();
  if (F.rows() != n || F.cols() != n || Q.rows() != n || Q.cols() != n || b.cov.rows() != n || b.cov.cols() != n) {
    throw std::invalid_argument("kf_predict: dimension mismatch");
  }
  return {F * b.mean, symmetrized(F * b.cov * F.transpose() + Q)};
}

GaussianBelief kf_update(const GaussianBelief& b, const Eigen::MatrixXd& H, const Eigen::MatrixXd& R,
                         const Eigen::VectorXd& y) {
  const Eigen::Index n = b.mean.size();
  const Eigen::Index m = y.size();
  if (H.rows() != m || H.cols() != n || R.rows() != m || R.cols() != m || b.cov.rows() != n) {
    throw std::invalid_argument("kf_update: dimension mismatch");
  }
  return joseph_update(b, H, R, y - H * b.mean);
}

double ungm_state_jacobian(double x) {
  const double d = 1.0 + x * x;
  return 0.5 + 25.0 * (1.0 - x * x) / (d * d);
}

double ungm_meas_jacobian(double x) { return x / 10.0; }

GaussianBelief ekf_step(const GaussianBelief& b, const DiscreteSystem& system, int step_index,
                        const Eigen::VectorXd& y) {
  if (system.is_linear()) {
    const GaussianBelief pred = kf_predict(b, system.transition_matrix(), system.process_noise_cov());
    return kf_update(pred, system.measurement_matrix(), system.measurement_noise_cov(), y);
  }
  if (b.mean.size() != 1 || y.size() != 1) throw std::invalid_argument("ekf_step: dimension mismatch");
  const double x = b.mean(0);
  const double F = ungm_state_jacobian(x);
  GaussianBelief pred;
  pred.mean = Eigen::VectorXd::Constant(1, ungm_drift(x, step_index, system.period(), system.ungm()));
  pred.cov = Eigen::MatrixXd::Constant(1, 1, F * b.cov(0, 0) * F) + system.process_noise_cov();
  const double xp = pred.mean(0);
  const Eigen::MatrixXd H = Eigen::MatrixXd::Constant(1, 1, ungm_meas_jacobian(xp));
  return joseph_update(pred, H, system.measurement_noise_cov(), y - system.measurement(pred.mean));
}

double ess(std::span<const double> weights) {
  double sq = 0.0;
  for (double w : weights) sq += w * w;
  return 1.0 / sq;
}

std::vector<std::size_t> systematic_resample(std::span<const double> weights, double u) {
  const std::size_t n = weights.size();
  if (n == 0) return {};
  if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("systematic offset must lie in [0, 1)");
  std::vector<std::size_t> idx(n);
  double cumulative = weights[0];
  std::size_t i = 0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double position = (u + static_cast<double>(j)) * inv_n;
    // i < n-1 guards against the cumulative sum falling short of 1 by rounding.
    while (position >= cumulative && i + 1 < n) cumulative += weights[++i];
    idx[j] = i;
  }
  return idx;
}

std::vector<std::size_t> systematic_resample(std::span<const double> weights, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  return systematic_resample(weights, uniform(rng));
}

ParticleBelief pf_step(const ParticleBelief& b, const DiscreteSystem& system, int step_index,
                       const Eigen::VectorXd& y, const FilterSpec& spec, Rng& rng, Execution exec) {
  const Eigen::Index n = b.size();
  if (n < 1 || b.weights.size() != n || b.particles.rows() != system.state_dim()) {
    throw std::invalid_argument("pf_step: invalid particle belief");
  }
  if (spec.kind != FilterKind::PF) throw std::invalid_argument("pf_step called with a non-PF spec");

  ParticleBelief next;
  if (should_resample(spec.resample, b.weights)) {
    const auto idx = systematic_resample(std::span<const double>(b.weights.data(), n), rng);
    kernels::gather(b.particles, idx, next.particles, exec);
    next.weights = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  } else {
    next = b;
  }

  // Normals are drawn serially in column order so the stream consumption is
  // independent of the thread count.
  Eigen::MatrixXd normals(system.state_dim(), n);
  std::normal_distribution<double> normal;
  for (Eigen::Index i = 0; i < normals.size(); ++i) normals.data()[i] = normal(rng);
  kernels::propagate(system, step_index, normals, next.particles, exec);

  Eigen::VectorXd logw;
  kernels::log_likelihood(system, next.particles, y, logw, exec);
  double max_logw = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    logw(i) += std::log(next.weights(i));
    if (!std::isnan(logw(i))) max_logw = std::max(max_logw, logw(i));
  }
  if (!std::isfinite(max_logw)) throw DegenerateWeights(step_index);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = std::isnan(logw(i)) ? 0.0 : std::exp(logw(i) - max_logw);
    next.weights(i) = w;
    total += w;
  }
  next.weights /= total;
  return next;
}

Eigen::VectorXd estimate(const GaussianBelief& b) { return b.mean; }

Eigen::VectorXd estimate(const ParticleBelief& b) { return b.particles * b.weights; }

Eigen::VectorXd estimate(const Belief& b) {
  return std::visit([](const auto& belief) { return estimate(belief); }, b);
}

ParticleBelief sample_particles(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, int count, Rng& rng) {
  if (count < 1) throw std::invalid_argument("particle count must be >= 1");
  const Eigen::MatrixXd s = symmetric_sqrt_psd(cov);
  ParticleBelief b;
  b.particles.resize(mean.size(), count);
  for (int i = 0; i < count; ++i) b.particles.col(i) = mean + sample_gaussian(s, rng);
  b.weights = Eigen::VectorXd::Constant(count, 1.0 / count);
  return b;
}

RecursiveFilter::RecursiveFilter(const FilterSpec& spec, const DiscreteSystem& system,
                                 const Eigen::VectorXd& prior_mean, const Eigen::MatrixXd& prior_cov, Rng& rng,
                                 Execution exec)
    : spec_(spec), system_(&system), exec_(exec) {
  spec_.validate();
  if (prior_mean.size() != system.state_dim()) throw std::invalid_argument("prior dimension mismatch");
  switch (spec_.kind) {
    case FilterKind::KF:
      if (!system.is_linear()) throw ConfigurationError("KF requires a linear system; use EKF or PF for UNGM");
      belief_ = GaussianBelief{prior_mean, prior_cov};
      break;
    case FilterKind::EKF:
      belief_ = GaussianBelief{prior_mean, prior_cov};
      break;
    case FilterKind::PF:
      belief_ = sample_particles(prior_mean, prior_cov, spec_.particle_count, rng);
      break;
  }
}

void RecursiveFilter::step(int step_index, const Eigen::VectorXd& y, Rng& rng) {
  switch (spec_.kind) {
    case FilterKind::KF: {
      const auto& g = std::get<GaussianBelief>(belief_);
      const GaussianBelief pred = kf_predict(g, system_->transition_matrix(), system_->process_noise_cov());
      belief_ = kf_update(pred, system_->measurement_matrix(), system_->measurement_noise_cov(), y);
      break;
    }
    case FilterKind::EKF:
      belief_ = ekf_step(std::get<GaussianBelief>(belief_), *system_, step_index, y);
      break;
    case FilterKind::PF:
      belief_ = pf_step(std::get<ParticleBelief>(belief_), *system_, step_index, y, spec_, rng, exec_);
      break;
  }
}

}  // namespace periodbench
