#include "periodbench/models.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace periodbench {
namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
  }
}

void require_symmetric(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols()) throw std::invalid_argument(std::string(what) + " must be square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw std::invalid_argument(std::string(what) + " must be symmetric");
  }
}

}  // namespace

SamplingPeriod::SamplingPeriod(double t) : t_(t) { require_positive(t, "sampling period"); }

void UngmModel::validate() const {
  require_positive(q, "UNGM q");
  require_positive(meas_noise_var, "UNGM meas_noise_var");
  if (!std::isfinite(forcing_amplitude) || !std::isfinite(forcing_rate)) {
    throw std::invalid_argument("UNGM forcing parameters must be finite");
  }
}

void CvModel::validate() const {
  require_positive(sigma1, "CV sigma1");
  require_positive(sigma2, "CV sigma2");
  require_positive(meas_noise_var, "CV meas_noise_var");
}

double ungm_drift(double x, int step_index, SamplingPeriod period, const UngmModel& model) {
  if (step_index < 1) throw std::invalid_argument("UNGM step index must be >= 1");
  const double tau = static_cast<double>(step_index - 1) * period.value();
  return x / 2.0 + 25.0 * x / (1.0 + x * x) + model.forcing_amplitude * std::cos(model.forcing_rate * tau);
}

double ungm_transition_variance(const UngmModel& model, SamplingPeriod period) {
  return model.q * period.value();
}

Eigen::Matrix4d cv_transition_matrix(double t) {
  Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
  f(0, 1) = t;
  f(2, 3) = t;
  return f;
}

Eigen::Matrix<double, 4, 2> cv_noise_input_matrix(double t) {
  Eigen::Matrix<double, 4, 2> g = Eigen::Matrix<double, 4, 2>::Zero();
  g(0, 0) = t * t / 2.0;
  g(1, 0) = t;
  g(2, 1) = t * t / 2.0;
  g(3, 1) = t;
  return g;
}

Eigen::Matrix4d cv_process_cov(const CvModel& model, double t) {
  // G diag(s1^2, s2^2) G^T written out per axis block.
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double t4 = t2 * t2;
  Eigen::Matrix4d q = Eigen::Matrix4d::Zero();
  const double v[2] = {model.sigma1 * model.sigma1, model.sigma2 * model.sigma2};
  for (int axis = 0; axis < 2; ++axis) {
    const int i = 2 * axis;
    q(i, i) = v[axis] * t4 / 4.0;
    q(i, i + 1) = v[axis] * t3 / 2.0;
    q(i + 1, i) = v[axis] * t3 / 2.0;
    q(i + 1, i + 1) = v[axis] * t2;
  }
  return q;
}

Eigen::MatrixXd symmetric_sqrt_psd(const Eigen::MatrixXd& cov) {
  require_symmetric(cov, "covariance");
  const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) throw std::invalid_argument("covariance eigendecomposition failed");
  Eigen::VectorXd lambda = eig.eigenvalues();
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < -1e-12) throw std::invalid_argument("covariance is not positive semidefinite");
    lambda(i) = lambda(i) < 0.0 ? 0.0 : std::sqrt(lambda(i));
  }
  return eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
}

DiscreteSystem::DiscreteSystem(ModelKind kind, Model model, SamplingPeriod period)
    : kind_(kind), model_(std::move(model)), period_(period) {}

void DiscreteSystem::set_process_cov(const Eigen::MatrixXd& cov) {
  if (cov.rows() != state_dim() || cov.cols() != state_dim()) {
    throw std::invalid_argument("process noise covariance has wrong dimension");
  }
  process_sqrt_ = symmetric_sqrt_psd(cov);
  process_cov_ = 0.5 * (cov + cov.transpose());
}

void DiscreteSystem::set_measurement_cov(const Eigen::MatrixXd& cov) {
  if (cov.rows() != meas_dim() || cov.cols() != meas_dim()) {
    throw std::invalid_argument("measurement noise covariance has wrong dimension");
  }
  meas_sqrt_ = symmetric_sqrt_psd(cov);
  meas_cov_ = 0.5 * (cov + cov.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(meas_cov_);
  if (llt.info() == Eigen::Success) {
    meas_precision_ = llt.solve(Eigen::MatrixXd::Identity(meas_dim(), meas_dim()));
  } else {
    meas_precision_.reset();
  }
}

const UngmModel& DiscreteSystem::ungm() const {
  if (kind_ != ModelKind::Ungm) throw std::logic_error("system is not UNGM");
  return std::get<UngmModel>(model_);
}

const CvModel& DiscreteSystem::cv() const {
  if (kind_ != ModelKind::Cv) throw std::logic_error("system is not CV");
  return std::get<CvModel>(model_);
}

Eigen::VectorXd DiscreteSystem::transition(const Eigen::VectorXd& x, int step_index) const {
  if (x.size() != state_dim()) throw std::invalid_argument("state dimension mismatch");
  if (kind_ == ModelKind::Ungm) {
    return Eigen::VectorXd::Constant(1, ungm_drift(x(0), step_index, period_, ungm()));
  }
  return transition_matrix_ * x;
}

Eigen::VectorXd DiscreteSystem::measurement(const Eigen::VectorXd& x) const {
  if (x.size() != state_dim()) throw std::invalid_argument("state dimension mismatch");
  if (kind_ == ModelKind::Ungm) return Eigen::VectorXd::Constant(1, x(0) * x(0) / 20.0);
  return measurement_matrix_ * x;
}

const Eigen::MatrixXd& DiscreteSystem::transition_matrix() const {
  if (!is_linear()) throw std::logic_error("transition matrix requested for a nonlinear system");
  return transition_matrix_;
}

const Eigen::MatrixXd& DiscreteSystem::measurement_matrix() const {
  if (!is_linear()) throw std::logic_error("measurement matrix requested for a nonlinear system");
  return measurement_matrix_;
}

DiscreteSystem DiscreteSystem::with_process_noise(const Eigen::MatrixXd& cov) const {
  DiscreteSystem copy = *this;
  copy.set_process_cov(cov);
  return copy;
}

DiscreteSystem DiscreteSystem::with_measurement_noise(const Eigen::MatrixXd& cov) const {
  DiscreteSystem copy = *this;
  copy.set_measurement_cov(cov);
  return copy;
}

DiscreteSystem build_system(const Model& model, SamplingPeriod period) {
  if (const auto* m = std::get_if<UngmModel>(&model)) {
    m->validate();
    DiscreteSystem sys(ModelKind::Ungm, model, period);
    sys.set_process_cov(Eigen::MatrixXd::Constant(1, 1, ungm_transition_variance(*m, period)));
    sys.set_measurement_cov(Eigen::MatrixXd::Constant(1, 1, m->meas_noise_var));
    return sys;
  }
  const auto& m = std::get<CvModel>(model);
  m.validate();
  DiscreteSystem sys(ModelKind::Cv, model, period);
  sys.transition_matrix_ = cv_transition_matrix(period);
  sys.measurement_matrix_ = Eigen::MatrixXd::Zero(2, 4);
  sys.measurement_matrix_(0, 0) = 1.0;
  sys.measurement_matrix_(1, 2) = 1.0;
  sys.set_process_cov(cv_process_cov(m, period));
  sys.set_measurement_cov(Eigen::MatrixXd::Identity(2, 2) * m.meas_noise_var);
  return sys;
}

double noise_summary(const DiscreteSystem& system) {
  if (system.kind() == ModelKind::Ungm) return system.process_noise_cov()(0, 0);
  return system.process_noise_cov().trace();
}

Eigen::VectorXd sample_gaussian(const Eigen::MatrixXd& sqrt_cov, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(sqrt_cov.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  return sqrt_cov * z;
}

Trajectory simulate_truth(const DiscreteSystem& system, const Eigen::VectorXd& x0, int steps, Rng& rng) {
  if (x0.size() != system.state_dim()) throw std::invalid_argument("initial state dimension mismatch");
  if (steps < 1) throw std::invalid_argument("simulate_truth needs at least one step");
  Trajectory traj{system.period(), {}};
  traj.states.reserve(static_cast<std::size_t>(steps) + 1);
  traj.states.push_back(x0);
  for (int k = 1; k <= steps; ++k) {
    traj.states.push_back(system.transition(traj.states.back(), k) + sample_gaussian(system.process_noise_sqrt(), rng));
  }
  return traj;
}

MeasurementSequence generate_measurements(const DiscreteSystem& system, const Trajectory& traj, Rng& rng) {
  MeasurementSequence seq;
  if (traj.states.empty()) return seq;
  seq.measurements.reserve(traj.states.size() - 1);
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    if (traj.states[k].size() != system.state_dim()) {
      throw std::invalid_argument("trajectory state dimension mismatch");
    }
    seq.measurements.push_back(system.measurement(traj.states[k]) +
                               sample_gaussian(system.measurement_noise_sqrt(), rng));
  }
  return seq;
}

Eigen::VectorXd default_initial_state(const Model& model) {
  if (std::holds_alternative<UngmModel>(model)) return Eigen::VectorXd::Zero(1);
  Eigen::VectorXd x0(4);
  x0 << 0.0, 1.0, 0.0, 1.0;
  return x0;
}

Eigen::MatrixXd default_prior_cov(const Model& model) {
  if (std::holds_alternative<UngmModel>(model)) return Eigen::MatrixXd::Constant(1, 1, 10.0);
  return Eigen::MatrixXd::Identity(4, 4);
}

}  // namespace periodbench
