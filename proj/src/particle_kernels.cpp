#include "periodbench/particle_kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace periodbench::kernels {
namespace {

struct UngmStep {
  double forcing;
  double noise_sd;

  double operator()(double x, double z) const noexcept {
    return x / 2.0 + 25.0 * x / (1.0 + x * x) + forcing + noise_sd * z;
  }
};

struct CvStep {
  double t;
  Eigen::Matrix4d sqrt_q;

  void operator()(double* x, const double* z) const noexcept {
    const Eigen::Map<const Eigen::Vector4d> zv(z);
    const Eigen::Vector4d w = sqrt_q * zv;
    x[0] += t * x[1] + w(0);
    x[1] += w(1);
    x[2] += t * x[3] + w(2);
    x[3] += w(3);
  }
};

}  // namespace

void propagate(const DiscreteSystem& system, int step_index, const Eigen::MatrixXd& normals,
               Eigen::MatrixXd& particles, Execution exec) {
  if (normals.rows() != particles.rows() || normals.cols() != particles.cols() ||
      particles.rows() != system.state_dim()) {
    throw std::invalid_argument("propagate: dimension mismatch");
  }
  const std::ptrdiff_t n = particles.cols();
  if (system.kind() == ModelKind::Ungm) {
    const auto& m = system.ungm();
    const UngmStep f{ungm_drift(0.0, step_index, system.period(), m), system.process_noise_sqrt()(0, 0)};
    double* x = particles.data();
    const double* z = normals.data();
    if (use_thread_team(exec, n)) {
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t i = 0; i < n; ++i) x[i] = f(x[i], z[i]);
    } else {
      for (std::ptrdiff_t i = 0; i < n; ++i) x[i] = f(x[i], z[i]);
    }
    return;
  }
  const CvStep f{system.period().value(), system.process_noise_sqrt()};
  double* x = particles.data();
  const double* z = normals.data();
  if (use_thread_team(exec, n)) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) f(x + 4 * i, z + 4 * i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) f(x + 4 * i, z + 4 * i);
  }
}

void log_likelihood(const DiscreteSystem& system, const Eigen::MatrixXd& particles, const Eigen::VectorXd& y,
                    Eigen::VectorXd& out, Execution exec) {
  const auto& precision = system.measurement_precision();
  if (!precision) throw std::invalid_argument("particle likelihood needs a positive definite R");
  if (y.size() != system.meas_dim() || particles.rows() != system.state_dim()) {
    throw std::invalid_argument("log_likelihood: dimension mismatch");
  }
  const std::ptrdiff_t n = particles.cols();
  out.resize(n);
  const double* x = particles.data();
  double* ll = out.data();
  if (system.kind() == ModelKind::Ungm) {
    const double half_prec = 0.5 * (*precision)(0, 0);
    const double y0 = y(0);
    auto kernel = [=](std::ptrdiff_t i) {
      const double r = y0 - x[i] * x[i] / 20.0;
      ll[i] = -half_prec * r * r;
    };
    if (use_thread_team(exec, n)) {
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t i = 0; i < n; ++i) kernel(i);
    } else {
      for (std::ptrdiff_t i = 0; i < n; ++i) kernel(i);
    }
    return;
  }
  const Eigen::Matrix2d p = *precision;
  const double y0 = y(0);
  const double y1 = y(1);
  auto kernel = [=](std::ptrdiff_t i) {
    const double r0 = y0 - x[4 * i];
    const double r1 = y1 - x[4 * i + 2];
    ll[i] = -0.5 * (p(0, 0) * r0 * r0 + 2.0 * p(0, 1) * r0 * r1 + p(1, 1) * r1 * r1);
  };
  if (use_thread_team(exec, n)) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) kernel(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) kernel(i);
  }
}

void gather(const Eigen::MatrixXd& in, const std::vector<std::size_t>& indices, Eigen::MatrixXd& out,
            Execution exec) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(indices.size());
  out.resize(in.rows(), n);
  if (use_thread_team(exec, n)) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) out.col(j) = in.col(static_cast<Eigen::Index>(indices[j]));
  } else {
    for (std::ptrdiff_t j = 0; j < n; ++j) out.col(j) = in.col(static_cast<Eigen::Index>(indices[j]));
  }
}

}  // namespace periodbench::kernels
