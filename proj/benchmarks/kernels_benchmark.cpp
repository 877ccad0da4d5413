#include <random>

#include <benchmark/benchmark.h>

#include "periodbench/bench.hpp"
#include "periodbench/filters.hpp"
#include "periodbench/parallel.hpp"
#include "periodbench/particle_kernels.hpp"

namespace pb = periodbench;

namespace {

pb::Execution mode(const benchmark::State& state) {
  return state.range(1) == 0 ? pb::Execution::Serial : pb::Execution::Parallel;
}

Eigen::MatrixXd normals(Eigen::Index rows, Eigen::Index cols) {
  pb::Rng rng(1);
  std::normal_distribution<double> n;
  Eigen::MatrixXd z(rows, cols);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = n(rng);
  return z;
}

void label(benchmark::State& state) {
  state.SetLabel(state.range(1) == 0 ? "serial" : "parallel");
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Propagate(benchmark::State& state) {
  const auto sys = pb::build_system(pb::UngmModel{}, pb::SamplingPeriod(1.0));
  const Eigen::MatrixXd z = normals(1, state.range(0));
  Eigen::MatrixXd x = normals(1, state.range(0));
  for (auto _ : state) {
    pb::kernels::propagate(sys, 3, z, x, mode(state));
    benchmark::DoNotOptimize(x.data());
  }
  label(state);
}

void BM_LogLikelihood(benchmark::State& state) {
  const auto sys = pb::build_system(pb::CvModel{}, pb::SamplingPeriod(1.0));
  const Eigen::MatrixXd x = normals(4, state.range(0));
  const Eigen::Vector2d y(0.3, -0.2);
  Eigen::VectorXd out;
  for (auto _ : state) {
    pb::kernels::log_likelihood(sys, x, y, out, mode(state));
    benchmark::DoNotOptimize(out.data());
  }
  label(state);
}

void BM_PfStep(benchmark::State& state) {
  const auto sys = pb::build_system(pb::UngmModel{}, pb::SamplingPeriod(1.0));
  const auto n = static_cast<int>(state.range(0));
  pb::Rng rng(2);
  pb::ParticleBelief b = pb::sample_particles(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1), n, rng);
  const pb::FilterSpec spec{pb::FilterKind::PF, n};
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(1, 0.5);
  int k = 1;
  for (auto _ : state) {
    b = pb::pf_step(b, sys, k++, y, spec, rng, mode(state));
    benchmark::DoNotOptimize(b.weights.data());
  }
  label(state);
}

void BM_MonteCarlo(benchmark::State& state) {
  pb::RunConfig c;
  c.model = pb::UngmModel{};
  c.horizon = 20.0;
  c.mc_runs = static_cast<int>(state.range(0));
  c.seed = 3;
  c.filters = {{"pf", pb::FilterSpec{pb::FilterKind::PF, 500}, pb::FixedPeriodCost{}},
               {"ekf", pb::FilterSpec{pb::FilterKind::EKF}, pb::FixedPeriodCost{}}};
  for (auto _ : state) benchmark::DoNotOptimize(pb::monte_carlo(pb::Protocol::constant_noise(), c, {}, mode(state)));
  label(state);
}

void particle_args(benchmark::internal::Benchmark* b) {
  for (int n : {1000, 10000, 100000})
    for (int parallel : {0, 1}) b->Args({n, parallel});
}

}  // namespace

BENCHMARK(BM_Propagate)->Apply(particle_args);
BENCHMARK(BM_LogLikelihood)->Apply(particle_args);
BENCHMARK(BM_PfStep)->Apply(particle_args);
BENCHMARK(BM_MonteCarlo)->Args({16, 0})->Args({16, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
