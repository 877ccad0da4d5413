#include "periodbench/bench.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <set>
#include <stdexcept>

#include "periodbench/errors.hpp"

namespace periodbench {
namespace {

constexpr std::uint64_t kTruthStream = 0x7472757468ULL;   // "truth"
constexpr std::uint64_t kFilterStream = 0x66696c746572ULL;  // "filter"
constexpr std::uint64_t kProfileStream = 0x70726f66ULL;     // "prof"

struct FilterPlan {
  const FilterEntry* entry;
  SamplingPeriod period;
  int steps;
  double noise;
};

}  // namespace

const char* Protocol::name() const noexcept {
  return kind_ == Kind::ConstantNoise ? "constant_noise" : "period_matched";
}

void RunConfig::validate() const {
  std::visit([](const auto& m) { m.validate(); }, model);
  if (filters.empty()) throw ConfigurationError("at least one filter is required");
  if (mc_runs < 1) throw ConfigurationError("mc_runs must be >= 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigurationError("horizon must be positive");
  if (protocols.empty()) throw ConfigurationError("at least one protocol is required");
  const int dim = std::holds_alternative<UngmModel>(model) ? 1 : 4;
  if (rmse_components.empty()) throw ConfigurationError("rmse_components must not be empty");
  for (int c : rmse_components) {
    if (c < 0 || c >= dim) throw ConfigurationError("rmse component " + std::to_string(c) + " out of range");
  }
  std::set<std::string> labels;
  for (const auto& f : filters) {
    if (f.label.empty()) throw ConfigurationError("filter label must not be empty");
    if (!labels.insert(f.label).second) throw ConfigurationError("duplicate filter label '" + f.label + "'");
    f.spec.validate();
    periodbench::validate(f.cost);
    if (f.spec.kind == FilterKind::KF && dim != 4) {
      throw ConfigurationError("filter '" + f.label + "': KF requires the linear CV model");
    }
    if (needs_mapping(f.cost) && !mapping) {
      throw ConfigurationError("filter '" + f.label + "': kappa is required for measured/synthetic cost");
    }
  }
}

Protocol RunConfig::protocol(Protocol::Kind kind) const {
  return kind == Protocol::Kind::ConstantNoise ? Protocol::constant_noise(reference_period)
                                               : Protocol::period_matched();
}

int steps_for_horizon(double horizon, SamplingPeriod period) {
  if (!(horizon > 0.0)) throw ConfigurationError("horizon must be positive");
  // The small slack keeps e.g. 100 / 0.1 from flooring to 999.
  const double ratio = horizon / period.value();
  const double k = std::floor(ratio * (1.0 + 1e-12));
  if (k < 1.0) throw ConfigurationError("period exceeds horizon");
  if (k > static_cast<double>(std::numeric_limits<int>::max())) throw ConfigurationError("too many steps");
  return static_cast<int>(k);
}

double rmse(const Trajectory& truth, const std::vector<Eigen::VectorXd>& estimates, std::span<const int> components) {
  if (truth.states.size() != estimates.size() + 1) throw std::invalid_argument("rmse: length mismatch");
  if (estimates.empty()) throw std::invalid_argument("rmse: no estimates");
  double sum = 0.0;
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    const auto& x = truth.states[k + 1];
    const auto& e = estimates[k];
    if (x.size() != e.size()) throw std::invalid_argument("rmse: state dimension mismatch");
    for (int c : components) {
      if (c < 0 || c >= x.size()) throw std::invalid_argument("rmse: component out of range");
      const double d = x(c) - e(c);
      sum += d * d;
    }
  }
  return std::sqrt(sum / static_cast<double>(estimates.size()));
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

SimulatedRun simulate_run(const RunConfig& config, SamplingPeriod period, int run_index) {
  Rng rng = make_stream(config.seed, {kTruthStream, static_cast<std::uint64_t>(run_index)});
  DiscreteSystem system = build_system(config.model, period);
  const int steps = steps_for_horizon(config.horizon, period);
  const Eigen::VectorXd x0 = default_initial_state(config.model);
  Trajectory truth = simulate_truth(system, x0, steps, rng);
  MeasurementSequence meas = generate_measurements(system, truth, rng);
  return {std::move(system), std::move(truth), std::move(meas), x0, default_prior_cov(config.model)};
}

SamplingPeriod period_for(const Protocol& protocol, const FilterEntry& entry, const RunConfig& config,
                          const ProfileMap& profiles) {
  if (protocol.kind() == Protocol::Kind::ConstantNoise) return protocol.reference_period();
  std::optional<TimingProfile> profile;
  if (auto it = profiles.find(entry.label); it != profiles.end()) profile = it->second;
  return derive_period(entry.cost, profile, config.mapping, entry.spec);
}

std::vector<Eigen::VectorXd> run_filter(const FilterEntry& entry, const SimulatedRun& run, const RunConfig& config,
                                        int run_index, Execution exec) {
  Rng rng = make_stream(config.seed, {kFilterStream, stable_hash(entry.label), static_cast<std::uint64_t>(run_index)});
  RecursiveFilter filter(entry.spec, run.system, run.prior_mean, run.prior_cov, rng, exec);
  std::vector<Eigen::VectorXd> estimates;
  estimates.reserve(run.measurements.measurements.size());
  for (std::size_t k = 0; k < run.measurements.measurements.size(); ++k) {
    filter.step(static_cast<int>(k) + 1, run.measurements.measurements[k], rng);
    estimates.push_back(filter.estimate());
  }
  return estimates;
}

RunResult run_single(const Protocol& protocol, const FilterEntry& entry, const RunConfig& config, int run_index,
                     const ProfileMap& profiles, Execution exec) {
  const SamplingPeriod t = period_for(protocol, entry, config, profiles);
  const SimulatedRun run = simulate_run(config, t, run_index);
  const auto estimates = run_filter(entry, run, config, run_index, exec);
  return {rmse(run.truth, estimates, config.rmse_components), t};
}

ProfileMap collect_profiles(const RunConfig& config) {
  ProfileMap profiles;
  for (const auto& f : config.filters) {
    const auto* measured = std::get_if<MeasuredCost>(&f.cost);
    if (!measured) continue;
    const DiscreteSystem system = build_system(config.model, config.reference_period);
    Rng rng = make_stream(config.seed, {kProfileStream, stable_hash(f.label)});
    profiles.emplace(f.label, profile_filter(f.spec, system, measured->warmup, measured->samples, rng));
  }
  return profiles;
}

std::vector<EvalRow> monte_carlo(const Protocol& protocol, const RunConfig& config, const ProfileMap& profiles,
                                 Execution exec) {
  config.validate();
  std::vector<FilterPlan> plans;
  plans.reserve(config.filters.size());
  for (const auto& f : config.filters) {
    const SamplingPeriod t = period_for(protocol, f, config, profiles);
    plans.push_back({&f, t, steps_for_horizon(config.horizon, t), noise_summary(build_system(config.model, t))});
  }

  const std::ptrdiff_t runs = config.mc_runs;
  const std::ptrdiff_t tasks = static_cast<std::ptrdiff_t>(plans.size()) * runs;
  std::vector<double> results(static_cast<std::size_t>(tasks), std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> failures(static_cast<std::size_t>(tasks));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(tasks));

  auto task = [&](std::ptrdiff_t i) {
    const auto& plan = plans[static_cast<std::size_t>(i / runs)];
    const int run_index = static_cast<int>(i % runs);
    try {
      const SimulatedRun run = simulate_run(config, plan.period, run_index);
      const auto estimates = run_filter(*plan.entry, run, config, run_index, exec);
      results[static_cast<std::size_t>(i)] = rmse(run.truth, estimates, config.rmse_components);
    } catch (const FilterFailure& e) {
      failures[static_cast<std::size_t>(i)] = e.what();
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  };

  if (exec == Execution::Parallel && max_threads() > 1 && tasks > 1) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < tasks; ++i) task(i);
  } else {
    for (std::ptrdiff_t i = 0; i < tasks; ++i) task(i);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<EvalRow> rows;
  for (std::size_t p = 0; p < plans.size(); ++p) {
    const auto& plan = plans[p];
    EvalRow row;
    row.label = plan.entry->label;
    row.protocol = protocol.name();
    row.particle_count = plan.entry->spec.cost_units();
    row.period = plan.period.value();
    row.noise_summary = plan.noise;
    row.steps = plan.steps;
    row.seed = config.seed;
    std::vector<double> ok;
    std::string first_failure;
    for (std::ptrdiff_t r = 0; r < runs; ++r) {
      const auto i = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) * runs + r);
      if (failures[i].empty()) {
        ok.push_back(results[i]);
      } else if (first_failure.empty()) {
        first_failure = "run " + std::to_string(r) + ": " + failures[i];
      }
    }
    row.runs_ok = static_cast<int>(ok.size());
    row.runs_failed = static_cast<int>(runs) - row.runs_ok;
    if (ok.empty()) {
      row.rmse_median = std::numeric_limits<double>::quiet_NaN();
      row.rmse_iqr = std::numeric_limits<double>::quiet_NaN();
      row.failure_reason = "all runs failed (" + first_failure + ")";
    } else {
      row.rmse_median = median(ok);
      row.rmse_iqr = quantile(ok, 0.75) - quantile(ok, 0.25);
    }
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const EvalRow& a, const EvalRow& b) { return a.label < b.label; });
  return rows;
}

EvalReport compare(const RunConfig& config, Execution exec) {
  config.validate();
  return compare(config, collect_profiles(config), exec);
}

EvalReport compare(const RunConfig& config, const ProfileMap& profiles, Execution exec) {
  EvalReport report;
  for (Protocol::Kind kind : config.protocols) {
    auto rows = monte_carlo(config.protocol(kind), config, profiles, exec);
    report.rows.insert(report.rows.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
  }
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const EvalRow& a, const EvalRow& b) { return a.label < b.label; });
  return report;
}

}  // namespace periodbench
