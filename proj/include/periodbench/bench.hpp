#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "periodbench/filters.hpp"
#include "periodbench/models.hpp"
#include "periodbench/parallel.hpp"
#include "periodbench/timing.hpp"

namespace periodbench {

/// ConstantNoise runs every filter at one reference period regardless of its
/// cost. PeriodMatched runs each filter at the period its cost implies.
class Protocol {
 public:
  enum class Kind { ConstantNoise, PeriodMatched };

  static Protocol constant_noise(SamplingPeriod reference = SamplingPeriod(1.0)) {
    return Protocol(Kind::ConstantNoise, reference);
  }
  static Protocol period_matched() { return Protocol(Kind::PeriodMatched, SamplingPeriod(1.0)); }

  Kind kind() const noexcept { return kind_; }
  SamplingPeriod reference_period() const noexcept { return reference_; }
  const char* name() const noexcept;

 private:
  Protocol(Kind kind, SamplingPeriod reference) : kind_(kind), reference_(reference) {}
  Kind kind_;
  SamplingPeriod reference_;
};

struct FilterEntry {
  std::string label;
  FilterSpec spec;
  CostModel cost;
};

struct RunConfig {
  Model model = UngmModel{};
  std::vector<FilterEntry> filters;
  double horizon = 100.0;
  int mc_runs = 1;
  std::uint64_t seed = 0;
  std::optional<PeriodMapping> mapping;
  std::vector<int> rmse_components{0};
  SamplingPeriod reference_period{1.0};
  std::vector<Protocol::Kind> protocols{Protocol::Kind::ConstantNoise, Protocol::Kind::PeriodMatched};

  void validate() const;
  Protocol protocol(Protocol::Kind kind) const;
};

struct EvalRow {
  std::string label;
  std::string protocol;
  int particle_count = 1;
  double period = 0.0;
  double noise_summary = 0.0;
  int steps = 0;
  double rmse_median = 0.0;
  double rmse_iqr = 0.0;
  int runs_ok = 0;
  int runs_failed = 0;
  std::uint64_t seed = 0;
  std::string failure_reason;  // empty unless every run failed
};

struct EvalReport {
  std::vector<EvalRow> rows;
};

using ProfileMap = std::map<std::string, TimingProfile>;

int steps_for_horizon(double horizon, SamplingPeriod period);

double rmse(const Trajectory& truth, const std::vector<Eigen::VectorXd>& estimates, std::span<const int> components);

/// Linear-interpolation quantile (Hyndman-Fan type 7) of an unsorted sample.
double quantile(std::vector<double> values, double p);

/// Truth, measurements and prior for one Monte Carlo replication at period t.
/// The random stream depends on (seed, run_index) only, so every filter that
/// runs at the same period sees the same realization.
struct SimulatedRun {
  DiscreteSystem system;
  Trajectory truth;
  MeasurementSequence measurements;
  Eigen::VectorXd prior_mean;
  Eigen::MatrixXd prior_cov;
};

SimulatedRun simulate_run(const RunConfig& config, SamplingPeriod period, int run_index);

/// Period a filter runs at under the protocol.
SamplingPeriod period_for(const Protocol& protocol, const FilterEntry& entry, const RunConfig& config,
                          const ProfileMap& profiles);

struct RunResult {
  double rmse;
  SamplingPeriod period;
};

/// Filter estimates for k = 1..K on a simulated run.
std::vector<Eigen::VectorXd> run_filter(const FilterEntry& entry, const SimulatedRun& run, const RunConfig& config,
                                        int run_index, Execution exec = Execution::Parallel);

RunResult run_single(const Protocol& protocol, const FilterEntry& entry, const RunConfig& config, int run_index,
                     const ProfileMap& profiles = {}, Execution exec = Execution::Parallel);

/// Profiles every Measured filter, sequentially, before any evaluation starts.
ProfileMap collect_profiles(const RunConfig& config);

/// One row per filter, ordered by label.
std::vector<EvalRow> monte_carlo(const Protocol& protocol, const RunConfig& config, const ProfileMap& profiles = {},
                                 Execution exec = Execution::Parallel);

/// Rows for every configured protocol, ordered by (label, protocol).
EvalReport compare(const RunConfig& config, Execution exec = Execution::Parallel);
EvalReport compare(const RunConfig& config, const ProfileMap& profiles, Execution exec = Execution::Parallel);

}  // namespace periodbench
