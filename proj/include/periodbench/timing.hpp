#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "periodbench/filters.hpp"
#include "periodbench/models.hpp"
#include "periodbench/rng.hpp"

namespace periodbench {

struct MeasuredCost {
  int warmup = 10;
  int samples = 50;
};

/// Per-iteration cost c0 + c1 * particle_count seconds.
struct SyntheticCost {
  double c0 = 0.0;
  double c1 = 0.0;
};

struct FixedPeriodCost {
  SamplingPeriod period{1.0};
};

using CostModel = std::variant<MeasuredCost, SyntheticCost, FixedPeriodCost>;

void validate(const CostModel& cost);
const char* cost_name(const CostModel& cost) noexcept;
bool needs_mapping(const CostModel& cost) noexcept;

struct TimingProfile {
  double median_secs_per_iter = 0.0;
  int sample_count = 0;
  std::vector<double> raw_samples;
  /// Set when the median is within a few ticks of the clock's resolution.
  bool low_resolution = false;
};

/// Simulation time units per wall-clock second.
class PeriodMapping {
 public:
  explicit PeriodMapping(double kappa);
  double kappa() const noexcept { return kappa_; }

 private:
  double kappa_;
};

double median(std::vector<double> values);

/// Builds a profile from raw per-iteration durations.
TimingProfile make_profile(std::vector<double> raw_samples, double clock_resolution_secs);

/// Smallest observable non-zero step of the steady clock, in seconds.
double steady_clock_resolution();

/// Times `samples` filter iterations after `warmup` discarded ones. Each
/// iteration advances a synthetic truth, draws a fresh measurement and
/// times only the filter step. Must not overlap other benchmark work.
TimingProfile profile_filter(const FilterSpec& spec, const DiscreteSystem& system, int warmup, int samples,
                             Rng& rng);

SamplingPeriod derive_period(const CostModel& cost, const std::optional<TimingProfile>& profile,
                             const std::optional<PeriodMapping>& mapping, const FilterSpec& spec);

}  // namespace periodbench
