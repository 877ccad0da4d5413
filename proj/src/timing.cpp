#include "periodbench/timing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "periodbench/errors.hpp"

namespace periodbench {

void validate(const CostModel& cost) {
  if (const auto* s = std::get_if<SyntheticCost>(&cost)) {
    if (!(s->c0 >= 0.0) || !(s->c1 >= 0.0) || !(s->c0 + s->c1 > 0.0)) {
      throw std::invalid_argument("synthetic cost needs c0 >= 0, c1 >= 0 and c0 + c1 > 0");
    }
  } else if (const auto* m = std::get_if<MeasuredCost>(&cost)) {
    if (m->samples < 1 || m->warmup < 0) throw std::invalid_argument("measured cost needs samples >= 1, warmup >= 0");
  }
}

const char* cost_name(const CostModel& cost) noexcept {
  switch (cost.index()) {
    case 0: return "measured";
    case 1: return "synthetic";
    default: return "fixed";
  }
}

bool needs_mapping(const CostModel& cost) noexcept { return !std::holds_alternative<FixedPeriodCost>(cost); }

PeriodMapping::PeriodMapping(double kappa) : kappa_(kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be positive and finite");
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

TimingProfile make_profile(std::vector<double> raw_samples, double clock_resolution_secs) {
  TimingProfile p;
  p.median_secs_per_iter = median(raw_samples);
  p.sample_count = static_cast<int>(raw_samples.size());
  p.raw_samples = std::move(raw_samples);
  p.low_resolution = p.median_secs_per_iter < 10.0 * clock_resolution_secs;
  return p;
}

double steady_clock_resolution() {
  using clock = std::chrono::steady_clock;
  double best = std::chrono::duration<double>(clock::duration(1)).count();
  double observed = 1.0;
  for (int i = 0; i < 64; ++i) {
    const auto a = clock::now();
    auto b = clock::now();
    while (b == a) b = clock::now();
    observed = std::min(observed, std::chrono::duration<double>(b - a).count());
  }
  return std::max(best, observed);
}

TimingProfile profile_filter(const FilterSpec& spec, const DiscreteSystem& system, int warmup, int samples,
                             Rng& rng) {
  if (samples < 1 || warmup < 0) throw std::invalid_argument("profile_filter needs samples >= 1, warmup >= 0");
  using clock = std::chrono::steady_clock;

  // A fresh PF belief is built from the model prior; the estimate is discarded.
  Eigen::VectorXd truth = default_initial_state(system.model());
  const Eigen::MatrixXd prior_cov = default_prior_cov(system.model());
  RecursiveFilter filter(spec, system, truth, prior_cov, rng);

  std::vector<double> raw;
  raw.reserve(static_cast<std::size_t>(samples));
  const int total = warmup + samples;
  for (int k = 1; k <= total; ++k) {
    truth = system.transition(truth, k) + sample_gaussian(system.process_noise_sqrt(), rng);
    const Eigen::VectorXd y = system.measurement(truth) + sample_gaussian(system.measurement_noise_sqrt(), rng);
    const auto start = clock::now();
    try {
      filter.step(k, y, rng);
    } catch (const FilterFailure&) {
      // Cost is what matters here; restart from the prior and keep timing.
      filter = RecursiveFilter(spec, system, truth, prior_cov, rng);
    }
    const auto stop = clock::now();
    if (k > warmup) raw.push_back(std::chrono::duration<double>(stop - start).count());
  }
  return make_profile(std::move(raw), steady_clock_resolution());
}

SamplingPeriod derive_period(const CostModel& cost, const std::optional<TimingProfile>& profile,
                             const std::optional<PeriodMapping>& mapping, const FilterSpec& spec) {
  if (const auto* fixed = std::get_if<FixedPeriodCost>(&cost)) return fixed->period;
  if (!mapping) throw ConfigurationError("kappa is required for measured and synthetic cost models");
  double t = 0.0;
  if (const auto* s = std::get_if<SyntheticCost>(&cost)) {
    t = mapping->kappa() * (s->c0 + s->c1 * static_cast<double>(spec.cost_units()));
  } else {
    if (!profile) throw ConfigurationError("measured cost model needs a timing profile");
    t = mapping->kappa() * profile->median_secs_per_iter;
  }
  if (!(t > 0.0) || !std::isfinite(t)) throw ConfigurationError("derived sampling period is not positive");
  return SamplingPeriod(t);
}

}  // namespace periodbench
