#include <gtest/gtest.h>

#include "periodbench/errors.hpp"
#include "periodbench/timing.hpp"

namespace periodbench {
namespace {

const FilterSpec kPf1000{FilterKind::PF, 1000};

TEST(Median, OddEvenAndOutliers) {
  EXPECT_EQ(median({4.0}), 4.0);
  EXPECT_EQ(median({1e-3, 2e-3, 100e-3}), 2e-3);
  EXPECT_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
  EXPECT_THROW(median({}), std::invalid_argument);
}

TEST(MakeProfile, FieldsAndResolutionFlag) {
  const auto p = make_profile({0.5}, 1e-9);
  EXPECT_EQ(p.median_secs_per_iter, 0.5);
  EXPECT_EQ(p.sample_count, 1);
  EXPECT_FALSE(p.low_resolution);
  const auto coarse = make_profile({1e-3, 2e-3, 100e-3}, 1e-3);
  EXPECT_EQ(coarse.median_secs_per_iter, 2e-3);
  EXPECT_EQ(coarse.raw_samples.size(), 3u);
  EXPECT_TRUE(coarse.low_resolution);
}

TEST(CostModel, Validation) {
  EXPECT_THROW(validate(CostModel{SyntheticCost{0.0, 0.0}}), std::invalid_argument);
  EXPECT_THROW(validate(CostModel{SyntheticCost{-1.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(validate(CostModel{MeasuredCost{0, 0}}), std::invalid_argument);
  EXPECT_NO_THROW(validate(CostModel{SyntheticCost{0.0, 1e-3}}));
  EXPECT_THROW(PeriodMapping(0.0), std::invalid_argument);
}

TEST(DerivePeriod, Examples) {
  EXPECT_EQ(derive_period(FixedPeriodCost{SamplingPeriod(1.0)}, std::nullopt, PeriodMapping(123.0), kPf1000).value(),
            1.0);
  EXPECT_EQ(derive_period(FixedPeriodCost{SamplingPeriod(1.0)}, std::nullopt, std::nullopt, kPf1000).value(), 1.0);
  EXPECT_DOUBLE_EQ(derive_period(SyntheticCost{0.0, 1e-3}, std::nullopt, PeriodMapping(1.0), kPf1000).value(), 1.0);
  EXPECT_DOUBLE_EQ(
      derive_period(MeasuredCost{}, make_profile({2e-3}, 1e-9), PeriodMapping(500.0), kPf1000).value(), 1.0);
}

TEST(DerivePeriod, KalmanFiltersCountAsOneUnit) {
  const FilterSpec ekf{FilterKind::EKF, 5000};
  EXPECT_DOUBLE_EQ(derive_period(SyntheticCost{0.5, 0.25}, std::nullopt, PeriodMapping(2.0), ekf).value(), 1.5);
}

TEST(DerivePeriod, Errors) {
  EXPECT_THROW(derive_period(SyntheticCost{0.0, 1e-3}, std::nullopt, std::nullopt, kPf1000), ConfigurationError);
  EXPECT_THROW(derive_period(MeasuredCost{}, std::nullopt, PeriodMapping(1.0), kPf1000), ConfigurationError);
  EXPECT_THROW(derive_period(MeasuredCost{}, make_profile({0.0}, 1e-9), PeriodMapping(1.0), kPf1000),
               ConfigurationError);
}

TEST(DerivePeriod, StrictlyIncreasingInParticleCountAndNoise) {
  const SyntheticCost cost{1e-4, 1e-3};
  const UngmModel ungm;
  double prev_t = 0.0;
  double prev_var = 0.0;
  for (int n : {1, 2, 5, 10, 50, 100, 1000, 10000, 100000}) {
    const auto t = derive_period(cost, std::nullopt, PeriodMapping(0.7), FilterSpec{FilterKind::PF, n});
    EXPECT_GT(t.value(), prev_t);
    EXPECT_GT(ungm_transition_variance(ungm, t), prev_var);
    prev_t = t.value();
    prev_var = ungm_transition_variance(ungm, t);
  }
}

TEST(ProfileFilter, RecordsRequestedSamples) {
  const auto sys = build_system(UngmModel{}, SamplingPeriod(1.0));
  Rng rng(1);
  const auto p = profile_filter(FilterSpec{FilterKind::EKF}, sys, 3, 7, rng);
  EXPECT_EQ(p.sample_count, 7);
  EXPECT_EQ(p.raw_samples.size(), 7u);
  EXPECT_EQ(p.median_secs_per_iter, median(p.raw_samples));
  EXPECT_GE(p.median_secs_per_iter, 0.0);
  EXPECT_THROW(profile_filter(FilterSpec{FilterKind::EKF}, sys, 0, 0, rng), std::invalid_argument);
}

TEST(ProfileFilter, MoreParticlesCostMore) {
  const auto sys = build_system(UngmModel{}, SamplingPeriod(1.0));
  Rng rng(2);
  const auto small = profile_filter(FilterSpec{FilterKind::PF, 100}, sys, 2, 9, rng);
  const auto large = profile_filter(FilterSpec{FilterKind::PF, 10000}, sys, 2, 9, rng);
  EXPECT_GT(large.median_secs_per_iter, 0.0);
  EXPECT_GE(large.median_secs_per_iter, small.median_secs_per_iter - steady_clock_resolution());
}

}  // namespace
}  // namespace periodbench
