#include <gtest/gtest.h>

#include <cmath>

#include "ppstop/simulate.hpp"

using namespace ppstop;

TEST(GenTopic, UniformExtremes) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    EXPECT_EQ(gen_topic(300, UniformRate{0.0}, seed).total_relevant(), 0);
    EXPECT_EQ(gen_topic(50, UniformRate{1.0}, seed).total_relevant(), 50);
  }
}

TEST(GenTopic, StepAndBimodalRespectCutoff) {
  const auto step = gen_topic(500, StepRate{1.0, 120}, 3);
  EXPECT_EQ(step.rel_at(120), 120);
  EXPECT_EQ(step.total_relevant(), 120);
  const auto bi = gen_topic(500, BimodalRate{0.0, 1.0, 200}, 3);
  EXPECT_EQ(bi.rel_at(200), 0);
  EXPECT_EQ(bi.total_relevant(), 300);
}

TEST(GenTopic, InvalidParametersThrow) {
  EXPECT_THROW(gen_topic(10, UniformRate{-0.1}, 1), DomainError);
  EXPECT_THROW(gen_topic(10, ExponentialRate{0.5, NAN}, 1), DomainError);
  EXPECT_THROW(gen_topic(10, StepRate{0.5, -1}, 1), DomainError);
  EXPECT_THROW(gen_topic(0, UniformRate{0.5}, 1), DomainError);
}

TEST(GenTopic, DeterministicPerSeed) {
  const RateFamily f = ExponentialRate{0.5, -0.005};
  EXPECT_EQ(gen_topic(2000, f, 99), gen_topic(2000, f, 99));
  EXPECT_NE(gen_topic(2000, f, 99), gen_topic(2000, f, 100));
}

TEST(GenTopic, RateClippedToUnitInterval) {
  EXPECT_EQ(rate_at(ExponentialRate{2.0, 0.0}, 5), 1.0);
  EXPECT_EQ(gen_topic(40, ExponentialRate{2.0, 0.0}, 1).total_relevant(), 40);
}

TEST(GenTopic, MonteCarloMeanMatchesExpectation) {
  // Each rank is a Bernoulli draw, so the exact mean is the geometric sum
  // 0.5 * sum_{i=1..2000} e^{-0.005 i} (about 99.75). The continuous
  // integral 100 (1 - e^{-10}) = 99.995 differs by about half a document.
  const double r = std::exp(-0.005);
  const double expected = 0.5 * r * (1.0 - std::pow(r, 2000)) / (1.0 - r);
  const RateFamily f = ExponentialRate{0.5, -0.005};
  EXPECT_NEAR(expected_relevant(f, 2000), expected, 1e-9);

  const int seeds = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const auto x = static_cast<double>(
        gen_topic(2000, f, derive_seed(7, std::to_string(s))).total_relevant());
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / seeds;
  const double var = (sum_sq - seeds * mean * mean) / (seeds - 1);
  EXPECT_LE(std::abs(mean - expected), 3.0 * std::sqrt(var / seeds));
}

TEST(Coverage, ExponentialFamilyMeetsLevel) {
  const auto res =
      coverage_experiment(ExponentialRate{0.5, -0.005}, 2000, 300, MethodParams{}, 5);
  EXPECT_EQ(res.trials, 300);
  EXPECT_GE(res.coverage(), 0.90);
}

TEST(Coverage, ZeroRateIsAlwaysCovered) {
  const auto res = coverage_experiment(UniformRate{0.0}, 500, 50, MethodParams{}, 1);
  EXPECT_DOUBLE_EQ(res.coverage(), 1.0);
  EXPECT_EQ(res.fit_failures, 0);
}

TEST(Coverage, StepFamilyIsReportedAndDeterministic) {
  const auto a = coverage_experiment(StepRate{0.3, 400}, 2000, 50, MethodParams{}, 2);
  const auto b = coverage_experiment(StepRate{0.3, 400}, 2000, 50, MethodParams{}, 2);
  EXPECT_EQ(a.covered, b.covered);
  EXPECT_EQ(a.fit_failures, b.fit_failures);
  EXPECT_GE(a.coverage(), 0.0);
  EXPECT_LE(a.coverage(), 1.0);
}

TEST(Coverage, ZeroTrialsThrows) {
  EXPECT_THROW(coverage_experiment(UniformRate{0.1}, 10, 0, MethodParams{}), DomainError);
}
