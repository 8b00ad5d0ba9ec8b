#pragma once

// Synthetic topics drawn from parameterised per-rank relevance rates, and a
// Monte-Carlo check of the credible upper bound.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "ppstop/core.hpp"
#include "ppstop/methods.hpp"
#include "ppstop/poisson.hpp"
#include "ppstop/random.hpp"
#include "ppstop/ratefit.hpp"

namespace ppstop {

struct ExponentialRate {
  double d = 0.5;
  double k = -0.005;
};
struct UniformRate {
  double p = 0.1;
};
/// p up to and including `cutoff`, zero after.
struct StepRate {
  double p = 0.1;
  std::int64_t cutoff = 0;
};
/// p1 up to and including `cutoff`, p2 after.
struct BimodalRate {
  double p1 = 0.1;
  double p2 = 0.01;
  std::int64_t cutoff = 0;
};

using RateFamily = std::variant<ExponentialRate, UniformRate, StepRate, BimodalRate>;

inline void validate_family(const RateFamily& family) {
  const auto prob = [](double p) { return std::isfinite(p) && p >= 0.0; };
  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        bool ok = true;
        if constexpr (std::is_same_v<F, ExponentialRate>)
          ok = prob(f.d) && std::isfinite(f.k);
        else if constexpr (std::is_same_v<F, UniformRate>)
          ok = prob(f.p);
        else if constexpr (std::is_same_v<F, StepRate>)
          ok = prob(f.p) && f.cutoff >= 0;
        else
          ok = prob(f.p1) && prob(f.p2) && f.cutoff >= 0;
        if (!ok) throw DomainError("invalid rate family parameters");
      },
      family);
}

/// Per-rank relevance probability at 1-based rank i, clipped to [0, 1].
inline double rate_at(const RateFamily& family, std::int64_t i) {
  const double x = static_cast<double>(i);
  const double raw = std::visit(
      [&](const auto& f) -> double {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, ExponentialRate>)
          return f.d * std::exp(std::min(f.k * x, kMaxExponent));
        else if constexpr (std::is_same_v<F, UniformRate>)
          return f.p;
        else if constexpr (std::is_same_v<F, StepRate>)
          return i <= f.cutoff ? f.p : 0.0;
        else
          return i <= f.cutoff ? f.p1 : f.p2;
      },
      family);
  return std::clamp(raw, 0.0, 1.0);
}

/// Expected relevant count of a generated topic: sum of clipped rates.
inline double expected_relevant(const RateFamily& family, std::int64_t n) {
  double s = 0.0;
  for (std::int64_t i = 1; i <= n; ++i) s += rate_at(family, i);
  return s;
}

inline std::string family_name(const RateFamily& family) {
  static const char* names[] = {"exponential", "uniform", "step", "bimodal"};
  return names[family.index()];
}

/// Rank i is relevant independently with probability rate_at(family, i).
/// Document ids are "<topic_id>-<rank>".
inline Topic gen_topic(std::int64_t n, const RateFamily& family,
                       std::uint64_t seed, const std::string& topic_id = "sim") {
  if (n < 1) throw DomainError("gen_topic: n must be >= 1");
  validate_family(family);
  Rng rng(seed);
  std::vector<RankedDoc> docs;
  docs.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 1; i <= n; ++i)
    docs.push_back({topic_id + "-" + std::to_string(i),
                    rng.bernoulli(rate_at(family, i))});
  return Topic(topic_id, std::move(docs));
}

struct CoverageResult {
  std::int64_t trials = 0;
  std::int64_t covered = 0;
  std::int64_t fit_failures = 0;  // counted as not covered

  double coverage() const {
    return trials ? static_cast<double>(covered) / static_cast<double>(trials)
                  : 0.0;
  }
};

/// For each trial: generate a topic, fit the rate model to the whole topic
/// (binned with the batch width), and test whether the true relevant total
/// is within the credible upper bound. Topics with no relevant documents are
/// covered by definition (the bound is >= 0).
inline CoverageResult coverage_experiment(const RateFamily& family,
                                          std::int64_t n, std::int64_t trials,
                                          const MethodParams& params,
                                          std::uint64_t seed = 0) {
  if (trials < 1) throw DomainError("coverage_experiment: trials must be >= 1");
  CoverageResult res;
  res.trials = trials;
  const auto width =
      static_cast<double>(BatchSchedule::for_topic(n, params).batch);
  for (std::int64_t t = 0; t < trials; ++t) {
    const Topic topic =
        gen_topic(n, family, derive_seed(seed, "coverage-" + std::to_string(t)));
    if (topic.total_relevant() == 0) {
      ++res.covered;
      continue;
    }
    try {
      const auto model = fit_exponential(bin_prefix(topic, n, width));
      const auto bound = upper_credible_count(
          lambda_integral(model, static_cast<double>(n)), params.confidence);
      if (topic.total_relevant() <= bound) ++res.covered;
    } catch (const ComputationError&) {
      ++res.fit_failures;
    }
  }
  return res;
}

}  // namespace ppstop
