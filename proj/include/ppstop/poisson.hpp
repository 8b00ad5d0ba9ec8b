#pragma once

// Inhomogeneous Poisson process machinery for an exponential rate
// lambda(x) = d * exp(k x): the rate, its integral over (0, n], the Poisson
// pmf, and the credible upper bound on the number of events.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "ppstop/core.hpp"

namespace ppstop {

/// Exponent magnitude above which exp() is treated as overflow.
inline constexpr double kMaxExponent = 700.0;
/// |k| below which the integral uses its k -> 0 limit d*n.
inline constexpr double kFlatRateThreshold = 1e-9;

/// Fitted rate function lambda(x) = d * exp(k x), d > 0.
struct RateModel {
  double d = 1.0;
  double k = 0.0;

  RateModel() = default;
  RateModel(double amplitude, double exponent) : d(amplitude), k(exponent) {
    if (!(d > 0.0) || !std::isfinite(d) || !std::isfinite(k))
      throw DomainError("rate model requires finite d > 0 and finite k");
  }

  friend bool operator==(const RateModel&, const RateModel&) = default;
};

inline double lambda_at(const RateModel& model, double x) {
  if (!std::isfinite(x)) throw DomainError("lambda_at: x must be finite");
  const double e = model.k * x;
  if (e > kMaxExponent)
    throw ComputationError("lambda_at overflows at x=" + detail::to_str(x));
  return model.d * std::exp(e);
}

/// Lambda(0, n) = (d/k)(e^{kn} - 1), or d*n when |k| is negligible.
inline double lambda_integral(const RateModel& model, double n) {
  if (!(n >= 0.0) || !std::isfinite(n))
    throw DomainError("lambda_integral: n must be finite and >= 0");
  if (n == 0.0) return 0.0;
  if (std::abs(model.k) < kFlatRateThreshold) return model.d * n;
  const double e = model.k * n;
  if (e > kMaxExponent)
    throw ComputationError("lambda_integral overflows: k*n=" +
                           detail::to_str(e));
  return model.d / model.k * std::expm1(e);
}

/// Lambda(a, b) over (a, b]; the general two-endpoint form.
inline double lambda_integral(const RateModel& model, double a, double b) {
  if (!(a >= 0.0) || !(b >= a))
    throw DomainError("lambda_integral: require 0 <= a <= b");
  if (std::abs(model.k) < kFlatRateThreshold) return model.d * (b - a);
  if (model.k * b > kMaxExponent)
    throw ComputationError("lambda_integral overflows: k*b=" +
                           detail::to_str(model.k * b));
  // (d/k) e^{ka} (e^{k(b-a)} - 1)
  return model.d / model.k * std::exp(model.k * a) * std::expm1(model.k * (b - a));
}

inline double log_poisson_pmf(double mean, std::int64_t r) {
  if (!(mean >= 0.0) || r < 0)
    throw DomainError("poisson_pmf: requires mean >= 0 and r >= 0");
  if (mean == 0.0) return r == 0 ? 0.0 : -INFINITY;
  const double rd = static_cast<double>(r);
  return rd * std::log(mean) - mean - boost::math::lgamma(rd + 1.0);
}

inline double poisson_pmf(double mean, std::int64_t r) {
  return std::exp(log_poisson_pmf(mean, r));
}

/// Smallest R with P(N <= R) >= confidence for N ~ Poisson(mean).
///
/// The accumulation starts far enough below the mean that the skipped mass
/// is under e^{-800}; for mean < ~1700 it starts at 0.
inline std::int64_t upper_credible_count(double mean, double confidence) {
  if (!(mean >= 0.0)) throw DomainError("upper_credible_count: mean < 0");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw DomainError("upper_credible_count: confidence outside (0, 1)");
  if (mean == 0.0) return 0;
  if (!std::isfinite(mean) || mean > 1e10)
    throw ComputationError("upper_credible_count: mean " +
                           detail::to_str(mean) + " is not tractable");

  const double sd = std::sqrt(mean);
  std::int64_t r = std::max<std::int64_t>(
      0, static_cast<std::int64_t>(std::floor(mean - 40.0 * sd - 40.0)));
  const double log_mean = std::log(mean);
  double log_term = log_poisson_pmf(mean, r);
  double cdf = std::exp(log_term);
  while (cdf < confidence) {
    ++r;
    log_term += log_mean - std::log(static_cast<double>(r));
    cdf += std::exp(log_term);
  }
  return r;
}

/// ceil(R * T): relevant documents to find before stopping, where R is the
/// credible upper bound on the total for a ranking of n documents.
inline std::int64_t required_relevant(const RateModel& model, std::int64_t n,
                                      const MethodParams& params) {
  if (n < 1) throw DomainError("required_relevant: n must be >= 1");
  const double mean = lambda_integral(model, static_cast<double>(n));
  const auto upper = upper_credible_count(mean, params.confidence);
  // Guard against R*T landing a hair above an integer (e.g. 10 * 0.7).
  const double scaled = static_cast<double>(upper) * params.target_recall;
  return static_cast<std::int64_t>(std::ceil(scaled - 1e-9));
}

}  // namespace ppstop
