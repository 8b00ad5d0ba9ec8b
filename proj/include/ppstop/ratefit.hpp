#pragma once

// Rate estimation from an examined ranking prefix: split the prefix into
// sub-intervals, fit d*exp(k x) to the per-rank relevant density of each
// sub-interval, and test the fit against the observed relevant count.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "ppstop/core.hpp"
#include "ppstop/poisson.hpp"

namespace ppstop {

/// The fit could not produce a usable rate model. Callers in the stopping
/// loop treat this the same as a rejected fit.
class FitError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

class InsufficientDataError : public FitError {
 public:
  using FitError::FitError;
};

/// Every sub-interval holds zero relevant documents.
class NoSignalError : public FitError {
 public:
  using FitError::FitError;
};

class NonConvergenceError : public FitError {
 public:
  using FitError::FitError;
};

struct BinPoint {
  double x = 0.0;      // midpoint rank of the sub-interval
  double count = 0.0;  // relevant documents in the sub-interval
  double width = 1.0;  // ranks covered by the sub-interval

  double density() const noexcept { return count / width; }
};

struct BinnedCounts {
  std::vector<BinPoint> points;
  double interval_width = 1.0;
};

/// Partitions ranks 1..examined_end into ceil(examined_end / width)
/// contiguous sub-intervals; the last one may be short.
inline BinnedCounts bin_prefix(const Topic& topic, std::int64_t examined_end,
                               double interval_width) {
  if (examined_end < 1 || examined_end > topic.size())
    throw DomainError("bin_prefix: examined_end outside 1..n");
  if (!(interval_width >= 1.0) || !std::isfinite(interval_width))
    throw DomainError("bin_prefix: interval_width must be >= 1");
  if (static_cast<double>(examined_end) < interval_width && examined_end < 2)
    throw InsufficientDataError("bin_prefix: prefix too short to bin");

  BinnedCounts out;
  out.interval_width = interval_width;
  const auto m = static_cast<std::int64_t>(
      std::ceil(static_cast<double>(examined_end) / interval_width));
  out.points.reserve(static_cast<std::size_t>(m));
  std::int64_t lo = 1;
  for (std::int64_t i = 1; i <= m && lo <= examined_end; ++i) {
    auto hi = static_cast<std::int64_t>(
        std::floor(static_cast<double>(i) * interval_width));
    hi = std::min(std::max(hi, lo), examined_end);
    if (i == m) hi = examined_end;
    BinPoint p;
    p.x = 0.5 * static_cast<double>(lo + hi);
    p.count = static_cast<double>(topic.rel_at(hi) - topic.rel_at(lo - 1));
    p.width = static_cast<double>(hi - lo + 1);
    out.points.push_back(p);
    lo = hi + 1;
  }
  return out;
}

/// Sum of squared residuals between observed densities and the model.
inline double fit_residual(const RateModel& model, const BinnedCounts& binned) {
  double s = 0.0;
  for (const auto& p : binned.points) {
    const double e = model.k * p.x;
    const double f = e > kMaxExponent ? std::numeric_limits<double>::infinity()
                                      : model.d * std::exp(e);
    const double r = p.density() - f;
    s += r * r;
  }
  return s;
}

struct FitOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-8;
};

namespace detail {

// Log-linear least squares on ln(max(density, 0.5/width)); returns (u, kappa)
// in the scaled coordinate t = x / scale.
inline std::array<double, 2> loglinear_start(const BinnedCounts& binned,
                                             double scale) {
  double st = 0, sv = 0, stt = 0, stv = 0;
  const double m = static_cast<double>(binned.points.size());
  for (const auto& p : binned.points) {
    const double t = p.x / scale;
    const double v = std::log(std::max(p.density(), 0.5 / p.width));
    st += t;
    sv += v;
    stt += t * t;
    stv += t * v;
  }
  const double denom = m * stt - st * st;
  const double kappa = denom > 0 ? (m * stv - st * sv) / denom : 0.0;
  return {(sv - kappa * st) / m, kappa};
}

}  // namespace detail

/// Least-squares fit of d*exp(k x) to the sub-interval densities
/// count_i / width_i, so that lambda is a per-rank intensity.
///
/// Levenberg-Marquardt on (ln d, k * scale) with scale = max x, started from
/// a log-linear regression. Only steps that reduce the residual are taken.
/// Converges when |J^T r| <= tol * |J|_F * |y|, or when the damped step can
/// no longer reduce the residual and the relative gradient is below
/// sqrt(tol) (the optimum is resolved to machine precision).
inline RateModel fit_exponential(const BinnedCounts& binned,
                                 const FitOptions& options = {}) {
  const auto& pts = binned.points;
  if (pts.size() < 2)
    throw InsufficientDataError("fit_exponential: need at least 2 points");
  if (std::none_of(pts.begin(), pts.end(),
                   [](const BinPoint& p) { return p.count > 0.0; }))
    throw NoSignalError("fit_exponential: no relevant documents in sample");

  double scale = 0.0;
  double ynorm = 0.0;
  for (const auto& p : pts) {
    scale = std::max(scale, std::abs(p.x));
    ynorm += p.density() * p.density();
  }
  ynorm = std::sqrt(ynorm);
  if (scale == 0.0) scale = 1.0;

  const auto eval = [&](double u, double kappa) {
    double s = 0.0;
    for (const auto& p : pts) {
      const double e = u + kappa * p.x / scale;
      if (e > kMaxExponent) return std::numeric_limits<double>::infinity();
      const double r = p.density() - std::exp(e);
      s += r * r;
    }
    return s;
  };

  const auto start = detail::loglinear_start(binned, scale);
  double u = start[0];
  double kappa = start[1];
  double cost = eval(u, kappa);
  if (!std::isfinite(cost))
    throw NonConvergenceError("fit_exponential: non-finite starting point");

  const auto finish = [&] {
    RateModel out;
    out.d = std::exp(u);
    out.k = kappa / scale;
    if (!(out.d > 0.0) || !std::isfinite(out.d))
      throw NonConvergenceError("fit_exponential: degenerate amplitude");
    return out;
  };

  double mu = 1e-3;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    // Normal equations for the 2-parameter problem.
    double a00 = 0, a01 = 0, a11 = 0, g0 = 0, g1 = 0;
    for (const auto& p : pts) {
      const double t = p.x / scale;
      const double f = std::exp(u + kappa * t);
      const double r = p.density() - f;
      a00 += f * f;
      a01 += f * f * t;
      a11 += f * f * t * t;
      g0 += f * r;
      g1 += f * t * r;
    }
    const double grad = std::hypot(g0, g1);
    const double jnorm = std::sqrt(a00 + a11);
    const double rel_grad = grad / (jnorm * ynorm + 1e-300);
    if (rel_grad <= options.gradient_tolerance) return finish();

    bool improved = false;
    while (mu < 1e20) {
      const double b00 = a00 * (1.0 + mu), b11 = a11 * (1.0 + mu);
      const double det = b00 * b11 - a01 * a01;
      if (!(det > 0.0)) {
        mu *= 10.0;
        continue;
      }
      const double du = (b11 * g0 - a01 * g1) / det;
      const double dk = (b00 * g1 - a01 * g0) / det;
      const double trial = eval(u + du, kappa + dk);
      if (trial < cost) {
        u += du;
        kappa += dk;
        cost = trial;
        mu = std::max(mu / 10.0, 1e-12);
        improved = true;
        break;
      }
      mu *= 10.0;
    }
    if (!improved) {
      // Stalled at machine precision.
      if (rel_grad <= std::sqrt(options.gradient_tolerance)) return finish();
      throw NonConvergenceError("fit_exponential: optimizer stalled");
    }
  }
  throw NonConvergenceError("fit_exponential: iteration cap reached");
}

/// Sum over ranks 1..examined_end of lambda(i); +inf when the model
/// overflows inside the range.
inline double predicted_relevant(const RateModel& model,
                                 std::int64_t examined_end) {
  double sum = 0.0;
  for (std::int64_t i = 1; i <= examined_end; ++i) {
    const double e = model.k * static_cast<double>(i);
    if (e > kMaxExponent) return std::numeric_limits<double>::infinity();
    sum += model.d * std::exp(e);
  }
  return sum;
}

/// Accepts the fit unless rel(examined_end) < delta * sum_{i<=end} lambda(i).
inline bool delta_gate(const RateModel& model, const Topic& topic,
                       std::int64_t examined_end, double delta) {
  if (examined_end < 1) throw DomainError("delta_gate: examined_end < 1");
  const double predicted = predicted_relevant(model, examined_end);
  return static_cast<double>(topic.rel_at(examined_end)) >= delta * predicted;
}

}  // namespace ppstop
