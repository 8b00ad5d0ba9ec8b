#pragma once

// Stopping methods over a single ranked topic:
//   poisson_stop  inhomogeneous Poisson process estimate of the relevant total
//   target_stop   random sampling until a target number of relevant docs
//   knee_stop     knee detection on the gain curve with a slope-ratio test
//   oracle_stop   hindsight minimum rank reaching the target recall

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ppstop/core.hpp"
#include "ppstop/poisson.hpp"
#include "ppstop/random.hpp"
#include "ppstop/ratefit.hpp"

namespace ppstop {

/// True iff found / total reaches the target recall. Shared by the oracle
/// and the acceptability metric so both use the same comparison.
inline bool meets_recall(std::int64_t found, std::int64_t total,
                         double target_recall) {
  return static_cast<double>(found) / static_cast<double>(total) >=
         target_recall;
}

/// ceil(frac * n) clamped to [1, n].
inline std::int64_t fraction_of(double frac, std::int64_t n) {
  const auto v =
      static_cast<std::int64_t>(std::ceil(frac * static_cast<double>(n) - 1e-9));
  return std::clamp<std::int64_t>(v, 1, n);
}

/// Initial sample size and batch size for a topic of n documents.
struct BatchSchedule {
  std::int64_t initial = 1;
  std::int64_t batch = 1;

  static BatchSchedule for_topic(std::int64_t n, const MethodParams& params) {
    return {fraction_of(params.alpha_frac, n), fraction_of(params.beta_frac, n)};
  }
};

inline StopOutcome full_review(const Topic& topic) {
  return {topic.id(), topic.size(), 0, topic.total_relevant(), false};
}

inline StopOutcome prefix_stop(const Topic& topic, std::int64_t rank) {
  return {topic.id(), rank, 0, topic.rel_at(rank), true};
}

// ---------------------------------------------------------------------------
// Poisson process
// ---------------------------------------------------------------------------

/// One pass of bin / fit / gate at a batch boundary.
struct PoissonBatch {
  std::int64_t examined_end = 0;
  std::optional<RateModel> model;  // empty when the fit failed
  bool accepted = false;
  std::optional<std::int64_t> required;  // ceil(R*T) for an accepted model
};

struct PoissonTrace {
  StopOutcome outcome;
  bool gamma_rejected = false;
  std::vector<PoissonBatch> batches;

  /// Most recent model that passed the delta gate.
  std::optional<RateModel> accepted_model() const {
    for (auto it = batches.rbegin(); it != batches.rend(); ++it)
      if (it->accepted) return it->model;
    return std::nullopt;
  }
};

/// Full Poisson-process stopping loop with per-batch diagnostics.
///
/// The target count q from an accepted fit is held fixed while scanning
/// forward to the next batch boundary; at the boundary the prefix is
/// re-binned and re-fitted. Fit failures and delta-gate rejections extend
/// the sample by one batch. Reaching n without meeting q is a full review.
inline PoissonTrace poisson_trace(const Topic& topic,
                                  const MethodParams& params) {
  const std::int64_t n = topic.size();
  const auto sched = BatchSchedule::for_topic(n, params);
  PoissonTrace trace;

  std::int64_t end = sched.initial;
  if (topic.rel_at(end) < params.gamma) {
    trace.gamma_rejected = true;
    trace.outcome = full_review(topic);
    return trace;
  }

  const auto width = static_cast<double>(sched.batch);
  for (;;) {
    PoissonBatch batch;
    batch.examined_end = end;
    try {
      batch.model = fit_exponential(bin_prefix(topic, end, width));
      if (delta_gate(*batch.model, topic, end, params.delta)) {
        batch.required = required_relevant(*batch.model, n, params);
        batch.accepted = true;
      }
    } catch (const ComputationError&) {
      // Failed or degenerate fit: treated as a rejection.
      batch.accepted = false;
      batch.required.reset();
    }
    trace.batches.push_back(batch);

    const std::int64_t next = std::min(end + sched.batch, n);
    if (batch.accepted) {
      const std::int64_t q = *batch.required;
      for (std::int64_t r = end; r <= next; ++r) {
        if (topic.rel_at(r) >= q) {
          trace.outcome = prefix_stop(topic, r);
          return trace;
        }
      }
    }
    if (end == n) break;
    end = next;
  }
  trace.outcome = full_review(topic);
  return trace;
}

inline StopOutcome poisson_stop(const Topic& topic,
                                const MethodParams& params) {
  return poisson_trace(topic, params).outcome;
}

// ---------------------------------------------------------------------------
// Target method
// ---------------------------------------------------------------------------

/// Samples ranks uniformly without replacement until target_count relevant
/// documents are found, then reviews the ranking down to the deepest of
/// them. Samples below that rank count as extra examined documents.
inline StopOutcome target_stop(const Topic& topic, const MethodParams& params,
                               std::uint64_t seed) {
  const std::int64_t n = topic.size();
  if (topic.total_relevant() < params.target_count) return full_review(topic);

  Rng rng(seed);
  std::vector<std::int64_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), std::int64_t{1});

  std::int64_t found = 0;
  std::int64_t deepest = 0;
  std::size_t drawn = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(order.size() - i));
    std::swap(order[i], order[j]);
    ++drawn;
    if (topic.relevant_at(order[i])) {
      deepest = std::max(deepest, order[i]);
      if (++found == params.target_count) break;
    }
  }

  StopOutcome out = prefix_stop(topic, deepest);
  out.extra_examined = std::count_if(
      order.begin(), order.begin() + static_cast<std::ptrdiff_t>(drawn),
      [deepest](std::int64_t r) { return r > deepest; });
  return out;
}

// ---------------------------------------------------------------------------
// Knee method
// ---------------------------------------------------------------------------

/// Cumulative relevant documents at each rank 1..examined_end.
struct GainCurve {
  std::vector<std::pair<std::int64_t, std::int64_t>> points;  // (rank, relret)

  static GainCurve of(const Topic& topic, std::int64_t examined_end) {
    GainCurve g;
    g.points.reserve(static_cast<std::size_t>(examined_end));
    for (std::int64_t r = 1; r <= examined_end; ++r)
      g.points.emplace_back(r, topic.rel_at(r));
    return g;
  }
};

/// Kneedle-style candidate: with the gain curve over 1..examined_end scaled
/// to the unit square, the first rank maximising y_norm - x_norm. Empty when
/// the curve is flat or the maximum sits at examined_end.
inline std::optional<std::int64_t> find_knee(const Topic& topic,
                                             std::int64_t examined_end) {
  const std::int64_t total = topic.rel_at(examined_end);
  if (total == 0) return std::nullopt;
  const double xs = static_cast<double>(examined_end);
  const double ys = static_cast<double>(total);
  std::int64_t best = 0;
  double best_diff = -INFINITY;
  for (std::int64_t r = 1; r <= examined_end; ++r) {
    const double diff = static_cast<double>(topic.rel_at(r)) / ys -
                        static_cast<double>(r) / xs;
    if (diff > best_diff) {
      best_diff = diff;
      best = r;
    }
  }
  if (best >= examined_end) return std::nullopt;
  return best;
}

/// Ratio of the gain-curve slope before the knee to the slope after it,
/// with +1 smoothing on the relevant count after the knee.
inline double slope_ratio(const Topic& topic, std::int64_t knee,
                          std::int64_t examined_end) {
  const double before = static_cast<double>(topic.rel_at(knee)) /
                        static_cast<double>(knee);
  const double after =
      static_cast<double>(topic.rel_at(examined_end) - topic.rel_at(knee) + 1) /
      static_cast<double>(examined_end - knee);
  return before / after;
}

/// epsilon + 6 - min(relret, epsilon)
inline std::int64_t knee_threshold(std::int64_t relret, std::int64_t epsilon) {
  return epsilon + 6 - std::min(relret, epsilon);
}

/// Knee test after each batch of the same initial/batch schedule as
/// poisson_stop; stops at the first batch boundary whose slope ratio reaches
/// the threshold.
inline StopOutcome knee_stop(const Topic& topic, const MethodParams& params) {
  const std::int64_t n = topic.size();
  const auto sched = BatchSchedule::for_topic(n, params);
  for (std::int64_t end = sched.initial;;
       end = std::min(end + sched.batch, n)) {
    if (const auto knee = find_knee(topic, end)) {
      const double ratio = slope_ratio(topic, *knee, end);
      const auto threshold = knee_threshold(topic.rel_at(end), params.epsilon);
      if (ratio >= static_cast<double>(threshold))
        return prefix_stop(topic, end);
    }
    if (end == n) break;
  }
  return full_review(topic);
}

// ---------------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------------

/// Smallest rank whose prefix reaches the target recall.
inline StopOutcome oracle_stop(const Topic& topic, const MethodParams& params) {
  const std::int64_t total = topic.total_relevant();
  if (total == 0)
    throw DomainError("oracle undefined for topic '" + topic.id() +
                      "' with no relevant documents");
  // Binary search: rel_at is nondecreasing.
  std::int64_t lo = 1, hi = topic.size();
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (meets_recall(topic.rel_at(mid), total, params.target_recall))
      hi = mid;
    else
      lo = mid + 1;
  }
  return prefix_stop(topic, lo);
}

}  // namespace ppstop
