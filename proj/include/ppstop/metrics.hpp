#pragma once

// Evaluation of stopping outcomes: recall, acceptability, reliability,
// effort saved, and AURC-based stratification of runs.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ppstop/core.hpp"
#include "ppstop/methods.hpp"

namespace ppstop {

inline double recall_of(const StopOutcome& outcome, const Topic& topic) {
  if (topic.total_relevant() < 1)
    throw DomainError("recall undefined for topic '" + topic.id() +
                      "' with no relevant documents");
  return static_cast<double>(outcome.relevant_found) /
         static_cast<double>(topic.total_relevant());
}

inline bool acceptability(const StopOutcome& outcome, const Topic& topic,
                          double target_recall) {
  if (topic.total_relevant() < 1)
    throw DomainError("acceptability undefined for topic '" + topic.id() +
                      "' with no relevant documents");
  return meets_recall(outcome.relevant_found, topic.total_relevant(),
                      target_recall);
}

struct TopicResult {
  std::string topic_id;
  std::int64_t size = 0;
  std::int64_t effort = 0;
  double recall = 0.0;
  bool acceptable = false;
  bool predicted = false;
};

inline TopicResult evaluate_outcome(const StopOutcome& outcome,
                                    const Topic& topic, double target_recall) {
  return {topic.id(),
          topic.size(),
          outcome.effort(),
          recall_of(outcome, topic),
          acceptability(outcome, topic, target_recall),
          outcome.predicted};
}

/// Fraction of acceptable topics.
inline double reliability(std::span<const TopicResult> results) {
  if (results.empty()) throw DomainError("reliability of an empty set");
  const auto ok = std::count_if(results.begin(), results.end(),
                                [](const TopicResult& r) { return r.acceptable; });
  return static_cast<double>(ok) / static_cast<double>(results.size());
}

/// 100 * mean over topics of (|T| - |E_T|) / |T|, each term floored at 0.
inline double pct_effort_saved(std::span<const TopicResult> results) {
  if (results.empty()) throw DomainError("effort saved of an empty set");
  double sum = 0.0;
  for (const auto& r : results) {
    const double saved = static_cast<double>(r.size - r.effort) /
                         static_cast<double>(r.size);
    sum += std::max(0.0, saved);
  }
  return 100.0 * sum / static_cast<double>(results.size());
}

/// Aggregate of one method over one run.
struct MethodReport {
  std::string method_name;
  std::string run_tag;
  std::vector<TopicResult> per_topic;
  std::int64_t total_effort = 0;
  std::int64_t total_size = 0;
  double reliability = 0.0;
  double mean_pct_effort_saved = 0.0;

  static MethodReport build(std::string method_name, std::string run_tag,
                            std::vector<TopicResult> per_topic) {
    MethodReport r;
    r.method_name = std::move(method_name);
    r.run_tag = std::move(run_tag);
    r.per_topic = std::move(per_topic);
    for (const auto& t : r.per_topic) {
      r.total_effort += t.effort;
      r.total_size += t.size;
    }
    r.reliability = ppstop::reliability(r.per_topic);
    r.mean_pct_effort_saved = pct_effort_saved(r.per_topic);
    return r;
  }
};

/// Row of the summary table: one method over a group of runs.
struct GroupSummary {
  std::string method_name;
  std::size_t runs = 0;
  std::size_t topics = 0;
  double mean_effort = 0.0;         // per-run total effort, averaged over runs
  double mean_pct_saved = 0.0;      // per-run mean % saved, averaged over runs
  double reliability = 0.0;         // over all topics in all runs
};

inline GroupSummary summarize(std::span<const MethodReport> reports) {
  if (reports.empty()) throw DomainError("summary of an empty group");
  GroupSummary s;
  s.method_name = reports.front().method_name;
  s.runs = reports.size();
  std::size_t acceptable = 0;
  for (const auto& r : reports) {
    s.mean_effort += static_cast<double>(r.total_effort);
    s.mean_pct_saved += r.mean_pct_effort_saved;
    s.topics += r.per_topic.size();
    for (const auto& t : r.per_topic) acceptable += t.acceptable ? 1 : 0;
  }
  s.mean_effort /= static_cast<double>(s.runs);
  s.mean_pct_saved /= static_cast<double>(s.runs);
  s.reliability =
      s.topics ? static_cast<double>(acceptable) / static_cast<double>(s.topics)
               : 0.0;
  return s;
}

// ---------------------------------------------------------------------------
// AURC
// ---------------------------------------------------------------------------

/// Step-sum area under the cumulative recall curve, divided by the area of
/// the ranking that puts every relevant document first.
inline double aurc(const Topic& topic) {
  const std::int64_t total = topic.total_relevant();
  if (total < 1)
    throw DomainError("AURC undefined for topic '" + topic.id() +
                      "' with no relevant documents");
  // Work in relevant-count units; the 1/total factor cancels in the ratio.
  std::int64_t area = 0;
  std::int64_t optimal = 0;
  for (std::int64_t i = 1; i <= topic.size(); ++i) {
    area += topic.rel_at(i);
    optimal += std::min(i, total);
  }
  return static_cast<double>(area) / static_cast<double>(optimal);
}

/// Mean AURC over the topics of a run that have relevant documents.
inline double mean_aurc(const Run& run) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& t : run.topics) {
    if (t.total_relevant() < 1) continue;
    sum += aurc(t);
    ++count;
  }
  if (count == 0)
    throw DomainError("run '" + run.run_tag + "' has no judged topics");
  return sum / static_cast<double>(count);
}

struct RankedRun {
  std::string run_tag;
  double aurc = 0.0;
};

struct Stratification {
  std::vector<RankedRun> ranked;  // by AURC descending, then run_tag
  std::vector<RankedRun> top;
  std::vector<RankedRun> middle;
  std::vector<RankedRun> bottom;
};

/// Zero-based start of the middle group: centred on the median position,
/// i.e. (count - 1) / 2 - group / 2. For 33 runs this is positions 15-19.
inline std::size_t default_middle_start(std::size_t count, std::size_t group) {
  return (count - 1) / 2 - group / 2;
}

/// Ranks runs by mean AURC and returns the top, middle and bottom groups.
/// `middle_start` overrides the zero-based start of the middle group.
inline Stratification stratify_runs(std::span<const Run> runs,
                                    std::size_t group = 5,
                                    std::optional<std::size_t> middle_start = {}) {
  if (runs.size() < 3 * group)
    throw DomainError("stratification needs at least " +
                      std::to_string(3 * group) + " runs");
  Stratification s;
  s.ranked.reserve(runs.size());
  for (const auto& run : runs) s.ranked.push_back({run.run_tag, mean_aurc(run)});
  std::sort(s.ranked.begin(), s.ranked.end(),
            [](const RankedRun& a, const RankedRun& b) {
              if (a.aurc != b.aurc) return a.aurc > b.aurc;
              return a.run_tag < b.run_tag;
            });
  const std::size_t mid = middle_start.value_or(
      default_middle_start(s.ranked.size(), group));
  if (mid + group > s.ranked.size())
    throw DomainError("middle group runs past the end of the ranking");
  const auto at = [&](std::size_t from) {
    return std::vector<RankedRun>(s.ranked.begin() + static_cast<std::ptrdiff_t>(from),
                                  s.ranked.begin() + static_cast<std::ptrdiff_t>(from + group));
  };
  s.top = at(0);
  s.middle = at(mid);
  s.bottom = at(s.ranked.size() - group);
  return s;
}

}  // namespace ppstop
