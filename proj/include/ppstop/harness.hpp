#pragma once

// Evaluation harness: named method configurations, parallel evaluation of
// methods over runs, key/value parameter configs, and simulation summaries.

#include <algorithm>
#include <atomic>
#include <exception>
#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ppstop/core.hpp"
#include "ppstop/ingest.hpp"
#include "ppstop/methods.hpp"
#include "ppstop/metrics.hpp"
#include "ppstop/random.hpp"
#include "ppstop/simulate.hpp"

namespace ppstop {

/// Bad command-line or configuration input.
class UsageError : public Error {
 public:
  using Error::Error;
};

enum class MethodKind { Poisson, Target, Knee, Oracle };

struct MethodSpec {
  std::string name;
  MethodKind kind = MethodKind::Poisson;
  MethodParams params;
};

inline constexpr std::int64_t kKneeDefaultEpsilon = 150;
inline constexpr std::int64_t kKneeTunedEpsilon = 50;

/// Parses a comma-separated method list. Recognised names:
/// pp, tm, km (epsilon from params), km-default (150), km-tuned (50), or.
inline std::vector<MethodSpec> parse_methods(const std::string& list,
                                             const MethodParams& params) {
  std::vector<MethodSpec> out;
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    name.erase(0, name.find_first_not_of(" \t"));
    name.erase(name.find_last_not_of(" \t") + 1);
    if (name.empty()) continue;
    MethodSpec spec{name, MethodKind::Poisson, params};
    if (name == "pp") {
      spec.kind = MethodKind::Poisson;
    } else if (name == "tm") {
      spec.kind = MethodKind::Target;
    } else if (name == "km") {
      spec.kind = MethodKind::Knee;
    } else if (name == "km-default") {
      spec.kind = MethodKind::Knee;
      spec.params.epsilon = kKneeDefaultEpsilon;
    } else if (name == "km-tuned") {
      spec.kind = MethodKind::Knee;
      spec.params.epsilon = kKneeTunedEpsilon;
    } else if (name == "or") {
      spec.kind = MethodKind::Oracle;
    } else {
      throw UsageError("unknown method '" + name + "'");
    }
    if (std::any_of(out.begin(), out.end(),
                    [&](const MethodSpec& m) { return m.name == name; }))
      throw UsageError("method '" + name + "' listed twice");
    out.push_back(std::move(spec));
  }
  if (out.empty()) throw UsageError("no methods selected");
  return out;
}

inline std::uint64_t topic_seed(std::uint64_t seed, const std::string& run_tag,
                                const std::string& topic_id) {
  return derive_seed(seed, run_tag + "/" + topic_id);
}

inline StopOutcome run_method(const MethodSpec& spec, const Topic& topic,
                              std::uint64_t seed) {
  switch (spec.kind) {
    case MethodKind::Poisson: return poisson_stop(topic, spec.params);
    case MethodKind::Target: return target_stop(topic, spec.params, seed);
    case MethodKind::Knee: return knee_stop(topic, spec.params);
    case MethodKind::Oracle: return oracle_stop(topic, spec.params);
  }
  throw UsageError("unhandled method kind");
}

inline MethodReport evaluate_run(const MethodSpec& spec, const Run& run,
                                 std::uint64_t seed) {
  std::vector<TopicResult> results;
  results.reserve(run.topics.size());
  for (const auto& topic : run.topics) {
    if (topic.total_relevant() == 0)
      throw ValidationError("run '" + run.run_tag + "' topic '" + topic.id() +
                            "' has no relevant documents");
    const auto outcome =
        run_method(spec, topic, topic_seed(seed, run.run_tag, topic.id()));
    results.push_back(
        evaluate_outcome(outcome, topic, spec.params.target_recall));
  }
  std::sort(results.begin(), results.end(),
            [](const TopicResult& a, const TopicResult& b) {
              return a.topic_id < b.topic_id;
            });
  return MethodReport::build(spec.name, run.run_tag, std::move(results));
}

/// Runs `fn(i)` for i in [0, count) on up to `threads` workers.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Reports for every (method, run) pair, ordered by method list position
/// then run_tag. The order is independent of thread scheduling.
inline std::vector<MethodReport> evaluate(const std::vector<Run>& runs,
                                          const std::vector<MethodSpec>& methods,
                                          std::uint64_t seed,
                                          unsigned threads = 0) {
  if (runs.empty()) throw UsageError("no runs to evaluate");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<const Run*> sorted;
  for (const auto& r : runs) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const Run* a, const Run* b) { return a->run_tag < b->run_tag; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i]->run_tag == sorted[i - 1]->run_tag)
      throw ValidationError("duplicate run tag '" + sorted[i]->run_tag + "'");

  std::vector<MethodReport> reports(methods.size() * sorted.size());
  parallel_for(reports.size(), threads, [&](std::size_t i) {
    const auto& method = methods[i / sorted.size()];
    const auto& run = *sorted[i % sorted.size()];
    reports[i] = evaluate_run(method, run, seed);
  });
  return reports;
}

/// Reports of one method, restricted to the given run tags when non-empty.
inline std::vector<MethodReport> select_reports(
    const std::vector<MethodReport>& reports, const std::string& method,
    const std::vector<std::string>& run_tags = {}) {
  std::vector<MethodReport> out;
  for (const auto& r : reports) {
    if (r.method_name != method) continue;
    if (!run_tags.empty() &&
        std::find(run_tags.begin(), run_tags.end(), r.run_tag) == run_tags.end())
      continue;
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

/// Reads `key = value` lines; '#' starts a comment.
inline std::map<std::string, std::string> parse_config(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(lineno, "expected key = value");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ParseError(lineno, "expected key = value");
    out[key] = value;
  }
  return out;
}

/// Applies recognised parameter keys; unknown keys are a usage error unless
/// listed in `passthrough`.
inline void apply_config(const std::map<std::string, std::string>& config,
                         MethodParams& params,
                         const std::vector<std::string>& passthrough = {}) {
  const auto as_double = [](const std::string& k, const std::string& v) {
    double out = 0;
    if (!detail::parse_number(v, out))
      throw UsageError("config '" + k + "': not a number: " + v);
    return out;
  };
  const auto as_int = [](const std::string& k, const std::string& v) {
    std::int64_t out = 0;
    if (!detail::parse_number(v, out))
      throw UsageError("config '" + k + "': not an integer: " + v);
    return out;
  };
  for (const auto& [k, v] : config) {
    if (k == "recall") params.target_recall = as_double(k, v);
    else if (k == "confidence") params.confidence = as_double(k, v);
    else if (k == "alpha") params.alpha_frac = as_double(k, v);
    else if (k == "beta") params.beta_frac = as_double(k, v);
    else if (k == "gamma") params.gamma = as_int(k, v);
    else if (k == "delta") params.delta = as_double(k, v);
    else if (k == "epsilon") params.epsilon = as_int(k, v);
    else if (k == "target-count") params.target_count = as_int(k, v);
    else if (std::find(passthrough.begin(), passthrough.end(), k) ==
             passthrough.end())
      throw UsageError("unknown config key '" + k + "'");
  }
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

struct SimulatedMethod {
  std::string method_name;
  std::int64_t topics = 0;   // trial topics with at least one relevant doc
  double reliability = 0.0;
  double mean_effort = 0.0;
  double mean_pct_saved = 0.0;
  double predicted_fraction = 0.0;
};

struct SimulationSummary {
  std::string family;
  std::int64_t n = 0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  double expected_relevant = 0.0;
  double mean_relevant = 0.0;
  CoverageResult coverage;
  std::int64_t skipped_empty = 0;
  std::vector<SimulatedMethod> methods;
};

/// Coverage of the credible bound plus the reliability and effort of each
/// method over `trials` generated topics.
inline SimulationSummary simulate(const RateFamily& family, std::int64_t n,
                                  std::int64_t trials,
                                  const std::vector<MethodSpec>& methods,
                                  const MethodParams& params,
                                  std::uint64_t seed) {
  if (trials < 1) throw UsageError("trials must be >= 1");
  if (n < 1) throw UsageError("n must be >= 1");
  SimulationSummary s;
  s.family = family_name(family);
  s.n = n;
  s.trials = trials;
  s.seed = seed;
  s.expected_relevant = expected_relevant(family, n);
  s.coverage = coverage_experiment(family, n, trials, params, seed);

  std::vector<Topic> topics;
  topics.reserve(static_cast<std::size_t>(trials));
  double rel_sum = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    auto topic = gen_topic(n, family, derive_seed(seed, "trial-" + std::to_string(t)),
                           "T" + std::to_string(t));
    rel_sum += static_cast<double>(topic.total_relevant());
    if (topic.total_relevant() == 0) {
      ++s.skipped_empty;
      continue;
    }
    topics.push_back(std::move(topic));
  }
  s.mean_relevant = rel_sum / static_cast<double>(trials);

  for (const auto& spec : methods) {
    SimulatedMethod m;
    m.method_name = spec.name;
    m.topics = static_cast<std::int64_t>(topics.size());
    std::vector<TopicResult> results;
    std::int64_t predicted = 0;
    for (const auto& topic : topics) {
      const auto outcome =
          run_method(spec, topic, topic_seed(seed, "sim", topic.id()));
      predicted += outcome.predicted ? 1 : 0;
      results.push_back(evaluate_outcome(outcome, topic, spec.params.target_recall));
      m.mean_effort += static_cast<double>(outcome.effort());
    }
    if (!results.empty()) {
      m.reliability = reliability(results);
      m.mean_pct_saved = pct_effort_saved(results);
      m.mean_effort /= static_cast<double>(results.size());
      m.predicted_fraction =
          static_cast<double>(predicted) / static_cast<double>(results.size());
    }
    s.methods.push_back(std::move(m));
  }
  return s;
}

}  // namespace ppstop
