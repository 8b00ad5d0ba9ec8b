#pragma once

// Reading and writing TREC/CLEF-TAR run files and qrels, joining relevance
// labels onto rankings, and dataset sanity statistics.
//
// Run file:  <topic> <NF|Q0> <doc> <rank> <score> <run_tag>
// Qrels:     <topic> <unused> <doc> <label>     (label > 0 => relevant)

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ppstop/core.hpp"

namespace ppstop {

/// A run topic with no qrels entry.
class JoinError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Collects non-fatal warnings (rank repairs, unjudged documents).
struct Diagnostics {
  std::vector<std::string> warnings;
  void warn(std::string message) { warnings.push_back(std::move(message)); }
};

struct RunFileRecord {
  std::string topic_id;
  std::string flag;
  std::string doc_id;
  std::int64_t rank = 0;
  double score = 0.0;
  std::string run_tag;
};

struct QrelRecord {
  std::string topic_id;
  std::string unused;
  std::string doc_id;
  std::int64_t label = 0;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  const auto ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' ||
           c == '\f';
  };
  while (i < line.size()) {
    while (i < line.size() && ws(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !ws(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace detail

inline RunFileRecord parse_run_line(std::string_view line, std::size_t lineno) {
  const auto f = detail::split_ws(line);
  if (f.size() != 6)
    throw ParseError(lineno, "expected 6 fields, found " +
                                 std::to_string(f.size()));
  RunFileRecord rec;
  rec.topic_id = f[0];
  rec.flag = f[1];
  rec.doc_id = f[2];
  rec.run_tag = f[5];
  if (!detail::parse_number(f[3], rec.rank) || rec.rank < 1)
    throw ParseError(lineno, "bad rank '" + std::string(f[3]) + "'");
  if (!detail::parse_number(f[4], rec.score) || !std::isfinite(rec.score))
    throw ParseError(lineno, "bad score '" + std::string(f[4]) + "'");
  return rec;
}

/// Parses a run file. Documents within a topic are ordered by rank, then by
/// descending score, then by doc id; gaps or ties in the rank column are
/// repaired by renumbering with a warning. Topics keep their first-seen order.
inline Run parse_run(std::istream& in, Diagnostics* diag = nullptr) {
  struct Pending {
    std::vector<RunFileRecord> recs;
    std::unordered_set<std::string> docs;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, Pending> by_topic;
  std::string run_tag;
  bool mixed_tags = false;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::split_ws(line).empty()) continue;
    auto rec = parse_run_line(line, lineno);
    if (run_tag.empty())
      run_tag = rec.run_tag;
    else if (rec.run_tag != run_tag)
      mixed_tags = true;
    auto [it, inserted] = by_topic.try_emplace(rec.topic_id);
    if (inserted) order.push_back(rec.topic_id);
    if (!it->second.docs.insert(rec.doc_id).second)
      throw ValidationError("line " + std::to_string(lineno) +
                            ": duplicate document '" + rec.doc_id +
                            "' in topic '" + rec.topic_id + "'");
    it->second.recs.push_back(std::move(rec));
  }
  if (order.empty()) throw ValidationError("run file contains no records");
  if (mixed_tags && diag)
    diag->warn("run file mixes run tags; using '" + run_tag + "'");

  Run run;
  run.run_tag = run_tag;
  run.topics.reserve(order.size());
  for (const auto& id : order) {
    auto& recs = by_topic[id].recs;
    std::sort(recs.begin(), recs.end(),
              [](const RunFileRecord& a, const RunFileRecord& b) {
                if (a.rank != b.rank) return a.rank < b.rank;
                if (a.score != b.score) return a.score > b.score;
                return a.doc_id < b.doc_id;
              });
    bool contiguous = true;
    std::vector<RankedDoc> docs;
    docs.reserve(recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
      contiguous = contiguous && recs[i].rank == static_cast<std::int64_t>(i + 1);
      docs.push_back({recs[i].doc_id, false});
    }
    if (!contiguous && diag)
      diag->warn("topic '" + id + "': ranks not contiguous 1.." +
                 std::to_string(recs.size()) + ", re-ranked in sorted order");
    run.topics.emplace_back(id, std::move(docs));
  }
  return run;
}

inline Run parse_run(const std::string& text, Diagnostics* diag = nullptr) {
  std::istringstream in(text);
  return parse_run(in, diag);
}

// ---------------------------------------------------------------------------
// Qrels
// ---------------------------------------------------------------------------

struct Qrels {
  // topic -> doc -> label
  std::map<std::string, std::unordered_map<std::string, std::int64_t>> labels;

  bool has_topic(const std::string& topic) const {
    return labels.count(topic) != 0;
  }

  bool is_relevant(const std::string& topic, const std::string& doc) const {
    const auto t = labels.find(topic);
    if (t == labels.end()) return false;
    const auto d = t->second.find(doc);
    return d != t->second.end() && d->second > 0;
  }

  std::int64_t relevant_count(const std::string& topic) const {
    const auto t = labels.find(topic);
    if (t == labels.end()) return 0;
    return std::count_if(t->second.begin(), t->second.end(),
                         [](const auto& kv) { return kv.second > 0; });
  }
};

inline QrelRecord parse_qrel_line(std::string_view line, std::size_t lineno) {
  const auto f = detail::split_ws(line);
  if (f.size() != 4)
    throw ParseError(lineno, "expected 4 fields, found " +
                                 std::to_string(f.size()));
  QrelRecord rec{std::string(f[0]), std::string(f[1]), std::string(f[2]), 0};
  if (!detail::parse_number(f[3], rec.label) || rec.label < 0)
    throw ParseError(lineno, "bad label '" + std::string(f[3]) + "'");
  return rec;
}

/// Relevance is binary: label > 0. Repeated (topic, doc) pairs must agree.
inline Qrels parse_qrels(std::istream& in) {
  Qrels q;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::split_ws(line).empty()) continue;
    auto rec = parse_qrel_line(line, lineno);
    auto& topic = q.labels[rec.topic_id];
    const auto [it, inserted] = topic.try_emplace(rec.doc_id, rec.label);
    if (!inserted && it->second != rec.label)
      throw ValidationError("line " + std::to_string(lineno) +
                            ": conflicting labels for '" + rec.doc_id +
                            "' in topic '" + rec.topic_id + "'");
  }
  return q;
}

inline Qrels parse_qrels(const std::string& text) {
  std::istringstream in(text);
  return parse_qrels(in);
}

/// Sets relevance flags from qrels. Unjudged documents are non-relevant and
/// counted in one warning per topic.
inline Run join(const Run& run, const Qrels& qrels,
                Diagnostics* diag = nullptr) {
  Run out;
  out.run_tag = run.run_tag;
  out.topics.reserve(run.topics.size());
  for (const auto& topic : run.topics) {
    const auto t = qrels.labels.find(topic.id());
    if (t == qrels.labels.end())
      throw JoinError("topic '" + topic.id() + "' of run '" + run.run_tag +
                      "' is absent from qrels");
    std::vector<RankedDoc> docs;
    docs.reserve(topic.docs().size());
    std::size_t unjudged = 0;
    for (const auto& d : topic.docs()) {
      const auto it = t->second.find(d.doc_id);
      if (it == t->second.end()) ++unjudged;
      docs.push_back({d.doc_id, it != t->second.end() && it->second > 0});
    }
    if (unjudged && diag)
      diag->warn("run '" + run.run_tag + "' topic '" + topic.id() + "': " +
                 std::to_string(unjudged) +
                 " documents absent from qrels, treated as non-relevant");
    out.topics.emplace_back(topic.id(), std::move(docs));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

/// Writes a run file; score is n - rank + 1 so ranks and scores agree.
inline void write_run(std::ostream& os, const Run& run,
                      std::string_view flag = "NF") {
  for (const auto& topic : run.topics) {
    const auto n = topic.size();
    for (std::int64_t r = 1; r <= n; ++r)
      os << topic.id() << ' ' << flag << ' '
         << topic.docs()[static_cast<std::size_t>(r - 1)].doc_id << ' ' << r
         << ' ' << (n - r + 1) << ' ' << run.run_tag << '\n';
  }
}

/// Writes a qrels line for every document of every topic (label 0 or 1).
inline void write_qrels(std::ostream& os, const Run& run) {
  for (const auto& topic : run.topics)
    for (const auto& d : topic.docs())
      os << topic.id() << " 0 " << d.doc_id << ' ' << (d.relevant ? 1 : 0)
         << '\n';
}

// ---------------------------------------------------------------------------
// Dataset statistics
// ---------------------------------------------------------------------------

/// Reference statistics of the CLEF 2017 TAR test collection.
struct ReferenceStats {
  std::size_t topics = 30;
  std::int64_t size_min = 64;
  std::int64_t size_max = 12807;
  double size_median = 2070;
  std::int64_t total_docs = 117562;
  std::int64_t rel_min = 2;
  std::int64_t rel_max = 460;
  double rel_median = 38;
  double relevant_pct = 1.58;
};

enum class CheckStatus { Pass, Warn, Inapplicable };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Warn: return "warn";
    case CheckStatus::Inapplicable: return "n/a";
  }
  return "?";
}

struct DatasetCheck {
  std::string name;
  double expected = 0.0;
  double observed = 0.0;
  CheckStatus status = CheckStatus::Inapplicable;
};

struct TopicStats {
  std::string topic_id;
  std::int64_t size = 0;
  std::int64_t relevant = 0;
};

struct ValidationSummary {
  std::vector<TopicStats> topics;
  std::int64_t size_min = 0, size_max = 0;
  double size_median = 0.0;
  std::int64_t total_docs = 0;
  std::int64_t rel_min = 0, rel_max = 0;
  double rel_median = 0.0;
  std::int64_t total_relevant = 0;
  double relevant_pct = 0.0;       // pooled: 100 * relevant / docs
  double mean_relevant_pct = 0.0;  // mean of per-topic percentages
  std::vector<DatasetCheck> checks;
  std::vector<std::string> warnings;
};

namespace detail {
inline double median(std::vector<std::int64_t> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  if (n == 0) return 0.0;
  return n % 2 ? static_cast<double>(v[n / 2])
               : 0.5 * static_cast<double>(v[n / 2 - 1] + v[n / 2]);
}
}  // namespace detail

/// Per-topic sizes and relevant counts from the qrels, compared against the
/// reference statistics. Checks only apply when the topic count matches the
/// reference; mismatches are warnings. Runs whose topic sizes differ from
/// the qrels are reported as warnings too.
inline ValidationSummary validate_dataset(std::span<const Run> runs,
                                          const Qrels& qrels,
                                          const ReferenceStats& ref = {}) {
  ValidationSummary s;
  std::vector<std::int64_t> sizes, rels;
  double pct_sum = 0.0;
  for (const auto& [topic, docs] : qrels.labels) {
    TopicStats ts{topic, static_cast<std::int64_t>(docs.size()),
                  qrels.relevant_count(topic)};
    sizes.push_back(ts.size);
    rels.push_back(ts.relevant);
    s.total_docs += ts.size;
    s.total_relevant += ts.relevant;
    if (ts.size > 0)
      pct_sum += 100.0 * static_cast<double>(ts.relevant) /
                 static_cast<double>(ts.size);
    s.topics.push_back(std::move(ts));
  }
  if (!sizes.empty()) {
    s.size_min = *std::min_element(sizes.begin(), sizes.end());
    s.size_max = *std::max_element(sizes.begin(), sizes.end());
    s.rel_min = *std::min_element(rels.begin(), rels.end());
    s.rel_max = *std::max_element(rels.begin(), rels.end());
    s.size_median = detail::median(sizes);
    s.rel_median = detail::median(rels);
    s.mean_relevant_pct = pct_sum / static_cast<double>(sizes.size());
  }
  if (s.total_docs > 0)
    s.relevant_pct = 100.0 * static_cast<double>(s.total_relevant) /
                     static_cast<double>(s.total_docs);

  const bool applicable = s.topics.size() == ref.topics;
  const auto check = [&](std::string name, double expected, double observed,
                         double tol) {
    CheckStatus st = CheckStatus::Inapplicable;
    if (applicable)
      st = std::abs(expected - observed) <= tol ? CheckStatus::Pass
                                                : CheckStatus::Warn;
    s.checks.push_back({std::move(name), expected, observed, st});
  };
  check("topics", static_cast<double>(ref.topics),
        static_cast<double>(s.topics.size()), 0);
  check("size_min", static_cast<double>(ref.size_min),
        static_cast<double>(s.size_min), 0);
  check("size_max", static_cast<double>(ref.size_max),
        static_cast<double>(s.size_max), 0);
  check("size_median", ref.size_median, s.size_median, 1);
  check("total_docs", static_cast<double>(ref.total_docs),
        static_cast<double>(s.total_docs), 0);
  check("relevant_min", static_cast<double>(ref.rel_min),
        static_cast<double>(s.rel_min), 0);
  check("relevant_max", static_cast<double>(ref.rel_max),
        static_cast<double>(s.rel_max), 0);
  check("relevant_median", ref.rel_median, s.rel_median, 1);
  // The reference percentage is reported "on average"; accept the pooled or
  // the per-topic mean reading.
  const double pct =
      std::abs(s.relevant_pct - ref.relevant_pct) <=
              std::abs(s.mean_relevant_pct - ref.relevant_pct)
          ? s.relevant_pct
          : s.mean_relevant_pct;
  check("relevant_pct", ref.relevant_pct, pct, 0.005);

  for (const auto& run : runs) {
    for (const auto& topic : run.topics) {
      const auto t = qrels.labels.find(topic.id());
      if (t == qrels.labels.end()) {
        s.warnings.push_back("run '" + run.run_tag + "' topic '" + topic.id() +
                             "' absent from qrels");
      } else if (static_cast<std::int64_t>(t->second.size()) != topic.size()) {
        s.warnings.push_back("run '" + run.run_tag + "' topic '" + topic.id() +
                             "' ranks " + std::to_string(topic.size()) +
                             " documents, qrels judge " +
                             std::to_string(t->second.size()));
      }
    }
  }
  for (const auto& c : s.checks)
    if (c.status == CheckStatus::Warn)
      s.warnings.push_back("dataset check '" + c.name + "' expected " +
                           detail::to_str(c.expected) + ", observed " +
                           detail::to_str(c.observed));
  return s;
}

}  // namespace ppstop
