#pragma once

// Domain types shared by every ppstop module: ranked topics, runs, stopping
// outcomes, method parameters, and the error hierarchy.

#include <cstddef>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace ppstop {

namespace detail {
inline std::string to_str(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside an operation's precondition (negative means, ranks past
/// the end of a topic, invalid family parameters).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: overflow of e^{kx}, unbounded Poisson means.
class ComputationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what),
        line_(line),
        detail_(what) {}
  std::size_t line() const noexcept { return line_; }
  /// Message without the line prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

/// Well-formed input that violates a data invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Topic
// ---------------------------------------------------------------------------

struct RankedDoc {
  std::string doc_id;
  bool relevant = false;

  friend bool operator==(const RankedDoc&, const RankedDoc&) = default;
};

/// One ranked document list with binary relevance labels. Position i of
/// docs() is rank i+1. Immutable after construction; relevant-prefix counts
/// are precomputed so rel_at is O(1).
class Topic {
 public:
  Topic(std::string topic_id, std::vector<RankedDoc> docs)
      : topic_id_(std::move(topic_id)), docs_(std::move(docs)) {
    if (docs_.empty())
      throw ValidationError("topic '" + topic_id_ + "' has no documents");
    std::unordered_set<std::string_view> seen;
    seen.reserve(docs_.size());
    prefix_.reserve(docs_.size() + 1);
    prefix_.push_back(0);
    for (const auto& d : docs_) {
      if (!seen.insert(d.doc_id).second)
        throw ValidationError("topic '" + topic_id_ + "' has duplicate doc '" +
                              d.doc_id + "'");
      prefix_.push_back(prefix_.back() + (d.relevant ? 1 : 0));
    }
  }

  const std::string& id() const noexcept { return topic_id_; }
  const std::vector<RankedDoc>& docs() const noexcept { return docs_; }
  std::int64_t size() const noexcept {
    return static_cast<std::int64_t>(docs_.size());
  }
  std::int64_t total_relevant() const noexcept { return prefix_.back(); }

  /// Relevant documents at ranks 1..rank. rel_at(0) == 0.
  std::int64_t rel_at(std::int64_t rank) const {
    if (rank < 0 || rank > size())
      throw std::out_of_range("rank " + std::to_string(rank) +
                              " outside 0.." + std::to_string(size()) +
                              " for topic '" + topic_id_ + "'");
    return prefix_[static_cast<std::size_t>(rank)];
  }

  /// True iff the document at 1-based `rank` is relevant.
  bool relevant_at(std::int64_t rank) const {
    if (rank < 1 || rank > size())
      throw std::out_of_range("rank " + std::to_string(rank) +
                              " outside 1.." + std::to_string(size()));
    return docs_[static_cast<std::size_t>(rank - 1)].relevant;
  }

  friend bool operator==(const Topic& a, const Topic& b) {
    return a.topic_id_ == b.topic_id_ && a.docs_ == b.docs_;
  }

 private:
  std::string topic_id_;
  std::vector<RankedDoc> docs_;
  std::vector<std::int64_t> prefix_;
};

inline std::int64_t rel_at(const Topic& topic, std::int64_t rank) {
  return topic.rel_at(rank);
}

/// A named collection of topics; topic ids are unique.
struct Run {
  std::string run_tag;
  std::vector<Topic> topics;

  const Topic* find(const std::string& topic_id) const {
    for (const auto& t : topics)
      if (t.id() == topic_id) return &t;
    return nullptr;
  }

  void validate() const {
    std::unordered_set<std::string_view> ids;
    for (const auto& t : topics)
      if (!ids.insert(t.id()).second)
        throw ValidationError("run '" + run_tag + "' repeats topic '" +
                              t.id() + "'");
  }

  friend bool operator==(const Run&, const Run&) = default;
};

// ---------------------------------------------------------------------------
// Method inputs and outputs
// ---------------------------------------------------------------------------

/// Per-topic result of a stopping method.
struct StopOutcome {
  std::string topic_id;
  std::int64_t stop_rank = 0;       // last examined ranked position
  std::int64_t extra_examined = 0;  // examined documents beyond stop_rank
  std::int64_t relevant_found = 0;
  bool predicted = false;  // false when the method fell back to full review

  std::int64_t effort() const noexcept { return stop_rank + extra_examined; }

  friend bool operator==(const StopOutcome&, const StopOutcome&) = default;
};

struct MethodParams {
  double target_recall = 0.7;
  double confidence = 0.95;
  double alpha_frac = 0.3;
  double beta_frac = 0.05;
  std::int64_t gamma = 20;
  double delta = 0.7;
  std::int64_t target_count = 10;
  std::int64_t epsilon = 150;

  void validate() const {
    if (!(target_recall > 0.0 && target_recall <= 1.0))
      throw DomainError("target_recall must be in (0, 1]");
    if (!(confidence > 0.0 && confidence < 1.0))
      throw DomainError("confidence must be in (0, 1)");
    if (!(beta_frac > 0.0 && beta_frac <= alpha_frac && alpha_frac <= 1.0))
      throw DomainError("require 0 < beta <= alpha <= 1");
    if (gamma < 1) throw DomainError("gamma must be >= 1");
    if (!(delta > 0.0 && delta <= 1.0))
      throw DomainError("delta must be in (0, 1]");
    if (target_count < 1) throw DomainError("target_count must be >= 1");
    if (epsilon < 0) throw DomainError("epsilon must be >= 0");
  }
};

}  // namespace ppstop
