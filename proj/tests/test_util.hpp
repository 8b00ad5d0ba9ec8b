#pragma once

// Shared fixtures for the unit tests.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "ppstop/core.hpp"

namespace ppstop::testing {

/// Topic of size n with relevant documents at the given 1-based ranks.
inline Topic make_topic(std::int64_t n, const std::set<std::int64_t>& relevant,
                        const std::string& id = "t") {
  std::vector<RankedDoc> docs;
  for (std::int64_t r = 1; r <= n; ++r)
    docs.push_back({id + "-d" + std::to_string(r), relevant.count(r) > 0});
  return Topic(id, std::move(docs));
}

inline std::set<std::int64_t> range_set(std::int64_t lo, std::int64_t hi,
                                        std::int64_t step = 1) {
  std::set<std::int64_t> s;
  for (std::int64_t r = lo; r <= hi; r += step) s.insert(r);
  return s;
}

}  // namespace ppstop::testing
