#include <gtest/gtest.h>

#include <random>

#include "ppstop/core.hpp"
#include "test_util.hpp"

using namespace ppstop;
using ppstop::testing::make_topic;

TEST(RelAt, CountsPrefix) {
  EXPECT_EQ(rel_at(make_topic(5, {1, 3}), 2), 1);
  EXPECT_EQ(rel_at(make_topic(5, {1, 3}), 0), 0);
  EXPECT_EQ(rel_at(make_topic(5, {2, 4, 5}), 5), 3);
}

TEST(RelAt, OutOfRangeThrows) {
  const auto t = make_topic(5, {1});
  EXPECT_THROW(t.rel_at(-1), std::out_of_range);
  EXPECT_THROW(t.rel_at(6), std::out_of_range);
}

TEST(RelAt, StepsByAtMostOneAndEndsAtTotal) {
  std::mt19937 gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(gen() % 300);
    std::set<std::int64_t> rel;
    for (int r = 1; r <= n; ++r)
      if (gen() % 4 == 0) rel.insert(r);
    const auto t = make_topic(n, rel);
    for (int r = 1; r <= n; ++r) {
      const auto step = t.rel_at(r) - t.rel_at(r - 1);
      EXPECT_TRUE(step == 0 || step == 1);
    }
    EXPECT_EQ(t.rel_at(n), t.total_relevant());
    EXPECT_EQ(t.total_relevant(), static_cast<std::int64_t>(rel.size()));
  }
}

TEST(Topic, RejectsEmptyAndDuplicates) {
  EXPECT_THROW(Topic("x", {}), ValidationError);
  EXPECT_THROW(Topic("x", {{"a", false}, {"a", true}}), ValidationError);
}

TEST(Run, RejectsRepeatedTopic) {
  ppstop::Run run{"r", {make_topic(3, {}, "a"), make_topic(3, {}, "a")}};
  EXPECT_THROW(run.validate(), ValidationError);
}

TEST(StopOutcome, EffortIncludesExtra) {
  StopOutcome o{"t", 40, 7, 3, true};
  EXPECT_EQ(o.effort(), 47);
}

TEST(MethodParams, DefaultsAndValidation) {
  MethodParams p;
  EXPECT_DOUBLE_EQ(p.target_recall, 0.7);
  EXPECT_DOUBLE_EQ(p.confidence, 0.95);
  EXPECT_DOUBLE_EQ(p.alpha_frac, 0.3);
  EXPECT_DOUBLE_EQ(p.beta_frac, 0.05);
  EXPECT_EQ(p.gamma, 20);
  EXPECT_DOUBLE_EQ(p.delta, 0.7);
  EXPECT_EQ(p.target_count, 10);
  EXPECT_EQ(p.epsilon, 150);
  EXPECT_NO_THROW(p.validate());

  auto bad = p;
  bad.confidence = 1.0;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = p;
  bad.beta_frac = 0.5;  // beta > alpha
  EXPECT_THROW(bad.validate(), DomainError);
  bad = p;
  bad.target_recall = 0.0;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = p;
  bad.gamma = 0;
  EXPECT_THROW(bad.validate(), DomainError);
}
