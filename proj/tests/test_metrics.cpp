#include <gtest/gtest.h>

#include <random>

#include "ppstop/metrics.hpp"
#include "test_util.hpp"

using namespace ppstop;
using ppstop::testing::make_topic;
using ppstop::testing::range_set;

namespace {

TopicResult result(std::int64_t size, std::int64_t effort, bool acceptable) {
  return {"t", size, effort, acceptable ? 1.0 : 0.0, acceptable, true};
}

// Area under the recall curve by direct summation of recall values.
double aurc_by_recall_curve(const Topic& t) {
  const double total = static_cast<double>(t.total_relevant());
  double area = 0.0, best = 0.0;
  for (std::int64_t i = 1; i <= t.size(); ++i) {
    area += static_cast<double>(t.rel_at(i)) / total;
    best += std::min(static_cast<double>(i), total) / total;
  }
  return area / best;
}

ppstop::Run run_with_aurc_rank(const std::string& tag, std::int64_t first_rel) {
  return {tag, {make_topic(40, {first_rel, first_rel + 1}, "q")}};
}

}  // namespace

TEST(Recall, Examples) {
  const auto topic = make_topic(100, range_set(1, 10));
  EXPECT_DOUBLE_EQ(recall_of(prefix_stop(topic, 7), topic), 0.7);
  EXPECT_DOUBLE_EQ(recall_of(full_review(topic), topic), 1.0);
}

TEST(Recall, CountsRelevantFoundOutsidePrefix) {
  // Prefix holds 6 of 10; one more relevant among the extra samples.
  const auto topic = make_topic(100, {1, 2, 3, 4, 5, 6, 40, 50, 60, 70});
  StopOutcome out{"t", 6, 3, 7, true};
  EXPECT_DOUBLE_EQ(recall_of(out, topic), 0.7);
  EXPECT_EQ(out.effort(), 9);
}

TEST(Recall, NoRelevantThrows) {
  const auto topic = make_topic(5, {});
  EXPECT_THROW(recall_of(full_review(topic), topic), DomainError);
  EXPECT_THROW(acceptability(full_review(topic), topic, 0.7), DomainError);
}

TEST(Acceptability, Boundary) {
  const auto topic = make_topic(2000, range_set(1, 1000));
  EXPECT_TRUE(acceptability(prefix_stop(topic, 700), topic, 0.7));
  EXPECT_FALSE(acceptability(prefix_stop(topic, 699), topic, 0.7));
  EXPECT_TRUE(acceptability(full_review(topic), topic, 1.0));
  EXPECT_TRUE(acceptability(full_review(topic), topic, 0.3));
}

TEST(Reliability, Examples) {
  std::vector<TopicResult> rs(20, result(10, 10, true));
  EXPECT_DOUBLE_EQ(reliability(rs), 1.0);
  rs[3].acceptable = false;
  EXPECT_DOUBLE_EQ(reliability(rs), 0.95);
  std::vector<TopicResult> thirty(30, result(10, 10, true));
  thirty[0].acceptable = false;
  EXPECT_NEAR(reliability(thirty), 29.0 / 30.0, 1e-15);
  EXPECT_GE(reliability(thirty), 0.95);
  EXPECT_THROW(reliability(std::vector<TopicResult>{}), DomainError);
}

TEST(EffortSaved, Examples) {
  std::vector<TopicResult> full{result(100, 100, true), result(50, 50, true)};
  EXPECT_DOUBLE_EQ(pct_effort_saved(full), 0.0);
  std::vector<TopicResult> one{result(100, 30, true)};
  EXPECT_DOUBLE_EQ(pct_effort_saved(one), 70.0);
  std::vector<TopicResult> two{result(100, 50, true), result(200, 100, true)};
  EXPECT_DOUBLE_EQ(pct_effort_saved(two), 50.0);
}

TEST(EffortSaved, ExtraSamplesNeverMakeSavingNegative) {
  std::vector<TopicResult> over{result(100, 130, true)};
  EXPECT_DOUBLE_EQ(pct_effort_saved(over), 0.0);
}

TEST(MethodReport, Totals) {
  const auto r = MethodReport::build(
      "pp", "run", {result(100, 50, true), result(200, 100, false)});
  EXPECT_EQ(r.total_effort, 150);
  EXPECT_EQ(r.total_size, 300);
  EXPECT_DOUBLE_EQ(r.reliability, 0.5);
  EXPECT_DOUBLE_EQ(r.mean_pct_effort_saved, 50.0);
}

TEST(Summarize, MeanEffortIsPerRunTotalAveraged) {
  std::vector<MethodReport> reports{
      MethodReport::build("pp", "a", {result(100, 40, true), result(100, 60, true)}),
      MethodReport::build("pp", "b", {result(100, 100, false), result(100, 100, true)})};
  const auto s = summarize(reports);
  EXPECT_EQ(s.runs, 2u);
  EXPECT_EQ(s.topics, 4u);
  EXPECT_DOUBLE_EQ(s.mean_effort, 150.0);
  EXPECT_DOUBLE_EQ(s.mean_pct_saved, 25.0);
  EXPECT_DOUBLE_EQ(s.reliability, 0.75);
}

TEST(Aurc, Examples) {
  EXPECT_EQ(aurc(make_topic(50, range_set(1, 7))), 1.0);
  EXPECT_NEAR(aurc(make_topic(4, {3, 4})), 1.5 / 3.5, 1e-9);
  EXPECT_NEAR(aurc(make_topic(2, {2})), 0.5, 1e-9);
  EXPECT_THROW(aurc(make_topic(3, {})), DomainError);
}

TEST(Aurc, MatchesRecallCurveSumProperty) {
  std::mt19937 gen(17);
  for (int trial = 0; trial < 60; ++trial) {
    const std::int64_t n = 1 + static_cast<std::int64_t>(gen() % 300);
    std::set<std::int64_t> rel{1 + static_cast<std::int64_t>(gen() % n)};
    for (std::int64_t r = 1; r <= n; ++r)
      if (gen() % 7 == 0) rel.insert(r);
    const auto t = make_topic(n, rel);
    const double a = aurc(t);
    EXPECT_NEAR(a, aurc_by_recall_curve(t), 1e-12);
    EXPECT_GT(a, 0.0);
    EXPECT_LE(a, 1.0);
  }
}

TEST(Aurc, PromotingRelevantNeverLowersProperty) {
  std::mt19937 gen(23);
  for (int trial = 0; trial < 60; ++trial) {
    const std::int64_t n = 2 + static_cast<std::int64_t>(gen() % 200);
    std::set<std::int64_t> rel;
    for (std::int64_t r = 1; r <= n; ++r)
      if (gen() % 5 == 0) rel.insert(r);
    if (rel.empty() || rel.size() == static_cast<std::size_t>(n)) continue;
    // Move one relevant document to the first non-relevant rank above it.
    const std::int64_t from = *std::prev(rel.end());
    std::int64_t to = 1;
    while (rel.count(to)) ++to;
    if (to > from) continue;
    auto promoted = rel;
    promoted.erase(from);
    promoted.insert(to);
    EXPECT_GE(aurc(make_topic(n, promoted)), aurc(make_topic(n, rel)));
  }
}

TEST(Stratify, MiddleOfThirtyThree) {
  EXPECT_EQ(default_middle_start(33, 5), 14u);
  std::vector<ppstop::Run> runs;
  for (int i = 0; i < 33; ++i) {
    char tag[8];
    std::snprintf(tag, sizeof tag, "r%02d", i);
    runs.push_back(run_with_aurc_rank(tag, 1 + i));  // r00 best, r32 worst
  }
  const auto s = stratify_runs(runs);
  ASSERT_EQ(s.ranked.size(), 33u);
  // 1-based positions 15..19.
  EXPECT_EQ(s.middle.front().run_tag, "r14");
  EXPECT_EQ(s.middle.back().run_tag, "r18");
  EXPECT_EQ(s.top.front().run_tag, "r00");
  EXPECT_EQ(s.bottom.back().run_tag, "r32");
  for (std::size_t i = 1; i < s.ranked.size(); ++i)
    EXPECT_GE(s.ranked[i - 1].aurc, s.ranked[i].aurc);
}

TEST(Stratify, FifteenRunsPartition) {
  std::vector<ppstop::Run> runs;
  for (int i = 14; i >= 0; --i)
    runs.push_back(run_with_aurc_rank("r" + std::to_string(100 + i), 1 + i));
  const auto s = stratify_runs(runs);
  EXPECT_EQ(s.top.front().run_tag, "r100");
  EXPECT_EQ(s.top.back().run_tag, "r104");
  EXPECT_EQ(s.middle.front().run_tag, "r105");
  EXPECT_EQ(s.middle.back().run_tag, "r109");
  EXPECT_EQ(s.bottom.front().run_tag, "r110");
  EXPECT_EQ(s.bottom.back().run_tag, "r114");
}

TEST(Stratify, TiesBrokenByRunTag) {
  std::vector<ppstop::Run> runs;
  for (const char* tag : {"m", "c", "x", "a", "k", "b", "z", "e", "q", "d",
                          "y", "f", "n", "g", "p"})
    runs.push_back(run_with_aurc_rank(tag, 3));
  const auto s = stratify_runs(runs);
  EXPECT_EQ(s.top.front().run_tag, "a");
  EXPECT_EQ(s.middle.front().run_tag, "f");
  EXPECT_EQ(s.bottom.back().run_tag, "z");
  const auto again = stratify_runs(runs);
  for (std::size_t i = 0; i < s.ranked.size(); ++i)
    EXPECT_EQ(s.ranked[i].run_tag, again.ranked[i].run_tag);
}

TEST(Stratify, Errors) {
  std::vector<ppstop::Run> runs;
  for (int i = 0; i < 14; ++i) runs.push_back(run_with_aurc_rank(std::to_string(i), 1));
  EXPECT_THROW(stratify_runs(runs), DomainError);
  runs.push_back(run_with_aurc_rank("last", 1));
  EXPECT_THROW(stratify_runs(runs, 5, 11), DomainError);
  EXPECT_NO_THROW(stratify_runs(runs, 5, 10));
}
