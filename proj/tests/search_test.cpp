#include <gtest/gtest.h>

#include <random>

#include "alice/search.hpp"
#include "connet_checks.hpp"
#include "fixtures.hpp"

namespace alice {
namespace {

using namespace alice::testing;

TEST(ConstrainedBfs, AllOnesGivesComponent) {
  const auto g = citation_graph();
  const auto sub = whole(g);
  std::vector<double> s(10, 1.0);
  std::vector<NodeId> q = {id(g, "4")};
  EXPECT_EQ(constrained_bfs(sub, s, q, 0.5).size(), 10u);
}

TEST(ConstrainedBfs, AllZerosGivesQueryOnly) {
  const auto g = citation_graph();
  const auto sub = whole(g);
  std::vector<double> s(10, 0.0);
  std::vector<NodeId> q = {id(g, "7"), id(g, "4")};
  EXPECT_EQ(constrained_bfs(sub, s, q, 0.5), ids(g, {"4", "7"}));
}

TEST(ConstrainedBfs, BlockedIntermediate) {
  const auto g = graph_from_edges("q a\na b\n");
  const auto sub = whole(g);
  std::vector<double> s(3);
  s[id(g, "q")] = 0.0;
  s[id(g, "a")] = 0.2;
  s[id(g, "b")] = 0.9;
  std::vector<NodeId> q = {id(g, "q")};
  EXPECT_EQ(constrained_bfs(sub, s, q, 0.5), (std::vector<NodeId>{id(g, "q")}));
  s[id(g, "a")] = 0.6;
  EXPECT_EQ(constrained_bfs(sub, s, q, 0.5).size(), 3u);
}

TEST(ConstrainedBfs, StrictComparison) {
  const auto g = graph_from_edges("q a\n");
  const auto sub = whole(g);
  std::vector<double> s = {0.0, 0.0};
  s[id(g, "a")] = 0.5;
  std::vector<NodeId> q = {id(g, "q")};
  EXPECT_EQ(constrained_bfs(sub, s, q, 0.5).size(), 1u);
  EXPECT_EQ(constrained_bfs(sub, s, q, 0.45).size(), 2u);
}

TEST(ConstrainedBfs, BadInputsThrow) {
  const auto g = graph_from_edges("q a\n");
  const auto sub = whole(g);
  std::vector<double> short_scores = {0.1};
  std::vector<NodeId> q = {0};
  EXPECT_THROW(constrained_bfs(sub, short_scores, q, 0.5), std::invalid_argument);
  std::vector<double> s = {0.1, 0.2};
  std::vector<NodeId> outside = {5};
  EXPECT_THROW(constrained_bfs(sub, s, outside, 0.5), std::out_of_range);
}

TEST(ConstrainedBfs, RandomProperties) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_graph(15, 0.2, rng);
    const auto sub = whole(g);
    std::vector<double> s(15);
    for (double& x : s) x = u(rng);
    std::vector<NodeId> q = {static_cast<NodeId>(trial % 15)};
    std::vector<NodeId> previous;
    bool first = true;
    for (double t : ThresholdPolicy::default_grid()) {
      auto c = constrained_bfs(sub, s, q, t);
      ASSERT_TRUE(std::binary_search(c.begin(), c.end(), q[0]));
      // Every non-query member clears the threshold and has a member neighbour.
      for (NodeId v : c) {
        if (v == q[0]) continue;
        EXPECT_GT(s[v], t);
        bool linked = false;
        for (NodeId w : sub.neighbors(v)) linked |= std::binary_search(c.begin(), c.end(), w);
        EXPECT_TRUE(linked);
      }
      if (!first) {
        EXPECT_TRUE(std::includes(previous.begin(), previous.end(), c.begin(), c.end()));
      }
      previous = c;
      first = false;
    }
  }
}

TEST(QueryF1, Examples) {
  std::vector<NodeId> t = {1, 2, 3, 4};
  std::vector<NodeId> p = {3, 4, 5};
  EXPECT_NEAR(query_f1(t, p), 2 * (2.0 / 3) * 0.5 / (2.0 / 3 + 0.5), 1e-15);
  EXPECT_EQ(query_f1(t, t), 1.0);
  EXPECT_EQ(query_f1(t, std::vector<NodeId>{9}), 0.0);
  EXPECT_EQ(query_f1(std::vector<NodeId>{}, std::vector<NodeId>{}), 0.0);
}

TEST(Policy, DefaultGridAndValidation) {
  auto grid = ThresholdPolicy::default_grid();
  ASSERT_EQ(grid.size(), 19u);
  EXPECT_DOUBLE_EQ(grid.front(), 0.05);
  EXPECT_DOUBLE_EQ(grid.back(), 0.95);
  ThresholdPolicy bad;
  bad.grid = {};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad.grid = {0.5, 0.3};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad.grid = {1.0};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

struct SelectFixture : ::testing::Test {
  // Two triangles bridged by an edge; truth is the first triangle.
  AttributedGraph g = graph_from_edges("a b\nb c\nc a\nc d\nd e\ne f\nf d\n");
  CandidateSubgraph sub = whole(g);
  ScoredQuery make(std::vector<double> member_and_other) {
    ScoredQuery q;
    q.candidate = &sub;
    q.scores.assign(6, member_and_other[1]);
    for (const char* t : {"a", "b", "c"}) q.scores[id(g, t)] = member_and_other[0];
    q.query_local = {id(g, "a")};
    q.truth = ids(g, {"a", "b", "c"});
    return q;
  }
};

TEST_F(SelectFixture, SeparableScoresPickLowestTie) {
  std::vector<ScoredQuery> v = {make({0.9, 0.1})};
  auto sel = select_threshold(v, ThresholdPolicy{});
  // 0.05 admits the 0.1-scored nodes; 0.10 already excludes them under ">".
  EXPECT_DOUBLE_EQ(sel.threshold, 0.10);
  EXPECT_EQ(sel.f1, 1.0);
  EXPECT_LT(sel.mean_f1[0], 1.0);
  for (std::size_t i = 1; i < 17; ++i) EXPECT_EQ(sel.mean_f1[i], 1.0) << i;
}

TEST_F(SelectFixture, SingleGridPoint) {
  std::vector<ScoredQuery> v = {make({0.9, 0.1})};
  ThresholdPolicy p;
  p.grid = {0.7};
  EXPECT_EQ(select_threshold(v, p).threshold, 0.7);
}

TEST_F(SelectFixture, FlatScoresReturnLowest) {
  for (double flat : {0.0, 1.0}) {
    std::vector<ScoredQuery> v = {make({flat, flat})};
    EXPECT_DOUBLE_EQ(select_threshold(v, ThresholdPolicy{}).threshold, 0.05);
  }
}

TEST_F(SelectFixture, MeanOverQueries) {
  std::vector<ScoredQuery> v = {make({0.9, 0.1}), make({0.3, 0.1})};
  auto sel = select_threshold(v, ThresholdPolicy{});
  // First query perfect for t in [0.10, 0.85]; second only while t < 0.3.
  EXPECT_DOUBLE_EQ(sel.threshold, 0.10);
  EXPECT_DOUBLE_EQ(sel.f1, 1.0);
  EXPECT_LT(sel.mean_f1[6], 1.0);  // t = 0.35
}

TEST_F(SelectFixture, EmptyValidationThrows) {
  EXPECT_THROW(select_threshold(std::span<const ScoredQuery>{}, ThresholdPolicy{}), std::invalid_argument);
}

}  // namespace
}  // namespace alice
