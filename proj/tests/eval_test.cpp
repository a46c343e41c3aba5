#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "alice/eval.hpp"
#include "alice/log.hpp"
#include "connet_checks.hpp"
#include "fixtures.hpp"
#include "metric_oracles.hpp"

namespace alice {
namespace {

using namespace alice::testing;

std::vector<NodeSet> numbered(std::size_t count) {
  std::vector<NodeSet> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back({static_cast<NodeId>(2 * i), static_cast<NodeId>(2 * i + 1)});
  return out;
}

class Quiet : public ::testing::Test {
 protected:
  void SetUp() override { set_warnings_enabled(false); }
  void TearDown() override { set_warnings_enabled(true); }
};

using Split = Quiet;

TEST_F(Split, TenCommunitiesFiveOneFour) {
  std::mt19937_64 rng(1);
  auto s = split_communities(numbered(10), rng);
  EXPECT_TRUE(s.split);
  EXPECT_EQ(s.train.size(), 5u);
  EXPECT_EQ(s.validation.size(), 1u);
  EXPECT_EQ(s.test.size(), 4u);
  std::set<NodeSet> all;
  for (auto* part : {&s.train, &s.validation, &s.test}) all.insert(part->begin(), part->end());
  EXPECT_EQ(all.size(), 10u);
}

TEST_F(Split, PreservesTotals) {
  for (std::size_t n = 10; n <= 40; ++n) {
    std::mt19937_64 rng(n);
    auto s = split_communities(numbered(n), rng);
    EXPECT_EQ(s.train.size() + s.validation.size() + s.test.size(), n);
  }
}

TEST_F(Split, NineCommunitiesNotSplit) {
  std::mt19937_64 rng(1);
  auto s = split_communities(numbered(9), rng);
  EXPECT_FALSE(s.split);
  EXPECT_EQ(s.train, numbered(9));
  EXPECT_EQ(s.validation, numbered(9));
  EXPECT_EQ(s.test, numbered(9));
}

TEST_F(Split, SeededDeterminism) {
  std::mt19937_64 a(5), b(5);
  auto x = split_communities(numbered(23), a);
  auto y = split_communities(numbered(23), b);
  EXPECT_EQ(x.train, y.train);
  EXPECT_EQ(x.test, y.test);
}

TEST_F(Split, ErrorsOnBadInput) {
  std::mt19937_64 rng(1);
  EXPECT_THROW(split_communities({}, rng), std::invalid_argument);
  EXPECT_THROW(split_communities(numbered(12), rng, -1, 1, 1), std::invalid_argument);
}

struct Queries : Quiet {
  AttributedGraph g = citation_graph();
  std::vector<NodeSet> communities = {ids(g, {"1", "2", "3", "4"}), ids(g, {"5", "6", "7", "9", "10"})};
};

TEST_F(Queries, EmaHasNoAttributes) {
  std::mt19937_64 rng(2);
  for (const auto& p : gen_queries(g, communities, 50, QueryMode::EmA, rng)) {
    EXPECT_TRUE(p.query.attributes.empty());
    EXPECT_EQ(p.query.mode, QueryMode::EmA);
  }
}

TEST_F(Queries, NodesFromTruthCommunity) {
  std::mt19937_64 rng(3);
  std::map<std::size_t, int> sizes;
  for (const auto& p : gen_queries(g, communities, 300, QueryMode::AFN, rng)) {
    ASSERT_GE(p.query.nodes.size(), 1u);
    ASSERT_LE(p.query.nodes.size(), 3u);
    ++sizes[p.query.nodes.size()];
    std::set<NodeId> distinct(p.query.nodes.begin(), p.query.nodes.end());
    EXPECT_EQ(distinct.size(), p.query.nodes.size());
    EXPECT_TRUE(std::is_sorted(p.truth.begin(), p.truth.end()));
    for (NodeId v : p.query.nodes) EXPECT_TRUE(std::binary_search(p.truth.begin(), p.truth.end(), v));
  }
  EXPECT_EQ(sizes.size(), 3u);
}

TEST_F(Queries, AfnAttributesFromQueryNodes) {
  std::mt19937_64 rng(4);
  for (const auto& p : gen_queries(g, communities, 200, QueryMode::AFN, rng)) {
    std::set<AttrId> own;
    for (NodeId v : p.query.nodes) own.insert(g.attributes(v).begin(), g.attributes(v).end());
    EXPECT_FALSE(p.query.attributes.empty());
    EXPECT_LE(p.query.attributes.size(), 3u);
    for (AttrId a : p.query.attributes) EXPECT_TRUE(own.count(a));
  }
}

TEST_F(Queries, AfnSingleNodeWithTwoAttributes) {
  std::mt19937_64 rng(5);
  const NodeId four = id(g, "4");  // AI, DB
  std::vector<NodeSet> only = {{four}};
  std::set<AttrId> expected = {*g.find_attribute("AI"), *g.find_attribute("DB")};
  for (const auto& p : gen_queries(g, only, 20, QueryMode::AFN, rng)) {
    EXPECT_EQ(std::set<AttrId>(p.query.attributes.begin(), p.query.attributes.end()), expected);
  }
}

TEST_F(Queries, AfcDrawsFromTopFive) {
  GraphBuilder b;
  // "ML" on 9 of 10 members; seven rarer attributes.
  for (int i = 0; i < 10; ++i) {
    const std::string v = std::to_string(i);
    b.add_node(v);
    if (i < 9) b.add_attribute(v, "ML");
    b.add_attribute(v, "r" + std::to_string(i % 7));
  }
  const auto h = std::move(b).build();
  std::vector<NodeSet> all = {ids(h, {"0", "1", "2", "3", "4", "5", "6", "7", "8", "9"})};
  auto pool = top_attributes(h, all[0], 5);
  ASSERT_EQ(pool.size(), 5u);
  EXPECT_EQ(pool[0], *h.find_attribute("ML"));
  // Ties at count 2 (r0, r1, r2) broken by id, then count-1 attributes.
  EXPECT_EQ(pool[1], *h.find_attribute("r0"));
  std::mt19937_64 rng(6);
  std::set<AttrId> seen;
  for (const auto& p : gen_queries(h, all, 200, QueryMode::AFC, rng)) {
    ASSERT_EQ(p.query.attributes.size(), 1u);
    EXPECT_NE(std::find(pool.begin(), pool.end(), p.query.attributes[0]), pool.end());
    seen.insert(p.query.attributes[0]);
  }
  EXPECT_EQ(seen.size(), 5u);
}

TEST_F(Queries, AfcFallsBackOnAttributeFreeCommunity) {
  const auto h = graph_from_edges("a b\n");
  std::mt19937_64 rng(7);
  auto qs = gen_queries(h, {{0, 1}}, 5, QueryMode::AFC, rng);
  for (const auto& p : qs) {
    EXPECT_TRUE(p.query.attributes.empty());
    EXPECT_EQ(p.query.mode, QueryMode::EmA);
  }
}

TEST_F(Queries, Errors) {
  std::mt19937_64 rng(8);
  EXPECT_THROW(gen_queries(g, {}, 1, QueryMode::EmA, rng), std::invalid_argument);
  EXPECT_THROW(gen_queries(g, {{}}, 1, QueryMode::EmA, rng), std::invalid_argument);
}

TEST_F(Queries, SeededDeterminism) {
  std::mt19937_64 a(9), b(9);
  auto x = gen_queries(g, communities, 30, QueryMode::AFN, a);
  auto y = gen_queries(g, communities, 30, QueryMode::AFN, b);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(x[i].query.nodes, y[i].query.nodes);
    EXPECT_EQ(x[i].query.attributes, y[i].query.attributes);
  }
}

TEST(F1Suite, Examples) {
  std::vector<NodeSet> t = {{0, 1, 2, 3}};
  auto same = f1_suite(t, t);
  EXPECT_EQ(same.f1, 1.0);
  EXPECT_EQ(same.precision, 1.0);
  EXPECT_EQ(same.recall, 1.0);
  std::vector<NodeSet> disjoint = {{7, 8}};
  auto zero = f1_suite(t, disjoint);
  EXPECT_EQ(zero.f1, 0.0);
  EXPECT_EQ(zero.precision, 0.0);
  std::vector<NodeSet> p = {{0, 1, 4}};
  auto s = f1_suite(t, p);
  EXPECT_NEAR(s.precision, 2.0 / 3, 1e-15);
  EXPECT_NEAR(s.recall, 0.5, 1e-15);
  EXPECT_NEAR(s.f1, 4.0 / 7, 1e-15);
}

TEST(F1Suite, MicroNotMacro) {
  std::vector<NodeSet> t = {{0}, {0, 1, 2, 3, 4, 5, 6, 7, 8}};
  std::vector<NodeSet> p = {{0}, {0}};
  // Micro: 2 hits over 2 predicted and 10 true.
  EXPECT_NEAR(f1_suite(t, p).recall, 0.2, 1e-15);
}

TEST(F1Suite, EmptyAndMismatch) {
  std::vector<NodeSet> t = {{}};
  auto s = f1_suite(t, t);
  EXPECT_EQ(s.f1, 0.0);
  std::vector<NodeSet> two = {{1}, {2}};
  EXPECT_THROW(f1_suite(t, two), std::invalid_argument);
}

TEST(F1Suite, BoundsProperty) {
  std::mt19937_64 rng(10);
  for (int k = 0; k < 200; ++k) {
    std::vector<NodeSet> t = {random_subset(12, 0.4, rng), random_subset(12, 0.3, rng)};
    std::vector<NodeSet> p = {random_subset(12, 0.4, rng), random_subset(12, 0.3, rng)};
    auto s = f1_suite(t, p);
    for (double x : {s.precision, s.recall, s.f1}) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
    EXPECT_LE(s.f1, std::max(s.precision, s.recall) + 1e-15);
  }
}

TEST(AvgDegree, Examples) {
  const auto g = graph_from_edges("a b\nb c\nc a\nd e\nf g\n");
  std::vector<NodeSet> tri = {ids(g, {"a", "b", "c"})};
  EXPECT_EQ(avg_degree(g, tri), 2.0);
  std::vector<NodeSet> single = {ids(g, {"a"})};
  EXPECT_EQ(avg_degree(g, single), 0.0);
  std::vector<NodeSet> two = {ids(g, {"a", "b", "c"}), ids(g, {"d", "e"})};
  EXPECT_EQ(avg_degree(g, two), 1.5);
  // Degree counts only edges inside the community.
  std::vector<NodeSet> cut = {ids(g, {"a", "d"})};
  EXPECT_EQ(avg_degree(g, cut), 0.0);
  EXPECT_THROW(avg_degree(g, std::vector<NodeSet>{}), std::invalid_argument);
}

TEST(Cpj, Examples) {
  const auto g = AttributedGraph::ingest("a b\nc d\ne f\n", "a\tx,y\nb\tx,y\nc\tx\nd\ty\n");
  std::vector<NodeSet> same = {ids(g, {"a", "b"})};
  EXPECT_EQ(cpj(g, same), 1.0);
  std::vector<NodeSet> disjoint = {ids(g, {"c", "d"})};
  EXPECT_EQ(cpj(g, disjoint), 0.5);
  std::vector<NodeSet> bare = {ids(g, {"e", "f"})};
  EXPECT_EQ(cpj(g, bare), 0.0);
}

TEST(Cpj, InvariantToAttributeRelabeling) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 30; ++k) {
    const auto g = random_graph(10, 0.3, rng, false, 5);
    // Same incidence with renamed attribute tokens.
    std::ostringstream edges, attrs;
    write_edges(edges, g);
    for (NodeId v = 0; v < g.node_count(); ++v) {
      attrs << g.node_token(v) << '\t';
      bool first = true;
      for (AttrId a : g.attributes(v)) {
        attrs << (first ? "" : ",") << "renamed_" << g.attribute_token(a);
        first = false;
      }
      attrs << '\n';
    }
    const auto h = AttributedGraph::ingest(edges.str(), attrs.str());
    std::vector<NodeSet> p = {random_subset(10, 0.5, rng)};
    std::vector<NodeSet> ph;
    ph.emplace_back();
    for (NodeId v : p[0]) ph[0].push_back(*h.find_node(g.node_token(v)));
    std::sort(ph[0].begin(), ph[0].end());
    EXPECT_NEAR(cpj(g, p), cpj(h, ph), 1e-15);
  }
}

TEST(Metrics, MatchBruteForceOracles) { EXPECT_LE(metric_oracle_gap(100, 12), 1e-12); }

TEST(Report, EvaluateAndWriters) {
  const auto g = graph_from_edges("a b\nb c\nc a\nd e\n");
  std::vector<NodeSet> t = {ids(g, {"a", "b", "c"}), ids(g, {"d", "e"})};
  std::vector<NodeSet> p = {ids(g, {"a", "b"}), ids(g, {"d", "e"})};
  auto r = evaluate(g, t, p);
  EXPECT_NEAR(r.precision, 1.0, 1e-15);
  EXPECT_NEAR(r.recall, 0.8, 1e-15);
  ASSERT_EQ(r.per_query.size(), 2u);
  EXPECT_EQ(r.per_query[0].overlap, 2u);
  EXPECT_NEAR(r.per_query[0].f1, 0.8, 1e-15);
  EXPECT_EQ(r.per_query[1].f1, 1.0);

  std::ostringstream csv, js, pq;
  write_report_csv(csv, r);
  write_report_json(js, r);
  write_per_query_csv(pq, r);
  EXPECT_EQ(csv.str().substr(0, 13), "metric,value\n");
  auto j = nlohmann::json::parse(js.str());
  EXPECT_NEAR(j["recall"].get<double>(), 0.8, 1e-15);
  EXPECT_EQ(j["queries"].get<int>(), 2);
  const std::string keys_in_order = js.str();
  EXPECT_LT(keys_in_order.find("\"f1\""), keys_in_order.find("\"cpj\""));
  const std::string rows = pq.str();
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 3);
}

}  // namespace
}  // namespace alice
