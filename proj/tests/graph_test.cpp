#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "resalloc/graph.hpp"

namespace resalloc {
namespace {

std::set<std::pair<std::size_t, std::size_t>> edge_set(const GraphSnapshot& g) {
  std::set<std::pair<std::size_t, std::size_t>> s;
  for (const Edge& e : g.edges()) s.insert({e.i, e.j});
  return s;
}

GraphSnapshot path(std::size_t n, std::initializer_list<std::pair<std::size_t, std::size_t>> links) {
  std::vector<Edge> edges;
  for (auto [i, j] : links) edges.push_back({i, j, 1.0});
  return GraphSnapshot::from_edges(n, edges);
}

TEST(Validate, AcceptsSingleEdge) {
  const std::vector<double> w{0, 1, 1, 0};
  EXPECT_FALSE(validate(2, w).has_value());
}

TEST(Validate, ReportsAsymmetryAtFirstPair) {
  const std::vector<double> w{0, 1, 0.5, 0};
  const auto v = validate(2, w);
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(v->kind, ErrorKind::SymmetryViolation);
  EXPECT_EQ(v->i, 0u);
  EXPECT_EQ(v->j, 1u);
}

TEST(Validate, ReportsNegativeWeight) {
  const std::vector<double> w{0, -1, -1, 0};
  const auto v = validate(2, w);
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(v->kind, ErrorKind::NegativeWeight);
  EXPECT_EQ(v->i, 0u);
  EXPECT_EQ(v->j, 1u);
}

TEST(Validate, RejectsDiagonalAndNonFinite) {
  EXPECT_EQ(validate(2, std::vector<double>{1, 0, 0, 0})->kind, ErrorKind::InvalidWeight);
  EXPECT_EQ(validate(2, std::vector<double>{0, NAN, NAN, 0})->kind, ErrorKind::InvalidWeight);
  EXPECT_EQ(validate(3, std::vector<double>{0, 1, 1, 0})->kind, ErrorKind::DimensionMismatch);
}

TEST(Snapshot, FromDenseThrowsWithKind) {
  try {
    GraphSnapshot::from_dense(2, {0, 1, 0.5, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SymmetryViolation);
  }
  EXPECT_THROW(GraphSnapshot::from_edges(2, std::vector<Edge>{{0, 1, -1.0}}), Error);
  EXPECT_THROW(GraphSnapshot::from_edges(2, std::vector<Edge>{{1, 1, 1.0}}), Error);
}

TEST(Snapshot, AdjacencyMatchesDense) {
  const std::vector<Edge> edges{{0, 1, 0.5}, {1, 2, 2.0}, {0, 1, 0.25}};
  const GraphSnapshot g = GraphSnapshot::from_edges(3, edges);
  EXPECT_DOUBLE_EQ(g.weight(0, 1), 0.75);
  EXPECT_DOUBLE_EQ(g.weight(1, 0), 0.75);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.degree(1), 2u);
  EXPECT_EQ(g.degree(0), 1u);
  EXPECT_DOUBLE_EQ(g.max_row_sum(), 2.75);
}

TEST(Snapshot, NormalizedIsSymmetricSubstochastic) {
  Rng rng(3);
  const GraphSnapshot g = cycle_graph(7, rng, 0.0, 1.0).normalized();
  EXPECT_FALSE(validate(7, g.dense()).has_value());
  EXPECT_NEAR(g.max_row_sum(), 1.0, 1e-15);
}

TEST(Union, DisjointEdges) {
  const GraphSnapshot a = path(3, {{0, 1}});
  const GraphSnapshot b = path(3, {{1, 2}});
  const std::vector<GraphSnapshot> both{a, b};
  const auto s = edge_set(union_of(both));
  EXPECT_EQ(s, (std::set<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}}));
}

TEST(Union, IdempotentEdgeSetAndWeightsAdd) {
  const GraphSnapshot a = path(4, {{0, 1}, {2, 3}});
  const std::vector<GraphSnapshot> twice{a, a};
  const GraphSnapshot u = union_of(twice);
  EXPECT_EQ(edge_set(u), edge_set(a));
  EXPECT_DOUBLE_EQ(u.weight(0, 1), 2.0);
}

TEST(Union, MismatchedSizes) {
  const std::vector<GraphSnapshot> gs{GraphSnapshot(3), GraphSnapshot(4)};
  try {
    union_of(gs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

// Delete disjoint link subsets of a connected parent; the union restores it.
TEST(Union, DisjointDeletionsRecoverParent) {
  Rng rng(11);
  const std::vector<Edge> parent = scale_free_edges(30, 2, rng);
  const GraphSnapshot whole = GraphSnapshot::from_edges(30, parent);
  ASSERT_TRUE(has_spanning_tree(whole));
  std::vector<GraphSnapshot> parts;
  for (std::size_t part = 0; part < 4; ++part) {
    std::vector<Edge> kept;
    for (std::size_t e = 0; e < parent.size(); ++e) {
      if (e % 4 != part) kept.push_back(parent[e]);
    }
    parts.push_back(GraphSnapshot::from_edges(30, kept));
  }
  EXPECT_EQ(edge_set(union_of(parts)), edge_set(whole));
}

TEST(Union, CommutativeAndAssociative) {
  Rng rng(5);
  std::vector<GraphSnapshot> gs;
  for (int k = 0; k < 3; ++k) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < 8; ++i) {
      for (std::size_t j = i + 1; j < 8; ++j) {
        if (rng.canonical() < 0.3) edges.push_back({i, j, rng.uniform(0.1, 1.0)});
      }
    }
    gs.push_back(GraphSnapshot::from_edges(8, edges));
  }
  const std::vector<GraphSnapshot> ab{gs[0], gs[1]};
  const std::vector<GraphSnapshot> ba{gs[1], gs[0]};
  EXPECT_EQ(edge_set(union_of(ab)), edge_set(union_of(ba)));
  const std::vector<GraphSnapshot> left{union_of(ab), gs[2]};
  const std::vector<GraphSnapshot> bc{gs[1], gs[2]};
  const std::vector<GraphSnapshot> right{gs[0], union_of(bc)};
  EXPECT_EQ(edge_set(union_of(left)), edge_set(union_of(right)));
}

TEST(SpanningTree, Cycle) {
  Rng rng(1);
  EXPECT_TRUE(has_spanning_tree(cycle_graph(10, rng, 0.1, 1.0)));
}

TEST(SpanningTree, TwoCliquesAndIsolatedVertex) {
  EXPECT_FALSE(has_spanning_tree(path(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}})));
  EXPECT_FALSE(has_spanning_tree(path(4, {{0, 1}, {1, 2}})));
  EXPECT_EQ(component_count(path(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}})), 2u);
}

TEST(SpanningTree, AddingEdgesPreservesConnectivity) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const GraphSnapshot g = cycle_graph(12, rng, 0.1, 1.0);
    std::vector<Edge> extra;
    for (int k = 0; k < 5; ++k) {
      const std::size_t i = rng.below(12);
      const std::size_t j = rng.below(12);
      if (i != j) extra.push_back({i, j, 1.0});
    }
    const std::vector<GraphSnapshot> pair{g, GraphSnapshot::from_edges(12, extra)};
    EXPECT_TRUE(has_spanning_tree(union_of(pair)));
  }
}

GraphSchedule two_segment() {
  const GraphSnapshot g1 = path(3, {{0, 1}});
  const GraphSnapshot g2 = path(3, {{1, 2}});
  return GraphSchedule({{25.0, g1}, {25.0, g2}}, true);
}

TEST(Schedule, LookupAndBoundaryConvention) {
  const GraphSchedule s = two_segment();
  EXPECT_EQ(s.segment_index_at(0.0), 0u);
  EXPECT_EQ(s.segment_index_at(24.999), 0u);
  EXPECT_EQ(s.segment_index_at(25.0), 1u);
  EXPECT_EQ(s.segment_index_at(60.0), 0u);
  EXPECT_EQ(graph_at(s, 60.0), s.segments()[0].snapshot);
  EXPECT_EQ(graph_at(s, 75.0), s.segments()[1].snapshot);
}

TEST(Schedule, NegativeTimeThrows) {
  try {
    graph_at(two_segment(), -1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidTime);
  }
}

TEST(Schedule, NonCyclicLastPersists) {
  const GraphSnapshot g1 = path(3, {{0, 1}});
  const GraphSnapshot g2 = path(3, {{1, 2}});
  const GraphSchedule s({{1.0, g1}, {2.0, g2}}, false);
  EXPECT_EQ(s.segment_index_at(100.0), 1u);
}

TEST(Schedule, RejectsBadSegments) {
  EXPECT_THROW(GraphSchedule({{0.0, GraphSnapshot(2)}}, true), Error);
  EXPECT_THROW(GraphSchedule({{1.0, GraphSnapshot(2)}, {1.0, GraphSnapshot(3)}}, true), Error);
}

TEST(JointConnectivity, StaticGraphs) {
  EXPECT_FALSE(check_assumption_tree(GraphSchedule::constant(path(4, {{0, 1}, {2, 3}})), 10.0));
  EXPECT_TRUE(check_assumption_tree(GraphSchedule::constant(path(4, {{0, 1}, {1, 2}, {2, 3}})), 10.0));
}

TEST(JointConnectivity, WindowMustCoverEnoughSegments) {
  const GraphSnapshot a = path(4, {{0, 1}});
  const GraphSnapshot b = path(4, {{1, 2}});
  const GraphSnapshot c = path(4, {{2, 3}});
  const GraphSchedule s({{10.0, a}, {10.0, b}, {10.0, c}}, true);
  EXPECT_FALSE(check_assumption_tree(s, 10.0));
  EXPECT_FALSE(check_assumption_tree(s, 20.0));
  EXPECT_TRUE(check_assumption_tree(s, 30.0));
  EXPECT_TRUE(check_assumption_tree(s, 60.0));
}

TEST(JointConnectivity, ThinnedScheduleHoldsAtFullWindow) {
  Rng rng(21);
  std::vector<Edge> base = scale_free_edges(100, 2, rng);
  for (Edge& e : base) e.weight = rng.uniform(0.0, 1.0);
  const GraphSchedule s = thinned_schedule(100, base, ThinningOptions{}, rng);
  ASSERT_EQ(s.segments().size(), 4u);
  for (const Segment& seg : s.segments()) EXPECT_FALSE(has_spanning_tree(seg.snapshot));
  EXPECT_TRUE(check_assumption_tree(s, 100.0));
  // Monotone in window at multiples of the aligned length.
  EXPECT_TRUE(check_assumption_tree(s, 200.0));
  EXPECT_TRUE(check_assumption_tree(s, 300.0));
}

TEST(JointConnectivity, MonotoneInWindow) {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Edge> base = scale_free_edges(20, 1, rng);
    ThinningOptions opts;
    opts.snapshots = 5;
    opts.segment_length = 1.0;
    opts.require_disconnected = false;
    const GraphSchedule s = thinned_schedule(20, base, opts, rng);
    bool seen = false;
    for (int w = 1; w <= 10; ++w) {
      const bool ok = check_assumption_tree(s, static_cast<double>(w));
      if (seen) {
        EXPECT_TRUE(ok) << "window " << w;
      }
      seen = seen || ok;
    }
  }
}

TEST(Generators, ScaleFreeIsConnectedWithExpectedEdgeCount) {
  Rng rng(8);
  const std::vector<Edge> e = scale_free_edges(50, 3, rng);
  EXPECT_EQ(e.size(), 6u + 3u * (50 - 4));
  EXPECT_TRUE(has_spanning_tree(GraphSnapshot::from_edges(50, e)));
}

TEST(Generators, SameSeedSameGraph) {
  Rng a(77);
  Rng b(77);
  EXPECT_EQ(cycle_graph(9, a, 0.0, 1.0), cycle_graph(9, b, 0.0, 1.0));
}

}  // namespace
}  // namespace resalloc
