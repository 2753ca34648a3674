#include <gtest/gtest.h>

#include <random>
#include <set>

#include "virial/graph.hpp"

using namespace virial;
using namespace virial::graph;

namespace {

// Breadth-first connectivity on an explicit adjacency matrix.
std::vector<std::vector<int>> comps(const std::vector<std::vector<bool>>& adj, const std::vector<bool>& alive) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> seen(n, 0);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < n; ++s) {
    if (!alive[s] || seen[s]) continue;
    std::vector<int> comp{s}, stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int u = 0; u < n; ++u)
        if (alive[u] && !seen[u] && adj[v][u]) {
          seen[u] = 1;
          comp.push_back(u);
          stack.push_back(u);
        }
    }
    out.push_back(comp);
  }
  return out;
}

std::vector<std::vector<bool>> matrix(const LabeledGraph& g) {
  const int n = g.vertex_count();
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (auto [i, j] : g.edge_list()) adj[i][j] = adj[j][i] = true;
  return adj;
}

bool naive_biconnected(const LabeledGraph& g) {
  const int n = g.vertex_count();
  if (n < 3) return n == 1;
  const auto adj = matrix(g);
  std::vector<bool> alive(n, true);
  if (comps(adj, alive).size() != 1) return false;
  for (int v = 0; v < n; ++v) {
    alive[v] = false;
    if (comps(adj, alive).size() != 1) return false;
    alive[v] = true;
  }
  return true;
}

bool naive_rooted_member(const LabeledGraph& g) {
  const int n = g.vertex_count();
  const auto adj = matrix(g);
  for (int i = 0; i < g.white; ++i)
    for (int j = 0; j < g.white; ++j)
      if (adj[i][j]) return false;
  for (int drop = -1; drop < n; ++drop) {
    std::vector<bool> alive(n, true);
    if (drop >= 0) alive[drop] = false;
    for (const auto& c : comps(adj, alive)) {
      bool white = false;
      for (int v : c) white |= v < g.white;
      if (!white) return false;
    }
  }
  return true;
}

std::set<EdgeMask> naive_family(int m, int n) {
  std::set<EdgeMask> out;
  const int v = m + n;
  const int pairs = v * (v - 1) / 2;
  for (EdgeMask e = 0; e < (EdgeMask{1} << pairs); ++e) {
    LabeledGraph g{m, n, e};
    if (naive_rooted_member(g)) out.insert(e);
  }
  return out;
}

}  // namespace

TEST(Enumerate, Counts) {
  EXPECT_EQ(enumerate_graphs(0, 2, EdgeRule::any).size(), 2u);
  EXPECT_EQ(enumerate_graphs(1, 1, EdgeRule::no_white_white).size(), 2u);
  EXPECT_EQ(enumerate_graphs(2, 2, EdgeRule::no_white_white).size(), 32u);
  for (int m = 0; m <= 3; ++m)
    for (int n = 0; m + n <= 5; ++n) {
      const int v = m + n, ww = m * (m - 1) / 2;
      EXPECT_EQ(enumerate_graphs(m, n, EdgeRule::any).size(), std::size_t{1} << (v * (v - 1) / 2));
      EXPECT_EQ(enumerate_graphs(m, n, EdgeRule::no_white_white).size(), std::size_t{1} << (v * (v - 1) / 2 - ww));
    }
}

TEST(Enumerate, LexicographicAndDeterministic) {
  std::vector<std::vector<std::pair<int, int>>> a, b;
  for_each_graph(2, 2, EdgeRule::no_white_white, [&](const LabeledGraph& g) { a.push_back(g.edge_list()); });
  for_each_graph(2, 2, EdgeRule::no_white_white, [&](const LabeledGraph& g) { b.push_back(g.edge_list()); });
  EXPECT_EQ(a, b);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
}

TEST(Enumerate, CapExceeded) {
  EXPECT_THROW(enumerate_graphs(3, 4, EdgeRule::any, 6), CapExceeded);
  EXPECT_THROW(enumerate_D(5, 5, DReading::rooted), CapExceeded);
}

TEST(Biconnected, Examples) {
  LabeledGraph tri{0, 3, edge_bit(0, 1) | edge_bit(1, 2) | edge_bit(0, 2)};
  LabeledGraph path{0, 3, edge_bit(0, 1) | edge_bit(1, 2)};
  EXPECT_TRUE(is_biconnected(tri));
  EXPECT_FALSE(is_biconnected(path));
  EXPECT_TRUE(is_biconnected(LabeledGraph{0, 1, 0}));
  EXPECT_FALSE(is_biconnected(LabeledGraph{0, 2, edge_bit(0, 1)}));
  EXPECT_THROW(is_biconnected(LabeledGraph{0, 0, 0}), DomainError);
}

TEST(Biconnected, FourVerticesCount) {
  int count = 0;
  for_each_graph(0, 4, EdgeRule::any, [&](const LabeledGraph& g) { count += is_biconnected(g); });
  EXPECT_EQ(count, 10);
}

TEST(Biconnected, AgreesWithVertexDeletion) {
  for (int n = 1; n <= 6; ++n)
    for_each_graph(0, n, EdgeRule::any, [&](const LabeledGraph& g) { ASSERT_EQ(is_biconnected(g), naive_biconnected(g)); });
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<EdgeMask> edges(0, (EdgeMask{1} << 21) - 1);
  for (int t = 0; t < 3000; ++t) {
    LabeledGraph g{0, 7, edges(rng)};
    ASSERT_EQ(is_biconnected(g), naive_biconnected(g));
  }
}

TEST(MemberD, Examples) {
  EXPECT_TRUE(is_member_D(LabeledGraph{1, 0, 0}));
  EXPECT_FALSE(is_member_D(LabeledGraph{1, 1, edge_bit(0, 1)}));
  LabeledGraph tri{1, 2, edge_bit(0, 1) | edge_bit(1, 2) | edge_bit(0, 2)};
  EXPECT_TRUE(is_member_D(tri, DReading::standard));
  EXPECT_FALSE(is_member_D(tri, DReading::rooted));
  EXPECT_FALSE(is_member_D(LabeledGraph{2, 0, edge_bit(0, 1)}));
}

TEST(FamilyD, SmallSizes) {
  EXPECT_EQ(enumerate_D(1, 0).size(), 1u);
  EXPECT_EQ(enumerate_D(1, 1).size(), 0u);
  EXPECT_EQ(enumerate_D(1, 2, DReading::rooted).size(), 0u);
  EXPECT_EQ(enumerate_D(1, 2, DReading::standard).size(), 1u);
}

TEST(FamilyD, MatchesBruteForce) {
  for (int m = 1; m <= 3; ++m)
    for (int n = 0; m + n <= 6; ++n) {
      std::set<EdgeMask> got;
      for (const auto& g : enumerate_D(m, n).members) got.insert(g.edges);
      EXPECT_EQ(got, naive_family(m, n)) << "m=" << m << " n=" << n;
    }
}

TEST(FamilyD, Invariants) {
  for (int m = 1; m <= 3; ++m)
    for (int n = 0; m + n <= 6; ++n)
      for (const auto& g : enumerate_D(m, n).members) {
        for (int v = g.white; v < g.vertex_count(); ++v) EXPECT_GE(g.degree(v), 2);
        for (int i = 0; i < g.white; ++i)
          for (int j = i + 1; j < g.white; ++j) EXPECT_FALSE(g.has_edge(i, j));
      }
}
