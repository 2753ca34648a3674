#pragma once

// Labeled graphs on white (root) vertices x1..xm followed by black vertices
// y1..yn, and the rooted family D(eta; gamma) whose weighted sum represents
// the kernels T(eta|gamma).

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "virial/error.hpp"

namespace virial::graph {

/// Edge sets are bitmasks over vertex pairs in colex order:
/// pair (i, j), i < j, has index j(j-1)/2 + i, independent of the vertex count.
using EdgeMask = std::uint64_t;
using VertexMask = std::uint32_t;

inline constexpr int kMaxVertices = 11;         // 55 pairs fit a 64-bit mask
inline constexpr int kDefaultEnumerationCap = 9;

constexpr int pair_index(int i, int j) {
  if (i > j) std::swap(i, j);
  return j * (j - 1) / 2 + i;
}

constexpr EdgeMask edge_bit(int i, int j) { return EdgeMask{1} << pair_index(i, j); }

inline std::pair<int, int> pair_from_index(int k) {
  int j = 1;
  while ((j + 1) * j / 2 <= k) ++j;
  return {k - j * (j - 1) / 2, j};
}

enum class EdgeRule { any, no_white_white };

/// Reading of "2-connected with respect to gamma" used by the D-family predicate.
///   rooted:   deleting any single vertex leaves every component with a white
///             vertex (white vertices may be cut points, isolated whites allowed).
///   standard: every component that contains a black vertex is 2-connected in
///             the usual sense, white vertices treated as ordinary vertices.
/// Only the rooted reading reproduces the kernel recurrence.
enum class DReading { rooted, standard };

struct LabeledGraph {
  int white = 0;
  int black = 0;
  EdgeMask edges = 0;

  int vertex_count() const { return white + black; }
  bool is_white(int v) const { return v < white; }
  VertexMask white_mask() const { return (VertexMask{1} << white) - 1; }
  VertexMask all_mask() const { return (VertexMask{1} << vertex_count()) - 1; }

  bool has_edge(int i, int j) const { return (edges & edge_bit(i, j)) != 0; }

  /// Canonical form: sorted (i < j) pairs in lexicographic order.
  std::vector<std::pair<int, int>> edge_list() const {
    std::vector<std::pair<int, int>> out;
    for (EdgeMask e = edges; e; e &= e - 1) out.push_back(pair_from_index(std::countr_zero(e)));
    std::sort(out.begin(), out.end());
    return out;
  }

  std::string label(int v) const {
    return is_white(v) ? "x" + std::to_string(v + 1) : "y" + std::to_string(v - white + 1);
  }

  std::vector<VertexMask> adjacency() const {
    std::vector<VertexMask> adj(vertex_count(), 0);
    for (EdgeMask e = edges; e; e &= e - 1) {
      auto [i, j] = pair_from_index(std::countr_zero(e));
      adj[i] |= VertexMask{1} << j;
      adj[j] |= VertexMask{1} << i;
    }
    return adj;
  }

  int degree(int v) const {
    int d = 0;
    for (int u = 0; u < vertex_count(); ++u)
      if (u != v && has_edge(u, v)) ++d;
    return d;
  }

  friend bool operator==(const LabeledGraph&, const LabeledGraph&) = default;
};

/// Connected components of the subgraph induced on `alive`.
inline std::vector<VertexMask> components(const std::vector<VertexMask>& adj, VertexMask alive) {
  std::vector<VertexMask> out;
  VertexMask left = alive;
  while (left) {
    VertexMask comp = left & (~left + 1);
    VertexMask frontier = comp;
    while (frontier) {
      VertexMask next = 0;
      for (VertexMask f = frontier; f; f &= f - 1) next |= adj[std::countr_zero(f)];
      next &= alive & ~comp;
      comp |= next;
      frontier = next;
    }
    out.push_back(comp);
    left &= ~comp;
  }
  return out;
}

namespace detail {

inline void articulation_dfs(const std::vector<VertexMask>& adj, VertexMask alive, int v, int parent,
                             int& timer, std::vector<int>& disc, std::vector<int>& low, bool& found) {
  disc[v] = low[v] = ++timer;
  int children = 0;
  for (VertexMask nb = adj[v] & alive; nb; nb &= nb - 1) {
    const int u = std::countr_zero(nb);
    if (u == parent) continue;
    if (disc[u]) {
      low[v] = std::min(low[v], disc[u]);
      continue;
    }
    ++children;
    articulation_dfs(adj, alive, u, v, timer, disc, low, found);
    low[v] = std::min(low[v], low[u]);
    if (parent >= 0 && low[u] >= disc[v]) found = true;
  }
  if (parent < 0 && children > 1) found = true;
}

}  // namespace detail

/// True iff the vertices in `alive` induce a 2-connected graph: connected and
/// free of articulation vertices. K1 counts as 2-connected, K2 does not.
inline bool is_biconnected(const std::vector<VertexMask>& adj, VertexMask alive) {
  const int n = std::popcount(alive);
  if (n == 0) throw DomainError("is_biconnected: empty graph");
  if (n == 1) return true;
  if (n == 2) return false;
  std::vector<int> disc(adj.size(), 0), low(adj.size(), 0);
  int timer = 0;
  bool found = false;
  detail::articulation_dfs(adj, alive, std::countr_zero(alive), -1, timer, disc, low, found);
  for (VertexMask a = alive; a; a &= a - 1)
    if (!disc[std::countr_zero(a)]) return false;  // disconnected
  return !found;
}

inline bool is_biconnected(const LabeledGraph& g) { return is_biconnected(g.adjacency(), g.all_mask()); }

inline bool has_white_white_edge(const LabeledGraph& g) {
  for (int i = 0; i < g.white; ++i)
    for (int j = i + 1; j < g.white; ++j)
      if (g.has_edge(i, j)) return true;
  return false;
}

/// Membership in D(eta; gamma).
inline bool is_member_D(const LabeledGraph& g, DReading reading = DReading::rooted) {
  if (has_white_white_edge(g)) return false;
  for (int v = g.white; v < g.vertex_count(); ++v)
    if (g.degree(v) < 2) return false;
  const auto adj = g.adjacency();
  const VertexMask all = g.all_mask();
  const VertexMask whites = g.white_mask();

  if (reading == DReading::standard) {
    for (VertexMask comp : components(adj, all))
      if ((comp & ~whites) && !is_biconnected(adj, comp)) return false;
    return true;
  }

  for (VertexMask comp : components(adj, all))
    if (!(comp & whites)) return false;
  for (int v = 0; v < g.vertex_count(); ++v) {
    const VertexMask alive = all & ~(VertexMask{1} << v);
    for (VertexMask comp : components(adj, alive))
      if (!(comp & whites)) return false;
  }
  return true;
}

/// Vertex pairs permitted by the rule, in lexicographic order.
inline std::vector<std::pair<int, int>> allowed_pairs(int white, int black, EdgeRule rule) {
  std::vector<std::pair<int, int>> out;
  const int v = white + black;
  for (int i = 0; i < v; ++i)
    for (int j = i + 1; j < v; ++j)
      if (rule == EdgeRule::any || !(i < white && j < white)) out.emplace_back(i, j);
  return out;
}

inline void check_cap(int white, int black, int cap) {
  if (white < 0 || black < 0) throw DomainError("graph enumeration: negative vertex count");
  if (white + black > cap)
    throw CapExceeded("graph enumeration: " + std::to_string(white + black) + " vertices exceeds cap " +
                      std::to_string(cap));
  if (white + black > kMaxVertices) throw CapExceeded("graph enumeration: edge mask supports at most 11 vertices");
}

/// Streams every graph obeying the rule, in lexicographic order of canonical
/// edge lists (a list precedes its extensions). Nothing is materialized.
inline void for_each_graph(int white, int black, EdgeRule rule, const std::function<void(const LabeledGraph&)>& fn,
                           int cap = kDefaultEnumerationCap) {
  check_cap(white, black, cap);
  const auto pairs = allowed_pairs(white, black, rule);
  LabeledGraph g{white, black, 0};
  std::function<void(std::size_t)> visit = [&](std::size_t start) {
    fn(g);
    for (std::size_t k = start; k < pairs.size(); ++k) {
      const EdgeMask bit = edge_bit(pairs[k].first, pairs[k].second);
      g.edges |= bit;
      visit(k + 1);
      g.edges &= ~bit;
    }
  };
  visit(0);
}

struct GraphFamily {
  int white = 0;
  int black = 0;
  std::vector<LabeledGraph> members;

  std::size_t size() const { return members.size(); }
  bool empty() const { return members.empty(); }
};

/// Materializing families beyond this many candidates is refused; stream with
/// for_each_graph instead.
inline constexpr int kMaxMaterializedPairs = 26;

inline GraphFamily enumerate_graphs(int white, int black, EdgeRule rule, int cap = kDefaultEnumerationCap) {
  check_cap(white, black, cap);
  if (allowed_pairs(white, black, rule).size() > kMaxMaterializedPairs)
    throw CapExceeded("enumerate_graphs: family too large to materialize; use for_each_graph");
  GraphFamily fam{white, black, {}};
  for_each_graph(white, black, rule, [&](const LabeledGraph& g) { fam.members.push_back(g); }, cap);
  return fam;
}

inline GraphFamily enumerate_D(int white, int black, DReading reading = DReading::rooted,
                               int cap = kDefaultEnumerationCap) {
  GraphFamily fam{white, black, {}};
  for_each_graph(
      white, black, EdgeRule::no_white_white,
      [&](const LabeledGraph& g) {
        if (is_member_D(g, reading)) fam.members.push_back(g);
      },
      cap);
  return fam;
}

}  // namespace virial::graph
