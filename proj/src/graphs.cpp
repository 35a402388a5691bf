#include "hsmix/graphs.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "hsmix/error.hpp"

namespace hsmix {

namespace {

std::vector<VertexMask> adjacency(int n, EdgeMask edges) {
  std::vector<VertexMask> adj(static_cast<std::size_t>(n), 0);
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if ((edges >> pair_index(i, j)) & 1ULL) {
        adj[i] |= VertexMask{1} << j;
        adj[j] |= VertexMask{1} << i;
      }
  return adj;
}

VertexMask reach(const std::vector<VertexMask>& adj, VertexMask allowed, int start) {
  VertexMask seen = VertexMask{1} << start, frontier = seen;
  while (frontier) {
    VertexMask next = 0;
    for (VertexMask f = frontier; f; f &= f - 1) next |= adj[std::countr_zero(f)];
    next &= allowed & ~seen;
    seen |= next;
    frontier = next;
  }
  return seen;
}

// Connected components of the subgraph induced on `allowed`.
std::vector<VertexMask> components(const std::vector<VertexMask>& adj, VertexMask allowed) {
  std::vector<VertexMask> out;
  VertexMask left = allowed;
  while (left) {
    VertexMask c = reach(adj, allowed, std::countr_zero(left));
    out.push_back(c);
    left &= ~c;
  }
  return out;
}

VertexMask all_vertices(int n) { return n >= 32 ? ~VertexMask{0} : (VertexMask{1} << n) - 1; }

void check_size(int n, int cap, const char* what) {
  if (n < 1) throw invalid_argument(std::string(what) + ": vertex count must be >= 1");
  if (n > cap || n > kMaxGraphVertices)
    throw resource_limit(std::string(what) + ": " + std::to_string(n) + " vertices exceeds cap " +
                         std::to_string(std::min(cap, kMaxGraphVertices)));
}

EdgeMask full_mask(int n) {
  int p = pair_count(n);
  return p >= 64 ? ~EdgeMask{0} : (EdgeMask{1} << p) - 1;
}

bool no_cut_point(int n, EdgeMask e, VertexMask candidates) {
  auto adj = adjacency(n, e);
  VertexMask all = all_vertices(n);
  for (VertexMask c = candidates; c; c &= c - 1) {
    int v = std::countr_zero(c);
    VertexMask rest = all & ~(VertexMask{1} << v);
    if (rest && reach(adj, rest, std::countr_zero(rest)) != rest) return false;
  }
  return true;
}

}  // namespace

int ColoredGraph::edge_count() const { return std::popcount(edges); }

VertexMask ColoredGraph::neighbors(int v) const {
  VertexMask out = 0;
  for (int u = 0; u < n; ++u)
    if (u != v && has_edge(u, v)) out |= VertexMask{1} << u;
  return out;
}

VertexMask ColoredGraph::white_set() const {
  VertexMask w = 0;
  for (int v = 0; v < n; ++v)
    if (colors[static_cast<std::size_t>(v)] == 'W') w |= VertexMask{1} << v;
  return w;
}

std::vector<std::pair<int, int>> ColoredGraph::edge_list() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (has_edge(i, j)) out.emplace_back(i, j);
  return out;
}

std::string ColoredGraph::to_text() const {
  std::ostringstream os;
  os << n << ' ' << colors;
  for (auto [i, j] : edge_list()) os << ' ' << i << '-' << j;
  return os.str();
}

ColoredGraph ColoredGraph::from_edges(int n, const std::vector<std::pair<int, int>>& e,
                                      std::string colors) {
  ColoredGraph g;
  g.n = n;
  g.colors = colors.empty() ? std::string(static_cast<std::size_t>(n), 'S') : std::move(colors);
  if (static_cast<int>(g.colors.size()) != n) throw invalid_argument("color string length mismatch");
  for (auto [i, j] : e) {
    if (i == j || i < 0 || j < 0 || i >= n || j >= n) throw invalid_argument("bad edge");
    g.edges |= EdgeMask{1} << pair_index(i, j);
  }
  return g;
}

bool is_connected(int n, EdgeMask edges, VertexMask vertices) {
  if (!vertices) return true;
  auto adj = adjacency(n, edges);
  return reach(adj, vertices, std::countr_zero(vertices)) == vertices;
}

bool is_connected(const ColoredGraph& g) { return is_connected(g.n, g.edges, all_vertices(g.n)); }

VertexMask cut_points(const ColoredGraph& g) {
  if (!is_connected(g)) throw invalid_argument("cut_points: graph is disconnected");
  auto adj = adjacency(g.n, g.edges);
  VertexMask all = all_vertices(g.n), out = 0;
  for (int v = 0; v < g.n; ++v) {
    VertexMask rest = all & ~(VertexMask{1} << v);
    if (rest && reach(adj, rest, std::countr_zero(rest)) != rest) out |= VertexMask{1} << v;
  }
  return out;
}

VertexMask articulation_vertices(const ColoredGraph& g, VertexMask white) {
  if (!is_connected(g)) throw invalid_argument("articulation_vertices: graph is disconnected");
  auto adj = adjacency(g.n, g.edges);
  VertexMask all = all_vertices(g.n), out = 0;
  for (int v = 0; v < g.n; ++v) {
    auto pieces = components(adj, all & ~(VertexMask{1} << v));
    if (pieces.size() < 2) continue;
    for (VertexMask c : pieces)
      if (!(c & white)) {
        out |= VertexMask{1} << v;
        break;
      }
  }
  return out;
}

void visit_connected(int n, const std::function<void(EdgeMask)>& fn, const GraphLimits& lim) {
  check_size(n, lim.max_vertices, "enum_connected");
  if (n == 1) {
    fn(0);
    return;
  }
  VertexMask all = all_vertices(n);
  EdgeMask top = full_mask(n);
  for (EdgeMask e = 0;; ++e) {
    // n - 1 edges are needed before a spanning connection is possible.
    if (std::popcount(e) >= n - 1 && is_connected(n, e, all)) fn(e);
    if (e == top) break;
  }
}

std::vector<ColoredGraph> enum_connected(int n, const GraphLimits& lim) {
  std::vector<ColoredGraph> out;
  std::string colors(static_cast<std::size_t>(std::max(n, 0)), 'S');
  visit_connected(n, [&](EdgeMask e) { out.push_back({n, colors, e}); }, lim);
  return out;
}

std::vector<ColoredGraph> enum_two_connected(int n, const GraphLimits& lim) {
  if (n < 2) throw invalid_argument("enum_two_connected requires n >= 2");
  std::vector<ColoredGraph> out;
  std::string colors(static_cast<std::size_t>(n), 'S');
  VertexMask all = all_vertices(n);
  visit_connected(n, [&](EdgeMask e) {
    if (no_cut_point(n, e, all)) out.push_back({n, colors, e});
  }, lim);
  return out;
}

std::vector<ColoredGraph> enum_spanning_trees(int n, const GraphLimits& lim) {
  std::vector<ColoredGraph> out;
  std::string colors(static_cast<std::size_t>(n), 'S');
  visit_connected(n, [&](EdgeMask e) {
    if (std::popcount(e) == n - 1) out.push_back({n, colors, e});
  }, lim);
  return out;
}

std::vector<ColoredGraph> enum_bipartite_star(int m, int k, bool connected_only,
                                              const GraphLimits& lim) {
  if (m < 0 || k < 0 || m + k < 1) throw invalid_argument("enum_bipartite_star: need m + k >= 1");
  check_size(m + k, lim.max_bipartite, "enum_bipartite_star");
  const int n = m + k;
  std::string colors = std::string(static_cast<std::size_t>(m), 'B') + std::string(static_cast<std::size_t>(k), 'C');
  std::vector<VertexMask> hood;  // admissible big neighbourhoods of one cloud
  for (VertexMask s = 0; s < (VertexMask{1} << m); ++s)
    if (std::popcount(s) >= 2) hood.push_back(s);
  std::vector<ColoredGraph> out;
  if (k > 0 && hood.empty()) return out;
  EdgeMask big_top = full_mask(m);
  VertexMask all = all_vertices(n);
  std::vector<std::size_t> pick(static_cast<std::size_t>(k), 0);
  for (EdgeMask bb = 0;; ++bb) {
    std::fill(pick.begin(), pick.end(), 0);
    while (true) {
      EdgeMask e = bb;
      for (int c = 0; c < k; ++c)
        for (VertexMask s = hood[pick[c]]; s; s &= s - 1)
          e |= EdgeMask{1} << pair_index(std::countr_zero(s), m + c);
      if (!connected_only || is_connected(n, e, all)) out.push_back({n, colors, e});
      int c = 0;
      while (c < k && ++pick[c] == hood.size()) pick[c++] = 0;
      if (c == k) break;
    }
    if (bb == big_top) break;
  }
  return out;
}

std::vector<std::pair<ColoredGraph, Hyperedges>> enum_big_two_connected(int n, int k,
                                                                         const GraphLimits& lim) {
  if (!(n >= 2 || (n >= 1 && k >= 1))) throw invalid_argument("enum_big_two_connected: need n >= 2 or k >= 1");
  std::vector<std::pair<ColoredGraph, Hyperedges>> out;
  VertexMask bigs = all_vertices(n);
  for (auto& g : enum_bipartite_star(n, k, true, lim)) {
    if (!no_cut_point(g.n, g.edges, bigs)) continue;
    Hyperedges h;
    for (int c = 0; c < k; ++c) h.sets.push_back(g.neighbors(n + c) & bigs);
    out.emplace_back(std::move(g), std::move(h));
  }
  return out;
}

std::vector<ColoredGraph> enum_articulation_free(int white, int black, const GraphLimits& lim) {
  if (white < 1 || black < 0) throw invalid_argument("enum_articulation_free: need white >= 1");
  const int n = white + black;
  std::string colors = std::string(static_cast<std::size_t>(white), 'W') + std::string(static_cast<std::size_t>(black), 'S');
  VertexMask w = all_vertices(white);
  std::vector<ColoredGraph> out;
  visit_connected(n, [&](EdgeMask e) {
    ColoredGraph g{n, colors, e};
    if (articulation_vertices(g, w) == 0) out.push_back(std::move(g));
  }, lim);
  return out;
}

std::int64_t brute_count_connected(int n) {
  std::int64_t count = 0;
  EdgeMask top = full_mask(n);
  for (EdgeMask e = 0;; ++e) {
    ColoredGraph g{n, std::string(static_cast<std::size_t>(n), 'S'), e};
    // Independent check: a graph is connected iff every vertex pair is joined by
    // a path, tested here by repeated squaring of the reachability relation.
    std::vector<VertexMask> r(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) r[v] = g.neighbors(v) | (VertexMask{1} << v);
    for (int it = 0; it < n; ++it)
      for (int v = 0; v < n; ++v)
        for (int u = 0; u < n; ++u)
          if (r[v] >> u & 1U) r[v] |= r[u];
    if (r[0] == all_vertices(n)) ++count;
    if (e == top) break;
  }
  return count;
}

std::int64_t brute_count_two_connected(int n) {
  std::int64_t count = 0;
  EdgeMask top = full_mask(n);
  for (EdgeMask e = 0;; ++e) {
    bool ok = true;
    // Connected, and still connected after deleting any single vertex.
    for (int drop = -1; drop < n && ok; ++drop) {
      VertexMask keep = all_vertices(n);
      if (drop >= 0) keep &= ~(VertexMask{1} << drop);
      if (!keep) continue;
      std::vector<VertexMask> r(static_cast<std::size_t>(n), 0);
      for (int v = 0; v < n; ++v) {
        if (!(keep >> v & 1U)) continue;
        r[v] = VertexMask{1} << v;
        for (int u = 0; u < n; ++u)
          if (u != v && (keep >> u & 1U) && ((e >> pair_index(u, v)) & 1ULL)) r[v] |= VertexMask{1} << u;
      }
      for (int it = 0; it < n; ++it)
        for (int v = 0; v < n; ++v)
          for (int u = 0; u < n; ++u)
            if (r[v] >> u & 1U) r[v] |= r[u];
      int first = std::countr_zero(keep);
      ok = r[first] == keep;
    }
    if (ok) ++count;
    if (e == top) break;
  }
  return count;
}

GraphSumTable::GraphSumTable(int n, const std::vector<ColoredGraph>& graphs, bool signed_weights)
    : n_(n), size_(graphs.size()) {
  int p = pair_count(n);
  if (p > 24) throw resource_limit("GraphSumTable: too many vertex pairs");
  table_.assign(std::size_t{1} << p, 0);
  for (const auto& g : graphs) {
    if (g.n != n) throw invalid_argument("GraphSumTable: vertex count mismatch");
    table_[g.edges] += signed_weights && (std::popcount(g.edges) & 1) ? -1 : 1;
  }
  // Subset-sum transform: table[O] = sum of entries at subsets of O.
  for (int b = 0; b < p; ++b) {
    std::size_t bit = std::size_t{1} << b;
    for (std::size_t m = 0; m < table_.size(); ++m)
      if (m & bit) table_[m] += table_[m ^ bit];
  }
}

}  // namespace hsmix
