#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace hsmix {

using EdgeMask = std::uint64_t;
using VertexMask = std::uint32_t;

// Edges are stored as bits; pair {i, j} with i < j sits at j(j-1)/2 + i, which
// keeps the layout independent of the vertex count.
constexpr int pair_index(int i, int j) { return i < j ? j * (j - 1) / 2 + i : i * (i - 1) / 2 + j; }
constexpr int pair_count(int n) { return n * (n - 1) / 2; }
constexpr int kMaxGraphVertices = 11;

// Vertex tags: 'B' big, 'S' small, 'W' small linked to a big, 'C' cloud.
struct ColoredGraph {
  int n = 0;
  std::string colors;
  EdgeMask edges = 0;

  bool has_edge(int i, int j) const { return (edges >> pair_index(i, j)) & 1ULL; }
  int edge_count() const;
  VertexMask neighbors(int v) const;
  VertexMask white_set() const;
  std::vector<std::pair<int, int>> edge_list() const;
  std::string to_text() const;
  static ColoredGraph from_edges(int n, const std::vector<std::pair<int, int>>& e,
                                 std::string colors = {});
};

// Big-vertex neighbourhoods of the cloud vertices, one mask per cloud.
struct Hyperedges {
  std::vector<VertexMask> sets;
};

struct GraphLimits {
  int max_vertices = 7;
  int max_bipartite = 8;
};

bool is_connected(int n, EdgeMask edges, VertexMask vertices);
bool is_connected(const ColoredGraph& g);

VertexMask cut_points(const ColoredGraph& g);
// Vertices whose removal splits g into pieces at least one of which holds no white vertex.
VertexMask articulation_vertices(const ColoredGraph& g, VertexMask white);

void visit_connected(int n, const std::function<void(EdgeMask)>& fn, const GraphLimits& lim = {});
std::vector<ColoredGraph> enum_connected(int n, const GraphLimits& lim = {});
std::vector<ColoredGraph> enum_two_connected(int n, const GraphLimits& lim = {});
std::vector<ColoredGraph> enum_spanning_trees(int n, const GraphLimits& lim = {});

// Graphs on m big vertices (0..m-1) and k cloud vertices (m..m+k-1): no
// cloud-cloud edges, every cloud joined to at least two big vertices.
std::vector<ColoredGraph> enum_bipartite_star(int m, int k, bool connected_only,
                                              const GraphLimits& lim = {});
// Connected members of the class above in which no big vertex is a cut point.
std::vector<std::pair<ColoredGraph, Hyperedges>> enum_big_two_connected(int n, int k,
                                                                         const GraphLimits& lim = {});
// Connected graphs on `white` white vertices (0..white-1) and `black` further
// small vertices with no articulation vertex.
std::vector<ColoredGraph> enum_articulation_free(int white, int black, const GraphLimits& lim = {});

// Brute-force reference counts over all edge subsets.
std::int64_t brute_count_connected(int n);
std::int64_t brute_count_two_connected(int n);

// For a fixed graph family on n vertices, table[O] = sum over members whose
// edge set lies inside O of weight(g), with weight (-1)^{|E|} when signed and
// 1 otherwise. With hard-core bonds and O the overlap graph this is the
// per-configuration value of sum_g prod_{e in g} f_e (or prod |f_e|).
class GraphSumTable {
 public:
  GraphSumTable() = default;
  GraphSumTable(int n, const std::vector<ColoredGraph>& graphs, bool signed_weights = true);
  double operator()(EdgeMask overlap) const { return static_cast<double>(table_[overlap]); }
  int vertices() const { return n_; }
  std::size_t family_size() const { return size_; }

 private:
  int n_ = 0;
  std::size_t size_ = 0;
  std::vector<std::int64_t> table_;
};

}  // namespace hsmix
