#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pdslide {

/// Undirected edge stored with u < v (0-indexed).
struct Edge {
  int u = 0;
  int v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Connected undirected communication graph.
///
/// Node ids are 0-indexed in memory; the text format is 1-indexed. Every
/// neighborhood N_i contains i itself (self-loop convention), so the degree
/// of i is |N_i| - 1.
class CommGraph {
 public:
  /// Validates and canonicalizes the edge set. Throws ConfigError on
  /// self-edges, out-of-range ids, duplicates, or a disconnected graph.
  CommGraph(int node_count, std::vector<Edge> edges);

  int node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }

  /// N_i in ascending order, including i.
  std::span<const int> neighborhood(int i) const;
  /// Edge ids touching i, ascending.
  std::span<const int> incident_edges(int i) const;

  int degree(int i) const { return static_cast<int>(neighborhood(i).size()) - 1; }
  int max_degree() const;

  /// True for graph edges and for self-loops (i, i).
  bool adjacent(int i, int j) const;

  /// Laplacian entry L(i, j): degree on the diagonal, -1 on edges.
  double laplacian_entry(int i, int j) const;

 private:
  int node_count_;
  std::vector<Edge> edges_;
  std::vector<int> nbr_offsets_;
  std::vector<int> nbrs_;
  std::vector<int> inc_offsets_;
  std::vector<int> inc_;
};

/// BFS from node 0.
bool is_connected(int node_count, const std::vector<Edge>& edges);

/// G(m, p) with retries until connected; reproducible from (m, p, seed).
CommGraph erdos_renyi(int m, double edge_prob, std::uint64_t seed);

enum class GraphKind { path, star, complete, cycle };

GraphKind parse_graph_kind(std::string_view name);
std::string_view to_string(GraphKind kind);

CommGraph named_graph(GraphKind kind, int m);

/// Edge-list text: header `m <count>`, then one 1-indexed `i j` per line.
void write_edge_list(std::ostream& out, const CommGraph& g);
CommGraph read_edge_list(std::istream& in);
CommGraph load_edge_list(const std::string& path);
void save_edge_list(const std::string& path, const CommGraph& g);

}  // namespace pdslide
