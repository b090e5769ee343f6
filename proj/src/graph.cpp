#include "pdslide/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>

#include "pdslide/error.hpp"
#include "pdslide/rng.hpp"

namespace pdslide {

namespace {

constexpr int kErdosRenyiAttempts = 1000;

}  // namespace

bool is_connected(int node_count, const std::vector<Edge>& edges) {
  if (node_count <= 1) return node_count == 1;
  std::vector<std::vector<int>> adj(node_count);
  for (const auto& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<char> seen(node_count, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int i = frontier.front();
    frontier.pop();
    for (int j : adj[i]) {
      if (!seen[j]) {
        seen[j] = 1;
        ++reached;
        frontier.push(j);
      }
    }
  }
  return reached == node_count;
}

CommGraph::CommGraph(int node_count, std::vector<Edge> edges) : node_count_(node_count) {
  if (node_count < 1) throw ConfigError("graph needs at least one node");
  for (auto& e : edges) {
    if (e.u == e.v) throw ConfigError("graph edge (" + std::to_string(e.u + 1) + "," + std::to_string(e.v + 1) + ") is a self-loop; self-loops are implicit");
    if (e.u < 0 || e.v < 0 || e.u >= node_count || e.v >= node_count)
      throw ConfigError("graph edge endpoint out of range for m=" + std::to_string(node_count));
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw ConfigError("graph has duplicate edges");
  if (!is_connected(node_count, edges)) throw ConfigError("graph is not connected");
  edges_ = std::move(edges);

  std::vector<std::vector<int>> nbr(node_count);
  std::vector<std::vector<int>> inc(node_count);
  for (int i = 0; i < node_count; ++i) nbr[i].push_back(i);
  for (std::size_t id = 0; id < edges_.size(); ++id) {
    const auto& e = edges_[id];
    nbr[e.u].push_back(e.v);
    nbr[e.v].push_back(e.u);
    inc[e.u].push_back(static_cast<int>(id));
    inc[e.v].push_back(static_cast<int>(id));
  }
  nbr_offsets_.assign(1, 0);
  inc_offsets_.assign(1, 0);
  for (int i = 0; i < node_count; ++i) {
    std::sort(nbr[i].begin(), nbr[i].end());
    nbrs_.insert(nbrs_.end(), nbr[i].begin(), nbr[i].end());
    nbr_offsets_.push_back(static_cast<int>(nbrs_.size()));
    inc_.insert(inc_.end(), inc[i].begin(), inc[i].end());
    inc_offsets_.push_back(static_cast<int>(inc_.size()));
  }
}

std::span<const int> CommGraph::neighborhood(int i) const {
  return {nbrs_.data() + nbr_offsets_[i], nbrs_.data() + nbr_offsets_[i + 1]};
}

std::span<const int> CommGraph::incident_edges(int i) const {
  return {inc_.data() + inc_offsets_[i], inc_.data() + inc_offsets_[i + 1]};
}

int CommGraph::max_degree() const {
  int best = 0;
  for (int i = 0; i < node_count_; ++i) best = std::max(best, degree(i));
  return best;
}

bool CommGraph::adjacent(int i, int j) const {
  if (i < 0 || j < 0 || i >= node_count_ || j >= node_count_) return false;
  const auto n = neighborhood(i);
  return std::binary_search(n.begin(), n.end(), j);
}

double CommGraph::laplacian_entry(int i, int j) const {
  if (i == j) return static_cast<double>(degree(i));
  return adjacent(i, j) ? -1.0 : 0.0;
}

CommGraph erdos_renyi(int m, double edge_prob, std::uint64_t seed) {
  if (m < 2) throw ConfigError("erdos_renyi: m must be >= 2");
  if (!(edge_prob > 0.0 && edge_prob <= 1.0)) throw ConfigError("erdos_renyi: edge_prob must lie in (0, 1]");
  for (int attempt = 0; attempt < kErdosRenyiAttempts; ++attempt) {
    std::mt19937_64 gen(hash_key(seed, static_cast<std::uint64_t>(attempt)));
    std::bernoulli_distribution coin(edge_prob);
    std::vector<Edge> edges;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (coin(gen)) edges.push_back({i, j});
    if (is_connected(m, edges)) return CommGraph(m, std::move(edges));
  }
  std::ostringstream msg;
  msg << "erdos_renyi: no connected graph after " << kErdosRenyiAttempts << " attempts (m=" << m
      << ", edge_prob=" << edge_prob << ", seed=" << seed << ")";
  throw ConfigError(msg.str());
}

GraphKind parse_graph_kind(std::string_view name) {
  if (name == "path") return GraphKind::path;
  if (name == "star") return GraphKind::star;
  if (name == "complete") return GraphKind::complete;
  if (name == "cycle") return GraphKind::cycle;
  throw ConfigError("unknown graph kind '" + std::string(name) + "'");
}

std::string_view to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::path: return "path";
    case GraphKind::star: return "star";
    case GraphKind::complete: return "complete";
    case GraphKind::cycle: return "cycle";
  }
  return "?";
}

CommGraph named_graph(GraphKind kind, int m) {
  if (m < 2) throw ConfigError("named_graph: m must be >= 2");
  std::vector<Edge> edges;
  switch (kind) {
    case GraphKind::path:
      for (int i = 0; i + 1 < m; ++i) edges.push_back({i, i + 1});
      break;
    case GraphKind::star:
      for (int i = 1; i < m; ++i) edges.push_back({0, i});
      break;
    case GraphKind::complete:
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) edges.push_back({i, j});
      break;
    case GraphKind::cycle:
      for (int i = 0; i + 1 < m; ++i) edges.push_back({i, i + 1});
      if (m > 2) edges.push_back({0, m - 1});
      break;
  }
  return CommGraph(m, std::move(edges));
}

void write_edge_list(std::ostream& out, const CommGraph& g) {
  out << "m " << g.node_count() << '\n';
  for (const auto& e : g.edges()) out << e.u + 1 << ' ' << e.v + 1 << '\n';
}

CommGraph read_edge_list(std::istream& in) {
  std::string line;
  int line_no = 0;
  int m = -1;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;  // blank
    if (first[0] == '#') continue;
    if (m < 0) {
      if (first != "m" || !(fields >> m) || m < 1)
        throw ConfigError("edge list line " + std::to_string(line_no) + ": expected header 'm <count>'");
      continue;
    }
    int i = 0;
    int j = 0;
    std::string extra;
    std::istringstream pair(line);
    if (!(pair >> i >> j) || (pair >> extra))
      throw ConfigError("edge list line " + std::to_string(line_no) + ": expected 'i j'");
    if (i < 1 || j < 1 || i > m || j > m)
      throw ConfigError("edge list line " + std::to_string(line_no) + ": node id out of range 1.." + std::to_string(m));
    edges.push_back({i - 1, j - 1});
  }
  if (m < 0) throw ConfigError("edge list: missing header 'm <count>'");
  return CommGraph(m, std::move(edges));
}

CommGraph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open edge list '" + path + "'");
  return read_edge_list(in);
}

void save_edge_list(const std::string& path, const CommGraph& g) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write edge list '" + path + "'");
  write_edge_list(out, g);
}

}  // namespace pdslide
