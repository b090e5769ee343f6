#include <gtest/gtest.h>

#include <sstream>

#include "pdslide/error.hpp"
#include "pdslide/graph.hpp"
#include "support/oracles.hpp"

using namespace pdslide;

TEST(Graph, NeighborhoodIncludesSelf) {
  const CommGraph g = named_graph(GraphKind::path, 4);
  const auto n1 = g.neighborhood(1);
  EXPECT_EQ(std::vector<int>(n1.begin(), n1.end()), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(g.degree(0), 1);
  EXPECT_EQ(g.degree(1), 2);
  EXPECT_TRUE(g.adjacent(2, 2));
  EXPECT_FALSE(g.adjacent(0, 2));
}

TEST(Graph, NamedGraphDegrees) {
  EXPECT_EQ(named_graph(GraphKind::path, 10).max_degree(), 2);
  EXPECT_EQ(named_graph(GraphKind::star, 10).max_degree(), 9);
  EXPECT_EQ(named_graph(GraphKind::complete, 10).max_degree(), 9);
  EXPECT_EQ(named_graph(GraphKind::complete, 10).edge_count(), 45u);
  EXPECT_EQ(named_graph(GraphKind::cycle, 10).edge_count(), 10u);
}

TEST(Graph, RejectsInvalidEdgeSets) {
  EXPECT_THROW(CommGraph(3, {{0, 0}}), ConfigError);
  EXPECT_THROW(CommGraph(3, {{0, 1}, {1, 0}, {1, 2}}), ConfigError);
  EXPECT_THROW(CommGraph(3, {{0, 5}}), ConfigError);
  EXPECT_THROW(CommGraph(4, {{0, 1}, {2, 3}}), ConfigError);
}

TEST(Graph, LaplacianEntriesMatchDenseOracle) {
  const CommGraph g = erdos_renyi(12, 0.3, 4);
  const Eigen::MatrixXd l = oracle::dense_laplacian(g, 1);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) EXPECT_EQ(g.laplacian_entry(i, j), l(i, j));
}

TEST(Graph, ErdosRenyiIsReproducibleAndConnected) {
  const CommGraph a = erdos_renyi(30, 0.1, 7);
  const CommGraph b = erdos_renyi(30, 0.1, 7);
  EXPECT_EQ(a.edges(), b.edges());
  EXPECT_TRUE(oracle::bfs_connected(30, a.edges()));
  EXPECT_NE(erdos_renyi(30, 0.1, 8).edges(), a.edges());
}

TEST(Graph, IsConnectedAgreesWithBfsOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Edge> edges;
    for (int u = 0; u < 8; ++u)
      for (int v = u + 1; v < 8; ++v)
        if (std::uniform_real_distribution<double>(0, 1)(rng) < 0.2) edges.push_back({u, v});
    EXPECT_EQ(is_connected(8, edges), oracle::bfs_connected(8, edges));
  }
}

TEST(Graph, EdgeListRoundTrip) {
  const CommGraph g = erdos_renyi(15, 0.25, 2);
  std::stringstream ss;
  write_edge_list(ss, g);
  const CommGraph h = read_edge_list(ss);
  EXPECT_EQ(h.node_count(), 15);
  EXPECT_EQ(h.edges(), g.edges());
}

TEST(Graph, EdgeListIsOneIndexed) {
  std::istringstream in("m 3\n1 2\n2 3\n");
  const CommGraph g = read_edge_list(in);
  EXPECT_EQ(g.edges(), (std::vector<Edge>{{0, 1}, {1, 2}}));
  std::istringstream bad("m 3\n0 1\n1 2\n");
  EXPECT_THROW(read_edge_list(bad), ConfigError);
}

TEST(Graph, KindNamesRoundTrip) {
  for (auto k : {GraphKind::path, GraphKind::star, GraphKind::complete, GraphKind::cycle})
    EXPECT_EQ(parse_graph_kind(to_string(k)), k);
  EXPECT_THROW(parse_graph_kind("torus"), ConfigError);
}
