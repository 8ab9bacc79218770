#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "stodom/errors.hpp"
#include "stodom/graph.hpp"

using namespace stodom;

namespace {

void expect_undirected_simple(const Graph& g) {
  std::size_t maxdeg = 0;
  for (std::size_t s = 0; s < g.n_sites; ++s) {
    maxdeg = std::max(maxdeg, g.degree(s));
    for (std::size_t t : g.adjacency[s]) {
      EXPECT_NE(s, t);
      const auto& back = g.adjacency[t];
      EXPECT_NE(std::find(back.begin(), back.end(), s), back.end());
    }
  }
  EXPECT_EQ(g.delta_g, maxdeg);
}

}  // namespace

TEST(Graph, Generators) {
  const Graph p = path_graph(5);
  expect_undirected_simple(p);
  EXPECT_EQ(p.edge_count(), 4u);
  EXPECT_EQ(p.delta_g, 2u);

  const Graph c = cycle_graph(6);
  expect_undirected_simple(c);
  EXPECT_EQ(c.edge_count(), 6u);

  const Graph t = torus_graph(2, 4);
  expect_undirected_simple(t);
  EXPECT_EQ(t.n_sites, 16u);
  EXPECT_EQ(t.delta_g, 4u);
  EXPECT_EQ(t.edge_count(), 32u);

  const Graph tr = regular_tree(3, 2);
  expect_undirected_simple(tr);
  EXPECT_EQ(tr.n_sites, 1u + 3u + 6u);
  EXPECT_EQ(tr.delta_g, 3u);

  const Graph e = empty_graph(4);
  EXPECT_EQ(e.edge_count(), 0u);
  EXPECT_EQ(e.delta_g, 0u);
}

TEST(Graph, RejectsSelfLoopsAndMergesDuplicates) {
  EXPECT_THROW(make_graph(3, {{0, 0}}), ValidationError);
  const Graph g = make_graph(3, {{0, 1}, {1, 0}, {1, 2}});
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_THROW(cycle_graph(2), ValidationError);
}

TEST(Graph, EdgeListWithComments) {
  std::istringstream in("# triangle\n0 1\n\n1 2  # tail\n2 0\n");
  const Graph g = read_edge_list(in);
  EXPECT_EQ(g.n_sites, 3u);
  EXPECT_EQ(g.edge_count(), 3u);
}

TEST(Graph, SpecParsing) {
  EXPECT_EQ(parse_graph_spec("path:50").n_sites, 50u);
  EXPECT_EQ(parse_graph_spec("cycle:10").delta_g, 2u);
  EXPECT_EQ(parse_graph_spec("torus:3:3").n_sites, 27u);
  EXPECT_EQ(parse_graph_spec("tree:3:1").n_sites, 4u);
  EXPECT_EQ(parse_graph_spec("empty:2").n_sites, 2u);
  EXPECT_THROW(parse_graph_spec("blob:3"), ValidationError);
  EXPECT_THROW(parse_graph_spec("path:x"), ValidationError);
  EXPECT_EQ(default_seed_site(path_graph(50)), 25u);
  EXPECT_EQ(default_seed_site(cycle_graph(7)), 0u);
  EXPECT_EQ(parse_graph_spec("path:5").boundary, "absorbing-healthy");
}
