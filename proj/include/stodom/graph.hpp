#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace stodom {

/// Finite undirected simple graph. Sites are 0 .. n_sites - 1. Infinite
/// lattices and trees are represented by finite truncations; sites outside the
/// truncation are treated as permanently healthy ("absorbing-healthy").
struct Graph {
  std::size_t n_sites = 0;
  std::vector<std::vector<std::size_t>> adjacency;
  std::size_t delta_g = 0;
  std::string description;
  std::string boundary = "absorbing-healthy";

  std::size_t degree(std::size_t s) const { return adjacency[s].size(); }
  std::size_t edge_count() const;
};

/// Builds a graph from an edge list. Self-loops are rejected; repeated edges
/// are merged. Neighbor lists are sorted.
Graph make_graph(std::size_t n_sites, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                 std::string description = "edges");

Graph empty_graph(std::size_t n);
Graph path_graph(std::size_t n);
Graph cycle_graph(std::size_t n);
/// d-dimensional torus with `side` sites per axis (side >= 3).
Graph torus_graph(std::size_t dim, std::size_t side);
/// Ball of radius `depth` in the infinite `degree`-regular tree.
Graph regular_tree(std::size_t degree, std::size_t depth);

/// Lines `u v` with 0-based indices; `#` starts a comment; blank lines are
/// skipped. The site count is one more than the largest index.
Graph read_edge_list(std::istream& in, std::string description = "file");

/// Parses "empty:N", "path:N", "cycle:N", "torus:D:SIDE", "tree:DEGREE:DEPTH"
/// or "file:PATH".
Graph parse_graph_spec(const std::string& spec);

/// Center site of a graph built by parse_graph_spec: the middle of a path,
/// the root of a tree, site 0 otherwise.
std::size_t default_seed_site(const Graph& g);

}  // namespace stodom
