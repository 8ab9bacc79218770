#include "stodom/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "stodom/errors.hpp"

namespace stodom {

std::size_t Graph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& nb : adjacency) twice += nb.size();
  return twice / 2;
}

Graph make_graph(std::size_t n_sites, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                 std::string description) {
  detail::require(n_sites >= 1, "graph must have at least one site");
  Graph g;
  g.n_sites = n_sites;
  g.adjacency.resize(n_sites);
  g.description = std::move(description);
  for (const auto& [u, v] : edges) {
    detail::require(u < n_sites && v < n_sites, "edge endpoint out of range");
    detail::require(u != v, "self-loops are not allowed");
    g.adjacency[u].push_back(v);
    g.adjacency[v].push_back(u);
  }
  for (auto& nb : g.adjacency) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    g.delta_g = std::max(g.delta_g, nb.size());
  }
  return g;
}

Graph empty_graph(std::size_t n) { return make_graph(n, {}, "empty:" + std::to_string(n)); }

Graph path_graph(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return make_graph(n, edges, "path:" + std::to_string(n));
}

Graph cycle_graph(std::size_t n) {
  detail::require(n >= 3, "cycle needs at least 3 sites");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return make_graph(n, edges, "cycle:" + std::to_string(n));
}

Graph torus_graph(std::size_t dim, std::size_t side) {
  detail::require(dim >= 1, "torus dimension must be >= 1");
  detail::require(side >= 3, "torus side must be >= 3");
  std::size_t n = 1;
  for (std::size_t d = 0; d < dim; ++d) {
    detail::require(n <= 50'000'000 / side, "torus too large");
    n *= side;
  }
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  edges.reserve(n * dim);
  for (std::size_t s = 0; s < n; ++s) {
    std::size_t stride = 1;
    for (std::size_t d = 0; d < dim; ++d) {
      const std::size_t coord = (s / stride) % side;
      const std::size_t next = s - coord * stride + ((coord + 1) % side) * stride;
      edges.emplace_back(s, next);
      stride *= side;
    }
  }
  return make_graph(n, edges, "torus:" + std::to_string(dim) + ":" + std::to_string(side));
}

Graph regular_tree(std::size_t degree, std::size_t depth) {
  detail::require(degree >= 2, "tree degree must be >= 2");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::size_t> frontier{0};
  std::size_t n = 1;
  for (std::size_t level = 0; level < depth; ++level) {
    std::vector<std::size_t> next;
    for (const std::size_t parent : frontier) {
      const std::size_t children = parent == 0 ? degree : degree - 1;
      for (std::size_t c = 0; c < children; ++c) {
        detail::require(n < 50'000'000, "tree too large");
        edges.emplace_back(parent, n);
        next.push_back(n++);
      }
    }
    frontier = std::move(next);
  }
  return make_graph(n, edges, "tree:" + std::to_string(degree) + ":" + std::to_string(depth));
}

Graph read_edge_list(std::istream& in, std::string description) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t n = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    long long u = 0;
    long long v = 0;
    if (!(fields >> u)) continue;
    std::string rest;
    detail::require(static_cast<bool>(fields >> v) && !(fields >> rest) && u >= 0 && v >= 0,
                    "malformed edge on line " + std::to_string(lineno));
    edges.emplace_back(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
    n = std::max(n, static_cast<std::size_t>(std::max(u, v)) + 1);
  }
  return make_graph(n, edges, std::move(description));
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

std::size_t parse_size(const std::string& s, const std::string& spec) {
  std::size_t used = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  detail::require(used == s.size() && !s.empty() && s[0] != '-', "bad number in graph spec '" + spec + "'");
  return static_cast<std::size_t>(value);
}

}  // namespace

Graph parse_graph_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  detail::require(colon != std::string::npos, "graph spec must look like kind:args, got '" + spec + "'");
  const std::string kind = spec.substr(0, colon);
  if (kind == "file") {
    const std::string path = spec.substr(colon + 1);
    std::ifstream in(path);
    detail::require(static_cast<bool>(in), "cannot open edge list '" + path + "'");
    return read_edge_list(in, spec);
  }
  const auto args = split(spec.substr(colon + 1), ':');
  auto arg = [&](std::size_t i) { return parse_size(args.at(i), spec); };
  if (kind == "empty" && args.size() == 1) return empty_graph(arg(0));
  if (kind == "path" && args.size() == 1) return path_graph(arg(0));
  if (kind == "cycle" && args.size() == 1) return cycle_graph(arg(0));
  if (kind == "torus" && args.size() == 2) return torus_graph(arg(0), arg(1));
  if (kind == "tree" && args.size() == 2) return regular_tree(arg(0), arg(1));
  throw ValidationError("unknown graph spec '" + spec + "'");
}

std::size_t default_seed_site(const Graph& g) {
  if (g.description.rfind("path:", 0) == 0) return g.n_sites / 2;
  return 0;
}

}  // namespace stodom
