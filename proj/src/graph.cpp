#include "hng/graph.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

#include "hng/errors.hpp"
#include "hng/parallel.hpp"

namespace hng {

std::string to_string(Topology t) {
  return t == Topology::relative_neighborhood ? "relative_neighborhood" : "complete";
}

Topology topology_from_string(const std::string& s) {
  if (s == "relative_neighborhood" || s == "rng") return Topology::relative_neighborhood;
  if (s == "complete") return Topology::complete;
  throw InvalidInputError("unknown topology '" + s + "'");
}

double NeighborhoodGraph::edge_length(int i, int j) const {
  const auto& adj = adjacency[i];
  auto it = std::lower_bound(adj.begin(), adj.end(), j);
  if (it == adj.end() || *it != j)
    throw InvalidInputError("no edge (" + std::to_string(i) + ", " +
                            std::to_string(j) + ")");
  return neighbor_lengths[i][static_cast<std::size_t>(it - adj.begin())];
}

namespace {

void check_distance_matrix(const Eigen::MatrixXd& d) {
  if (d.rows() != d.cols())
    throw InvalidInputError("distance matrix must be square");
  if (d.rows() < 2)
    throw InsufficientDataError("graph construction needs at least 2 vertices");
  if (!d.allFinite())
    throw InvalidInputError("distance matrix contains non-finite values");
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    if (d(i, i) != 0.0)
      throw InvalidInputError("distance matrix diagonal must be exactly zero");
    for (Eigen::Index j = i + 1; j < d.cols(); ++j) {
      if (d(i, j) < 0.0)
        throw InvalidInputError("distance matrix has a negative entry at (" +
                                std::to_string(i) + ", " + std::to_string(j) + ")");
      if (d(i, j) != d(j, i))
        throw InvalidInputError("distance matrix is asymmetric at (" +
                                std::to_string(i) + ", " + std::to_string(j) + ")");
    }
  }
}

}  // namespace

NeighborhoodGraph build_graph(const Eigen::MatrixXd& distances, Topology topology,
                              Metric metric, int threads) {
  check_distance_matrix(distances);
  const int n = static_cast<int>(distances.rows());

  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

  std::vector<std::uint8_t> keep(pairs.size(), 1);
  if (topology == Topology::relative_neighborhood) {
    // Candidates k == i and k == j contribute max(0, d_ij) = d_ij, which can
    // never reject the pair, so the min runs over the whole column.
    parallel_for(0, static_cast<std::int64_t>(pairs.size()), threads,
                 [&](std::int64_t idx) {
                   auto [i, j] = pairs[static_cast<std::size_t>(idx)];
                   double blocker =
                       distances.col(i).cwiseMax(distances.col(j)).minCoeff();
                   keep[static_cast<std::size_t>(idx)] =
                       distances(i, j) <= blocker ? 1 : 0;
                 });
  }

  NeighborhoodGraph graph;
  graph.vertex_count = n;
  graph.metric = metric;
  graph.topology = topology;
  graph.adjacency.resize(n);
  graph.neighbor_lengths.resize(n);
  for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
    if (!keep[idx]) continue;
    auto [i, j] = pairs[idx];
    double len = distances(i, j);
    graph.edges.emplace_back(i, j);
    graph.adjacency[i].push_back(j);
    graph.neighbor_lengths[i].push_back(len);
    graph.adjacency[j].push_back(i);
    graph.neighbor_lengths[j].push_back(len);
  }
  return graph;
}

GraphStats graph_stats(const NeighborhoodGraph& graph) {
  GraphStats stats;
  stats.edge_count = static_cast<std::int64_t>(graph.edges.size());
  const int n = graph.vertex_count;
  if (n == 0) return stats;

  stats.min_degree = std::numeric_limits<int>::max();
  for (int v = 0; v < n; ++v) {
    int deg = graph.degree(v);
    stats.min_degree = std::min(stats.min_degree, deg);
    stats.max_degree = std::max(stats.max_degree, deg);
  }
  stats.mean_degree = 2.0 * static_cast<double>(stats.edge_count) / n;

  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int visited = 1;
  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop();
    for (int u : graph.adjacency[v]) {
      if (!seen[u]) {
        seen[u] = 1;
        ++visited;
        frontier.push(u);
      }
    }
  }
  stats.connected = visited == n;
  return stats;
}

void save_graph(const NeighborhoodGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out << "HNG " << graph.vertex_count << ' ' << graph.edges.size() << ' '
      << to_string(graph.metric) << ' ' << to_string(graph.topology) << '\n';
  char buf[64];
  for (std::size_t idx = 0; idx < graph.edges.size(); ++idx) {
    auto [i, j] = graph.edges[idx];
    std::snprintf(buf, sizeof buf, "%.17g", graph.edge_length(i, j));
    out << i << ' ' << j << ' ' << buf << '\n';
  }
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

NeighborhoodGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open graph file '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line))
    throw DataError("empty graph file '" + path.string() + "'");
  std::istringstream header(line);
  std::string magic, metric_word, topology_word;
  int n = 0;
  std::int64_t edge_count = -1;
  if (!(header >> magic >> n >> edge_count >> metric_word >> topology_word) ||
      magic != "HNG")
    throw DataError("bad graph header in '" + path.string() + "'");
  if (n < 2 || edge_count < 0)
    throw DataError("bad vertex/edge counts in '" + path.string() + "'");

  NeighborhoodGraph graph;
  graph.vertex_count = n;
  graph.metric = metric_from_string(metric_word);
  graph.topology = topology_from_string(topology_word);
  graph.adjacency.resize(static_cast<std::size_t>(n));
  graph.neighbor_lengths.resize(static_cast<std::size_t>(n));

  std::int64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    int i = -1, j = -1;
    double len = 0.0;
    if (!(row >> i >> j >> len))
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": malformed edge line");
    if (i < 0 || j < 0 || i >= n || j >= n || i >= j || len < 0.0)
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": invalid edge (" + std::to_string(i) + ", " +
                      std::to_string(j) + ")");
    graph.edges.emplace_back(i, j);
    graph.adjacency[i].push_back(j);
    graph.neighbor_lengths[i].push_back(len);
    graph.adjacency[j].push_back(i);
    graph.neighbor_lengths[j].push_back(len);
  }
  if (static_cast<std::int64_t>(graph.edges.size()) != edge_count)
    throw DataError("edge count mismatch in '" + path.string() + "': header says " +
                    std::to_string(edge_count) + ", found " +
                    std::to_string(graph.edges.size()));
  if (!std::is_sorted(graph.edges.begin(), graph.edges.end()))
    throw DataError("edge list in '" + path.string() +
                    "' is not in lexicographic order");
  if (std::adjacent_find(graph.edges.begin(), graph.edges.end()) != graph.edges.end())
    throw DataError("duplicate edge in '" + path.string() + "'");
  return graph;
}

}  // namespace hng
