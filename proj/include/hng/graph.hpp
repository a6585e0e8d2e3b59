#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hng/geometry.hpp"

namespace hng {

// relative_neighborhood keeps a pair only when no third point is closer to
// both; complete keeps every pair (ablation).
enum class Topology { relative_neighborhood, complete };

std::string to_string(Topology t);
Topology topology_from_string(const std::string& s);

/// Undirected graph over N vertices with per-edge lengths in the metric the
/// distance matrix was built with. Edges are stored as (i, j) with i < j in
/// lexicographic order; adjacency lists are sorted by vertex index.
struct NeighborhoodGraph {
  int vertex_count = 0;
  Metric metric = Metric::hyperbolic;
  Topology topology = Topology::relative_neighborhood;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<int>> adjacency;
  std::vector<std::vector<double>> neighbor_lengths;  // aligned with adjacency

  int degree(int v) const { return static_cast<int>(adjacency[v].size()); }
  /// Length of edge (i, j); throws if the edge is absent.
  double edge_length(int i, int j) const;
};

struct GraphStats {
  std::int64_t edge_count = 0;
  int min_degree = 0;
  int max_degree = 0;
  double mean_degree = 0.0;
  bool connected = false;
};

/// Builds the neighborhood graph from a symmetric nonnegative distance matrix
/// with zero diagonal. For relative_neighborhood, (i, j) is an edge iff
/// d(i,j) <= max(d(i,k), d(j,k)) for every other k; ties admit the edge and a
/// two-vertex input always yields its single edge. The metric argument only
/// labels the result for serialization and diagnostics.
///
/// The reference path evaluates the full min-over-k for every pair, O(N^3);
/// the pair loop splits across threads with output independent of schedule.
NeighborhoodGraph build_graph(const Eigen::MatrixXd& distances,
                              Topology topology = Topology::relative_neighborhood,
                              Metric metric = Metric::hyperbolic,
                              int threads = 0);

GraphStats graph_stats(const NeighborhoodGraph& graph);

/// Edge-list text format: header `HNG <N> <edge_count> <metric> <topology>`,
/// then one `i j length` line per edge (0-based, 17 significant digits).
void save_graph(const NeighborhoodGraph& graph, const std::filesystem::path& path);
NeighborhoodGraph load_graph(const std::filesystem::path& path);

}  // namespace hng
