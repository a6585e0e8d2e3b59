#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <utility>
#include <vector>

#include "hng/graph.hpp"
#include "hng/types.hpp"

namespace hng {

/// Normalized inverse-distance weights, one list per vertex aligned with the
/// graph's adjacency. Each vertex's weights sum to 1 (within 1e-12); zero
/// length edges absorb all weight in equal shares.
struct EdgeWeights {
  std::vector<std::vector<double>> weights;
  double exponent = 2.0;
};

/// Per-cell consistency J and expected value z, both M x N in [0, 1].
struct ConsistencyMatrices {
  Eigen::MatrixXd consistency;  // J
  Eigen::MatrixXd expected;     // z
};

struct ConsistencyReport {
  Eigen::MatrixXd consistency;
  Eigen::MatrixXd expected;
  std::vector<std::pair<int, int>> flipped;  // (attribute, sample), sorted
  double theta = 0.7;
};

struct RefineResult {
  BinaryMatrix refined;
  ConsistencyReport report;
};

/// Broadcasts class-level attribute columns to samples: output column n is
/// class_attrs column labels[n].
BinaryMatrix expand_class_attributes(const BinaryMatrix& class_attrs,
                                     const std::vector<int>& labels);

/// w_i = h_i^-p / sum_j h_j^-p over each vertex's incident edges. Every
/// vertex must have at least one neighbor.
EdgeWeights compute_edge_weights(const NeighborhoodGraph& graph, double p);

/// z(m,v) = sum of neighbor weights whose attribute value is 1;
/// J(m,v) = weight mass of neighbors agreeing with v's own value. Both are
/// ratios of partial to total weight sums taken in adjacency order, which
/// keeps unanimous rows at exactly 1 (or 0) and J invariant under flipping an
/// entire attribute row. All values are computed against the original attrs.
ConsistencyMatrices neighborhood_consistency(const BinaryMatrix& attrs,
                                             const EdgeWeights& weights,
                                             const NeighborhoodGraph& graph,
                                             int threads = 0);

/// Flips attrs(m,n) wherever J(m,n) < theta (strict); J = theta keeps the
/// cell. Single pass against the original matrix.
RefineResult identify_and_refine(const BinaryMatrix& attrs,
                                 const ConsistencyMatrices& consistency,
                                 double theta);

struct PipelineConfig {
  Metric metric = Metric::hyperbolic;
  Topology topology = Topology::relative_neighborhood;
  double target_max_norm = 0.9;
  bool center = false;
  double idw_p = 2.0;
  double theta = 0.7;
  int threads = 0;
};

struct PropagateResult {
  BinaryMatrix refined;
  ConsistencyReport report;
  NeighborhoodGraph graph;
};

/// Full pipeline: embed -> pairwise distances -> graph -> IDW weights ->
/// consistency -> refine, in that order, one pass.
PropagateResult propagate(const Eigen::MatrixXd& features,
                          const std::vector<int>& labels,
                          const BinaryMatrix& class_attrs,
                          const PipelineConfig& config = {});

/// Same pipeline starting from per-sample attributes instead of expanding
/// class columns.
PropagateResult propagate_attributes(const Eigen::MatrixXd& features,
                                     const BinaryMatrix& image_attrs,
                                     const PipelineConfig& config = {});

/// CSV export, one row per cell: attribute_index,sample_index,a,z,J,flipped.
void save_consistency_report(const ConsistencyReport& report,
                             const BinaryMatrix& original_attrs,
                             const std::filesystem::path& path);

}  // namespace hng
