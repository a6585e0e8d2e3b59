#include "hng/refine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "hng/errors.hpp"
#include "hng/parallel.hpp"

namespace hng {

namespace {

void check_binary(const BinaryMatrix& m, const char* what) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j) > 1)
        throw InvalidInputError(std::string(what) + " has non-binary entry " +
                                std::to_string(int(m(i, j))) + " at (" +
                                std::to_string(i) + ", " + std::to_string(j) + ")");
}

}  // namespace

BinaryMatrix expand_class_attributes(const BinaryMatrix& class_attrs,
                                     const std::vector<int>& labels) {
  if (class_attrs.rows() < 1 || class_attrs.cols() < 1)
    throw InvalidInputError("class attribute matrix must be non-empty");
  check_binary(class_attrs, "class attribute matrix");
  const int class_count = static_cast<int>(class_attrs.cols());

  BinaryMatrix out(class_attrs.rows(), static_cast<Eigen::Index>(labels.size()));
  for (std::size_t n = 0; n < labels.size(); ++n) {
    int label = labels[n];
    if (label < 0 || label >= class_count)
      throw InvalidInputError("label " + std::to_string(label) + " of sample " +
                              std::to_string(n) + " is outside [0, " +
                              std::to_string(class_count) + ")");
    out.col(static_cast<Eigen::Index>(n)) = class_attrs.col(label);
  }
  return out;
}

EdgeWeights compute_edge_weights(const NeighborhoodGraph& graph, double p) {
  if (!(p > 0.0) || !std::isfinite(p))
    throw InvalidInputError("IDW exponent p must be a positive real");

  EdgeWeights result;
  result.exponent = p;
  result.weights.resize(graph.adjacency.size());

  for (int v = 0; v < graph.vertex_count; ++v) {
    const auto& lengths = graph.neighbor_lengths[v];
    if (lengths.empty())
      throw TopologyError("vertex " + std::to_string(v) +
                          " has no neighbors; IDW weights are undefined");
    auto& w = result.weights[v];
    w.resize(lengths.size());

    std::size_t zero_count =
        static_cast<std::size_t>(std::count(lengths.begin(), lengths.end(), 0.0));
    if (zero_count > 0) {
      // Pointwise limit of Eq-style IDW as h -> 0+: zero-length neighbors
      // share all the weight.
      double share = 1.0 / static_cast<double>(zero_count);
      for (std::size_t i = 0; i < lengths.size(); ++i)
        w[i] = lengths[i] == 0.0 ? share : 0.0;
      continue;
    }

    // Scale by the shortest edge so h^-p cannot overflow.
    double h_min = *std::min_element(lengths.begin(), lengths.end());
    double total = 0.0;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
      w[i] = std::pow(h_min / lengths[i], p);
      total += w[i];
    }
    for (double& wi : w) wi /= total;
  }
  return result;
}

ConsistencyMatrices neighborhood_consistency(const BinaryMatrix& attrs,
                                             const EdgeWeights& weights,
                                             const NeighborhoodGraph& graph,
                                             int threads) {
  const Eigen::Index attr_count = attrs.rows();
  const Eigen::Index n = attrs.cols();
  if (n != graph.vertex_count)
    throw InvalidInputError("attribute matrix has " + std::to_string(n) +
                            " columns but the graph has " +
                            std::to_string(graph.vertex_count) + " vertices");
  if (attr_count < 1) throw InvalidInputError("attribute matrix has no rows");
  if (weights.weights.size() != graph.adjacency.size())
    throw InvalidInputError("edge weights do not match the graph");
  for (int v = 0; v < graph.vertex_count; ++v)
    if (weights.weights[v].size() != graph.adjacency[v].size())
      throw InvalidInputError("edge weights of vertex " + std::to_string(v) +
                              " do not match its adjacency");
  check_binary(attrs, "attribute matrix");

  // Totals in the same accumulation order as the partial sums below, so the
  // partial/total ratio is exact at the extremes (0 and 1) and every partial
  // floating-point sum is bounded by its total.
  std::vector<double> totals(static_cast<std::size_t>(graph.vertex_count), 0.0);
  for (int v = 0; v < graph.vertex_count; ++v) {
    double t = 0.0;
    for (double wi : weights.weights[v]) {
      if (wi < 0.0)
        throw InvalidInputError("negative edge weight at vertex " + std::to_string(v));
      t += wi;
    }
    if (t <= 0.0)
      throw InvalidInputError("edge weights of vertex " + std::to_string(v) +
                              " sum to zero");
    totals[static_cast<std::size_t>(v)] = t;
  }

  ConsistencyMatrices result;
  result.consistency.resize(attr_count, n);
  result.expected.resize(attr_count, n);

  parallel_for(0, attr_count, threads, [&](std::int64_t m) {
    for (int v = 0; v < graph.vertex_count; ++v) {
      const auto& nbrs = graph.adjacency[v];
      const auto& w = weights.weights[v];
      const std::uint8_t own = attrs(m, v);
      double ones = 0.0;
      double agree = 0.0;
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        const std::uint8_t a = attrs(m, nbrs[i]);
        if (a == 1) ones += w[i];
        if (a == own) agree += w[i];
      }
      double total = totals[static_cast<std::size_t>(v)];
      result.expected(m, v) = ones / total;
      result.consistency(m, v) = agree / total;
    }
  });
  return result;
}

RefineResult identify_and_refine(const BinaryMatrix& attrs,
                                 const ConsistencyMatrices& consistency,
                                 double theta) {
  if (!(theta >= 0.0) || !(theta <= 1.0))
    throw InvalidInputError("theta must lie in [0, 1]");
  if (consistency.consistency.rows() != attrs.rows() ||
      consistency.consistency.cols() != attrs.cols() ||
      consistency.expected.rows() != attrs.rows() ||
      consistency.expected.cols() != attrs.cols())
    throw InvalidInputError("consistency matrices do not match the attribute matrix");
  check_binary(attrs, "attribute matrix");

  RefineResult result;
  result.refined = attrs;
  result.report.consistency = consistency.consistency;
  result.report.expected = consistency.expected;
  result.report.theta = theta;

  for (Eigen::Index m = 0; m < attrs.rows(); ++m) {
    for (Eigen::Index n = 0; n < attrs.cols(); ++n) {
      double j = consistency.consistency(m, n);
      if (j < 0.0 || j > 1.0)
        throw InvalidInputError("consistency value " + std::to_string(j) +
                                " outside [0, 1] at (" + std::to_string(m) + ", " +
                                std::to_string(n) + ")");
      if (j < theta) {
        result.refined(m, n) = attrs(m, n) == 1 ? 0 : 1;
        result.report.flipped.emplace_back(static_cast<int>(m), static_cast<int>(n));
      }
    }
  }
  return result;
}

PropagateResult propagate_attributes(const Eigen::MatrixXd& features,
                                     const BinaryMatrix& image_attrs,
                                     const PipelineConfig& config) {
  if (image_attrs.cols() != features.rows())
    throw InvalidInputError("attribute matrix has " +
                            std::to_string(image_attrs.cols()) +
                            " columns but there are " +
                            std::to_string(features.rows()) + " feature rows");

  PoincarePointSet points =
      embed_features(features, {config.target_max_norm, config.center});
  Eigen::MatrixXd distances =
      pairwise_distances(points, config.metric, config.threads);
  NeighborhoodGraph graph =
      build_graph(distances, config.topology, config.metric, config.threads);
  EdgeWeights weights = compute_edge_weights(graph, config.idw_p);
  ConsistencyMatrices consistency =
      neighborhood_consistency(image_attrs, weights, graph, config.threads);
  RefineResult refined = identify_and_refine(image_attrs, consistency, config.theta);

  return PropagateResult{std::move(refined.refined), std::move(refined.report),
                         std::move(graph)};
}

PropagateResult propagate(const Eigen::MatrixXd& features,
                          const std::vector<int>& labels,
                          const BinaryMatrix& class_attrs,
                          const PipelineConfig& config) {
  if (labels.size() != static_cast<std::size_t>(features.rows()))
    throw InvalidInputError("label count does not match feature rows");
  BinaryMatrix expanded = expand_class_attributes(class_attrs, labels);
  return propagate_attributes(features, expanded, config);
}

void save_consistency_report(const ConsistencyReport& report,
                             const BinaryMatrix& original_attrs,
                             const std::filesystem::path& path) {
  if (original_attrs.rows() != report.consistency.rows() ||
      original_attrs.cols() != report.consistency.cols())
    throw InvalidInputError("report shape does not match the attribute matrix");

  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out << "attribute_index,sample_index,a,z,J,flipped\n";

  auto flagged = [&](int m, int n) {
    return std::binary_search(report.flipped.begin(), report.flipped.end(),
                              std::pair<int, int>{m, n});
  };
  char zbuf[32], jbuf[32];
  for (Eigen::Index m = 0; m < report.consistency.rows(); ++m) {
    for (Eigen::Index n = 0; n < report.consistency.cols(); ++n) {
      std::snprintf(zbuf, sizeof zbuf, "%.17g", report.expected(m, n));
      std::snprintf(jbuf, sizeof jbuf, "%.17g", report.consistency(m, n));
      out << m << ',' << n << ',' << int(original_attrs(m, n)) << ',' << zbuf << ','
          << jbuf << ',' << (flagged(static_cast<int>(m), static_cast<int>(n)) ? 1 : 0)
          << '\n';
    }
  }
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace hng
