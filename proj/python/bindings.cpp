// Python surface for the attribute-refinement pipeline. Thin functional
// wrappers; matrices cross the boundary as numpy arrays via Eigen.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hng/dataset.hpp"
#include "hng/errors.hpp"
#include "hng/geometry.hpp"
#include "hng/graph.hpp"
#include "hng/refine.hpp"
#include "hng/zsc.hpp"

namespace py = pybind11;

namespace {

hng::PipelineConfig make_config(const std::string& metric,
                                const std::string& topology, double max_norm,
                                double p, double theta, int threads) {
  hng::PipelineConfig config;
  config.metric = hng::metric_from_string(metric);
  config.topology = hng::topology_from_string(topology);
  config.target_max_norm = max_norm;
  config.idw_p = p;
  config.theta = theta;
  config.threads = threads;
  return config;
}

py::dict graph_to_stats(const hng::NeighborhoodGraph& graph) {
  hng::GraphStats stats = hng::graph_stats(graph);
  py::dict out;
  out["edge_count"] = stats.edge_count;
  out["min_degree"] = stats.min_degree;
  out["max_degree"] = stats.max_degree;
  out["mean_degree"] = stats.mean_degree;
  out["connected"] = stats.connected;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Class-to-image attribute denoising on relative neighborhood graphs "
      "under a Poincare-ball metric, with a linear zero-shot evaluator";

  py::register_exception<hng::Error>(m, "PipelineError");

  py::class_<hng::NeighborhoodGraph>(m, "Graph")
      .def_readonly("vertex_count", &hng::NeighborhoodGraph::vertex_count)
      .def_property_readonly("metric",
                             [](const hng::NeighborhoodGraph& g) {
                               return hng::to_string(g.metric);
                             })
      .def_property_readonly("topology",
                             [](const hng::NeighborhoodGraph& g) {
                               return hng::to_string(g.topology);
                             })
      .def_readonly("edges", &hng::NeighborhoodGraph::edges)
      .def_readonly("adjacency", &hng::NeighborhoodGraph::adjacency)
      .def_readonly("neighbor_lengths",
                    &hng::NeighborhoodGraph::neighbor_lengths)
      .def("degree", &hng::NeighborhoodGraph::degree, py::arg("vertex"))
      .def("edge_length", &hng::NeighborhoodGraph::edge_length, py::arg("i"),
           py::arg("j"))
      .def("stats", &graph_to_stats)
      .def("__repr__", [](const hng::NeighborhoodGraph& g) {
        return "Graph(" + std::to_string(g.vertex_count) + " vertices, " +
               std::to_string(g.edges.size()) + " edges, " +
               hng::to_string(g.metric) + ", " + hng::to_string(g.topology) +
               ")";
      });

  m.def(
      "embed",
      [](const Eigen::MatrixXd& features, double max_norm, bool center) {
        hng::EmbedOptions options;
        options.target_max_norm = max_norm;
        options.center = center;
        hng::PoincarePointSet points = hng::embed_features(features, options);
        return py::make_tuple(points.coords(), points.scale_factor());
      },
      py::arg("features"), py::arg("max_norm") = 0.9,
      py::arg("center") = false,
      "Rescale feature rows into the unit ball; returns (coords, scale)");

  m.def(
      "hyperbolic_distance",
      [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return hng::hyperbolic_distance(a, b);
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "pairwise_distances",
      [](const Eigen::MatrixXd& coords, const std::string& metric,
         int threads) {
        hng::PoincarePointSet points(coords, 1.0);
        return hng::pairwise_distances(points, hng::metric_from_string(metric),
                                       threads);
      },
      py::arg("coords"), py::arg("metric") = "hyperbolic",
      py::arg("threads") = 0,
      "Full distance matrix over ball coordinates (rows are points)");

  m.def(
      "build_graph",
      [](const Eigen::MatrixXd& distances, const std::string& topology,
         const std::string& metric, int threads) {
        return hng::build_graph(distances, hng::topology_from_string(topology),
                                hng::metric_from_string(metric), threads);
      },
      py::arg("distances"), py::arg("topology") = "rng",
      py::arg("metric") = "hyperbolic", py::arg("threads") = 0);

  m.def("expand_class_attributes", &hng::expand_class_attributes,
        py::arg("class_attrs"), py::arg("labels"),
        "Broadcast class attribute columns over per-sample labels");

  m.def(
      "edge_weights",
      [](const hng::NeighborhoodGraph& graph, double p) {
        return hng::compute_edge_weights(graph, p).weights;
      },
      py::arg("graph"), py::arg("p") = 2.0,
      "Per-vertex inverse-distance weights, normalized to sum to 1");

  m.def(
      "consistency",
      [](const hng::BinaryMatrix& attrs, const hng::NeighborhoodGraph& graph,
         double p, int threads) {
        hng::EdgeWeights weights = hng::compute_edge_weights(graph, p);
        hng::ConsistencyMatrices result =
            hng::neighborhood_consistency(attrs, weights, graph, threads);
        return py::make_tuple(result.consistency, result.expected);
      },
      py::arg("attrs"), py::arg("graph"), py::arg("p") = 2.0,
      py::arg("threads") = 0,
      "Per-cell agreement score J and neighbor expectation z");

  m.def(
      "refine",
      [](const hng::BinaryMatrix& attrs, const Eigen::MatrixXd& consistency,
         const Eigen::MatrixXd& expected, double theta) {
        hng::ConsistencyMatrices matrices{consistency, expected};
        hng::RefineResult result =
            hng::identify_and_refine(attrs, matrices, theta);
        return py::make_tuple(result.refined, result.report.flipped);
      },
      py::arg("attrs"), py::arg("consistency"), py::arg("expected"),
      py::arg("theta") = 0.7,
      "Flip cells whose agreement score falls below theta");

  m.def(
      "propagate",
      [](const Eigen::MatrixXd& features, const hng::BinaryMatrix& image_attrs,
         const std::string& metric, const std::string& topology,
         double max_norm, double p, double theta, int threads) {
        hng::PropagateResult result = hng::propagate_attributes(
            features, image_attrs,
            make_config(metric, topology, max_norm, p, theta, threads));
        return py::make_tuple(result.refined, result.report.consistency,
                              result.report.expected, result.report.flipped,
                              result.graph);
      },
      py::arg("features"), py::arg("image_attrs"),
      py::arg("metric") = "hyperbolic", py::arg("topology") = "rng",
      py::arg("max_norm") = 0.9, py::arg("p") = 2.0, py::arg("theta") = 0.7,
      py::arg("threads") = 0,
      "Full pipeline: embed, graph, consistency, refine; returns "
      "(refined, J, z, flipped, graph)");

  m.def(
      "train_map",
      [](const Eigen::MatrixXd& features, const hng::BinaryMatrix& targets,
         double ridge_lambda) {
        return hng::train_map(features, targets, ridge_lambda).weights;
      },
      py::arg("features"), py::arg("targets"), py::arg("ridge_lambda") = 1.0,
      "Ridge solution W mapping features to attribute space");

  m.def(
      "predict",
      [](const Eigen::MatrixXd& weights, const Eigen::MatrixXd& test_features,
         const Eigen::MatrixXd& class_attrs) {
        hng::LinearAttributeMap map;
        map.weights = weights;
        hng::Predictions out = hng::predict(map, test_features, class_attrs);
        return py::make_tuple(out.labels, out.zero_projection_count);
      },
      py::arg("weights"), py::arg("test_features"), py::arg("class_attrs"),
      "Nearest class column by cosine distance; returns (labels, zero_count)");

  m.def(
      "evaluate",
      [](const std::vector<int>& predicted, const std::vector<int>& truth,
         int class_count) {
        hng::Predictions p;
        p.labels = predicted;
        hng::ZscResult result = hng::evaluate(p, truth, class_count);
        py::dict out;
        out["per_class_accuracy"] = result.per_class_accuracy;
        out["mean_class_accuracy"] = result.mean_class_accuracy;
        out["confusion"] = result.confusion;
        return out;
      },
      py::arg("predicted"), py::arg("truth"), py::arg("class_count"),
      "Per-class and mean top-1 accuracy with a confusion matrix");

  m.def(
      "generate_synthetic",
      [](int clusters, int per_cluster, int dim, double spread, int attrs,
         double noise, std::uint64_t seed) {
        hng::SyntheticSpec spec;
        spec.cluster_count = clusters;
        spec.points_per_cluster = per_cluster;
        spec.dimension = dim;
        spec.cluster_spread = spread;
        spec.attribute_count = attrs;
        spec.noise_rate = noise;
        spec.seed = seed;
        hng::SyntheticData data = hng::generate_synthetic(spec);
        py::dict out;
        out["features"] = data.features.rows;
        out["labels"] = data.features.labels;
        out["class_attrs"] = data.class_attrs;
        out["ground_truth"] = data.ground_truth;
        out["observed"] = data.observed;
        out["noise_mask"] = data.noise_mask;
        out["centers"] = data.centers;
        return out;
      },
      py::arg("clusters"), py::arg("per_cluster"), py::arg("dim"),
      py::arg("spread"), py::arg("attrs"), py::arg("noise"), py::arg("seed"),
      "Clustered benchmark with planted attribute noise");

  m.def("save_graph", &hng::save_graph, py::arg("graph"), py::arg("path"));
  m.def("load_graph", &hng::load_graph, py::arg("path"));
}
