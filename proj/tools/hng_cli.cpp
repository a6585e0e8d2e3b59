// Pipeline front end: synth / build-graph / propagate / eval / sweep-theta.
// Every command is deterministic in its flags; all outputs are files in
// --out plus fixed-format stdout lines.
#include <CLI11.hpp>
#include <Eigen/Core>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "hng/dataset.hpp"
#include "hng/errors.hpp"
#include "hng/geometry.hpp"
#include "hng/graph.hpp"
#include "hng/parallel.hpp"
#include "hng/refine.hpp"
#include "hng/zsc.hpp"

namespace {

namespace fs = std::filesystem;

// Missing or contradictory flags, distinct from bad data in files.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

fs::path matrix_path(const fs::path& dir, const std::string& stem,
                     hng::FileFormat format) {
  return dir / (stem + (format == hng::FileFormat::csv ? ".csv" : ".bin"));
}

struct Options {
  std::string features;
  std::string labels;
  std::string class_attrs;
  std::string image_attrs;
  std::string ground_truth;
  std::string noise_mask;
  std::string format = "csv";
  std::string out = ".";
  std::string metric = "hyperbolic";
  std::string topology = "rng";
  double max_norm = 0.9;
  double idw_p = 2.0;
  double theta = 0.7;
  double ridge_lambda = 1.0;
  int threads = 0;
  bool refine = false;
  std::vector<int> train_classes;
  std::vector<int> test_classes;
  std::vector<double> thetas = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                0.6, 0.7, 0.8, 0.9, 1.0};
  int clusters = 5;
  int per_cluster = 40;
  int dim = 16;
  int attrs = 20;
  double spread = 1.0;
  double noise = 0.1;
  std::uint64_t seed = 0;
};

hng::PipelineConfig pipeline_config(const Options& o) {
  hng::PipelineConfig config;
  config.metric = hng::metric_from_string(o.metric);
  config.topology = hng::topology_from_string(o.topology);
  config.target_max_norm = o.max_norm;
  config.idw_p = o.idw_p;
  config.theta = o.theta;
  config.threads = o.threads;
  return config;
}

int run_synth(const Options& o) {
  hng::SyntheticSpec spec;
  spec.cluster_count = o.clusters;
  spec.points_per_cluster = o.per_cluster;
  spec.dimension = o.dim;
  spec.cluster_spread = o.spread;
  spec.attribute_count = o.attrs;
  spec.noise_rate = o.noise;
  spec.seed = o.seed;
  hng::SyntheticData data = hng::generate_synthetic(spec);

  hng::FileFormat format = hng::format_from_string(o.format);
  fs::path dir(o.out);
  fs::create_directories(dir);
  hng::save_real_matrix(data.features.rows, matrix_path(dir, "features", format),
                        format);
  hng::save_labels(data.features.labels, dir / "labels.txt");
  hng::save_binary_matrix(data.class_attrs,
                          matrix_path(dir, "class_attrs", format), format);
  hng::save_binary_matrix(data.ground_truth,
                          matrix_path(dir, "true_attrs", format), format);
  hng::save_binary_matrix(data.observed,
                          matrix_path(dir, "observed_attrs", format), format);
  hng::save_noise_mask(data.noise_mask, dir / "noise_mask.csv");
  std::cout << "synthetic dataset: " << data.features.rows.rows() << " samples, "
            << spec.cluster_count << " classes, " << spec.dimension
            << " dims, " << spec.attribute_count << " attributes, "
            << data.noise_mask.size() << " noisy cells -> " << dir.string()
            << "\n";
  return 0;
}

int run_build_graph(const Options& o) {
  if (o.features.empty()) throw UsageError("build-graph needs --features");
  hng::FileFormat format = hng::format_from_string(o.format);
  Eigen::MatrixXd features = hng::load_real_matrix(o.features, format);

  hng::Metric metric = hng::metric_from_string(o.metric);
  hng::Topology topology = hng::topology_from_string(o.topology);
  hng::EmbedOptions embed;
  embed.target_max_norm = o.max_norm;
  hng::PoincarePointSet points = hng::embed_features(features, embed);
  Eigen::MatrixXd distances =
      hng::pairwise_distances(points, metric, o.threads);
  hng::NeighborhoodGraph graph =
      hng::build_graph(distances, topology, metric, o.threads);

  fs::path dir(o.out);
  fs::create_directories(dir);
  fs::path graph_path = dir / "graph.txt";
  hng::save_graph(graph, graph_path);

  hng::GraphStats stats = hng::graph_stats(graph);
  std::cout << "graph: " << graph.vertex_count << " vertices, "
            << stats.edge_count << " edges, degree min/mean/max "
            << stats.min_degree << "/" << fmt4(stats.mean_degree) << "/"
            << stats.max_degree << ", "
            << (stats.connected ? "connected" : "disconnected")
            << ", embedding scale " << fmt17(points.scale_factor()) << " -> "
            << graph_path.string() << "\n";
  return 0;
}

// Per-sample attributes for propagate: either an explicit M x N matrix or
// class columns expanded over the labels.
hng::BinaryMatrix observed_attributes(const Options& o, hng::FileFormat format,
                                      Eigen::Index sample_count) {
  hng::BinaryMatrix attrs;
  if (!o.image_attrs.empty()) {
    attrs = hng::load_binary_matrix(o.image_attrs, format);
  } else {
    if (o.labels.empty() || o.class_attrs.empty())
      throw UsageError(
          "need either --image-attrs or both --labels and --class-attrs");
    std::vector<int> labels = hng::load_labels(o.labels);
    hng::BinaryMatrix class_attrs =
        hng::load_binary_matrix(o.class_attrs, format);
    attrs = hng::expand_class_attributes(class_attrs, labels);
  }
  if (attrs.cols() != sample_count)
    throw hng::DataError("attribute matrix covers " +
                         std::to_string(attrs.cols()) + " samples but '" +
                         o.features + "' holds " +
                         std::to_string(sample_count) + " rows");
  return attrs;
}

int run_propagate(const Options& o) {
  if (o.features.empty()) throw UsageError("propagate needs --features");
  hng::FileFormat format = hng::format_from_string(o.format);
  Eigen::MatrixXd features = hng::load_real_matrix(o.features, format);
  hng::BinaryMatrix attrs = observed_attributes(o, format, features.rows());

  hng::PropagateResult result =
      hng::propagate_attributes(features, attrs, pipeline_config(o));

  fs::path dir(o.out);
  fs::create_directories(dir);
  hng::save_binary_matrix(result.refined,
                          matrix_path(dir, "refined_attrs", format), format);
  hng::save_consistency_report(result.report, attrs, dir / "report.csv");
  hng::save_graph(result.graph, dir / "graph.txt");

  const double cells =
      static_cast<double>(attrs.rows()) * static_cast<double>(attrs.cols());
  std::cout << "refined attributes: " << result.report.flipped.size() << " of "
            << static_cast<long long>(cells) << " cells flipped (fraction "
            << fmt4(static_cast<double>(result.report.flipped.size()) / cells)
            << ", theta " << fmt4(result.report.theta) << ") -> "
            << dir.string() << "\n";

  if (o.ground_truth.empty() != o.noise_mask.empty())
    throw UsageError("--ground-truth and --noise-mask go together");
  if (!o.ground_truth.empty()) {
    hng::BinaryMatrix truth = hng::load_binary_matrix(o.ground_truth, format);
    if (truth.rows() != attrs.rows() || truth.cols() != attrs.cols())
      throw hng::DataError("'" + o.ground_truth +
                           "' does not match the attribute matrix shape");
    std::vector<std::pair<int, int>> mask = hng::load_noise_mask(o.noise_mask);
    std::set<std::pair<int, int>> mask_set(mask.begin(), mask.end());
    for (const auto& [attr, sample] : mask)
      if (attr >= truth.rows() || sample >= truth.cols())
        throw hng::DataError("noise mask cell (" + std::to_string(attr) + "," +
                             std::to_string(sample) + ") is out of range");

    std::int64_t reverted = 0;
    for (const auto& [attr, sample] : mask)
      if (result.refined(attr, sample) == truth(attr, sample)) ++reverted;
    std::int64_t clean_flipped = 0;
    for (Eigen::Index m = 0; m < truth.rows(); ++m)
      for (Eigen::Index n = 0; n < truth.cols(); ++n)
        if (!mask_set.count({static_cast<int>(m), static_cast<int>(n)}) &&
            result.refined(m, n) != truth(m, n))
          ++clean_flipped;
    const std::int64_t clean_total =
        static_cast<std::int64_t>(cells) -
        static_cast<std::int64_t>(mask.size());
    const double reverted_pct =
        mask.empty() ? 100.0
                     : 100.0 * static_cast<double>(reverted) /
                           static_cast<double>(mask.size());
    const double clean_pct =
        clean_total == 0 ? 0.0
                         : 100.0 * static_cast<double>(clean_flipped) /
                               static_cast<double>(clean_total);
    std::cout << "recovery: reverted " << reverted << "/" << mask.size()
              << " planted flips (" << fmt4(reverted_pct) << "%); flipped "
              << clean_flipped << "/" << clean_total << " clean cells ("
              << fmt4(clean_pct) << "%)\n";
  }
  return 0;
}

struct Split {
  Eigen::MatrixXd train_features;
  std::vector<int> train_labels;  // original class ids
  hng::BinaryMatrix train_attrs;  // M x n_train observed
  Eigen::MatrixXd test_features;
  std::vector<int> test_labels;  // positions within test_classes
  Eigen::MatrixXd test_class_attrs;  // M x K columns of the clean class attrs
};

// Zero-shot split: the map trains on samples of the train classes only and
// is scored against the held-out classes' clean attribute columns.
Split make_split(const Options& o, const hng::LoadedDataset& data) {
  if (o.train_classes.empty() || o.test_classes.empty())
    throw UsageError("need --train-classes and --test-classes");
  std::set<int> train_set(o.train_classes.begin(), o.train_classes.end());
  std::set<int> test_set(o.test_classes.begin(), o.test_classes.end());
  for (int c : train_set)
    if (test_set.count(c))
      throw hng::InvalidInputError("class " + std::to_string(c) +
                                   " appears in both --train-classes and "
                                   "--test-classes; the split must be disjoint");
  const int class_count = data.features.class_count;
  for (int c : o.train_classes)
    if (c < 0 || c >= class_count)
      throw hng::InvalidInputError("train class " + std::to_string(c) +
                                   " outside [0, " +
                                   std::to_string(class_count) + ")");
  for (int c : o.test_classes)
    if (c < 0 || c >= class_count)
      throw hng::InvalidInputError("test class " + std::to_string(c) +
                                   " outside [0, " +
                                   std::to_string(class_count) + ")");

  std::vector<Eigen::Index> train_rows, test_rows;
  for (Eigen::Index i = 0; i < data.features.rows.rows(); ++i) {
    int label = data.features.labels[static_cast<std::size_t>(i)];
    if (train_set.count(label)) train_rows.push_back(i);
    else if (test_set.count(label)) test_rows.push_back(i);
  }
  if (train_rows.empty())
    throw hng::InsufficientDataError("no samples belong to the train classes");
  if (test_rows.empty())
    throw hng::InsufficientDataError("no samples belong to the test classes");

  Split split;
  split.train_features.resize(static_cast<Eigen::Index>(train_rows.size()),
                              data.features.rows.cols());
  split.train_labels.reserve(train_rows.size());
  for (std::size_t r = 0; r < train_rows.size(); ++r) {
    split.train_features.row(static_cast<Eigen::Index>(r)) =
        data.features.rows.row(train_rows[r]);
    split.train_labels.push_back(
        data.features.labels[static_cast<std::size_t>(train_rows[r])]);
  }

  split.test_features.resize(static_cast<Eigen::Index>(test_rows.size()),
                             data.features.rows.cols());
  split.test_labels.reserve(test_rows.size());
  for (std::size_t r = 0; r < test_rows.size(); ++r) {
    split.test_features.row(static_cast<Eigen::Index>(r)) =
        data.features.rows.row(test_rows[r]);
    int label = data.features.labels[static_cast<std::size_t>(test_rows[r])];
    int position = static_cast<int>(
        std::find(o.test_classes.begin(), o.test_classes.end(), label) -
        o.test_classes.begin());
    split.test_labels.push_back(position);
  }

  split.test_class_attrs.resize(data.class_attrs.rows(),
                                static_cast<Eigen::Index>(o.test_classes.size()));
  for (std::size_t k = 0; k < o.test_classes.size(); ++k)
    split.test_class_attrs.col(static_cast<Eigen::Index>(k)) =
        data.class_attrs.col(o.test_classes[k]).cast<double>();

  // Observed train attributes: explicit per-image matrix over all samples,
  // or the train labels' class columns.
  if (!o.image_attrs.empty()) {
    hng::FileFormat format = hng::format_from_string(o.format);
    hng::BinaryMatrix all_attrs = hng::load_binary_matrix(o.image_attrs, format);
    if (all_attrs.cols() != data.features.rows.rows() ||
        all_attrs.rows() != data.class_attrs.rows())
      throw hng::DataError("'" + o.image_attrs +
                           "' does not cover every sample and attribute");
    split.train_attrs.resize(all_attrs.rows(),
                             static_cast<Eigen::Index>(train_rows.size()));
    for (std::size_t r = 0; r < train_rows.size(); ++r)
      split.train_attrs.col(static_cast<Eigen::Index>(r)) =
          all_attrs.col(train_rows[r]);
  } else {
    split.train_attrs =
        hng::expand_class_attributes(data.class_attrs, split.train_labels);
  }
  return split;
}

int run_eval(const Options& o) {
  if (o.features.empty() || o.labels.empty() || o.class_attrs.empty())
    throw UsageError("eval needs --features, --labels, and --class-attrs");
  hng::FileFormat format = hng::format_from_string(o.format);
  hng::LoadedDataset data =
      hng::load_dataset(o.features, o.labels, o.class_attrs, format);
  Split split = make_split(o, data);

  hng::BinaryMatrix train_attrs = split.train_attrs;
  if (o.refine)
    train_attrs = hng::propagate_attributes(split.train_features, train_attrs,
                                            pipeline_config(o))
                      .refined;

  hng::LinearAttributeMap map =
      hng::train_map(split.train_features, train_attrs, o.ridge_lambda);
  hng::Predictions predictions =
      hng::predict(map, split.test_features, split.test_class_attrs);
  hng::ZscResult result =
      hng::evaluate(predictions, split.test_labels,
                    static_cast<int>(o.test_classes.size()));

  fs::path dir(o.out);
  fs::create_directories(dir);
  hng::save_zsc_result(result, dir / "zsc.csv");
  hng::save_confusion(result, dir / "confusion.csv");

  if (result.zero_projection_warnings > 0)
    std::cerr << "warning: " << result.zero_projection_warnings
              << " samples projected to the zero vector\n";
  std::cout << "mean per-class accuracy " << fmt4(result.mean_class_accuracy)
            << " over " << o.test_classes.size() << " test classes ("
            << split.test_labels.size() << " samples, "
            << (o.refine ? "refined" : "raw") << " training attributes) -> "
            << dir.string() << "\n";
  return 0;
}

int run_sweep(const Options& o) {
  if (o.features.empty() || o.labels.empty() || o.class_attrs.empty())
    throw UsageError("sweep-theta needs --features, --labels, and --class-attrs");
  if (o.thetas.empty()) throw UsageError("--thetas must not be empty");
  hng::FileFormat format = hng::format_from_string(o.format);
  hng::LoadedDataset data =
      hng::load_dataset(o.features, o.labels, o.class_attrs, format);
  Split split = make_split(o, data);

  // Graph and consistency are theta-independent; compute once, then sweep.
  hng::EmbedOptions embed;
  embed.target_max_norm = o.max_norm;
  hng::Metric metric = hng::metric_from_string(o.metric);
  hng::Topology topology = hng::topology_from_string(o.topology);
  hng::PoincarePointSet points =
      hng::embed_features(split.train_features, embed);
  Eigen::MatrixXd distances =
      hng::pairwise_distances(points, metric, o.threads);
  hng::NeighborhoodGraph graph =
      hng::build_graph(distances, topology, metric, o.threads);
  hng::EdgeWeights weights = hng::compute_edge_weights(graph, o.idw_p);
  hng::ConsistencyMatrices consistency = hng::neighborhood_consistency(
      split.train_attrs, weights, graph, o.threads);

  const double cells = static_cast<double>(split.train_attrs.rows()) *
                       static_cast<double>(split.train_attrs.cols());
  fs::path dir(o.out);
  fs::create_directories(dir);
  fs::path sweep_path = dir / "sweep.csv";
  std::ofstream out(sweep_path);
  if (!out)
    throw hng::DataError("cannot open '" + sweep_path.string() +
                         "' for writing");
  out << "theta,flip_fraction,mean_class_accuracy\n";
  for (double theta : o.thetas) {
    hng::RefineResult refined =
        hng::identify_and_refine(split.train_attrs, consistency, theta);
    hng::LinearAttributeMap map =
        hng::train_map(split.train_features, refined.refined, o.ridge_lambda);
    hng::Predictions predictions =
        hng::predict(map, split.test_features, split.test_class_attrs);
    hng::ZscResult result =
        hng::evaluate(predictions, split.test_labels,
                      static_cast<int>(o.test_classes.size()));
    double flip_fraction =
        static_cast<double>(refined.report.flipped.size()) / cells;
    out << fmt17(theta) << ',' << fmt17(flip_fraction) << ','
        << fmt17(result.mean_class_accuracy) << '\n';
  }
  if (!out) throw hng::DataError("write failed for '" + sweep_path.string() + "'");
  std::cout << "theta sweep: " << o.thetas.size() << " rows -> "
            << sweep_path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Denoises class-level binary attributes into per-image attributes by "
      "scoring neighborhood consistency on a relative neighborhood graph "
      "built under a hyperbolic (Poincare ball) metric, with a linear "
      "zero-shot classifier for evaluation."};
  app.require_subcommand(1);
  Options o;

  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", o.format, "Matrix file format")
        ->check(CLI::IsMember({"csv", "binary"}))
        ->capture_default_str();
  };
  auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  };
  auto add_graph_flags = [&](CLI::App* cmd) {
    cmd->add_option("--metric", o.metric, "Distance metric")
        ->check(CLI::IsMember({"hyperbolic", "euclidean"}))
        ->capture_default_str();
    cmd->add_option("--topology", o.topology, "Graph topology")
        ->check(CLI::IsMember({"rng", "relative_neighborhood", "complete"}))
        ->capture_default_str();
    cmd->add_option("--max-norm", o.max_norm,
                    "Largest embedded row norm, in (0, 1)")
        ->capture_default_str();
    cmd->add_option("--threads", o.threads,
                    "Worker threads, 0 = all available")
        ->capture_default_str();
  };
  auto add_refine_flags = [&](CLI::App* cmd) {
    cmd->add_option("--idw-p", o.idw_p, "Inverse-distance weight exponent")
        ->capture_default_str();
    cmd->add_option("--theta", o.theta, "Consistency threshold in [0, 1]")
        ->capture_default_str();
  };
  auto add_split_flags = [&](CLI::App* cmd) {
    cmd->add_option("--train-classes", o.train_classes,
                    "Comma-separated class ids the map trains on")
        ->delimiter(',');
    cmd->add_option("--test-classes", o.test_classes,
                    "Comma-separated held-out class ids")
        ->delimiter(',');
    cmd->add_option("--lambda", o.ridge_lambda, "Ridge regularizer, >= 0")
        ->capture_default_str();
    cmd->add_option("--image-attrs", o.image_attrs,
                    "Per-image attribute matrix over all samples");
  };

  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a clustered benchmark with planted attribute noise");
  synth->add_option("--clusters", o.clusters, "Cluster count")
      ->capture_default_str();
  synth->add_option("--per-cluster", o.per_cluster, "Points per cluster")
      ->capture_default_str();
  synth->add_option("--dim", o.dim, "Feature dimension")->capture_default_str();
  synth->add_option("--attrs", o.attrs, "Attribute count")
      ->capture_default_str();
  synth->add_option("--spread", o.spread, "Cluster standard deviation")
      ->capture_default_str();
  synth->add_option("--noise", o.noise, "Fraction of attribute cells to flip")
      ->capture_default_str();
  synth->add_option("--seed", o.seed, "Generator seed")->capture_default_str();
  add_format(synth);
  add_out(synth);

  CLI::App* build = app.add_subcommand(
      "build-graph", "Embed features and write the neighborhood graph");
  build->add_option("--features", o.features, "Feature matrix path");
  add_format(build);
  add_graph_flags(build);
  add_out(build);

  CLI::App* propagate = app.add_subcommand(
      "propagate", "Refine attributes by neighborhood consistency");
  propagate->add_option("--features", o.features, "Feature matrix path");
  propagate->add_option("--labels", o.labels, "Label path, one class id per line");
  propagate->add_option("--class-attrs", o.class_attrs,
                        "Class attribute matrix path");
  propagate->add_option("--image-attrs", o.image_attrs,
                        "Per-image attribute matrix path (overrides expansion)");
  propagate->add_option("--ground-truth", o.ground_truth,
                        "Clean attribute matrix for recovery metrics");
  propagate->add_option("--noise-mask", o.noise_mask,
                        "Planted-flip cell list for recovery metrics");
  add_format(propagate);
  add_graph_flags(propagate);
  add_refine_flags(propagate);
  add_out(propagate);

  CLI::App* eval = app.add_subcommand(
      "eval", "Zero-shot accuracy of a ridge map on held-out classes");
  eval->add_option("--features", o.features, "Feature matrix path");
  eval->add_option("--labels", o.labels, "Label path, one class id per line");
  eval->add_option("--class-attrs", o.class_attrs,
                   "Class attribute matrix path");
  add_format(eval);
  add_split_flags(eval);
  eval->add_flag("--refine", o.refine,
                 "Refine the training attributes before fitting the map");
  add_graph_flags(eval);
  add_refine_flags(eval);
  add_out(eval);

  CLI::App* sweep = app.add_subcommand(
      "sweep-theta", "Flip fraction and accuracy across consistency thresholds");
  sweep->add_option("--features", o.features, "Feature matrix path");
  sweep->add_option("--labels", o.labels, "Label path, one class id per line");
  sweep->add_option("--class-attrs", o.class_attrs,
                    "Class attribute matrix path");
  add_format(sweep);
  add_split_flags(sweep);
  add_graph_flags(sweep);
  sweep->add_option("--idw-p", o.idw_p, "Inverse-distance weight exponent")
      ->capture_default_str();
  sweep->add_option("--thetas", o.thetas, "Comma-separated threshold grid")
      ->delimiter(',');
  add_out(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand(synth)) return run_synth(o);
    if (app.got_subcommand(build)) return run_build_graph(o);
    if (app.got_subcommand(propagate)) return run_propagate(o);
    if (app.got_subcommand(eval)) return run_eval(o);
    if (app.got_subcommand(sweep)) return run_sweep(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const hng::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
