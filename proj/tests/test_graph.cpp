#include <doctest.h>

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "hng/errors.hpp"
#include "hng/geometry.hpp"
#include "hng/graph.hpp"

namespace {

namespace fs = std::filesystem;

// Literal reading of the relative-neighborhood rule: (i, j) survives unless
// some third point is strictly closer to both endpoints.
std::vector<std::pair<int, int>> brute_force_rng(const Eigen::MatrixXd& d) {
  const int n = static_cast<int>(d.rows());
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      bool blocked = false;
      for (int k = 0; k < n && !blocked; ++k) {
        if (k == i || k == j) continue;
        if (std::max(d(i, k), d(j, k)) < d(i, j)) blocked = true;
      }
      if (!blocked) edges.emplace_back(i, j);
    }
  }
  return edges;
}

// Prim's algorithm; with generic (tie-free) distances the MST is unique.
std::vector<std::pair<int, int>> prim_mst(const Eigen::MatrixXd& d) {
  const int n = static_cast<int>(d.rows());
  std::vector<bool> in_tree(n, false);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n, -1);
  best[0] = 0.0;
  std::vector<std::pair<int, int>> edges;
  for (int step = 0; step < n; ++step) {
    int next = -1;
    for (int v = 0; v < n; ++v)
      if (!in_tree[v] && (next == -1 || best[v] < best[next])) next = v;
    in_tree[next] = true;
    if (parent[next] >= 0)
      edges.emplace_back(std::min(parent[next], next),
                         std::max(parent[next], next));
    for (int v = 0; v < n; ++v)
      if (!in_tree[v] && d(next, v) < best[v]) {
        best[v] = d(next, v);
        parent[v] = next;
      }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

Eigen::MatrixXd random_coords(std::mt19937& rng, int n, int dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> radius(0.05, 0.93);
  Eigen::MatrixXd coords(n, dim);
  for (int r = 0; r < n; ++r) {
    Eigen::VectorXd direction(dim);
    for (int c = 0; c < dim; ++c) direction[c] = gauss(rng);
    double norm = direction.norm();
    if (norm == 0.0) direction[0] = norm = 1.0;
    coords.row(r) = (direction * (radius(rng) / norm)).transpose();
  }
  return coords;
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / name;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("construction matches the brute-force rule on random sets") {
  std::mt19937 rng(101);
  std::uniform_int_distribution<int> size(2, 50);
  for (int instance = 0; instance < 60; ++instance) {
    int n = size(rng);
    int dim = instance % 2 ? 2 : 8;
    hng::PoincarePointSet points(random_coords(rng, n, dim), 1.0);
    for (hng::Metric metric :
         {hng::Metric::hyperbolic, hng::Metric::euclidean}) {
      Eigen::MatrixXd d = hng::pairwise_distances(points, metric);
      hng::NeighborhoodGraph graph = hng::build_graph(d, hng::Topology::relative_neighborhood, metric);
      CHECK(graph.edges == brute_force_rng(d));
    }
  }
}

TEST_CASE("every instance is connected with the spanning tree inside it") {
  std::mt19937 rng(103);
  std::uniform_int_distribution<int> size(3, 40);
  for (int instance = 0; instance < 40; ++instance) {
    int n = size(rng);
    hng::PoincarePointSet points(random_coords(rng, n, 3), 1.0);
    Eigen::MatrixXd d = hng::pairwise_distances(points, hng::Metric::hyperbolic);
    hng::NeighborhoodGraph graph = hng::build_graph(d);
    hng::GraphStats stats = hng::graph_stats(graph);
    CHECK(stats.connected);
    CHECK(stats.min_degree >= 1);
    for (const auto& edge : prim_mst(d))
      CHECK(std::binary_search(graph.edges.begin(), graph.edges.end(), edge));
  }
}

TEST_CASE("edge set is invariant under increasing distance transforms") {
  std::mt19937 rng(107);
  hng::PoincarePointSet points(random_coords(rng, 30, 4), 1.0);
  Eigen::MatrixXd d = hng::pairwise_distances(points, hng::Metric::hyperbolic);
  std::vector<std::pair<int, int>> baseline = hng::build_graph(d).edges;

  Eigen::MatrixXd root = d.array().sqrt();
  CHECK(hng::build_graph(root).edges == baseline);

  Eigen::MatrixXd squashed = d.array() / (1.0 + d.array());
  CHECK(hng::build_graph(squashed).edges == baseline);
}

TEST_CASE("the metric can change which neighbors are relative") {
  // Two points near the boundary at 40 degrees apart, the origin, and a
  // filler point. Euclidean: the boundary pair is mutually close. In the
  // ball metric the path near the origin is far shorter than the arc, so
  // the origin blocks that edge.
  Eigen::MatrixXd coords(4, 2);
  double angle = 40.0 * std::acos(-1.0) / 180.0;
  coords << 0.9, 0.0,
      0.9 * std::cos(angle), 0.9 * std::sin(angle),
      0.0, 0.0,
      -0.3, 0.0;
  hng::PoincarePointSet points(coords, 1.0);

  Eigen::MatrixXd euclid =
      hng::pairwise_distances(points, hng::Metric::euclidean);
  Eigen::MatrixXd hyper =
      hng::pairwise_distances(points, hng::Metric::hyperbolic);
  auto euclid_edges = hng::build_graph(euclid, hng::Topology::relative_neighborhood,
                                       hng::Metric::euclidean).edges;
  auto hyper_edges = hng::build_graph(hyper).edges;

  std::pair<int, int> boundary_pair{0, 1};
  CHECK(std::count(euclid_edges.begin(), euclid_edges.end(), boundary_pair) == 1);
  CHECK(std::count(hyper_edges.begin(), hyper_edges.end(), boundary_pair) == 0);
}

TEST_CASE("complete topology keeps every pair") {
  std::mt19937 rng(109);
  hng::PoincarePointSet points(random_coords(rng, 9, 3), 1.0);
  Eigen::MatrixXd d = hng::pairwise_distances(points, hng::Metric::hyperbolic);
  hng::NeighborhoodGraph graph =
      hng::build_graph(d, hng::Topology::complete);
  CHECK(graph.edges.size() == 9 * 8 / 2);
  for (const auto& [i, j] : graph.edges)
    CHECK(graph.edge_length(i, j) == d(i, j));
}

TEST_CASE("two vertices always share their single edge") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 1) = d(1, 0) = 1.5;
  hng::NeighborhoodGraph graph = hng::build_graph(d);
  REQUIRE(graph.edges.size() == 1);
  CHECK(graph.edges[0] == std::pair<int, int>{0, 1});
  CHECK(graph.edge_length(0, 1) == 1.5);

  // Coincident points: zero distance still yields the edge.
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
  CHECK(hng::build_graph(zero).edges.size() == 1);
}

TEST_CASE("distance ties admit the edge") {
  // Equilateral triangle: the third point is never strictly closer to both.
  Eigen::MatrixXd d(3, 3);
  d << 0, 1, 1, 1, 0, 1, 1, 1, 0;
  CHECK(hng::build_graph(d).edges.size() == 3);
}

TEST_CASE("collinear points under euclidean distance form a path") {
  Eigen::MatrixXd coords(4, 1);
  coords << 0.0, 0.1, 0.35, 0.8;
  hng::PoincarePointSet points(coords, 1.0);
  Eigen::MatrixXd d = hng::pairwise_distances(points, hng::Metric::euclidean);
  hng::NeighborhoodGraph graph = hng::build_graph(
      d, hng::Topology::relative_neighborhood, hng::Metric::euclidean);
  std::vector<std::pair<int, int>> path{{0, 1}, {1, 2}, {2, 3}};
  CHECK(graph.edges == path);
  hng::GraphStats stats = hng::graph_stats(graph);
  CHECK(stats.min_degree == 1);
  CHECK(stats.max_degree == 2);
  CHECK(stats.mean_degree == doctest::Approx(1.5));
  CHECK(stats.connected);
}

TEST_CASE("malformed distance matrices are rejected") {
  Eigen::MatrixXd rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(hng::build_graph(rect), hng::InvalidInputError);

  Eigen::MatrixXd single = Eigen::MatrixXd::Zero(1, 1);
  CHECK_THROWS_AS(hng::build_graph(single), hng::InsufficientDataError);

  Eigen::MatrixXd diag(2, 2);
  diag << 0.5, 1, 1, 0;
  CHECK_THROWS_AS(hng::build_graph(diag), hng::InvalidInputError);

  Eigen::MatrixXd negative(2, 2);
  negative << 0, -1, -1, 0;
  CHECK_THROWS_AS(hng::build_graph(negative), hng::InvalidInputError);

  Eigen::MatrixXd asym(3, 3);
  asym << 0, 1, 2, 1, 0, 3, 2, 3.0000001, 0;
  CHECK_THROWS_AS(hng::build_graph(asym), hng::InvalidInputError);

  Eigen::MatrixXd nan(2, 2);
  nan << 0, std::nan(""), std::nan(""), 0;
  CHECK_THROWS_AS(hng::build_graph(nan), hng::InvalidInputError);
}

TEST_CASE("thread count never changes the graph") {
  std::mt19937 rng(113);
  hng::PoincarePointSet points(random_coords(rng, 42, 3), 1.0);
  Eigen::MatrixXd d = hng::pairwise_distances(points, hng::Metric::hyperbolic);
  hng::NeighborhoodGraph serial =
      hng::build_graph(d, hng::Topology::relative_neighborhood,
                       hng::Metric::hyperbolic, 1);
  for (int threads : {2, 5}) {
    hng::NeighborhoodGraph parallel =
        hng::build_graph(d, hng::Topology::relative_neighborhood,
                         hng::Metric::hyperbolic, threads);
    CHECK(parallel.edges == serial.edges);
    CHECK(parallel.neighbor_lengths == serial.neighbor_lengths);
  }
}

TEST_CASE("saved graphs load back identically") {
  std::mt19937 rng(127);
  hng::PoincarePointSet points(random_coords(rng, 25, 4), 1.0);
  Eigen::MatrixXd d = hng::pairwise_distances(points, hng::Metric::hyperbolic);
  hng::NeighborhoodGraph graph = hng::build_graph(d);

  fs::path path = temp_file("hng_test_graph_roundtrip.txt");
  hng::save_graph(graph, path);
  hng::NeighborhoodGraph loaded = hng::load_graph(path);
  CHECK(loaded.vertex_count == graph.vertex_count);
  CHECK(loaded.metric == graph.metric);
  CHECK(loaded.topology == graph.topology);
  CHECK(loaded.edges == graph.edges);
  CHECK(loaded.adjacency == graph.adjacency);
  // 17 significant digits reproduce doubles exactly.
  CHECK(loaded.neighbor_lengths == graph.neighbor_lengths);
  fs::remove(path);
}

TEST_CASE("the graph file header spells out size, metric, and topology") {
  Eigen::MatrixXd d(2, 2);
  d << 0, 2, 2, 0;
  hng::NeighborhoodGraph graph = hng::build_graph(
      d, hng::Topology::relative_neighborhood, hng::Metric::hyperbolic);
  fs::path path = temp_file("hng_test_graph_header.txt");
  hng::save_graph(graph, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "HNG 2 1 hyperbolic relative_neighborhood");
  fs::remove(path);
}

TEST_CASE("corrupt graph files are named in the error") {
  fs::path path = temp_file("hng_test_graph_corrupt.txt");
  {
    std::ofstream out(path);
    out << "BOGUS 2 1 hyperbolic relative_neighborhood\n0 1 1.0\n";
  }
  CHECK_THROWS_AS(hng::load_graph(path), hng::DataError);
  {
    std::ofstream out(path);
    out << "HNG 3 2 hyperbolic relative_neighborhood\n0 1 1.0\n";
  }
  CHECK_THROWS_AS(hng::load_graph(path), hng::DataError);
  {
    std::ofstream out(path);
    out << "HNG 3 2 hyperbolic relative_neighborhood\n0 1 1.0\n0 1 1.0\n";
  }
  CHECK_THROWS_AS(hng::load_graph(path), hng::DataError);
  CHECK_THROWS_AS(hng::load_graph(temp_file("hng_test_graph_missing.txt")),
                  hng::DataError);
  fs::remove(path);
}

TEST_CASE("absent edges raise on length lookup") {
  Eigen::MatrixXd coords(3, 1);
  coords << 0.0, 0.1, 0.3;
  hng::PoincarePointSet points(coords, 1.0);
  hng::NeighborhoodGraph graph = hng::build_graph(
      hng::pairwise_distances(points, hng::Metric::euclidean),
      hng::Topology::relative_neighborhood, hng::Metric::euclidean);
  CHECK(graph.edge_length(0, 1) > 0.0);
  CHECK_THROWS_AS(graph.edge_length(0, 2), hng::InvalidInputError);
}

TEST_CASE("stats flag a disconnected hand-built graph") {
  hng::NeighborhoodGraph graph;
  graph.vertex_count = 4;
  graph.edges = {{0, 1}, {2, 3}};
  graph.adjacency = {{1}, {0}, {3}, {2}};
  graph.neighbor_lengths = {{1.0}, {1.0}, {2.0}, {2.0}};
  hng::GraphStats stats = hng::graph_stats(graph);
  CHECK_FALSE(stats.connected);
  CHECK(stats.edge_count == 2);
}

TEST_CASE("topology names round-trip and accept the short alias") {
  CHECK(hng::topology_from_string("rng") == hng::Topology::relative_neighborhood);
  CHECK(hng::topology_from_string("relative_neighborhood") ==
        hng::Topology::relative_neighborhood);
  CHECK(hng::topology_from_string("complete") == hng::Topology::complete);
  CHECK(hng::to_string(hng::Topology::relative_neighborhood) ==
        "relative_neighborhood");
  CHECK(hng::to_string(hng::Topology::complete) == "complete");
  CHECK_THROWS_AS(hng::topology_from_string("gabriel"), hng::InvalidInputError);
}

}  // TEST_SUITE
