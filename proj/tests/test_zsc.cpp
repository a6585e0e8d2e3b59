#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "hng/errors.hpp"
#include "hng/types.hpp"
#include "hng/zsc.hpp"

namespace {

// Independent oracle: plain Gaussian elimination with partial pivoting.
Eigen::VectorXd gauss_solve(Eigen::MatrixXd a, Eigen::VectorXd b) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    for (Eigen::Index r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    a.row(col).swap(a.row(pivot));
    std::swap(b[col], b[pivot]);
    for (Eigen::Index r = col + 1; r < n; ++r) {
      double factor = a(r, col) / a(col, col);
      a.row(r) -= factor * a.row(col);
      b[r] -= factor * b[col];
    }
  }
  Eigen::VectorXd x(n);
  for (Eigen::Index col = n - 1; col >= 0; --col) {
    double s = b[col];
    for (Eigen::Index k = col + 1; k < n; ++k) s -= a(col, k) * x[k];
    x[col] = s / a(col, col);
  }
  return x;
}

Eigen::MatrixXd ridge_oracle(const Eigen::MatrixXd& features,
                             const hng::BinaryMatrix& targets, double lambda) {
  Eigen::MatrixXd gram = features.transpose() * features;
  gram.diagonal().array() += lambda;
  Eigen::MatrixXd attr = targets.cast<double>();
  Eigen::MatrixXd rhs = (attr * features).transpose();
  Eigen::MatrixXd weights(targets.rows(), features.cols());
  for (Eigen::Index m = 0; m < targets.rows(); ++m)
    weights.row(m) = gauss_solve(gram, rhs.col(m)).transpose();
  return weights;
}

hng::BinaryMatrix random_targets(std::mt19937& rng, int attr_count, int n) {
  std::uniform_int_distribution<int> coin(0, 1);
  hng::BinaryMatrix targets(attr_count, n);
  for (int m = 0; m < attr_count; ++m)
    for (int v = 0; v < n; ++v)
      targets(m, v) = static_cast<std::uint8_t>(coin(rng));
  return targets;
}

}  // namespace

TEST_SUITE("zsc") {

TEST_CASE("the ridge solution matches an elimination oracle") {
  std::mt19937 rng(307);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double lambda : {0.0, 0.5, 2.0}) {
    Eigen::MatrixXd features(40, 6);
    for (Eigen::Index r = 0; r < features.rows(); ++r)
      for (Eigen::Index c = 0; c < features.cols(); ++c)
        features(r, c) = gauss(rng);
    hng::BinaryMatrix targets = random_targets(rng, 5, 40);
    hng::LinearAttributeMap map = hng::train_map(features, targets, lambda);
    Eigen::MatrixXd expected = ridge_oracle(features, targets, lambda);
    CHECK((map.weights - expected).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(map.ridge_lambda == lambda);
  }
}

TEST_CASE("the training objective is stationary at the returned map") {
  std::mt19937 rng(311);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int instance = 0; instance < 10; ++instance) {
    Eigen::MatrixXd features(30 + instance, 5);
    for (Eigen::Index r = 0; r < features.rows(); ++r)
      for (Eigen::Index c = 0; c < features.cols(); ++c)
        features(r, c) = gauss(rng);
    hng::BinaryMatrix targets =
        random_targets(rng, 4, static_cast<int>(features.rows()));
    double lambda = instance % 2 ? 1.0 : 0.1;
    hng::LinearAttributeMap map = hng::train_map(features, targets, lambda);
    Eigen::MatrixXd residual = map.weights * features.transpose() -
                               targets.cast<double>();
    Eigen::MatrixXd gradient =
        2.0 * residual * features + 2.0 * lambda * map.weights;
    CHECK(gradient.cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("identity features at lambda zero return the targets exactly") {
  hng::BinaryMatrix targets(3, 4);
  targets << 1, 0, 1, 0,
             0, 0, 1, 1,
             1, 1, 1, 0;
  Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(4, 4);
  hng::LinearAttributeMap map = hng::train_map(identity, targets, 0.0);
  CHECK((map.weights.array() == targets.cast<double>().array()).all());
}

TEST_CASE("singular normal equations need a positive ridge") {
  // More dimensions than samples: the Gram matrix cannot be full rank.
  Eigen::MatrixXd features(3, 5);
  features << 1, 2, 3, 4, 5,
              2, 4, 6, 8, 10,
              0, 1, 0, 1, 0;
  hng::BinaryMatrix targets = hng::BinaryMatrix::Constant(2, 3, 1);
  CHECK_THROWS_AS(hng::train_map(features, targets, 0.0),
                  hng::IllConditionedError);
  CHECK_NOTHROW(hng::train_map(features, targets, 1.0));
  CHECK_THROWS_AS(hng::train_map(features, targets, -1.0),
                  hng::InvalidInputError);
}

TEST_CASE("prediction picks the nearest class by cosine") {
  hng::LinearAttributeMap map;
  map.weights = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd class_attrs(2, 2);
  class_attrs << 1, 0, 0, 1;
  Eigen::MatrixXd tests(3, 2);
  tests << 1.0, 0.1,
           0.1, 1.0,
           5.0, 0.0;
  hng::Predictions out = hng::predict(map, tests, class_attrs);
  REQUIRE(out.labels.size() == 3);
  CHECK(out.labels[0] == 0);
  CHECK(out.labels[1] == 1);
  CHECK(out.labels[2] == 0);
  CHECK(out.zero_projection_count == 0);
}

TEST_CASE("cosine matching ignores vector lengths") {
  hng::LinearAttributeMap map;
  map.weights = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd class_attrs(3, 2);
  class_attrs << 1, 0, 1, 1, 0, 1;
  Eigen::MatrixXd tests(1, 3);
  tests << 0.9, 1.1, 0.2;
  int baseline = hng::predict(map, tests, class_attrs).labels[0];

  Eigen::MatrixXd scaled_attrs = class_attrs * 7.0;
  CHECK(hng::predict(map, tests, scaled_attrs).labels[0] == baseline);
  Eigen::MatrixXd scaled_tests = tests * 3.0;
  CHECK(hng::predict(map, scaled_tests, class_attrs).labels[0] == baseline);
}

TEST_CASE("exact ties go to the lowest class index") {
  hng::LinearAttributeMap map;
  map.weights = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd class_attrs(2, 3);
  class_attrs << 1, 1, 1,
                 1, 1, 0;
  Eigen::MatrixXd tests(1, 2);
  tests << 3.0, 3.0;  // equidistant from the two identical columns
  CHECK(hng::predict(map, tests, class_attrs).labels[0] == 0);
}

TEST_CASE("zero projections fall back to class zero and are counted") {
  hng::LinearAttributeMap map;
  map.weights = Eigen::MatrixXd::Zero(2, 3);
  Eigen::MatrixXd class_attrs(2, 2);
  class_attrs << 1, 0, 0, 1;
  Eigen::MatrixXd tests = Eigen::MatrixXd::Random(4, 3);
  hng::Predictions out = hng::predict(map, tests, class_attrs);
  CHECK(out.zero_projection_count == 4);
  for (int label : out.labels) CHECK(label == 0);
}

TEST_CASE("prediction rejects unusable inputs") {
  hng::LinearAttributeMap map;
  map.weights = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd zero_column(2, 2);
  zero_column << 1, 0, 0, 0;
  Eigen::MatrixXd tests(1, 2);
  tests << 1, 1;
  CHECK_THROWS_AS(hng::predict(map, tests, zero_column),
                  hng::InvalidInputError);

  Eigen::MatrixXd good_attrs(2, 2);
  good_attrs << 1, 0, 0, 1;
  Eigen::MatrixXd wrong_dim(1, 3);
  wrong_dim << 1, 1, 1;
  CHECK_THROWS_AS(hng::predict(map, wrong_dim, good_attrs),
                  hng::InvalidInputError);
  Eigen::MatrixXd wrong_rows(3, 2);
  wrong_rows.setOnes();
  CHECK_THROWS_AS(hng::predict(map, tests, wrong_rows),
                  hng::InvalidInputError);
}

TEST_CASE("accuracy averages classes, not samples") {
  hng::Predictions predictions;
  predictions.labels = {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  std::vector<int> truth = {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1};
  hng::ZscResult result = hng::evaluate(predictions, truth, 2);
  CHECK(result.per_class_accuracy[0] == 1.0);
  CHECK(result.per_class_accuracy[1] == 0.0);
  CHECK(result.mean_class_accuracy == 0.5);  // pooled would be 10/12
  CHECK(result.confusion(0, 0) == 10);
  CHECK(result.confusion(1, 0) == 2);
  CHECK(result.confusion(1, 1) == 0);
}

TEST_CASE("evaluation validates labels and coverage") {
  hng::Predictions predictions;
  predictions.labels = {0, 1};
  CHECK_THROWS_AS(hng::evaluate(predictions, {0}, 2), hng::InvalidInputError);
  CHECK_THROWS_AS(hng::evaluate(predictions, {0, 2}, 2),
                  hng::InvalidInputError);
  // Class 1 has no samples: its accuracy is undefined.
  CHECK_THROWS_AS(hng::evaluate(predictions, {0, 0}, 2),
                  hng::InvalidInputError);
  predictions.labels = {0, 9};
  CHECK_THROWS_AS(hng::evaluate(predictions, {0, 1}, 2),
                  hng::InvalidInputError);
}

TEST_CASE("result files carry per-class rows plus a mean summary") {
  hng::Predictions predictions;
  predictions.labels = {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  std::vector<int> truth = {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1};
  hng::ZscResult result = hng::evaluate(predictions, truth, 2);

  namespace fs = std::filesystem;
  fs::path zsc_path = fs::temp_directory_path() / "hng_test_zsc.csv";
  hng::save_zsc_result(result, zsc_path);
  std::ifstream in(zsc_path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "class_index,n_samples,n_correct,accuracy");
  std::getline(in, line);
  CHECK(line == "0,10,10,1");
  std::getline(in, line);
  CHECK(line == "1,2,0,0");
  std::getline(in, line);
  CHECK(line == "mean,12,10,0.5");
  fs::remove(zsc_path);

  fs::path confusion_path = fs::temp_directory_path() / "hng_test_confusion.csv";
  hng::save_confusion(result, confusion_path);
  std::ifstream cin(confusion_path);
  std::getline(cin, line);
  CHECK(line == "10,0");
  std::getline(cin, line);
  CHECK(line == "2,0");
  fs::remove(confusion_path);
}

}  // TEST_SUITE
