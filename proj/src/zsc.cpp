#include "hng/zsc.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "hng/errors.hpp"

namespace hng {

LinearAttributeMap train_map(const Eigen::MatrixXd& features,
                             const BinaryMatrix& targets, double ridge_lambda) {
  const Eigen::Index n = features.rows();
  const Eigen::Index dim = features.cols();
  if (n < 1 || dim < 1) throw InvalidInputError("feature matrix must be non-empty");
  if (targets.cols() != n)
    throw InvalidInputError("target matrix has " + std::to_string(targets.cols()) +
                            " columns but there are " + std::to_string(n) +
                            " feature rows");
  if (targets.rows() < 1) throw InvalidInputError("target matrix has no rows");
  if (!features.allFinite())
    throw InvalidInputError("feature matrix contains non-finite values");
  if (!(ridge_lambda >= 0.0) || !std::isfinite(ridge_lambda))
    throw InvalidInputError("ridge_lambda must be a nonnegative real");

  Eigen::MatrixXd attr = targets.cast<double>();
  Eigen::MatrixXd gram = features.transpose() * features;
  gram.diagonal().array() += ridge_lambda;
  Eigen::MatrixXd rhs = (attr * features).transpose();  // d x M

  LinearAttributeMap map;
  map.ridge_lambda = ridge_lambda;
  if (ridge_lambda > 0.0) {
    map.weights = gram.ldlt().solve(rhs).transpose();
  } else {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    if (!lu.isInvertible())
      throw IllConditionedError(
          "normal equations are singular at ridge_lambda = 0; "
          "use a positive ridge_lambda");
    map.weights = lu.solve(rhs).transpose();
  }
  return map;
}

Predictions predict(const LinearAttributeMap& map,
                    const Eigen::MatrixXd& test_features,
                    const Eigen::MatrixXd& class_attrs) {
  const Eigen::Index class_count = class_attrs.cols();
  if (class_count < 1) throw InvalidInputError("need at least one test class");
  if (class_attrs.rows() != map.weights.rows())
    throw InvalidInputError("class attribute rows do not match the trained map");
  if (test_features.cols() != map.weights.cols())
    throw InvalidInputError("test feature dimension does not match the trained map");
  if (!test_features.allFinite() || !class_attrs.allFinite())
    throw InvalidInputError("non-finite values in test inputs");

  Eigen::VectorXd class_norms(class_count);
  for (Eigen::Index k = 0; k < class_count; ++k) {
    class_norms[k] = class_attrs.col(k).norm();
    if (class_norms[k] == 0.0)
      throw InvalidInputError("class attribute column " + std::to_string(k) +
                              " is all zero; cosine distance is undefined");
  }

  Predictions out;
  out.labels.resize(static_cast<std::size_t>(test_features.rows()));
  for (Eigen::Index s = 0; s < test_features.rows(); ++s) {
    Eigen::VectorXd projection = map.weights * test_features.row(s).transpose();
    double norm = projection.norm();
    if (norm == 0.0) {
      ++out.zero_projection_count;
      out.labels[static_cast<std::size_t>(s)] = 0;
      continue;
    }
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < class_count; ++k) {
      double cosine =
          projection.dot(class_attrs.col(k)) / (norm * class_norms[k]);
      double dist = 1.0 - cosine;
      if (dist < best_dist) {
        best_dist = dist;
        best = static_cast<int>(k);
      }
    }
    out.labels[static_cast<std::size_t>(s)] = best;
  }
  return out;
}

ZscResult evaluate(const Predictions& predictions,
                   const std::vector<int>& true_labels, int class_count) {
  if (predictions.labels.size() != true_labels.size())
    throw InvalidInputError("prediction and label counts differ");
  if (true_labels.empty()) throw InvalidInputError("no samples to evaluate");
  if (class_count < 1) throw InvalidInputError("class_count must be positive");

  ZscResult result;
  result.zero_projection_warnings = predictions.zero_projection_count;
  result.confusion = Eigen::MatrixXi::Zero(class_count, class_count);

  std::vector<int> totals(static_cast<std::size_t>(class_count), 0);
  std::vector<int> correct(static_cast<std::size_t>(class_count), 0);
  for (std::size_t s = 0; s < true_labels.size(); ++s) {
    int truth = true_labels[s];
    int pred = predictions.labels[s];
    if (truth < 0 || truth >= class_count)
      throw InvalidInputError("true label " + std::to_string(truth) +
                              " outside [0, " + std::to_string(class_count) + ")");
    if (pred < 0 || pred >= class_count)
      throw InvalidInputError("prediction " + std::to_string(pred) +
                              " outside [0, " + std::to_string(class_count) + ")");
    ++totals[static_cast<std::size_t>(truth)];
    if (pred == truth) ++correct[static_cast<std::size_t>(truth)];
    ++result.confusion(truth, pred);
  }

  result.per_class_accuracy.resize(static_cast<std::size_t>(class_count));
  double sum = 0.0;
  for (int c = 0; c < class_count; ++c) {
    if (totals[static_cast<std::size_t>(c)] == 0)
      throw InvalidInputError("class " + std::to_string(c) +
                              " has no samples; per-class accuracy is undefined");
    double acc = static_cast<double>(correct[static_cast<std::size_t>(c)]) /
                 totals[static_cast<std::size_t>(c)];
    result.per_class_accuracy[static_cast<std::size_t>(c)] = acc;
    sum += acc;
  }
  result.mean_class_accuracy = sum / class_count;
  return result;
}

void save_zsc_result(const ZscResult& result, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out << "class_index,n_samples,n_correct,accuracy\n";
  char buf[32];
  int total_samples = 0;
  int total_correct = 0;
  for (std::size_t c = 0; c < result.per_class_accuracy.size(); ++c) {
    int n_c = result.confusion.row(static_cast<Eigen::Index>(c)).sum();
    int correct = result.confusion(static_cast<Eigen::Index>(c),
                                   static_cast<Eigen::Index>(c));
    total_samples += n_c;
    total_correct += correct;
    std::snprintf(buf, sizeof buf, "%.17g", result.per_class_accuracy[c]);
    out << c << ',' << n_c << ',' << correct << ',' << buf << '\n';
  }
  std::snprintf(buf, sizeof buf, "%.17g", result.mean_class_accuracy);
  out << "mean," << total_samples << ',' << total_correct << ',' << buf << '\n';
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

void save_confusion(const ZscResult& result, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  for (Eigen::Index r = 0; r < result.confusion.rows(); ++r) {
    for (Eigen::Index c = 0; c < result.confusion.cols(); ++c) {
      if (c > 0) out << ',';
      out << result.confusion(r, c);
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace hng
