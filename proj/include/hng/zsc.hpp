#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <vector>

#include "hng/types.hpp"

namespace hng {

/// Linear map from d-dimensional features to M-dimensional attribute
/// embeddings, fit in closed form as the ridge minimizer of
/// |W X^T - A|^2 + lambda |W|^2.
struct LinearAttributeMap {
  Eigen::MatrixXd weights;  // M x d
  double ridge_lambda = 1.0;
};

LinearAttributeMap train_map(const Eigen::MatrixXd& features,
                             const BinaryMatrix& targets, double ridge_lambda);

struct Predictions {
  std::vector<int> labels;
  // Samples whose projection had zero norm; they fall back to class 0 by the
  // tie rule and are reported, not dropped.
  int zero_projection_count = 0;
};

/// Projects each test sample into attribute space and picks the class with
/// minimal cosine distance 1 - u.v/(|u||v|); ties go to the lowest index.
/// Class columns may be real-valued; all-zero columns are rejected.
Predictions predict(const LinearAttributeMap& map,
                    const Eigen::MatrixXd& test_features,
                    const Eigen::MatrixXd& class_attrs);

struct ZscResult {
  std::vector<double> per_class_accuracy;
  double mean_class_accuracy = 0.0;
  Eigen::MatrixXi confusion;  // row = true class, column = predicted
  int zero_projection_warnings = 0;
};

/// Per-class top-1 accuracies plus their unweighted mean over the
/// class_count test classes. Every class must appear in true_labels.
ZscResult evaluate(const Predictions& predictions,
                   const std::vector<int>& true_labels, int class_count);

/// CSV rows class_index,n_samples,n_correct,accuracy and a final
/// mean_class_accuracy summary line.
void save_zsc_result(const ZscResult& result, const std::filesystem::path& path);
/// Confusion counts as a plain CSV grid, true class per row.
void save_confusion(const ZscResult& result, const std::filesystem::path& path);

}  // namespace hng
