#pragma once

#include <Eigen/Core>
#include <string>

namespace hng {

// Distance used for the pairwise matrix and the graph built from it.
// euclidean exists for the neighborhood-graph ablation.
enum class Metric { hyperbolic, euclidean };

std::string to_string(Metric m);
Metric metric_from_string(const std::string& s);

/// A point strictly inside the open unit ball. The norm invariant is checked
/// at construction and never again.
class PoincarePoint {
public:
  explicit PoincarePoint(Eigen::VectorXd coords);

  const Eigen::VectorXd& coords() const { return coords_; }
  Eigen::Index dim() const { return coords_.size(); }

private:
  Eigen::VectorXd coords_;
};

/// N points of common dimension inside the unit ball, stored row-major, plus
/// the multiplier that mapped the raw features onto the ball.
class PoincarePointSet {
public:
  PoincarePointSet(Eigen::MatrixXd coords, double scale_factor);

  Eigen::Index size() const { return coords_.rows(); }
  Eigen::Index dim() const { return coords_.cols(); }
  const Eigen::MatrixXd& coords() const { return coords_; }
  double scale_factor() const { return scale_factor_; }
  PoincarePoint point(Eigen::Index i) const;

private:
  Eigen::MatrixXd coords_;
  double scale_factor_;
};

struct EmbedOptions {
  double target_max_norm = 0.9;
  bool center = false;
};

/// Globally rescales feature rows so the largest row norm lands at
/// target_max_norm, keeping every point strictly inside the ball with margin.
/// Row order is preserved; scale_factor records the multiplier.
PoincarePointSet embed_features(const Eigen::MatrixXd& features,
                                const EmbedOptions& options = {});

/// Poincare-ball distance: arcosh(1 + 2|a-b|^2 / ((1-|a|^2)(1-|b|^2))).
/// The expression is evaluated symmetrically, so d(a,b) == d(b,a) exactly.
double hyperbolic_distance(const PoincarePoint& a, const PoincarePoint& b);
double hyperbolic_distance(const Eigen::Ref<const Eigen::VectorXd>& a,
                           const Eigen::Ref<const Eigen::VectorXd>& b);

/// Full N x N distance matrix in the chosen metric. Symmetric with an exactly
/// zero diagonal; rows decompose into independent blocks, so the computation
/// parallelizes without changing the result.
Eigen::MatrixXd pairwise_distances(const PoincarePointSet& points,
                                   Metric metric = Metric::hyperbolic,
                                   int threads = 0);

}  // namespace hng
