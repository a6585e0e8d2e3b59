#include "hng/geometry.hpp"

#include <cmath>
#include <utility>

#include "hng/errors.hpp"
#include "hng/parallel.hpp"

namespace hng {

std::string to_string(Metric m) {
  return m == Metric::hyperbolic ? "hyperbolic" : "euclidean";
}

Metric metric_from_string(const std::string& s) {
  if (s == "hyperbolic") return Metric::hyperbolic;
  if (s == "euclidean") return Metric::euclidean;
  throw InvalidInputError("unknown metric '" + s + "'");
}

namespace {

void check_inside_ball(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (!x.allFinite()) throw InvalidInputError("point has non-finite coordinates");
  if (x.norm() >= 1.0)
    throw DomainError("point lies on or outside the unit ball (|x| = " +
                      std::to_string(x.norm()) + ")");
}

// Eq. 2 on precomputed squared norms. The argument is clamped to >= 1 to
// absorb rounding before acosh.
double poincare_distance(const Eigen::Ref<const Eigen::RowVectorXd>& a, double a_sq,
                         const Eigen::Ref<const Eigen::RowVectorXd>& b, double b_sq) {
  double diff_sq = (a - b).squaredNorm();
  double arg = 1.0 + 2.0 * diff_sq / ((1.0 - a_sq) * (1.0 - b_sq));
  if (arg < 1.0) arg = 1.0;
  return std::acosh(arg);
}

}  // namespace

PoincarePoint::PoincarePoint(Eigen::VectorXd coords) : coords_(std::move(coords)) {
  check_inside_ball(coords_);
}

PoincarePointSet::PoincarePointSet(Eigen::MatrixXd coords, double scale_factor)
    : coords_(std::move(coords)), scale_factor_(scale_factor) {
  if (coords_.rows() < 1 || coords_.cols() < 1)
    throw InvalidInputError("point set must be non-empty with dimension >= 1");
  if (!(scale_factor_ > 0.0))
    throw InvalidInputError("scale_factor must be positive");
  for (Eigen::Index i = 0; i < coords_.rows(); ++i)
    check_inside_ball(coords_.row(i).transpose());
}

PoincarePoint PoincarePointSet::point(Eigen::Index i) const {
  return PoincarePoint(coords_.row(i).transpose());
}

PoincarePointSet embed_features(const Eigen::MatrixXd& features,
                                const EmbedOptions& options) {
  if (features.rows() < 1 || features.cols() < 1)
    throw InvalidInputError("feature matrix must be non-empty");
  if (!features.allFinite())
    throw InvalidInputError("feature matrix contains non-finite values");
  if (!(options.target_max_norm > 0.0) || !(options.target_max_norm < 1.0))
    throw InvalidInputError("target_max_norm must lie in (0, 1)");

  Eigen::MatrixXd rows = features;
  if (options.center) rows.rowwise() -= features.colwise().mean();

  double max_norm = rows.rowwise().norm().maxCoeff();
  if (max_norm == 0.0)
    throw DegenerateInputError(
        options.center
            ? "all feature rows coincide; nothing to embed after centering"
            : "all-zero feature matrix cannot be embedded");

  double multiplier = options.target_max_norm / max_norm;
  rows *= multiplier;
  return PoincarePointSet(std::move(rows), multiplier);
}

double hyperbolic_distance(const Eigen::Ref<const Eigen::VectorXd>& a,
                           const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size())
    throw InvalidInputError("dimension mismatch: " + std::to_string(a.size()) +
                            " vs " + std::to_string(b.size()));
  check_inside_ball(a);
  check_inside_ball(b);
  return poincare_distance(a.transpose(), a.squaredNorm(), b.transpose(),
                           b.squaredNorm());
}

double hyperbolic_distance(const PoincarePoint& a, const PoincarePoint& b) {
  if (a.dim() != b.dim())
    throw InvalidInputError("dimension mismatch: " + std::to_string(a.dim()) +
                            " vs " + std::to_string(b.dim()));
  return poincare_distance(a.coords().transpose(), a.coords().squaredNorm(),
                           b.coords().transpose(), b.coords().squaredNorm());
}

Eigen::MatrixXd pairwise_distances(const PoincarePointSet& points, Metric metric,
                                   int threads) {
  const Eigen::Index n = points.size();
  if (n < 2)
    throw InsufficientDataError("pairwise distances need at least 2 points");

  const Eigen::MatrixXd& coords = points.coords();
  Eigen::VectorXd sq_norms = coords.rowwise().squaredNorm();
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);

  parallel_for(0, n, threads, [&](std::int64_t i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double d = metric == Metric::hyperbolic
                     ? poincare_distance(coords.row(i), sq_norms[i],
                                         coords.row(j), sq_norms[j])
                     : (coords.row(i) - coords.row(j)).norm();
      dist(i, j) = d;
      dist(j, i) = d;
    }
  });
  return dist;
}

}  // namespace hng
