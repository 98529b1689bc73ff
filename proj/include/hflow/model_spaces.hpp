#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>

#include "hflow/functional.hpp"
#include "hflow/geometry.hpp"

namespace hflow {

// Flat R^n with the Euclidean metric.
class EuclideanSpace final : public Space {
 public:
  explicit EuclideanSpace(std::size_t dim) : dim_(dim) {}

  std::string name() const override { return "euclidean(" + std::to_string(dim_) + ")"; }
  std::size_t payload_size() const override { return dim_; }
  double distance(const Point& a, const Point& b) const override;
  Point interpolate(const Point& a, const Point& b, double s) const override;

 private:
  std::size_t dim_;
};

// Metric tree with three half-lines glued at the origin. Payload is
// (branch, radius) with branch in {1,2,3} and radius >= 0; radius 0 is the
// origin on every branch.
class TripodSpace final : public Space {
 public:
  std::string name() const override { return "tripod"; }
  std::size_t payload_size() const override { return 2; }
  double distance(const Point& a, const Point& b) const override;
  Point interpolate(const Point& a, const Point& b, double s) const override;

  // Decodes and validates a payload; throws InputError on a bad branch id or
  // negative radius.
  static std::pair<int, double> decode(const Point& p);
  static Point encode(int branch, double r) { return Point{static_cast<double>(branch), r}; }
};

// Closed-form answers an instance is built to reproduce.
struct AnalyticAnswers {
  double limit_slope = 0.0;            // B
  bool escaping = false;               // whether the flow escapes to infinity
  std::optional<Point> ray_direction;  // unit direction of the optimal ray (flat spaces)
  std::optional<int> ray_branch;       // tripod branch of the optimal ray
  bool unstable = false;               // max(0, sup -F(l)/||l||) > 0
};

struct ModelInstance {
  SpacePtr space;
  FunctionalPtr f;
  FunctionalPtr g;  // == f except in two-functional mode
  AnalyticAnswers analytic;
};

// Euclidean instances: tag in {"linear", "quadratic", "abs", "exp_linear",
// "pair", "valley"}. linear takes the gradient vector as params (dimension =
// param count); the others are one-dimensional unless params supplies a
// dimension. Functionals come with closed-form prox maps and analytic slopes.
ModelInstance make_euclidean(const std::string& tag, std::span<const double> params);

// Tripod instance with branch-linear functional G((i,r)) = alpha_i * r.
// Requires pairwise sums alpha_i + alpha_j >= 0 (convexity across branches)
// and, unless allow_tie, a unique most-negative slope.
ModelInstance make_tripod(const std::array<double, 3>& alpha, bool allow_tie = false);

}  // namespace hflow
