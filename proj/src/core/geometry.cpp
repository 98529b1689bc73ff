#include "hflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hflow/errors.hpp"

namespace hflow {

bool Point::finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void Space::require_point(const Point& p) const {
  if (p.size() != payload_size()) {
    throw InputError(name() + ": payload size " + std::to_string(p.size()) +
                     " does not match space payload size " + std::to_string(payload_size()));
  }
  if (!p.finite()) {
    throw InputError(name() + ": payload has non-finite entries");
  }
}

bool Space::points_equal(const Point& a, const Point& b, double tol) const {
  return distance(a, b) <= tol;
}

ComparisonTriangle comparison_triangle(double dxy, double dyz, double dzx) {
  if (dxy < 0 || dyz < 0 || dzx < 0) {
    throw InputError("comparison_triangle: side lengths must be nonnegative");
  }
  const double slack = 1e-9 * std::max({1.0, dxy, dyz, dzx});
  if (dxy + dyz < dzx - slack || dyz + dzx < dxy - slack || dzx + dxy < dyz - slack) {
    throw InputError("comparison_triangle: triangle inequality violated");
  }
  ComparisonTriangle tri;
  tri.x = {0.0, 0.0};
  tri.y = {dxy, 0.0};
  if (dxy == 0.0) {
    // x and y coincide; z sits on the axis at distance dzx (= dyz up to slack).
    tri.z = {dzx, 0.0};
    return tri;
  }
  const double zx = (dzx * dzx + dxy * dxy - dyz * dyz) / (2.0 * dxy);
  const double h2 = dzx * dzx - zx * zx;
  tri.z = {zx, h2 > 0.0 ? std::sqrt(h2) : 0.0};
  return tri;
}

std::array<double, 2> ComparisonTriangle::point_on_xy(double s) const {
  return {x[0] + s * (y[0] - x[0]), x[1] + s * (y[1] - x[1])};
}

std::array<double, 2> ComparisonTriangle::point_on_xz(double t) const {
  return {x[0] + t * (z[0] - x[0]), x[1] + t * (z[1] - x[1])};
}

double cat0_defect(const Space& space, const Point& x, const Point& y, const Point& z,
                   double s, double t) {
  if (s < 0.0 || s > 1.0 || t < 0.0 || t > 1.0) {
    throw InputError("cat0_defect: parameters must lie in [0,1]");
  }
  const Point a = space.interpolate(x, y, s);
  const Point b = space.interpolate(x, z, t);
  const ComparisonTriangle tri =
      comparison_triangle(space.distance(x, y), space.distance(y, z), space.distance(z, x));
  const auto abar = tri.point_on_xy(s);
  const auto bbar = tri.point_on_xz(t);
  const double flat = std::hypot(abar[0] - bbar[0], abar[1] - bbar[1]);
  return space.distance(a, b) - flat;
}

Point asymptotic_center(const Space& space, std::span<const Point> seq,
                        std::span<const Point> candidates) {
  if (seq.empty() || candidates.empty()) {
    throw InputError("asymptotic_center: sequence and candidate set must be nonempty");
  }
  const std::size_t tail_start = seq.size() / 2;  // max over the tail half
  double best = std::numeric_limits<double>::infinity();
  const Point* best_pt = &candidates[0];
  for (const Point& c : candidates) {
    double r = 0.0;
    for (std::size_t n = tail_start; n < seq.size(); ++n) {
      r = std::max(r, space.distance(c, seq[n]));
    }
    if (r < best) {
      best = r;
      best_pt = &c;
    }
  }
  return *best_pt;
}

namespace vec {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace vec

}  // namespace hflow
