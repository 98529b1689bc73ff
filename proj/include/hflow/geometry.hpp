#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hflow {

// A point of some metric space. The payload layout is owned by the space the
// point belongs to (Euclidean coordinates, tripod (branch, radius), toric
// potential samples). Payloads must stay finite.
struct Point {
  std::vector<double> data;

  Point() = default;
  explicit Point(std::vector<double> d) : data(std::move(d)) {}
  Point(std::initializer_list<double> d) : data(d) {}

  std::size_t size() const { return data.size(); }
  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  bool finite() const;
};

// Geodesic metric space: a distance and a constant-speed geodesic
// interpolation. Implementations are immutable after construction and safe
// to share across threads.
class Space {
 public:
  virtual ~Space() = default;

  virtual std::string name() const = 0;
  virtual std::size_t payload_size() const = 0;

  virtual double distance(const Point& a, const Point& b) const = 0;

  // Point at parameter s in [0,1] on the geodesic from a to b, with
  // d(interpolate(a,b,s), interpolate(a,b,t)) = |s-t| d(a,b).
  virtual Point interpolate(const Point& a, const Point& b, double s) const = 0;

  // Shape + finiteness check; throws InputError on mismatch.
  void require_point(const Point& p) const;

  bool points_equal(const Point& a, const Point& b, double tol = 1e-12) const;
};

using SpacePtr = std::shared_ptr<const Space>;

// Flat triangle with the three given side lengths, embedded with the first
// vertex at the origin, the second on the positive horizontal axis, the third
// in the closed upper half-plane.
struct ComparisonTriangle {
  std::array<double, 2> x, y, z;

  std::array<double, 2> point_on_xy(double s) const;  // companion of interpolate(x,y,s)
  std::array<double, 2> point_on_xz(double t) const;
};

ComparisonTriangle comparison_triangle(double dxy, double dyz, double dzx);

// d(a,b) - |abar - bbar| for a = interpolate(x,y,s), b = interpolate(x,z,t)
// and their companion points in the flat comparison triangle. Non-positive
// (up to tolerance) on every CAT(0) space; identically zero on flat spaces.
double cat0_defect(const Space& space, const Point& x, const Point& y, const Point& z,
                   double s, double t);

// Candidate minimizing r(c) = limsup_n d(c, x_n), with the limsup replaced by
// the max over the tail half of the sequence. Test oracle for weak limits.
Point asymptotic_center(const Space& space, std::span<const Point> seq,
                        std::span<const Point> candidates);

namespace vec {
double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double dist(std::span<const double> a, std::span<const double> b);
}  // namespace vec

}  // namespace hflow
