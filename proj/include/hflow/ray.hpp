#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hflow/functional.hpp"
#include "hflow/geometry.hpp"

namespace hflow {

// Geodesic ray stored on the dyadic time grid {0, 1, 2, 4, ...}; positions
// between grid times come from geodesic interpolation in the owning space.
// Immutable; all operations are reentrant.
class Ray {
 public:
  Ray(SpacePtr space, std::vector<double> times, std::vector<Point> samples);

  // Ray from an explicit position map, sampled on the dyadic grid up to the
  // largest power of two <= t_max.
  static Ray from_generator(SpacePtr space, const std::function<Point(double)>& position,
                            double t_max);

  // Ray t -> base + t * direction in a space whose geodesics are linear in
  // the payload (Euclidean, toric).
  static Ray from_direction(SpacePtr space, const Point& base, const Point& direction,
                            double t_max);

  const SpacePtr& space() const { return space_; }
  const Point& base() const { return samples_.front(); }
  double speed() const { return speed_; }
  double t_max() const { return times_.back(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Point>& samples() const { return samples_; }

  bool trivial(double tol = 1e-12) const { return speed_ <= tol; }

  Point position(double t) const;

 private:
  SpacePtr space_;
  std::vector<double> times_;
  std::vector<Point> samples_;
  double speed_ = 0.0;
};

// d(position(0), position(1)); zero exactly for the trivial ray.
double ray_norm(const Ray& ray);

// Monotone-quotient estimates carry the last value and the last increment as
// the error bar; the quotient's monotonicity is checked, not assumed.
struct MonotoneLimitEstimate {
  double value = 0.0;
  double last_increment = 0.0;
  bool monotone = true;
  bool diverged = false;  // overflow guard tripped (radial value +infinity)
};

// Chordal distance lim_t d(l1_t, l2_t)/t over the shared dyadic grid up to
// t_max. The quotient is nondecreasing on CAT(0) spaces.
MonotoneLimitEstimate chordal_distance(const Ray& l1, const Ray& l2, double t_max);

// Radial slope lim_t F(l_t)/t via the nondecreasing difference quotients
// (F(l_t) - F(l_0))/t; +infinity when the ray leaves Dom F or the quotient
// exceeds the overflow guard.
MonotoneLimitEstimate radial_value(const Functional& f, const Ray& ray, double t_max);

struct RayGeodesicResult {
  Ray ray;
  bool stabilized = true;
  double last_move = 0.0;  // largest final sample movement across grid times
};

// Geodesic between rays sharing a base: for each output time T' <= T, the
// limit over t of the segment from the base to interpolate(l0_t, l1_t, s),
// reparameterized to T'. Samples are refined until they move < 1e-6.
RayGeodesicResult ray_geodesic(const Ray& l0, const Ray& l1, double s, double T);

// d^c(l, l^s)^2 - [(1-s) d^c(l,l0)^2 + s d^c(l,l1)^2 - s(1-s) d^c(l0,l1)^2]
// with l^s = ray_geodesic(l0, l1, s, .); nonpositive when the ray space
// satisfies the CAT(0) inequality.
double ray_cat0_defect(const Ray& l, const Ray& l0, const Ray& l1, double s);

// min over probes of the slope of F minus max(0, max over nontrivial rays of
// -radial/norm). Nonnegative up to estimation tolerance: the moment-weight
// inequality.
double moment_weight_gap(const Functional& f, std::span<const Ray> rays,
                         std::span<const Point> probes);

}  // namespace hflow
