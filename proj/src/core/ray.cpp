#include "hflow/ray.hpp"

#include <algorithm>
#include <cmath>

#include "hflow/errors.hpp"

namespace hflow {

namespace {

constexpr double kOverflowGuard = 1e8;

std::vector<double> dyadic_grid(double t_max) {
  if (t_max < 1.0) throw InputError("ray: t_max must be at least 1");
  std::vector<double> ts{0.0, 1.0};
  while (ts.back() * 2.0 <= t_max * (1.0 + 1e-12)) ts.push_back(ts.back() * 2.0);
  return ts;
}

}  // namespace

Ray::Ray(SpacePtr space, std::vector<double> times, std::vector<Point> samples)
    : space_(std::move(space)), times_(std::move(times)), samples_(std::move(samples)) {
  if (times_.size() != samples_.size() || times_.size() < 2 || times_.front() != 0.0) {
    throw InputError("ray: need matching samples on a grid starting at 0");
  }
  for (const Point& p : samples_) space_->require_point(p);
  speed_ = space_->distance(position(0.0), position(std::min(1.0, times_.back())));
  if (times_.back() < 1.0) speed_ /= times_.back();
}

Ray Ray::from_generator(SpacePtr space, const std::function<Point(double)>& position,
                        double t_max) {
  std::vector<double> ts = dyadic_grid(t_max);
  std::vector<Point> samples;
  samples.reserve(ts.size());
  for (double t : ts) samples.push_back(position(t));
  return Ray(std::move(space), std::move(ts), std::move(samples));
}

Ray Ray::from_direction(SpacePtr space, const Point& base, const Point& direction,
                        double t_max) {
  space->require_point(base);
  space->require_point(direction);
  return from_generator(
      space,
      [&](double t) {
        Point p = base;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] += t * direction[i];
        return p;
      },
      t_max);
}

Point Ray::position(double t) const {
  if (t < 0.0 || t > times_.back() * (1.0 + 1e-12)) {
    throw InputError("ray: time outside the stored range");
  }
  t = std::min(t, times_.back());
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  const std::size_t hi = std::min<std::size_t>(it - times_.begin(), times_.size() - 1);
  if (times_[hi] == t) return samples_[hi];
  const std::size_t lo = hi == 0 ? 0 : hi - 1;
  const double span = times_[hi] - times_[lo];
  return space_->interpolate(samples_[lo], samples_[hi], (t - times_[lo]) / span);
}

double ray_norm(const Ray& ray) { return ray.speed(); }

MonotoneLimitEstimate chordal_distance(const Ray& l1, const Ray& l2, double t_max) {
  MonotoneLimitEstimate est;
  const double top = std::min({t_max, l1.t_max(), l2.t_max()});
  double prev_q = -1.0;
  double q = 0.0;
  bool any = false;
  for (double t = 1.0; t <= top * (1.0 + 1e-12); t *= 2.0) {
    prev_q = any ? q : prev_q;
    q = l1.space()->distance(l1.position(t), l2.position(t)) / t;
    if (any && q < prev_q - 1e-9 * (1.0 + q)) est.monotone = false;
    any = true;
  }
  if (!any) throw InputError("chordal_distance: no common grid times");
  est.value = q;
  est.last_increment = prev_q < 0.0 ? 0.0 : q - prev_q;
  return est;
}

MonotoneLimitEstimate radial_value(const Functional& f, const Ray& ray, double t_max) {
  MonotoneLimitEstimate est;
  const double base_value = f.value(ray.base());
  if (!in_domain(base_value)) {
    est.value = kPlusInfinity;
    est.diverged = true;
    return est;
  }
  const double top = std::min(t_max, ray.t_max());
  double prev_chord = -kPlusInfinity;
  double chord = 0.0;
  double prev_t = 0.0;
  double prev_value = base_value;
  bool any = false;
  for (double t = 1.0; t <= top * (1.0 + 1e-12); t *= 2.0) {
    const double value = f.value(ray.position(t));
    if (!in_domain(value)) {
      est.value = kPlusInfinity;
      est.diverged = true;
      return est;
    }
    prev_chord = any ? chord : prev_chord;
    chord = (value - prev_value) / (t - prev_t);
    if (any && chord < prev_chord - 1e-9 * (1.0 + std::abs(chord))) est.monotone = false;
    if (chord > kOverflowGuard) {
      est.value = kPlusInfinity;
      est.diverged = true;
      return est;
    }
    prev_t = t;
    prev_value = value;
    any = true;
  }
  if (!any) throw InputError("radial_value: ray stores no positive times");
  est.value = chord;
  est.last_increment = prev_chord == -kPlusInfinity ? 0.0 : chord - prev_chord;
  return est;
}

RayGeodesicResult ray_geodesic(const Ray& l0, const Ray& l1, double s, double T) {
  if (s < 0.0 || s > 1.0) throw InputError("ray_geodesic: s outside [0,1]");
  const Space& space = *l0.space();
  if (space.distance(l0.base(), l1.base()) > 1e-9) {
    throw InputError("ray_geodesic: rays must share the base point");
  }
  const Point& base = l0.base();
  const double top = std::min({T, l0.t_max(), l1.t_max()});
  std::vector<double> ts = dyadic_grid(top);

  RayGeodesicResult res{Ray(l0.space(), {0.0, 1.0}, {base, base})};
  std::vector<Point> samples;
  samples.reserve(ts.size());
  samples.push_back(base);
  double worst_move = 0.0;
  bool all_stable = true;
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const double tp = ts[k];
    Point cur;
    double move = kPlusInfinity;
    bool first = true;
    for (double t = tp; t <= top * (1.0 + 1e-12); t *= 2.0) {
      const Point mid = space.interpolate(l0.position(t), l1.position(t), s);
      const double len = space.distance(base, mid);
      const Point cand = len > 0.0 ? space.interpolate(base, mid, std::min(1.0, tp / t)) : base;
      if (!first) {
        move = space.distance(cand, cur);
        cur = cand;
        if (move < 1e-6) break;
      } else {
        cur = cand;
        first = false;
      }
    }
    if (move == kPlusInfinity) move = 0.0;  // single admissible t; nothing to compare
    worst_move = std::max(worst_move, move);
    all_stable = all_stable && move < 1e-6;
    samples.push_back(cur);
  }
  res.ray = Ray(l0.space(), std::move(ts), std::move(samples));
  res.stabilized = all_stable;
  res.last_move = worst_move;
  return res;
}

double ray_cat0_defect(const Ray& l, const Ray& l0, const Ray& l1, double s) {
  const double top = std::min({l.t_max(), l0.t_max(), l1.t_max()});
  const Ray ls = ray_geodesic(l0, l1, s, top).ray;
  const double d_ls = chordal_distance(l, ls, top).value;
  const double d_l0 = chordal_distance(l, l0, top).value;
  const double d_l1 = chordal_distance(l, l1, top).value;
  const double d_01 = chordal_distance(l0, l1, top).value;
  return d_ls * d_ls -
         ((1.0 - s) * d_l0 * d_l0 + s * d_l1 * d_l1 - s * (1.0 - s) * d_01 * d_01);
}

double moment_weight_gap(const Functional& f, std::span<const Ray> rays,
                         std::span<const Point> probes) {
  if (probes.empty()) throw InputError("moment_weight_gap: need at least one probe point");
  double min_slope = kPlusInfinity;
  for (const Point& p : probes) {
    min_slope = std::min(min_slope, estimate_slope(f, p).value);
  }
  double best_ratio = 0.0;  // the trivial ray contributes 0
  for (const Ray& ray : rays) {
    const double norm = ray_norm(ray);
    if (norm <= 1e-12) continue;
    const MonotoneLimitEstimate rad = radial_value(f, ray, ray.t_max());
    if (rad.diverged) continue;  // -radial = -infinity never attains the max
    best_ratio = std::max(best_ratio, -rad.value / norm);
  }
  return min_slope - best_ratio;
}

}  // namespace hflow
