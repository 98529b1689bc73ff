#include "hflow/destabilizer.hpp"

#include <algorithm>
#include <cmath>

#include "hflow/errors.hpp"

namespace hflow {

std::string to_string(FlowClass c) { return c == FlowClass::Bounded ? "bounded" : "escaping"; }

EscapeDecision escape_test(const FlowTrajectory& traj, double threshold) {
  if (threshold <= 0.0) throw InputError("escape_test: threshold must be positive");
  EscapeDecision dec;
  dec.distance = traj.dist_from_start.back();
  const double t_half = 0.5 * traj.times.back();
  double r_half = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (traj.times[k] <= t_half) r_half = traj.dist_from_start[k];
  }
  dec.last_increment = dec.distance - r_half;
  if (dec.distance > threshold) {
    if (dec.last_increment >= 0.05 * dec.distance) {
      dec.cls = FlowClass::Escaping;
    } else {
      dec.cls = FlowClass::Bounded;  // far out but no longer moving
      dec.inconclusive = true;
    }
  }
  return dec;
}

namespace {

// Indices of the first nodes past distance 2, 4, 8, ... from the base on the
// escaping tail. Using the suffix minimum of the distances skips nodes the
// flow visited before its closest approach to the base.
std::vector<std::size_t> extraction_schedule(const Space& space, const FlowTrajectory& traj,
                                             const Point& base) {
  const std::size_t n = traj.size();
  std::vector<double> suffix_min(n);
  double running = kPlusInfinity;
  for (std::size_t k = n; k-- > 0;) {
    running = std::min(running, space.distance(base, traj.points[k]));
    suffix_min[k] = running;
  }
  std::vector<std::size_t> idx;
  double target = 2.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (suffix_min[k] >= target) {
      if (idx.empty() || idx.back() != k) idx.push_back(k);
      while (suffix_min[k] >= target) target *= 2.0;
    }
  }
  return idx;
}

}  // namespace

ExtractionResult extract_ray(const Functional& f, const FlowTrajectory& traj,
                             std::span<const std::size_t> node_indices,
                             const Point* base_override) {
  const Space& space = *f.space();
  if (node_indices.empty()) throw InputError("extract_ray: empty extraction schedule");
  const Point& base = base_override ? *base_override : traj.points[std::min<std::size_t>(1, traj.size() - 1)];

  std::vector<double> dists;
  dists.reserve(node_indices.size());
  for (std::size_t k : node_indices) {
    if (k >= traj.size()) throw InputError("extract_ray: node index out of range");
    dists.push_back(space.distance(base, traj.points[k]));
  }
  const double d_last = dists.back();
  if (d_last < 2.0) throw InputError("extract_ray: trajectory does not reach distance 2");

  // Stored ray times 1, 2, 4, ... up to half the reached distance.
  double s_max = 1.0;
  while (s_max * 4.0 <= d_last) s_max *= 2.0;

  std::vector<double> times{0.0};
  std::vector<Point> samples{base};
  ExtractionResult res{Ray(f.space(), {0.0, 1.0}, {base, base})};
  res.extraction_distances = dists;

  for (double s = 1.0; s <= s_max; s *= 2.0) {
    Point prev, cur;
    double move = -1.0, prev_move = -1.0;
    bool have_prev = false;
    for (std::size_t j = 0; j < node_indices.size(); ++j) {
      if (dists[j] < s) continue;
      const Point cand = space.interpolate(base, traj.points[node_indices[j]], s / dists[j]);
      if (have_prev) {
        prev_move = move;
        move = space.distance(cand, cur);
        prev = cur;
      }
      cur = cand;
      have_prev = true;
    }
    if (!have_prev) break;
    if (move < 0.0) move = 0.0;  // single admissible node
    res.max_move = std::max(res.max_move, move);
    if (move >= 1e-5) {
      res.stabilized = false;
      const double ratio = prev_move > 0.0 ? move / prev_move : 1.0;
      if (ratio <= 0.8) {
        // Geometric tail: add the remaining sum of increments along the last
        // step direction.
        const double extra = ratio / (1.0 - ratio);
        Point limit = cur;
        for (std::size_t i = 0; i < limit.size(); ++i) {
          limit[i] += extra * (cur[i] - prev[i]);
        }
        cur = std::move(limit);
        res.extrapolated = true;
      } else if (move > 1e-4) {
        throw NumericalError(
            "extract_ray: segment samples at time " + std::to_string(s) +
                " oscillate (non-uniqueness or insufficient horizon)",
            move);
      }
    }
    times.push_back(s);
    samples.push_back(std::move(cur));
  }
  if (times.size() < 2) throw InputError("extract_ray: could not stabilize any ray sample");
  res.ray = Ray(f.space(), std::move(times), std::move(samples));
  return res;
}

namespace {

void check_two_functional_hypotheses(const Functional& f, const Functional& g,
                                     const FlowTrajectory& traj) {
  if (&f == &g) return;
  const double scale = 1.0 + std::abs(traj.values.front());
  double prev_g = kPlusInfinity;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double fv = traj.values[k];
    const double gv = g.value(traj.points[k]);
    if (fv > gv + 1e-9 * scale) {
      throw InputError("sharpness_report: hypothesis F <= G fails at flow node " +
                       std::to_string(k));
    }
    if (k > 0 && gv > prev_g + 1e-8 * scale) {
      throw InputError(
          "sharpness_report: hypothesis 'G decreasing along the flow of F' fails at node " +
          std::to_string(k));
    }
    prev_g = gv;
  }
}

// Continue the chain with the trajectory's own step until the distance from
// the given base reaches the target.
void extend_chain(const Functional& f, FlowTrajectory& traj, const Point& base,
                  double target_dist, long max_steps) {
  const Space& space = *f.space();
  const Point start = traj.points.front();  // points reallocates while we append
  long steps = 0;
  double window_start_dist = space.distance(base, traj.points.back());
  while (space.distance(base, traj.points.back()) < target_dist && steps < max_steps) {
    const Point next = f.prox(traj.points.back(), traj.step);
    const double t = traj.times.back() + traj.step;
    traj.points.push_back(next);
    traj.times.push_back(t);
    traj.values.push_back(f.value(next));
    traj.slopes.push_back(estimate_slope(f, next).value);
    traj.dist_from_start.push_back(space.distance(start, next));
    traj.evi_vs_start.push_back(0.0);
    traj.energy_residual.push_back(0.0);
    ++steps;
    if (steps % 1024 == 0) {
      const double d = space.distance(base, traj.points.back());
      if (d - window_start_dist < 1e-9) break;  // no longer escaping; give up extending
      window_start_dist = d;
    }
  }
  traj.m = static_cast<int>(traj.points.size()) - 1;
}

}  // namespace

SharpnessReport sharpness_report(const Functional& f, const Functional& g, const Point& x0,
                                 double horizon, double tol, const SharpnessOptions& opts) {
  if (!in_domain(g.value(x0))) {
    throw InputError("sharpness_report: start outside the domain of G");
  }
  if (f.value(x0) > g.value(x0) + 1e-9 * (1.0 + std::abs(g.value(x0)))) {
    throw InputError("sharpness_report: hypothesis F <= G fails at the start point");
  }

  SharpnessReport rep;
  rep.horizon = horizon;
  rep.tol = tol;

  LimitSlopeResult ls = limit_slope(f, x0, horizon, tol, opts.m_cap);
  rep.limit_slope = ls.value;
  rep.limit_slope_converged = ls.converged;
  rep.limit_slope_delta = ls.last_delta;
  if (!ls.converged) rep.flags.push_back("limit_slope_unconverged");
  rep.trajectory = std::move(ls.trajectory);

  check_two_functional_hypotheses(f, g, rep.trajectory);

  const EscapeDecision esc = escape_test(rep.trajectory, opts.escape_threshold);
  rep.cls = esc.cls;
  rep.escape_distance = esc.distance;
  if (esc.inconclusive) rep.flags.push_back("escape_inconclusive");

  if (rep.cls == FlowClass::Bounded) {
    rep.ratio = 0.0;
    rep.norm = 0.0;
    rep.gap = rep.limit_slope;
    rep.unstable = false;
    return rep;
  }

  const Point base = rep.trajectory.points[1];
  extend_chain(f, rep.trajectory, base, opts.extraction_distance, opts.max_extension_steps);
  check_two_functional_hypotheses(f, g, rep.trajectory);
  if (f.space()->distance(base, rep.trajectory.points.back()) < opts.extraction_distance) {
    rep.flags.push_back("extension_short");
  }

  const std::vector<std::size_t> schedule =
      extraction_schedule(*f.space(), rep.trajectory, base);
  ExtractionResult ext = extract_ray(f, rep.trajectory, schedule, &base);
  if (!ext.stabilized) rep.flags.push_back("ray_samples_extrapolated");

  rep.norm = ray_norm(ext.ray);
  const MonotoneLimitEstimate rad = radial_value(f, ext.ray, ext.ray.t_max());
  rep.ratio = rad.diverged ? -kPlusInfinity : -rad.value / rep.norm;
  rep.ratio_error_bar = std::abs(rad.last_increment) / std::max(rep.norm, 1e-12);
  rep.ray = std::move(ext.ray);
  rep.gap = rep.limit_slope - std::max(0.0, rep.ratio);
  rep.unstable = std::max(0.0, rep.ratio) > tol;
  return rep;
}

double uniqueness_probe(const Functional& f, const Functional& g, std::span<const Point> starts,
                        double horizon, double tol, const SharpnessOptions& opts) {
  if (starts.empty()) throw InputError("uniqueness_probe: need at least one start");

  std::vector<FlowTrajectory> trajs;
  trajs.reserve(starts.size());
  for (const Point& x0 : starts) {
    LimitSlopeResult ls = limit_slope(f, x0, horizon, tol, opts.m_cap);
    check_two_functional_hypotheses(f, g, ls.trajectory);
    if (escape_test(ls.trajectory, opts.escape_threshold).cls == FlowClass::Bounded) {
      return 0.0;  // bounded flows carry no escaping ray to compare
    }
    trajs.push_back(std::move(ls.trajectory));
  }

  // Re-extract every ray from one shared base so chordal distances compare
  // like with like.
  const Point base = trajs.front().points[1];
  std::vector<Ray> rays;
  rays.reserve(trajs.size());
  for (FlowTrajectory& traj : trajs) {
    extend_chain(f, traj, base, opts.extraction_distance, opts.max_extension_steps);
    const std::vector<std::size_t> schedule = extraction_schedule(*f.space(), traj, base);
    rays.push_back(extract_ray(f, traj, schedule, &base).ray);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    for (std::size_t j = i + 1; j < rays.size(); ++j) {
      const double top = std::min(rays[i].t_max(), rays[j].t_max());
      worst = std::max(worst, chordal_distance(rays[i], rays[j], top).value);
    }
  }
  return worst;
}

}  // namespace hflow
