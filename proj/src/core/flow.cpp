#include "hflow/flow.hpp"

#include <algorithm>
#include <cmath>

#include "hflow/errors.hpp"

namespace hflow {

namespace detail {

std::vector<Point> prox_chain(const Functional& g, const Point& x0, double tau, int steps) {
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(steps) + 1);
  pts.push_back(x0);
  for (int k = 0; k < steps; ++k) {
    try {
      pts.push_back(g.prox(pts.back(), tau));
    } catch (const NumericalError& e) {
      throw NumericalError("prox chain failed at step " + std::to_string(k + 1) + ": " + e.what(),
                           e.residual());
    }
  }
  return pts;
}

void finalize_trajectory(const Functional& g, FlowTrajectory& traj) {
  const Space& space = *g.space();
  const std::size_t n = traj.points.size();
  traj.values.resize(n);
  traj.slopes.resize(n);
  traj.dist_from_start.resize(n);
  traj.evi_vs_start.assign(n, 0.0);
  traj.energy_residual.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    traj.values[k] = g.value(traj.points[k]);
    traj.slopes[k] = estimate_slope(g, traj.points[k]).value;
    traj.dist_from_start[k] = space.distance(traj.points.front(), traj.points[k]);
  }
  for (std::size_t k = 1; k < n; ++k) {
    const double tau = traj.times[k] - traj.times[k - 1];
    const double d1 = traj.dist_from_start[k];
    const double d0 = traj.dist_from_start[k - 1];
    traj.evi_vs_start[k] =
        (d1 * d1 - d0 * d0) / (2.0 * tau) - (traj.values.front() - traj.values[k]);
    traj.energy_residual[k - 1] =
        std::abs((traj.values[k - 1] - traj.values[k]) / tau -
                 traj.slopes[k - 1] * traj.slopes[k - 1]);
  }
}

}  // namespace detail

FlowTrajectory mayer_flow(const Functional& g, const Point& x0, double T, int m) {
  if (T <= 0.0) throw InputError("mayer_flow: horizon must be positive");
  if (m <= 0) throw InputError("mayer_flow: step count must be positive");
  if (!in_domain(g.value(x0))) throw InputError("mayer_flow: start outside the domain");

  FlowTrajectory traj;
  traj.m = m;
  traj.step = T / m;
  traj.points = detail::prox_chain(g, x0, traj.step, m);
  traj.times.resize(traj.points.size());
  for (std::size_t k = 0; k < traj.times.size(); ++k) traj.times[k] = T * double(k) / m;
  detail::finalize_trajectory(g, traj);
  return traj;
}

FlowTrajectory flow(const Functional& g, const Point& x0, double T, double tol, int m_cap) {
  if (tol <= 0.0) throw InputError("flow: tolerance must be positive");
  if (!in_domain(g.value(x0))) throw InputError("flow: start outside the domain");
  const Space& space = *g.space();

  std::vector<Point> prev = detail::prox_chain(g, x0, T, 1);
  int doublings = 0;
  double gap = kPlusInfinity;
  for (int m = 2; m <= m_cap; m *= 2) {
    std::vector<Point> cur = detail::prox_chain(g, x0, T / m, m);
    ++doublings;
    gap = 0.0;
    double travel = 0.0;
    for (std::size_t k = 0; k < prev.size(); ++k) {
      gap = std::max(gap, space.distance(cur[2 * k], prev[k]));
      travel = std::max(travel, space.distance(cur.front(), cur[2 * k]));
    }
    // Cauchy criterion at the scale of the trajectory's travel; an absolute
    // tol would force m to grow with the start offset.
    if (gap < tol * (1.0 + travel)) {
      FlowTrajectory traj;
      traj.m = m;
      traj.step = T / m;
      traj.points = std::move(cur);
      traj.times.resize(traj.points.size());
      for (std::size_t k = 0; k < traj.times.size(); ++k) traj.times[k] = T * double(k) / m;
      traj.cauchy_gap = gap;
      traj.cauchy_converged = true;
      traj.doublings = doublings;
      detail::finalize_trajectory(g, traj);
      return traj;
    }
    prev = std::move(cur);
  }
  throw NumericalError("flow: refinement cap " + std::to_string(m_cap) +
                           " reached before the chains were Cauchy",
                       gap);
}

LimitSlopeResult limit_slope(const Functional& g, const Point& x0, double horizon, double tol,
                             int m_cap, int max_horizon_doublings) {
  if (horizon <= 0.0) throw InputError("limit_slope: horizon must be positive");
  if (tol <= 0.0) throw InputError("limit_slope: tolerance must be positive");

  const double flow_tol = 0.5 * tol;
  LimitSlopeResult res;
  res.trajectory = flow(g, x0, horizon, flow_tol, m_cap);
  res.value = res.trajectory.slopes.back();
  double H = horizon;
  for (int k = 0; k < max_horizon_doublings; ++k) {
    H *= 2.0;
    FlowTrajectory next = flow(g, x0, H, flow_tol, m_cap);
    const double b = next.slopes.back();
    res.last_delta = std::abs(b - res.value);
    res.value = b;
    res.trajectory = std::move(next);
    if (res.last_delta < tol) {
      res.converged = true;
      return res;
    }
  }
  res.converged = false;
  return res;
}

std::vector<double> evi_residual(const Functional& g, const FlowTrajectory& traj,
                                 const Point& v) {
  if (!in_domain(g.value(v))) throw InputError("evi_residual: competitor outside the domain");
  const Space& space = *g.space();
  const double gv = g.value(v);
  std::vector<double> out;
  out.reserve(traj.size() - 1);
  double d_prev = space.distance(traj.points.front(), v);
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double tau = traj.times[k] - traj.times[k - 1];
    const double d_cur = space.distance(traj.points[k], v);
    out.push_back((d_cur * d_cur - d_prev * d_prev) / (2.0 * tau) - (gv - traj.values[k]));
    d_prev = d_cur;
  }
  return out;
}

std::pair<double, double> sandwich_check(const Functional& g, const FlowTrajectory& traj,
                                         std::size_t t_idx, std::size_t s_idx) {
  if (t_idx > s_idx || s_idx >= traj.size()) {
    throw InputError("sandwich_check: need t_idx <= s_idx < size");
  }
  const double d = g.space()->distance(traj.points[t_idx], traj.points[s_idx]);
  const double drop = traj.values[t_idx] - traj.values[s_idx];
  const double lower_gap = traj.slopes[t_idx] * d - drop;
  const double upper_gap = drop - traj.slopes[s_idx] * d;
  return {lower_gap, upper_gap};
}

std::vector<double> energy_identity_residual(const Functional& g, const FlowTrajectory& traj) {
  (void)g;
  std::vector<double> out;
  out.reserve(traj.size() - 1);
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    out.push_back(traj.energy_residual[k]);
  }
  return out;
}

double bind_check(const Functional& g, const Point& x0, const Point& y0, double horizon,
                  double tol) {
  const LimitSlopeResult a = limit_slope(g, x0, horizon, tol);
  const LimitSlopeResult b = limit_slope(g, y0, horizon, tol);
  return std::abs(a.value - b.value);
}

}  // namespace hflow
