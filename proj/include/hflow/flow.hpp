#pragma once

#include <utility>
#include <vector>

#include "hflow/functional.hpp"
#include "hflow/geometry.hpp"

namespace hflow {

// One proximal-chain run: nodes, values, slopes, and per-node diagnostic
// residuals. Values and slopes are nonincreasing along the chain; times start
// at 0. Immutable once returned.
struct FlowTrajectory {
  std::vector<double> times;
  std::vector<Point> points;
  std::vector<double> values;
  std::vector<double> slopes;
  std::vector<double> dist_from_start;
  // Diagnostics: entry k of evi_vs_start covers the step into node k (entry 0
  // is 0); entry k of energy_residual covers the step out of node k (last is 0).
  std::vector<double> evi_vs_start;
  std::vector<double> energy_residual;

  int m = 0;             // number of steps
  double step = 0.0;     // uniform step length
  double cauchy_gap = 0.0;
  bool cauchy_converged = false;
  int doublings = 0;

  std::size_t size() const { return times.size(); }
  const Point& start() const { return points.front(); }
  const Point& end() const { return points.back(); }
};

// m-fold proximal chain with step T/m from x0; node k sits at time kT/m.
FlowTrajectory mayer_flow(const Functional& g, const Point& x0, double T, int m);

// Doubles m until the chains at m and 2m differ by less than tol at every
// common node, then returns the finer chain with the final gap recorded.
// Throws NumericalError when m exceeds m_cap without meeting tol.
FlowTrajectory flow(const Functional& g, const Point& x0, double T, double tol,
                    int m_cap = 1 << 16);

struct LimitSlopeResult {
  double value = 0.0;     // limit of the slope along the flow
  bool converged = false;
  double last_delta = 0.0;
  FlowTrajectory trajectory;  // finest run, at the final horizon
};

// Limit of the slope along the flow: the slope at the final node, with the
// horizon doubled until successive estimates differ by less than tol. The
// slope sequence is nonincreasing, so the last value is the estimate.
LimitSlopeResult limit_slope(const Functional& g, const Point& x0, double horizon, double tol,
                             int m_cap = 1 << 16, int max_horizon_doublings = 16);

// Discrete evolution-variational-inequality residuals against the competitor
// v: per consecutive node pair, [d(c_{t+tau},v)^2 - d(c_t,v)^2]/(2 tau) -
// (G(v) - G(c_{t+tau})). Nonpositive for exact proximal steps.
std::vector<double> evi_residual(const Functional& g, const FlowTrajectory& traj, const Point& v);

// (lower_gap, upper_gap) of the two-sided slope bound between nodes t_idx <
// s_idx: slope(c_t) d(c_t,c_s) >= G(c_t) - G(c_s) >= slope(c_s) d(c_t,c_s).
std::pair<double, double> sandwich_check(const Functional& g, const FlowTrajectory& traj,
                                         std::size_t t_idx, std::size_t s_idx);

// Per node |(G(c_t) - G(c_{t+tau}))/tau - slope(c_t)^2|; tends to 0 under
// step refinement on smooth instances.
std::vector<double> energy_identity_residual(const Functional& g, const FlowTrajectory& traj);

// |limit slope from x0 - limit slope from y0|; bounded by 2 tol when both
// estimates converge (the limit is start-independent).
double bind_check(const Functional& g, const Point& x0, const Point& y0, double horizon,
                  double tol);

namespace detail {
// Points-only proximal chain, no diagnostics.
std::vector<Point> prox_chain(const Functional& g, const Point& x0, double tau, int steps);
// Fills values/slopes/dists/diagnostics of a trajectory whose times/points are set.
void finalize_trajectory(const Functional& g, FlowTrajectory& traj);
}  // namespace detail

}  // namespace hflow
