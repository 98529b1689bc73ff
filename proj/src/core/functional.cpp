#include "hflow/functional.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "hflow/errors.hpp"

namespace hflow {

std::span<const double> default_slope_schedule() {
  static const std::array<double, 3> schedule{1e-2, 5e-3, 2.5e-3};
  return schedule;
}

namespace {

// Neville extrapolation of (lambda_i, q_i) to lambda = 0.
double extrapolate_to_zero(std::span<const double> lambdas, std::span<const double> q) {
  std::vector<double> p(q.begin(), q.end());
  const std::size_t n = p.size();
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = 0; i + level < n; ++i) {
      const double l0 = lambdas[i];
      const double l1 = lambdas[i + level];
      p[i] = (l0 * p[i + 1] - l1 * p[i]) / (l0 - l1);
    }
  }
  return p[0];
}

}  // namespace

SlopeEstimate estimate_slope(const Functional& g, const Point& x,
                             std::span<const double> schedule, std::span<const Point> probes) {
  if (schedule.empty()) throw InputError("estimate_slope: empty step schedule");
  const double gx = g.value(x);
  if (!in_domain(gx)) throw InputError("estimate_slope: point outside the domain");
  const Space& space = *g.space();

  double payload_scale = 1.0;
  for (double c : x.data) payload_scale = std::max(payload_scale, std::abs(c));

  SlopeEstimate est;
  std::vector<double> lambdas;
  double prev_lambda = kPlusInfinity;
  auto push_quotient = [&](double lambda) {
    const Point p = g.prox(x, lambda);
    lambdas.push_back(lambda);
    est.quotients.push_back(space.distance(x, p) / lambda);
  };
  for (double lambda : schedule) {
    if (lambda <= 0.0 || lambda >= prev_lambda) {
      throw InputError("estimate_slope: schedule must be positive and decreasing");
    }
    prev_lambda = lambda;
    push_quotient(lambda);
  }

  // The quotient increases to the slope as the step shrinks. Keep shrinking
  // beyond the schedule while the increments stay above the plateau threshold
  // and the cancellation noise floor of d(x, prox)/lambda.
  const auto noise_floor = [&](double lambda) {
    return 64.0 * 1e-16 * payload_scale / lambda;
  };
  for (int extra = 0; extra < 16; ++extra) {
    const double lambda = lambdas.back();
    if (est.quotients.size() >= 2) {
      const double q = est.quotients.back();
      const double prev = est.quotients[est.quotients.size() - 2];
      const double incr = prev <= q ? q - prev : 0.0;
      if (incr <= std::max(1e-9 * (1.0 + q), noise_floor(lambda))) break;
    }
    const double next = lambda / 4.0;
    if (next < 1e-11) break;
    push_quotient(next);
  }

  // Monotonicity check, with slack for the noise floor at each step.
  for (std::size_t i = 1; i < est.quotients.size(); ++i) {
    const double slack = 1e-9 * (1.0 + est.quotients[i]) + noise_floor(lambdas[i]);
    if (est.quotients[i] < est.quotients[i - 1] - slack) est.monotone = false;
  }

  if (est.monotone && est.quotients.size() > 1) {
    const std::size_t tail = std::min<std::size_t>(3, est.quotients.size());
    const std::size_t off = est.quotients.size() - tail;
    est.value = extrapolate_to_zero(std::span(lambdas).subspan(off),
                                    std::span(est.quotients).subspan(off));
    // The limit is approached from below; never report less than the finest quotient.
    est.value = std::max(est.value, est.quotients.back());
  } else {
    est.value = est.quotients.back();
    est.warning = !est.monotone;
  }
  if (est.value < 0.0) est.value = 0.0;

  if (!probes.empty()) {
    double lb = 0.0;
    for (const Point& z : probes) {
      const double d = space.distance(x, z);
      if (d <= 0.0) continue;
      const double gz = g.value(z);
      if (!in_domain(gz)) continue;
      lb = std::max(lb, std::max(gx - gz, 0.0) / d);
    }
    est.probe_lower_bound = lb;
  }
  return est;
}

SlopeEstimate estimate_slope(const Functional& g, const Point& x) {
  return estimate_slope(g, x, default_slope_schedule());
}

double slope(const Functional& g, const Point& x) { return estimate_slope(g, x).value; }

}  // namespace hflow
