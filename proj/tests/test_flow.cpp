#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hflow/errors.hpp"
#include "hflow/flow.hpp"
#include "hflow/model_spaces.hpp"
#include "hflow/rng.hpp"

using namespace hflow;

namespace {

// Closed-form chain for the quadratic on the line: x_k = x0 (1 + tau)^{-k}.
double quadratic_chain_oracle(double x0, double T, int m) {
  return x0 * std::pow(1.0 + T / m, -m);
}

}  // namespace

TEST_CASE("mayer chain examples") {
  const ModelInstance quad = make_euclidean("quadratic", {});
  const FlowTrajectory one = mayer_flow(*quad.f, Point{2.0}, 1.0, 1);
  CHECK(one.points.back()[0] == doctest::Approx(1.0));

  // Linear flows are reproduced exactly at any resolution.
  const ModelInstance lin = make_euclidean("linear", std::vector<double>{3, 4});
  for (int m : {1, 5, 32}) {
    const FlowTrajectory t = mayer_flow(*lin.f, {0.0, 0.0}, 2.0, m);
    CHECK(t.points.back()[0] == doctest::Approx(-6.0).epsilon(1e-12));
    CHECK(t.points.back()[1] == doctest::Approx(-8.0).epsilon(1e-12));
  }

  // The chain equals its closed form, and refines toward e^{-1}.
  for (int m : {64, 1024}) {
    const FlowTrajectory t = mayer_flow(*quad.f, Point{1.0}, 1.0, m);
    CHECK(t.points.back()[0] ==
          doctest::Approx(quadratic_chain_oracle(1.0, 1.0, m)).epsilon(1e-12));
  }
  CHECK(quadratic_chain_oracle(1.0, 1.0, 64) == doctest::Approx(0.3707349329).epsilon(1e-9));
  CHECK(std::abs(quadratic_chain_oracle(1.0, 1.0, 1024) - std::exp(-1.0)) < 2e-4);

  CHECK_THROWS_AS(mayer_flow(*quad.f, Point{1.0}, -1.0, 4), InputError);
  CHECK_THROWS_AS(mayer_flow(*quad.f, Point{1.0}, 1.0, 0), InputError);
}

TEST_CASE("refined flow meets its closed forms") {
  const ModelInstance quad = make_euclidean("quadratic", {});
  const FlowTrajectory t = flow(*quad.f, Point{1.0}, 1.0, 1e-4);
  CHECK(std::abs(t.points.back()[0] - std::exp(-1.0)) < 2e-4);
  CHECK(t.cauchy_converged);

  // Unit-speed descent reaches the minimizer at t = 2 and stays there.
  const ModelInstance abs1 = make_euclidean("abs", {});
  const FlowTrajectory ta = flow(*abs1.f, Point{2.0}, 3.0, 1e-6);
  CHECK(ta.points.back()[0] == doctest::Approx(0.0));
  const FlowTrajectory tm = mayer_flow(*abs1.f, Point{2.0}, 3.0, 48);
  for (std::size_t k = 0; k < tm.size(); ++k) {
    if (tm.times[k] >= 2.0) CHECK(tm.points[k][0] == doctest::Approx(0.0));
    if (tm.times[k] <= 2.0 - 1e-12) CHECK(tm.points[k][0] > 0.0);
  }

  // Linear: the scheme is exact, so the first doubling converges.
  const ModelInstance lin = make_euclidean("linear", std::vector<double>{3, 4});
  const FlowTrajectory tl = flow(*lin.f, {0.0, 0.0}, 2.0, 1e-9);
  CHECK(tl.doublings == 1);
  CHECK(tl.cauchy_gap <= 1e-12);
}

TEST_CASE("limit slope") {
  const ModelInstance quad = make_euclidean("quadratic", {});
  const LimitSlopeResult q = limit_slope(*quad.f, Point{1.0}, 8.0, 1e-3);
  CHECK(q.converged);
  CHECK(q.value <= 1e-4);

  const ModelInstance lin = make_euclidean("linear", std::vector<double>{3, 4});
  const LimitSlopeResult l = limit_slope(*lin.f, {0.0, 0.0}, 4.0, 1e-3);
  CHECK(l.value == doctest::Approx(5.0).epsilon(1e-9));

  const ModelInstance ex = make_euclidean("exp_linear", {});
  const LimitSlopeResult e = limit_slope(*ex.f, Point{0.0}, 8.0, 1e-3);
  CHECK(e.converged);
  CHECK(std::abs(e.value - 1.0) <= 1e-3);
}

TEST_CASE("evi residuals are nonpositive for proximal chains") {
  const ModelInstance quad = make_euclidean("quadratic", {});
  const FlowTrajectory t = mayer_flow(*quad.f, Point{1.0}, 1.0, 64);
  for (double r : evi_residual(*quad.f, t, Point{0.0})) CHECK(r <= 1e-12);
  // Competitor on the trajectory itself: prox optimality pointwise.
  for (double r : evi_residual(*quad.f, t, t.points[10])) CHECK(r <= 1e-12);

  // Linear chain: each entry is exactly -tau |a|^2 / 2.
  const ModelInstance lin = make_euclidean("linear", std::vector<double>{3, 4});
  const FlowTrajectory tl = mayer_flow(*lin.f, {0.0, 0.0}, 2.0, 16);
  const double tau = 2.0 / 16;
  for (double r : evi_residual(*lin.f, tl, {1.0, -1.0})) {
    CHECK(r == doctest::Approx(-0.5 * tau * 25.0).epsilon(1e-10));
  }
}

TEST_CASE("two-sided slope sandwich along the flow") {
  const ModelInstance lin = make_euclidean("linear", std::vector<double>{3, 4});
  const FlowTrajectory tl = mayer_flow(*lin.f, {0.0, 0.0}, 2.0, 16);
  const auto [lo_l, up_l] = sandwich_check(*lin.f, tl, 2, 9);
  CHECK(lo_l == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(up_l == doctest::Approx(0.0).epsilon(1e-9));

  const ModelInstance quad = make_euclidean("quadratic", {});
  const FlowTrajectory tq = flow(*quad.f, Point{1.0}, 1.0, 1e-5);
  const auto [lo_q, up_q] = sandwich_check(*quad.f, tq, 0, tq.size() - 1);
  // Closed-form flow gives 1*(1 - e^{-1}) - (1/2 - e^{-2}/2) at (t,s) = (0,1).
  const double oracle = (1 - std::exp(-1.0)) - 0.5 * (1 - std::exp(-2.0));
  CHECK(lo_q == doctest::Approx(oracle).epsilon(2e-3));
  CHECK(lo_q >= -1e-8);
  CHECK(up_q >= -1e-8);

  const auto [lo_d, up_d] = sandwich_check(*quad.f, tq, 5, 5);
  CHECK(lo_d == doctest::Approx(0.0));
  CHECK(up_d == doctest::Approx(0.0));

  CHECK_THROWS_AS(sandwich_check(*quad.f, tq, 3, 1), InputError);
}

TEST_CASE("energy identity residual shrinks under refinement") {
  const ModelInstance lin = make_euclidean("linear", std::vector<double>{3, 4});
  const FlowTrajectory tl = mayer_flow(*lin.f, {0.0, 0.0}, 2.0, 8);
  for (double r : energy_identity_residual(*lin.f, tl)) CHECK(r <= 1e-9);

  const ModelInstance quad = make_euclidean("quadratic", {});
  double prev_max = 0.0;
  for (int m : {64, 128, 256, 1024}) {
    const FlowTrajectory t = mayer_flow(*quad.f, Point{1.0}, 1.0, m);
    double worst = 0.0;
    for (double r : energy_identity_residual(*quad.f, t)) worst = std::max(worst, r);
    if (m == 64) CHECK(worst <= 0.05);
    if (m == 1024) CHECK(worst <= 0.004);
    if (m == 128 || m == 256) {
      const double ratio = worst / prev_max;
      CHECK(ratio > 0.4);
      CHECK(ratio < 0.6);
    }
    prev_max = worst;
  }

  // Away from its kink the abs flow balances slope 1 against unit decrease.
  const ModelInstance abs1 = make_euclidean("abs", {});
  const FlowTrajectory ta = mayer_flow(*abs1.f, Point{2.0}, 1.0, 16);
  for (double r : energy_identity_residual(*abs1.f, ta)) CHECK(r <= 1e-9);
}

TEST_CASE("limit slope is start independent") {
  const ModelInstance lin = make_euclidean("linear", std::vector<double>{3, 4});
  CHECK(bind_check(*lin.f, {0.0, 0.0}, {7.0, -3.0}, 4.0, 1e-3) <= 1e-9);

  const ModelInstance ex = make_euclidean("exp_linear", {});
  CHECK(bind_check(*ex.f, Point{0.0}, Point{5.0}, 8.0, 1e-3) <= 2e-3);

  const ModelInstance quad = make_euclidean("quadratic", {});
  CHECK(bind_check(*quad.f, Point{1.0}, Point{-2.0}, 8.0, 1e-3) <= 2e-3);
}

TEST_CASE("trajectory invariants: monotone values and slopes, convex values") {
  const std::vector<ModelInstance> insts = {
      make_euclidean("quadratic", {}),
      make_euclidean("abs", {}),
      make_euclidean("exp_linear", {}),
      make_tripod({-1, 2, 2}),
  };
  for (const ModelInstance& inst : insts) {
    const bool tripod = dynamic_cast<const TripodSpace*>(inst.space.get()) != nullptr;
    const Point x0 = tripod ? TripodSpace::encode(2, 2) : Point{1.5};
    const FlowTrajectory t = mayer_flow(*inst.f, x0, 4.0, 64);
    CHECK(t.times.front() == 0.0);
    const double scale = 1.0 + std::abs(t.values.front());
    for (std::size_t k = 1; k < t.size(); ++k) {
      CHECK(t.values[k] <= t.values[k - 1] + 1e-8);
      CHECK(t.slopes[k] <= t.slopes[k - 1] + 1e-6);
    }
    for (std::size_t k = 1; k + 1 < t.size(); ++k) {
      const double second_diff = t.values[k + 1] - 2.0 * t.values[k] + t.values[k - 1];
      CHECK(second_diff >= -1e-6 * scale);
    }
  }
}

TEST_CASE("flow map contracts distances for equal step schedules") {
  Rng rng(31);
  const std::vector<ModelInstance> insts = {
      make_euclidean("quadratic", std::vector<double>{2}),
      make_euclidean("abs", std::vector<double>{2}),
      make_tripod({-1, 2, 2}),
  };
  for (const ModelInstance& inst : insts) {
    const bool tripod = dynamic_cast<const TripodSpace*>(inst.space.get()) != nullptr;
    Point a, b;
    if (tripod) {
      a = TripodSpace::encode(2, 1.5);
      b = TripodSpace::encode(3, 2.5);
    } else {
      a = Point{rng.uniform(-2, 2), rng.uniform(-2, 2)};
      b = Point{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    }
    const FlowTrajectory ta = mayer_flow(*inst.f, a, 4.0, 32);
    const FlowTrajectory tb = mayer_flow(*inst.f, b, 4.0, 32);
    const double d0 = inst.space->distance(a, b);
    for (std::size_t k = 0; k < ta.size(); ++k) {
      CHECK(inst.space->distance(ta.points[k], tb.points[k]) <= d0 + 1e-8);
    }
  }
}

TEST_CASE("endpoint refinement gaps decrease monotonically") {
  const std::vector<ModelInstance> insts = {
      make_euclidean("quadratic", {}),
      make_euclidean("exp_linear", {}),
  };
  for (const ModelInstance& inst : insts) {
    const Point x0{1.0};
    double prev_gap = kPlusInfinity;
    Point prev_end = mayer_flow(*inst.f, x0, 2.0, 1).points.back();
    for (int m = 2; m <= 256; m *= 2) {
      const Point end = mayer_flow(*inst.f, x0, 2.0, m).points.back();
      const double gap = inst.space->distance(end, prev_end);
      CHECK(gap <= prev_gap + 1e-12);
      prev_gap = gap;
      prev_end = end;
    }
  }
}
