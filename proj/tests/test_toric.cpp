#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hflow/errors.hpp"
#include "hflow/flow.hpp"
#include "hflow/geometry.hpp"
#include "hflow/ray.hpp"
#include "hflow/rng.hpp"
#include "hflow/toric.hpp"

using namespace hflow;

namespace {

constexpr int N = 256;

std::vector<double> profile(int n, const std::function<double(double)>& f) {
  std::vector<double> out(n + 1);
  for (int i = 0; i <= n; ++i) out[i] = f(double(i) / n);
  return out;
}

// Fine-grid quadrature oracle (trapezoid at 2^15 cells).
double fine_integral(const std::function<double(double)>& f) {
  const int n = 1 << 15;
  double s = 0.5 * (f(0.0) + f(1.0));
  for (int i = 1; i < n; ++i) s += f(double(i) / n);
  return s / n;
}

// Independent curvature oracle: S = -w'' by central differences with
// Richardson extrapolation on a fine step.
double curvature_oracle(const std::function<double(double)>& w, double x) {
  auto second = [&](double h) { return (w(x - h) - 2.0 * w(x) + w(x + h)) / (h * h); };
  const double h0 = 1e-4;
  const double c1 = second(h0), c2 = second(h0 / 2);
  return -(4.0 * c2 - c1) / 3.0;
}

toric::MabuchiFunctional make_mabuchi(double a) {
  return toric::MabuchiFunctional(std::make_shared<toric::ToricSpace>(N), a);
}

}  // namespace

TEST_CASE("guillemin potential samples") {
  const std::vector<double> u0 = toric::guillemin_samples(N);
  CHECK(u0.front() == 0.0);
  CHECK(u0.back() == 0.0);
  CHECK(u0[N / 2] == doctest::Approx(std::log(0.5)));
  CHECK(toric::guillemin_second(0.5) == doctest::Approx(4.0));

  // int u0 = -1/2 (oracle: 2 int x log x dx).
  const double oracle = fine_integral([](double x) { return toric::guillemin_value(x); });
  CHECK(oracle == doctest::Approx(-0.5).epsilon(1e-5));
  CHECK(toric::integrate(u0) == doctest::Approx(-0.5).epsilon(1e-3));
}

TEST_CASE("scalar curvature of the canonical potential is exactly flat") {
  const std::vector<double> zero(N + 1, 0.0);
  const toric::CurvatureData data = toric::curvature(zero, N);
  for (double Si : data.S) CHECK(Si == doctest::Approx(2.0).epsilon(1e-9));

  // Constants do not change second derivatives.
  const std::vector<double> shifted(N + 1, 0.7);
  const toric::CurvatureData data2 = toric::curvature(shifted, N);
  for (int i = 0; i < N - 1; ++i) CHECK(data2.S[i] == doctest::Approx(data.S[i]));
}

TEST_CASE("scalar curvature of a perturbed potential matches the fine-grid oracle") {
  const double eps = 0.1;
  const std::vector<double> phi = profile(N, [&](double x) { return eps * x * x; });
  const toric::CurvatureData data = toric::curvature(phi, N);
  auto w = [&](double x) { return 1.0 / (toric::guillemin_second(x) + 2.0 * eps); };
  const double oracle_mid = curvature_oracle(w, 0.5);
  CHECK(data.S[N / 2 - 1] == doctest::Approx(oracle_mid).epsilon(1e-3));
  // A couple of off-center nodes for good measure.
  CHECK(data.S[N / 4 - 1] == doctest::Approx(curvature_oracle(w, 0.25)).epsilon(1e-3));

  // phi'' = -6 beats u0'' = 4 at the midpoint, so u'' goes nonpositive there.
  std::vector<double> bad = profile(N, [](double x) { return 3.0 * x * (1.0 - x); });
  CHECK_THROWS_AS(toric::curvature(bad, N), InputError);
}

TEST_CASE("mabuchi values") {
  const std::vector<double> zero(N + 1, 0.0);
  // Oracle: exact singular part -2, boundary terms 0, -2 int u0 = +1.
  const double m2_oracle =
      -2.0 - 2.0 * fine_integral([](double x) { return toric::guillemin_value(x); });
  CHECK(m2_oracle == doctest::Approx(-1.0).epsilon(1e-4));
  CHECK(toric::mabuchi(zero, N, 2.0) == doctest::Approx(-1.0).epsilon(1e-3));

  // Constants only move the linear part: M_a(u0 + c) = M_a(u0) + c(2 - a).
  for (double a : {2.0, 3.0, 1.5}) {
    const double base = toric::mabuchi(zero, N, a);
    for (double c : {0.5, -1.0}) {
      const std::vector<double> shifted(N + 1, c);
      CHECK(toric::mabuchi(shifted, N, a) == doctest::Approx(base + c * (2.0 - a)));
    }
  }

  // u0 minimizes M_2 along the x^2 pencil.
  const double at0 = toric::mabuchi(zero, N, 2.0);
  for (double eps : {0.1, 0.05, -0.05, -0.1}) {
    const std::vector<double> p = profile(N, [&](double x) { return eps * x * x; });
    CHECK(toric::mabuchi(p, N, 2.0) > at0);
  }
}

TEST_CASE("calabi energy") {
  const std::vector<double> zero(N + 1, 0.0);
  CHECK(toric::calabi_energy(zero, N, 2.0) <= 5e-3);
  CHECK(toric::calabi_energy(zero, N, 3.0) == doctest::Approx(1.0).epsilon(5e-3));
  const std::vector<double> shifted(N + 1, -0.3);
  CHECK(toric::calabi_energy(shifted, N, 3.0) ==
        doctest::Approx(toric::calabi_energy(zero, N, 3.0)));
}

TEST_CASE("linear part of the toric functional") {
  CHECK(toric::linear_part(profile(N, [](double x) { return x; }), N, 2.0) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(toric::linear_part(profile(N, [](double x) { return x * x; }), N, 2.0) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-4));
  CHECK(toric::linear_part(std::vector<double>(N + 1, 1.0), N, 3.0) == doctest::Approx(-1.0));
}

TEST_CASE("flat metric distances") {
  auto space = std::make_shared<toric::ToricSpace>(N);
  const Point u(std::vector<double>(N + 1, 0.0));
  CHECK(space->distance(u, u) == 0.0);
  Point shifted(std::vector<double>(N + 1, 0.25));
  CHECK(space->distance(u, shifted) == doctest::Approx(0.25));

  Point linear(profile(N, [](double x) { return x; }));
  // Grid quadrature oracle for int x^2 dx, evaluated independently.
  double quad = 0.0;
  for (int i = 0; i <= N; ++i) {
    const double x = double(i) / N;
    quad += (i == 0 || i == N ? 0.5 : 1.0) * x * x;
  }
  quad /= N;
  CHECK(space->distance(u, linear) == doctest::Approx(std::sqrt(quad)).epsilon(1e-12));
  CHECK(space->distance(u, linear) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-5));

  // The flat toric space attains equality in the comparison inequality.
  Rng rng(3);
  for (int k = 0; k < 30; ++k) {
    auto rnd = [&](double) { return 0.0; };
    (void)rnd;
    Point a(profile(N, [&](double x) { return rng.uniform(-0.03, 0.03) * std::sin(M_PI * x); }));
    Point b(profile(N, [&](double x) { return rng.uniform(-0.5, 0.5) * x; }));
    Point c(profile(N, [&](double x) { return rng.uniform(-0.5, 0.5) + 0.02 * x * x; }));
    CHECK(std::abs(cat0_defect(*space, a, b, c, rng.uniform01(), rng.uniform01())) <= 1e-12);
  }
}

TEST_CASE("toric prox: stationarity, flat constants, small-step consistency") {
  const toric::MabuchiFunctional m2 = make_mabuchi(2.0);
  const Point u0(std::vector<double>(N + 1, 0.0));
  CHECK(m2.space()->distance(m2.prox(u0, 1.0), u0) <= 1e-9);

  const Point shifted(std::vector<double>(N + 1, 0.4));
  CHECK(m2.space()->distance(m2.prox(shifted, 1.0), shifted) <= 1e-9);

  const Point sin_start(profile(N, [](double x) { return 0.1 * std::sin(M_PI * x); }));
  for (double lambda : {1e-3, 1e-4}) {
    CHECK(m2.space()->distance(m2.prox(sin_start, lambda), sin_start) <=
          lambda * (toric::calabi_energy(sin_start.data, N, 2.0) + 1.0));
  }
  CHECK_THROWS_AS(m2.prox(u0, -1.0), InputError);
}

TEST_CASE("gradient of the discrete functional matches the curvature pairing") {
  // Central differences of M_a against the quadrature of (S - a) f; the
  // boundary terms of the integration by parts must cancel.
  Rng rng(7);
  const double a = 2.0;
  const std::vector<double> phi = profile(N, [](double x) { return 0.05 * std::sin(M_PI * x); });
  const toric::CurvatureData data = toric::curvature(phi, N);
  const double value = toric::mabuchi(phi, N, a);
  for (int rep = 0; rep < 20; ++rep) {
    const double c0 = rng.uniform(-1, 1), c1 = rng.uniform(-1, 1), c2 = rng.uniform(-1, 1);
    const std::vector<double> f =
        profile(N, [&](double x) { return c0 + c1 * x + c2 * std::sin(2 * M_PI * x); });
    const double eps = 1e-5;
    std::vector<double> plus(phi), minus(phi);
    for (int i = 0; i <= N; ++i) {
      plus[i] += eps * f[i];
      minus[i] -= eps * f[i];
    }
    const double dd =
        (toric::mabuchi(plus, N, a) - toric::mabuchi(minus, N, a)) / (2.0 * eps);
    // Quadrature of (S - a) f with S extended to the boundary nodes.
    double pairing = 0.0;
    for (int i = 0; i <= N; ++i) {
      const int j = std::clamp(i, 1, N - 1);
      const double w = (i == 0 || i == N) ? 0.5 : 1.0;
      pairing += w * (data.S[j - 1] - a) * f[i];
    }
    pairing /= N;
    CHECK(std::abs(dd - pairing) <= 1e-3 * (1.0 + std::abs(value)));
  }
}

TEST_CASE("calabi energy is the metric slope of the mabuchi functional") {
  const toric::MabuchiFunctional m2 = make_mabuchi(2.0);
  const toric::MabuchiFunctional m3 = make_mabuchi(3.0);
  const std::vector<Point> samples = {
      Point(profile(N, [](double x) { return 0.1 * std::sin(M_PI * x); })),
      Point(profile(N, [](double x) { return 0.05 * x * x - 0.2 * x; })),
      Point(std::vector<double>(N + 1, 0.0)),
  };
  for (const auto* m : {&m2, &m3}) {
    for (const Point& x : samples) {
      const double cal = *m->analytic_slope(x);
      const double est = estimate_slope(*m, x).value;
      CHECK(std::abs(est - cal) <= 2e-2 * (1.0 + cal));
    }
  }
}

TEST_CASE("radial mabuchi slope equals the linear part along potential rays") {
  const auto space = std::make_shared<toric::ToricSpace>(N);
  const Point base(std::vector<double>(N + 1, 0.0));
  for (double a : {2.0, 3.0}) {
    const toric::MabuchiFunctional m(space, a);
    const std::vector<std::vector<double>> dirs = {
        std::vector<double>(N + 1, 1.0),
        profile(N, [](double x) { return x; }),
        profile(N, [](double x) { return x * x; }),
        profile(N, [](double x) { return 0.5 + 0.25 * x + x * x; }),
    };
    for (const auto& f : dirs) {
      const double la = toric::linear_part(f, N, a);
      const Ray ray = Ray::from_direction(space, base, Point(f), 2048.0);
      const MonotoneLimitEstimate rad = radial_value(m, ray, 2048.0);
      CHECK(std::abs(rad.value - la) <= 5e-3 * (1.0 + std::abs(la)));
    }
  }
}

TEST_CASE("ray ratio evaluates the destabilizer candidates") {
  CHECK(toric::ray_ratio(std::vector<double>(N + 1, 1.0), N, 3.0) == doctest::Approx(1.0));
  CHECK(toric::ray_ratio(profile(N, [](double x) { return x; }), N, 2.0) ==
        doctest::Approx(0.0).epsilon(1e-9));
  const std::vector<double> x2 = profile(N, [](double x) { return x * x; });
  const double expected = -toric::linear_part(x2, N, 2.0) /
                          std::sqrt(fine_integral([](double x) { return std::pow(x, 4); }));
  CHECK(toric::ray_ratio(x2, N, 2.0) == doctest::Approx(expected).epsilon(1e-3));
  CHECK(toric::ray_ratio(x2, N, 2.0) < 0.0);  // stable direction

  CHECK_THROWS_AS(toric::ray_ratio(profile(N, [](double x) { return -x * x; }), N, 2.0),
                  InputError);
  CHECK_THROWS_AS(toric::ray_ratio(std::vector<double>(N + 1, 0.0), N, 2.0), InputError);
}

TEST_CASE("mabuchi values decrease and stay convex along the flow") {
  const auto space = std::make_shared<toric::ToricSpace>(N);
  const auto m2 = std::make_shared<toric::MabuchiFunctional>(space, 2.0);
  const Point start(profile(N, [](double x) { return 0.1 * std::sin(M_PI * x); }));
  const FlowTrajectory traj = mayer_flow(*m2, start, 2.0, 64);
  const double scale = 1.0 + std::abs(traj.values.front());
  for (std::size_t k = 1; k < traj.size(); ++k) {
    CHECK(traj.values[k] <= traj.values[k - 1] + 1e-10);
    CHECK(traj.slopes[k] <= traj.slopes[k - 1] + 1e-6);
  }
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    CHECK(traj.values[k + 1] - 2 * traj.values[k] + traj.values[k - 1] >= -1e-6 * scale);
  }
}

TEST_CASE("snapshot rows") {
  const std::vector<double> phi = profile(N, [](double x) { return 0.02 * x; });
  const toric::Snapshot snap = toric::snapshot(phi, N);
  CHECK(snap.x.size() == N + 1);
  CHECK(snap.w.front() == 0.0);
  CHECK(snap.w.back() == 0.0);
  CHECK(snap.u[N / 2] == doctest::Approx(std::log(0.5) + 0.01));
  CHECK(snap.S[N / 2] == doctest::Approx(2.0).epsilon(1e-6));
}
