#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hflow/errors.hpp"
#include "hflow/model_spaces.hpp"
#include "hflow/registry.hpp"
#include "hflow/rng.hpp"

using namespace hflow;

TEST_CASE("euclidean instance tags and analytic records") {
  const ModelInstance lin = make_euclidean("linear", std::vector<double>{3, 4});
  CHECK(lin.analytic.limit_slope == doctest::Approx(5.0));
  CHECK(lin.analytic.escaping);
  REQUIRE(lin.analytic.ray_direction.has_value());
  CHECK((*lin.analytic.ray_direction)[0] == doctest::Approx(-0.6));
  CHECK((*lin.analytic.ray_direction)[1] == doctest::Approx(-0.8));

  const ModelInstance ex = make_euclidean("exp_linear", {});
  CHECK(ex.analytic.limit_slope == doctest::Approx(1.0));
  CHECK(ex.analytic.escaping);
  CHECK((*ex.analytic.ray_direction)[0] == doctest::Approx(1.0));

  const ModelInstance quad = make_euclidean("quadratic", {});
  CHECK(quad.analytic.limit_slope == 0.0);
  CHECK_FALSE(quad.analytic.escaping);
  CHECK_FALSE(quad.analytic.ray_direction.has_value());

  const ModelInstance pair = make_euclidean("pair", {});
  CHECK(pair.f != pair.g);
  CHECK(pair.g->value(Point{0.0}) >= pair.f->value(Point{0.0}));

  CHECK_THROWS_AS(make_euclidean("nope", {}), InputError);
  CHECK_THROWS_AS(make_euclidean("linear", {}), InputError);
}

TEST_CASE("tripod construction guards") {
  // Cross-branch convexity requires pairwise sums >= 0.
  CHECK_THROWS_AS(make_tripod({-1, -1, 3}), InputError);
  CHECK_THROWS_AS(make_tripod({-2, 1, 1}), InputError);

  const ModelInstance ok = make_tripod({-1, 2, 2});
  CHECK(ok.analytic.limit_slope == doctest::Approx(1.0));
  REQUIRE(ok.analytic.ray_branch.has_value());
  CHECK(*ok.analytic.ray_branch == 1);

  const ModelInstance stable = make_tripod({1, 1, 1});
  CHECK(stable.analytic.limit_slope == 0.0);
  CHECK_FALSE(stable.analytic.escaping);

  // Zero-slope branch: minimizing set is the whole branch, flow stalls.
  const ModelInstance flat = make_tripod({0, 2, 2});
  CHECK(flat.analytic.limit_slope == 0.0);
  CHECK_FALSE(flat.analytic.escaping);
}

TEST_CASE("tripod prox against brute-force grid search") {
  const ModelInstance trip = make_tripod({-1, 2, 2});
  Rng rng(51);
  for (int rep = 0; rep < 100; ++rep) {
    const Point x = TripodSpace::encode(1 + rng.uniform_int(3), rng.uniform(0, 3));
    const double lambda = rng.uniform(0.05, 2.0);
    const Point p = trip.f->prox(x, lambda);
    const double dp = trip.space->distance(p, x);
    const double obj = 0.5 * dp * dp + lambda * trip.f->value(p);

    // Grid over all three branches, step 1e-4.
    double best = kPlusInfinity;
    Point best_pt;
    const double rmax = x[1] + 3.0 * lambda + 1.0;
    for (int b = 1; b <= 3; ++b) {
      for (double r = 0.0; r <= rmax; r += 1e-4) {
        const Point v = TripodSpace::encode(b, r);
        const double d = trip.space->distance(v, x);
        const double o = 0.5 * d * d + lambda * trip.f->value(v);
        if (o < best) {
          best = o;
          best_pt = v;
        }
      }
    }
    CHECK(obj <= best + 1e-7);
    CHECK(trip.space->distance(p, best_pt) <= 2e-4);
  }
}

TEST_CASE("registry resolves ids and defaults") {
  for (const std::string& id : registry_ids()) {
    const Instance inst = make_instance(id);
    CHECK(inst.id == id);
    CHECK(inst.space != nullptr);
    CHECK(inst.f != nullptr);
    CHECK(inst.defaults.tol > 0.0);
    CHECK(inst.defaults.horizon > 0.0);
    // Default start lies in the domain of G.
    CHECK(in_domain(inst.g->value(inst.defaults.x0)));
  }

  const Instance toric = make_instance("toric.N256.a3.0");
  CHECK(toric.toric);
  CHECK(toric.toric_grid == 256);
  CHECK(toric.toric_a == doctest::Approx(3.0));
  CHECK(toric.analytic.limit_slope == doctest::Approx(1.0));

  const Instance trip = make_instance("tripod.-1.2.2");
  CHECK(trip.analytic.ray_branch.has_value());

  CHECK_THROWS_AS(make_instance("unknown.instance"), InputError);
  CHECK_THROWS_AS(make_instance("toric.X256.a2"), InputError);
  CHECK_THROWS_AS(make_instance("tripod.1.2"), InputError);
}

TEST_CASE("start literals and canonical starts") {
  const Instance lin = make_instance("euclid.linear.3.4");
  const Point p = lin.parse_start("1.5,-2");
  CHECK(p[0] == doctest::Approx(1.5));
  CHECK(p[1] == doctest::Approx(-2.0));
  CHECK_THROWS_AS(lin.parse_start("1,2,3"), InputError);
  CHECK_THROWS_AS(lin.parse_start("a,b"), InputError);

  const Instance trip = make_instance("tripod.-1.2.2");
  CHECK(trip.default_start(0)[0] == doctest::Approx(1.0));
  CHECK(trip.default_start(1)[0] == doctest::Approx(2.0));
  CHECK(trip.default_start(2)[0] == doctest::Approx(3.0));

  const Instance ex = make_instance("euclid.exp_linear");
  CHECK(ex.default_start(0)[0] == doctest::Approx(0.0));
  CHECK(ex.default_start(1)[0] == doctest::Approx(5.0));

  const Instance toric = make_instance("toric.N256.a2.0");
  const Point zero = toric.parse_start("zero");
  CHECK(zero.size() == 257);
  CHECK(zero[128] == 0.0);
  const Point sinp = toric.parse_start("sin:0.1");
  CHECK(sinp[128] == doctest::Approx(0.1 * std::sin(M_PI * 0.5)));
  const Point x2 = toric.parse_start("x2:0.5");
  CHECK(x2[256] == doctest::Approx(0.5));
  CHECK_THROWS_AS(toric.parse_start("boom:1"), InputError);
}

TEST_CASE("suite samples are valid domain points and shared-base rays") {
  for (const std::string& id : registry_ids()) {
    const Instance inst = make_instance(id);
    const auto pts = inst.sample_points(20, 99);
    for (const Point& p : pts) CHECK(in_domain(inst.f->value(p)));
    const auto rays = inst.sample_rays(8, 99);
    for (const Ray& r : rays) {
      CHECK(inst.space->distance(r.base(), inst.ray_probe_base()) <= 1e-9);
    }
  }
}
