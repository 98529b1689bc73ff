#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hflow/destabilizer.hpp"
#include "hflow/errors.hpp"
#include "hflow/model_spaces.hpp"
#include "hflow/registry.hpp"

using namespace hflow;

TEST_CASE("escape classification") {
  const ModelInstance quad = make_euclidean("quadratic", {});
  const FlowTrajectory tq = mayer_flow(*quad.f, Point{1.0}, 16.0, 256);
  CHECK(escape_test(tq, 4.0).cls == FlowClass::Bounded);

  const ModelInstance lin = make_euclidean("linear", std::vector<double>{3, 4});
  const FlowTrajectory tl = mayer_flow(*lin.f, {0.0, 0.0}, 4.0, 64);
  CHECK(escape_test(tl, 4.0).cls == FlowClass::Escaping);

  const ModelInstance ex = make_euclidean("exp_linear", {});
  const FlowTrajectory te = mayer_flow(*ex.f, Point{0.0}, 16.0, 256);
  CHECK(escape_test(te, 4.0).cls == FlowClass::Escaping);

  // Flat branch: the flow reaches the origin and stalls there.
  const ModelInstance flat = make_tripod({0, 2, 2});
  const FlowTrajectory tf = mayer_flow(*flat.f, TripodSpace::encode(2, 1), 16.0, 64);
  const EscapeDecision df = escape_test(tf, 4.0);
  CHECK(df.cls == FlowClass::Bounded);

  CHECK_THROWS_AS(escape_test(tq, -1.0), InputError);
}

TEST_CASE("limit ray extraction") {
  const ModelInstance lin = make_euclidean("linear", std::vector<double>{3, 4});
  const FlowTrajectory tl = mayer_flow(*lin.f, {0.0, 0.0}, 16.0, 64);
  std::vector<std::size_t> idx;
  for (std::size_t k = 8; k < tl.size(); k += 8) idx.push_back(k);
  const ExtractionResult ext = extract_ray(*lin.f, tl, idx);
  CHECK(ext.stabilized);
  CHECK(ray_norm(ext.ray) == doctest::Approx(1.0).epsilon(1e-9));
  const Point dir = ext.ray.position(1.0);
  CHECK(dir[0] - ext.ray.base()[0] == doctest::Approx(-0.6).epsilon(1e-9));
  CHECK(dir[1] - ext.ray.base()[1] == doctest::Approx(-0.8).epsilon(1e-9));

  // Tripod from the origin: unit-speed limit ray down the negative branch.
  const ModelInstance trip = make_tripod({-1, 2, 2});
  const FlowTrajectory tt = mayer_flow(*trip.f, TripodSpace::encode(1, 0), 40.0, 80);
  std::vector<std::size_t> tidx{10, 20, 40, 79};
  const ExtractionResult text = extract_ray(*trip.f, tt, tidx);
  CHECK(text.stabilized);
  CHECK(ray_norm(text.ray) == doctest::Approx(1.0));
  CHECK(text.ray.position(4.0)[0] == doctest::Approx(1.0));  // branch 1

  CHECK_THROWS_AS(extract_ray(*lin.f, tl, {}), InputError);
}

TEST_CASE("sharpness pipeline on the closed-form instances") {
  const ModelInstance quad = make_euclidean("quadratic", {});
  const SharpnessReport rq = sharpness_report(*quad.f, *quad.g, Point{1.0}, 8.0, 1e-3);
  CHECK(rq.cls == FlowClass::Bounded);
  CHECK(rq.limit_slope <= 1e-4);
  CHECK_FALSE(rq.ray.has_value());
  CHECK(rq.ratio == 0.0);
  CHECK_FALSE(rq.unstable);

  SharpnessOptions opts;
  opts.extraction_distance = 32.0;
  const ModelInstance lin = make_euclidean("linear", std::vector<double>{3, 4});
  const SharpnessReport rl = sharpness_report(*lin.f, *lin.g, {0.0, 0.0}, 8.0, 1e-3, opts);
  CHECK(rl.cls == FlowClass::Escaping);
  CHECK(rl.limit_slope == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(rl.ratio == doctest::Approx(5.0).epsilon(1e-3));
  CHECK(rl.norm == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(rl.gap) <= 1e-3);
  CHECK(rl.unstable);

  // Two-functional mode: F = -x + e^{-x} dominated by G = -x + 2 e^{-x}.
  const ModelInstance pair = make_euclidean("pair", {});
  const SharpnessReport rp = sharpness_report(*pair.f, *pair.g, Point{0.0}, 8.0, 1e-3, opts);
  CHECK(rp.cls == FlowClass::Escaping);
  CHECK(rp.limit_slope == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(rp.ratio == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("sharpness hypotheses are enforced") {
  // F <= G fails at the start.
  const ModelInstance quad = make_euclidean("quadratic", {});
  const ModelInstance lin = make_euclidean("linear", std::vector<double>{1});
  CHECK_THROWS_AS(sharpness_report(*quad.f, *lin.f, Point{3.0}, 4.0, 1e-3), InputError);

  // G increases along the flow of F (F(x) = x, G(x) = -x, start at x0 <= 0).
  const ModelInstance up = make_euclidean("linear", std::vector<double>{1});
  const ModelInstance down = make_euclidean("linear", std::vector<double>{-1});
  CHECK_THROWS_AS(sharpness_report(*up.f, *down.f, Point{-50.0}, 4.0, 1e-3), InputError);
}

TEST_CASE("uniqueness probe") {
  SharpnessOptions opts;
  opts.extraction_distance = 32.0;

  const ModelInstance lin = make_euclidean("linear", std::vector<double>{3, 4});
  const std::vector<Point> starts{{0.0, 0.0}, {5.0, -1.0}, {-2.0, 3.0}};
  CHECK(uniqueness_probe(*lin.f, *lin.g, starts, 8.0, 1e-3, opts) <= 1e-4);

  const ModelInstance trip = make_tripod({-1, 2, 2});
  const std::vector<Point> tstarts{TripodSpace::encode(1, 2), TripodSpace::encode(2, 2),
                                   TripodSpace::encode(3, 2)};
  CHECK(uniqueness_probe(*trip.f, *trip.g, tstarts, 8.0, 1e-3, opts) <= 1e-4);

  // A flat valley of minimizers keeps every flow bounded: probe is 0.
  const ModelInstance valley = make_euclidean("valley", std::vector<double>{2});
  const std::vector<Point> vstarts{{0.2, 0.1}, {-0.4, 0.3}, {0.0, 0.0}};
  CHECK(uniqueness_probe(*valley.f, *valley.g, vstarts, 8.0, 1e-3, opts) == 0.0);
}

TEST_CASE("geodesic instability flag matches the analytic classification") {
  SharpnessOptions opts;
  opts.extraction_distance = 32.0;
  for (const std::string& id :
       {"euclid.linear.3.4", "euclid.quadratic", "euclid.abs", "euclid.exp_linear",
        "tripod.-1.2.2", "tripod.1.1.1", "tripod.0.2.2"}) {
    const Instance inst = make_instance(id);
    const SharpnessReport rep =
        sharpness_report(*inst.f, *inst.g, inst.defaults.x0, inst.defaults.horizon,
                         inst.defaults.tol, opts);
    CHECK(rep.unstable == inst.analytic.unstable);
    CHECK(rep.gap >= -1e-6);
    CHECK(std::abs(rep.limit_slope - inst.analytic.limit_slope) <= 2.5e-3);
  }
}

TEST_CASE("limit slope is start independent across the pipeline") {
  const ModelInstance ex = make_euclidean("exp_linear", {});
  SharpnessOptions opts;
  opts.extraction_distance = 32.0;
  const SharpnessReport a = sharpness_report(*ex.f, *ex.g, Point{0.0}, 8.0, 1e-3, opts);
  const SharpnessReport b = sharpness_report(*ex.f, *ex.g, Point{5.0}, 8.0, 1e-3, opts);
  CHECK(std::abs(a.limit_slope - b.limit_slope) <= 2e-3);
}
