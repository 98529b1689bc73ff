#include "hflow/suites.hpp"

#include <algorithm>
#include <cmath>

#include "hflow/destabilizer.hpp"
#include "hflow/errors.hpp"
#include "hflow/export.hpp"
#include "hflow/rng.hpp"

namespace hflow {

std::vector<std::string> suite_names() {
  return {"cat0", "evi", "sandwich", "moment-weight", "bind"};
}

namespace {

bool is_flat(const Instance& inst) {
  return inst.toric || dynamic_cast<const TripodSpace*>(inst.space.get()) == nullptr;
}

SuiteResult suite_cat0(const Instance& inst, std::uint64_t seed) {
  SuiteResult res{"cat0", inst.id};
  const Space& space = *inst.space;
  Rng rng(seed ^ 0xca70ULL);
  const double flat_tol = 1e-12;
  const double defect_tol = 1e-9;
  const double speed_tol = inst.toric ? 1e-7 : 1e-9;
  const bool flat = is_flat(inst);

  const std::vector<Point> pts = inst.sample_points(600, seed);
  double worst_defect = -kPlusInfinity;
  double worst_triangle = 0.0;
  double worst_speed = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Point& x = pts[3 * k];
    const Point& y = pts[3 * k + 1];
    const Point& z = pts[3 * k + 2];
    worst_triangle = std::max(
        worst_triangle, space.distance(x, z) - space.distance(x, y) - space.distance(y, z));
    const double s = rng.uniform01();
    const double t = rng.uniform01();
    const double defect = cat0_defect(space, x, y, z, s, t);
    worst_defect = std::max(worst_defect, flat ? std::abs(defect) : defect);
    // Interpolation speed contract on the (x,y) geodesic.
    const double dxy = space.distance(x, y);
    const Point gs = space.interpolate(x, y, s);
    const Point gt = space.interpolate(x, y, t);
    worst_speed =
        std::max(worst_speed, std::abs(space.distance(gs, gt) - std::abs(s - t) * dxy));
  }
  const double point_bound = flat ? flat_tol : defect_tol;
  res.lines.push_back("point triples: max cat0 defect " + fmt_double(worst_defect) +
                      (flat ? " (flat, |.| <= 1e-12)" : " (<= 1e-9)"));
  res.lines.push_back("triangle inequality residual " + fmt_double(worst_triangle));
  res.lines.push_back("interpolation speed residual " + fmt_double(worst_speed));

  // Ray-space comparison inequality on sampled ray triples.
  const std::vector<Ray> rays = inst.sample_rays(12, seed);
  Rng rng2(seed ^ 0x2a7e5ULL);
  double worst_ray = -kPlusInfinity;
  for (int k = 0; k < 100; ++k) {
    const Ray& l = rays[rng2.uniform_int(static_cast<int>(rays.size()))];
    const Ray& l0 = rays[rng2.uniform_int(static_cast<int>(rays.size()))];
    const Ray& l1 = rays[rng2.uniform_int(static_cast<int>(rays.size()))];
    const double s = rng2.uniform01();
    worst_ray = std::max(worst_ray, ray_cat0_defect(l, l0, l1, s));
  }
  res.lines.push_back("ray triples: max cat0 defect " + fmt_double(worst_ray) + " (<= 1e-6)");

  res.worst = std::max({worst_defect - point_bound, worst_triangle - 1e-9,
                        worst_speed - speed_tol, worst_ray - 1e-6});
  res.passed = res.worst <= 0.0;
  return res;
}

FlowTrajectory short_flow(const Instance& inst, int m) {
  const double T = std::min(4.0, inst.defaults.horizon);
  return mayer_flow(*inst.f, inst.defaults.x0, T, m);
}

SuiteResult suite_evi(const Instance& inst, std::uint64_t seed) {
  SuiteResult res{"evi", inst.id};
  const FlowTrajectory traj = short_flow(inst, 64);
  std::vector<Point> competitors = inst.sample_points(3, seed);
  competitors.push_back(inst.defaults.x0);
  double worst = -kPlusInfinity;
  for (const Point& v : competitors) {
    if (!in_domain(inst.f->value(v))) continue;
    for (double r : evi_residual(*inst.f, traj, v)) worst = std::max(worst, r);
  }
  res.worst = worst - 1e-8;
  res.passed = res.worst <= 0.0;
  res.lines.push_back("max evi residual " + fmt_double(worst) + " (<= 1e-8)");
  return res;
}

SuiteResult suite_sandwich(const Instance& inst, std::uint64_t seed) {
  SuiteResult res{"sandwich", inst.id};
  Rng rng(seed ^ 0x5a4dULL);
  const FlowTrajectory traj = short_flow(inst, 64);
  double worst = kPlusInfinity;
  for (int k = 0; k < 100; ++k) {
    std::size_t i = static_cast<std::size_t>(rng.uniform_int(static_cast<int>(traj.size())));
    std::size_t j = static_cast<std::size_t>(rng.uniform_int(static_cast<int>(traj.size())));
    if (i > j) std::swap(i, j);
    const auto [lower, upper] = sandwich_check(*inst.f, traj, i, j);
    worst = std::min({worst, lower, upper});
  }
  res.worst = -1e-8 - worst;  // pass iff worst >= -1e-8
  res.passed = worst >= -1e-8;
  res.lines.push_back("min sandwich gap " + fmt_double(worst) + " (>= -1e-8)");
  return res;
}

SuiteResult suite_moment_weight(const Instance& inst, std::uint64_t seed) {
  SuiteResult res{"moment-weight", inst.id};
  const std::vector<Ray> rays = inst.sample_rays(50, seed);
  const std::vector<Point> probes = inst.sample_points(50, seed ^ 0x9eULL);
  const double gap = moment_weight_gap(*inst.f, rays, probes);
  res.worst = -1e-6 - gap;
  res.passed = gap >= -1e-6;
  res.lines.push_back("moment-weight gap " + fmt_double(gap) + " (>= -1e-6)");
  return res;
}

SuiteResult suite_bind(const Instance& inst, std::uint64_t seed) {
  (void)seed;
  SuiteResult res{"bind", inst.id};
  const double tol = inst.defaults.tol;
  const double horizon = std::min(16.0, inst.defaults.horizon);
  const double delta =
      bind_check(*inst.f, inst.default_start(0), inst.default_start(1), horizon, tol);
  res.worst = delta - 2.0 * tol;
  res.passed = res.worst <= 0.0;
  res.lines.push_back("limit slope start difference " + fmt_double(delta) + " (<= " +
                      fmt_double(2.0 * tol) + ")");
  return res;
}

}  // namespace

SuiteResult run_suite(const Instance& inst, const std::string& suite, std::uint64_t seed) {
  if (suite == "cat0") return suite_cat0(inst, seed);
  if (suite == "evi") return suite_evi(inst, seed);
  if (suite == "sandwich") return suite_sandwich(inst, seed);
  if (suite == "moment-weight") return suite_moment_weight(inst, seed);
  if (suite == "bind") return suite_bind(inst, seed);
  throw InputError("unknown suite '" + suite + "'");
}

std::vector<SuiteResult> run_all_suites(const Instance& inst, std::uint64_t seed) {
  std::vector<SuiteResult> out;
  for (const std::string& name : suite_names()) out.push_back(run_suite(inst, name, seed));
  return out;
}

}  // namespace hflow
