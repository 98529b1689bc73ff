#include "hflow/registry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hflow/errors.hpp"
#include "hflow/rng.hpp"
#include "hflow/toric.hpp"

namespace hflow {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw InputError("");
    return v;
  } catch (...) {
    throw InputError("cannot parse " + what + " from '" + tok + "'");
  }
}

std::vector<double> parse_csv_doubles(const std::string& literal) {
  std::vector<double> vals;
  for (const std::string& tok : split(literal, ',')) {
    vals.push_back(parse_double(tok, "coordinate"));
  }
  return vals;
}

Point toric_profile(int N, const std::string& kind, double amp) {
  Point p;
  p.data.assign(static_cast<std::size_t>(N) + 1, 0.0);
  for (int i = 0; i <= N; ++i) {
    const double x = double(i) / N;
    if (kind == "sin") {
      p[i] = amp * std::sin(M_PI * x);
    } else if (kind == "x2") {
      p[i] = amp * x * x;
    } else if (kind == "x") {
      p[i] = amp * x;
    } else if (kind == "const") {
      p[i] = amp;
    } else {
      throw InputError("unknown toric profile '" + kind + "'");
    }
  }
  return p;
}

}  // namespace

Point Instance::parse_start(const std::string& literal) const {
  if (toric) {
    if (literal.find(',') != std::string::npos) {
      Point p(parse_csv_doubles(literal));
      space->require_point(p);
      return p;
    }
    if (literal == "zero" || literal == "u0" || literal.empty()) {
      return Point(std::vector<double>(space->payload_size(), 0.0));
    }
    const auto colon = literal.find(':');
    const std::string kind = literal.substr(0, colon);
    const double amp =
        colon == std::string::npos ? 0.1 : parse_double(literal.substr(colon + 1), "amplitude");
    return toric_profile(toric_grid, kind, amp);
  }
  Point p(parse_csv_doubles(literal));
  space->require_point(p);
  return p;
}

Point Instance::default_start(int k) const {
  if (k < 0) throw InputError("default_start: index must be nonnegative");
  if (toric) {
    switch (k % 4) {
      case 0: return Point(std::vector<double>(space->payload_size(), 0.0));
      case 1: return toric_profile(toric_grid, "sin", 0.1);
      case 2: return toric_profile(toric_grid, "x2", 0.1);
      default: return toric_profile(toric_grid, "sin", 0.05);
    }
  }
  if (dynamic_cast<const TripodSpace*>(space.get()) != nullptr) {
    const int branch = 1 + (k % 3);
    const double r = 2.0 + 2.0 * (k / 3);
    return TripodSpace::encode(branch, r);
  }
  Point p = defaults.x0;
  if (k > 0) {
    const double delta = (k % 2 == 1 ? 1.0 : -1.0) * (2.0 * k + 3.0);
    p[0] += delta;
  }
  return p;
}

std::vector<Point> Instance::sample_points(std::size_t count, std::uint64_t seed) const {
  Rng rng(seed ^ 0x5eedULL);
  std::vector<Point> pts;
  pts.reserve(count);
  if (toric) {
    for (std::size_t k = 0; k < count; ++k) {
      const double a1 = rng.uniform(-0.05, 0.05);
      const double a2 = rng.uniform(-0.05, 0.05);
      const double a3 = rng.uniform(-0.5, 0.5);
      const double a4 = rng.uniform(-0.5, 0.5);
      Point p(std::vector<double>(space->payload_size(), 0.0));
      for (int i = 0; i <= toric_grid; ++i) {
        const double x = double(i) / toric_grid;
        p[i] = a1 * std::sin(M_PI * x) + a2 * x * x + a3 * x + a4;
      }
      pts.push_back(std::move(p));
    }
    return pts;
  }
  if (dynamic_cast<const TripodSpace*>(space.get()) != nullptr) {
    for (std::size_t k = 0; k < count; ++k) {
      pts.push_back(TripodSpace::encode(1 + rng.uniform_int(3), rng.uniform(0.0, 3.0)));
    }
    return pts;
  }
  for (std::size_t k = 0; k < count; ++k) {
    Point p(std::vector<double>(space->payload_size(), 0.0));
    for (double& c : p.data) c = rng.uniform(-2.0, 2.0);
    pts.push_back(std::move(p));
  }
  return pts;
}

Point Instance::ray_probe_base() const {
  if (toric) return Point(std::vector<double>(space->payload_size(), 0.0));
  if (dynamic_cast<const TripodSpace*>(space.get()) != nullptr) {
    return TripodSpace::encode(1, 0.0);
  }
  return Point(std::vector<double>(space->payload_size(), 0.0));
}

std::vector<Ray> Instance::sample_rays(std::size_t count, std::uint64_t seed) const {
  Rng rng(seed ^ 0x4a7eULL);
  std::vector<Ray> rays;
  rays.reserve(count);
  const Point base = ray_probe_base();
  if (toric) {
    const double t_max = 2048.0;
    // Always include the constant and affine directions.
    rays.push_back(Ray::from_direction(space, base, toric_profile(toric_grid, "const", 1.0), t_max));
    rays.push_back(Ray::from_direction(space, base, toric_profile(toric_grid, "x", 1.0), t_max));
    while (rays.size() < count) {
      // Convex quadratic directions keep u'' > 0 for every t >= 0.
      const double c2 = rng.uniform(0.0, 1.0);
      const double c1 = rng.uniform(-1.0, 1.0);
      const double c0 = rng.uniform(-1.0, 1.0);
      Point dir(std::vector<double>(space->payload_size(), 0.0));
      for (int i = 0; i <= toric_grid; ++i) {
        const double x = double(i) / toric_grid;
        dir[i] = c0 + c1 * x + c2 * x * x;
      }
      rays.push_back(Ray::from_direction(space, base, dir, t_max));
    }
    return rays;
  }
  if (dynamic_cast<const TripodSpace*>(space.get()) != nullptr) {
    const double t_max = 64.0;
    if (analytic.ray_branch) {
      const int b = *analytic.ray_branch;
      rays.push_back(Ray::from_generator(
          space, [&, b](double t) { return TripodSpace::encode(b, t); }, t_max));
    }
    while (rays.size() < count) {
      const int b = 1 + rng.uniform_int(3);
      const double speed = rng.uniform(0.5, 2.0);
      rays.push_back(Ray::from_generator(
          space, [&, b, speed](double t) { return TripodSpace::encode(b, speed * t); }, t_max));
    }
    return rays;
  }
  const double t_max = 64.0;
  if (analytic.ray_direction) {
    rays.push_back(Ray::from_direction(space, base, *analytic.ray_direction, t_max));
  }
  while (rays.size() < count) {
    Point dir(std::vector<double>(space->payload_size(), 0.0));
    double norm = 0.0;
    for (double& c : dir.data) {
      c = rng.uniform(-1.0, 1.0);
      norm += c * c;
    }
    norm = std::sqrt(norm);
    if (norm < 0.1) continue;
    for (double& c : dir.data) c /= norm;
    rays.push_back(Ray::from_direction(space, base, dir, t_max));
  }
  return rays;
}

namespace {

Instance finish_model(std::string id, ModelInstance model, InstanceDefaults defaults) {
  Instance inst;
  inst.id = std::move(id);
  inst.space = std::move(model.space);
  inst.f = std::move(model.f);
  inst.g = std::move(model.g);
  inst.analytic = std::move(model.analytic);
  inst.defaults = std::move(defaults);
  return inst;
}

}  // namespace

Instance make_instance(const std::string& id) {
  const std::vector<std::string> parts = split(id, '.');
  if (parts.empty()) throw InputError("empty instance id");

  if (parts[0] == "euclid") {
    if (parts.size() < 2) throw InputError("euclid instance needs a tag: " + id);
    const std::string& tag = parts[1];
    std::vector<double> params;
    for (std::size_t i = 2; i < parts.size(); ++i) {
      params.push_back(parse_double(parts[i], "parameter"));
    }
    ModelInstance model = make_euclidean(tag, params);
    InstanceDefaults d;
    d.x0 = Point(std::vector<double>(model.space->payload_size(), 0.0));
    if (tag == "quadratic") d.x0 = Point(std::vector<double>(model.space->payload_size(), 1.0));
    if (tag == "abs") d.x0[0] = 2.0;
    d.horizon = 8.0;
    d.tol = 1e-3;
    d.certification_tol = (tag == "exp_linear" || tag == "pair") ? 2e-3 : 1e-3;
    d.extraction_distance = 32.0;
    return finish_model(id, std::move(model), std::move(d));
  }

  if (parts[0] == "tripod") {
    if (parts.size() != 4) throw InputError("tripod instance needs three slopes: " + id);
    const std::array<double, 3> alpha{parse_double(parts[1], "slope"),
                                      parse_double(parts[2], "slope"),
                                      parse_double(parts[3], "slope")};
    ModelInstance model = make_tripod(alpha, /*allow_tie=*/true);
    InstanceDefaults d;
    d.x0 = TripodSpace::encode(1, 2.0);
    d.horizon = 8.0;
    d.tol = 1e-3;
    d.certification_tol = 1e-3;
    d.extraction_distance = 32.0;
    return finish_model(id, std::move(model), std::move(d));
  }

  if (parts[0] == "toric") {
    if (parts.size() < 3 || parts[1].size() < 2 || parts[1][0] != 'N' || parts[2].empty() ||
        parts[2][0] != 'a') {
      throw InputError("toric instance id must look like toric.N256.a2.0: " + id);
    }
    const int N = static_cast<int>(parse_double(parts[1].substr(1), "grid size"));
    std::string a_str = parts[2].substr(1);
    for (std::size_t i = 3; i < parts.size(); ++i) a_str += "." + parts[i];
    const double a = parse_double(a_str, "mean curvature");

    Instance inst;
    auto space = std::make_shared<toric::ToricSpace>(N);
    inst.id = id;
    inst.space = space;
    inst.f = std::make_shared<toric::MabuchiFunctional>(space, a);
    inst.g = inst.f;
    inst.toric = true;
    inst.toric_grid = N;
    inst.toric_a = a;
    const bool canonical = std::abs(a - 2.0) < 1e-12;
    // Off the canonical value the best ray direction is the constant profile
    // (convexity forces f(0)+f(1) >= 2 int f, Cauchy-Schwarz does the rest),
    // so the sharp slope bound is |a-2| at f = sign(a-2).
    inst.analytic.limit_slope = std::abs(a - 2.0);
    inst.analytic.escaping = !canonical;
    inst.analytic.unstable = !canonical;
    if (!canonical) {
      inst.analytic.ray_direction = toric_profile(N, "const", a > 2.0 ? 1.0 : -1.0);
    }
    inst.defaults.x0 = Point(std::vector<double>(space->payload_size(), 0.0));
    inst.defaults.horizon = canonical ? 50.0 : 16.0;
    inst.defaults.tol = 1e-3;
    inst.defaults.certification_tol = 2e-2;
    inst.defaults.extraction_distance = 64.0;
    return inst;
  }

  throw InputError("unknown instance id '" + id + "'");
}

std::vector<std::string> registry_ids() {
  return {
      "euclid.linear.3.4", "euclid.quadratic", "euclid.abs",      "euclid.exp_linear",
      "euclid.pair",       "tripod.-1.2.2",    "tripod.1.1.1",    "tripod.0.2.2",
      "toric.N256.a2.0",   "toric.N256.a3.0",
  };
}

}  // namespace hflow
