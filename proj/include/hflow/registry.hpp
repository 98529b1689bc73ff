#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hflow/model_spaces.hpp"
#include "hflow/ray.hpp"

namespace hflow {

struct InstanceDefaults {
  Point x0;
  double horizon = 8.0;
  double tol = 1e-3;
  int m_cap = 1 << 16;
  double escape_threshold = 4.0;
  double extraction_distance = 64.0;  // how far the flow is chased for the limit ray
  double certification_tol = 1e-3;    // |gap| certification at instance scale
};

// A registered space + functional pair with its closed-form answers and run
// defaults. Instances are immutable and shareable.
struct Instance {
  std::string id;
  SpacePtr space;
  FunctionalPtr f;
  FunctionalPtr g;  // == f except for two-functional instances
  AnalyticAnswers analytic;
  InstanceDefaults defaults;

  bool toric = false;
  int toric_grid = 0;
  double toric_a = 0.0;

  // Payload literal: comma-separated coordinates, or for toric instances a
  // named profile ("zero", "sin:0.1", "x2:0.1", "x:0.1", "const:1").
  Point parse_start(const std::string& literal) const;

  // Deterministic canonical starts (k = 0 is the default start).
  Point default_start(int k) const;

  // Deterministic samples for the property suites.
  std::vector<Point> sample_points(std::size_t count, std::uint64_t seed) const;
  std::vector<Ray> sample_rays(std::size_t count, std::uint64_t seed) const;
  Point ray_probe_base() const;  // shared base the sampled rays emanate from
};

// Resolves ids of the form euclid.<tag>[.params...], tripod.<a1>.<a2>.<a3>,
// toric.N<grid>.a<value>. Throws InputError for unknown ids.
Instance make_instance(const std::string& id);

// The ids shipped with the toolkit (make_instance also accepts other
// parameter values in the same families).
std::vector<std::string> registry_ids();

}  // namespace hflow
