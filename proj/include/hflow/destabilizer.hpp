#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hflow/flow.hpp"
#include "hflow/ray.hpp"

namespace hflow {

enum class FlowClass { Bounded, Escaping };

std::string to_string(FlowClass c);

struct EscapeDecision {
  FlowClass cls = FlowClass::Bounded;
  bool inconclusive = false;  // far from the start but no longer moving
  double distance = 0.0;      // d(x0, end)
  double last_increment = 0.0;
};

// Escaping iff the end of the trajectory is beyond threshold from the start
// and the distance still grew over the second half of the run.
EscapeDecision escape_test(const FlowTrajectory& traj, double threshold);

struct ExtractionResult {
  Ray ray;
  bool stabilized = true;    // every sample moved < 1e-5 at the last refinement
  bool extrapolated = false; // geometric tail extrapolation was applied
  double max_move = 0.0;
  std::vector<double> extraction_distances;
};

// Limit ray of the unit-speed segments from the base to the trajectory nodes
// at the given indices (deduplicated, increasing distance). The base defaults
// to the first flow node. Samples must stabilize: decreasing movements are
// accepted (extrapolating the geometric tail); oscillation raises
// NumericalError with the oscillation magnitude.
ExtractionResult extract_ray(const Functional& f, const FlowTrajectory& traj,
                             std::span<const std::size_t> node_indices,
                             const Point* base_override = nullptr);

struct SharpnessOptions {
  double escape_threshold = 4.0;
  double extraction_distance = 64.0;
  int m_cap = 1 << 16;
  long max_extension_steps = 1 << 22;
};

struct SharpnessReport {
  FlowClass cls = FlowClass::Bounded;
  double limit_slope = 0.0;  // B
  bool limit_slope_converged = true;
  double limit_slope_delta = 0.0;
  std::optional<Ray> ray;  // empty in the bounded case (trivial ray)
  double ratio = 0.0;      // -F(ray)/||ray||, 0 for the trivial ray
  double ratio_error_bar = 0.0;
  double norm = 0.0;       // ||ray||
  double gap = 0.0;        // B - max(0, ratio)
  bool unstable = false;   // max(0, ratio) > tol
  double escape_distance = 0.0;
  double horizon = 0.0;
  double tol = 0.0;
  std::vector<std::string> flags;
  FlowTrajectory trajectory;  // finest trajectory, including the extension tail
};

// Full pipeline: run the flow of F from x0, classify, and in the escaping
// case extract the limit ray and compare B with the radial slope bound. G
// must dominate F and decrease along the flow (checked on the computed
// nodes); pass the same functional twice for the single-functional mode.
SharpnessReport sharpness_report(const Functional& f, const Functional& g, const Point& x0,
                                 double horizon, double tol, const SharpnessOptions& opts = {});

// Max pairwise chordal distance between the limit rays extracted from each
// start, re-extracted from a common base. Returns 0 when any start stays
// bounded (no escaping rays to compare).
double uniqueness_probe(const Functional& f, const Functional& g, std::span<const Point> starts,
                        double horizon, double tol, const SharpnessOptions& opts = {});

}  // namespace hflow
