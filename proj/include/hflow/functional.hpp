#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hflow/geometry.hpp"

namespace hflow {

inline constexpr double kPlusInfinity = std::numeric_limits<double>::infinity();

// Convex lower-semicontinuous functional on a geodesic space: evaluation,
// proximal (resolvent) map, and optionally a closed-form slope. Immutable and
// reentrant; prox calls may run concurrently.
class Functional {
 public:
  virtual ~Functional() = default;

  virtual std::string name() const = 0;
  virtual const SpacePtr& space() const = 0;

  // +infinity exactly when x is outside the domain.
  virtual double value(const Point& x) const = 0;

  // argmin_v { 1/2 d(v,x)^2 + lambda * value(v) }, lambda > 0.
  virtual Point prox(const Point& x, double lambda) const = 0;

  virtual std::optional<double> analytic_slope(const Point& x) const { return std::nullopt; }

  // Label for the analytic slope column in exports ("calabi_energy" for the
  // toric Mabuchi functional).
  virtual std::string analytic_slope_label() const { return "analytic_slope"; }
};

using FunctionalPtr = std::shared_ptr<const Functional>;

inline bool in_domain(double value) { return value < kPlusInfinity; }

// Default step schedule for the resolvent quotient d(x, prox(x,l))/l.
std::span<const double> default_slope_schedule();

struct SlopeEstimate {
  double value = 0.0;                  // extrapolated limit of the quotients
  std::vector<double> quotients;       // one per schedule entry, largest step first
  bool monotone = true;                // quotients nondecreasing as the step shrinks
  bool warning = false;                // non-monotone beyond tolerance; value falls back
  std::optional<double> probe_lower_bound;  // sup over probes of (G(x)-G(z))^+ / d(x,z)
};

// Slope |dG|(x) estimated from the resolvent quotient over a decreasing step
// schedule, extrapolated to step 0 (Neville on the quotient values). When a
// probe set is given, the variational form sup_z (G(x)-G(z))^+/d(x,z) is
// evaluated over it as a lower-bound cross check.
SlopeEstimate estimate_slope(const Functional& g, const Point& x,
                             std::span<const double> schedule,
                             std::span<const Point> probes = {});

// Same, with the default schedule.
SlopeEstimate estimate_slope(const Functional& g, const Point& x);

// Convenience: the extrapolated value only.
double slope(const Functional& g, const Point& x);

}  // namespace hflow
