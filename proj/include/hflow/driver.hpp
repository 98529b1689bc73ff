#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "hflow/destabilizer.hpp"
#include "hflow/export.hpp"
#include "hflow/registry.hpp"
#include "hflow/suites.hpp"

namespace hflow {

struct RunOptions {
  double horizon = 0.0;  // <= 0: instance default
  double tol = 0.0;      // <= 0: instance default
  int m_cap = 0;         // <= 0: instance default
  std::uint64_t seed = 0;
  int jobs = 1;

  double horizon_or(const Instance& inst) const {
    return horizon > 0.0 ? horizon : inst.defaults.horizon;
  }
  double tol_or(const Instance& inst) const { return tol > 0.0 ? tol : inst.defaults.tol; }
  int m_cap_or(const Instance& inst) const { return m_cap > 0 ? m_cap : inst.defaults.m_cap; }
};

struct FlowRun {
  FlowTrajectory trajectory;
  RunMeta meta;
};

FlowRun run_flow(const Instance& inst, const Point& x0, const RunOptions& opts);

struct DestabilizeRun {
  SharpnessReport report;  // report of the first start
  MultiStartData multi;
  RunMeta meta;
};

// Multi-start pipeline: per-start sharpness reports (parallel over starts when
// jobs > 1, merged in start order), limit-slope spread, and the uniqueness
// probe over escaping starts.
DestabilizeRun run_destabilize(const Instance& inst, std::span<const Point> starts,
                               const RunOptions& opts);

}  // namespace hflow
