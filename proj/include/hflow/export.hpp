#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hflow/destabilizer.hpp"
#include "hflow/flow.hpp"
#include "hflow/ray.hpp"

namespace hflow {

// Shortest round-trip decimal form; locale-free, '.' decimal point.
std::string fmt_double(double v);

struct RunMeta {
  std::string instance;
  double horizon = 0.0;
  double tol = 0.0;
  std::uint64_t seed = 0;
};

struct MultiStartData {
  std::vector<double> per_start_limit_slope;
  std::optional<double> uniqueness;
};

void write_trajectory_csv(const std::string& path, const FlowTrajectory& traj,
                          const Functional* analytic = nullptr);
void write_trajectory_json(const std::string& path, const FlowTrajectory& traj,
                           const RunMeta& meta);

void write_report_json(const std::string& path, const SharpnessReport& rep, const RunMeta& meta,
                       const MultiStartData* multi = nullptr);
// One aggregation row per run; when with_header, the header row is written first.
void write_report_summary_csv(const std::string& path, const SharpnessReport& rep,
                              const RunMeta& meta, const MultiStartData* multi, bool with_header);
void write_ray_csv(const std::string& path, const Ray& ray);
void write_ray_json(const std::string& path, const Ray& ray);

// Gnuplot script rendering value/slope against time and the extracted ray
// profile from the emitted CSVs.
void write_plot_script(const std::string& path, const std::string& trajectory_csv,
                       const std::string& ray_csv, const std::string& title);

// Toric potential snapshot (x, u, phi, S, w) of a trajectory endpoint.
void write_toric_snapshot_csv(const std::string& path, const Point& endpoint, int grid_size);

}  // namespace hflow
