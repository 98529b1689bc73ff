#include "hflow/export.hpp"

#include <charconv>
#include <fstream>

#include <nlohmann/json.hpp>

#include "hflow/errors.hpp"
#include "hflow/toric.hpp"

namespace hflow {

using ordered_json = nlohmann::ordered_json;

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // '\n' newlines on every platform
  if (!out) throw NumericalError("cannot open '" + path + "' for writing");
  return out;
}

void dump_json(const std::string& path, const ordered_json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

ordered_json ray_to_json(const Ray& ray) {
  ordered_json j;
  j["base"] = ray.base().data;
  j["speed"] = ray.speed();
  j["times"] = ray.times();
  ordered_json payload = ordered_json::array();
  for (const Point& p : ray.samples()) payload.push_back(p.data);
  j["payload"] = payload;
  return j;
}

}  // namespace

void write_trajectory_csv(const std::string& path, const FlowTrajectory& traj,
                          const Functional* analytic) {
  std::ofstream out = open_out(path);
  out << "t,value,slope,dist_from_start,evi_vs_start,energy_residual";
  const bool has_analytic = analytic && analytic->analytic_slope(traj.points.front()).has_value();
  if (has_analytic) out << ',' << analytic->analytic_slope_label();
  out << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << fmt_double(traj.times[k]) << ',' << fmt_double(traj.values[k]) << ','
        << fmt_double(traj.slopes[k]) << ',' << fmt_double(traj.dist_from_start[k]) << ','
        << fmt_double(traj.evi_vs_start[k]) << ',' << fmt_double(traj.energy_residual[k]);
    if (has_analytic) out << ',' << fmt_double(*analytic->analytic_slope(traj.points[k]));
    out << '\n';
  }
}

void write_trajectory_json(const std::string& path, const FlowTrajectory& traj,
                           const RunMeta& meta) {
  ordered_json j;
  j["schema_version"] = "v1";
  j["kind"] = "trajectory";
  j["instance"] = meta.instance;
  j["horizon"] = meta.horizon;
  j["tol"] = meta.tol;
  j["seed"] = meta.seed;
  j["m"] = traj.m;
  j["step"] = traj.step;
  j["cauchy_gap"] = traj.cauchy_gap;
  j["cauchy_converged"] = traj.cauchy_converged;
  ordered_json nodes = ordered_json::array();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    ordered_json n;
    n["t"] = traj.times[k];
    n["value"] = traj.values[k];
    n["slope"] = traj.slopes[k];
    n["dist_from_start"] = traj.dist_from_start[k];
    nodes.push_back(std::move(n));
  }
  j["nodes"] = std::move(nodes);
  dump_json(path, j);
}

void write_report_json(const std::string& path, const SharpnessReport& rep, const RunMeta& meta,
                       const MultiStartData* multi) {
  ordered_json j;
  j["schema_version"] = "v1";
  j["kind"] = "sharpness_report";
  j["instance"] = meta.instance;
  j["horizon"] = meta.horizon;
  j["tol"] = meta.tol;
  j["seed"] = meta.seed;
  j["case"] = to_string(rep.cls);
  j["B"] = rep.limit_slope;
  j["B_converged"] = rep.limit_slope_converged;
  j["B_last_delta"] = rep.limit_slope_delta;
  j["ratio"] = rep.ratio;
  j["ratio_error_bar"] = rep.ratio_error_bar;
  j["norm"] = rep.norm;
  j["gap"] = rep.gap;
  j["geodesically_unstable"] = rep.unstable;
  j["escape_distance"] = rep.escape_distance;
  j["flags"] = rep.flags;
  if (rep.ray) {
    j["ray"] = ray_to_json(*rep.ray);
  } else {
    j["ray"] = nullptr;
  }
  if (multi) {
    j["per_start_B"] = multi->per_start_limit_slope;
    if (multi->uniqueness) j["uniqueness_probe"] = *multi->uniqueness;
  }
  dump_json(path, j);
}

void write_report_summary_csv(const std::string& path, const SharpnessReport& rep,
                              const RunMeta& meta, const MultiStartData* multi,
                              bool with_header) {
  std::ofstream out(path, with_header ? std::ios::binary : (std::ios::binary | std::ios::app));
  if (!out) throw NumericalError("cannot open '" + path + "' for writing");
  if (with_header) {
    out << "instance,case,B,ratio,norm,gap,unstable,escape_distance,uniqueness_probe,flags\n";
  }
  out << meta.instance << ',' << to_string(rep.cls) << ',' << fmt_double(rep.limit_slope) << ','
      << fmt_double(rep.ratio) << ',' << fmt_double(rep.norm) << ',' << fmt_double(rep.gap) << ','
      << (rep.unstable ? 1 : 0) << ',' << fmt_double(rep.escape_distance) << ',';
  if (multi && multi->uniqueness) out << fmt_double(*multi->uniqueness);
  out << ',';
  for (std::size_t i = 0; i < rep.flags.size(); ++i) {
    if (i) out << ';';
    out << rep.flags[i];
  }
  out << '\n';
}

void write_ray_csv(const std::string& path, const Ray& ray) {
  std::ofstream out = open_out(path);
  out << "component,base";
  for (std::size_t k = 1; k < ray.times().size(); ++k) {
    out << ",t" << fmt_double(ray.times()[k]);
  }
  out << ",direction\n";
  const Point& base = ray.base();
  const Point& unit = ray.samples()[1];  // time-1 sample: base + direction
  for (std::size_t i = 0; i < base.size(); ++i) {
    out << i << ',' << fmt_double(base[i]);
    for (std::size_t k = 1; k < ray.samples().size(); ++k) {
      out << ',' << fmt_double(ray.samples()[k][i]);
    }
    out << ',' << fmt_double(unit[i] - base[i]) << '\n';
  }
}

void write_ray_json(const std::string& path, const Ray& ray) {
  ordered_json j;
  j["schema_version"] = "v1";
  j["kind"] = "ray";
  j.update(ray_to_json(ray));
  dump_json(path, j);
}

void write_plot_script(const std::string& path, const std::string& trajectory_csv,
                       const std::string& ray_csv, const std::string& title) {
  std::ofstream out = open_out(path);
  out << "# gnuplot script; run: gnuplot " << path << "\n"
      << "set datafile separator ','\n"
      << "set terminal pngcairo size 1200,500\n"
      << "set output '" << title << ".png'\n"
      << "set multiplot layout 1,2\n"
      << "set key autotitle columnhead\n"
      << "set title '" << title << ": value and slope'\n"
      << "set xlabel 't'\n"
      << "plot '" << trajectory_csv << "' using 1:2 with lines title 'value', \\\n"
      << "     '" << trajectory_csv << "' using 1:3 with lines title 'slope'\n";
  if (!ray_csv.empty()) {
    out << "set title '" << title << ": extracted ray direction'\n"
        << "set xlabel 'component'\n"
        << "plot '" << ray_csv << "' using 1:(column(" << "'direction'"
        << ")) with lines title 'direction'\n";
  } else {
    out << "set title '" << title << ": distance from start'\n"
        << "plot '" << trajectory_csv << "' using 1:4 with lines title 'dist'\n";
  }
  out << "unset multiplot\n";
}

void write_toric_snapshot_csv(const std::string& path, const Point& endpoint, int grid_size) {
  const toric::Snapshot snap = toric::snapshot(endpoint.data, grid_size);
  std::ofstream out = open_out(path);
  out << "x,u,phi,S,w\n";
  for (std::size_t i = 0; i < snap.x.size(); ++i) {
    out << fmt_double(snap.x[i]) << ',' << fmt_double(snap.u[i]) << ',' << fmt_double(snap.phi[i])
        << ',' << fmt_double(snap.S[i]) << ',' << fmt_double(snap.w[i]) << '\n';
  }
}

}  // namespace hflow
