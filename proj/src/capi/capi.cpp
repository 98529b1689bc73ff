#include "hflow.h"

#include <algorithm>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "hflow/driver.hpp"
#include "hflow/errors.hpp"

namespace {

thread_local std::string g_last_error;

hf_status fail(hf_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

// Maps core exceptions onto status codes.
template <typename Fn>
hf_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const hflow::InputError& e) {
    return fail(HF_ERR_ARGUMENT, e.what());
  } catch (const hflow::NumericalError& e) {
    return fail(HF_ERR_NUMERICAL, e.what());
  } catch (const std::exception& e) {
    return fail(HF_ERR_NUMERICAL, e.what());
  }
}

hf_status copy_string(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buf) return HF_OK;
  if (cap < s.size() + 1) return fail(HF_ERR_ARGUMENT, "buffer too small");
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return HF_OK;
}

hf_status copy_payload(const hflow::Point& p, double* buf, size_t cap, size_t* len) {
  if (len) *len = p.size();
  if (!buf) return HF_OK;
  if (cap < p.size()) return fail(HF_ERR_ARGUMENT, "payload buffer too small");
  std::memcpy(buf, p.data.data(), p.size() * sizeof(double));
  return HF_OK;
}

hflow::RunOptions to_run_options(const hf_run_options* opts) {
  hflow::RunOptions ro;
  if (opts) {
    ro.horizon = opts->horizon;
    ro.tol = opts->tol;
    ro.m_cap = static_cast<int>(opts->m_cap);
    ro.seed = opts->seed;
    ro.jobs = opts->jobs > 0 ? opts->jobs : 1;
  }
  return ro;
}

}  // namespace

struct hf_instance {
  hflow::Instance inst;
};

struct hf_trajectory {
  hflow::FlowRun run;
  const hf_instance* owner;  // for the analytic slope column and snapshots
};

struct hf_report {
  hflow::DestabilizeRun run;
  const hf_instance* owner;
};

extern "C" {

const char* hf_version(void) { return "hflow 1.0.0"; }

const char* hf_last_error(void) { return g_last_error.c_str(); }

hf_status hf_registry_ids(char* buf, size_t cap, size_t* needed) {
  return guarded([&]() {
    std::ostringstream ss;
    for (const std::string& id : hflow::registry_ids()) ss << id << '\n';
    return copy_string(ss.str(), buf, cap, needed);
  });
}

hf_status hf_instance_open(const char* id, hf_instance** out) {
  if (!id || !out) return fail(HF_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&]() {
    try {
      auto handle = new hf_instance{hflow::make_instance(id)};
      *out = handle;
      return HF_OK;
    } catch (const hflow::InputError& e) {
      return fail(HF_ERR_UNKNOWN_INSTANCE, e.what());
    }
  });
}

void hf_instance_close(hf_instance* inst) { delete inst; }

hf_status hf_instance_payload_size(const hf_instance* inst, size_t* out) {
  if (!inst || !out) return fail(HF_ERR_ARGUMENT, "null argument");
  *out = inst->inst.space->payload_size();
  return HF_OK;
}

hf_status hf_instance_parse_start(const hf_instance* inst, const char* literal, double* buf,
                                  size_t cap, size_t* len) {
  if (!inst || !literal) return fail(HF_ERR_ARGUMENT, "null argument");
  return guarded([&]() { return copy_payload(inst->inst.parse_start(literal), buf, cap, len); });
}

hf_status hf_instance_default_start(const hf_instance* inst, int k, double* buf, size_t cap,
                                    size_t* len) {
  if (!inst) return fail(HF_ERR_ARGUMENT, "null argument");
  return guarded([&]() { return copy_payload(inst->inst.default_start(k), buf, cap, len); });
}

void hf_run_options_init(hf_run_options* opts) {
  if (!opts) return;
  opts->horizon = 0.0;
  opts->tol = 0.0;
  opts->m_cap = 0;
  opts->seed = 0;
  opts->jobs = 1;
}

hf_status hf_flow_run(const hf_instance* inst, const double* x0, size_t x0_len,
                      const hf_run_options* opts, hf_trajectory** out) {
  if (!inst || !out) return fail(HF_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&]() {
    hflow::Point start = inst->inst.defaults.x0;
    if (x0 && x0_len > 0) start = hflow::Point(std::vector<double>(x0, x0 + x0_len));
    auto traj = new hf_trajectory{hflow::run_flow(inst->inst, start, to_run_options(opts)), inst};
    *out = traj;
    return HF_OK;
  });
}

size_t hf_trajectory_nodes(const hf_trajectory* traj) {
  return traj ? traj->run.trajectory.size() : 0;
}

hf_status hf_trajectory_node(const hf_trajectory* traj, size_t k, double* t, double* value,
                             double* slope, double* dist_from_start) {
  if (!traj || k >= traj->run.trajectory.size()) {
    return fail(HF_ERR_ARGUMENT, "node index out of range");
  }
  const hflow::FlowTrajectory& tr = traj->run.trajectory;
  if (t) *t = tr.times[k];
  if (value) *value = tr.values[k];
  if (slope) *slope = tr.slopes[k];
  if (dist_from_start) *dist_from_start = tr.dist_from_start[k];
  return HF_OK;
}

hf_status hf_trajectory_write_csv(const hf_trajectory* traj, const char* path) {
  if (!traj || !path) return fail(HF_ERR_ARGUMENT, "null argument");
  return guarded([&]() {
    hflow::write_trajectory_csv(path, traj->run.trajectory, traj->owner->inst.f.get());
    return HF_OK;
  });
}

hf_status hf_trajectory_write_json(const hf_trajectory* traj, const char* path) {
  if (!traj || !path) return fail(HF_ERR_ARGUMENT, "null argument");
  return guarded([&]() {
    hflow::write_trajectory_json(path, traj->run.trajectory, traj->run.meta);
    return HF_OK;
  });
}

hf_status hf_trajectory_write_snapshot_csv(const hf_trajectory* traj, const char* path) {
  if (!traj || !path) return fail(HF_ERR_ARGUMENT, "null argument");
  return guarded([&]() {
    if (!traj->owner->inst.toric) {
      return fail(HF_ERR_ARGUMENT, "snapshots are only defined for toric instances");
    }
    hflow::write_toric_snapshot_csv(path, traj->run.trajectory.points.back(),
                                    traj->owner->inst.toric_grid);
    return HF_OK;
  });
}

void hf_trajectory_free(hf_trajectory* traj) { delete traj; }

hf_status hf_destabilize_run(const hf_instance* inst, const double* starts, size_t n_starts,
                             size_t payload_len, const hf_run_options* opts, hf_report** out) {
  if (!inst || !out) return fail(HF_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&]() {
    std::vector<hflow::Point> pts;
    if (!starts || n_starts == 0) {
      pts.push_back(inst->inst.defaults.x0);
    } else {
      for (size_t i = 0; i < n_starts; ++i) {
        pts.emplace_back(
            std::vector<double>(starts + i * payload_len, starts + (i + 1) * payload_len));
      }
    }
    auto rep = new hf_report{hflow::run_destabilize(inst->inst, pts, to_run_options(opts)), inst};
    *out = rep;
    return HF_OK;
  });
}

hf_status hf_report_double(const hf_report* rep, const char* key, double* out) {
  if (!rep || !key || !out) return fail(HF_ERR_ARGUMENT, "null argument");
  const std::string k = key;
  const hflow::SharpnessReport& r = rep->run.report;
  if (k == "B") {
    *out = r.limit_slope;
  } else if (k == "ratio") {
    *out = r.ratio;
  } else if (k == "norm") {
    *out = r.norm;
  } else if (k == "gap") {
    *out = r.gap;
  } else if (k == "escape_distance") {
    *out = r.escape_distance;
  } else if (k == "unstable") {
    *out = r.unstable ? 1.0 : 0.0;
  } else if (k == "uniqueness_probe") {
    if (!rep->run.multi.uniqueness) return fail(HF_ERR_ARGUMENT, "single-start run");
    *out = *rep->run.multi.uniqueness;
  } else if (k == "B_spread") {
    const auto& bs = rep->run.multi.per_start_limit_slope;
    double lo = bs.front(), hi = bs.front();
    for (double b : bs) {
      lo = std::min(lo, b);
      hi = std::max(hi, b);
    }
    *out = hi - lo;
  } else {
    return fail(HF_ERR_ARGUMENT, "unknown report key '" + k + "'");
  }
  return HF_OK;
}

hf_status hf_report_string(const hf_report* rep, const char* key, char* buf, size_t cap) {
  if (!rep || !key) return fail(HF_ERR_ARGUMENT, "null argument");
  const std::string k = key;
  std::string value;
  if (k == "case") {
    value = hflow::to_string(rep->run.report.cls);
  } else if (k == "instance") {
    value = rep->run.meta.instance;
  } else if (k == "flags") {
    for (std::size_t i = 0; i < rep->run.report.flags.size(); ++i) {
      if (i) value += ';';
      value += rep->run.report.flags[i];
    }
  } else {
    return fail(HF_ERR_ARGUMENT, "unknown report key '" + k + "'");
  }
  return copy_string(value, buf, cap, nullptr);
}

hf_status hf_report_write_json(const hf_report* rep, const char* path) {
  if (!rep || !path) return fail(HF_ERR_ARGUMENT, "null argument");
  return guarded([&]() {
    hflow::write_report_json(path, rep->run.report, rep->run.meta, &rep->run.multi);
    return HF_OK;
  });
}

hf_status hf_report_write_summary_csv(const hf_report* rep, const char* path, int with_header) {
  if (!rep || !path) return fail(HF_ERR_ARGUMENT, "null argument");
  return guarded([&]() {
    hflow::write_report_summary_csv(path, rep->run.report, rep->run.meta, &rep->run.multi,
                                    with_header != 0);
    return HF_OK;
  });
}

hf_status hf_report_write_ray_csv(const hf_report* rep, const char* path) {
  if (!rep || !path) return fail(HF_ERR_ARGUMENT, "null argument");
  return guarded([&]() {
    if (!rep->run.report.ray) return fail(HF_ERR_ARGUMENT, "bounded run: the limit ray is trivial");
    hflow::write_ray_csv(path, *rep->run.report.ray);
    return HF_OK;
  });
}

hf_status hf_report_write_ray_json(const hf_report* rep, const char* path) {
  if (!rep || !path) return fail(HF_ERR_ARGUMENT, "null argument");
  return guarded([&]() {
    if (!rep->run.report.ray) return fail(HF_ERR_ARGUMENT, "bounded run: the limit ray is trivial");
    hflow::write_ray_json(path, *rep->run.report.ray);
    return HF_OK;
  });
}

hf_status hf_report_write_trajectory_csv(const hf_report* rep, const char* path) {
  if (!rep || !path) return fail(HF_ERR_ARGUMENT, "null argument");
  return guarded([&]() {
    hflow::write_trajectory_csv(path, rep->run.report.trajectory, rep->owner->inst.f.get());
    return HF_OK;
  });
}

void hf_report_free(hf_report* rep) { delete rep; }

hf_status hf_check_run(const hf_instance* inst, const char* suite, const hf_run_options* opts,
                       char* buf, size_t cap, size_t* needed, int* passed) {
  if (!inst || !suite) return fail(HF_ERR_ARGUMENT, "null argument");
  return guarded([&]() {
    const hflow::RunOptions ro = to_run_options(opts);
    std::vector<hflow::SuiteResult> results;
    if (std::string(suite) == "all") {
      results = hflow::run_all_suites(inst->inst, ro.seed);
    } else {
      results.push_back(hflow::run_suite(inst->inst, suite, ro.seed));
    }
    bool all_ok = true;
    std::ostringstream table;
    for (const hflow::SuiteResult& r : results) {
      all_ok = all_ok && r.passed;
      table << (r.passed ? "PASS" : "FAIL") << "  " << r.suite << "  " << r.instance << '\n';
      for (const std::string& line : r.lines) table << "      " << line << '\n';
    }
    if (passed) *passed = all_ok ? 1 : 0;
    return copy_string(table.str(), buf, cap, needed);
  });
}

}  // extern "C"
