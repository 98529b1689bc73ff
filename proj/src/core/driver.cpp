#include "hflow/driver.hpp"

#include <exception>
#include <thread>

#include "hflow/errors.hpp"

namespace hflow {

namespace {

RunMeta meta_for(const Instance& inst, const RunOptions& opts) {
  RunMeta meta;
  meta.instance = inst.id;
  meta.horizon = opts.horizon_or(inst);
  meta.tol = opts.tol_or(inst);
  meta.seed = opts.seed;
  return meta;
}

SharpnessOptions sharpness_options(const Instance& inst, const RunOptions& opts) {
  SharpnessOptions so;
  so.escape_threshold = inst.defaults.escape_threshold;
  so.extraction_distance = inst.defaults.extraction_distance;
  so.m_cap = opts.m_cap_or(inst);
  return so;
}

}  // namespace

FlowRun run_flow(const Instance& inst, const Point& x0, const RunOptions& opts) {
  FlowRun run;
  run.meta = meta_for(inst, opts);
  run.trajectory = flow(*inst.f, x0, run.meta.horizon, run.meta.tol, opts.m_cap_or(inst));
  return run;
}

DestabilizeRun run_destabilize(const Instance& inst, std::span<const Point> starts,
                               const RunOptions& opts) {
  if (starts.empty()) throw InputError("destabilize: need at least one start");
  DestabilizeRun run;
  run.meta = meta_for(inst, opts);
  const SharpnessOptions so = sharpness_options(inst, opts);

  std::vector<SharpnessReport> reports(starts.size());
  std::vector<std::exception_ptr> errors(starts.size());
  const int jobs = std::max(1, opts.jobs);
  if (jobs == 1 || starts.size() == 1) {
    for (std::size_t i = 0; i < starts.size(); ++i) {
      reports[i] =
          sharpness_report(*inst.f, *inst.g, starts[i], run.meta.horizon, run.meta.tol, so);
    }
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs && w < static_cast<int>(starts.size()); ++w) {
      pool.emplace_back([&, w]() {
        for (std::size_t i = w; i < starts.size(); i += jobs) {
          try {
            reports[i] =
                sharpness_report(*inst.f, *inst.g, starts[i], run.meta.horizon, run.meta.tol, so);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (std::thread& th : pool) th.join();
    for (const std::exception_ptr& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  run.multi.per_start_limit_slope.reserve(starts.size());
  for (const SharpnessReport& r : reports) {
    run.multi.per_start_limit_slope.push_back(r.limit_slope);
  }
  if (starts.size() > 1) {
    run.multi.uniqueness =
        uniqueness_probe(*inst.f, *inst.g, starts, run.meta.horizon, run.meta.tol, so);
  }
  run.report = std::move(reports.front());
  return run;
}

}  // namespace hflow
