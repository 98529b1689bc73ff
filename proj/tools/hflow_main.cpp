// hflow command line driver: flow, destabilize, check, list.
//
// Links the public C API only. Writes CSV/JSON artifacts plus a gnuplot
// script per destabilize run; exit codes: 0 ok, 2 configuration error,
// 3 numerical error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hflow.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Cli {
  std::string config_file;
  std::string instance;
  std::string x0;
  std::string starts;
  double horizon = 0.0;
  double tol = 0.0;
  long m_cap = 0;
  int jobs = 1;
  std::string out_dir = ".";
  unsigned long long seed = 0;
  std::string suite = "all";
};

// Flat key=value config files; '#' starts a comment. CLI flags override.
bool load_config(const std::string& path, std::map<std::string, std::string>& kv,
                 std::string& err) {
  std::ifstream in(path);
  if (!in) {
    err = "cannot open config file '" + path + "'";
    return false;
  }
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) kv[key] = value;
  }
  return true;
}

void apply_config(const std::map<std::string, std::string>& kv, const CLI::App& app, Cli& cli) {
  auto unset = [&](const std::string& flag) {
    try {
      return app.get_option(flag)->count() == 0;
    } catch (const CLI::OptionNotFound&) {
      return false;  // flag not defined on this subcommand; keep the default
    }
  };
  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (const auto* v = get("instance"); v && unset("--instance")) cli.instance = *v;
  if (const auto* v = get("x0"); v && unset("--x0")) cli.x0 = *v;
  if (const auto* v = get("starts"); v && unset("--starts")) cli.starts = *v;
  if (const auto* v = get("T"); v && unset("--T")) cli.horizon = std::stod(*v);
  if (const auto* v = get("tol"); v && unset("--tol")) cli.tol = std::stod(*v);
  if (const auto* v = get("m_cap"); v && unset("--m-cap")) cli.m_cap = std::stol(*v);
  if (const auto* v = get("jobs"); v && unset("--jobs")) cli.jobs = std::stoi(*v);
  if (const auto* v = get("out"); v && unset("--out")) cli.out_dir = *v;
  if (const auto* v = get("seed"); v && unset("--seed")) cli.seed = std::stoull(*v);
  if (const auto* v = get("suite"); v && unset("--suite")) cli.suite = *v;
}

void print_error_json(const std::string& code, const std::string& detail) {
  // Keep the error surface machine-readable on stdout.
  std::string escaped;
  for (char c : detail) {
    if (c == '"' || c == '\\') escaped += '\\';
    if (c == '\n') {
      escaped += "\\n";
      continue;
    }
    escaped += c;
  }
  std::cout << "{\"error\":\"" << code << "\",\"detail\":\"" << escaped << "\"}\n";
}

int report_failure(hf_status st) {
  switch (st) {
    case HF_ERR_UNKNOWN_INSTANCE:
      print_error_json("unknown_instance", hf_last_error());
      return kExitConfig;
    case HF_ERR_ARGUMENT:
      print_error_json("invalid_argument", hf_last_error());
      return kExitConfig;
    case HF_ERR_IO:
      print_error_json("io_error", hf_last_error());
      return kExitNumerical;
    default:
      print_error_json("numerical_error", hf_last_error());
      return kExitNumerical;
  }
}

hf_run_options make_options(const Cli& cli) {
  hf_run_options opts;
  hf_run_options_init(&opts);
  opts.horizon = cli.horizon;
  opts.tol = cli.tol;
  opts.m_cap = cli.m_cap;
  opts.seed = cli.seed;
  opts.jobs = cli.jobs;
  return opts;
}

bool ensure_out_dir(const Cli& cli, std::string& err) {
  std::error_code ec;
  fs::create_directories(cli.out_dir, ec);
  if (ec) {
    err = "cannot create output directory '" + cli.out_dir + "': " + ec.message();
    return false;
  }
  return true;
}

// Resolve the start list: --starts takes either a count of canonical starts
// or a ';'-separated list of payload literals; --x0 is a single literal.
bool resolve_starts(const hf_instance* inst, const Cli& cli, std::vector<double>& flat,
                    size_t& payload_len, size_t& n_starts, hf_status& st) {
  if (hf_instance_payload_size(inst, &payload_len) != HF_OK) return false;
  std::vector<std::string> literals;
  if (!cli.starts.empty()) {
    bool integer = !cli.starts.empty();
    for (char c : cli.starts) integer = integer && std::isdigit(static_cast<unsigned char>(c));
    if (integer) {
      const int k = std::stoi(cli.starts);
      flat.resize(static_cast<size_t>(k) * payload_len);
      for (int i = 0; i < k; ++i) {
        size_t len = 0;
        st = hf_instance_default_start(inst, i, flat.data() + i * payload_len, payload_len, &len);
        if (st != HF_OK) return false;
      }
      n_starts = static_cast<size_t>(k);
      return true;
    }
    std::stringstream ss(cli.starts);
    std::string tok;
    while (std::getline(ss, tok, ';')) literals.push_back(tok);
  } else if (!cli.x0.empty()) {
    literals.push_back(cli.x0);
  } else {
    flat.resize(payload_len);
    size_t len = 0;
    st = hf_instance_default_start(inst, 0, flat.data(), payload_len, &len);
    n_starts = 1;
    return st == HF_OK;
  }
  flat.resize(literals.size() * payload_len);
  for (size_t i = 0; i < literals.size(); ++i) {
    size_t len = 0;
    st = hf_instance_parse_start(inst, literals[i].c_str(), flat.data() + i * payload_len,
                                 payload_len, &len);
    if (st != HF_OK) return false;
  }
  n_starts = literals.size();
  return true;
}

int cmd_list() {
  size_t needed = 0;
  hf_registry_ids(nullptr, 0, &needed);
  std::string ids(needed, '\0');
  if (hf_registry_ids(ids.data(), ids.size(), &needed) != HF_OK) {
    return report_failure(HF_ERR_ARGUMENT);
  }
  std::cout << ids.c_str();
  return kExitOk;
}

int cmd_flow(const Cli& cli) {
  std::string err;
  if (!ensure_out_dir(cli, err)) {
    print_error_json("io_error", err);
    return kExitConfig;
  }
  hf_instance* inst = nullptr;
  hf_status st = hf_instance_open(cli.instance.c_str(), &inst);
  if (st != HF_OK) return report_failure(st);

  std::vector<double> flat;
  size_t payload_len = 0, n_starts = 0;
  if (!resolve_starts(inst, cli, flat, payload_len, n_starts, st)) {
    hf_instance_close(inst);
    return report_failure(st);
  }
  const hf_run_options opts = make_options(cli);
  hf_trajectory* traj = nullptr;
  st = hf_flow_run(inst, flat.data(), payload_len, &opts, &traj);
  if (st != HF_OK) {
    hf_instance_close(inst);
    return report_failure(st);
  }
  const fs::path dir(cli.out_dir);
  st = hf_trajectory_write_csv(traj, (dir / "trajectory.csv").string().c_str());
  if (st == HF_OK) st = hf_trajectory_write_json(traj, (dir / "trajectory.json").string().c_str());
  if (st == HF_OK) {
    // Toric runs also leave the final potential snapshot.
    hf_trajectory_write_snapshot_csv(traj, (dir / "snapshot_final.csv").string().c_str());
  }
  const size_t nodes = hf_trajectory_nodes(traj);
  double t = 0, value = 0, slope = 0, dist = 0;
  hf_trajectory_node(traj, nodes - 1, &t, &value, &slope, &dist);
  std::cout << "flow " << cli.instance << ": nodes " << nodes << ", final t " << t << ", value "
            << value << ", slope " << slope << ", dist " << dist << "\n";
  hf_trajectory_free(traj);
  hf_instance_close(inst);
  return st == HF_OK ? kExitOk : report_failure(st);
}

int cmd_destabilize(const Cli& cli) {
  std::string err;
  if (!ensure_out_dir(cli, err)) {
    print_error_json("io_error", err);
    return kExitConfig;
  }
  hf_instance* inst = nullptr;
  hf_status st = hf_instance_open(cli.instance.c_str(), &inst);
  if (st != HF_OK) return report_failure(st);

  std::vector<double> flat;
  size_t payload_len = 0, n_starts = 0;
  if (!resolve_starts(inst, cli, flat, payload_len, n_starts, st)) {
    hf_instance_close(inst);
    return report_failure(st);
  }
  const hf_run_options opts = make_options(cli);
  hf_report* rep = nullptr;
  st = hf_destabilize_run(inst, flat.data(), n_starts, payload_len, &opts, &rep);
  if (st != HF_OK) {
    hf_instance_close(inst);
    return report_failure(st);
  }
  const fs::path dir(cli.out_dir);
  st = hf_report_write_json(rep, (dir / "report.json").string().c_str());
  if (st == HF_OK) {
    st = hf_report_write_summary_csv(rep, (dir / "summary.csv").string().c_str(), 1);
  }
  if (st == HF_OK) {
    st = hf_report_write_trajectory_csv(rep, (dir / "trajectory.csv").string().c_str());
  }
  char case_buf[32] = {0};
  hf_report_string(rep, "case", case_buf, sizeof(case_buf));
  bool have_ray = false;
  if (st == HF_OK && std::string(case_buf) == "escaping") {
    st = hf_report_write_ray_csv(rep, (dir / "ray.csv").string().c_str());
    if (st == HF_OK) st = hf_report_write_ray_json(rep, (dir / "ray.json").string().c_str());
    have_ray = st == HF_OK;
  }
  if (st == HF_OK) {
    std::ofstream plot((dir / "plot.gnuplot").string(), std::ios::binary);
    plot << "# generated by hflow destabilize\n"
         << "set datafile separator ','\n"
         << "set terminal pngcairo size 1200,500\n"
         << "set output 'report.png'\n"
         << "set multiplot layout 1,2\n"
         << "set key autotitle columnhead\n"
         << "set title '" << cli.instance << ": value and slope along the flow'\n"
         << "set xlabel 't'\n"
         << "plot 'trajectory.csv' using 1:2 with lines title 'value', \\\n"
         << "     'trajectory.csv' using 1:3 with lines title 'slope'\n";
    if (have_ray) {
      plot << "set title '" << cli.instance << ": extracted ray direction'\n"
           << "set xlabel 'payload component'\n"
           << "plot 'ray.csv' using 1:" << "(column('direction'))"
           << " with lines title 'direction'\n";
    } else {
      plot << "set title '" << cli.instance << ": distance from start'\n"
           << "plot 'trajectory.csv' using 1:4 with lines title 'dist'\n";
    }
    plot << "unset multiplot\n";
  }

  double B = 0, ratio = 0, norm = 0, gap = 0;
  hf_report_double(rep, "B", &B);
  hf_report_double(rep, "ratio", &ratio);
  hf_report_double(rep, "norm", &norm);
  hf_report_double(rep, "gap", &gap);
  std::cout << "destabilize " << cli.instance << ": case " << case_buf << ", B " << B
            << ", ratio " << ratio << ", norm " << norm << ", gap " << gap;
  double probe = 0;
  if (n_starts > 1 && hf_report_double(rep, "uniqueness_probe", &probe) == HF_OK) {
    std::cout << ", uniqueness_probe " << probe;
  }
  std::cout << "\n";
  hf_report_free(rep);
  hf_instance_close(inst);
  return st == HF_OK ? kExitOk : report_failure(st);
}

int cmd_check(const Cli& cli) {
  hf_instance* inst = nullptr;
  hf_status st = hf_instance_open(cli.instance.c_str(), &inst);
  if (st != HF_OK) return report_failure(st);
  const hf_run_options opts = make_options(cli);
  size_t needed = 0;
  int passed = 0;
  st = hf_check_run(inst, cli.suite.c_str(), &opts, nullptr, 0, &needed, &passed);
  if (st == HF_OK) {
    std::string table(needed, '\0');
    st = hf_check_run(inst, cli.suite.c_str(), &opts, table.data(), table.size(), &needed,
                      &passed);
    if (st == HF_OK) std::cout << table.c_str();
  }
  hf_instance_close(inst);
  if (st != HF_OK) return report_failure(st);
  return passed ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hflow: convex gradient flows and destabilizing rays on CAT(0) model spaces"};
  app.require_subcommand(1);
  Cli cli;

  auto add_common = [&](CLI::App* sub, bool with_starts) {
    sub->add_option("--config", cli.config_file, "flat key=value config file");
    sub->add_option("--instance", cli.instance, "instance id (see `hflow list`)");
    sub->add_option("--T", cli.horizon, "flow horizon");
    sub->add_option("--tol", cli.tol, "refinement tolerance");
    sub->add_option("--m-cap", cli.m_cap, "step-doubling cap");
    sub->add_option("--jobs", cli.jobs, "parallelism over starts");
    sub->add_option("--out", cli.out_dir, "output directory");
    sub->add_option("--seed", cli.seed, "sampling seed (outputs are deterministic per seed)");
    if (with_starts) {
      sub->add_option("--x0", cli.x0, "start payload literal");
      sub->add_option("--starts", cli.starts,
                      "';'-separated start literals, or a count of canonical starts");
    }
  };

  CLI::App* flow_cmd = app.add_subcommand("flow", "run one flow and export the trajectory");
  add_common(flow_cmd, true);
  CLI::App* dest_cmd =
      app.add_subcommand("destabilize", "run the flow, classify, and extract the limit ray");
  add_common(dest_cmd, true);
  CLI::App* check_cmd = app.add_subcommand("check", "run property suites");
  add_common(check_cmd, false);
  check_cmd->add_option("--suite", cli.suite, "cat0|evi|sandwich|moment-weight|bind|all");
  app.add_subcommand("list", "list shipped instance ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (!cli.config_file.empty()) {
    std::map<std::string, std::string> kv;
    std::string err;
    if (!load_config(cli.config_file, kv, err)) {
      print_error_json("config_error", err);
      return kExitConfig;
    }
    apply_config(kv, *sub, cli);
  }

  if (sub->get_name() == "list") return cmd_list();
  if (cli.instance.empty()) {
    print_error_json("invalid_argument", "missing --instance");
    return kExitConfig;
  }
  if (sub->get_name() == "flow") return cmd_flow(cli);
  if (sub->get_name() == "destabilize") return cmd_destabilize(cli);
  if (sub->get_name() == "check") return cmd_check(cli);
  print_error_json("invalid_argument", "unknown subcommand");
  return kExitConfig;
}
