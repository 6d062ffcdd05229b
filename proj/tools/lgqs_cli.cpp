#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "lgqs/config.hpp"
#include "lgqs/errors.hpp"
#include "lgqs/io.hpp"
#include "lgqs/parallel.hpp"
#include "lgqs/qubit.hpp"
#include "lgqs/strategy.hpp"
#include "lgqs/trajectory.hpp"

using namespace lgqs;

namespace {

struct Options {
  std::string config_path;
  std::string preset;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;
};

Json load_config(const Options& o) {
  Json user = Json::object();
  if (!o.config_path.empty()) {
    std::ifstream f(o.config_path);
    if (!f) throw ConfigError("--config", "cannot open " + o.config_path);
    try {
      user = Json::parse(f);
    } catch (const Json::parse_error& e) {
      throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
    }
  }
  Json cfg = resolve_config(user, o.preset);
  if (o.seed_given) cfg["seed"] = o.seed;
  return cfg;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

int cmd_trajectory(const Json& cfg, const Options& o) {
  const TrajectoryJob job = parse_trajectory(cfg);
  const LgqModel model = job.model.build();
  SimulationOptions sim;
  sim.trajectory_index = job.trajectory_index;
  const TrueRun run = simulate_true(model, job.initial, job.T, job.dt, job.seed, sim);
  const TrajectoryBundle bundle = replay_all(model, run.observed, run.unobserved, job.initial);

  std::ostringstream traj, snap;
  write_trajectory_csv(traj, bundle);
  write_snapshot_csv(snap, bundle, job.snapshot_times);
  write_file(o.out_dir, "trajectory.csv", traj.str());
  write_file(o.out_dir, "snapshots.csv", snap.str());
  write_file(o.out_dir, "config.json", dump(cfg));

  const GaussianState& f = bundle.filtered.back();
  const GaussianState& s = bundle.smoothed.back();
  Json summary = {{"steps", bundle.times.size() - 1},
                  {"final_cov_gap", (s.cov - f.cov).norm()},
                  {"final_mean_gap", (s.mean - f.mean).norm()},
                  {"min_haloed_filtered_eig", bundle.min_haloed_filtered_eig},
                  {"min_haloed_retro_margin", bundle.min_haloed_retro_margin},
                  {"config", cfg}};
  write_file(o.out_dir, "trajectory_summary.json", dump(summary));
  std::cout << "trajectory: " << bundle.times.size() << " grid points written to " << o.out_dir << "\n";
  return 0;
}

int cmd_scan(const Json& cfg, const Options& o, bool hypotheses_only) {
  ScanJob job = parse_scan(cfg);
  if (hypotheses_only) job.spec.objectives &= (kOverlapA | kOverlapB | kOverlapC);
  const ScanResult r = scan(job.spec);
  std::ostringstream cells, best;
  write_scan_csv(cells, r);
  write_argmax_csv(best, r);
  const std::string stem = hypotheses_only ? "hypotheses" : "scan";
  write_file(o.out_dir, stem + ".csv", cells.str());
  write_file(o.out_dir, stem + "_argmax.csv", best.str());
  Json summary = scan_summary(r);
  summary["config"] = cfg;
  write_file(o.out_dir, stem + "_summary.json", dump(summary));
  write_file(o.out_dir, "config.json", dump(cfg));
  std::cout << stem << ": " << r.theta_o.size() << "x" << r.theta_u.size() << " grid, " << r.failures.size()
            << " failed cells\n";
  if (summary.contains("hypothesis_distance")) std::cout << summary["hypothesis_distance"].dump() << "\n";
  return 0;
}

int cmd_sweep(const Json& cfg, const Options& o) {
  const SweepSpec spec = parse_sweep(cfg);
  const auto rows = efficiency_sweep(spec);
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  write_file(o.out_dir, "sweep.csv", csv.str());
  Json summary = sweep_summary(rows);
  summary["config"] = cfg;
  write_file(o.out_dir, "sweep_summary.json", dump(summary));
  write_file(o.out_dir, "config.json", dump(cfg));
  std::cout << "sweep: " << rows.size() << " rows, min RPR ratio at hypothesis C "
            << format_double(summary["min_ratio_hyp_c"].is_null() ? NAN : summary["min_ratio_hyp_c"].get<double>())
            << "\n";
  return 0;
}

Json order_json(const QubitTable& t) {
  static const char* names[4] = {"x,x", "x,y", "y,x", "y,y"};
  Json out = Json::array();
  for (int k : table_order(t)) out.push_back(names[k]);
  return out;
}

int cmd_qubit(const Json& cfg, const Options& o, bool hypotheses_only) {
  const QubitJob job = parse_qubit(cfg);
  const std::uint64_t seed = job.rapr.seed;
  const HypothesisTables tables = hypothesis_tables(job.config, job.kick_records, seed);
  Json out = {{"seed", seed},
              {"ensemble", {{"kick_records", job.kick_records}}},
              {"hypotheses", hypothesis_tables_json(tables)},
              {"order", {{"A", order_json(tables.a)}, {"B", order_json(tables.b)}, {"C", order_json(tables.c)}}}};
  if (!hypotheses_only) {
    const RaprTable rapr = rapr_table(job.config, job.rapr);
    out["ensemble"]["n_observed"] = job.rapr.n_observed;
    out["ensemble"]["n_unobserved"] = job.rapr.n_unobserved;
    out["rapr"] = rapr_table_json(rapr);
    out["order"]["R"] = order_json(rapr.r);
    if (rapr.cells[0][0].low_ess_records + rapr.cells[0][1].low_ess_records + rapr.cells[1][0].low_ess_records +
            rapr.cells[1][1].low_ess_records > 0)
      std::cerr << "warning: effective sample size below 10 on some records; increase n_unobserved\n";
  }
  out["config"] = cfg;
  const std::string name = hypotheses_only ? "hypotheses.json" : "qubit.json";
  write_file(o.out_dir, name, dump(out));
  write_file(o.out_dir, "config.json", dump(cfg));
  std::cout << (hypotheses_only ? "hypotheses" : "qubit") << ": " << out["order"].dump() << "\n";
  return 0;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config_path, "JSON config file (keys override the preset)");
  sub->add_option("--preset", o.preset, "fig2 | fig3 | fig4 | fig5 | fig6 | fig6-full | smoke");
  sub->add_option("--seed", o.seed, "Base seed")->each([&o](const std::string&) { o.seed_given = true; });
  sub->add_option("--threads", o.threads, "Worker threads (default: all logical cores)");
  sub->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear-Gaussian quantum state smoothing: trajectories, phase scans and qubit tables"};
  app.require_subcommand(1);
  Options o;
  CLI::App* traj = app.add_subcommand("trajectory", "Simulate one trajectory and replay every estimator");
  CLI::App* scan_cmd = app.add_subcommand("scan", "RPR and hypothesis objectives over a phase grid");
  CLI::App* sweep = app.add_subcommand("sweep", "OPO efficiency sweep at fixed observed phases");
  CLI::App* qubit = app.add_subcommand("qubit", "Qubit hypothesis tables and RAPR table");
  CLI::App* hyp = app.add_subcommand("hypotheses", "Hypothesis objectives only (qubit tables or phase scan)");
  for (CLI::App* sub : {traj, scan_cmd, sweep, qubit, hyp}) add_common(sub, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (o.preset.empty() && o.config_path.empty()) {
      if (traj->parsed()) o.preset = "fig2";
      if (scan_cmd->parsed()) o.preset = "fig4";
      if (sweep->parsed()) o.preset = "fig5";
      if (qubit->parsed() || hyp->parsed()) o.preset = "fig6";
    }
    set_worker_count(o.threads);
    const Json cfg = load_config(o);
    if (traj->parsed()) return cmd_trajectory(cfg, o);
    if (scan_cmd->parsed()) return cmd_scan(cfg, o, false);
    if (sweep->parsed()) return cmd_sweep(cfg, o);
    if (qubit->parsed()) return cmd_qubit(cfg, o, false);
    if (hypotheses_system(cfg) == "scan") return cmd_scan(cfg, o, true);
    return cmd_qubit(cfg, o, true);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
