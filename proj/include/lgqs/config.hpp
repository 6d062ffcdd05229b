#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "lgqs/gaussian.hpp"
#include "lgqs/model.hpp"
#include "lgqs/qubit.hpp"
#include "lgqs/strategy.hpp"

namespace lgqs {

using Json = nlohmann::json;

/// Names accepted by `preset_config`.
const std::vector<std::string>& preset_names();

/// Full configuration of a named preset. Throws ConfigError("preset") if unknown.
Json preset_config(const std::string& name);

/// Preset defaults (named by `preset_override`, else by user["preset"]) overlaid with
/// the explicit keys of `user` (JSON merge patch, so null deletes a key). Without a
/// preset the user config is returned as is.
Json resolve_config(const Json& user, const std::string& preset_override = "");

/// Number or string of the form [-][k]pi[/m] (e.g. "3pi/8", "-pi/2").
double parse_angle(const Json& value, const std::string& path);

/// Model family by kind ("opo" or "attenuator"). Phases are supplied per call.
struct ModelSpec {
  std::string kind = "opo";
  double eta_o = 0.5;
  double eta_u = 0.5;
  double theta_o = 0.0;
  double theta_u = 0.0;
  double gamma_down = 1.0;
  double gamma_up = 0.0;
  double hbar = kDefaultHbar;

  LgqModel build() const;
  LgqModel build(double theta_o, double theta_u) const;
};

struct TrajectoryJob {
  ModelSpec model;
  GaussianState initial;
  double T = 4.0;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  std::uint64_t trajectory_index = 0;
  std::vector<double> snapshot_times;
};

struct ScanJob {
  ModelSpec model;
  ScanSpec spec;
};

struct QubitJob {
  QubitConfig config;
  RaprOptions rapr;
  int kick_records = 3000;
};

/// Typed views of a resolved config. Throw ConfigError naming the offending field
/// path (e.g. "trajectory.dt") when a key is missing or has the wrong type.
TrajectoryJob parse_trajectory(const Json& config);
ScanJob parse_scan(const Json& config);
SweepSpec parse_sweep(const Json& config);
QubitJob parse_qubit(const Json& config);

/// Which system the `hypotheses` subcommand evaluates: "qubit" or "scan".
std::string hypotheses_system(const Json& config);

}  // namespace lgqs
