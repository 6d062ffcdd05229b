#include "lgqs/config.hpp"

#include <cmath>
#include <regex>

#include "lgqs/errors.hpp"

namespace lgqs {

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const Json& require(const Json& j, const std::string& path, const std::string& key) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) throw ConfigError(join(path, key), "missing required key");
  return *it;
}

const Json& section(const Json& root, const std::string& name) { return require(root, "", name); }

double number(const Json& j, const std::string& path, const std::string& key) {
  const Json& v = require(j, path, key);
  if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
  return v.get<double>();
}

double number_or(const Json& j, const std::string& path, const std::string& key, double fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return number(j, path, key);
}

long integer(const Json& j, const std::string& path, const std::string& key) {
  const Json& v = require(j, path, key);
  if (!v.is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
  return v.get<long>();
}

long integer_or(const Json& j, const std::string& path, const std::string& key, long fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return integer(j, path, key);
}

std::uint64_t seed_of(const Json& root) {
  const Json& v = require(root, "", "seed");
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw ConfigError("seed", "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

double angle(const Json& j, const std::string& path, const std::string& key) {
  return parse_angle(require(j, path, key), join(path, key));
}

std::vector<double> number_list(const Json& j, const std::string& path, const std::string& key, bool angles) {
  const Json& v = require(j, path, key);
  const std::string p = join(path, key);
  if (!v.is_array()) throw ConfigError(p, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string pi = p + "[" + std::to_string(i) + "]";
    if (angles) {
      out.push_back(parse_angle(v[i], pi));
    } else {
      if (!v[i].is_number()) throw ConfigError(pi, "expected a number");
      out.push_back(v[i].get<double>());
    }
  }
  return out;
}

PhaseGrid phase_grid(const Json& j, const std::string& path, const std::string& key, int min_points) {
  const Json& g = require(j, path, key);
  const std::string p = join(path, key);
  PhaseGrid grid;
  grid.start = angle(g, p, "start");
  grid.points = static_cast<int>(integer(g, p, "points"));
  if (grid.points < min_points)
    throw ConfigError(join(p, "points"), "need at least " + std::to_string(min_points) + " points");
  return grid;
}

ModelSpec model_spec(const Json& j, const std::string& path) {
  const Json& m = require(j, path, "model");
  const std::string p = join(path, "model");
  ModelSpec spec;
  const Json& kind = require(m, p, "kind");
  if (!kind.is_string()) throw ConfigError(join(p, "kind"), "expected a string");
  spec.kind = kind.get<std::string>();
  spec.hbar = number_or(m, p, "hbar", kDefaultHbar);
  if (!(spec.hbar > 0.0)) throw ConfigError(join(p, "hbar"), "must be positive");
  if (spec.kind == "opo") {
    spec.eta_o = number(m, p, "eta_o");
    spec.eta_u = number(m, p, "eta_u");
  } else if (spec.kind == "attenuator") {
    spec.gamma_down = number(m, p, "gamma_down");
    spec.gamma_up = number(m, p, "gamma_up");
  } else {
    throw ConfigError(join(p, "kind"), "unknown model kind '" + spec.kind + "' (opo, attenuator)");
  }
  if (m.contains("theta_o")) spec.theta_o = angle(m, p, "theta_o");
  if (m.contains("theta_u")) spec.theta_u = angle(m, p, "theta_u");
  return spec;
}

FixedPointOptions fixed_point(const Json& j, const std::string& path) {
  FixedPointOptions o;
  if (!j.contains("fixed_point")) return o;
  const Json& f = j.at("fixed_point");
  const std::string p = join(path, "fixed_point");
  o.tol = number_or(f, p, "tol", o.tol);
  o.max_steps = integer_or(f, p, "max_steps", o.max_steps);
  if (!(o.tol > 0.0)) throw ConfigError(join(p, "tol"), "must be positive");
  return o;
}

unsigned objectives(const Json& j, const std::string& path) {
  if (!j.contains("objectives")) return kAllObjectives;
  const Json& v = j.at("objectives");
  const std::string p = join(path, "objectives");
  if (!v.is_array()) throw ConfigError(p, "expected an array");
  unsigned mask = 0;
  for (const auto& o : v) {
    const std::string name = o.is_string() ? o.get<std::string>() : "";
    if (name == "A") mask |= kOverlapA;
    else if (name == "B") mask |= kOverlapB;
    else if (name == "C") mask |= kOverlapC;
    else if (name == "RPR") mask |= kRpr;
    else throw ConfigError(p, "unknown objective (A, B, C, RPR)");
  }
  return mask;
}

Json opo_model_json(double eta_o, double eta_u, const char* theta_o, const char* theta_u) {
  return {{"kind", "opo"}, {"eta_o", eta_o}, {"eta_u", eta_u}, {"theta_o", theta_o}, {"theta_u", theta_u},
          {"hbar", 2.0}};
}

Json trajectory_section(double T, double dt) {
  return {{"model", opo_model_json(0.5, 0.5, "pi/4", "-pi/8")},
          {"initial", {{"mean", {0.0, 0.0}}, {"cov", {{10.0, 0.0}, {0.0, 0.5}}}}},
          {"T", T},
          {"dt", dt},
          {"trajectory_index", 0},
          {"snapshot_times", {0.0, T / 4, T / 2, 3 * T / 4, T}}};
}

Json scan_section(bool attenuator, int points) {
  Json s;
  if (attenuator) {
    s["model"] = {{"kind", "attenuator"}, {"gamma_down", 1.0}, {"gamma_up", 0.999}, {"hbar", 2.0}};
    s["theta_o"] = {{"start", "-pi/2"}, {"points", points}};
  } else {
    s["model"] = {{"kind", "opo"}, {"eta_o", 0.5}, {"eta_u", 0.5}, {"hbar", 2.0}};
    s["theta_o"] = {{"start", 0.0}, {"points", points}};
  }
  s["theta_u"] = {{"start", "-pi/2"}, {"points", points}};
  s["objectives"] = {"A", "B", "C", "RPR"};
  return s;
}

Json sweep_section(std::vector<double> eta, int points) {
  return {{"theta_o", {"pi/8", "3pi/8"}},
          {"eta_o", eta},
          {"theta_u", {{"start", "-pi/2"}, {"points", points}}},
          {"hbar", 2.0}};
}

Json qubit_section(int n_observed, int n_unobserved, int kick_records) {
  return {{"omega", 5.0},         {"gamma", 1.0},         {"eta_o", 0.5},       {"eta_u", 0.5},
          {"T", 8.0},             {"dt", 1e-3},           {"window", {4.5, 6.0}}, {"n_observed", n_observed},
          {"n_unobserved", n_unobserved}, {"kick_records", kick_records}, {"bootstrap_resamples", 2000},
          {"ci_level", 0.9}};
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig2", "fig3", "fig4", "fig5", "fig6", "fig6-full", "smoke"};
  return names;
}

Json preset_config(const std::string& name) {
  Json c = {{"preset", name}, {"seed", 1}};
  if (name == "fig2") {
    c["trajectory"] = trajectory_section(4.0, 1e-3);
  } else if (name == "fig3") {
    c["scan"] = scan_section(true, 61);
    c["hypotheses"] = {{"system", "scan"}};
  } else if (name == "fig4") {
    c["scan"] = scan_section(false, 61);
    c["hypotheses"] = {{"system", "scan"}};
  } else if (name == "fig5") {
    c["sweep"] = sweep_section({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}, 180);
  } else if (name == "fig6") {
    c["qubit"] = qubit_section(300, 2000, 3000);
    c["hypotheses"] = {{"system", "qubit"}};
  } else if (name == "fig6-full") {
    c["qubit"] = qubit_section(3000, 10000, 3000);
    c["hypotheses"] = {{"system", "qubit"}};
  } else if (name == "smoke") {
    c["trajectory"] = trajectory_section(1.0, 1e-3);
    c["scan"] = scan_section(false, 7);
    c["sweep"] = sweep_section({0.2, 0.8}, 12);
    c["qubit"] = qubit_section(20, 100, 100);
    c["qubit"]["bootstrap_resamples"] = 200;
    c["hypotheses"] = {{"system", "qubit"}};
  } else {
    throw ConfigError("preset", "unknown preset '" + name + "'");
  }
  return c;
}

Json resolve_config(const Json& user, const std::string& preset_override) {
  if (!user.is_object() && !user.is_null()) throw ConfigError("<root>", "expected a JSON object");
  std::string name = preset_override;
  if (name.empty() && user.is_object() && user.contains("preset")) {
    if (!user.at("preset").is_string()) throw ConfigError("preset", "expected a string");
    name = user.at("preset").get<std::string>();
  }
  Json out = name.empty() ? Json::object() : preset_config(name);
  if (user.is_object()) out.merge_patch(user);
  if (!name.empty()) out["preset"] = name;
  if (!out.contains("seed")) out["seed"] = 1;
  return out;
}

double parse_angle(const Json& value, const std::string& path) {
  if (value.is_number()) return value.get<double>();
  if (!value.is_string()) throw ConfigError(path, "expected a number or an angle like \"3pi/8\"");
  static const std::regex re(R"(^\s*(-?)\s*([0-9]*\.?[0-9]*)\s*\*?\s*pi\s*(?:/\s*([0-9]*\.?[0-9]+))?\s*$)");
  std::smatch m;
  const std::string s = value.get<std::string>();
  if (!std::regex_match(s, m, re)) throw ConfigError(path, "cannot parse angle '" + s + "'");
  double k = m[2].length() > 0 ? std::stod(m[2].str()) : 1.0;
  if (m[3].matched) k /= std::stod(m[3].str());
  return (m[1].length() > 0 ? -k : k) * M_PI;
}

LgqModel ModelSpec::build() const { return build(theta_o, theta_u); }

LgqModel ModelSpec::build(double to, double tu) const {
  if (kind == "attenuator") return attenuator_model(gamma_down, gamma_up, to, tu, hbar);
  return opo_model(eta_o, to, eta_u, tu, hbar);
}

TrajectoryJob parse_trajectory(const Json& root) {
  const Json& t = section(root, "trajectory");
  const std::string p = "trajectory";
  TrajectoryJob job;
  job.model = model_spec(t, p);
  job.T = number(t, p, "T");
  job.dt = number(t, p, "dt");
  if (!(job.dt > 0.0)) throw ConfigError("trajectory.dt", "must be positive");
  if (!(job.T > 0.0)) throw ConfigError("trajectory.T", "must be positive");
  try {
    grid_steps(job.T, job.dt);
  } catch (const DomainError& e) {
    throw ConfigError("trajectory.dt", e.what());
  }
  job.seed = seed_of(root);
  job.trajectory_index = static_cast<std::uint64_t>(integer_or(t, p, "trajectory_index", 0));
  if (t.contains("snapshot_times")) job.snapshot_times = number_list(t, p, "snapshot_times", false);
  for (double s : job.snapshot_times)
    if (!(s >= 0.0 && s <= job.T)) throw ConfigError("trajectory.snapshot_times", "times must lie in [0, T]");

  const Json& init = require(t, p, "initial");
  const std::string ip = "trajectory.initial";
  const auto mean = number_list(init, ip, "mean", false);
  const Json& cov = require(init, ip, "cov");
  const int n = static_cast<int>(mean.size());
  if (n != 2 || !cov.is_array() || static_cast<int>(cov.size()) != n)
    throw ConfigError(join(ip, "cov"), "expected a 2x2 matrix matching a 2-entry mean");
  job.initial.hbar = job.model.hbar;
  job.initial.mean = Vec::Map(mean.data(), n);
  job.initial.cov = Mat(n, n);
  for (int i = 0; i < n; ++i) {
    const std::string rp = join(ip, "cov") + "[" + std::to_string(i) + "]";
    if (!cov[static_cast<std::size_t>(i)].is_array() || static_cast<int>(cov[static_cast<std::size_t>(i)].size()) != n)
      throw ConfigError(rp, "expected a row of length 2");
    for (int k = 0; k < n; ++k) {
      const Json& v = cov[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      if (!v.is_number()) throw ConfigError(rp, "expected numbers");
      job.initial.cov(i, k) = v.get<double>();
    }
  }
  try {
    validate(job.initial);
    job.model.build();
  } catch (const Error& e) {
    throw ConfigError(p, e.what());
  }
  return job;
}

ScanJob parse_scan(const Json& root) {
  const Json& s = section(root, "scan");
  const std::string p = "scan";
  ScanJob job;
  job.model = model_spec(s, p);
  job.spec.theta_o = phase_grid(s, p, "theta_o", 3);
  job.spec.theta_u = phase_grid(s, p, "theta_u", 3);
  job.spec.objectives = objectives(s, p);
  job.spec.fixed_point = fixed_point(s, p);
  try {
    job.model.build(job.spec.theta_o.at(0), job.spec.theta_u.at(0));
  } catch (const Error& e) {
    throw ConfigError(join(p, "model"), e.what());
  }
  const ModelSpec spec = job.model;
  job.spec.family = [spec](double to, double tu) { return spec.build(to, tu); };
  return job;
}

SweepSpec parse_sweep(const Json& root) {
  const Json& s = section(root, "sweep");
  const std::string p = "sweep";
  SweepSpec spec;
  spec.theta_o = number_list(s, p, "theta_o", true);
  spec.eta_o = number_list(s, p, "eta_o", false);
  for (std::size_t i = 0; i < spec.eta_o.size(); ++i)
    if (!(spec.eta_o[i] > 0.0 && spec.eta_o[i] < 1.0))
      throw ConfigError("sweep.eta_o[" + std::to_string(i) + "]", "must lie in (0, 1)");
  spec.theta_u = phase_grid(s, p, "theta_u", 1);
  spec.hbar = number_or(s, p, "hbar", kDefaultHbar);
  spec.fixed_point = fixed_point(s, p);
  return spec;
}

QubitJob parse_qubit(const Json& root) {
  const Json& q = section(root, "qubit");
  const std::string p = "qubit";
  QubitJob job;
  QubitConfig& c = job.config;
  c.omega = number(q, p, "omega");
  c.gamma = number_or(q, p, "gamma", 1.0);
  c.eta_o = number(q, p, "eta_o");
  c.eta_u = number(q, p, "eta_u");
  c.T = number(q, p, "T");
  c.dt = number(q, p, "dt");
  const auto window = number_list(q, p, "window", false);
  if (window.size() != 2) throw ConfigError("qubit.window", "expected [start, end]");
  c.window_start = window[0];
  c.window_end = window[1];
  try {
    validate(c);
  } catch (const DomainError& e) {
    throw ConfigError(p, e.what());
  }
  job.rapr.n_observed = static_cast<int>(integer(q, p, "n_observed"));
  job.rapr.n_unobserved = static_cast<int>(integer(q, p, "n_unobserved"));
  job.rapr.bootstrap_resamples = static_cast<int>(integer_or(q, p, "bootstrap_resamples", 2000));
  job.rapr.ci_level = number_or(q, p, "ci_level", 0.9);
  job.kick_records = static_cast<int>(integer(q, p, "kick_records"));
  job.rapr.seed = seed_of(root);
  if (job.rapr.n_observed < 2) throw ConfigError("qubit.n_observed", "must be at least 2");
  if (job.rapr.n_unobserved < 1) throw ConfigError("qubit.n_unobserved", "must be positive");
  if (job.kick_records < 1) throw ConfigError("qubit.kick_records", "must be positive");
  if (job.rapr.bootstrap_resamples < 1) throw ConfigError("qubit.bootstrap_resamples", "must be positive");
  if (!(job.rapr.ci_level > 0.0 && job.rapr.ci_level < 1.0))
    throw ConfigError("qubit.ci_level", "must lie in (0, 1)");
  return job;
}

std::string hypotheses_system(const Json& root) {
  if (!root.contains("hypotheses")) return root.contains("qubit") ? "qubit" : "scan";
  const Json& h = root.at("hypotheses");
  const Json& s = require(h, "hypotheses", "system");
  if (!s.is_string() || (s.get<std::string>() != "qubit" && s.get<std::string>() != "scan"))
    throw ConfigError("hypotheses.system", "expected \"qubit\" or \"scan\"");
  return s.get<std::string>();
}

}  // namespace lgqs
