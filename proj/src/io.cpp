#include "lgqs/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lgqs/errors.hpp"

namespace lgqs {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

Ellipse covariance_ellipse(const Mat& cov2) {
  if (cov2.rows() != 2 || cov2.cols() != 2) throw ShapeError("covariance_ellipse: expected a 2x2 matrix");
  const double a = cov2(0, 0), b = 0.5 * (cov2(0, 1) + cov2(1, 0)), d = cov2(1, 1);
  const double mid = 0.5 * (a + d);
  const double rad = std::hypot(0.5 * (a - d), b);
  Ellipse e;
  e.semi_major = std::sqrt(mid + rad);
  e.semi_minor = std::sqrt(mid - rad);
  e.angle = 0.5 * std::atan2(2.0 * b, a - d);
  return e;
}

double purity_or_nan(const GaussianState& state) {
  try {
    return purity(state);
  } catch (const DomainError&) {
    return NAN;
  }
}

namespace {

const char* kEstimators[] = {"unconditioned", "filtered", "true", "swv", "smoothed"};

const std::vector<GaussianState>& series(const TrajectoryBundle& b, int which) {
  switch (which) {
    case 0: return b.unconditioned;
    case 1: return b.filtered;
    case 2: return b.true_state;
    case 3: return b.swv;
    default: return b.smoothed;
  }
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const TrajectoryBundle& b) {
  const int n = b.filtered.empty() ? 0 : b.filtered.front().dim();
  out << "t";
  for (int c = 0; c < b.observed.channels; ++c) out << ",yo_dt_" << c;
  for (int c = 0; c < b.unobserved.channels; ++c) out << ",yu_dt_" << c;
  for (const char* name : kEstimators) {
    for (int i = 0; i < n; ++i) out << ',' << name << "_mean_" << i;
    for (int i = 0; i < n; ++i)
      for (int k = i; k < n; ++k) out << ',' << name << "_cov_" << i << k;
    out << ',' << name << "_purity";
  }
  out << '\n';
  for (std::size_t t = 0; t < b.times.size(); ++t) {
    out << format_double(b.times[t]);
    const bool has_step = t + 1 < b.times.size();
    for (int c = 0; c < b.observed.channels; ++c)
      out << ',' << (has_step ? format_double(b.observed.increments[t * b.observed.channels + c]) : "");
    for (int c = 0; c < b.unobserved.channels; ++c)
      out << ',' << (has_step ? format_double(b.unobserved.increments[t * b.unobserved.channels + c]) : "");
    for (int e = 0; e < 5; ++e) {
      const GaussianState& s = series(b, e)[t];
      for (int i = 0; i < n; ++i) out << ',' << format_double(s.mean(i));
      for (int i = 0; i < n; ++i)
        for (int k = i; k < n; ++k) out << ',' << format_double(s.cov(i, k));
      out << ',' << format_double(purity_or_nan(s));
    }
    out << '\n';
  }
}

void write_snapshot_csv(std::ostream& out, const TrajectoryBundle& b, const std::vector<double>& times) {
  out << "t,estimator,mean_q,mean_p,semi_major,semi_minor,angle\n";
  if (b.times.size() < 2) return;
  const double dt = b.times[1] - b.times[0];
  for (double t : times) {
    const double pos = (t - b.times.front()) / dt;
    const long idx = std::lround(pos);
    if (idx < 0 || idx >= static_cast<long>(b.times.size()))
      throw DomainError("snapshot time " + format_double(t) + " outside the trajectory");
    for (int e = 0; e < 5; ++e) {
      const GaussianState& s = series(b, e)[static_cast<std::size_t>(idx)];
      const Ellipse el = covariance_ellipse(s.cov.topLeftCorner(2, 2));
      out << format_double(b.times[static_cast<std::size_t>(idx)]) << ',' << kEstimators[e] << ','
          << format_double(s.mean(0)) << ',' << format_double(s.mean(1)) << ',' << format_double(el.semi_major)
          << ',' << format_double(el.semi_minor) << ',' << format_double(el.angle) << '\n';
    }
  }
}

void write_scan_csv(std::ostream& out, const ScanResult& r) {
  out << "i_o,i_u,theta_o,theta_u";
  for (int k = 0; k < kObjectiveCount; ++k) out << ',' << objective_name(k);
  out << '\n';
  for (std::size_t i = 0; i < r.theta_o.size(); ++i) {
    for (std::size_t j = 0; j < r.theta_u.size(); ++j) {
      out << i << ',' << j << ',' << format_double(r.theta_o[i]) << ',' << format_double(r.theta_u[j]);
      for (int k = 0; k < kObjectiveCount; ++k)
        out << ',' << format_double(r.values[static_cast<std::size_t>(k)](static_cast<Eigen::Index>(i),
                                                                          static_cast<Eigen::Index>(j)));
      out << '\n';
    }
  }
}

void write_argmax_csv(std::ostream& out, const ScanResult& r) {
  out << "theta_o";
  std::vector<std::vector<double>> best;
  for (int k = 0; k < kObjectiveCount; ++k) {
    if (!(r.objectives & (1u << k))) continue;
    out << ",best_theta_u_" << objective_name(k);
    best.push_back(r.best_unobserved_phase(k));
  }
  out << '\n';
  for (std::size_t i = 0; i < r.theta_o.size(); ++i) {
    out << format_double(r.theta_o[i]);
    for (const auto& b : best) out << ',' << format_double(b[i]);
    out << '\n';
  }
}

namespace {

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

Json scan_summary(const ScanResult& r) {
  Json s;
  s["theta_o_points"] = r.theta_o.size();
  s["theta_u_points"] = r.theta_u.size();
  s["grid_step_deg"] = r.theta_u.size() > 1 ? (r.theta_u[1] - r.theta_u[0]) * 180.0 / M_PI : 0.0;
  Json objectives = Json::array();
  for (int k = 0; k < kObjectiveCount; ++k)
    if (r.objectives & (1u << k)) objectives.push_back(objective_name(k));
  s["objectives"] = objectives;
  if (r.objectives & kRpr) {
    Json dist = Json::object();
    for (int k = 0; k < 3; ++k) {
      if (!(r.objectives & (1u << k))) continue;
      const HypothesisDistance d = hypothesis_distance(r, k);
      dist[objective_name(k)] = {{"mean_deg", finite_or_null(d.mean * 180.0 / M_PI)},
                                 {"max_deg", finite_or_null(d.max * 180.0 / M_PI)},
                                 {"fraction_within_10deg", finite_or_null(d.fraction_within_10deg)},
                                 {"columns", d.columns}};
    }
    s["hypothesis_distance"] = dist;
  }
  Json failures = Json::array();
  for (const auto& f : r.failures)
    failures.push_back({{"i_o", f.i_o}, {"i_u", f.i_u}, {"objective", objective_name(f.objective)},
                        {"message", f.message}});
  s["failures"] = failures;
  return s;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "theta_o,eta_o,theta_u_numeric,theta_u_hyp_a,theta_u_hyp_c,rpr_numeric,rpr_hyp_a,rpr_hyp_c\n";
  for (const auto& r : rows)
    out << format_double(r.theta_o) << ',' << format_double(r.eta_o) << ',' << format_double(r.theta_u_numeric)
        << ',' << format_double(r.theta_u_hyp_a) << ',' << format_double(r.theta_u_hyp_c) << ','
        << format_double(r.rpr_numeric) << ',' << format_double(r.rpr_hyp_a) << ',' << format_double(r.rpr_hyp_c)
        << '\n';
}

Json sweep_summary(const std::vector<SweepRow>& rows) {
  double worst_c = INFINITY, worst_a = INFINITY;
  for (const auto& r : rows) {
    worst_c = std::min(worst_c, r.rpr_hyp_c / r.rpr_numeric);
    worst_a = std::min(worst_a, r.rpr_hyp_a / r.rpr_numeric);
  }
  return {{"rows", rows.size()},
          {"min_ratio_hyp_c", finite_or_null(worst_c)},
          {"min_ratio_hyp_a", finite_or_null(worst_a)}};
}

Json table_json(const QubitTable& t) {
  return {{"x,x", t(0, 0)}, {"x,y", t(0, 1)}, {"y,x", t(1, 0)}, {"y,y", t(1, 1)}};
}

Json hypothesis_tables_json(const HypothesisTables& t) {
  auto mat = [](const Eigen::Matrix3d& m) {
    Json rows = Json::array();
    for (int i = 0; i < 3; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
    return rows;
  };
  return {{"A", table_json(t.a)},
          {"B", table_json(t.b)},
          {"C", table_json(t.c)},
          {"kick_observed", {{"x", mat(t.kick_observed[0])}, {"y", mat(t.kick_observed[1])}}},
          {"kick_unobserved", {{"x", mat(t.kick_unobserved[0])}, {"y", mat(t.kick_unobserved[1])}}}};
}

Json rapr_table_json(const RaprTable& t) {
  Json cells = Json::object();
  const char* names[2] = {"x", "y"};
  double min_ess = INFINITY;
  int low = 0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const RaprCell& c = t.cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      cells[std::string(names[i]) + "," + names[j]] = {{"R", c.r},
                                                       {"ci", {c.ci_low, c.ci_high}},
                                                       {"purity_filtered", c.purity_filtered},
                                                       {"purity_smoothed", c.purity_smoothed},
                                                       {"purity_true", c.purity_true},
                                                       {"min_ess", c.min_ess},
                                                       {"low_ess_records", c.low_ess_records}};
      min_ess = std::min(min_ess, c.min_ess);
      low += c.low_ess_records;
    }
  }
  Json out = {{"cells", cells},
              {"n_observed", t.n_observed},
              {"n_unobserved", t.n_unobserved},
              {"min_ess", min_ess},
              {"low_ess_records", low}};
  if (low > 0) out["warning"] = "effective sample size below 10 on some records";
  return out;
}

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace lgqs
