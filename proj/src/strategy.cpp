#include "lgqs/strategy.hpp"

#include <algorithm>
#include <cmath>

#include "lgqs/errors.hpp"
#include "lgqs/estimators.hpp"
#include "lgqs/gaussian.hpp"
#include "lgqs/parallel.hpp"

namespace lgqs {

namespace {

void require_converged(const FixedPointReport& r, const char* what) {
  if (!r.converged)
    throw NumericalError(std::string(what) + " fixed point did not converge (residual " +
                         std::to_string(r.residual) + " after " + std::to_string(r.iterations) + " steps)");
}

}  // namespace

double rpr(const SteadyState& ss, double hbar) {
  require_converged(ss.filtered_report, "filtered covariance");
  require_converged(ss.true_report, "true covariance");
  require_converged(ss.haloed_report, "haloed information");
  const GaussianState f{Vec::Zero(ss.v_filtered.rows()), ss.v_filtered, hbar};
  const GaussianState t{f.mean, ss.v_true, hbar};
  const GaussianState s{f.mean, smoothed_covariance(ss.v_filtered, ss.lambda_haloed, ss.v_true), hbar};
  const double pf = purity(f);
  const double pt = purity(t);
  const double ps = purity(s);
  if (std::abs(pt - pf) <= 1e-12 * std::max(1.0, pt))
    throw DomainError("rpr: undefined, true and filtered purities coincide");
  return (ps - pf) / (pt - pf);
}

double rpr(const LgqModel& model, const FixedPointOptions& options) {
  return rpr(steady_state(model, kFiltered | kTrue | kHaloed, options), model.hbar);
}

Mat kick_tensor(const Mat& v, const Mat& c, const Mat& gamma) {
  const Mat k = kick_matrix(v, c, gamma, KickSign::Plus);
  return k * k.transpose();
}

double overlap_A(const LgqModel& model) {
  const Mat& co = model.observed.C;
  const Mat& cu = model.unobserved.C;
  return (co * cu.transpose() * cu * co.transpose()).trace();
}

double overlap_B(const LgqModel& model, const FixedPointOptions& options) {
  const SteadyState ss = steady_state(model, kBobOnly, options);
  require_converged(ss.bob_report, "Bob-only filtered covariance");
  const Mat b = kick_tensor(ss.v_bob_only, model.unobserved.C, model.unobserved.Gamma);
  return (model.observed.C * b * model.observed.C.transpose()).trace();
}

double overlap_C(const LgqModel& model, const FixedPointOptions& options) {
  const SteadyState ss = steady_state(model, kAliceKick, options);
  require_converged(ss.alice_report, "Alice-only filtered covariance");
  const Mat b = kick_tensor(ss.v_alice_only, model.observed.C, model.observed.Gamma);
  return (model.unobserved.C * b * model.unobserved.C.transpose()).trace();
}

const char* objective_name(int index) {
  static const char* names[kObjectiveCount] = {"O_m", "O_u", "O_o", "RPR"};
  return names[index];
}

std::vector<double> PhaseGrid::values() const {
  std::vector<double> v(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) v[static_cast<std::size_t>(i)] = at(i);
  return v;
}

int argmax_first(const std::vector<double>& values) {
  int best = -1;
  for (int i = 0; i < static_cast<int>(values.size()); ++i) {
    const double v = values[static_cast<std::size_t>(i)];
    if (std::isnan(v)) continue;
    if (best < 0 || v > values[static_cast<std::size_t>(best)] + 1e-12) best = i;
  }
  return best;
}

double phase_distance(double a, double b) { return std::abs(std::remainder(a - b, M_PI)); }

std::vector<double> ScanResult::best_unobserved_phase(int objective) const {
  const Eigen::MatrixXd& m = values[static_cast<std::size_t>(objective)];
  std::vector<double> out(theta_o.size(), NAN);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    const int k = argmax_first(row);
    if (k >= 0) out[static_cast<std::size_t>(i)] = theta_u[static_cast<std::size_t>(k)];
  }
  return out;
}

std::vector<double> ScanResult::best_observed_phase(int objective) const {
  const Eigen::MatrixXd& m = values[static_cast<std::size_t>(objective)];
  std::vector<double> out(theta_u.size(), NAN);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    std::vector<double> col(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) col[static_cast<std::size_t>(i)] = m(i, j);
    const int k = argmax_first(col);
    if (k >= 0) out[static_cast<std::size_t>(j)] = theta_o[static_cast<std::size_t>(k)];
  }
  return out;
}

namespace {

struct CellResult {
  double values[kObjectiveCount] = {NAN, NAN, NAN, NAN};
  std::vector<CellFailure> failures;
};

CellResult evaluate_cell(const ScanSpec& spec, int i_o, int i_u) {
  CellResult cell;
  auto fail = [&](int objective, const std::string& msg) { cell.failures.push_back({i_o, i_u, objective, msg}); };
  LgqModel model;
  try {
    model = spec.family(spec.theta_o.at(i_o), spec.theta_u.at(i_u));
  } catch (const std::exception& e) {
    for (int k = 0; k < kObjectiveCount; ++k)
      if (spec.objectives & (1u << k)) fail(k, e.what());
    return cell;
  }
  unsigned parts = 0;
  if (spec.objectives & kOverlapB) parts |= kBobOnly;
  if (spec.objectives & kOverlapC) parts |= kAliceKick;
  if (spec.objectives & kRpr) parts |= kFiltered | kTrue | kHaloed;
  const SteadyState ss = steady_state(model, parts, spec.fixed_point);

  if (spec.objectives & kOverlapA) cell.values[0] = overlap_A(model);
  if (spec.objectives & kOverlapB) {
    if (ss.bob_report.converged) {
      const Mat b = kick_tensor(ss.v_bob_only, model.unobserved.C, model.unobserved.Gamma);
      cell.values[1] = (model.observed.C * b * model.observed.C.transpose()).trace();
    } else {
      fail(1, "Bob-only filtered covariance did not converge");
    }
  }
  if (spec.objectives & kOverlapC) {
    if (ss.alice_report.converged) {
      const Mat b = kick_tensor(ss.v_alice_only, model.observed.C, model.observed.Gamma);
      cell.values[2] = (model.unobserved.C * b * model.unobserved.C.transpose()).trace();
    } else {
      fail(2, "Alice-only filtered covariance did not converge");
    }
  }
  if (spec.objectives & kRpr) {
    try {
      cell.values[3] = rpr(ss, model.hbar);
    } catch (const std::exception& e) {
      fail(3, e.what());
    }
  }
  return cell;
}

template <class Map>
ScanResult run_scan(const ScanSpec& spec, Map&& map) {
  if (spec.theta_o.points < 1 || spec.theta_u.points < 1) throw DomainError("scan: empty phase grid");
  if (!spec.family) throw DomainError("scan: no model family");
  const int no = spec.theta_o.points;
  const int nu = spec.theta_u.points;
  const auto cells = map(static_cast<std::size_t>(no) * static_cast<std::size_t>(nu), [&](std::size_t idx) {
    return evaluate_cell(spec, static_cast<int>(idx) / nu, static_cast<int>(idx) % nu);
  });
  ScanResult out;
  out.theta_o = spec.theta_o.values();
  out.theta_u = spec.theta_u.values();
  out.objectives = spec.objectives;
  out.values.assign(kObjectiveCount, Eigen::MatrixXd::Constant(no, nu, NAN));
  for (std::size_t idx = 0; idx < cells.size(); ++idx) {
    const int i = static_cast<int>(idx) / nu;
    const int j = static_cast<int>(idx) % nu;
    for (int k = 0; k < kObjectiveCount; ++k) out.values[static_cast<std::size_t>(k)](i, j) = cells[idx].values[k];
    out.failures.insert(out.failures.end(), cells[idx].failures.begin(), cells[idx].failures.end());
  }
  return out;
}

}  // namespace

ScanResult scan(const ScanSpec& spec) {
  return run_scan(spec, [](std::size_t n, auto&& f) { return parallel_map(n, f); });
}

ScanResult scan_serial(const ScanSpec& spec) {
  return run_scan(spec, [](std::size_t n, auto&& f) { return serial_map(n, f); });
}

HypothesisDistance hypothesis_distance(const ScanResult& result, int objective) {
  const auto hyp = result.best_unobserved_phase(objective);
  const auto num = result.best_unobserved_phase(3);
  HypothesisDistance d;
  double sum = 0.0, worst = 0.0;
  int within = 0, count = 0;
  for (std::size_t i = 0; i < hyp.size(); ++i) {
    if (std::isnan(hyp[i]) || std::isnan(num[i])) continue;
    const double dist = phase_distance(hyp[i], num[i]);
    sum += dist;
    worst = std::max(worst, dist);
    if (dist <= 10.0 * M_PI / 180.0 + 1e-12) ++within;
    ++count;
  }
  d.columns = count;
  if (count > 0) {
    d.mean = sum / count;
    d.max = worst;
    d.fraction_within_10deg = static_cast<double>(within) / count;
  }
  return d;
}

namespace {

template <bool Parallel>
std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  for (double eta : spec.eta_o)
    if (!(eta > 0.0 && eta < 1.0)) throw DomainError("efficiency_sweep: eta_o must lie in (0, 1)");
  std::vector<SweepRow> rows;
  for (double theta_o : spec.theta_o) {
    for (double eta_o : spec.eta_o) {
      ScanSpec s;
      const double hbar = spec.hbar;
      s.family = [eta_o, hbar](double to, double tu) { return opo_model(eta_o, to, 1.0 - eta_o, tu, hbar); };
      s.theta_o = PhaseGrid{theta_o, 1};
      s.theta_u = spec.theta_u;
      s.objectives = kOverlapA | kOverlapC | kRpr;
      s.fixed_point = spec.fixed_point;
      const ScanResult r = Parallel ? scan(s) : scan_serial(s);
      SweepRow row;
      row.theta_o = theta_o;
      row.eta_o = eta_o;
      std::vector<double> rp(r.theta_u.size()), oa(r.theta_u.size()), oc(r.theta_u.size());
      for (std::size_t j = 0; j < r.theta_u.size(); ++j) {
        oa[j] = r.values[0](0, static_cast<Eigen::Index>(j));
        oc[j] = r.values[2](0, static_cast<Eigen::Index>(j));
        rp[j] = r.values[3](0, static_cast<Eigen::Index>(j));
      }
      const int jn = argmax_first(rp), ja = argmax_first(oa), jc = argmax_first(oc);
      if (jn >= 0) {
        row.theta_u_numeric = r.theta_u[static_cast<std::size_t>(jn)];
        row.rpr_numeric = rp[static_cast<std::size_t>(jn)];
      }
      if (ja >= 0) {
        row.theta_u_hyp_a = r.theta_u[static_cast<std::size_t>(ja)];
        row.rpr_hyp_a = rp[static_cast<std::size_t>(ja)];
      }
      if (jc >= 0) {
        row.theta_u_hyp_c = r.theta_u[static_cast<std::size_t>(jc)];
        row.rpr_hyp_c = rp[static_cast<std::size_t>(jc)];
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace

std::vector<SweepRow> efficiency_sweep(const SweepSpec& spec) { return run_sweep<true>(spec); }

std::vector<SweepRow> efficiency_sweep_serial(const SweepSpec& spec) { return run_sweep<false>(spec); }

}  // namespace lgqs
