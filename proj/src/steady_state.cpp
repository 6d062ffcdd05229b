#include <algorithm>
#include <cmath>

#include "lgqs/errors.hpp"
#include "lgqs/estimators.hpp"
#include "lgqs/strategy.hpp"

namespace lgqs {

namespace {

// Newton step for rhs(X) = 0 on symmetric X. The right-hand sides used here are
// quadratic in X, so central differences give the Jacobian exactly up to rounding.
Mat newton_step(const std::function<Mat(const Mat&)>& rhs, const Mat& y) {
  const int n = static_cast<int>(y.rows());
  const int m = n * (n + 1) / 2;
  auto vech = [n, m](const Mat& a) {
    Eigen::VectorXd v(m);
    int k = 0;
    for (int j = 0; j < n; ++j)
      for (int i = j; i < n; ++i) v(k++) = a(i, j);
    return v;
  };
  auto unvech = [n](const Eigen::VectorXd& v) {
    Mat a(n, n);
    int k = 0;
    for (int j = 0; j < n; ++j)
      for (int i = j; i < n; ++i) {
        a(i, j) = v(k);
        a(j, i) = v(k);
        ++k;
      }
    return a;
  };
  const double eps = std::max(1.0, y.norm());
  Eigen::MatrixXd jac(m, m);
  for (int k = 0; k < m; ++k) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    e(k) = eps;
    const Mat de = unvech(e);
    jac.col(k) = (vech(rhs(y + de)) - vech(rhs(y - de))) / (2.0 * eps);
  }
  return unvech(jac.fullPivLu().solve(-vech(rhs(y))));
}

// Newton iterations from the integrated state, rejected if they wander off.
bool newton_polish(const std::function<Mat(const Mat&)>& rhs, const std::function<double(const Mat&)>& residual,
                   Mat& x, double tol) {
  const double radius = 0.1 * std::max(1.0, x.norm());
  Mat y = x;
  for (int iter = 0; iter <= 30; ++iter) {
    if (residual(y) <= tol) {
      x = y;
      return true;
    }
    if (iter == 30) break;
    y += newton_step(rhs, y);
    if (!y.allFinite() || (y - x).norm() > radius) return false;
  }
  return false;
}

// Extra Newton steps after convergence, kept while they lower the residual. Near a
// marginally stable mode a small residual still leaves a sizeable error in X.
void newton_refine(const std::function<Mat(const Mat&)>& rhs, const std::function<double(const Mat&)>& residual,
                   Mat& x, double& r) {
  const double radius = 0.1 * std::max(1.0, x.norm());
  const Mat start = x;
  for (int iter = 0; iter < 4; ++iter) {
    const Mat y = symmetrize(x + newton_step(rhs, x));
    if (!y.allFinite() || (y - start).norm() > radius) return;
    const double ry = residual(y);
    if (!(ry < r)) return;
    x = y;
    r = ry;
  }
}

}  // namespace

Mat integrate_to_fixed_point(const std::function<Mat(const Mat&)>& rhs,
                             const std::function<double(const Mat&)>& residual, const Mat& x0,
                             const FixedPointOptions& options, FixedPointReport& report) {
  Mat x = x0;
  double r = residual(x);
  double h = options.dt_initial;
  report = {};
  long steps = 0;
  long next_polish = 200;
  while (steps < options.max_steps && !(r <= options.tol)) {
    ++steps;
    const Mat full = rk4_symmetric(x, h, rhs);
    const Mat half = rk4_symmetric(rk4_symmetric(x, 0.5 * h, rhs), 0.5 * h, rhs);
    const double err = (full - half).norm() / (15.0 * std::max(1.0, x.norm()));
    if (!half.allFinite() || !(err <= options.local_tol)) {
      h *= std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(options.local_tol / err, 0.2)) : 0.2;
      if (h < 1e-12) break;
      continue;
    }
    x = half;
    r = residual(x);
    const double grow = err > 0.0 ? 0.9 * std::pow(options.local_tol / err, 0.2) : 4.0;
    h = std::min(h * std::clamp(grow, 1.0, 4.0), options.dt_max);
    if (steps >= next_polish && !(r <= options.tol)) {
      next_polish = 2 * steps;
      if (newton_polish(rhs, residual, x, options.tol)) r = residual(x);
    }
  }
  if (r <= options.tol) newton_refine(rhs, residual, x, r);
  report.iterations = steps;
  report.residual = r;
  report.converged = r <= options.tol;
  return x;
}

Mat steady_filter_covariance(const LgSystem& sys, double hbar, const FixedPointOptions& options,
                             FixedPointReport& report, bool kick_only) {
  const int n = sys.dim();
  const Mat ct = sys.C.transpose();
  auto rhs = [&](const Mat& v) { return filter_riccati_rhs(v, sys); };
  std::function<double(const Mat&)> residual;
  if (kick_only)
    residual = [&](const Mat& v) { return (filter_riccati_rhs(v, sys) * ct).norm(); };
  else
    residual = [&](const Mat& v) { return filter_riccati_rhs(v, sys).norm(); };
  return integrate_to_fixed_point(rhs, residual, Mat(0.5 * hbar * Mat::Identity(n, n)), options, report);
}

Mat steady_haloed_information(const LgqModel& model, const Mat& v_true, const FixedPointOptions& options,
                              FixedPointReport& report) {
  const LgSystem sys = haloed_system(model, v_true);
  auto rhs = [&](const Mat& l) { return info_riccati_rhs(l, sys); };
  auto residual = [&](const Mat& l) { return info_riccati_rhs(l, sys).norm(); };
  return integrate_to_fixed_point(rhs, residual, Mat::Zero(model.dim(), model.dim()), options, report);
}

bool SteadyState::converged(unsigned parts) const {
  bool ok = true;
  if (parts & kFiltered) ok = ok && filtered_report.converged;
  if (parts & kTrue) ok = ok && true_report.converged;
  if (parts & kBobOnly) ok = ok && bob_report.converged;
  if (parts & kAliceKick) ok = ok && alice_report.converged;
  if (parts & kHaloed) ok = ok && haloed_report.converged;
  return ok;
}

SteadyState steady_state(const LgqModel& model, unsigned parts, const FixedPointOptions& options) {
  SteadyState ss;
  if (parts & kHaloed) parts |= kTrue;
  if (parts & kFiltered)
    ss.v_filtered = steady_filter_covariance(model.observed_system(), model.hbar, options, ss.filtered_report);
  if (parts & kTrue)
    ss.v_true = steady_filter_covariance(model.joint_system(), model.hbar, options, ss.true_report);
  if (parts & kBobOnly)
    ss.v_bob_only =
        steady_filter_covariance(model.unobserved_system(), model.hbar, options, ss.bob_report, /*kick_only=*/true);
  if (parts & kAliceKick) {
    if ((parts & kFiltered) && ss.filtered_report.converged) {
      ss.v_alice_only = ss.v_filtered;
      ss.alice_report = ss.filtered_report;
    } else {
      ss.v_alice_only =
          steady_filter_covariance(model.observed_system(), model.hbar, options, ss.alice_report, true);
    }
  }
  if ((parts & kHaloed) && ss.true_report.converged)
    ss.lambda_haloed = steady_haloed_information(model, ss.v_true, options, ss.haloed_report);
  return ss;
}

}  // namespace lgqs
