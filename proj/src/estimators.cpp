#include "lgqs/estimators.hpp"

#include <algorithm>

#include "lgqs/errors.hpp"

namespace lgqs {

namespace {

GaussianState with_moments(const GaussianState& like, Moments m) {
  return {std::move(m.mean), std::move(m.cov), like.hbar};
}


// (V_F - V_T) restricted to its support, combined with Lambda.
Mat haloed_smoothed_cov(const Mat& v_filtered, const Mat& lambda, const Mat& v_true) {
  const Mat vh = symmetrize(v_filtered - v_true);
  Eigen::SelfAdjointEigenSolver<Mat> es(vh);
  const Vec& ev = es.eigenvalues();
  const double scale = std::max(1.0, v_filtered.norm());
  if (ev.minCoeff() < -1e-9 * scale) throw DomainError("smoothed_combine: V_F - V_T is not PSD");
  const int n = static_cast<int>(vh.rows());
  int rank = 0;
  for (int i = 0; i < n; ++i)
    if (ev(i) > 1e-12 * scale) ++rank;
  if (rank == 0) return Mat::Zero(n, n);
  // eigenvalues are sorted ascending: the support is the trailing block
  const Mat w = es.eigenvectors().rightCols(rank);
  Mat precision = w.transpose() * lambda * w;
  for (int i = 0; i < rank; ++i) precision(i, i) += 1.0 / ev(n - rank + i);
  return symmetrize(w * spd_inverse(precision) * w.transpose());
}

}  // namespace

GaussianState unconditioned_step(const GaussianState& state, const LgqModel& model, double dt) {
  return with_moments(state, filter_step(state.mean, state.cov, model.unconditioned_system(), Vec::Zero(0), dt));
}

GaussianState filtered_step(const GaussianState& state, const LgqModel& model, const Vec& y_o_dt, double dt) {
  return with_moments(state, filter_step(state.mean, state.cov, model.observed_system(), y_o_dt, dt));
}

GaussianState true_step(const GaussianState& state, const LgqModel& model, const Vec& y_o_dt, const Vec& y_u_dt,
                        double dt) {
  Vec ydt(y_o_dt.size() + y_u_dt.size());
  ydt << y_o_dt, y_u_dt;
  return with_moments(state, filter_step(state.mean, state.cov, model.joint_system(), ydt, dt));
}

GaussianState swv_combine(const GaussianState& filtered, const InfoEffect& retrofiltered) {
  return with_moments(filtered, smoother_combine(filtered.mean, filtered.cov, retrofiltered));
}

LgSystem haloed_system(const LgqModel& model, const Mat& v_true) {
  const Mat ko = kick_matrix(v_true, model.observed.C, model.observed.Gamma, KickSign::Plus);
  const Mat ku = kick_matrix(v_true, model.unobserved.C, model.unobserved.Gamma, KickSign::Plus);
  LgSystem sys;
  sys.A = model.A;
  sys.D = symmetrize(ko * ko.transpose() + ku * ku.transpose());
  sys.C = model.observed.C;
  sys.Gamma = ko.transpose();
  return sys;
}

InfoEffect haloed_retrofilter_step(const InfoEffect& effect, const LgqModel& model, const Mat& v_true,
                                   const Vec& y_o_dt, double dt) {
  if (v_true.rows() != model.dim() || effect.lambda.rows() != model.dim())
    throw ShapeError("haloed_retrofilter_step: V_T / effect dimension does not match model");
  return retrofilter_info_step(effect, haloed_system(model, v_true), y_o_dt, dt);
}

Mat smoothed_covariance(const Mat& v_filtered, const Mat& lambda_haloed, const Mat& v_true) {
  return symmetrize(haloed_smoothed_cov(v_filtered, lambda_haloed, v_true) + v_true);
}

GaussianState smoothed_combine(const GaussianState& filtered, const InfoEffect& haloed, const Mat& v_true) {
  const Mat vsh = haloed_smoothed_cov(filtered.cov, haloed.lambda, v_true);
  GaussianState out;
  out.hbar = filtered.hbar;
  // algebraically V_S^h [(V_F - V_T)^{-1} m_F + z], rearranged to avoid the inverse
  out.mean = filtered.mean + vsh * (haloed.z - haloed.lambda * filtered.mean);
  out.cov = symmetrize(vsh + v_true);
  return out;
}

double haloed_retro_margin(const InfoEffect& haloed, const Mat& v_true) {
  const Eigen::EigenSolver<Mat> es(Mat(v_true * haloed.lambda), false);
  return 1.0 - es.eigenvalues().real().maxCoeff();
}

}  // namespace lgqs
