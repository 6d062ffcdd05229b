#include "lgqs/linear_gaussian.hpp"

#include <algorithm>

#include "lgqs/errors.hpp"

namespace lgqs {

Mat LgSystem::drift_tilde() const { return A - Gamma.transpose() * C; }

Mat LgSystem::diffusion_tilde() const { return D - Gamma.transpose() * Gamma; }

void validate(const LgSystem& sys, double tol) {
  const auto n = sys.A.rows();
  if (sys.A.cols() != n || sys.D.rows() != n || sys.D.cols() != n)
    throw ShapeError("LgSystem: A and D must be square of equal size");
  if (sys.C.cols() != n || sys.Gamma.cols() != n || sys.Gamma.rows() != sys.C.rows())
    throw ShapeError("LgSystem: C and Gamma must be channels x dim");
  const double scale = std::max(1.0, sys.D.norm());
  if ((sys.D - sys.D.transpose()).norm() > 1e-12 * scale) throw DomainError("LgSystem: D is not symmetric");
  if (min_eigenvalue(sys.D) < -tol * scale) throw DomainError("LgSystem: D is not PSD");
  if (min_eigenvalue(sys.diffusion_tilde()) < -tol * scale)
    throw DomainError("LgSystem: D - Gamma^T Gamma is not PSD");
}

InfoEffect InfoEffect::uninformative(int dim) { return {Vec::Zero(dim), Mat::Zero(dim, dim)}; }

Mat kick_matrix(const Mat& v, const Mat& c, const Mat& gamma, KickSign sign) {
  if (v.cols() != c.cols() || c.rows() != gamma.rows() || c.cols() != gamma.cols())
    throw ShapeError("kick_matrix: shape mismatch");
  const Mat vct = v * c.transpose();
  return sign == KickSign::Plus ? Mat(vct + gamma.transpose()) : Mat(vct - gamma.transpose());
}

Mat filter_riccati_rhs(const Mat& v, const LgSystem& sys) {
  const Mat k = v * sys.C.transpose() + sys.Gamma.transpose();
  return sys.A * v + v * sys.A.transpose() + sys.D - k * k.transpose();
}

Mat info_riccati_rhs(const Mat& lambda, const LgSystem& sys) {
  const Mat at = sys.drift_tilde();
  return lambda * at + at.transpose() * lambda - lambda * sys.diffusion_tilde() * lambda +
         sys.C.transpose() * sys.C;
}

Moments filter_step(const Vec& mean, const Mat& v, const LgSystem& sys, const Vec& ydt, double dt) {
  if (!(dt > 0.0)) throw DomainError("filter_step: dt must be positive");
  if (ydt.size() != sys.C.rows()) throw ShapeError("filter_step: record width does not match C");
  if (!ydt.allFinite()) throw DomainError("filter_step: non-finite record increment");
  const Mat k = v * sys.C.transpose() + sys.Gamma.transpose();
  const Vec innovation = ydt - sys.C * mean * dt;
  Moments out;
  out.mean = mean + sys.A * mean * dt + k * innovation;
  out.cov = rk4_symmetric(v, dt, [&](const Mat& x) { return filter_riccati_rhs(x, sys); });
  return out;
}

namespace {

Mat clip_psd(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  if (es.eigenvalues().minCoeff() >= 0.0) return m;
  Vec ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) < 0.0 && ev(i) >= -1e-12) ev(i) = 0.0;
  return symmetrize(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose());
}

}  // namespace

InfoEffect retrofilter_info_step(const InfoEffect& effect, const LgSystem& sys, const Vec& ydt, double dt) {
  if (!(dt > 0.0)) throw DomainError("retrofilter_info_step: dt must be positive");
  if (ydt.size() != sys.C.rows()) throw ShapeError("retrofilter_info_step: record width does not match C");
  const Mat at = sys.drift_tilde();
  const Mat dtl = sys.diffusion_tilde();
  const Mat& lam = effect.lambda;
  InfoEffect out;
  // backward Ito: coefficients taken at the later time t+dt
  out.z = effect.z + (at - dtl * lam).transpose() * effect.z * dt +
          (sys.C.transpose() - lam * sys.Gamma.transpose()) * ydt;
  out.lambda = clip_psd(rk4_symmetric(lam, dt, [&](const Mat& x) { return info_riccati_rhs(x, sys); }));
  return out;
}

Moments smoother_combine(const Vec& mean_f, const Mat& v_f, const InfoEffect& effect) {
  return gaussian_multiply_info(mean_f, v_f, effect.z, effect.lambda);
}

}  // namespace lgqs
