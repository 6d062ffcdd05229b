#include "lgqs/gaussian.hpp"

#include <cmath>
#include <string>

#include "lgqs/errors.hpp"

namespace lgqs {

namespace {

void require_square(const Mat& m, const char* what) {
  if (m.rows() != m.cols()) throw ShapeError(std::string(what) + " must be square");
}

}  // namespace

Mat symplectic_form(int n_modes) {
  Mat sigma = Mat::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    sigma(2 * k, 2 * k + 1) = 1.0;
    sigma(2 * k + 1, 2 * k) = -1.0;
  }
  return sigma;
}

Mat channel_symplectic(int n_channels) {
  Mat s = Mat::Zero(2 * n_channels, 2 * n_channels);
  s.topRightCorner(n_channels, n_channels).setIdentity();
  s.bottomLeftCorner(n_channels, n_channels) = -Mat::Identity(n_channels, n_channels);
  return s;
}

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

double min_eigenvalue(const Mat& symmetric) {
  require_square(symmetric, "matrix");
  if (symmetric.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(symmetric), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Mat spd_inverse(const Mat& m) {
  require_square(m, "matrix");
  Eigen::LLT<Mat> llt(symmetrize(m));
  if (llt.info() != Eigen::Success) throw DomainError("matrix is not positive definite");
  Mat inv = llt.solve(Mat::Identity(m.rows(), m.cols()));
  if (!inv.allFinite()) throw DomainError("matrix is numerically singular");
  return symmetrize(inv);
}

void validate(const GaussianState& state) {
  const Mat& v = state.cov;
  if (state.mean.size() % 2 != 0 || state.mean.size() == 0)
    throw ShapeError("phase-space dimension must be even and positive");
  if (v.rows() != state.mean.size() || v.cols() != state.mean.size())
    throw ShapeError("covariance does not match mean dimension");
  if (!(state.hbar > 0.0)) throw DomainError("hbar must be positive");
  if (!v.allFinite() || !state.mean.allFinite()) throw DomainError("state has non-finite entries");
  const double scale = v.norm();
  if ((v - v.transpose()).norm() > 1e-12 * std::max(scale, 1.0))
    throw DomainError("covariance is not symmetric");
  if (min_eigenvalue(v) < -1e-10 * scale) throw DomainError("covariance is not positive semidefinite");
}

double purity(const GaussianState& state) {
  const Mat& v = state.cov;
  require_square(v, "covariance");
  Eigen::LLT<Mat> llt(symmetrize(v));
  if (llt.info() != Eigen::Success) throw DomainError("purity: covariance is not positive definite");
  // log det via Cholesky keeps N > 1 states away from overflow
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const int n = state.modes();
  return std::exp(n * std::log(state.hbar / 2.0) - 0.5 * log_det);
}

ShurReport shur_check(const GaussianState& state, double tol) {
  const int dim = state.dim();
  const Mat sigma = symplectic_form(state.modes());
  CMat h(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      h(i, j) = {0.5 * (state.cov(i, j) + state.cov(j, i)), 0.5 * state.hbar * sigma(i, j)};
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  ShurReport report;
  report.min_eigenvalue = es.eigenvalues().minCoeff();
  report.valid = report.min_eigenvalue >= -tol;
  return report;
}

Moments gaussian_multiply(const Vec& m1, const Mat& v1, const Vec& m2, const Mat& v2) {
  if (v1.rows() != v2.rows() || m1.size() != m2.size() || m1.size() != v1.rows())
    throw ShapeError("gaussian_multiply: dimension mismatch");
  const Mat l1 = spd_inverse(v1);
  const Mat l2 = spd_inverse(v2);
  Moments out;
  out.cov = spd_inverse(l1 + l2);
  out.mean = out.cov * (l1 * m1 + l2 * m2);
  return out;
}

Moments gaussian_multiply_info(const Vec& m1, const Mat& v1, const Vec& z2, const Mat& lambda2) {
  if (v1.rows() != lambda2.rows() || m1.size() != z2.size() || m1.size() != v1.rows())
    throw ShapeError("gaussian_multiply_info: dimension mismatch");
  Eigen::LLT<Mat> llt(symmetrize(v1));
  if (llt.info() != Eigen::Success) throw DomainError("first factor covariance is not positive definite");
  const int n = static_cast<int>(v1.rows());
  // (V1^{-1} + L)^{-1} = V1 (I + L V1)^{-1}; no inverse of V1 and exact when L = 0.
  const Mat ilv = Mat::Identity(n, n) + lambda2 * v1;
  Moments out;
  out.cov = symmetrize(v1 * ilv.partialPivLu().inverse());
  out.mean = m1 + out.cov * (z2 - lambda2 * m1);
  return out;
}

Moments gaussian_convolve(const Vec& m1, const Mat& v1, const Vec& m2, const Mat& v2) {
  if (v1.rows() != v2.rows() || m1.size() != m2.size())
    throw ShapeError("gaussian_convolve: dimension mismatch");
  return {m1 + m2, v1 + v2};
}

bool psd_leq(const Mat& v1, const Mat& v2, double tol) {
  if (v1.rows() != v2.rows() || v1.cols() != v2.cols()) throw ShapeError("psd_leq: dimension mismatch");
  return min_eigenvalue(v2 - v1) >= -tol;
}

}  // namespace lgqs
