#pragma once

#include "lgqs/types.hpp"

namespace lgqs {

inline constexpr double kDefaultHbar = 2.0;

/// Gaussian Wigner function W(x) = g(x; mean, cov). Phase-space ordering is
/// (q1, p1, ..., qN, pN).
struct GaussianState {
  Vec mean;
  Mat cov;
  double hbar = kDefaultHbar;

  int dim() const { return static_cast<int>(mean.size()); }
  int modes() const { return dim() / 2; }
};

/// Mean and covariance pair, used for classical (non-quantum) Gaussians.
struct Moments {
  Vec mean;
  Mat cov;
};

/// Throws DomainError if `state` breaks the symmetry / PSD invariants.
void validate(const GaussianState& state);

/// Sigma: block-diagonal [[0,1],[-1,0]] per mode (2N x 2N).
Mat symplectic_form(int n_modes);

/// S = [[0, I_M], [-I_M, 0]] acting on the stacked (real, imaginary) channel coordinates.
Mat channel_symplectic(int n_channels);

Mat symmetrize(const Mat& m);
double min_eigenvalue(const Mat& symmetric);

/// Inverse of a symmetric positive-definite matrix via Cholesky. Throws
/// DomainError when the factorization fails.
Mat spd_inverse(const Mat& m);

/// (hbar/2)^N |V|^{-1/2}.
double purity(const GaussianState& state);

struct ShurReport {
  bool valid = false;
  double min_eigenvalue = 0.0;
};

/// Checks V + i hbar Sigma / 2 >= -tol using a Hermitian eigen-solver.
ShurReport shur_check(const GaussianState& state, double tol = 1e-9);

/// Product of two Gaussian densities (renormalized).
Moments gaussian_multiply(const Vec& m1, const Mat& v1, const Vec& m2, const Mat& v2);

/// Product where the second factor is given in information form (z = L m, L = V^{-1});
/// L = 0 represents an uninformative factor.
Moments gaussian_multiply_info(const Vec& m1, const Mat& v1, const Vec& z2, const Mat& lambda2);

/// Sum of independent Gaussian variables.
Moments gaussian_convolve(const Vec& m1, const Mat& v1, const Vec& m2, const Mat& v2);

/// True iff V2 - V1 has no eigenvalue below -tol.
bool psd_leq(const Mat& v1, const Mat& v2, double tol = 1e-9);

}  // namespace lgqs
