#pragma once

#include <cmath>
#include <random>

#include "lgqs/gaussian.hpp"
#include "lgqs/types.hpp"

namespace lgqs::test {

inline Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

inline Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

inline Mat diag(std::initializer_list<double> d) {
  Mat m = Mat::Zero(static_cast<int>(d.size()), static_cast<int>(d.size()));
  int i = 0;
  for (double x : d) {
    m(i, i) = x;
    ++i;
  }
  return m;
}

inline GaussianState state_with(const Mat& cov, double hbar = 2.0) {
  GaussianState s;
  s.mean = Vec::Zero(cov.rows());
  s.cov = cov;
  s.hbar = hbar;
  return s;
}

/// Random valid quantum covariance: S (hbar/2) diag(n_k, n_k) S^T with S a product of
/// a rotation, a squeeze and a rotation, thermal factors n_k >= 1.
inline Mat random_quantum_cov(std::mt19937_64& rng, int modes, double hbar) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 2 * modes;
  Mat v = Mat::Zero(n, n);
  for (int k = 0; k < modes; ++k) {
    const double th1 = 2 * M_PI * u(rng), th2 = 2 * M_PI * u(rng), r = 1.5 * u(rng);
    const double thermal = 1.0 + 3.0 * u(rng) * u(rng);
    Mat rot1 = mat2(std::cos(th1), -std::sin(th1), std::sin(th1), std::cos(th1));
    Mat rot2 = mat2(std::cos(th2), -std::sin(th2), std::sin(th2), std::cos(th2));
    Mat sq = mat2(std::exp(r), 0, 0, std::exp(-r));
    Mat s = rot1 * sq * rot2;
    v.block(2 * k, 2 * k, 2, 2) = (0.5 * hbar * thermal) * s * s.transpose();
  }
  return v;
}

inline Mat random_spd(std::mt19937_64& rng, int n, double floor = 0.1) {
  std::normal_distribution<double> g;
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  return a * a.transpose() + floor * Mat::Identity(n, n);
}

}  // namespace lgqs::test
