#pragma once

#include "lgqs/gaussian.hpp"
#include "lgqs/types.hpp"

namespace lgqs {

/// Linear Langevin system dx = A x dt + E dv_p observed through
/// y dt = C x dt + dv_m, with E dv_p dv_m^T = Gamma^T dt and D = E E^T.
struct LgSystem {
  Mat A;
  Mat D;
  Mat C;      // one row per measurement channel
  Mat Gamma;  // same shape as C

  int dim() const { return static_cast<int>(A.rows()); }
  int channels() const { return static_cast<int>(C.rows()); }

  /// A - Gamma^T C
  Mat drift_tilde() const;
  /// D - Gamma^T Gamma
  Mat diffusion_tilde() const;
};

/// Checks shapes, D symmetric PSD and D - Gamma^T Gamma PSD.
void validate(const LgSystem& sys, double tol = 1e-9);

/// Backward likelihood in information form: z = Lambda <x>_R, Lambda = V_R^{-1}.
struct InfoEffect {
  Vec z;
  Mat lambda;

  /// z = 0, Lambda = 0: the final condition, carrying no information.
  static InfoEffect uninformative(int dim);
};

enum class KickSign { Plus, Minus };

/// K^{+-}[V] = V C^T +- Gamma^T.
Mat kick_matrix(const Mat& v, const Mat& c, const Mat& gamma, KickSign sign);

/// Right-hand side of the Kalman-Bucy Riccati equation, A V + V A^T + D - K+ K+^T.
Mat filter_riccati_rhs(const Mat& v, const LgSystem& sys);

/// Right-hand side of the backward information Riccati equation in reversed time s = T - t:
/// L At + At^T L - L Dt L + C^T C.
Mat info_riccati_rhs(const Mat& lambda, const LgSystem& sys);

/// One explicit RK4 step of dX/ds = f(X), symmetrized.
template <class Rhs>
Mat rk4_symmetric(const Mat& x, double h, Rhs&& f) {
  const Mat k1 = f(x);
  const Mat k2 = f(Mat(x + 0.5 * h * k1));
  const Mat k3 = f(Mat(x + 0.5 * h * k2));
  const Mat k4 = f(Mat(x + h * k3));
  return symmetrize(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// One forward Kalman-Bucy step: Euler-Maruyama for the mean (gain evaluated at
/// the start of the step), RK4 for the covariance. `ydt` holds the record
/// increments y dt for this step.
Moments filter_step(const Vec& mean, const Mat& v, const LgSystem& sys, const Vec& ydt, double dt);

/// One backward step of the information-form retrofilter, from t+dt to t,
/// consuming the increment ydt of [t, t+dt]. Lambda is clipped to stay PSD.
InfoEffect retrofilter_info_step(const InfoEffect& effect, const LgSystem& sys, const Vec& ydt, double dt);

/// Smoothed moments from the filtered state and the retrofiltered effect:
/// V_S = [V_F^{-1} + Lambda]^{-1}, mean_S = V_S [V_F^{-1} mean_F + z].
Moments smoother_combine(const Vec& mean_f, const Mat& v_f, const InfoEffect& effect);

}  // namespace lgqs
