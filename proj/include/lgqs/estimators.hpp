#pragma once

#include "lgqs/gaussian.hpp"
#include "lgqs/linear_gaussian.hpp"
#include "lgqs/model.hpp"

namespace lgqs {

/// Lyapunov step: no measurement.
GaussianState unconditioned_step(const GaussianState& state, const LgqModel& model, double dt);

/// Filtered state conditioned on Alice's record only.
GaussianState filtered_step(const GaussianState& state, const LgqModel& model, const Vec& y_o_dt, double dt);

/// True state conditioned on both records.
GaussianState true_step(const GaussianState& state, const LgqModel& model, const Vec& y_o_dt, const Vec& y_u_dt,
                        double dt);

/// Smoothed weak-value combination. The result may violate the uncertainty relation.
GaussianState swv_combine(const GaussianState& filtered, const InfoEffect& retrofiltered);

/// The classical system obeyed by the true mean, as seen through Alice's record:
/// diffusion K_o K_o^T + K_u K_u^T and cross-correlation Gamma^T = K_o, all at V_T.
LgSystem haloed_system(const LgqModel& model, const Mat& v_true);

/// One backward step of the haloed information filter (z, Lambda), with V_T taken
/// at the later grid time of the step.
InfoEffect haloed_retrofilter_step(const InfoEffect& effect, const LgqModel& model, const Mat& v_true,
                                   const Vec& y_o_dt, double dt);

/// V_S = [(V_F - V_T)^{-1} + Lambda]^{-1} + V_T, computed on the support of V_F - V_T
/// (eigenvalues below 1e-12 are projected out, giving V_S = V_F in the degenerate limit).
GaussianState smoothed_combine(const GaussianState& filtered, const InfoEffect& haloed, const Mat& v_true);

/// Covariance-only version of smoothed_combine.
Mat smoothed_covariance(const Mat& v_filtered, const Mat& lambda_haloed, const Mat& v_true);

/// 1 - largest eigenvalue of V_T Lambda: non-negative iff the haloed retrofiltered
/// covariance V_R = Lambda^{-1} dominates V_T.
double haloed_retro_margin(const InfoEffect& haloed, const Mat& v_true);

}  // namespace lgqs
