#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lgqs/gaussian.hpp"
#include "lgqs/linear_gaussian.hpp"
#include "lgqs/types.hpp"

namespace lgqs {

/// Homodyne detection of one physical channel.
struct HomodyneSetup {
  double theta = 0.0;
  double eta = 0.0;
  int channel = 0;
};

/// One observer's view of the bath: unraveling matrix and the derived
/// measurement (C) and back-action (Gamma) matrices.
struct Observer {
  CMat unraveling;
  Mat C;
  Mat Gamma;
  std::vector<double> efficiencies;  // per physical channel, diag(M M^dagger)
};

/// Linear-Gaussian quantum model: quadratic Hamiltonian x^T G x / 2,
/// Lindblad operators c = (I, iI) Cbar x, and two observers (o = Alice, u = Bob).
struct LgqModel {
  int n_modes = 1;
  double hbar = kDefaultHbar;
  Mat G;
  Mat Cbar;
  Mat A;
  Mat D;
  Observer observed;
  Observer unobserved;

  int dim() const { return 2 * n_modes; }
  int n_channels() const { return static_cast<int>(Cbar.rows() / 2); }

  /// (A, D, C_o, Gamma_o)
  LgSystem observed_system() const;
  /// (A, D, C_u, Gamma_u)
  LgSystem unobserved_system() const;
  /// (A, D) with both observers' rows stacked: the true-state (two-record) filter.
  LgSystem joint_system() const;
  /// (A, D) with no measurement rows.
  LgSystem unconditioned_system() const;
};

/// A = Sigma (G + Cbar^T S Cbar), D = hbar Sigma Cbar^T Cbar Sigma^T.
std::pair<Mat, Mat> build_drift_diffusion(const Mat& G, const Mat& Cbar, double hbar);

/// C = 2 hbar^{-1/2} T^T Cbar and Gamma = -hbar^{1/2} T^T S Cbar Sigma^T with
/// T^T = (Re M^T, Im M^T). Validates the unraveling first.
std::pair<Mat, Mat> build_measurement(const CMat& M, const Mat& Cbar, double hbar);

/// Checks M M^dagger = diag(eta) with eta in [0,1] (tolerance 1e-12) and returns eta.
std::vector<double> validate_unraveling(const CMat& M);

/// Assembles a model and checks that the observers' combined efficiency on each
/// physical channel does not exceed one.
LgqModel make_model(const Mat& G, const Mat& Cbar, double hbar, const CMat& M_o, const CMat& M_u);

/// e^{i theta} with components below 1e-15 snapped to zero, so that e.g. theta = pi/2
/// gives an exactly vanishing cosine.
std::complex<double> homodyne_phase(double theta);

/// On-threshold OPO (chi = gamma = 1): one loss channel shared by both observers.
LgqModel opo_model(double eta_o, double theta_o, double eta_u, double theta_u, double hbar = kDefaultHbar);

/// Noisy linear attenuator with loss rate gamma_down and gain rate gamma_up.
/// Alice perfectly monitors the loss channel at phase theta_o, Bob the gain
/// channel at phase theta_u.
LgqModel attenuator_model(double gamma_down, double gamma_up, double theta_o, double theta_u,
                          double hbar = kDefaultHbar);

/// Same model with the roles of Alice and Bob exchanged.
LgqModel swap_observers(const LgqModel& model);

}  // namespace lgqs
