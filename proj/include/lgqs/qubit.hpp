#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "lgqs/trajectory.hpp"

namespace lgqs {

/// Qubit density matrix. Basis (|e>, |g>), so sigma_z|g> = -|g> and sigma_- = |g><e|.
struct QubitState {
  Eigen::Matrix2cd rho = Eigen::Matrix2cd::Identity() * 0.5;

  static QubitState from_bloch(const Eigen::Vector3d& r, double trace = 1.0);
  static QubitState ground();
  static QubitState excited();

  Eigen::Vector3d bloch() const;  // (<sx>, <sy>, <sz>) of the normalized state
  double trace() const { return rho.trace().real(); }
  double purity() const;          // of the normalized state
};

/// Throws DomainError unless rho is Hermitian (1e-12), has positive trace and
/// a normalized Bloch norm <= 1 + 1e-9.
void validate(const QubitState& state);

/// Time unit is 1/gamma; hbar = 1.
struct QubitConfig {
  double omega = 5.0;
  double gamma = 1.0;
  double eta_o = 0.5;
  double eta_u = 0.5;
  double theta_o = 0.0;  // 0: x homodyne, pi/2: y homodyne
  double theta_u = 0.0;
  double T = 8.0;
  double dt = 1e-3;
  double window_start = 4.5;
  double window_end = 6.0;
};

/// Throws DomainError for negative rates/efficiencies, eta_o + eta_u > 1, phases
/// outside {0, pi/2}, a horizon that is not a whole number of steps or a steady
/// window outside [0, T].
void validate(const QubitConfig& config);

/// Grid indices [first, last] of the steady window.
std::pair<int, int> window_indices(const QubitConfig& config);

/// Measurement row [cos theta, sin theta, 0].
Eigen::RowVector3d qubit_measurement_row(double theta);

/// y dt = sqrt(gamma eta) C <r> dt + dw for the given observer.
double qubit_photocurrent(const QubitState& state, const QubitConfig& config, ObserverTag observer, double dw,
                          double dt);

/// One step of the two-observer conditioned master equation, renormalized. Uses the
/// Kraus form M rho M^dag + (1 - eta_o - eta_u) gamma dt sigma_- rho sigma_+ with
/// M = 1 + i (Omega/2) sigma_x dt - (gamma/2) sigma_+ sigma_- dt + sum_r y_r dt L_r,
/// L_r = sqrt(gamma eta_r) e^{i theta_r} sigma_-, so positivity holds by construction.
QubitState qubit_true_step(const QubitState& state, const QubitConfig& config, double dw_o, double dw_u, double dt);

/// Which channels a linear map conditions on. Unmonitored channels act as plain decay.
enum class Monitored { Both, ObservedOnly, UnobservedOnly, None };

/// Linear one-step map on the Pauli vector v = (Tr rho, <sx>, <sy>, <sz>) (unnormalized),
/// v' = [P0 + a P1 + b P2 + a^2 P3 + b^2 P4 + ab P5] v with a = y_o dt, b = y_u dt.
struct QubitStepMaps {
  std::array<Eigen::Matrix4d, 6> P;

  Eigen::Matrix4d at(double a, double b) const {
    return P[0] + a * P[1] + b * P[2] + a * a * P[3] + b * b * P[4] + a * b * P[5];
  }
};

QubitStepMaps qubit_step_maps(const QubitConfig& config, Monitored monitored);

struct QubitRun {
  Record observed;
  Record unobserved;
  std::vector<Eigen::Vector3d> bloch;  // grid points 0..n_steps
};

/// True-state trajectory from the ground state under the given monitoring, up to grid
/// index `last_step` (whole horizon if negative). Streams are keyed by (seed, index,
/// channel) with channels 0 (observed) and 1 (unobserved).
QubitRun simulate_qubit(const QubitConfig& config, std::uint64_t seed, std::uint64_t index,
                        Monitored monitored = Monitored::Both, int last_step = -1);

/// Alice's own filtered state along her record (unobserved channel as decay), grid
/// points 0..record.n_steps.
std::vector<Eigen::Vector3d> qubit_direct_filter(const Record& observed, const QubitConfig& config);

struct SmoothingOutput {
  std::vector<double> times;              // steady-window grid
  std::vector<Eigen::Vector3d> filtered;  // weighted-ensemble rho_F
  std::vector<Eigen::Vector3d> smoothed;  // rho_S
  double min_ess_filtered = 0.0;
  double min_ess_smoothed = 0.0;
  bool low_ess = false;                   // some ESS below 10
};

/// Weighted-ensemble filter and smoother over the steady window. Candidate unobserved
/// records are N(0, dt) draws keyed by (candidate_seed, k); each candidate's linear
/// true state carries its likelihood in a log-weight. The retrofiltered effect runs
/// backward from E(T) = I with Alice's map. Requires n_unobserved >= 1; candidates are
/// split across threads when `parallel` is set, with results independent of the split.
SmoothingOutput ensemble_smooth(const Record& observed, const QubitConfig& config, int n_unobserved,
                                std::uint64_t candidate_seed, bool parallel = false);

/// Single-observer mean-square kick tensor: average over records of
/// (1/|window|) sum_window dr dr^T, with only `observer` monitored.
Eigen::Matrix3d qubit_kick_tensor(const QubitConfig& config, ObserverTag observer, int n_records,
                                  std::uint64_t seed);

/// 2x2 tables indexed (theta_o, theta_u), index 0 = x (theta 0), 1 = y (theta pi/2).
using QubitTable = Eigen::Matrix2d;

struct HypothesisTables {
  QubitTable a;  // (C_o . C_u)^2
  QubitTable b;  // C_o B_u C_o^T
  QubitTable c;  // C_u B_o C_u^T
  std::array<Eigen::Matrix3d, 2> kick_observed;    // B_o at theta 0, pi/2
  std::array<Eigen::Matrix3d, 2> kick_unobserved;  // B_u at theta 0, pi/2
};

/// Phases in `config` are ignored.
HypothesisTables hypothesis_tables(const QubitConfig& config, int n_records, std::uint64_t seed);

struct RaprCell {
  double r = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double purity_filtered = 0.0;  // averaged over window and records
  double purity_smoothed = 0.0;
  double purity_true = 0.0;
  double min_ess = 0.0;
  int low_ess_records = 0;
};

struct RaprTable {
  QubitTable r;
  std::array<std::array<RaprCell, 2>, 2> cells;  // [theta_o][theta_u]
  int n_observed = 0;
  int n_unobserved = 0;
};

struct RaprOptions {
  int n_observed = 300;
  int n_unobserved = 2000;
  int bootstrap_resamples = 2000;
  double ci_level = 0.9;
  std::uint64_t seed = 1;
};

/// (E[P_S] - E[P_F]) / (E[P_T] - E[P_F]) for the four phase pairs, with percentile
/// bootstrap intervals over observed records. Every cell uses the same noise streams.
/// Throws NumericalError if a denominator is not positive.
RaprTable rapr_table(const QubitConfig& config, const RaprOptions& options);
RaprTable rapr_table_serial(const QubitConfig& config, const RaprOptions& options);

/// Cell indices sorted by decreasing value, cell = 2 * i_o + i_u.
std::array<int, 4> table_order(const QubitTable& table);

}  // namespace lgqs
