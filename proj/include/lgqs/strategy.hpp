#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "lgqs/linear_gaussian.hpp"
#include "lgqs/model.hpp"

namespace lgqs {

// ---------------------------------------------------------------------------
// Steady states

struct FixedPointOptions {
  double dt_initial = 0.01;
  double dt_max = 5.0;
  double local_tol = 1e-8;  // per-step error, relative to max(1, |X|)
  double tol = 1e-9;
  long max_steps = 1'000'000;
};

struct FixedPointReport {
  long iterations = 0;
  double residual = std::numeric_limits<double>::infinity();
  bool converged = false;
};

/// Integrates dX/ds = rhs(X) from x0 with RK4 in pseudo-time until
/// residual(X) <= tol. Step size is controlled by step doubling; stiff tails are
/// finished by Newton steps that must stay near the integrated trajectory.
Mat integrate_to_fixed_point(const std::function<Mat(const Mat&)>& rhs,
                             const std::function<double(const Mat&)>& residual, const Mat& x0,
                             const FixedPointOptions& options, FixedPointReport& report);

/// Fixed point of the filter Riccati equation of `sys`. With `kick_only`, convergence
/// is measured on the kick matrix V C^T + Gamma^T only (used when a quadrature is
/// unobserved and V itself grows without bound).
Mat steady_filter_covariance(const LgSystem& sys, double hbar, const FixedPointOptions& options,
                             FixedPointReport& report, bool kick_only = false);

/// Backward fixed point of the haloed information Riccati equation at constant V_T.
Mat steady_haloed_information(const LgqModel& model, const Mat& v_true, const FixedPointOptions& options,
                              FixedPointReport& report);

enum SteadyPart : unsigned {
  kFiltered = 1u << 0,       // V_F (Alice only)
  kTrue = 1u << 1,           // V_T
  kBobOnly = 1u << 2,        // V_U, kick-converged
  kAliceKick = 1u << 3,      // V_O, kick-converged
  kHaloed = 1u << 4,         // Lambda (needs kTrue)
  kAllParts = 0x1Fu,
};

struct SteadyState {
  Mat v_filtered;
  Mat v_true;
  Mat v_bob_only;
  Mat v_alice_only;
  Mat lambda_haloed;
  FixedPointReport filtered_report, true_report, bob_report, alice_report, haloed_report;

  bool converged(unsigned parts) const;
};

/// Requested steady-state covariances of `model`. Non-convergence is reported in
/// the per-part reports, not thrown.
SteadyState steady_state(const LgqModel& model, unsigned parts = kAllParts, const FixedPointOptions& options = {});

// ---------------------------------------------------------------------------
// Objectives

/// (P_S - P_F) / (P_T - P_F) from steady-state covariances. Throws DomainError when
/// P_T == P_F (no unobserved channel) and NumericalError when a fixed point fails.
double rpr(const LgqModel& model, const FixedPointOptions& options = {});
double rpr(const SteadyState& ss, double hbar);

/// B = K+[V] K+[V]^T.
Mat kick_tensor(const Mat& v, const Mat& c, const Mat& gamma);

/// Hypothesis A: Tr[C_o C_u^T C_u C_o^T].
double overlap_A(const LgqModel& model);
/// Hypothesis B: Tr[C_o B_u C_o^T], B_u from Bob's own filtered steady state.
double overlap_B(const LgqModel& model, const FixedPointOptions& options = {});
/// Hypothesis C: Tr[C_u B_o C_u^T], B_o from Alice's own filtered steady state.
double overlap_C(const LgqModel& model, const FixedPointOptions& options = {});

// ---------------------------------------------------------------------------
// Scans

enum Objective : unsigned {
  kOverlapA = 1u << 0,
  kOverlapB = 1u << 1,
  kOverlapC = 1u << 2,
  kRpr = 1u << 3,
  kAllObjectives = 0xFu,
};

inline constexpr int kObjectiveCount = 4;
const char* objective_name(int index);

/// Model as a function of (theta_o, theta_u).
using ModelFamily = std::function<LgqModel(double theta_o, double theta_u)>;

/// `points` equally spaced phases in the half-open interval [start, start + pi).
struct PhaseGrid {
  double start = -M_PI / 2.0;
  int points = 61;

  double at(int i) const { return start + M_PI * i / points; }
  double step() const { return M_PI / points; }
  std::vector<double> values() const;
};

struct ScanSpec {
  ModelFamily family;
  PhaseGrid theta_o;
  PhaseGrid theta_u;
  unsigned objectives = kAllObjectives;
  FixedPointOptions fixed_point;
};

struct CellFailure {
  int i_o = 0;
  int i_u = 0;
  int objective = 0;
  std::string message;
};

/// Objective values on the grid, indexed [objective](i_o, i_u). Cells that were not
/// requested or that failed hold NaN.
struct ScanResult {
  std::vector<double> theta_o;
  std::vector<double> theta_u;
  std::vector<Eigen::MatrixXd> values;  // kObjectiveCount matrices, n_o x n_u
  unsigned objectives = 0;
  std::vector<CellFailure> failures;

  /// theta_u maximizing the objective for each theta_o (NaN for all-NaN columns).
  std::vector<double> best_unobserved_phase(int objective) const;
  /// theta_o maximizing the objective for each theta_u.
  std::vector<double> best_observed_phase(int objective) const;
};

/// Index of the maximum of `values`, ties (within 1e-12) going to the smallest index;
/// -1 if every entry is NaN.
int argmax_first(const std::vector<double>& values);

/// |a - b| modulo pi, in [0, pi/2].
double phase_distance(double a, double b);

/// OpenMP-parallel over grid cells.
ScanResult scan(const ScanSpec& spec);
/// Serial reference for `scan`.
ScanResult scan_serial(const ScanSpec& spec);

struct HypothesisDistance {
  double mean = NAN;
  double max = NAN;
  double fraction_within_10deg = NAN;
  int columns = 0;
};

/// Compares best_unobserved_phase of `objective` with that of the RPR, over columns
/// where both are defined.
HypothesisDistance hypothesis_distance(const ScanResult& result, int objective);

// ---------------------------------------------------------------------------
// Efficiency sweep (OPO, eta_u = 1 - eta_o)

struct SweepRow {
  double theta_o = 0.0;
  double eta_o = 0.0;
  double theta_u_numeric = NAN;
  double theta_u_hyp_a = NAN;
  double theta_u_hyp_c = NAN;
  double rpr_numeric = NAN;  // max over the theta_u grid
  double rpr_hyp_a = NAN;
  double rpr_hyp_c = NAN;
};

struct SweepSpec {
  std::vector<double> theta_o{M_PI / 8.0, 3.0 * M_PI / 8.0};
  std::vector<double> eta_o{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  PhaseGrid theta_u{-M_PI / 2.0, 180};
  double hbar = 2.0;
  FixedPointOptions fixed_point;
};

/// Throws DomainError for eta_o outside (0, 1).
std::vector<SweepRow> efficiency_sweep(const SweepSpec& spec);
std::vector<SweepRow> efficiency_sweep_serial(const SweepSpec& spec);

}  // namespace lgqs
