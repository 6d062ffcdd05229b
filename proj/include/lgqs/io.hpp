#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "lgqs/config.hpp"
#include "lgqs/qubit.hpp"
#include "lgqs/strategy.hpp"
#include "lgqs/trajectory.hpp"

namespace lgqs {

/// Shortest round-trip form, at most 17 significant digits; "nan"/"inf" for non-finite values.
std::string format_double(double x);

/// One-standard-deviation ellipse of a 2x2 covariance; angle of the major axis in (-pi/2, pi/2].
struct Ellipse {
  double semi_major = 0.0;
  double semi_minor = 0.0;
  double angle = 0.0;
};
Ellipse covariance_ellipse(const Mat& cov2);

/// Purity or NaN when the covariance is not positive definite.
double purity_or_nan(const GaussianState& state);

/// One row per grid point: time, records, then mean, upper-triangle covariance and
/// purity of each estimator (unconditioned, filtered, true, swv, smoothed).
void write_trajectory_csv(std::ostream& out, const TrajectoryBundle& bundle);

/// Means and ellipse of mode 1 per estimator at the grid points nearest `times`.
/// Throws DomainError for times outside the grid.
void write_snapshot_csv(std::ostream& out, const TrajectoryBundle& bundle, const std::vector<double>& times);

/// Long format: one row per (theta_o, theta_u) cell with every objective.
void write_scan_csv(std::ostream& out, const ScanResult& result);
/// theta_o and the maximizing theta_u of every requested objective.
void write_argmax_csv(std::ostream& out, const ScanResult& result);
/// Hypothesis distances, failure list and grid sizes.
Json scan_summary(const ScanResult& result);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
Json sweep_summary(const std::vector<SweepRow>& rows);

Json table_json(const QubitTable& table);
Json hypothesis_tables_json(const HypothesisTables& tables);
Json rapr_table_json(const RaprTable& table);

/// Writes `text` to dir/name, creating dir. Throws std::runtime_error on I/O failure.
void write_file(const std::string& dir, const std::string& name, const std::string& text);

}  // namespace lgqs
