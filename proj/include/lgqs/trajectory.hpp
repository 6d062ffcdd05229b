#pragma once

#include <cstdint>
#include <vector>

#include "lgqs/estimators.hpp"
#include "lgqs/gaussian.hpp"
#include "lgqs/model.hpp"
#include "lgqs/parallel.hpp"

namespace lgqs {

enum class ObserverTag { Observed, Unobserved };

/// Measurement record stored as Ito increments y dt on a uniform grid.
struct Record {
  double t0 = 0.0;
  double dt = 0.0;
  int n_steps = 0;
  int channels = 0;
  std::vector<double> increments;  // n_steps x channels, row-major
  std::uint64_t seed = 0;
  ObserverTag tag = ObserverTag::Observed;

  Vec increment(int step) const;
  void set_increment(int step, const Vec& ydt);
};

/// Throws ShapeError/DomainError on length mismatch or non-finite increments.
void validate(const Record& record);

struct TrueRun {
  std::vector<GaussianState> states;  // n_steps + 1 grid points
  Record observed;
  Record unobserved;
};

struct SimulationOptions {
  std::uint64_t trajectory_index = 0;
  bool zero_noise = false;  // dw = 0 on every channel
};

/// Number of grid steps for horizon T; throws DomainError if T/dt is not integral.
int grid_steps(double T, double dt);

/// Draws the observed and unobserved records from the true-state dynamics.
/// Streams are keyed by (seed, trajectory_index, channel).
TrueRun simulate_true(const LgqModel& model, const GaussianState& initial, double T, double dt,
                      std::uint64_t seed, const SimulationOptions& options = {});

struct TrajectoryBundle {
  std::vector<double> times;
  std::vector<GaussianState> unconditioned;
  std::vector<GaussianState> filtered;
  std::vector<GaussianState> true_state;
  std::vector<GaussianState> swv;
  std::vector<GaussianState> smoothed;
  std::vector<InfoEffect> retrofiltered;  // plain, Alice's record
  std::vector<InfoEffect> haloed;
  Record observed;
  Record unobserved;
  double min_haloed_filtered_eig = 0.0;  // min over the grid of eig(V_F - V_T)
  double min_haloed_retro_margin = 0.0;  // see haloed_retro_margin
};

/// Replays both records through every estimator: forward passes for the
/// unconditioned, filtered and true states, backward passes for the plain and haloed
/// retrofilters, then SWV and smoothed combinations on every grid point.
TrajectoryBundle replay_all(const LgqModel& model, const Record& observed, const Record& unobserved,
                            const GaussianState& initial);

/// Simulates and replays trajectories 0..n-1 of `seed` and returns f(index, bundle) for
/// each, index-ordered. Runs on the OpenMP team unless `parallel` is false; the result
/// does not depend on the thread count.
template <class F>
auto map_trajectories(const LgqModel& model, const GaussianState& initial, double T, double dt,
                      std::uint64_t seed, std::size_t n, F&& f, bool parallel = true) {
  auto one = [&](std::size_t i) {
    SimulationOptions opt;
    opt.trajectory_index = i;
    const TrueRun run = simulate_true(model, initial, T, dt, seed, opt);
    const TrajectoryBundle bundle = replay_all(model, run.observed, run.unobserved, initial);
    return f(i, bundle);
  };
  return parallel ? parallel_map(n, one) : serial_map(n, one);
}

/// Default trajectory starting point: zero mean, V0 = (hbar/2) diag(10, 1/2).
GaussianState fig2_initial_state(double hbar = kDefaultHbar);

}  // namespace lgqs
