#include "lgqs/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lgqs/errors.hpp"
#include "lgqs/rng.hpp"

namespace lgqs {

namespace {

// stream channel ids: observer in the high bits, channel index in the low bits
constexpr std::uint64_t kUnobservedStreamBase = 1ULL << 32;

Record empty_record(int n_steps, int channels, double dt, std::uint64_t seed, ObserverTag tag) {
  Record r;
  r.dt = dt;
  r.n_steps = n_steps;
  r.channels = channels;
  r.increments.assign(static_cast<std::size_t>(n_steps) * static_cast<std::size_t>(channels), 0.0);
  r.seed = seed;
  r.tag = tag;
  return r;
}

}  // namespace

Vec Record::increment(int step) const {
  Vec v(channels);
  const auto base = static_cast<std::size_t>(step) * static_cast<std::size_t>(channels);
  for (int c = 0; c < channels; ++c) v(c) = increments[base + static_cast<std::size_t>(c)];
  return v;
}

void Record::set_increment(int step, const Vec& ydt) {
  const auto base = static_cast<std::size_t>(step) * static_cast<std::size_t>(channels);
  for (int c = 0; c < channels; ++c) increments[base + static_cast<std::size_t>(c)] = ydt(c);
}

void validate(const Record& record) {
  if (record.n_steps < 0 || record.channels < 0 || !(record.dt > 0.0))
    throw DomainError("record: invalid grid");
  if (record.increments.size() !=
      static_cast<std::size_t>(record.n_steps) * static_cast<std::size_t>(record.channels))
    throw ShapeError("record: increment array length does not match n_steps x channels");
  for (double v : record.increments)
    if (!std::isfinite(v)) throw DomainError("record: non-finite increment");
}

int grid_steps(double T, double dt) {
  if (!(dt > 0.0) || !(T > 0.0)) throw DomainError("T and dt must be positive");
  const double ratio = T / dt;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio)) throw DomainError("T/dt must be an integer");
  return static_cast<int>(n);
}

GaussianState fig2_initial_state(double hbar) {
  GaussianState s;
  s.hbar = hbar;
  s.mean = Vec::Zero(2);
  s.cov = Mat::Zero(2, 2);
  s.cov(0, 0) = hbar / 2.0 * 10.0;
  s.cov(1, 1) = hbar / 2.0 * 0.5;
  return s;
}

TrueRun simulate_true(const LgqModel& model, const GaussianState& initial, double T, double dt,
                      std::uint64_t seed, const SimulationOptions& options) {
  validate(initial);
  if (initial.dim() != model.dim()) throw ShapeError("simulate_true: initial state dimension mismatch");
  const int n = grid_steps(T, dt);
  const int no = static_cast<int>(model.observed.C.rows());
  const int nu = static_cast<int>(model.unobserved.C.rows());

  std::vector<WienerStream> streams;
  for (int c = 0; c < no; ++c) streams.emplace_back(seed, options.trajectory_index, c, dt);
  for (int c = 0; c < nu; ++c) streams.emplace_back(seed, options.trajectory_index, kUnobservedStreamBase + c, dt);

  TrueRun run;
  run.observed = empty_record(n, no, dt, seed, ObserverTag::Observed);
  run.unobserved = empty_record(n, nu, dt, seed, ObserverTag::Unobserved);
  run.states.reserve(static_cast<std::size_t>(n) + 1);
  run.states.push_back(initial);

  Vec dwo(no), dwu(nu);
  for (int k = 0; k < n; ++k) {
    const GaussianState& s = run.states.back();
    for (int c = 0; c < no; ++c) dwo(c) = options.zero_noise ? 0.0 : streams[static_cast<std::size_t>(c)]();
    for (int c = 0; c < nu; ++c) dwu(c) = options.zero_noise ? 0.0 : streams[static_cast<std::size_t>(no + c)]();
    const Vec yo = model.observed.C * s.mean * dt + dwo;
    const Vec yu = model.unobserved.C * s.mean * dt + dwu;
    run.observed.set_increment(k, yo);
    run.unobserved.set_increment(k, yu);
    run.states.push_back(true_step(s, model, yo, yu, dt));
  }
  return run;
}

TrajectoryBundle replay_all(const LgqModel& model, const Record& observed, const Record& unobserved,
                            const GaussianState& initial) {
  validate(observed);
  validate(unobserved);
  validate(initial);
  if (observed.n_steps != unobserved.n_steps || observed.dt != unobserved.dt || observed.t0 != unobserved.t0)
    throw ShapeError("replay_all: records are on different grids");
  if (observed.channels != model.observed.C.rows() || unobserved.channels != model.unobserved.C.rows())
    throw ShapeError("replay_all: record channel count does not match model");
  const int n = observed.n_steps;
  const double dt = observed.dt;
  const auto size = static_cast<std::size_t>(n) + 1;

  TrajectoryBundle b;
  b.observed = observed;
  b.unobserved = unobserved;
  b.times.resize(size);
  for (std::size_t k = 0; k < size; ++k) b.times[k] = observed.t0 + static_cast<double>(k) * dt;

  b.unconditioned.reserve(size);
  b.filtered.reserve(size);
  b.true_state.reserve(size);
  b.unconditioned.push_back(initial);
  b.filtered.push_back(initial);
  b.true_state.push_back(initial);
  for (int k = 0; k < n; ++k) {
    const Vec yo = observed.increment(k);
    const Vec yu = unobserved.increment(k);
    b.unconditioned.push_back(unconditioned_step(b.unconditioned.back(), model, dt));
    b.filtered.push_back(filtered_step(b.filtered.back(), model, yo, dt));
    b.true_state.push_back(true_step(b.true_state.back(), model, yo, yu, dt));
  }

  const int dim = model.dim();
  const LgSystem obs_sys = model.observed_system();
  b.retrofiltered.assign(size, InfoEffect::uninformative(dim));
  b.haloed.assign(size, InfoEffect::uninformative(dim));
  for (int k = n - 1; k >= 0; --k) {
    const auto ku = static_cast<std::size_t>(k);
    const Vec yo = observed.increment(k);
    b.retrofiltered[ku] = retrofilter_info_step(b.retrofiltered[ku + 1], obs_sys, yo, dt);
    b.haloed[ku] = haloed_retrofilter_step(b.haloed[ku + 1], model, b.true_state[ku + 1].cov, yo, dt);
  }

  b.swv.reserve(size);
  b.smoothed.reserve(size);
  b.min_haloed_filtered_eig = std::numeric_limits<double>::infinity();
  b.min_haloed_retro_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < size; ++k) {
    const Mat& vt = b.true_state[k].cov;
    b.swv.push_back(swv_combine(b.filtered[k], b.retrofiltered[k]));
    b.smoothed.push_back(smoothed_combine(b.filtered[k], b.haloed[k], vt));
    b.min_haloed_filtered_eig = std::min(b.min_haloed_filtered_eig, min_eigenvalue(b.filtered[k].cov - vt));
    b.min_haloed_retro_margin = std::min(b.min_haloed_retro_margin, haloed_retro_margin(b.haloed[k], vt));
  }
  return b;
}

}  // namespace lgqs
