#include "lgqs/qubit.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <string>

#include "lgqs/errors.hpp"
#include "lgqs/parallel.hpp"
#include "lgqs/rng.hpp"

namespace lgqs {

namespace {

using C2 = Eigen::Matrix2cd;
using V4 = Eigen::Vector4d;
constexpr std::complex<double> kI{0.0, 1.0};

const std::array<C2, 4>& pauli() {
  static const std::array<C2, 4> p = [] {
    std::array<C2, 4> s;
    s[0] = C2::Identity();
    s[1] << 0.0, 1.0, 1.0, 0.0;
    s[2] << 0.0, -kI, kI, 0.0;
    s[3] << 1.0, 0.0, 0.0, -1.0;
    return s;
  }();
  return p;
}

C2 lowering() {
  C2 m = C2::Zero();
  m(1, 0) = 1.0;
  return m;
}

// Matrix of rho -> f(rho) on Pauli vectors, v_j = Tr[sigma_j rho].
template <class F>
Eigen::Matrix4d pauli_matrix(F&& f) {
  Eigen::Matrix4d out;
  for (int k = 0; k < 4; ++k) {
    const C2 image = f(C2(0.5 * pauli()[static_cast<std::size_t>(k)]));
    for (int j = 0; j < 4; ++j) out(j, k) = (pauli()[static_cast<std::size_t>(j)] * image).trace().real();
  }
  return out;
}

V4 to_pauli(const C2& rho) {
  V4 v;
  for (int j = 0; j < 4; ++j) v(j) = (pauli()[static_cast<std::size_t>(j)] * rho).trace().real();
  return v;
}

C2 from_pauli(const V4& v) {
  C2 rho = C2::Zero();
  for (int j = 0; j < 4; ++j) rho += 0.5 * v(j) * pauli()[static_cast<std::size_t>(j)];
  return rho;
}

bool on_phase_set(double theta) {
  return std::abs(theta) <= 1e-12 || std::abs(theta - M_PI / 2.0) <= 1e-12;
}

int phase_steps(double t, double dt, const char* what) {
  const double n = t / dt;
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-6 * std::max(1.0, r))
    throw DomainError(std::string("qubit config: ") + what + " is not on the time grid");
  return static_cast<int>(r);
}

struct Neumaier {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      c += (sum - t) + x;
    else
      c += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

void check_trace(double tau) {
  if (!(tau > 1e-300) || !std::isfinite(tau)) throw NumericalError("qubit: trace collapse in linear state");
}

double purity_of(const Eigen::Vector3d& r) { return 0.5 * (1.0 + r.squaredNorm()); }

constexpr std::array<double, 2> kPhases = {0.0, M_PI / 2.0};

}  // namespace

QubitState QubitState::from_bloch(const Eigen::Vector3d& r, double trace) {
  QubitState s;
  s.rho = from_pauli(V4(trace, trace * r(0), trace * r(1), trace * r(2)));
  return s;
}

QubitState QubitState::ground() { return from_bloch(Eigen::Vector3d(0.0, 0.0, -1.0)); }

QubitState QubitState::excited() { return from_bloch(Eigen::Vector3d(0.0, 0.0, 1.0)); }

Eigen::Vector3d QubitState::bloch() const {
  const V4 v = to_pauli(rho);
  return v.tail<3>() / v(0);
}

double QubitState::purity() const { return purity_of(bloch()); }

void validate(const QubitState& state) {
  if (!state.rho.allFinite()) throw DomainError("qubit state: non-finite entries");
  if ((state.rho - state.rho.adjoint()).norm() > 1e-12 * std::max(1.0, state.rho.norm()))
    throw DomainError("qubit state: rho is not Hermitian");
  if (!(state.trace() > 0.0)) throw DomainError("qubit state: non-positive trace");
  if (state.bloch().norm() > 1.0 + 1e-9) throw DomainError("qubit state: Bloch vector outside the ball");
}

void validate(const QubitConfig& c) {
  if (!(c.gamma > 0.0) || !std::isfinite(c.omega)) throw DomainError("qubit config: need gamma > 0, finite Omega");
  if (!(c.eta_o >= 0.0) || !(c.eta_u >= 0.0) || c.eta_o + c.eta_u > 1.0 + 1e-12)
    throw DomainError("qubit config: need eta_o, eta_u >= 0 and eta_o + eta_u <= 1");
  if (!on_phase_set(c.theta_o) || !on_phase_set(c.theta_u))
    throw DomainError("qubit config: homodyne phases must be 0 or pi/2");
  if (!(c.dt > 0.0) || !(c.T > 0.0)) throw DomainError("qubit config: need T, dt > 0");
  grid_steps(c.T, c.dt);
  if (!(c.window_start >= 0.0) || !(c.window_start < c.window_end) || c.window_end > c.T + 1e-12)
    throw DomainError("qubit config: steady window must satisfy 0 <= start < end <= T");
  phase_steps(c.window_start, c.dt, "window_start");
  phase_steps(c.window_end, c.dt, "window_end");
}

std::pair<int, int> window_indices(const QubitConfig& c) {
  return {phase_steps(c.window_start, c.dt, "window_start"), phase_steps(c.window_end, c.dt, "window_end")};
}

Eigen::RowVector3d qubit_measurement_row(double theta) {
  const std::complex<double> e = homodyne_phase(theta);
  return Eigen::RowVector3d(e.real(), e.imag(), 0.0);
}

double qubit_photocurrent(const QubitState& state, const QubitConfig& c, ObserverTag observer, double dw, double dt) {
  const bool o = observer == ObserverTag::Observed;
  const double eta = o ? c.eta_o : c.eta_u;
  const double theta = o ? c.theta_o : c.theta_u;
  return std::sqrt(c.gamma * eta) * qubit_measurement_row(theta).dot(state.bloch()) * dt + dw;
}

QubitStepMaps qubit_step_maps(const QubitConfig& c, Monitored monitored) {
  const double dt = c.dt;
  const bool use_o = monitored == Monitored::Both || monitored == Monitored::ObservedOnly;
  const bool use_u = monitored == Monitored::Both || monitored == Monitored::UnobservedOnly;
  const C2 sm = lowering();
  const C2 lo = use_o ? C2(std::sqrt(c.gamma * c.eta_o) * homodyne_phase(c.theta_o) * sm) : C2(C2::Zero());
  const C2 lu = use_u ? C2(std::sqrt(c.gamma * c.eta_u) * homodyne_phase(c.theta_u) * sm) : C2(C2::Zero());
  const C2 m0 = C2::Identity() + kI * (0.5 * c.omega * dt) * pauli()[1] - (0.5 * c.gamma * dt) * (sm.adjoint() * sm);
  const double kappa = (1.0 - (use_o ? c.eta_o : 0.0) - (use_u ? c.eta_u : 0.0)) * c.gamma * dt;

  QubitStepMaps maps;
  maps.P[0] = pauli_matrix([&](const C2& r) -> C2 {
    return m0 * r * m0.adjoint() + kappa * sm * r * sm.adjoint();
  });
  maps.P[1] = pauli_matrix([&](const C2& r) -> C2 { return lo * r * m0.adjoint() + m0 * r * lo.adjoint(); });
  maps.P[2] = pauli_matrix([&](const C2& r) -> C2 { return lu * r * m0.adjoint() + m0 * r * lu.adjoint(); });
  maps.P[3] = pauli_matrix([&](const C2& r) -> C2 { return lo * r * lo.adjoint(); });
  maps.P[4] = pauli_matrix([&](const C2& r) -> C2 { return lu * r * lu.adjoint(); });
  maps.P[5] = pauli_matrix([&](const C2& r) -> C2 { return lo * r * lu.adjoint() + lu * r * lo.adjoint(); });
  return maps;
}

QubitState qubit_true_step(const QubitState& state, const QubitConfig& config, double dw_o, double dw_u, double dt) {
  if (!(dt > 0.0)) throw DomainError("qubit_true_step: dt must be positive");
  QubitConfig c = config;
  c.dt = dt;
  const double a = qubit_photocurrent(state, c, ObserverTag::Observed, dw_o, dt);
  const double b = qubit_photocurrent(state, c, ObserverTag::Unobserved, dw_u, dt);
  const V4 v = qubit_step_maps(c, Monitored::Both).at(a, b) * (to_pauli(state.rho) / state.trace());
  check_trace(v(0));
  QubitState out;
  out.rho = from_pauli(v / v(0));
  return out;
}

QubitRun simulate_qubit(const QubitConfig& c, std::uint64_t seed, std::uint64_t index, Monitored monitored,
                        int last_step) {
  validate(c);
  const int n = grid_steps(c.T, c.dt);
  const int steps = last_step < 0 ? n : std::min(last_step, n);
  const bool use_o = monitored == Monitored::Both || monitored == Monitored::ObservedOnly;
  const bool use_u = monitored == Monitored::Both || monitored == Monitored::UnobservedOnly;
  const QubitStepMaps maps = qubit_step_maps(c, monitored);
  const Eigen::RowVector3d co = std::sqrt(c.gamma * c.eta_o) * qubit_measurement_row(c.theta_o);
  const Eigen::RowVector3d cu = std::sqrt(c.gamma * c.eta_u) * qubit_measurement_row(c.theta_u);
  WienerStream wo(seed, index, 0, c.dt);
  WienerStream wu(seed, index, 1, c.dt);

  QubitRun run;
  auto init_record = [&](Record& r, bool used, ObserverTag tag) {
    r.t0 = 0.0;
    r.dt = c.dt;
    r.n_steps = steps;
    r.channels = used ? 1 : 0;
    r.seed = seed;
    r.tag = tag;
    r.increments.assign(used ? static_cast<std::size_t>(steps) : 0u, 0.0);
  };
  init_record(run.observed, use_o, ObserverTag::Observed);
  init_record(run.unobserved, use_u, ObserverTag::Unobserved);
  run.bloch.resize(static_cast<std::size_t>(steps) + 1);
  V4 v(1.0, 0.0, 0.0, -1.0);
  run.bloch[0] = v.tail<3>();
  for (int i = 0; i < steps; ++i) {
    const Eigen::Vector3d r = v.tail<3>();
    const double a = use_o ? co.dot(r) * c.dt + wo() : 0.0;
    const double b = use_u ? cu.dot(r) * c.dt + wu() : 0.0;
    if (use_o) run.observed.increments[static_cast<std::size_t>(i)] = a;
    if (use_u) run.unobserved.increments[static_cast<std::size_t>(i)] = b;
    v = maps.at(a, b) * v;
    check_trace(v(0));
    v /= v(0);
    run.bloch[static_cast<std::size_t>(i) + 1] = v.tail<3>();
  }
  return run;
}

std::vector<Eigen::Vector3d> qubit_direct_filter(const Record& observed, const QubitConfig& c) {
  validate(c);
  validate(observed);
  if (observed.channels != 1) throw ShapeError("qubit_direct_filter: record must have one channel");
  const QubitStepMaps maps = qubit_step_maps(c, Monitored::ObservedOnly);
  std::vector<Eigen::Vector3d> out(static_cast<std::size_t>(observed.n_steps) + 1);
  V4 v(1.0, 0.0, 0.0, -1.0);
  out[0] = v.tail<3>();
  for (int i = 0; i < observed.n_steps; ++i) {
    v = maps.at(observed.increments[static_cast<std::size_t>(i)], 0.0) * v;
    check_trace(v(0));
    v /= v(0);
    out[static_cast<std::size_t>(i) + 1] = v.tail<3>();
  }
  return out;
}

namespace {

// Candidate increments for steps [first, first + count), layout [step][candidate].
using NoiseFill = std::function<void(int first, int count, double* out)>;

constexpr std::uint64_t kCandidateChannel = 2;

SmoothingOutput smooth_impl(const Record& observed, const QubitConfig& c, int n, const NoiseFill& fill,
                            bool parallel) {
  validate(c);
  validate(observed);
  if (observed.channels != 1) throw ShapeError("ensemble_smooth: record must have one channel");
  if (n < 1) throw DomainError("ensemble_smooth: need at least one candidate");
  const auto [i0, i1] = window_indices(c);
  const int n_total = grid_steps(c.T, c.dt);
  if (observed.n_steps != n_total)
    throw ShapeError("ensemble_smooth: record length does not match T/dt");
  const auto& y = observed.increments;

  // Retrofiltered effect on the window, normalized so that e(0) = 1.
  const QubitStepMaps alice = qubit_step_maps(c, Monitored::ObservedOnly);
  std::vector<V4> effect(static_cast<std::size_t>(i1 - i0 + 1));
  V4 e(1.0, 0.0, 0.0, 0.0);
  for (int i = n_total; i >= i0; --i) {
    if (i <= i1) effect[static_cast<std::size_t>(i - i0)] = e;
    if (i > i0) {
      e = alice.at(y[static_cast<std::size_t>(i - 1)], 0.0).transpose() * e;
      if (!(e(0) > 0.0) || !e.allFinite()) throw NumericalError("ensemble_smooth: effect collapsed");
      e /= e(0);
    }
  }

  const QubitStepMaps both = qubit_step_maps(c, Monitored::Both);
  const auto nn = static_cast<std::size_t>(n);
  std::vector<double> x(nn, 0.0), yy(nn, 0.0), z(nn, -1.0), logw(nn, 0.0), scale(nn, 1.0);
  std::vector<double> wf(nn), ws(nn);

  SmoothingOutput out;
  const auto n_win = static_cast<std::size_t>(i1 - i0 + 1);
  out.times.resize(n_win);
  out.filtered.resize(n_win);
  out.smoothed.resize(n_win);
  out.min_ess_filtered = std::numeric_limits<double>::infinity();
  out.min_ess_smoothed = std::numeric_limits<double>::infinity();

  auto flush = [&] {
    for (std::size_t k = 0; k < nn; ++k) {
      logw[k] += std::log(scale[k]);
      scale[k] = 1.0;
    }
  };

  constexpr int kBlock = 256;
  std::vector<double> noise(static_cast<std::size_t>(kBlock) * nn);
  int block_first = 0;
  int block_count = 0;
  bool failed = false;

  for (int i = 0; i <= i1; ++i) {
    if (i >= i0) {
      flush();
      const double m = *std::max_element(logw.begin(), logw.end());
      const V4& ew = effect[static_cast<std::size_t>(i - i0)];
      Neumaier sf, ss, sf2, ss2;
      std::array<Neumaier, 3> rf, rs;
      for (std::size_t k = 0; k < nn; ++k) {
        const double w = std::exp(logw[k] - m);
        const double lik = ew(0) + ew(1) * x[k] + ew(2) * yy[k] + ew(3) * z[k];
        const double w2 = w * std::max(lik, 0.0);
        sf.add(w);
        ss.add(w2);
        sf2.add(w * w);
        ss2.add(w2 * w2);
        rf[0].add(w * x[k]);
        rf[1].add(w * yy[k]);
        rf[2].add(w * z[k]);
        rs[0].add(w2 * x[k]);
        rs[1].add(w2 * yy[k]);
        rs[2].add(w2 * z[k]);
      }
      const auto j = static_cast<std::size_t>(i - i0);
      out.times[j] = i * c.dt;
      if (!(ss.value() > 0.0)) throw NumericalError("ensemble_smooth: smoothed weights vanished");
      for (int d = 0; d < 3; ++d) {
        out.filtered[j](d) = rf[static_cast<std::size_t>(d)].value() / sf.value();
        out.smoothed[j](d) = rs[static_cast<std::size_t>(d)].value() / ss.value();
      }
      out.min_ess_filtered = std::min(out.min_ess_filtered, sf.value() * sf.value() / sf2.value());
      out.min_ess_smoothed = std::min(out.min_ess_smoothed, ss.value() * ss.value() / ss2.value());
    }
    if (i == i1) break;

    if (i >= block_first + block_count) {
      block_first = i;
      block_count = std::min(kBlock, i1 - i);
      fill(block_first, block_count, noise.data());
    }
    const double* b_row = noise.data() + static_cast<std::size_t>(i - block_first) * nn;
    const double a = y[static_cast<std::size_t>(i)];
    const Eigen::Matrix4d q = both.P[0] + a * both.P[1] + a * a * both.P[3];
    const Eigen::Matrix4d r = both.P[2] + a * both.P[5];
    const Eigen::Matrix4d& s = both.P[4];
    const long count = static_cast<long>(n);
#pragma omp parallel for schedule(static) if (parallel && count >= 2048)
    for (long kk = 0; kk < count; ++kk) {
      const auto k = static_cast<std::size_t>(kk);
      const double b = b_row[k];
      const double bb = b * b;
      double v[4];
      for (int row = 0; row < 4; ++row) {
        const double w0 = q(row, 0) + b * r(row, 0) + bb * s(row, 0);
        const double w1 = q(row, 1) + b * r(row, 1) + bb * s(row, 1);
        const double w2 = q(row, 2) + b * r(row, 2) + bb * s(row, 2);
        const double w3 = q(row, 3) + b * r(row, 3) + bb * s(row, 3);
        v[row] = w0 + w1 * x[k] + w2 * yy[k] + w3 * z[k];
      }
      const double tau = v[0];
      if (!(tau > 1e-300) || !std::isfinite(tau)) failed = true;
      const double inv = 1.0 / tau;
      x[k] = v[1] * inv;
      yy[k] = v[2] * inv;
      z[k] = v[3] * inv;
      scale[k] *= tau;
    }
    if (failed) throw NumericalError("ensemble_smooth: trace collapse in linear state");
    if ((i & 31) == 31) flush();
  }
  out.low_ess = std::min(out.min_ess_filtered, out.min_ess_smoothed) < 10.0;
  return out;
}

NoiseFill streaming_noise(int n, std::uint64_t seed, double dt) {
  auto streams = std::make_shared<std::vector<WienerStream>>();
  streams->reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) streams->emplace_back(seed, static_cast<std::uint64_t>(k), kCandidateChannel, dt);
  return [streams, n](int, int count, double* out) {
    for (int k = 0; k < n; ++k) {
      WienerStream& w = (*streams)[static_cast<std::size_t>(k)];
      for (int s = 0; s < count; ++s) out[static_cast<std::size_t>(s) * static_cast<std::size_t>(n) + k] = w();
    }
  };
}

// Whole candidate pool, shared read-only across observed records.
struct CandidatePool {
  int n = 0;
  int steps = 0;
  std::vector<double> data;  // [step][candidate]

  CandidatePool(int n_candidates, int n_steps, std::uint64_t seed, double dt) : n(n_candidates), steps(n_steps) {
    data.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(steps));
    NoiseFill fill = streaming_noise(n, seed, dt);
    fill(0, steps, data.data());
  }

  NoiseFill view() const {
    return [this](int first, int count, double* out) {
      std::copy_n(data.data() + static_cast<std::size_t>(first) * static_cast<std::size_t>(n),
                  static_cast<std::size_t>(count) * static_cast<std::size_t>(n), out);
    };
  }
};

}  // namespace

SmoothingOutput ensemble_smooth(const Record& observed, const QubitConfig& config, int n_unobserved,
                                std::uint64_t candidate_seed, bool parallel) {
  if (n_unobserved < 1) throw DomainError("ensemble_smooth: need at least one candidate");
  return smooth_impl(observed, config, n_unobserved, streaming_noise(n_unobserved, candidate_seed, config.dt),
                     parallel);
}

Eigen::Matrix3d qubit_kick_tensor(const QubitConfig& c, ObserverTag observer, int n_records, std::uint64_t seed) {
  validate(c);
  if (n_records < 1) throw DomainError("qubit_kick_tensor: need at least one record");
  const auto [i0, i1] = window_indices(c);
  const Monitored mon = observer == ObserverTag::Observed ? Monitored::ObservedOnly : Monitored::UnobservedOnly;
  const auto parts = parallel_map(static_cast<std::size_t>(n_records), [&](std::size_t rec) {
    const QubitRun run = simulate_qubit(c, seed, rec, mon, i1);
    Eigen::Matrix3d b = Eigen::Matrix3d::Zero();
    for (int i = i0; i < i1; ++i) {
      const Eigen::Vector3d d = run.bloch[static_cast<std::size_t>(i) + 1] - run.bloch[static_cast<std::size_t>(i)];
      b += d * d.transpose();
    }
    return b;
  });
  Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
  for (const auto& p : parts) sum += p;
  return sum / (static_cast<double>(n_records) * (i1 - i0) * c.dt);
}

HypothesisTables hypothesis_tables(const QubitConfig& config, int n_records, std::uint64_t seed) {
  HypothesisTables t;
  for (int p = 0; p < 2; ++p) {
    QubitConfig c = config;
    c.theta_o = kPhases[static_cast<std::size_t>(p)];
    c.theta_u = kPhases[static_cast<std::size_t>(p)];
    t.kick_observed[static_cast<std::size_t>(p)] =
        qubit_kick_tensor(c, ObserverTag::Observed, n_records, stream_seed(seed, static_cast<std::uint64_t>(p), 0xB0));
    t.kick_unobserved[static_cast<std::size_t>(p)] = qubit_kick_tensor(
        c, ObserverTag::Unobserved, n_records, stream_seed(seed, static_cast<std::uint64_t>(p), 0xB1));
  }
  for (int io = 0; io < 2; ++io) {
    for (int iu = 0; iu < 2; ++iu) {
      const Eigen::RowVector3d co = qubit_measurement_row(kPhases[static_cast<std::size_t>(io)]);
      const Eigen::RowVector3d cu = qubit_measurement_row(kPhases[static_cast<std::size_t>(iu)]);
      const double overlap = co.dot(cu);
      t.a(io, iu) = overlap * overlap;
      t.b(io, iu) = co * t.kick_unobserved[static_cast<std::size_t>(iu)] * co.transpose();
      t.c(io, iu) = cu * t.kick_observed[static_cast<std::size_t>(io)] * cu.transpose();
    }
  }
  return t;
}

namespace {

struct RecordPurities {
  double filtered = 0.0;
  double smoothed = 0.0;
  double truth = 0.0;
  double min_ess = 0.0;
  bool low_ess = false;
};

double window_mean_purity(const std::vector<Eigen::Vector3d>& r) {
  Neumaier s;
  for (const auto& v : r) s.add(purity_of(v));
  return s.value() / static_cast<double>(r.size());
}

template <class Map>
RaprTable rapr_impl(const QubitConfig& config, const RaprOptions& opt, Map&& map) {
  validate(config);
  if (opt.n_observed < 2 || opt.n_unobserved < 1) throw DomainError("rapr_table: ensembles too small");
  if (!(opt.ci_level > 0.0 && opt.ci_level < 1.0)) throw DomainError("rapr_table: ci_level must lie in (0, 1)");
  const auto [i0, i1] = window_indices(config);
  const std::uint64_t cand_seed = stream_seed(opt.seed, 0xCA4D, 0);

  std::unique_ptr<CandidatePool> pool;
  constexpr double kMaxPoolEntries = 3.2e7;
  if (static_cast<double>(opt.n_unobserved) * i1 <= kMaxPoolEntries)
    pool = std::make_unique<CandidatePool>(opt.n_unobserved, i1, cand_seed, config.dt);

  RaprTable table;
  table.n_observed = opt.n_observed;
  table.n_unobserved = opt.n_unobserved;
  for (int io = 0; io < 2; ++io) {
    for (int iu = 0; iu < 2; ++iu) {
      QubitConfig c = config;
      c.theta_o = kPhases[static_cast<std::size_t>(io)];
      c.theta_u = kPhases[static_cast<std::size_t>(iu)];
      const auto per = map(static_cast<std::size_t>(opt.n_observed), [&](std::size_t rec) {
        QubitRun run = simulate_qubit(c, opt.seed, rec, Monitored::Both);
        RecordPurities p;
        p.truth = window_mean_purity(std::vector<Eigen::Vector3d>(run.bloch.begin() + i0, run.bloch.begin() + i1 + 1));
        const NoiseFill fill = pool ? pool->view() : streaming_noise(opt.n_unobserved, cand_seed, c.dt);
        const SmoothingOutput s = smooth_impl(run.observed, c, opt.n_unobserved, fill, false);
        p.filtered = window_mean_purity(s.filtered);
        p.smoothed = window_mean_purity(s.smoothed);
        p.min_ess = std::min(s.min_ess_filtered, s.min_ess_smoothed);
        p.low_ess = s.low_ess;
        return p;
      });

      auto ratio = [&](const std::vector<std::size_t>& idx) {
        Neumaier f, s, t;
        for (std::size_t k : idx) {
          f.add(per[k].filtered);
          s.add(per[k].smoothed);
          t.add(per[k].truth);
        }
        const double den = t.value() - f.value();
        return std::array<double, 4>{(s.value() - f.value()) / den, f.value(), s.value(), t.value()};
      };
      std::vector<std::size_t> all(per.size());
      std::iota(all.begin(), all.end(), std::size_t{0});
      const auto full = ratio(all);
      const double nrec = static_cast<double>(per.size());
      if (!(full[3] - full[1] > 0.0))
        throw NumericalError("rapr_table: true purity does not exceed filtered purity");

      RaprCell& cell = table.cells[static_cast<std::size_t>(io)][static_cast<std::size_t>(iu)];
      cell.r = full[0];
      cell.purity_filtered = full[1] / nrec;
      cell.purity_smoothed = full[2] / nrec;
      cell.purity_true = full[3] / nrec;
      cell.min_ess = std::numeric_limits<double>::infinity();
      for (const auto& p : per) {
        cell.min_ess = std::min(cell.min_ess, p.min_ess);
        cell.low_ess_records += p.low_ess ? 1 : 0;
      }

      SplitMix64 rng(stream_seed(opt.seed, static_cast<std::uint64_t>(2 * io + iu), 0xB007));
      std::uniform_int_distribution<std::size_t> pick(0, per.size() - 1);
      std::vector<double> boot;
      boot.reserve(static_cast<std::size_t>(opt.bootstrap_resamples));
      std::vector<std::size_t> idx(per.size());
      for (int b = 0; b < opt.bootstrap_resamples; ++b) {
        for (auto& k : idx) k = pick(rng);
        const double r = ratio(idx)[0];
        if (std::isfinite(r)) boot.push_back(r);
      }
      if (boot.empty()) {
        cell.ci_low = cell.ci_high = cell.r;
      } else {
        std::sort(boot.begin(), boot.end());
        auto quantile = [&](double q) {
          const double pos = q * static_cast<double>(boot.size() - 1);
          const auto lo = static_cast<std::size_t>(std::floor(pos));
          const auto hi = std::min(lo + 1, boot.size() - 1);
          return boot[lo] + (pos - static_cast<double>(lo)) * (boot[hi] - boot[lo]);
        };
        cell.ci_low = quantile(0.5 * (1.0 - opt.ci_level));
        cell.ci_high = quantile(0.5 * (1.0 + opt.ci_level));
      }
      table.r(io, iu) = cell.r;
    }
  }
  return table;
}

}  // namespace

RaprTable rapr_table(const QubitConfig& config, const RaprOptions& options) {
  return rapr_impl(config, options, [](std::size_t n, auto&& f) { return parallel_map(n, f); });
}

RaprTable rapr_table_serial(const QubitConfig& config, const RaprOptions& options) {
  return rapr_impl(config, options, [](std::size_t n, auto&& f) { return serial_map(n, f); });
}

std::array<int, 4> table_order(const QubitTable& t) {
  std::array<int, 4> idx{0, 1, 2, 3};
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return t(a / 2, a % 2) > t(b / 2, b % 2); });
  return idx;
}

}  // namespace lgqs
