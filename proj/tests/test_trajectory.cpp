#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "lgqs/errors.hpp"
#include "lgqs/rng.hpp"
#include "lgqs/trajectory.hpp"

using namespace lgqs;
using namespace lgqs::test;

namespace {

const LgqModel& fig2_model() {
  static const LgqModel m = opo_model(0.5, M_PI / 4, 0.5, -M_PI / 8);
  return m;
}

}  // namespace

TEST_SUITE("trajectory") {

TEST_CASE("wiener increments have the right marginals") {
  const double dt = 1e-3;
  const int n = 1'000'000;
  WienerStream w(42, 0, 0, dt);
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = w();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 4.0 * std::sqrt(dt / n));
  CHECK(std::abs(sq / n - dt) < 0.05 * dt);
}

TEST_CASE("streams differ by trajectory and channel") {
  CHECK(stream_seed(1, 0, 0) != stream_seed(1, 0, 1));
  CHECK(stream_seed(1, 0, 0) != stream_seed(1, 1, 0));
  CHECK(stream_seed(1, 0, 0) != stream_seed(2, 0, 0));
}

TEST_CASE("grid steps") {
  CHECK(grid_steps(4.0, 1e-3) == 4000);
  CHECK(grid_steps(8.0, 1e-3) == 8000);
  CHECK_THROWS_AS(grid_steps(1.0, 0.3), DomainError);
}

TEST_CASE("noise-free static model keeps its mean") {
  LgqModel m = fig2_model();
  m.A = Mat::Zero(2, 2);
  GaussianState init = fig2_initial_state();
  init.mean = vec2(0.5, -1.0);
  SimulationOptions opt;
  opt.zero_noise = true;
  const TrueRun run = simulate_true(m, init, 1.0, 1e-3, 3, opt);
  for (const GaussianState& s : run.states) CHECK((s.mean - init.mean).norm() < 1e-12);
}

TEST_CASE("fixed seed reproduces records bit for bit") {
  const TrueRun a = simulate_true(fig2_model(), fig2_initial_state(), 1.0, 1e-3, 17);
  const TrueRun b = simulate_true(fig2_model(), fig2_initial_state(), 1.0, 1e-3, 17);
  const TrueRun c = simulate_true(fig2_model(), fig2_initial_state(), 1.0, 1e-3, 18);
  CHECK(a.observed.increments == b.observed.increments);
  CHECK(a.unobserved.increments == b.unobserved.increments);
  CHECK(a.observed.increments != c.observed.increments);
  CHECK_NOTHROW(validate(a.observed));
}

TEST_CASE("record validation") {
  Record r;
  r.dt = 1e-3;
  r.n_steps = 2;
  r.channels = 1;
  r.increments = {0.1};
  CHECK_THROWS(validate(r));
  r.increments = {0.1, NAN};
  CHECK_THROWS(validate(r));
}

TEST_CASE("true mean averages to zero") {
  const int n = 200;
  const auto finals = map_trajectories(fig2_model(), fig2_initial_state(), 4.0, 1e-3, 5, n,
                                       [](std::size_t, const TrajectoryBundle& b) { return b.true_state.back().mean; });
  for (int d = 0; d < 2; ++d) {
    double s = 0.0, sq = 0.0;
    for (const Vec& v : finals) {
      s += v(d);
      sq += v(d) * v(d);
    }
    const double mean = s / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    CHECK(std::abs(mean) < 3.0 * se);
  }
}

TEST_CASE("replay identities") {
  const TrueRun run = simulate_true(fig2_model(), fig2_initial_state(), 2.0, 1e-3, 9);
  const TrajectoryBundle b = replay_all(fig2_model(), run.observed, run.unobserved, fig2_initial_state());
  REQUIRE(b.times.size() == 2001);
  for (std::size_t k = 0; k < b.times.size(); ++k) {
    CHECK((b.true_state[k].mean - run.states[k].mean).norm() < 1e-12);
    CHECK((b.true_state[k].cov - run.states[k].cov).norm() < 1e-12);
  }
  const GaussianState& f = b.filtered.back();
  CHECK((b.smoothed.back().cov - f.cov).norm() < 1e-12);
  CHECK((b.smoothed.back().mean - f.mean).norm() < 1e-12);
  CHECK((b.swv.back().cov - f.cov).norm() < 1e-12);
  CHECK((b.swv.back().mean - f.mean).norm() < 1e-12);
  CHECK(b.min_haloed_filtered_eig > -1e-9);
}

TEST_CASE("without Bob every estimator is the filter") {
  const LgqModel m = opo_model(0.5, M_PI / 4, 0.0, 0.0);
  const TrueRun run = simulate_true(m, fig2_initial_state(), 1.0, 1e-3, 4);
  const TrajectoryBundle b = replay_all(m, run.observed, run.unobserved, fig2_initial_state());
  for (std::size_t k = 0; k < b.times.size(); ++k) {
    CHECK((b.true_state[k].mean - b.filtered[k].mean).norm() < 1e-12);
    CHECK((b.smoothed[k].mean - b.filtered[k].mean).norm() < 1e-12);
    CHECK((b.smoothed[k].cov - b.filtered[k].cov).norm() < 1e-12);
  }
}

TEST_CASE("smoothed mean tracks the true mean better than the filtered mean") {
  const auto errs = map_trajectories(fig2_model(), fig2_initial_state(), 4.0, 1e-3, 21, 100,
                                     [](std::size_t, const TrajectoryBundle& b) {
                                       double ef = 0.0, es = 0.0;
                                       for (std::size_t k = 1000; k <= 3000; ++k) {
                                         ef += (b.filtered[k].mean - b.true_state[k].mean).squaredNorm();
                                         es += (b.smoothed[k].mean - b.true_state[k].mean).squaredNorm();
                                       }
                                       return std::pair{ef, es};
                                     });
  double ef = 0.0, es = 0.0;
  for (auto [f, s] : errs) ef += f, es += s;
  CHECK(es < ef);
}

TEST_CASE("filter innovations are white with unit intensity") {
  const LgqModel& m = fig2_model();
  const auto sums = map_trajectories(m, fig2_initial_state(), 4.0, 1e-3, 33, 10,
                                     [&](std::size_t, const TrajectoryBundle& b) {
                                       double sq = 0.0;
                                       for (int k = 0; k < b.observed.n_steps; ++k) {
                                         const Vec dw = b.observed.increment(k) -
                                                        m.observed.C * b.filtered[k].mean * b.observed.dt;
                                         sq += dw.squaredNorm();
                                       }
                                       return sq / (b.observed.n_steps * b.observed.dt);
                                     });
  double mean = 0.0;
  for (double s : sums) mean += s / sums.size();
  CHECK(mean == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("parallel and serial ensembles agree") {
  auto f = [](std::size_t, const TrajectoryBundle& b) { return b.smoothed[500].mean; };
  const auto p = map_trajectories(fig2_model(), fig2_initial_state(), 1.0, 1e-3, 2, 8, f, true);
  const auto s = map_trajectories(fig2_model(), fig2_initial_state(), 1.0, 1e-3, 2, 8, f, false);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK((p[i] - s[i]).norm() == 0.0);
}

}
