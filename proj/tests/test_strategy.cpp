#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "lgqs/errors.hpp"
#include "lgqs/estimators.hpp"
#include "lgqs/strategy.hpp"

using namespace lgqs;
using namespace lgqs::test;

namespace {

LgqModel attenuator(double to, double tu) { return attenuator_model(1.0, 0.999, to, tu); }

double objective(int k, const LgqModel& m) {
  switch (k) {
    case 0: return overlap_A(m);
    case 1: return overlap_B(m);
    case 2: return overlap_C(m);
    default: return rpr(m);
  }
}

}  // namespace

TEST_SUITE("strategy") {

TEST_CASE("steady filter of a perfectly watched q quadrature on the attenuator") {
  // Diagonal V: the q entry solves -(4 gd/hbar) v^2 + (2a + 4 gd) v + d - gd hbar = 0,
  // the p entry the Lyapunov equation 2 a v + d = 0.
  const double hbar = 2.0;
  for (double gu : {0.0, 0.5}) {
    const double gd = 1.0, a = gu - gd, d = hbar * (gu + gd);
    const LgqModel m = attenuator_model(gd, gu, 0.0, 0.0, hbar);
    FixedPointReport rep;
    const Mat v = steady_filter_covariance(m.observed_system(), hbar, {}, rep);
    REQUIRE(rep.converged);
    CHECK(rep.residual <= 1e-9);
    const double qa = -4.0 * gd / hbar, qb = 2.0 * a + 4.0 * gd, qc = d - gd * hbar;
    const double root = (-qb - std::sqrt(qb * qb - 4 * qa * qc)) / (2 * qa);
    CHECK(v(0, 0) == doctest::Approx(root).epsilon(1e-9));
    CHECK(v(1, 1) == doctest::Approx(-d / (2 * a)).epsilon(1e-9));
    CHECK(std::abs(v(0, 1)) < 1e-9);
  }
}

TEST_CASE("steady state of the unmonitored attenuator") {
  const double gd = 1.0, gu = 0.7, hbar = 2.0;
  const LgqModel m = attenuator_model(gd, gu, 0.0, 0.0, hbar);
  FixedPointReport rep;
  const Mat v = steady_filter_covariance(m.unconditioned_system(), hbar, {}, rep);
  REQUIRE(rep.converged);
  CHECK((v - hbar * (gu + gd) / (2 * (gd - gu)) * Mat::Identity(2, 2)).norm() < 1e-8);
}

TEST_CASE("fully observed outputs give a pure true state") {
  for (double eta : {0.2, 0.5, 0.9}) {
    const SteadyState ss = steady_state(opo_model(eta, 0.3, 1.0 - eta, -0.4), kTrue);
    REQUIRE(ss.converged(kTrue));
    CHECK(purity(state_with(ss.v_true)) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("steady state reports residuals") {
  const SteadyState ss = steady_state(opo_model(0.5, M_PI / 4, 0.5, -M_PI / 8));
  CHECK(ss.converged(kAllParts));
  for (const FixedPointReport* r : {&ss.filtered_report, &ss.true_report, &ss.bob_report, &ss.alice_report,
                                    &ss.haloed_report})
    CHECK(r->residual <= 1e-9);
  CHECK(shur_check(state_with(ss.v_filtered)).valid);
  CHECK(shur_check(state_with(ss.v_true)).valid);
}

TEST_CASE("RPR limits") {
  SteadyState ss = steady_state(opo_model(0.5, M_PI / 4, 0.5, -M_PI / 8), kFiltered | kTrue | kHaloed);
  REQUIRE(ss.converged(kFiltered | kTrue | kHaloed));
  SteadyState none = ss;
  none.lambda_haloed.setZero();
  CHECK(rpr(none, 2.0) == doctest::Approx(0.0).epsilon(1e-12));
  SteadyState full = ss;
  full.lambda_haloed = 1e12 * Mat::Identity(2, 2);
  CHECK(rpr(full, 2.0) == doctest::Approx(1.0).epsilon(1e-6));
  const double r = rpr(ss, 2.0);
  CHECK(r > 0.0);
  CHECK(r < 1.0);
  CHECK_THROWS_AS(rpr(opo_model(0.5, 0.1, 0.0, 0.0)), DomainError);
}

TEST_CASE("attenuator RPR favours opposite phases") {
  const double th = M_PI / 4;
  CHECK(rpr(attenuator(th, -th)) > rpr(attenuator(th, th)));
}

TEST_CASE("hypothesis objectives vanish without the relevant observer") {
  const LgqModel no_bob = opo_model(0.5, 0.3, 0.0, 0.2);
  CHECK(overlap_A(no_bob) == 0.0);
  CHECK(overlap_B(no_bob) == 0.0);
  CHECK(overlap_C(opo_model(0.0, 0.3, 0.5, 0.2)) == 0.0);
}

TEST_CASE("measurement overlap maxima") {
  const PhaseGrid grid{-M_PI / 2, 36};
  for (double to : {0.0, 0.4, 1.1}) {
    std::vector<double> opo, att;
    for (double tu : grid.values()) {
      opo.push_back(overlap_A(opo_model(0.5, to, 0.5, tu)));
      att.push_back(overlap_A(attenuator(to, tu)));
    }
    CHECK(phase_distance(grid.at(argmax_first(opo)), to) <= grid.step() / 2 + 1e-12);
    CHECK(phase_distance(grid.at(argmax_first(att)), -to) <= grid.step() / 2 + 1e-12);
  }
}

TEST_CASE("attenuator hypotheses B and C pick opposite phases") {
  const PhaseGrid grid{-M_PI / 2, 24};
  for (double t : {-0.6, 0.3}) {
    std::vector<double> b, c;
    for (double x : grid.values()) {
      b.push_back(overlap_B(attenuator(x, t)));
      c.push_back(overlap_C(attenuator(t, x)));
    }
    CHECK(phase_distance(grid.at(argmax_first(b)), -t) <= grid.step() / 2 + 1e-9);
    CHECK(phase_distance(grid.at(argmax_first(c)), -t) <= grid.step() / 2 + 1e-9);
  }
}

TEST_CASE("objectives are pi periodic in each phase") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  for (int t = 0; t < 20; ++t) {
    const double a = u(rng), b = u(rng);
    const bool att = t % 2 == 1;
    auto make = [&](double x, double y) { return att ? attenuator(x, y) : opo_model(0.5, x, 0.5, y); };
    for (int k = 0; k < kObjectiveCount; ++k) {
      const double base = objective(k, make(a, b));
      CHECK(objective(k, make(a + M_PI, b)) == doctest::Approx(base).epsilon(1e-7));
      CHECK(objective(k, make(a, b - M_PI)) == doctest::Approx(base).epsilon(1e-7));
    }
  }
}

TEST_CASE("hypothesis B mirrors hypothesis C under swapped roles") {
  for (auto [to, tu] : {std::pair{0.3, -0.8}, std::pair{1.2, 0.1}}) {
    const LgqModel m = attenuator_model(1.0, 0.6, to, tu);
    CHECK(overlap_B(m) == doctest::Approx(overlap_C(swap_observers(m))).epsilon(1e-9));
    const LgqModel o = opo_model(0.3, to, 0.6, tu);
    CHECK(overlap_C(o) == doctest::Approx(overlap_B(swap_observers(o))).epsilon(1e-9));
  }
}

TEST_CASE("argmax ties and phase distance") {
  CHECK(argmax_first({1.0, 3.0, 3.0, 2.0}) == 1);
  CHECK(argmax_first({1.0, 3.0, 3.0 + 1e-13, 2.0}) == 1);
  CHECK(argmax_first({NAN, 0.5, NAN}) == 1);
  CHECK(argmax_first({NAN, NAN}) == -1);
  CHECK(phase_distance(0.1, 0.1 + M_PI) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(phase_distance(-M_PI / 2 + 0.01, M_PI / 2 - 0.01) == doctest::Approx(0.02));
  CHECK(phase_distance(0.0, M_PI / 2) == doctest::Approx(M_PI / 2));
}

TEST_CASE("phase grids are half open") {
  const PhaseGrid g{-M_PI / 2, 4};
  const auto v = g.values();
  REQUIRE(v.size() == 4);
  CHECK(v.front() == doctest::Approx(-M_PI / 2));
  CHECK(v.back() == doctest::Approx(M_PI / 4));
  CHECK(g.step() == doctest::Approx(M_PI / 4));
}

TEST_CASE("smoke scan on the attenuator") {
  ScanSpec spec;
  spec.family = attenuator;
  spec.theta_o = {-M_PI / 2, 3};
  spec.theta_u = {-M_PI / 2, 3};
  const ScanResult r = scan(spec);
  CHECK(r.failures.empty());
  for (int k = 0; k < kObjectiveCount; ++k) {
    CHECK(r.values[k].allFinite());
    const auto best = r.best_unobserved_phase(k);
    for (std::size_t i = 0; i < best.size(); ++i) CHECK(phase_distance(best[i], -r.theta_o[i]) < 1e-9);
  }
}

TEST_CASE("parallel scan equals the serial reference") {
  ScanSpec spec;
  spec.family = [](double a, double b) { return opo_model(0.5, a, 0.5, b); };
  spec.theta_o = {0.0, 5};
  spec.theta_u = {-M_PI / 2, 6};
  const ScanResult p = scan(spec);
  const ScanResult s = scan_serial(spec);
  for (int k = 0; k < kObjectiveCount; ++k) CHECK((p.values[k] - s.values[k]).norm() == 0.0);
}

TEST_CASE("RPR stays in the unit interval on scanned grids") {
  for (bool att : {false, true}) {
    ScanSpec spec;
    spec.family = att ? ModelFamily(attenuator) : ModelFamily([](double a, double b) { return opo_model(0.5, a, 0.5, b); });
    spec.theta_o = {att ? -M_PI / 2 : 0.0, 9};
    spec.theta_u = {-M_PI / 2, 9};
    spec.objectives = kRpr;
    const ScanResult r = scan(spec);
    CHECK(r.failures.empty());
    const Eigen::MatrixXd& v = r.values[3];
    CHECK(v.minCoeff() >= 0.0);
    CHECK(v.maxCoeff() <= 1.0 + 1e-9);
    CHECK(std::isnan(r.values[0](0, 0)));
  }
}

TEST_CASE("failing cells become NaN and are reported") {
  ScanSpec spec;
  spec.family = [](double a, double b) {
    if (a > 0.5) return opo_model(0.7, a, 0.7, b);  // over-committed channel
    return opo_model(0.5, a, 0.5, b);
  };
  spec.theta_o = {0.0, 3};
  spec.theta_u = {0.0, 3};
  spec.objectives = kOverlapA | kRpr;
  const ScanResult r = scan(spec);
  CHECK(!r.failures.empty());
  CHECK(std::isnan(r.values[3](2, 0)));
  CHECK(std::isfinite(r.values[3](0, 0)));
}

TEST_CASE("efficiency sweep") {
  SweepSpec spec;
  spec.eta_o = {0.1};
  spec.theta_u = {-M_PI / 2, 36};
  const auto rows = efficiency_sweep(spec);
  REQUIRE(rows.size() == 2);
  for (const SweepRow& r : rows) {
    CHECK(r.rpr_hyp_c <= r.rpr_numeric + 1e-12);
    CHECK(phase_distance(r.theta_u_hyp_c, r.theta_u_numeric) <= spec.theta_u.step() + 1e-9);
  }
  const auto serial = efficiency_sweep_serial(spec);
  CHECK(serial[1].rpr_numeric == rows[1].rpr_numeric);
  spec.eta_o = {1.0};
  CHECK_THROWS_AS(efficiency_sweep(spec), DomainError);
  spec.eta_o = {0.0};
  CHECK_THROWS_AS(efficiency_sweep(spec), DomainError);
}

}
