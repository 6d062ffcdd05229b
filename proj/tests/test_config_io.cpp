#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "lgqs/config.hpp"
#include "lgqs/errors.hpp"
#include "lgqs/io.hpp"

using namespace lgqs;
using namespace lgqs::test;

namespace {

std::string error_field(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST_SUITE("config_io") {

TEST_CASE("angles") {
  CHECK(parse_angle(Json(0.25), "x") == 0.25);
  CHECK(parse_angle(Json("pi"), "x") == doctest::Approx(M_PI));
  CHECK(parse_angle(Json("3pi/8"), "x") == doctest::Approx(3 * M_PI / 8));
  CHECK(parse_angle(Json("-pi/2"), "x") == doctest::Approx(-M_PI / 2));
  CHECK(parse_angle(Json("0.5pi"), "x") == doctest::Approx(M_PI / 2));
  CHECK(error_field([] { parse_angle(Json("pie"), "scan.theta_o.start"); }) == "scan.theta_o.start");
  CHECK_THROWS_AS(parse_angle(Json(true), "x"), ConfigError);
}

TEST_CASE("every preset resolves") {
  for (const std::string& name : preset_names()) {
    const Json c = resolve_config(Json::object(), name);
    CHECK(c["preset"] == name);
    CHECK(c["seed"] == 1);
  }
  CHECK(error_field([] { preset_config("fig9"); }) == "preset");
}

TEST_CASE("fig2 preset describes the reference trajectory") {
  const TrajectoryJob job = parse_trajectory(preset_config("fig2"));
  CHECK(job.T == 4.0);
  CHECK(job.dt == 1e-3);
  CHECK(job.model.kind == "opo");
  CHECK(job.model.theta_o == doctest::Approx(M_PI / 4));
  CHECK(job.model.theta_u == doctest::Approx(-M_PI / 8));
  CHECK((job.initial.cov - diag({10.0, 0.5})).norm() == 0.0);
  CHECK(job.snapshot_times.back() == 4.0);
}

TEST_CASE("explicit keys override the preset") {
  Json user = {{"preset", "fig2"}, {"seed", 9}, {"trajectory", {{"T", 2.0}, {"snapshot_times", {0.0, 2.0}}}}};
  const Json c = resolve_config(user);
  const TrajectoryJob job = parse_trajectory(c);
  CHECK(job.T == 2.0);
  CHECK(job.seed == 9);
  CHECK(job.dt == 1e-3);
}

TEST_CASE("missing and malformed fields are named") {
  Json c = preset_config("fig2");
  c["trajectory"].erase("dt");
  CHECK(error_field([&] { parse_trajectory(c); }) == "trajectory.dt");
  c = preset_config("fig2");
  c["trajectory"]["dt"] = "small";
  CHECK(error_field([&] { parse_trajectory(c); }) == "trajectory.dt");
  c = preset_config("fig2");
  c["trajectory"]["dt"] = 0.3;
  CHECK(error_field([&] { parse_trajectory(c); }) == "trajectory.dt");
  c = preset_config("fig2");
  c["trajectory"]["T"] = 2.0;
  CHECK(error_field([&] { parse_trajectory(c); }) == "trajectory.snapshot_times");
  c = preset_config("fig2");
  c["trajectory"]["model"]["kind"] = "laser";
  CHECK(error_field([&] { parse_trajectory(c); }) == "trajectory.model.kind");
  c = preset_config("fig4");
  c["scan"]["theta_u"]["points"] = 2;
  CHECK(error_field([&] { parse_scan(c); }) == "scan.theta_u.points");
  c = preset_config("fig5");
  c["sweep"]["eta_o"] = {0.5, 1.0};
  CHECK(error_field([&] { parse_sweep(c); }) == "sweep.eta_o[1]");
  c = preset_config("fig6");
  c["qubit"]["eta_o"] = 0.8;
  CHECK(error_field([&] { parse_qubit(c); }) == "qubit");
  CHECK(error_field([] { parse_qubit(preset_config("fig2")); }) == "qubit");
}

TEST_CASE("scan and qubit presets") {
  const ScanJob s = parse_scan(preset_config("fig3"));
  CHECK(s.model.kind == "attenuator");
  CHECK(s.model.gamma_up == 0.999);
  CHECK(s.spec.theta_o.points == 61);
  CHECK(s.spec.theta_u.start == doctest::Approx(-M_PI / 2));
  const LgqModel m = s.spec.family(0.1, -0.1);
  CHECK(m.A(0, 0) == doctest::Approx(-0.001));
  const QubitJob q = parse_qubit(preset_config("fig6"));
  CHECK(q.rapr.n_observed == 300);
  CHECK(q.rapr.n_unobserved == 2000);
  CHECK(q.config.window_start == 4.5);
  CHECK(hypotheses_system(preset_config("fig6")) == "qubit");
  CHECK(hypotheses_system(preset_config("fig4")) == "scan");
}

TEST_CASE("double formatting round trips") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789}) CHECK(std::stod(format_double(x)) == x);
  CHECK(format_double(NAN) == "nan");
}

TEST_CASE("covariance ellipse") {
  const Ellipse e = covariance_ellipse(diag({4.0, 1.0}));
  CHECK(e.semi_major == doctest::Approx(2.0));
  CHECK(e.semi_minor == doctest::Approx(1.0));
  CHECK(e.angle == doctest::Approx(0.0));
  const Ellipse r = covariance_ellipse(diag({1.0, 4.0}));
  CHECK(std::abs(r.angle) == doctest::Approx(M_PI / 2));
}

TEST_CASE("scan CSV is deterministic and long format") {
  ScanSpec spec = parse_scan(resolve_config({{"scan", {{"theta_o", {{"points", 3}}}, {"theta_u", {{"points", 4}}}}}}, "fig4")).spec;
  std::ostringstream a, b;
  write_scan_csv(a, scan(spec));
  write_scan_csv(b, scan(spec));
  CHECK(a.str() == b.str());
  std::istringstream in(a.str());
  std::string line;
  int rows = 0;
  std::getline(in, line);
  CHECK(line.find("theta_o,theta_u") != std::string::npos);
  CHECK(line.find("RPR") != std::string::npos);
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 12);
}

TEST_CASE("qubit tables serialize with cell keys") {
  QubitTable t;
  t << 1.0, 0.0, 0.0, 1.0;
  const Json j = table_json(t);
  CHECK(j["x,x"] == 1.0);
  CHECK(j["y,x"] == 0.0);
}

}
