#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() / ("lgqs_cli_" + std::to_string(::getpid()) + "_" +
                                       std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args, const std::string& log = "/dev/null") {
  const std::string cmd = std::string(LGQS_CLI_PATH) + " " + args + " > " + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help and usage errors") {
  CHECK(run("--help") == 0);
  CHECK(run("") == 1);
  CHECK(run("trajectory --bogus") == 1);
  CHECK(run("trajectory --preset nope --out /tmp/lgqs_unused") == 1);
}

TEST_CASE("trajectory output is reproducible for a seed") {
  Sandbox box;
  REQUIRE(run("trajectory --preset smoke --seed 5 --out " + box.path("a")) == 0);
  REQUIRE(run("trajectory --preset smoke --seed 5 --out " + box.path("b")) == 0);
  REQUIRE(run("trajectory --preset smoke --seed 6 --out " + box.path("c")) == 0);
  for (const char* f : {"trajectory.csv", "snapshots.csv", "trajectory_summary.json"}) {
    const std::string a = slurp(box.path("a/") + f);
    CHECK(!a.empty());
    CHECK(a == slurp(box.path("b/") + f));
  }
  CHECK(slurp(box.path("a/trajectory.csv")) != slurp(box.path("c/trajectory.csv")));
}

TEST_CASE("emitted config reruns to the same result") {
  Sandbox box;
  REQUIRE(run("trajectory --preset smoke --seed 3 --out " + box.path("a")) == 0);
  REQUIRE(run("trajectory --config " + box.path("a/config.json") + " --out " + box.path("b")) == 0);
  CHECK(slurp(box.path("a/trajectory.csv")) == slurp(box.path("b/trajectory.csv")));
}

TEST_CASE("config errors name the field and exit with 1") {
  Sandbox box;
  write(box.path("bad.json"), R"({"preset": "smoke", "trajectory": {"dt": null}})");
  CHECK(run("trajectory --config " + box.path("bad.json") + " --out " + box.path("o"), box.path("log")) == 1);
  CHECK(slurp(box.path("log")).find("trajectory.dt") != std::string::npos);
  write(box.path("broken.json"), "{not json");
  CHECK(run("scan --config " + box.path("broken.json") + " --out " + box.path("o")) == 1);
}

TEST_CASE("numerical failures exit with 2") {
  Sandbox box;
  write(box.path("q.json"), R"({"preset": "smoke", "qubit": {"eta_u": 0.0, "T": 2.0, "window": [1.0, 1.5],
                                "n_observed": 2, "n_unobserved": 2, "kick_records": 1}})");
  CHECK(run("qubit --config " + box.path("q.json") + " --out " + box.path("o"), box.path("log")) == 2);
}

TEST_CASE("scan and sweep write their tables") {
  Sandbox box;
  REQUIRE(run("scan --preset smoke --threads 2 --out " + box.path("s")) == 0);
  REQUIRE(run("scan --preset smoke --threads 1 --out " + box.path("t")) == 0);
  CHECK(slurp(box.path("s/scan.csv")) == slurp(box.path("t/scan.csv")));
  const auto summary = nlohmann::json::parse(slurp(box.path("s/scan_summary.json")));
  CHECK(summary.contains("hypothesis_distance"));
  REQUIRE(run("sweep --preset smoke --out " + box.path("w")) == 0);
  CHECK(slurp(box.path("w/sweep.csv")).rfind("theta_o,eta_o,", 0) == 0);
  REQUIRE(run("hypotheses --preset fig4 --config " + box.path("none.json") + " --out " + box.path("h")) == 1);
}

TEST_CASE("qubit smoke run is quick and well formed") {
  Sandbox box;
  const auto t0 = std::chrono::steady_clock::now();
  REQUIRE(run("qubit --preset smoke --seed 2 --out " + box.path("q")) == 0);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 30.0);
  const auto j = nlohmann::json::parse(slurp(box.path("q/qubit.json")));
  CHECK(j["seed"] == 2);
  CHECK(j["ensemble"]["n_observed"] == 20);
  CHECK(j["ensemble"]["n_unobserved"] == 100);
  for (const char* h : {"A", "B", "C"}) {
    REQUIRE(j["hypotheses"].contains(h));
    for (const char* cell : {"x,x", "x,y", "y,x", "y,y"}) CHECK(j["hypotheses"][h][cell].is_number());
  }
  for (const char* cell : {"x,x", "x,y", "y,x", "y,y"}) {
    const auto& c = j["rapr"]["cells"][cell];
    CHECK(c["R"].is_number());
    CHECK(c["ci"].size() == 2);
    CHECK(c["min_ess"].is_number());
  }
  CHECK(j["order"]["R"].size() == 4);
  REQUIRE(run("qubit --preset smoke --seed 2 --threads 1 --out " + box.path("r")) == 0);
  CHECK(slurp(box.path("q/qubit.json")) == slurp(box.path("r/qubit.json")));
}

TEST_CASE("hypotheses subcommand follows the config system") {
  Sandbox box;
  write(box.path("h.json"), R"({"preset": "smoke", "hypotheses": {"system": "scan"}})");
  REQUIRE(run("hypotheses --config " + box.path("h.json") + " --out " + box.path("h")) == 0);
  const std::string csv = slurp(box.path("h/hypotheses.csv"));
  CHECK(!csv.empty());
  CHECK(!fs::exists(box.path("h/qubit.json")));
}

}
