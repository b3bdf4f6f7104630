#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "interlab/error.hpp"
#include "interlab/experiments.hpp"

using namespace interlab;
using nlohmann::json;

namespace {

json parse(const char* text) { return json::parse(text); }

}  // namespace

TEST_CASE("manifest validation rejects malformed requests") {
  CHECK_THROWS_AS(run_manifest(json::array()), InvalidArgument);
  CHECK_THROWS_AS(run_manifest(json::object()), InvalidArgument);
  CHECK_THROWS_AS(run_manifest(parse(R"({"command": 5})")), InvalidArgument);
  CHECK_THROWS_AS(run_manifest(parse(R"({"command": "nope"})")), InvalidArgument);
  CHECK_THROWS_AS(run_manifest(parse(R"({"command": "verify-visits", "bogus": 1})")),
                  InvalidArgument);
  CHECK_THROWS_AS(run_manifest(parse(R"({"command": "verify-visits", "seed": -3})")),
                  InvalidArgument);
  CHECK_THROWS_AS(run_manifest(parse(R"({"command": "verify-visits", "seed": 1.5})")),
                  InvalidArgument);
  CHECK_THROWS_AS(run_manifest(parse(R"({"command": "verify-visits", "reps": 0})")),
                  InvalidArgument);
  CHECK_THROWS_AS(run_manifest(parse(R"({"command": "simulate", "n": 0})")), InvalidArgument);
  CHECK_THROWS_AS(run_manifest(parse(R"({"command": "simulate", "T": -1.0})")), InvalidArgument);
  CHECK_THROWS_AS(run_manifest(parse(R"({"command": "verify-returns-scaling",
                                         "epsilons": [0.5]})")),
                  InvalidArgument);
  CHECK_THROWS_AS(run_manifest(parse(R"({"command": "verify-tightness",
                                         "deltas": [0.5, 0.5]})")),
                  InvalidArgument);
  CHECK_THROWS_AS(run_manifest(parse(R"({"command": "report", "verdicts": 7})")),
                  InvalidArgument);
}

TEST_CASE("simulate runs record the configuration and a trajectory file") {
  json m = parse(R"({"command": "simulate", "n": 12, "T": 0.4, "seed": 777})");
  RunResult r = run_manifest(m);
  CHECK(r.passed);
  CHECK(r.verdict.at("command") == "simulate");
  CHECK(r.verdict.at("seed") == 777);
  CHECK(r.verdict.at("version") == "0.1.0");
  CHECK(r.manifest.at("version") == "0.1.0");
  REQUIRE(r.files.size() == 1);
  CHECK(r.files[0].first == "trajectory.csv");
  CHECK(r.files[0].second.rfind("particle,time,position\n", 0) == 0);

  RunResult again = run_manifest(m);
  CHECK(again.verdict.dump() == r.verdict.dump());
  CHECK(again.files == r.files);

  json other = m;
  other["seed"] = 778;
  RunResult moved = run_manifest(other);
  CHECK(moved.files != r.files);
}

TEST_CASE("visit verification emits one row per horizon plus a stability row") {
  json m = parse(R"({"command": "verify-visits", "T": [1.0, 4.0], "reps": 3000})");
  RunResult r = run_manifest(m);
  const json& checks = r.verdict.at("checks");
  REQUIRE(checks.size() == 3);
  CHECK(checks[0].at("test") == "visits-bound-T1");
  CHECK(checks[1].at("test") == "visits-bound-T4");
  CHECK(checks[2].at("test") == "visits-scaling-stability");
  for (const auto& row : checks) {
    CHECK(row.contains("statistic"));
    CHECK(row.contains("bound"));
    CHECK(row.contains("std_error"));
    CHECK(row.at("pass").is_boolean());
  }
  CHECK(checks[0].at("statistic").get<double>() > 0.5);
  CHECK(checks[0].at("statistic").get<double>() < 3.0);
  CHECK(checks[0].at("bound").get<double>() == 3.0);
  CHECK(r.passed);
  CHECK(r.verdict.at("claims") == json::array({"srw-visits"}));
}

TEST_CASE("verdicts are identical across worker counts") {
  json m = parse(R"({"command": "verify-visits", "T": [1.0], "reps": 4000, "seed": 99})");
  RunResult one = run_manifest(m, 1);
  RunResult four = run_manifest(m, 4);
  RunResult zero = run_manifest(m, 0);  // clamped to a valid worker count
  CHECK(one.verdict.dump() == four.verdict.dump());
  CHECK(one.files == four.files);
  CHECK(one.verdict.dump() == zero.verdict.dump());
  CHECK(one.files == zero.files);
}

TEST_CASE("a frozen full lattice reproduces the stationary profile exactly") {
  json m = parse(R"({"command": "verify-hydrodynamic", "n": [16], "times": [0.05],
                     "reps": [8], "profile": {"type": "indicator", "support": [0.0, 1.0]}})");
  RunResult r = run_manifest(m);
  const json& checks = r.verdict.at("checks");
  bool found = false;
  for (const auto& row : checks) {
    if (row.at("test") != "hydro-final-t0.05") continue;
    found = true;
    // All sixteen sites stay occupied, so the empirical law is the uniform
    // grid and its distance to the stationary law is 1/(2n) up to the
    // reference discretization error.
    CHECK(row.at("statistic").get<double>() == doctest::Approx(1.0 / 32.0).epsilon(0.02));
    CHECK(row.at("std_error").get<double>() == 0.0);
    CHECK(row.at("pass").get<bool>());
  }
  CHECK(found);
  CHECK(r.passed);
}

TEST_CASE("a small concentration run produces the expected table shape") {
  json m = parse(R"({"command": "verify-concentration", "n": [16], "T": 0.25,
                     "reps": 300, "pairs": [[5, 11]], "moment_T": [0.5],
                     "moment_reps": 300})");
  RunResult r = run_manifest(m);
  const json& checks = r.verdict.at("checks");
  bool saw_max = false, saw_moment = false, saw_J = false, saw_occ = false, saw_mart = false;
  for (const auto& row : checks) {
    std::string name = row.at("test").get<std::string>();
    if (name == "concentration-max-scaled") {
      saw_max = true;
      CHECK(row.at("bound").is_null());
      CHECK(row.at("pass").get<bool>());
    }
    if (name == "coupling-second-moment-T0.5") saw_moment = true;
    if (name == "coupling-J-bound-T0.5") saw_J = true;
    if (name == "coupling-occupied-bound-T0.5") saw_occ = true;
    if (name == "coupling-martingale") saw_mart = true;
    CHECK(name.rfind("concentration-trend", 0) != 0);  // one n gives no trend series
  }
  CHECK(saw_max);
  CHECK(saw_moment);
  CHECK(saw_J);
  CHECK(saw_occ);
  CHECK(saw_mart);
  REQUIRE(r.files.size() == 2);
  CHECK(r.files[0].first == "concentration.csv");
  CHECK(r.files[1].first == "coupling_moments.csv");
}

TEST_CASE("report command aggregates claim coverage") {
  json verdicts = json::array();
  verdicts.push_back(parse(R"({"command": "verify-visits", "claims": ["srw-visits"],
                               "passed": true})"));
  verdicts.push_back(parse(R"({"command": "verify-returns-scaling",
                               "claims": ["return-scaling"], "passed": false})"));
  json m{{"command", "report"}, {"verdicts", verdicts}};
  RunResult r = run_manifest(m);
  CHECK(!r.passed);
  const json& claims = r.verdict.at("claims");
  CHECK(claims.at("srw-visits") == "PASS");
  CHECK(claims.at("return-scaling") == "FAIL");
  CHECK(claims.at("pair-concentration") == "UNTESTED");
  CHECK(r.verdict.at("status") == "FAIL");

  REQUIRE(r.files.size() == 2);
  CHECK(r.files[0].first == "report.csv");
  CHECK(r.files[1].first == "report.txt");
  CHECK(r.files[1].second.find("overall: FAIL") != std::string::npos);
  CHECK(r.files[0].second.find("return-scaling,FAIL") != std::string::npos);

  json empty{{"command", "report"}, {"verdicts", json::array()}};
  RunResult u = run_manifest(empty);
  CHECK(u.passed);
  CHECK(u.verdict.at("status") == "UNTESTED");
  CHECK(u.files[1].second.find("overall: UNTESTED") != std::string::npos);

  json bad{{"command", "report"}, {"verdicts", json::array({json{{"command", "x"}}})}};
  CHECK_THROWS_AS(run_manifest(bad), InvalidArgument);
}

TEST_CASE("run outputs land on disk exactly as carried in memory") {
  namespace fs = std::filesystem;
  json m = parse(R"({"command": "simulate", "n": 6, "T": 0.2, "seed": 5})");
  RunResult r = run_manifest(m);
  fs::path dir = fs::temp_directory_path() / "interlab_test_outputs";
  fs::remove_all(dir);
  write_run_outputs(r, dir.string());

  std::ifstream vf(dir / "verdict.json");
  REQUIRE(vf.good());
  std::stringstream vbuf;
  vbuf << vf.rdbuf();
  CHECK(vbuf.str() == r.verdict.dump(2) + "\n");

  std::ifstream mf(dir / "manifest.json");
  REQUIRE(mf.good());
  std::stringstream mbuf;
  mbuf << mf.rdbuf();
  CHECK(mbuf.str() == r.manifest.dump(2) + "\n");

  std::ifstream tf(dir / "trajectory.csv");
  REQUIRE(tf.good());
  std::stringstream tbuf;
  tbuf << tf.rdbuf();
  CHECK(tbuf.str() == r.files[0].second);
  fs::remove_all(dir);
}
