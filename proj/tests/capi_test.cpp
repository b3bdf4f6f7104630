#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "interlab.h"

using nlohmann::json;

TEST_CASE("version and error channel") {
  REQUIRE(il_version() != nullptr);
  CHECK(std::strcmp(il_version(), "0.1.0") == 0);

  il_run* run = nullptr;
  CHECK(il_run_manifest(nullptr, 1, &run) == IL_ERR_INVALID_ARGUMENT);
  CHECK(run == nullptr);
  CHECK(std::strlen(il_last_error()) > 0);

  CHECK(il_run_manifest("{not json", 1, &run) == IL_ERR_INVALID_ARGUMENT);
  CHECK(il_run_manifest(R"({"command": "nope"})", 1, &run) == IL_ERR_INVALID_ARGUMENT);
  CHECK(il_run_manifest(R"({"command": "verify-visits", "reps": -1})", 1, &run) ==
        IL_ERR_INVALID_ARGUMENT);
}

TEST_CASE("manifest runs succeed through the C boundary") {
  il_run* run = nullptr;
  il_status st = il_run_manifest(
      R"({"command": "verify-visits", "T": [1.0], "reps": 2500, "seed": 11})", 1, &run);
  REQUIRE(st == IL_OK);
  REQUIRE(run != nullptr);
  CHECK(il_run_passed(run) == 1);

  json verdict = json::parse(il_run_verdict_json(run));
  CHECK(verdict.at("command") == "verify-visits");
  CHECK(verdict.at("passed").get<bool>());
  json manifest = json::parse(il_run_manifest_json(run));
  CHECK(manifest.at("reps") == 2500);

  REQUIRE(il_run_file_count(run) == 1);
  CHECK(std::string(il_run_file_name(run, 0)) == "visits.csv");
  std::string content(il_run_file_content(run, 0));
  CHECK(content.rfind("T,reps,mean_visits,std_error,bound\n", 0) == 0);
  CHECK(il_run_file_name(run, 9) == nullptr);

  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "interlab_capi_outputs";
  fs::remove_all(dir);
  CHECK(il_run_write_outputs(run, dir.string().c_str()) == IL_OK);
  std::ifstream vf(dir / "visits.csv");
  REQUIRE(vf.good());
  std::stringstream buf;
  buf << vf.rdbuf();
  CHECK(buf.str() == content);
  fs::remove_all(dir);

  il_run_free(run);
  il_run_free(nullptr);  // must be a no-op
}

TEST_CASE("identical manifests give byte-identical verdicts at any worker count") {
  const char* manifest = R"({"command": "verify-visits", "T": [1.0], "reps": 3000, "seed": 4})";
  il_run* a = nullptr;
  il_run* b = nullptr;
  REQUIRE(il_run_manifest(manifest, 1, &a) == IL_OK);
  REQUIRE(il_run_manifest(manifest, 8, &b) == IL_OK);
  CHECK(std::string(il_run_verdict_json(a)) == il_run_verdict_json(b));
  CHECK(std::string(il_run_manifest_json(a)) == il_run_manifest_json(b));
  REQUIRE(il_run_file_count(a) == il_run_file_count(b));
  for (size_t i = 0; i < il_run_file_count(a); ++i) {
    CHECK(std::string(il_run_file_name(a, i)) == il_run_file_name(b, i));
    CHECK(std::string(il_run_file_content(a, i)) == il_run_file_content(b, i));
  }
  il_run_free(a);
  il_run_free(b);
}

TEST_CASE("walk paths cross the C boundary with their exact values") {
  il_path* path = nullptr;
  REQUIRE(il_srw_simulate(3, 1.5, 10.0, 21u, 1070u, 0u, &path) == IL_OK);
  REQUIRE(path != nullptr);
  CHECK(il_path_horizon(path) == 10.0);
  CHECK(il_path_value_at(path, 0.0) == 3.0);

  double mid = il_path_value_at(path, 5.0);
  CHECK(std::isfinite(mid));

  il_path* replay = nullptr;
  REQUIRE(il_srw_simulate(3, 1.5, 10.0, 21u, 1070u, 0u, &replay) == IL_OK);
  CHECK(il_path_jump_count(replay) == il_path_jump_count(path));
  CHECK(il_path_value_at(replay, 5.0) == mid);

  double bad = il_path_value_at(path, 11.0);
  CHECK(std::isnan(bad));
  CHECK(std::strlen(il_last_error()) > 0);

  namespace fs = std::filesystem;
  fs::path file = fs::temp_directory_path() / "interlab_capi_path.csv";
  fs::remove(file);
  CHECK(il_path_write_csv(path, file.string().c_str()) == IL_OK);
  std::ifstream pf(file);
  REQUIRE(pf.good());
  std::string header;
  std::getline(pf, header);
  CHECK(header == "time,value");
  fs::remove(file);

  CHECK(il_srw_simulate(0, -1.0, 1.0, 1u, 1070u, 0u, &replay) == IL_ERR_INVALID_ARGUMENT);
  CHECK(il_path_write_csv(path, "/nonexistent-dir/x/y.csv") == IL_ERR_IO);

  il_path_free(path);
  il_path_free(replay);
  il_path_free(nullptr);
}

TEST_CASE("reflected kernel scalars match the library values") {
  double d = il_rbm_transition_density(0.5, 0.5, 0.01);
  CHECK(d == doctest::Approx(3.9894228).epsilon(1e-3));
  double c = il_rbm_transition_cdf(0.3, 1.0, 0.25);
  CHECK(c == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::isnan(il_rbm_transition_density(-0.5, 0.5, 0.1)));
  CHECK(std::isnan(il_rbm_transition_cdf(0.5, 0.5, -1.0)));
  CHECK(std::strlen(il_last_error()) > 0);
}
