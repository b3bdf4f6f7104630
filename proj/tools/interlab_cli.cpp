#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "interlab.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitCheckFailed = 3;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void bail(int code, const std::string& msg) { throw CliError{code, msg}; }

json parse_number_token(const std::string& tok, const char* flag) {
  json v = json::parse(tok, nullptr, false);
  if (v.is_discarded() || !v.is_number())
    bail(kExitInvalid, std::string(flag) + ": '" + tok + "' is not a number");
  return v;
}

// "1,4,16" -> [1,4,16]; a single token stays scalar so integer-only fields
// keep their type.
json number_or_list(const std::string& text, const char* flag) {
  std::vector<json> items;
  std::string tok;
  std::stringstream ss(text);
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) items.push_back(parse_number_token(tok, flag));
  }
  if (items.empty()) bail(kExitInvalid, std::string(flag) + ": empty value");
  if (items.size() == 1) return items[0];
  json arr = json::array();
  for (auto& v : items) arr.push_back(std::move(v));
  return arr;
}

json force_list(const std::string& text, const char* flag) {
  json v = number_or_list(text, flag);
  if (!v.is_array()) {
    json arr = json::array();
    arr.push_back(std::move(v));
    return arr;
  }
  return v;
}

std::string utc_stamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

json load_json_file(const std::string& path, int fail_code) {
  std::ifstream is(path, std::ios::binary);
  if (!is) bail(fail_code, "cannot read " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  json v = json::parse(buf.str(), nullptr, false);
  if (v.is_discarded()) bail(kExitInvalid, path + " is not valid JSON");
  return v;
}

struct Common {
  std::string out_dir;
  std::string config_path;
  int workers = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;

  void attach(CLI::App* app) {
    app->add_option("--out", out_dir, "output directory (default out/<command>/<utc>)");
    app->add_option("--config", config_path, "JSON file with manifest fields");
    app->add_option("--workers", workers, "worker threads (default: hardware)");
    app->add_option("--seed", seed, "master seed")->each([this](const std::string&) {
      seed_set = true;
    });
  }
};

json base_manifest(const Common& common, const std::string& command) {
  json m = json::object();
  if (!common.config_path.empty()) {
    m = load_json_file(common.config_path, kExitInvalid);
    if (!m.is_object()) bail(kExitInvalid, common.config_path + " must hold a JSON object");
  }
  m["command"] = command;
  if (!m.contains("seed")) {
    if (const char* env = std::getenv("INTERLAB_SEED")) {
      char* end = nullptr;
      unsigned long long v = std::strtoull(env, &end, 10);
      if (!end || *end != '\0' || env == end)
        bail(kExitInvalid, "INTERLAB_SEED must be a nonnegative integer");
      m["seed"] = std::uint64_t(v);
    }
  }
  if (common.seed_set) m["seed"] = common.seed;
  return m;
}

int resolve_workers(const Common& common) {
  if (common.workers > 0) return common.workers;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw > 64 ? 64 : hw);
}

int run_and_emit(const json& manifest, const Common& common, const std::string& out_label) {
  std::string text = manifest.dump();
  il_run* run = nullptr;
  il_status st = il_run_manifest(text.c_str(), resolve_workers(common), &run);
  if (st != IL_OK) {
    std::fprintf(stderr, "error: %s\n", il_last_error());
    return st == IL_ERR_INVALID_ARGUMENT ? kExitInvalid : kExitRuntime;
  }
  std::string out_dir =
      common.out_dir.empty() ? "out/" + out_label + "/" + utc_stamp() : common.out_dir;
  st = il_run_write_outputs(run, out_dir.c_str());
  if (st != IL_OK) {
    std::fprintf(stderr, "error: %s\n", il_last_error());
    il_run_free(run);
    return kExitRuntime;
  }
  json verdict = json::parse(il_run_verdict_json(run));
  if (verdict.contains("checks")) {
    for (const json& check : verdict.at("checks")) {
      bool ok = check.at("pass").get<bool>();
      std::string bound = check.at("bound").is_null() ? "-" : check.at("bound").dump();
      std::printf("[%s] %-34s statistic=%-12.6g bound=%s\n", ok ? "PASS" : "FAIL",
                  check.at("test").get<std::string>().c_str(),
                  check.at("statistic").get<double>(), bound.c_str());
    }
  }
  // report carries its rendered table as an artifact; echo it for the console
  for (size_t i = 0; i < il_run_file_count(run); ++i) {
    if (std::string(il_run_file_name(run, i)) == "report.txt")
      std::printf("%s", il_run_file_content(run, i));
  }
  bool passed = il_run_passed(run) != 0;
  std::printf("%s  (outputs in %s)\n", passed ? "PASS" : "FAIL", out_dir.c_str());
  il_run_free(run);
  return passed ? kExitOk : kExitCheckFailed;
}

void set_if(json& m, const char* key, const std::string& value, bool list, const char* flag) {
  if (value.empty()) return;
  m[key] = list ? force_list(value, flag) : number_or_list(value, flag);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic laboratory for the interchange process on path graphs"};
  app.set_version_flag("--version", std::string(il_version()));
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "sample tracked trajectories of one realization");
  Common sim_common;
  sim_common.attach(sim);
  std::string sim_n, sim_T, sim_track;
  sim->add_option("--n", sim_n, "number of vertices");
  sim->add_option("--T", sim_T, "macroscopic horizon");
  sim->add_option("--track", sim_track, "tracked start vertices, comma separated");

  // verify <name>
  auto* verify = app.add_subcommand("verify", "run a named statistical check suite");
  Common ver_common;
  ver_common.attach(verify);
  std::string ver_name;
  verify->add_option("name", ver_name,
                     "one of: visits, returns-scaling, concentration, tightness, "
                     "hydrodynamic, independence, marginals")
      ->required();
  std::string v_n, v_T, v_t, v_reps, v_deltas, v_epsilons, v_times, v_grid, v_perms,
      v_moment_T, v_moment_reps, v_profile;
  std::vector<std::string> v_pairs;
  verify->add_option("--n", v_n, "lattice sizes, comma separated");
  verify->add_option("--T", v_T, "horizon(s)");
  verify->add_option("--t", v_t, "observation time");
  verify->add_option("--reps", v_reps, "replicates");
  verify->add_option("--deltas", v_deltas, "oscillation windows");
  verify->add_option("--epsilons", v_epsilons, "scaling parameters");
  verify->add_option("--times", v_times, "snapshot times");
  verify->add_option("--grid", v_grid, "observation grid");
  verify->add_option("--permutations", v_perms, "permutation count");
  verify->add_option("--moment-T", v_moment_T, "horizons for the excursion moments");
  verify->add_option("--moment-reps", v_moment_reps, "replicates for the excursion moments");
  verify->add_option("--pair", v_pairs, "tracked start pair i:j (repeatable)");
  verify->add_option("--profile", v_profile,
                     "initial profile JSON, e.g. {\"type\":\"indicator\",\"support\":[0,0.5]}");

  // report
  auto* rep = app.add_subcommand("report", "aggregate verdicts into a claim table");
  Common rep_common;
  rep_common.attach(rep);
  std::vector<std::string> rep_inputs;
  rep->add_option("verdicts", rep_inputs, "verdict.json files or run directories");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (sim->parsed()) {
      json m = base_manifest(sim_common, "simulate");
      set_if(m, "n", sim_n, false, "--n");
      set_if(m, "T", sim_T, false, "--T");
      set_if(m, "track", sim_track, true, "--track");
      return run_and_emit(m, sim_common, "simulate");
    }
    if (verify->parsed()) {
      std::string command = "verify-" + ver_name;
      json m = base_manifest(ver_common, command);
      set_if(m, "n", v_n, false, "--n");
      set_if(m, "T", v_T, false, "--T");
      set_if(m, "t", v_t, false, "--t");
      set_if(m, "reps", v_reps, false, "--reps");
      set_if(m, "deltas", v_deltas, true, "--deltas");
      set_if(m, "epsilons", v_epsilons, true, "--epsilons");
      set_if(m, "times", v_times, true, "--times");
      set_if(m, "grid", v_grid, true, "--grid");
      set_if(m, "permutations", v_perms, false, "--permutations");
      set_if(m, "moment_T", v_moment_T, true, "--moment-T");
      set_if(m, "moment_reps", v_moment_reps, false, "--moment-reps");
      if (!v_profile.empty()) {
        json p = json::parse(v_profile, nullptr, false);
        if (p.is_discarded()) bail(kExitInvalid, "--profile: not valid JSON");
        m["profile"] = p;
      }
      if (!v_pairs.empty()) {
        json pairs = json::array();
        for (const std::string& p : v_pairs) {
          auto colon = p.find(':');
          if (colon == std::string::npos)
            bail(kExitInvalid, "--pair expects i:j, got '" + p + "'");
          json i = parse_number_token(p.substr(0, colon), "--pair");
          json j = parse_number_token(p.substr(colon + 1), "--pair");
          pairs.push_back(json::array({i, j}));
        }
        m["pairs"] = pairs;
      }
      return run_and_emit(m, ver_common, command);
    }
    if (rep->parsed()) {
      json verdicts = json::array();
      for (const std::string& input : rep_inputs) {
        std::string path = input;
        std::ifstream probe(path + "/verdict.json");
        if (probe.good()) path += "/verdict.json";
        verdicts.push_back(load_json_file(path, kExitInvalid));
      }
      json m = base_manifest(rep_common, "report");
      m["verdicts"] = verdicts;
      return run_and_emit(m, rep_common, "report");
    }
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitInvalid;
}
