#include "interlab.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <new>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "interlab/error.hpp"
#include "interlab/experiments.hpp"
#include "interlab/path.hpp"
#include "interlab/reflected_bm.hpp"
#include "interlab/rng.hpp"
#include "interlab/walks.hpp"

namespace {

thread_local std::string g_error;

il_status fail(il_status code, const std::string& msg) {
  g_error = msg;
  return code;
}

il_status from_exception() {
  try {
    throw;
  } catch (const interlab::InvalidArgument& e) {
    return fail(IL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(IL_ERR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return fail(IL_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(IL_ERR_RUNTIME, "unknown failure");
  }
}

double nan_error(const std::string& msg) {
  g_error = msg;
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

struct il_run {
  interlab::RunResult result;
  std::string verdict_json;
  std::string manifest_json;
};

struct il_path {
  interlab::CadlagPath path;
};

extern "C" {

const char* il_version(void) { return interlab::kArtifactVersion; }

const char* il_last_error(void) { return g_error.c_str(); }

il_status il_run_manifest(const char* manifest_json, int workers, il_run** out_run) {
  if (!out_run) return fail(IL_ERR_INVALID_ARGUMENT, "out_run is null");
  *out_run = nullptr;
  if (!manifest_json) return fail(IL_ERR_INVALID_ARGUMENT, "manifest_json is null");
  try {
    nlohmann::json manifest = nlohmann::json::parse(manifest_json, nullptr, false);
    if (manifest.is_discarded())
      return fail(IL_ERR_INVALID_ARGUMENT, "manifest is not valid JSON");
    interlab::RunResult result = interlab::run_manifest(manifest, workers);
    auto* run = new il_run{std::move(result), {}, {}};
    run->verdict_json = run->result.verdict.dump(2) + "\n";
    run->manifest_json = run->result.manifest.dump(2) + "\n";
    *out_run = run;
    g_error.clear();
    return IL_OK;
  } catch (...) {
    return from_exception();
  }
}

int il_run_passed(const il_run* run) { return run && run->result.passed ? 1 : 0; }

const char* il_run_verdict_json(const il_run* run) {
  if (!run) {
    g_error = "run is null";
    return nullptr;
  }
  return run->verdict_json.c_str();
}

const char* il_run_manifest_json(const il_run* run) {
  if (!run) {
    g_error = "run is null";
    return nullptr;
  }
  return run->manifest_json.c_str();
}

il_status il_run_write_outputs(const il_run* run, const char* out_dir) {
  if (!run) return fail(IL_ERR_INVALID_ARGUMENT, "run is null");
  if (!out_dir) return fail(IL_ERR_INVALID_ARGUMENT, "out_dir is null");
  try {
    interlab::write_run_outputs(run->result, out_dir);
    g_error.clear();
    return IL_OK;
  } catch (const interlab::RuntimeFailure& e) {
    return fail(IL_ERR_IO, e.what());
  } catch (...) {
    return from_exception();
  }
}

size_t il_run_file_count(const il_run* run) { return run ? run->result.files.size() : 0; }

const char* il_run_file_name(const il_run* run, size_t index) {
  if (!run || index >= run->result.files.size()) {
    g_error = "file index out of range";
    return nullptr;
  }
  return run->result.files[index].first.c_str();
}

const char* il_run_file_content(const il_run* run, size_t index) {
  if (!run || index >= run->result.files.size()) {
    g_error = "file index out of range";
    return nullptr;
  }
  return run->result.files[index].second.c_str();
}

void il_run_free(il_run* run) { delete run; }

il_status il_srw_simulate(int64_t start, double jump_rate, double horizon, uint64_t seed,
                          uint32_t experiment, uint32_t replicate, il_path** out_path) {
  if (!out_path) return fail(IL_ERR_INVALID_ARGUMENT, "out_path is null");
  *out_path = nullptr;
  try {
    interlab::KeyedStream stream(interlab::StreamKey{seed, experiment, replicate, 0,
                                                     interlab::StreamFamily::kPrimary});
    interlab::CadlagPath path =
        interlab::simulate_srw(interlab::WalkSpec{start, jump_rate, horizon}, stream);
    *out_path = new il_path{std::move(path)};
    g_error.clear();
    return IL_OK;
  } catch (...) {
    return from_exception();
  }
}

double il_path_value_at(const il_path* path, double t) {
  if (!path) return nan_error("path is null");
  try {
    return path->path.value_at(t);
  } catch (const std::exception& e) {
    return nan_error(e.what());
  }
}

double il_path_horizon(const il_path* path) {
  if (!path) return nan_error("path is null");
  return path->path.horizon();
}

size_t il_path_jump_count(const il_path* path) { return path ? path->path.jump_count() : 0; }

il_status il_path_write_csv(const il_path* path, const char* file_path) {
  if (!path) return fail(IL_ERR_INVALID_ARGUMENT, "path is null");
  if (!file_path) return fail(IL_ERR_INVALID_ARGUMENT, "file_path is null");
  try {
    std::ofstream os(file_path, std::ios::binary);
    if (!os) return fail(IL_ERR_IO, std::string("cannot open ") + file_path);
    path->path.write_csv(os);
    os.flush();
    if (!os) return fail(IL_ERR_IO, std::string("write failed for ") + file_path);
    g_error.clear();
    return IL_OK;
  } catch (...) {
    return from_exception();
  }
}

void il_path_free(il_path* path) { delete path; }

double il_rbm_transition_density(double x, double y, double t) {
  try {
    return interlab::rbm_transition_density(x, y, t);
  } catch (const std::exception& e) {
    return nan_error(e.what());
  }
}

double il_rbm_transition_cdf(double x, double y, double t) {
  try {
    return interlab::rbm_transition_cdf(x, y, t);
  } catch (const std::exception& e) {
    return nan_error(e.what());
  }
}

}  // extern "C"
