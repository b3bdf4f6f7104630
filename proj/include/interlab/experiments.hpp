#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace interlab {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 20260819;

// One executed experiment command: the canonical manifest that reproduces it,
// a verdict object with one row per statistical check, and the output files
// as (name, content) pairs.  Outputs are a pure function of the manifest;
// the worker count only changes wall time, never a byte of output.
struct RunResult {
  nlohmann::json manifest;
  nlohmann::json verdict;
  std::vector<std::pair<std::string, std::string>> files;
  bool passed = true;
};

// Commands: simulate, verify-visits, verify-returns-scaling,
// verify-concentration, verify-tightness, verify-hydrodynamic,
// verify-independence, verify-marginals, report.  Unknown or malformed
// manifests throw InvalidArgument; a failed statistical check does not throw,
// it returns passed = false.
RunResult run_manifest(const nlohmann::json& manifest, int workers = 1);

// Writes manifest.json, verdict.json and every report file into out_dir,
// creating the directory if needed.
void write_run_outputs(const RunResult& result, const std::string& out_dir);

}  // namespace interlab
