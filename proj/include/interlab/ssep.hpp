#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

#include "interlab/error.hpp"
#include "interlab/measures.hpp"
#include "interlab/path.hpp"
#include "interlab/reflected_bm.hpp"

namespace interlab {

// Macroscopic initial condition for the exclusion process: either the
// indicator of an interval or a finite set of seeded sites.
struct Profile {
  enum class Kind { kIndicator, kAtoms };
  Kind kind = Kind::kIndicator;
  double a = 0.0, b = 1.0;        // kIndicator support
  std::vector<double> positions;  // kAtoms, macroscopic in [0,1]

  static Profile indicator(double a, double b);
  static Profile atoms(std::vector<double> positions);
  static Profile from_json(const nlohmann::json& spec);
  nlohmann::json to_json() const;

  // Continuum law matched to the profile: uniform on [a,b] (a point mass when
  // the interval degenerates), or equally weighted atoms.
  InitialLaw initial_law() const;
};

// Occupancy on {1..n} (index v-1 holds vertex v): indicator profiles occupy
// every vertex with a <= v/n <= b; atom profiles occupy round(p*n) clamped to
// [1,n], duplicates merged.
std::vector<std::uint8_t> discretize_profile(const Profile& profile, std::int64_t n);

// Symmetric exclusion on the path {1..n}: each of the n+1 edges carries an
// independent Poisson clock at edge_rate, inner firings swap the occupancy of
// the endpoints, loop firings do nothing.  Snapshots are delivered in order;
// the state at time s reflects every firing up to and including s.  Particle
// count is checked for conservation at each snapshot.
struct SsepConfig {
  std::int64_t n = 1;
  double edge_rate = 0.5;
};

void run_ssep(const SsepConfig& cfg, const std::vector<std::uint8_t>& eta0,
              const std::vector<double>& snapshot_times_micro, std::uint64_t master_seed,
              std::uint32_t experiment, std::uint32_t replicate,
              const std::function<void(std::size_t, const std::vector<std::uint8_t>&)>& on_snapshot);

// Equal-weight empirical measure of the occupied sites, as atoms at v/n.
PointMeasure empirical_density(const std::vector<std::uint8_t>& eta, std::int64_t n);

// Trajectory of the particle started at start_vertex when every site evolves
// by the same edge firings; with matching keys this reproduces exactly the
// occupied-site motion of a single-particle exclusion run.
CadlagPath ssep_single_particle_path(const SsepConfig& cfg, std::int64_t start_vertex,
                                     double horizon_micro, std::uint64_t master_seed,
                                     std::uint32_t experiment, std::uint32_t replicate);

}  // namespace interlab
