#pragma once

#include <cmath>
#include <cstdint>
#include <queue>
#include <utility>
#include <vector>

#include "interlab/error.hpp"
#include "interlab/measures.hpp"
#include "interlab/path.hpp"
#include "interlab/rng.hpp"

namespace interlab {

// Path graph on vertices {1..n} with edges {i,i+1} for 1 <= i < n plus
// self-loops at both endpoints, so every vertex has degree 2.  Edge e is
// {e, e+1} for 1 <= e <= n-1; edges 0 and n are the loops at 1 and n.
struct PathGraphConfig {
  std::int64_t n = 1;
  double edge_rate = 0.5;
  double horizon_micro = 1.0;
};

inline void validate(const PathGraphConfig& cfg) {
  require(cfg.n >= 1, "path graph: n must be >= 1");
  require(cfg.edge_rate > 0.0 && std::isfinite(cfg.edge_rate),
          "path graph: edge rate must be positive");
  require(cfg.horizon_micro >= 0.0 && std::isfinite(cfg.horizon_micro),
          "path graph: horizon must be nonnegative");
}

// Merged per-edge Poisson firings in strictly increasing time order over
// [0, horizon).  Each edge owns a keyed stream, so the event sequence is a
// pure function of (seed, experiment, replicate).  Simultaneous firings at
// floating resolution are ordered by edge id and nudged apart by one ulp.
template <typename OnEvent>
void for_each_edge_event(const PathGraphConfig& cfg, std::uint64_t master_seed,
                         std::uint32_t experiment, std::uint32_t replicate,
                         OnEvent&& on_event) {
  validate(cfg);
  const std::int64_t edges = cfg.n + 1;
  std::vector<KeyedStream> streams;
  streams.reserve(std::size_t(edges));
  using Entry = std::pair<double, std::int64_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
  for (std::int64_t e = 0; e < edges; ++e) {
    streams.emplace_back(
        StreamKey{master_seed, experiment, replicate, e, StreamFamily::kPrimary});
    double t = advance_time(0.0, streams.back().exponential(cfg.edge_rate));
    if (t < cfg.horizon_micro) heap.emplace(t, e);
  }
  double last = 0.0;
  while (!heap.empty()) {
    auto [t, e] = heap.top();
    heap.pop();
    if (t <= last) t = advance_time(last, 0.0);
    if (t >= cfg.horizon_micro) continue;
    last = t;
    on_event(t, e);
    double nt = advance_time(t, streams[std::size_t(e)].exponential(cfg.edge_rate));
    if (nt < cfg.horizon_micro) heap.emplace(nt, e);
  }
}

// Event log of one interchange run.  Particles are labeled by their starting
// vertex; inner-edge firings swap the occupants of the edge's endpoints.
class PermutationTrajectory {
 public:
  PermutationTrajectory(std::int64_t n, double horizon_micro);

  void record_event(double time, std::int64_t edge);

  std::int64_t n() const { return n_; }
  double horizon_micro() const { return horizon_; }
  const std::vector<std::pair<double, std::int64_t>>& swaps() const { return swaps_; }
  const std::vector<std::int64_t>& edge_event_counts() const { return counts_; }
  std::int64_t total_events() const { return total_events_; }

  // positions_at(t)[i-1] is the vertex occupied at time t by the particle
  // that started at vertex i.
  std::vector<std::int64_t> positions_at(double t_micro) const;
  CadlagPath particle_path(std::int64_t particle) const;

 private:
  std::int64_t n_;
  double horizon_;
  double last_time_ = 0.0;
  std::int64_t total_events_ = 0;
  std::vector<std::pair<double, std::int64_t>> swaps_;  // inner edges only
  std::vector<std::int64_t> counts_;                    // all edges, loops included
};

PermutationTrajectory simulate_interchange(const PathGraphConfig& cfg,
                                           std::uint64_t master_seed,
                                           std::uint32_t experiment,
                                           std::uint32_t replicate);

// Diffusive rescaling of one particle: value at macro time t is the particle's
// vertex at micro time n^2 t divided by n.  The log must cover [0, n^2 T].
CadlagPath rescaled_trajectory(const PermutationTrajectory& traj, std::int64_t particle,
                               double T_macro);

// Empirical measure of all rescaled positions at macro time t: by bijectivity
// this is exactly uniform on {1/n, ..., 1}.
PointMeasure empirical_marginal(const PermutationTrajectory& traj, double t_macro);

// Covering map Z -> {1..n}: reduce mod 2n into {1..2n}, reflect y > n to
// 2n+1-y.  Adjacent integers map to adjacent-or-equal vertices.
std::int64_t fold_lattice(std::int64_t x, std::int64_t n);

// Covering map R -> [0,1]: reduce mod 2 into (0,2], reflect y > 1 to 2-y.
double fold_real(double x);

// Interchange on Z restricted to the tracked particles: only edges incident
// to a tracked position can change the tracked set, so each step races
// exponential clocks over those edges (resampled by memorylessness).  A
// shared-edge firing swaps both trackers.  Returns one path per start.
std::vector<CadlagPath> tracked_lattice_interchange(const std::vector<std::int64_t>& starts,
                                                    double edge_rate, double T_micro,
                                                    KeyedStream& stream);

}  // namespace interlab
