#include "interlab/interchange.hpp"

#include <algorithm>
#include <cmath>

namespace interlab {

PermutationTrajectory::PermutationTrajectory(std::int64_t n, double horizon_micro)
    : n_(n), horizon_(horizon_micro), counts_(std::size_t(n) + 1, 0) {
  require(n >= 1, "PermutationTrajectory: n must be >= 1");
  require(horizon_micro >= 0.0 && std::isfinite(horizon_micro),
          "PermutationTrajectory: horizon must be nonnegative");
}

void PermutationTrajectory::record_event(double time, std::int64_t edge) {
  require(edge >= 0 && edge <= n_, "PermutationTrajectory: edge id out of range");
  require(time > last_time_ && time < horizon_,
          "PermutationTrajectory: event times must increase within [0, horizon)");
  last_time_ = time;
  ++counts_[std::size_t(edge)];
  ++total_events_;
  if (edge >= 1 && edge <= n_ - 1) swaps_.emplace_back(time, edge);
}

std::vector<std::int64_t> PermutationTrajectory::positions_at(double t_micro) const {
  require(t_micro >= 0.0 && t_micro <= horizon_,
          "PermutationTrajectory: query outside [0, horizon]");
  std::vector<std::int64_t> occupant(static_cast<std::size_t>(n_));
  for (std::int64_t v = 1; v <= n_; ++v) occupant[std::size_t(v - 1)] = v;
  for (const auto& [t, e] : swaps_) {
    if (t > t_micro) break;
    std::swap(occupant[std::size_t(e - 1)], occupant[std::size_t(e)]);
  }
  std::vector<std::int64_t> position(static_cast<std::size_t>(n_));
  for (std::int64_t v = 1; v <= n_; ++v) {
    position[std::size_t(occupant[std::size_t(v - 1)] - 1)] = v;
  }
  return position;
}

CadlagPath PermutationTrajectory::particle_path(std::int64_t particle) const {
  require(particle >= 1 && particle <= n_, "PermutationTrajectory: no such particle");
  CadlagPath path(double(particle), horizon_);
  std::int64_t cur = particle;
  for (const auto& [t, e] : swaps_) {
    if (cur == e) {
      cur = e + 1;
    } else if (cur == e + 1) {
      cur = e;
    } else {
      continue;
    }
    path.append_jump(t, double(cur));
  }
  return path;
}

PermutationTrajectory simulate_interchange(const PathGraphConfig& cfg,
                                           std::uint64_t master_seed,
                                           std::uint32_t experiment,
                                           std::uint32_t replicate) {
  PermutationTrajectory traj(cfg.n, cfg.horizon_micro);
  for_each_edge_event(cfg, master_seed, experiment, replicate,
                      [&](double t, std::int64_t e) { traj.record_event(t, e); });
  return traj;
}

CadlagPath rescaled_trajectory(const PermutationTrajectory& traj, std::int64_t particle,
                               double T_macro) {
  require(T_macro >= 0.0 && std::isfinite(T_macro),
          "rescaled_trajectory: horizon must be nonnegative");
  const double n = double(traj.n());
  const double n2 = n * n;
  require(traj.horizon_micro() >= n2 * T_macro,
          "rescaled_trajectory: micro horizon shorter than n^2 T");
  require(particle >= 1 && particle <= traj.n(), "rescaled_trajectory: no such particle");
  CadlagPath path(double(particle) / n, T_macro);
  std::int64_t cur = particle;
  double prev = 0.0;
  for (const auto& [t, e] : traj.swaps()) {
    if (t > n2 * T_macro) break;
    if (cur == e) {
      cur = e + 1;
    } else if (cur == e + 1) {
      cur = e;
    } else {
      continue;
    }
    double mt = t / n2;
    if (mt <= prev) mt = advance_time(prev, 0.0);
    if (mt > T_macro) break;
    path.append_jump(mt, double(cur) / n);
    prev = mt;
  }
  return path;
}

PointMeasure empirical_marginal(const PermutationTrajectory& traj, double t_macro) {
  const double n = double(traj.n());
  auto pos = traj.positions_at(t_macro * n * n);
  std::vector<double> atoms(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) atoms[i] = double(pos[i]) / n;
  return PointMeasure::uniform_atoms(std::move(atoms));
}

std::int64_t fold_lattice(std::int64_t x, std::int64_t n) {
  require(n >= 1, "fold_lattice: n must be >= 1");
  std::int64_t period = 2 * n;
  std::int64_t y = x % period;
  if (y <= 0) y += period;  // representative in {1..2n}
  return y <= n ? y : period + 1 - y;
}

double fold_real(double x) {
  require(std::isfinite(x), "fold_real: input must be finite");
  double y = std::fmod(x, 2.0);
  if (y <= 0.0) y += 2.0;  // representative in (0,2]
  return y <= 1.0 ? y : 2.0 - y;
}

std::vector<CadlagPath> tracked_lattice_interchange(const std::vector<std::int64_t>& starts,
                                                    double edge_rate, double T_micro,
                                                    KeyedStream& stream) {
  require(!starts.empty(), "tracked interchange: needs at least one particle");
  require(edge_rate > 0.0 && std::isfinite(edge_rate),
          "tracked interchange: edge rate must be positive");
  require(T_micro >= 0.0 && std::isfinite(T_micro),
          "tracked interchange: horizon must be nonnegative");
  std::size_t k = starts.size();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      require(starts[i] != starts[j], "tracked interchange: starts must be distinct");
    }
  }
  std::vector<std::int64_t> pos = starts;
  std::vector<CadlagPath> paths;
  paths.reserve(k);
  for (std::int64_t s : starts) paths.emplace_back(double(s), T_micro);
  std::vector<std::int64_t> edges;
  edges.reserve(2 * k);
  double t = 0.0;
  for (;;) {
    // Edge {x, x+1} carries id x; each tracked particle touches ids x-1 and x.
    edges.clear();
    for (std::int64_t x : pos) {
      edges.push_back(x - 1);
      edges.push_back(x);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    t = advance_time(t, stream.exponential(edge_rate * double(edges.size())));
    if (t >= T_micro) break;
    std::int64_t e = edges[stream.uniform_below(std::uint32_t(edges.size()))];
    for (std::size_t i = 0; i < k; ++i) {
      if (pos[i] == e) {
        pos[i] = e + 1;
      } else if (pos[i] == e + 1) {
        pos[i] = e;
      } else {
        continue;
      }
      paths[i].append_jump(t, double(pos[i]));
    }
  }
  return paths;
}

}  // namespace interlab
