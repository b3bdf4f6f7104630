#include "interlab/ssep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "interlab/interchange.hpp"

namespace interlab {

Profile Profile::indicator(double a, double b) {
  require(a >= 0.0 && a <= b && b <= 1.0, "profile: need 0 <= a <= b <= 1");
  Profile p;
  p.kind = Kind::kIndicator;
  p.a = a;
  p.b = b;
  return p;
}

Profile Profile::atoms(std::vector<double> positions) {
  require(!positions.empty(), "profile: need at least one atom");
  for (double x : positions)
    require(x >= 0.0 && x <= 1.0, "profile: atoms must lie in [0,1]");
  Profile p;
  p.kind = Kind::kAtoms;
  p.positions = std::move(positions);
  return p;
}

Profile Profile::from_json(const nlohmann::json& spec) {
  require(spec.is_object() && spec.contains("type"), "profile: expected {type:...}");
  std::string type = spec.at("type").get<std::string>();
  if (type == "indicator") {
    require(spec.contains("support") && spec.at("support").is_array() &&
                spec.at("support").size() == 2,
            "profile: indicator needs support:[a,b]");
    return indicator(spec.at("support").at(0).get<double>(),
                     spec.at("support").at(1).get<double>());
  }
  if (type == "atoms") {
    require(spec.contains("positions") && spec.at("positions").is_array(),
            "profile: atoms needs positions:[...]");
    return atoms(spec.at("positions").get<std::vector<double>>());
  }
  throw InvalidArgument("profile: unknown type '" + type + "'");
}

nlohmann::json Profile::to_json() const {
  if (kind == Kind::kIndicator)
    return nlohmann::json{{"type", "indicator"}, {"support", {a, b}}};
  return nlohmann::json{{"type", "atoms"}, {"positions", positions}};
}

InitialLaw Profile::initial_law() const {
  if (kind == Kind::kIndicator) return a < b ? InitialLaw::uniform(a, b) : InitialLaw::dirac(a);
  return InitialLaw::equal_atoms(positions);
}

std::vector<std::uint8_t> discretize_profile(const Profile& profile, std::int64_t n) {
  require(n >= 1, "profile: n must be positive");
  std::vector<std::uint8_t> eta(std::size_t(n), 0);
  if (profile.kind == Profile::Kind::kIndicator) {
    for (std::int64_t v = 1; v <= n; ++v) {
      double x = double(v) / double(n);
      if (x >= profile.a && x <= profile.b) eta[std::size_t(v - 1)] = 1;
    }
  } else {
    for (double p : profile.positions) {
      std::int64_t v = std::llround(p * double(n));
      v = std::clamp<std::int64_t>(v, 1, n);
      eta[std::size_t(v - 1)] = 1;
    }
  }
  require(std::find(eta.begin(), eta.end(), std::uint8_t(1)) != eta.end(),
          "profile: no occupied site at this n");
  return eta;
}

void run_ssep(const SsepConfig& cfg, const std::vector<std::uint8_t>& eta0,
              const std::vector<double>& snapshot_times_micro, std::uint64_t master_seed,
              std::uint32_t experiment, std::uint32_t replicate,
              const std::function<void(std::size_t, const std::vector<std::uint8_t>&)>& on_snapshot) {
  require(cfg.n >= 1, "ssep: n must be positive");
  require(cfg.edge_rate > 0.0 && std::isfinite(cfg.edge_rate), "ssep: edge rate must be positive");
  require(eta0.size() == std::size_t(cfg.n), "ssep: initial state size must equal n");
  for (std::uint8_t v : eta0) require(v <= 1, "ssep: occupancies must be 0 or 1");
  require(!snapshot_times_micro.empty(), "ssep: need at least one snapshot time");
  double prev = -1.0;
  for (double s : snapshot_times_micro) {
    require(std::isfinite(s) && s >= 0.0 && s > prev, "ssep: snapshot times must be increasing");
    prev = s;
  }

  std::vector<std::uint8_t> eta = eta0;
  std::size_t particles = 0;
  for (std::uint8_t v : eta) particles += v;

  std::size_t next = 0;
  auto flush_through = [&](double time) {
    while (next < snapshot_times_micro.size() && snapshot_times_micro[next] < time) {
      std::size_t count = 0;
      for (std::uint8_t v : eta) count += v;
      if (count != particles) throw RuntimeFailure("ssep: particle count not conserved");
      on_snapshot(next, eta);
      ++next;
    }
  };

  PathGraphConfig graph;
  graph.n = cfg.n;
  graph.edge_rate = cfg.edge_rate;
  double last = snapshot_times_micro.back();
  graph.horizon_micro = std::nextafter(last, std::numeric_limits<double>::infinity());
  for_each_edge_event(graph, master_seed, experiment, replicate,
                      [&](double t, std::int64_t e) {
                        flush_through(t);
                        if (e >= 1 && e <= cfg.n - 1)
                          std::swap(eta[std::size_t(e - 1)], eta[std::size_t(e)]);
                      });
  flush_through(std::numeric_limits<double>::infinity());
}

PointMeasure empirical_density(const std::vector<std::uint8_t>& eta, std::int64_t n) {
  require(n >= 1 && eta.size() == std::size_t(n), "empirical density: state size must equal n");
  std::vector<double> locations;
  for (std::int64_t v = 1; v <= n; ++v)
    if (eta[std::size_t(v - 1)]) locations.push_back(double(v) / double(n));
  require(!locations.empty(), "empirical density: no occupied site");
  return PointMeasure::uniform_atoms(locations);
}

CadlagPath ssep_single_particle_path(const SsepConfig& cfg, std::int64_t start_vertex,
                                     double horizon_micro, std::uint64_t master_seed,
                                     std::uint32_t experiment, std::uint32_t replicate) {
  require(cfg.n >= 1, "ssep: n must be positive");
  require(start_vertex >= 1 && start_vertex <= cfg.n, "ssep: start vertex out of range");
  require(horizon_micro > 0.0 && std::isfinite(horizon_micro), "ssep: horizon must be positive");
  PathGraphConfig graph;
  graph.n = cfg.n;
  graph.edge_rate = cfg.edge_rate;
  graph.horizon_micro = horizon_micro;
  CadlagPath path(double(start_vertex), horizon_micro);
  std::int64_t pos = start_vertex;
  for_each_edge_event(graph, master_seed, experiment, replicate,
                      [&](double t, std::int64_t e) {
                        if (e < 1 || e > cfg.n - 1) return;
                        if (pos == e)
                          ++pos;
                        else if (pos == e + 1)
                          --pos;
                        else
                          return;
                        path.append_jump(t, double(pos));
                      });
  return path;
}

}  // namespace interlab
