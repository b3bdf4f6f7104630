#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include <nlohmann/json.hpp>

#include "interlab/error.hpp"
#include "interlab/ssep.hpp"

using namespace interlab;
using nlohmann::json;

TEST_CASE("profiles discretize onto the vertex scale") {
  std::vector<std::uint8_t> left = discretize_profile(Profile::indicator(0.0, 0.5), 8);
  CHECK(left == std::vector<std::uint8_t>{1, 1, 1, 1, 0, 0, 0, 0});

  std::vector<std::uint8_t> full = discretize_profile(Profile::indicator(0.0, 1.0), 5);
  CHECK(full == std::vector<std::uint8_t>{1, 1, 1, 1, 1});

  std::vector<std::uint8_t> mid = discretize_profile(Profile::indicator(0.25, 0.75), 4);
  CHECK(mid == std::vector<std::uint8_t>{1, 1, 1, 0});

  std::vector<std::uint8_t> seeds = discretize_profile(Profile::atoms({0.1, 0.9}), 10);
  CHECK(seeds == std::vector<std::uint8_t>{1, 0, 0, 0, 0, 0, 0, 0, 1, 0});

  std::vector<std::uint8_t> clamped = discretize_profile(Profile::atoms({0.0, 0.02, 1.0}), 10);
  std::int64_t count = std::accumulate(clamped.begin(), clamped.end(), std::int64_t{0});
  CHECK(clamped[0] == 1);
  CHECK(clamped[9] == 1);
  CHECK(count == 2);  // 0.0 and 0.02 both land on vertex 1
}

TEST_CASE("profile json round-trip and validation") {
  Profile p = Profile::indicator(0.25, 0.75);
  Profile q = Profile::from_json(p.to_json());
  CHECK(q.kind == Profile::Kind::kIndicator);
  CHECK(q.a == 0.25);
  CHECK(q.b == 0.75);

  Profile a = Profile::atoms({0.3, 0.6});
  Profile b = Profile::from_json(a.to_json());
  CHECK(b.kind == Profile::Kind::kAtoms);
  CHECK(b.positions == std::vector<double>{0.3, 0.6});

  CHECK_THROWS_AS(Profile::from_json(json{{"type", "wedge"}}), InvalidArgument);
  CHECK_THROWS_AS(Profile::from_json(json::parse("[1,2]")), InvalidArgument);
  CHECK_THROWS_AS(Profile::indicator(0.8, 0.2), InvalidArgument);
  CHECK_THROWS_AS(Profile::atoms({1.5}), InvalidArgument);
  CHECK_THROWS_AS(Profile::atoms({}), InvalidArgument);
}

TEST_CASE("profile initial laws match their kind") {
  InitialLaw uni = Profile::indicator(0.2, 0.6).initial_law();
  CHECK(uni.kind == InitialLaw::Kind::kUniform);
  CHECK(uni.a == 0.2);
  CHECK(uni.b == 0.6);

  InitialLaw point = Profile::indicator(0.4, 0.4).initial_law();
  CHECK(point.kind == InitialLaw::Kind::kDirac);
  CHECK(point.x == 0.4);

  InitialLaw atoms = Profile::atoms({0.1, 0.5}).initial_law();
  CHECK(atoms.kind == InitialLaw::Kind::kAtoms);
  CHECK(atoms.atoms == std::vector<double>{0.1, 0.5});
}

TEST_CASE("exclusion dynamics conserve particles and replay exactly") {
  SsepConfig cfg{16, 0.5};
  std::vector<std::uint8_t> eta0 = discretize_profile(Profile::indicator(0.0, 0.5), 16);
  std::int64_t mass0 = std::accumulate(eta0.begin(), eta0.end(), std::int64_t{0});

  std::vector<std::vector<std::uint8_t>> snaps;
  std::vector<double> times{10.0, 40.0, 90.0};
  run_ssep(cfg, eta0, times, 71u, 1060u, 0u, [&](std::size_t, const std::vector<std::uint8_t>& eta) {
    snaps.push_back(eta);
  });
  REQUIRE(snaps.size() == 3);
  for (const auto& eta : snaps) {
    CHECK(eta.size() == 16);
    CHECK(std::accumulate(eta.begin(), eta.end(), std::int64_t{0}) == mass0);
  }
  CHECK(snaps[1] != eta0);  // after 40 micro units some swap has fired

  std::vector<std::vector<std::uint8_t>> replay;
  run_ssep(cfg, eta0, times, 71u, 1060u, 0u, [&](std::size_t, const std::vector<std::uint8_t>& eta) {
    replay.push_back(eta);
  });
  CHECK(replay == snaps);
}

TEST_CASE("fully packed configurations are frozen") {
  SsepConfig cfg{6, 0.5};
  std::vector<std::uint8_t> full(6, 1);
  run_ssep(cfg, full, {25.0, 50.0}, 73u, 1061u, 0u,
           [&](std::size_t, const std::vector<std::uint8_t>& eta) {
             CHECK(eta == full);
           });
  std::vector<std::uint8_t> empty(6, 0);
  run_ssep(cfg, empty, {25.0}, 73u, 1061u, 1u,
           [&](std::size_t, const std::vector<std::uint8_t>& eta) {
             CHECK(eta == empty);
           });
}

TEST_CASE("a single exclusion particle moves like the tagged path") {
  SsepConfig cfg{9, 0.5};
  std::vector<std::uint8_t> eta0(9, 0);
  eta0[4] = 1;  // vertex 5

  std::vector<double> times;
  for (int k = 1; k <= 40; ++k) times.push_back(0.5 * k);
  std::vector<std::int64_t> occupied;
  run_ssep(cfg, eta0, times, 77u, 1062u, 3u,
           [&](std::size_t, const std::vector<std::uint8_t>& eta) {
             for (std::int64_t v = 1; v <= 9; ++v)
               if (eta[std::size_t(v - 1)]) occupied.push_back(v);
           });
  REQUIRE(occupied.size() == times.size());

  CadlagPath tagged = ssep_single_particle_path(cfg, 5, 20.0, 77u, 1062u, 3u);
  CHECK(tagged.value_at(0.0) == 5.0);
  for (std::size_t k = 0; k < times.size(); ++k)
    CHECK(tagged.value_at(times[k]) == double(occupied[k]));
}

TEST_CASE("empirical densities weight occupied vertices equally") {
  std::vector<std::uint8_t> eta{1, 0, 0, 1};
  PointMeasure m = empirical_density(eta, 4);
  REQUIRE(m.size() == 2);
  CHECK(m.locations()[0] == doctest::Approx(0.25));
  CHECK(m.locations()[1] == doctest::Approx(1.0));
  CHECK(m.weights()[0] == doctest::Approx(0.5));
  CHECK_THROWS_AS(empirical_density({0, 0}, 2), InvalidArgument);
  CHECK_THROWS_AS(empirical_density({1, 1, 1}, 2), InvalidArgument);
}

TEST_CASE("degenerate exclusion inputs are rejected") {
  SsepConfig cfg{4, 0.5};
  std::vector<std::uint8_t> eta0{1, 0, 0, 0};
  auto sink = [](std::size_t, const std::vector<std::uint8_t>&) {};
  CHECK_THROWS_AS(run_ssep(cfg, {1, 0}, {1.0}, 1u, 1063u, 0u, sink), InvalidArgument);
  CHECK_THROWS_AS(run_ssep(cfg, eta0, {2.0, 1.0}, 1u, 1063u, 0u, sink), InvalidArgument);
  CHECK_THROWS_AS(run_ssep(cfg, eta0, {-1.0}, 1u, 1063u, 0u, sink), InvalidArgument);
  CHECK_THROWS_AS(ssep_single_particle_path(cfg, 0, 1.0, 1u, 1063u, 0u), InvalidArgument);
  CHECK_THROWS_AS(ssep_single_particle_path(cfg, 5, 1.0, 1u, 1063u, 0u), InvalidArgument);
  CHECK_THROWS_AS(discretize_profile(Profile::indicator(0.0, 0.5), 0), InvalidArgument);
}
