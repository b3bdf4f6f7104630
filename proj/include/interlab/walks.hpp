#pragma once

#include <cstdint>
#include <vector>

#include "interlab/path.hpp"
#include "interlab/rng.hpp"

namespace interlab {

// Continuous-time simple random walk on Z: jumps at rate jump_rate, each jump
// +1 or -1 with probability 1/2.
struct WalkSpec {
  std::int64_t start = 0;
  double jump_rate = 1.0;
  double horizon = 1.0;
};

CadlagPath simulate_srw(const WalkSpec& spec, KeyedStream& stream);

// Displacement over time t of a rate-r walk, sampled directly as the
// difference of two Poisson(r t / 2) draws (jump counts up and down).
std::int64_t sample_srw_displacement(double t, double jump_rate, KeyedStream& stream);

// P(S(t) - S(0) = displacement) for a rate-r walk, summed over the Poisson
// number of jumps with a certified truncation error below 1e-12.
double walk_pmf_oracle(double t, double jump_rate, std::int64_t displacement);

// Discrete-time walk: expected number of indices 0 <= k <= n_steps with
// S_k = 0 given S_0 = start, from exact binomial point masses.
double expected_visits_oracle(int n_steps, std::int64_t start);

// Continuous-time walk: expected number of visits to `target` during [0, T]
// (the initial state counts when start == target, then one per jump landing
// on target), truncated with certified error below 1e-12.
double expected_visits_ct_oracle(double T, double jump_rate, std::int64_t start,
                                 std::int64_t target);

// Embedded-chain visit count: 1 if the path starts in the target set, plus
// the number of jumps landing in the set during (0, T].
std::int64_t count_visits(const CadlagPath& path, const std::vector<double>& targets,
                          double T);

// Walk on {0, 1, 2, ...}: each edge {i, i+1} fires at edge_rate moving the
// walker across, and a self-loop at 0 fires at loop_rate_at_zero leaving the
// walker in place (the no-op is not recorded as a jump).  Because the loop
// never moves the walker, the position law does not depend on it: for any
// loop rate the path is distributed as the rate-2*edge_rate walk on Z folded
// through x -> x for x >= 0, x -> -x-1 for x < 0.
struct HalfLineSpec {
  std::int64_t start = 0;
  double edge_rate = 1.0;
  double loop_rate_at_zero = 0.5;
};

CadlagPath simulate_halfline(const HalfLineSpec& spec, double horizon, KeyedStream& stream);

}  // namespace interlab
