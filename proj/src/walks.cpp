#include "interlab/walks.hpp"

#include <algorithm>
#include <cmath>

#include "interlab/error.hpp"

namespace interlab {

namespace {

double lgamma_safe(double x) {
  int sign = 0;
  return lgamma_r(x, &sign);
}

double log_poisson_pmf(std::int64_t k, double lambda) {
  return -lambda + double(k) * std::log(lambda) - lgamma_safe(double(k) + 1.0);
}

// P(Z_k = d) for a k-step +-1 walk with fair steps; zero on parity mismatch.
double step_walk_pmf(std::int64_t k, std::int64_t d) {
  std::int64_t a = std::llabs(d);
  if (a > k || ((k - a) & 1) != 0) return 0.0;
  double up = double(k + a) / 2.0, down = double(k - a) / 2.0;
  return std::exp(lgamma_safe(double(k) + 1.0) - lgamma_safe(up + 1.0) -
                  lgamma_safe(down + 1.0) - double(k) * std::log(2.0));
}

constexpr std::int64_t kMaxTerms = 20'000'000;

// Smallest K >= floor(2*lambda) + lo with 4 * pois(K + 1; lambda) < eps.  For
// K >= 2*lambda the pmf ratio is at most 1/2, so P(N > K) <= 2 pois(K+1) and
// sum_{k > K} P(N >= k) <= 4 pois(K+1).
std::int64_t certified_cutoff(double lambda, std::int64_t lo, double eps) {
  std::int64_t K = std::max<std::int64_t>(lo, std::int64_t(2.0 * lambda) + 2);
  while (K < kMaxTerms) {
    if (4.0 * std::exp(log_poisson_pmf(K + 1, lambda)) < eps) return K;
    K += 1 + K / 8;
  }
  throw RuntimeFailure("walk oracle: truncation bound not reached");
}

}  // namespace

CadlagPath simulate_srw(const WalkSpec& spec, KeyedStream& stream) {
  require(spec.jump_rate > 0.0 && std::isfinite(spec.jump_rate),
          "simulate_srw: jump rate must be positive");
  require(spec.horizon >= 0.0 && std::isfinite(spec.horizon),
          "simulate_srw: horizon must be nonnegative");
  CadlagPath path(double(spec.start), spec.horizon);
  double t = 0.0, x = double(spec.start);
  for (;;) {
    t = advance_time(t, stream.exponential(spec.jump_rate));
    if (t > spec.horizon) break;
    x += stream.uniform01() < 0.5 ? -1.0 : 1.0;
    path.append_jump(t, x);
  }
  return path;
}

std::int64_t sample_srw_displacement(double t, double jump_rate, KeyedStream& stream) {
  require(t >= 0.0 && std::isfinite(t), "sample_srw_displacement: time must be nonnegative");
  require(jump_rate > 0.0 && std::isfinite(jump_rate),
          "sample_srw_displacement: jump rate must be positive");
  double half = 0.5 * jump_rate * t;
  if (half == 0.0) return 0;
  std::int64_t up = std::int64_t(stream.poisson(half));
  std::int64_t down = std::int64_t(stream.poisson(half));
  return up - down;
}

double walk_pmf_oracle(double t, double jump_rate, std::int64_t displacement) {
  require(t >= 0.0 && std::isfinite(t), "walk_pmf_oracle: time must be nonnegative");
  require(jump_rate > 0.0 && std::isfinite(jump_rate),
          "walk_pmf_oracle: jump rate must be positive");
  std::int64_t a = std::llabs(displacement);
  double lambda = jump_rate * t;
  if (lambda == 0.0) return a == 0 ? 1.0 : 0.0;
  std::int64_t K = certified_cutoff(lambda, a, 1e-13);
  // pois(k) * C(k, (k+a)/2) * 2^-k = exp(-lambda) (lambda/2)^k / (((k+a)/2)! ((k-a)/2)!)
  double sum = 0.0;
  for (std::int64_t k = a; k <= K; k += 2) {
    double up = double(k + a) / 2.0, down = double(k - a) / 2.0;
    sum += std::exp(-lambda + double(k) * std::log(lambda / 2.0) -
                    lgamma_safe(up + 1.0) - lgamma_safe(down + 1.0));
  }
  return sum;
}

double expected_visits_oracle(int n_steps, std::int64_t start) {
  require(n_steps >= 0, "expected_visits_oracle: step count must be nonnegative");
  double sum = 0.0;
  for (std::int64_t k = 0; k <= n_steps; ++k) sum += step_walk_pmf(k, -start);
  return sum;
}

double expected_visits_ct_oracle(double T, double jump_rate, std::int64_t start,
                                 std::int64_t target) {
  require(T >= 0.0 && std::isfinite(T), "expected_visits_ct_oracle: T must be nonnegative");
  require(jump_rate > 0.0 && std::isfinite(jump_rate),
          "expected_visits_ct_oracle: jump rate must be positive");
  std::int64_t d = target - start;
  double total = start == target ? 1.0 : 0.0;
  double lambda = jump_rate * T;
  if (lambda == 0.0) return total;
  std::int64_t K = certified_cutoff(lambda, std::llabs(d), 1e-13);
  std::vector<double> pmf(std::size_t(K) + 1);
  pmf[0] = std::exp(-lambda);
  for (std::int64_t k = 1; k <= K; ++k) pmf[std::size_t(k)] = pmf[std::size_t(k - 1)] * lambda / double(k);
  // tail[k] = P(N >= k); the mass beyond K is below the certified cutoff bound.
  std::vector<double> tail(std::size_t(K) + 2, 0.0);
  for (std::int64_t k = K; k >= 0; --k) tail[std::size_t(k)] = tail[std::size_t(k) + 1] + pmf[std::size_t(k)];
  for (std::int64_t k = 1; k <= K; ++k) total += tail[std::size_t(k)] * step_walk_pmf(k, d);
  return total;
}

std::int64_t count_visits(const CadlagPath& path, const std::vector<double>& targets,
                          double T) {
  require(T >= 0.0 && T <= path.horizon(), "count_visits: T outside [0, horizon]");
  require(!targets.empty(), "count_visits: empty target set");
  std::vector<double> sorted = targets;
  std::sort(sorted.begin(), sorted.end());
  auto in_set = [&](double v) {
    return std::binary_search(sorted.begin(), sorted.end(), v);
  };
  std::int64_t count = in_set(path.initial_value()) ? 1 : 0;
  const auto& times = path.jump_times();
  const auto& values = path.jump_values();
  for (std::size_t i = 0; i < times.size() && times[i] <= T; ++i) {
    if (in_set(values[i])) ++count;
  }
  return count;
}

CadlagPath simulate_halfline(const HalfLineSpec& spec, double horizon, KeyedStream& stream) {
  require(spec.start >= 0, "simulate_halfline: start must be nonnegative");
  require(spec.edge_rate > 0.0 && std::isfinite(spec.edge_rate),
          "simulate_halfline: edge rate must be positive");
  require(spec.loop_rate_at_zero >= 0.0 && std::isfinite(spec.loop_rate_at_zero),
          "simulate_halfline: loop rate must be nonnegative");
  require(horizon >= 0.0 && std::isfinite(horizon),
          "simulate_halfline: horizon must be nonnegative");
  CadlagPath path(double(spec.start), horizon);
  double t = 0.0;
  std::int64_t x = spec.start;
  for (;;) {
    double total = x == 0 ? spec.edge_rate + spec.loop_rate_at_zero : 2.0 * spec.edge_rate;
    t = advance_time(t, stream.exponential(total));
    if (t > horizon) break;
    if (x == 0) {
      if (stream.uniform01() * total < spec.edge_rate) {
        x = 1;
        path.append_jump(t, double(x));
      }
      // otherwise the self-loop fired: time advances, position unchanged
    } else {
      x += stream.uniform01() < 0.5 ? -1 : 1;
      path.append_jump(t, double(x));
    }
  }
  return path;
}

}  // namespace interlab
