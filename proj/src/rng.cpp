#include "interlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "interlab/error.hpp"

namespace interlab {

namespace {

constexpr uint64_t kStreamVersion = 1;  // bump on any change to the derivation below

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline std::array<uint32_t, 4> philox_round(std::array<uint32_t, 4> c,
                                            const std::array<uint32_t, 2>& k) {
  uint64_t p0 = uint64_t{kPhiloxM0} * c[0];
  uint64_t p1 = uint64_t{kPhiloxM1} * c[2];
  uint32_t hi0 = uint32_t(p0 >> 32), lo0 = uint32_t(p0);
  uint32_t hi1 = uint32_t(p1 >> 32), lo1 = uint32_t(p1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::array<uint32_t, 4> philox4x32_10(std::array<uint32_t, 4> ctr,
                                      std::array<uint32_t, 2> key) {
  ctr = philox_round(ctr, key);
  for (int r = 1; r < 10; ++r) {
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
    ctr = philox_round(ctr, key);
  }
  return ctr;
}

KeyedStream::KeyedStream(const StreamKey& key) {
  // Label fields are folded into 128 bits of key/counter material through a
  // splitmix64 chain; the remaining 64 counter bits index blocks within the
  // stream.  Documented in the README so runs can be reproduced externally.
  uint64_t h = splitmix64(key.master_seed ^ kStreamVersion);
  h = splitmix64(h ^ key.experiment);
  h = splitmix64(h ^ key.replicate);
  h = splitmix64(h ^ static_cast<uint64_t>(key.edge));
  h = splitmix64(h ^ static_cast<uint64_t>(key.family));
  uint64_t h2 = splitmix64(h ^ 0xA0761D6478BD642Full);
  key_ = {uint32_t(h), uint32_t(h >> 32)};
  ctr_hi_ = {uint32_t(h2), uint32_t(h2 >> 32)};
}

void KeyedStream::refill() {
  buf_ = philox4x32_10({uint32_t(block_), uint32_t(block_ >> 32), ctr_hi_[0], ctr_hi_[1]},
                       key_);
  ++block_;
  buf_pos_ = 0;
}

uint32_t KeyedStream::next_u32() {
  if (buf_pos_ >= 4) refill();
  return buf_[buf_pos_++];
}

uint64_t KeyedStream::next_u64() {
  uint64_t lo = next_u32();
  uint64_t hi = next_u32();
  return lo | (hi << 32);
}

double KeyedStream::uniform01() {
  return double(next_u64() >> 11) * 0x1.0p-53;
}

double KeyedStream::uniform_open01() {
  return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

uint32_t KeyedStream::uniform_below(uint32_t bound) {
  require(bound > 0, "uniform_below: bound must be positive");
  // Lemire's multiply-shift with rejection of the biased low range.
  uint32_t x = next_u32();
  uint64_t m = uint64_t(x) * bound;
  uint32_t l = uint32_t(m);
  if (l < bound) {
    uint32_t floor = (0u - bound) % bound;
    while (l < floor) {
      x = next_u32();
      m = uint64_t(x) * bound;
      l = uint32_t(m);
    }
  }
  return uint32_t(m >> 32);
}

double KeyedStream::exponential(double rate) {
  require(rate > 0.0 && std::isfinite(rate), "exponential: rate must be positive");
  return -std::log(uniform_open01()) / rate;
}

double KeyedStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = uniform_open01();
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 6.283185307179586476925286766559 * u2;
  cached_normal_ = r * std::sin(a);
  has_cached_normal_ = true;
  return r * std::cos(a);
}

uint64_t KeyedStream::poisson(double mean) {
  require(mean >= 0.0 && std::isfinite(mean), "poisson: mean must be finite and nonnegative");
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    // Multiplicative inversion (Knuth).
    double limit = std::exp(-mean);
    double prod = uniform_open01();
    uint64_t k = 0;
    while (prod > limit) {
      prod *= uniform_open01();
      ++k;
    }
    return k;
  }
  // Hoermann's PTRD transformed-rejection sampler.
  const double smu = std::sqrt(mean);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    double u = uniform01() - 0.5;
    double v = uniform_open01();
    double us = 0.5 - std::fabs(u);
    double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return uint64_t(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    int sign = 0;
    double lgk = lgamma_r(kf + 1.0, &sign);
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        kf * log_mean - mean - lgk) {
      return uint64_t(kf);
    }
  }
}

double exponential_sample(double rate, const StreamKey& key) {
  KeyedStream s(key);
  return s.exponential(rate);
}

EventStream poisson_events(double rate, double t0, double t1, const StreamKey& key) {
  require(rate >= 0.0 && std::isfinite(rate), "poisson_events: rate must be nonnegative");
  require(t0 <= t1 && std::isfinite(t0) && std::isfinite(t1),
          "poisson_events: window must satisfy t0 <= t1");
  EventStream out;
  out.rate = rate;
  out.t0 = t0;
  out.t1 = t1;
  if (rate == 0.0 || t0 == t1) return out;
  KeyedStream s(key);
  double t = t0;
  for (;;) {
    t = advance_time(t, s.exponential(rate));
    if (t >= t1) break;
    out.times.push_back(t);
  }
  return out;
}

EventStream thin_stream(const EventStream& events, double keep_prob, const StreamKey& key) {
  require(keep_prob >= 0.0 && keep_prob <= 1.0, "thin_stream: keep_prob must lie in [0, 1]");
  EventStream out;
  out.rate = events.rate * keep_prob;
  out.t0 = events.t0;
  out.t1 = events.t1;
  KeyedStream s(key);
  for (double t : events.times) {
    if (s.uniform01() < keep_prob) out.times.push_back(t);
  }
  return out;
}

EventStream merge_streams(const EventStream& a, const EventStream& b) {
  require(a.t0 == b.t0 && a.t1 == b.t1, "merge_streams: windows must match");
  EventStream out;
  out.rate = a.rate + b.rate;
  out.t0 = a.t0;
  out.t1 = a.t1;
  out.times.resize(a.times.size() + b.times.size());
  std::merge(a.times.begin(), a.times.end(), b.times.begin(), b.times.end(),
             out.times.begin());
  return out;
}

double advance_time(double t, double gap) {
  double next = t + gap;
  if (next <= t) next = std::nextafter(t, std::numeric_limits<double>::infinity());
  return next;
}

}  // namespace interlab
