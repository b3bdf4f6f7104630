#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace interlab {

// Counter-based generator: every stream is addressed by a (seed, label) key and
// produces the same outputs no matter which thread, process or call order asks
// for it.  That is what makes replicated experiments reproducible across
// worker counts without shared generator state.

std::array<uint32_t, 4> philox4x32_10(std::array<uint32_t, 4> ctr,
                                      std::array<uint32_t, 2> key);

enum class StreamFamily : uint32_t {
  kPrimary = 0,    // edge clocks driving the particle dynamics
  kAuxiliary = 1,  // side randomness: decoupled walkers, shuffles, initial draws
};

struct StreamKey {
  uint64_t master_seed = 0;
  uint32_t experiment = 0;  // experiment/test namespace, see experiment ids below
  uint32_t replicate = 0;
  int64_t edge = 0;  // edge id where one applies, otherwise a free stream slot
  StreamFamily family = StreamFamily::kPrimary;
};

// Experiment namespaces used by the built-in experiments.  Unit tests pick
// values >= 1000 so they never collide with experiment streams.
namespace experiment_id {
inline constexpr uint32_t kSimulate = 1;
inline constexpr uint32_t kVisits = 2;
inline constexpr uint32_t kReturnScaling = 3;
inline constexpr uint32_t kConcentration = 4;
inline constexpr uint32_t kTightness = 5;
inline constexpr uint32_t kHydrodynamic = 6;
inline constexpr uint32_t kIndependence = 7;
inline constexpr uint32_t kMarginals = 8;
inline constexpr uint32_t kCouplingMoments = 9;
}  // namespace experiment_id

class KeyedStream {
 public:
  explicit KeyedStream(const StreamKey& key);

  uint32_t next_u32();
  uint64_t next_u64();

  // [0, 1), 53-bit resolution.
  double uniform01();
  // (0, 1): never returns an endpoint, so -log(u) is finite and positive.
  double uniform_open01();
  // Uniform on {0, ..., bound-1}; bound must be positive.
  uint32_t uniform_below(uint32_t bound);

  // Exponential waiting time with the given rate; rate must be positive.
  double exponential(double rate);
  // Standard normal via Box-Muller (second value cached).
  double normal();
  // Poisson; inversion below mean 10, transformed rejection above.
  uint64_t poisson(double mean);

 private:
  void refill();

  std::array<uint32_t, 2> key_;
  std::array<uint32_t, 2> ctr_hi_;
  uint64_t block_ = 0;
  std::array<uint32_t, 4> buf_{};
  int buf_pos_ = 4;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// One realized Poisson stream on the window [t0, t1).
struct EventStream {
  double rate = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<double> times;  // strictly increasing, all inside [t0, t1)
};

// Single key-addressed draw; calling twice with the same key repeats the value.
double exponential_sample(double rate, const StreamKey& key);

// All firings of a rate `rate` Poisson clock inside [t0, t1).
EventStream poisson_events(double rate, double t0, double t1, const StreamKey& key);

// Keeps each event independently with probability keep_prob.
EventStream thin_stream(const EventStream& events, double keep_prob, const StreamKey& key);

// Superposition of two streams on the same window.
EventStream merge_streams(const EventStream& a, const EventStream& b);

// t advanced by gap, bumped one ulp when floating-point resolution would
// otherwise produce a non-increasing event time.
double advance_time(double t, double gap);

}  // namespace interlab
