#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "interlab/rng.hpp"

using namespace interlab;

TEST_CASE("philox block function reproduces the reference vectors") {
  std::array<uint32_t, 4> zeros = philox4x32_10({0u, 0u, 0u, 0u}, {0u, 0u});
  CHECK(zeros == std::array<uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});

  std::array<uint32_t, 4> ones = philox4x32_10(
      {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  CHECK(ones == std::array<uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});

  std::array<uint32_t, 4> pi = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                             {0xa4093822u, 0x299f31d0u});
  CHECK(pi == std::array<uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("keyed streams replay exactly and separate by every key field") {
  StreamKey base{42u, 1000u, 7u, 3, StreamFamily::kPrimary};
  KeyedStream a(base);
  KeyedStream b(base);
  for (int i = 0; i < 200; ++i) CHECK(a.next_u32() == b.next_u32());

  auto first_u64 = [](StreamKey k) { return KeyedStream(k).next_u64(); };
  std::set<uint64_t> outputs;
  outputs.insert(first_u64(base));
  StreamKey k1 = base;
  k1.master_seed = 43u;
  outputs.insert(first_u64(k1));
  StreamKey k2 = base;
  k2.experiment = 1001u;
  outputs.insert(first_u64(k2));
  StreamKey k3 = base;
  k3.replicate = 8u;
  outputs.insert(first_u64(k3));
  StreamKey k4 = base;
  k4.edge = 4;
  outputs.insert(first_u64(k4));
  StreamKey k5 = base;
  k5.family = StreamFamily::kAuxiliary;
  outputs.insert(first_u64(k5));
  CHECK(outputs.size() == 6);
}

TEST_CASE("variate ranges and basic shape") {
  KeyedStream s(StreamKey{7u, 1001u, 0u, 0, StreamFamily::kPrimary});
  bool saw_low = false;
  bool saw_high = false;
  for (int i = 0; i < 4000; ++i) {
    double u = s.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    double v = s.uniform_open01();
    CHECK(v > 0.0);
    CHECK(v < 1.0);
    uint32_t d = s.uniform_below(10u);
    CHECK(d < 10u);
    saw_low = saw_low || d == 0u;
    saw_high = saw_high || d == 9u;
    double e = s.exponential(2.0);
    CHECK(e > 0.0);
    CHECK(std::isfinite(e));
    double z = s.normal();
    CHECK(std::isfinite(z));
  }
  CHECK(saw_low);
  CHECK(saw_high);

  KeyedStream p(StreamKey{7u, 1001u, 1u, 0, StreamFamily::kPrimary});
  double mean = 0.0;
  for (int i = 0; i < 4000; ++i) mean += static_cast<double>(p.poisson(3.0));
  mean /= 4000.0;
  CHECK(mean == doctest::Approx(3.0).epsilon(0.05));

  KeyedStream q(StreamKey{7u, 1001u, 2u, 0, StreamFamily::kPrimary});
  double big = 0.0;
  for (int i = 0; i < 2000; ++i) big += static_cast<double>(q.poisson(40.0));
  big /= 2000.0;
  CHECK(big == doctest::Approx(40.0).epsilon(0.02));
}

TEST_CASE("event stream construction, thinning and merging") {
  StreamKey key{11u, 1002u, 0u, 5, StreamFamily::kPrimary};
  EventStream ev = poisson_events(3.0, 1.0, 5.0, key);
  CHECK(ev.rate == 3.0);
  CHECK(ev.t0 == 1.0);
  CHECK(ev.t1 == 5.0);
  for (std::size_t i = 0; i < ev.times.size(); ++i) {
    CHECK(ev.times[i] >= 1.0);
    CHECK(ev.times[i] < 5.0);
    if (i > 0) CHECK(ev.times[i] > ev.times[i - 1]);
  }
  EventStream replay = poisson_events(3.0, 1.0, 5.0, key);
  CHECK(replay.times == ev.times);

  StreamKey thin_key{11u, 1002u, 1u, 5, StreamFamily::kAuxiliary};
  EventStream kept = thin_stream(ev, 0.5, thin_key);
  CHECK(kept.times.size() <= ev.times.size());
  CHECK(std::includes(ev.times.begin(), ev.times.end(), kept.times.begin(), kept.times.end()));
  EventStream all = thin_stream(ev, 1.0, thin_key);
  CHECK(all.times == ev.times);

  StreamKey other_key{11u, 1002u, 2u, 6, StreamFamily::kPrimary};
  EventStream ev2 = poisson_events(2.0, 1.0, 5.0, other_key);
  EventStream merged = merge_streams(ev, ev2);
  CHECK(merged.times.size() == ev.times.size() + ev2.times.size());
  for (std::size_t i = 1; i < merged.times.size(); ++i) CHECK(merged.times[i] > merged.times[i - 1]);
  CHECK(merged.rate == doctest::Approx(5.0));

  double x = exponential_sample(1.5, key);
  CHECK(x > 0.0);
  CHECK(x == exponential_sample(1.5, key));
}

TEST_CASE("advance_time always moves strictly forward") {
  CHECK(advance_time(1.0, 0.5) == 1.5);
  CHECK(advance_time(0.0, 2.0) == 2.0);
  CHECK(advance_time(1.0, 0.0) > 1.0);
  CHECK(advance_time(1e9, 1e-30) > 1e9);
  double t = 0.0;
  for (int i = 0; i < 1000; ++i) {
    double next = advance_time(t, 1e-18);
    CHECK(next > t);
    t = next;
  }
}

TEST_CASE("degenerate variate arguments are rejected") {
  KeyedStream s(StreamKey{1u, 1003u, 0u, 0, StreamFamily::kPrimary});
  CHECK_THROWS(s.uniform_below(0u));
  CHECK_THROWS(s.exponential(0.0));
  CHECK_THROWS(s.exponential(-1.0));
  CHECK_THROWS(s.poisson(-0.5));
  CHECK_THROWS(poisson_events(-1.0, 0.0, 1.0, StreamKey{}));
  CHECK_THROWS(poisson_events(1.0, 2.0, 1.0, StreamKey{}));
}
