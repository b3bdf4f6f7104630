#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <vector>

#include "interlab/error.hpp"
#include "interlab/path.hpp"
#include "interlab/rng.hpp"

namespace interlab {

// Adjacency excursions of the tracked pair: entry j is the j-th time the
// distance |S1-S2| becomes 1 and exit the first later time it exceeds 1, so
// the critical set C is the union of [entry_j, exit_j).  An excursion still
// open at the horizon leaves entry_times one longer than exit_times.
struct ExcursionLedger {
  std::vector<double> entry_times;
  std::vector<double> exit_times;
  std::vector<std::int64_t> s2_displacements;  // |S2(exit) - S2(entry)|, completed only
};

struct CoupledTriple {
  CadlagPath s1, s2, s3;
  ExcursionLedger ledger;
  std::int64_t start_i = 0, start_j = 0;
  double horizon_micro = 0.0;
};

// One step-by-step run of the coupling construction on Z.  (S1, S2) evolve as
// the tracked pair of the interchange: four distinct incident edges when
// apart, three when adjacent, each firing at edge_rate.  S3 starts with S2
// and copies every S2 increment whose firing arrives while the pair is NOT
// adjacent (entries included); while the pair is adjacent S3 ignores S2 and
// moves by its own auxiliary pair of edge clocks.  Every S3 increment is
// therefore +-1 at rate edge_rate each way, whatever the pair is doing.
//
// The observer receives each position change and excursion boundary; times
// are strictly increasing across all callbacks.  After each event the kernel
// polls obs.should_stop() and returns early on true.
template <typename Observer>
void run_coupled_triple(std::int64_t i, std::int64_t j, double T_micro, double edge_rate,
                        KeyedStream& primary, KeyedStream& aux, Observer&& obs) {
  require(i != j, "coupled triple: starts must differ");
  require(edge_rate > 0.0 && std::isfinite(edge_rate),
          "coupled triple: edge rate must be positive");
  require(T_micro >= 0.0 && std::isfinite(T_micro),
          "coupled triple: horizon must be nonnegative");
  std::int64_t p1 = i, p2 = j, p3 = j;
  bool adjacent = std::llabs(p1 - p2) == 1;
  std::int64_t s2_entry = p2;
  double t = 0.0;
  if (adjacent && T_micro > 0.0) obs.on_entry(0.0, p2);
  for (;;) {
    if (!adjacent) {
      t = advance_time(t, primary.exponential(4.0 * edge_rate));
      if (t >= T_micro) break;
      std::uint32_t u = primary.uniform_below(4);
      std::int64_t delta = (u & 1) ? 1 : -1;
      if (u < 2) {
        p1 += delta;
        obs.on_s1(t, p1);
      } else {
        p2 += delta;
        obs.on_s2(t, p2);
        p3 += delta;  // firing arrived while apart: mirrored
        obs.on_s3(t, p3);
      }
      if (std::llabs(p1 - p2) == 1) {
        adjacent = true;
        s2_entry = p2;
        obs.on_entry(t, p2);
      }
    } else {
      double gap_primary = primary.exponential(3.0 * edge_rate);
      double gap_aux = aux.exponential(2.0 * edge_rate);
      if (gap_primary <= gap_aux) {
        t = advance_time(t, gap_primary);
        if (t >= T_micro) break;
        std::uint32_t u = primary.uniform_below(3);
        std::int64_t a = std::min(p1, p2);  // pair occupies {a, a+1}
        if (u == 1) {
          std::swap(p1, p2);  // shared edge: both move, distance stays 1
          obs.on_s1(t, p1);
          obs.on_s2(t, p2);
        } else {
          std::int64_t vertex = u == 0 ? a : a + 1;
          std::int64_t delta = u == 0 ? -1 : 1;
          if (p1 == vertex) {
            p1 += delta;
            obs.on_s1(t, p1);
          } else {
            p2 += delta;
            obs.on_s2(t, p2);  // arrived while adjacent: not mirrored
          }
          adjacent = false;
          obs.on_exit(t, std::llabs(p2 - s2_entry));
        }
      } else {
        t = advance_time(t, gap_aux);
        if (t >= T_micro) break;
        p3 += aux.uniform_below(2) ? 1 : -1;
        obs.on_s3(t, p3);
      }
    }
    if (obs.should_stop()) break;
  }
}

CoupledTriple simulate_coupled_triple(std::int64_t i, std::int64_t j, double T_micro,
                                      std::uint64_t master_seed, std::uint32_t experiment,
                                      std::uint32_t replicate, double edge_rate = 0.5);

struct ExcursionStats {
  std::int64_t completed = 0;  // excursions with exit <= T
  std::int64_t J = 0;          // index of the first excursion extending past T
  double occupied_time = 0.0;  // measure of C within [0, T]
  std::vector<std::int64_t> excursion_jumps;  // |S2(exit)-S2(entry)| of those completed by T
};

ExcursionStats excursion_stats(const ExcursionLedger& ledger, double T);
ExcursionStats excursion_stats(const CoupledTriple& triple, double T);

}  // namespace interlab
