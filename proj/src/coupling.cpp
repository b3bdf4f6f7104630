#include "interlab/coupling.hpp"

namespace interlab {

namespace {

struct PathBuilder {
  CadlagPath& s1;
  CadlagPath& s2;
  CadlagPath& s3;
  ExcursionLedger& ledger;

  void on_s1(double t, std::int64_t pos) { s1.append_jump(t, double(pos)); }
  void on_s2(double t, std::int64_t pos) { s2.append_jump(t, double(pos)); }
  void on_s3(double t, std::int64_t pos) { s3.append_jump(t, double(pos)); }
  void on_entry(double t, std::int64_t) { ledger.entry_times.push_back(t); }
  void on_exit(double t, std::int64_t jump) {
    ledger.exit_times.push_back(t);
    ledger.s2_displacements.push_back(jump);
  }
  bool should_stop() const { return false; }
};

}  // namespace

CoupledTriple simulate_coupled_triple(std::int64_t i, std::int64_t j, double T_micro,
                                      std::uint64_t master_seed, std::uint32_t experiment,
                                      std::uint32_t replicate, double edge_rate) {
  require(T_micro > 0.0 && std::isfinite(T_micro),
          "coupled triple: horizon must be positive");
  KeyedStream primary(StreamKey{master_seed, experiment, replicate, -1, StreamFamily::kPrimary});
  KeyedStream aux(StreamKey{master_seed, experiment, replicate, -1, StreamFamily::kAuxiliary});
  CoupledTriple out{CadlagPath(double(i), T_micro), CadlagPath(double(j), T_micro),
                    CadlagPath(double(j), T_micro), ExcursionLedger{}, i, j, T_micro};
  PathBuilder builder{out.s1, out.s2, out.s3, out.ledger};
  run_coupled_triple(i, j, T_micro, edge_rate, primary, aux, builder);
  return out;
}

ExcursionStats excursion_stats(const ExcursionLedger& ledger, double T) {
  require(T >= 0.0 && std::isfinite(T), "excursion stats: T must be nonnegative");
  const auto& entries = ledger.entry_times;
  const auto& exits = ledger.exit_times;
  require(exits.size() <= entries.size() && entries.size() <= exits.size() + 1,
          "excursion stats: ledger entry/exit counts inconsistent");
  ExcursionStats stats;
  std::size_t completed = 0;
  while (completed < exits.size() && exits[completed] <= T) ++completed;
  stats.completed = std::int64_t(completed);
  stats.J = stats.completed + 1;
  for (std::size_t k = 0; k < completed; ++k) {
    require(entries[k] <= exits[k], "excursion stats: exit precedes entry");
    stats.occupied_time += exits[k] - entries[k];
    stats.excursion_jumps.push_back(ledger.s2_displacements[k]);
  }
  if (entries.size() > completed && entries[completed] < T)
    stats.occupied_time += T - entries[completed];
  return stats;
}

ExcursionStats excursion_stats(const CoupledTriple& triple, double T) {
  require(T <= triple.horizon_micro,
          "excursion stats: T must lie within the simulated horizon");
  return excursion_stats(triple.ledger, T);
}

}  // namespace interlab
