#include "interlab/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "interlab/coupling.hpp"
#include "interlab/error.hpp"
#include "interlab/interchange.hpp"
#include "interlab/measures.hpp"
#include "interlab/reflected_bm.hpp"
#include "interlab/rng.hpp"
#include "interlab/ssep.hpp"
#include "interlab/stats.hpp"
#include "interlab/walks.hpp"

namespace interlab {
namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, std::size_t(res.ptr - buf));
}

std::string fmti(std::int64_t v) { return std::to_string(v); }

void add_row(std::string& csv, std::initializer_list<std::string> cells) {
  bool first = true;
  for (const auto& c : cells) {
    if (!first) csv += ',';
    csv += c;
    first = false;
  }
  csv += '\n';
}

[[noreturn]] void fail(const std::string& msg) { throw InvalidArgument("manifest: " + msg); }

void check_fields(const json& m, std::initializer_list<const char*> allowed) {
  for (const auto& item : m.items()) {
    const std::string& key = item.key();
    if (key == "command" || key == "seed") continue;
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) fail("unknown field '" + key + "'");
  }
}

std::uint64_t seed_field(const json& m) {
  if (!m.contains("seed")) return kDefaultSeed;
  const json& v = m.at("seed");
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return std::uint64_t(v.get<std::int64_t>());
  fail("seed must be a nonnegative integer");
}

double real_field(const json& m, const char* key, double dflt, double lo, double hi) {
  if (!m.contains(key)) return dflt;
  const json& v = m.at(key);
  if (!v.is_number()) fail(std::string(key) + " must be a number");
  double x = v.get<double>();
  if (!std::isfinite(x) || x < lo || x > hi)
    fail(std::string(key) + " must lie in [" + fmt(lo) + ", " + fmt(hi) + "]");
  return x;
}

std::int64_t int_field(const json& m, const char* key, std::int64_t dflt, std::int64_t lo,
                       std::int64_t hi) {
  if (!m.contains(key)) return dflt;
  const json& v = m.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    fail(std::string(key) + " must be an integer");
  std::int64_t x = v.get<std::int64_t>();
  if (x < lo || x > hi)
    fail(std::string(key) + " must lie in [" + fmti(lo) + ", " + fmti(hi) + "]");
  return x;
}

std::vector<double> real_list(const json& m, const char* key, std::vector<double> dflt,
                              double lo, double hi) {
  if (!m.contains(key)) return dflt;
  const json& v = m.at(key);
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const json& e : v) {
      if (!e.is_number()) fail(std::string(key) + " entries must be numbers");
      out.push_back(e.get<double>());
    }
  } else {
    fail(std::string(key) + " must be a number or an array of numbers");
  }
  if (out.empty()) fail(std::string(key) + " must not be empty");
  for (double x : out) {
    if (!std::isfinite(x) || x < lo || x > hi)
      fail(std::string(key) + " entries must lie in [" + fmt(lo) + ", " + fmt(hi) + "]");
  }
  return out;
}

std::vector<std::int64_t> int_list(const json& m, const char* key,
                                   std::vector<std::int64_t> dflt, std::int64_t lo,
                                   std::int64_t hi) {
  if (!m.contains(key)) return dflt;
  const json& v = m.at(key);
  std::vector<std::int64_t> out;
  if (v.is_number_integer() || v.is_number_unsigned()) {
    out.push_back(v.get<std::int64_t>());
  } else if (v.is_array()) {
    for (const json& e : v) {
      if (!e.is_number_integer() && !e.is_number_unsigned())
        fail(std::string(key) + " entries must be integers");
      out.push_back(e.get<std::int64_t>());
    }
  } else {
    fail(std::string(key) + " must be an integer or an array of integers");
  }
  if (out.empty()) fail(std::string(key) + " must not be empty");
  for (std::int64_t x : out) {
    if (x < lo || x > hi)
      fail(std::string(key) + " entries must lie in [" + fmti(lo) + ", " + fmti(hi) + "]");
  }
  return out;
}

void require_increasing(const std::vector<double>& v, const char* key) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] > v[k - 1])) fail(std::string(key) + " must be strictly increasing");
}

// Work queue over [0, count); any body exception is rethrown after the join.
// Bodies write only to their own replicate's slots, so results do not depend
// on the worker count.
void parallel_for(std::int64_t count, int workers,
                  const std::function<void(std::int64_t)>& body) {
  if (count <= 0) return;
  int k = int(std::min<std::int64_t>(count, std::max(1, workers)));
  if (k == 1) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto drain = [&] {
    for (;;) {
      std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(k));
  for (int i = 0; i < k; ++i) pool.emplace_back(drain);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

struct Checks {
  json rows = json::array();
  bool passed = true;
  void add(const std::string& test, double statistic, const json& bound, double se,
           bool pass) {
    rows.push_back(json{{"test", test},
                        {"statistic", statistic},
                        {"bound", bound},
                        {"std_error", se},
                        {"pass", pass}});
    passed = passed && pass;
  }
};

bool upper_ok(double stat, double se, double bound) { return stat - 3.0 * se <= bound; }
bool lower_ok(double stat, double se, double bound) { return stat + 3.0 * se >= bound; }

RunResult finish(json manifest, const std::vector<std::string>& claims, Checks checks,
                 std::vector<std::pair<std::string, std::string>> files) {
  manifest["version"] = kArtifactVersion;
  RunResult out;
  out.passed = checks.passed;
  out.verdict = json{{"command", manifest.at("command")}, {"version", kArtifactVersion},
                     {"seed", manifest.at("seed")},       {"claims", claims},
                     {"checks", std::move(checks.rows)},  {"passed", checks.passed}};
  out.manifest = std::move(manifest);
  out.files = std::move(files);
  return out;
}

double jackknife_se(const std::vector<double>& leave_outs) {
  std::size_t b = leave_outs.size();
  if (b < 2) return 0.0;
  double mean = 0.0;
  for (double v : leave_outs) mean += v / double(b);
  double s = 0.0;
  for (double v : leave_outs) s += (v - mean) * (v - mean);
  return std::sqrt(s * double(b - 1) / double(b));
}

// Largest increment between consecutive values; passes when every increment is
// within 3 paired standard errors of nonpositive.
void add_monotone_check(Checks& checks, const std::string& name,
                        const std::vector<double>& vals, const std::vector<double>& ses) {
  double worst = -1e300, worst_se = 0.0;
  bool ok = true;
  for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
    double inc = vals[k + 1] - vals[k];
    double pse = std::sqrt(ses[k] * ses[k] + ses[k + 1] * ses[k + 1]);
    ok = ok && inc - 3.0 * pse <= 0.0;
    if (inc > worst) {
      worst = inc;
      worst_se = pse;
    }
  }
  checks.add(name, worst, 0.0, worst_se, ok);
}

// ---------------------------------------------------------------- simulate

RunResult cmd_simulate(const json& m, int) {
  check_fields(m, {"n", "T", "track"});
  std::uint64_t seed = seed_field(m);
  std::int64_t n = int_field(m, "n", 64, 1, 1'000'000);
  double T = real_field(m, "T", 1.0, 0.0, 1e6);
  std::vector<std::int64_t> track = int_list(m, "track", {(n + 1) / 2}, 1, n);
  std::vector<std::int32_t> slot(std::size_t(n) + 2, -1);
  for (std::size_t k = 0; k < track.size(); ++k) {
    if (slot[std::size_t(track[k])] >= 0) fail("track vertices must be distinct");
    slot[std::size_t(track[k])] = std::int32_t(k);
  }
  double horizon = double(n) * double(n) * T;
  if (0.5 * double(n + 1) * horizon > 2.5e7)
    fail("simulate: expected event count above 2.5e7; reduce n or T");
  double scale = double(n) * double(n);
  std::string csv = "particle,time,position\n";
  for (std::size_t k = 0; k < track.size(); ++k)
    add_row(csv, {fmti(track[k]), "0", fmt(double(track[k]) / double(n))});
  PathGraphConfig cfg{n, 0.5, horizon};
  for_each_edge_event(cfg, seed, experiment_id::kSimulate, 0,
                      [&](double t, std::int64_t e) {
                        if (e < 1 || e > n - 1) return;
                        std::int32_t a = slot[std::size_t(e)];
                        std::int32_t b = slot[std::size_t(e) + 1];
                        if (a < 0 && b < 0) return;
                        slot[std::size_t(e)] = b;
                        slot[std::size_t(e) + 1] = a;
                        if (b >= 0)
                          add_row(csv, {fmti(track[std::size_t(b)]), fmt(t / scale),
                                        fmt(double(e) / double(n))});
                        if (a >= 0)
                          add_row(csv, {fmti(track[std::size_t(a)]), fmt(t / scale),
                                        fmt(double(e + 1) / double(n))});
                      });
  json manifest{{"command", "simulate"}, {"seed", seed}, {"n", n}, {"T", T}, {"track", track}};
  return finish(std::move(manifest), {}, Checks{}, {{"trajectory.csv", std::move(csv)}});
}

// ------------------------------------------------------------ verify-visits

RunResult cmd_visits(const json& m, int workers) {
  check_fields(m, {"T", "reps"});
  std::uint64_t seed = seed_field(m);
  std::vector<double> Ts = real_list(m, "T", {1.0, 4.0, 16.0}, 1e-6, 1e4);
  std::int64_t reps = int_field(m, "reps", 100000, 1, 1'000'000);
  std::size_t K = Ts.size();
  double horizon = *std::max_element(Ts.begin(), Ts.end());
  std::vector<std::int32_t> counts(std::size_t(reps) * K);
  parallel_for(reps, workers, [&](std::int64_t r) {
    KeyedStream stream(
        StreamKey{seed, experiment_id::kVisits, std::uint32_t(r), 0, StreamFamily::kPrimary});
    CadlagPath path = simulate_srw(WalkSpec{0, 2.0, horizon}, stream);
    for (std::size_t k = 0; k < K; ++k)
      counts[std::size_t(r) * K + k] = std::int32_t(count_visits(path, {0.0}, Ts[k]));
  });
  Checks checks;
  std::string csv = "T,reps,mean_visits,std_error,bound\n";
  std::vector<double> means(K), ses(K);
  for (std::size_t k = 0; k < K; ++k) {
    MeanVar mv;
    for (std::int64_t r = 0; r < reps; ++r) mv.add(double(counts[std::size_t(r) * K + k]));
    means[k] = mv.mean();
    ses[k] = mv.std_error();
    double bound = 3.0 * std::sqrt(Ts[k]);
    checks.add("visits-bound-T" + fmt(Ts[k]), means[k], bound, ses[k],
               upper_ok(means[k], ses[k], bound));
    add_row(csv, {fmt(Ts[k]), fmti(reps), fmt(means[k]), fmt(ses[k]), fmt(bound)});
  }
  if (K >= 2) {
    double avg = 0.0;
    std::vector<double> scaled(K), sses(K);
    for (std::size_t k = 0; k < K; ++k) {
      scaled[k] = means[k] / std::sqrt(Ts[k]);
      sses[k] = ses[k] / std::sqrt(Ts[k]);
      avg += scaled[k] / double(K);
    }
    double worst = 0.0, worst_se = 0.0;
    bool ok = true;
    for (std::size_t k = 0; k < K; ++k) {
      double dev = std::abs(scaled[k] - avg);
      ok = ok && dev - 3.0 * sses[k] <= 0.2 * avg;
      if (dev / avg > worst) {
        worst = dev / avg;
        worst_se = sses[k] / avg;
      }
    }
    checks.add("visits-scaling-stability", worst, 0.2, worst_se, ok);
  }
  json manifest{{"command", "verify-visits"}, {"seed", seed}, {"T", Ts}, {"reps", reps}};
  return finish(std::move(manifest), {"srw-visits"}, std::move(checks),
                {{"visits.csv", std::move(csv)}});
}

// ---------------------------------------------------- verify-returns-scaling

RunResult cmd_returns(const json& m, int workers) {
  check_fields(m, {"epsilons", "t", "reps"});
  std::uint64_t seed = seed_field(m);
  std::vector<double> eps = real_list(m, "epsilons", {1.0, 0.5, 0.25, 0.125}, 1e-3, 1.0);
  double t = real_field(m, "t", 1.0, 1e-6, 100.0);
  std::int64_t reps = int_field(m, "reps", 100000, 2, 1'000'000);
  if (eps.size() < 2) fail("epsilons needs at least two values");
  for (std::size_t i = 0; i < eps.size(); ++i)
    for (std::size_t j = i + 1; j < eps.size(); ++j)
      if (eps[i] == eps[j]) fail("epsilons must be distinct");
  std::size_t K = eps.size();
  std::vector<double> horizons(K);
  double tmax = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    horizons[k] = t / (eps[k] * eps[k]);
    tmax = std::max(tmax, horizons[k]);
  }
  if (double(reps) * tmax > 4e9) fail("returns: event budget exceeded; reduce reps or epsilons");
  std::vector<std::int32_t> counts(std::size_t(reps) * K);
  parallel_for(reps, workers, [&](std::int64_t r) {
    KeyedStream stream(StreamKey{seed, experiment_id::kReturnScaling, std::uint32_t(r), 0,
                                 StreamFamily::kPrimary});
    CadlagPath path = simulate_srw(WalkSpec{0, 1.0, tmax}, stream);
    for (std::size_t k = 0; k < K; ++k)
      counts[std::size_t(r) * K + k] = std::int32_t(count_visits(path, {0.0}, horizons[k]));
  });
  std::vector<double> mean(K, 0.0), se(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    MeanVar mv;
    for (std::int64_t r = 0; r < reps; ++r) mv.add(double(counts[std::size_t(r) * K + k]));
    mean[k] = mv.mean();
    se[k] = mv.std_error();
  }
  std::vector<double> cov(K * K, 0.0);
  for (std::int64_t r = 0; r < reps; ++r) {
    for (std::size_t k = 0; k < K; ++k) {
      double dk = double(counts[std::size_t(r) * K + k]) - mean[k];
      for (std::size_t l = 0; l < K; ++l)
        cov[k * K + l] += dk * (double(counts[std::size_t(r) * K + l]) - mean[l]);
    }
  }
  for (double& c : cov) c /= double(reps - 1);
  std::vector<double> x(K), y(K);
  for (std::size_t k = 0; k < K; ++k) {
    x[k] = std::log(1.0 / eps[k]);
    y[k] = std::log(mean[k]);
  }
  LeastSquaresFit ls = least_squares(x, y);
  double xbar = 0.0;
  for (double v : x) xbar += v / double(K);
  double sxx = 0.0;
  for (double v : x) sxx += (v - xbar) * (v - xbar);
  double var = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    double ck = (x[k] - xbar) / sxx;
    for (std::size_t l = 0; l < K; ++l) {
      double cl = (x[l] - xbar) / sxx;
      var += ck * cl * cov[k * K + l] / (mean[k] * mean[l]);
    }
  }
  double slope_se = std::sqrt(std::max(var, 0.0) / double(reps));
  Checks checks;
  checks.add("returns-scaling-slope-lower", ls.slope, 0.8, slope_se,
             lower_ok(ls.slope, slope_se, 0.8));
  checks.add("returns-scaling-slope-upper", ls.slope, 1.2, slope_se,
             upper_ok(ls.slope, slope_se, 1.2));
  std::string csv = "epsilon,t,reps,mean_visits,std_error\n";
  for (std::size_t k = 0; k < K; ++k)
    add_row(csv, {fmt(eps[k]), fmt(t), fmti(reps), fmt(mean[k]), fmt(se[k])});
  json manifest{{"command", "verify-returns-scaling"},
                {"seed", seed},
                {"epsilons", eps},
                {"t", t},
                {"reps", reps}};
  return finish(std::move(manifest), {"return-scaling"}, std::move(checks),
                {{"returns.csv", std::move(csv)}});
}

// --------------------------------------------------- verify-concentration

std::int64_t floor_n34(std::int64_t n) {
  std::int64_t f = std::int64_t(std::pow(double(n), 0.75));
  auto at_most = [&](std::int64_t v) {
    if (v < 0) return true;
    __int128 v4 = __int128(v) * v * v * v;
    __int128 n3 = __int128(n) * n * n;
    return v4 <= n3;
  };
  while (!at_most(f)) --f;
  while (at_most(f + 1)) ++f;
  return f;
}

// Watches sup_t |fold(S2) - fold(S3)| crossing the threshold.  Positions are
// checked one event late: each callback first validates the state left by the
// previous event (same-time callbacks belong to one event and are skipped),
// and finish() covers the state at the horizon.  The fold is 1-Lipschitz, so
// no crossing is possible while |S2 - S3| is below the threshold.
struct ConcObserver {
  std::int64_t n = 0;
  std::int64_t thr = 0;  // exceed when |fold(p2) - fold(p3)| >= thr
  std::int64_t p2 = 0, p3 = 0;
  double last_t = -1.0;
  bool exceeded = false;

  void scan() {
    std::int64_t d = p2 - p3;
    if (d < 0) d = -d;
    if (d < thr) return;
    std::int64_t f = fold_lattice(p2, n) - fold_lattice(p3, n);
    if (f < 0) f = -f;
    if (f >= thr) exceeded = true;
  }
  void probe(double t) {
    if (exceeded || t == last_t) return;
    last_t = t;
    scan();
  }
  void on_s1(double t, std::int64_t) { probe(t); }
  void on_s2(double t, std::int64_t pos) {
    probe(t);
    p2 = pos;
  }
  void on_s3(double t, std::int64_t pos) {
    probe(t);
    p3 = pos;
  }
  void on_entry(double t, std::int64_t) { probe(t); }
  void on_exit(double t, std::int64_t) { probe(t); }
  bool should_stop() const { return exceeded; }
  void finish() {
    if (!exceeded) scan();
  }
};

RunResult cmd_concentration(const json& m, int workers) {
  check_fields(m, {"n", "T", "reps", "pairs", "moment_T", "moment_reps"});
  std::uint64_t seed = seed_field(m);
  std::vector<std::int64_t> ns = int_list(m, "n", {64, 256, 1024}, 2, 1'000'000);
  double T = real_field(m, "T", 1.0, 1e-6, 100.0);
  std::int64_t reps = int_field(m, "reps", 10000, 1, 1'000'000);
  bool have_pairs = m.contains("pairs");
  std::vector<std::pair<std::int64_t, std::int64_t>> explicit_pairs;
  if (have_pairs) {
    const json& pv = m.at("pairs");
    if (!pv.is_array() || pv.empty()) fail("pairs must be a nonempty array of [i, j] pairs");
    for (const json& e : pv) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
          !e[1].is_number_integer())
        fail("pairs entries must be [i, j] integer pairs");
      std::int64_t i = e[0].get<std::int64_t>(), j = e[1].get<std::int64_t>();
      if (i == j) fail("pair starts must differ");
      explicit_pairs.emplace_back(i, j);
    }
  }
  std::vector<double> moment_T = real_list(m, "moment_T", {1.0, 4.0, 16.0}, 1e-6, 1e4);
  std::int64_t moment_reps = int_field(m, "moment_reps", 10000, 1, 1'000'000);

  Checks checks;
  std::string csv = "n,T,reps,pair,p_hat,std_error,scaled\n";
  std::size_t npairs = have_pairs ? explicit_pairs.size() : 2;
  std::vector<std::vector<double>> series(npairs);
  double max_scaled = 0.0, max_scaled_se = 0.0;

  for (std::size_t ni = 0; ni < ns.size(); ++ni) {
    std::int64_t n = ns[ni];
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    if (have_pairs) {
      pairs = explicit_pairs;
      for (const auto& p : pairs)
        if (p.first < 1 || p.first > n || p.second < 1 || p.second > n)
          fail("pair outside {1..n}");
    } else {
      std::int64_t i1 = (n + 2) / 3, j1 = (2 * n + 2) / 3;
      if (j1 == i1) j1 = i1 + 1;
      std::int64_t i2 = (n + 1) / 2;
      pairs = {{i1, j1}, {i2, i2 + 1}};
    }
    double H = T * double(n) * double(n);
    if (2.5 * double(reps) * H > 6e10) fail("concentration: event budget exceeded");
    std::int64_t thr = floor_n34(n) + 1;
    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
      std::int64_t i = pairs[pi].first, j = pairs[pi].second;
      std::vector<std::uint8_t> flags(std::size_t(reps), 0);
      std::int64_t slot = std::int64_t(ni) * 16 + std::int64_t(pi);
      parallel_for(reps, workers, [&](std::int64_t r) {
        KeyedStream primary(StreamKey{seed, experiment_id::kConcentration, std::uint32_t(r),
                                      slot, StreamFamily::kPrimary});
        KeyedStream aux(StreamKey{seed, experiment_id::kConcentration, std::uint32_t(r), slot,
                                  StreamFamily::kAuxiliary});
        ConcObserver obs;
        obs.n = n;
        obs.thr = thr;
        obs.p2 = j;
        obs.p3 = j;
        run_coupled_triple(i, j, H, 0.5, primary, aux, obs);
        obs.finish();
        flags[std::size_t(r)] = obs.exceeded ? 1 : 0;
      });
      std::int64_t hits = 0;
      for (std::uint8_t fflag : flags) hits += fflag;
      double p = double(hits) / double(reps);
      double se = std::sqrt(std::max(p * (1.0 - p), 0.0) / double(reps));
      double scale_factor = std::sqrt(double(n)) / std::sqrt(T);
      double scaled = p * scale_factor;
      double scaled_se = se * scale_factor;
      series[pi].push_back(scaled);
      if (scaled > max_scaled) {
        max_scaled = scaled;
        max_scaled_se = scaled_se;
      }
      add_row(csv, {fmti(n), fmt(T), fmti(reps), fmti(i) + "-" + fmti(j), fmt(p), fmt(se),
                    fmt(scaled)});
    }
  }
  for (std::size_t pi = 0; pi < npairs; ++pi) {
    if (series[pi].size() >= 3 && series[pi].size() <= 8) {
      MannKendallResult mk = mann_kendall_increasing(series[pi]);
      checks.add("concentration-trend-pair" + fmti(std::int64_t(pi)), mk.p_value, 0.05, 0.0,
                 mk.p_value > 0.05);
    }
  }
  checks.add("concentration-max-scaled", max_scaled, json(), max_scaled_se, true);

  // Gap moments and excursion bounds for a lattice pair started two apart.
  std::size_t MK = moment_T.size();
  double mh = *std::max_element(moment_T.begin(), moment_T.end());
  std::vector<double> gap(std::size_t(moment_reps) * MK);
  std::vector<std::int32_t> jcount(std::size_t(moment_reps) * MK);
  std::vector<double> occ(std::size_t(moment_reps) * MK);
  parallel_for(moment_reps, workers, [&](std::int64_t r) {
    CoupledTriple triple = simulate_coupled_triple(0, 2, mh, seed,
                                                   experiment_id::kCouplingMoments,
                                                   std::uint32_t(r), 0.5);
    for (std::size_t k = 0; k < MK; ++k) {
      std::size_t at = std::size_t(r) * MK + k;
      gap[at] = triple.s3.value_at(moment_T[k]) - triple.s2.value_at(moment_T[k]);
      ExcursionStats st = excursion_stats(triple, moment_T[k]);
      jcount[at] = std::int32_t(st.J);
      occ[at] = st.occupied_time;
    }
  });
  std::string mcsv =
      "T,reps,second_moment,second_moment_se,scaled,mean_J,mean_J_se,mean_occupied,"
      "mean_occupied_se\n";
  std::size_t kmax = 0;
  for (std::size_t k = 1; k < MK; ++k)
    if (moment_T[k] > moment_T[kmax]) kmax = k;
  for (std::size_t k = 0; k < MK; ++k) {
    MeanVar m2, mg, mj, mo;
    for (std::int64_t r = 0; r < moment_reps; ++r) {
      std::size_t at = std::size_t(r) * MK + k;
      m2.add(gap[at] * gap[at]);
      mg.add(gap[at]);
      mj.add(double(jcount[at]));
      mo.add(occ[at]);
    }
    double rt = std::sqrt(moment_T[k]);
    std::string tag = fmt(moment_T[k]);
    checks.add("coupling-second-moment-T" + tag, m2.mean() / rt, 110.0, m2.std_error() / rt,
               upper_ok(m2.mean() / rt, m2.std_error() / rt, 110.0));
    checks.add("coupling-J-bound-T" + tag, mj.mean(), 10.0 * rt, mj.std_error(),
               upper_ok(mj.mean(), mj.std_error(), 10.0 * rt));
    checks.add("coupling-occupied-bound-T" + tag, mo.mean(), 10.0 * rt, mo.std_error(),
               upper_ok(mo.mean(), mo.std_error(), 10.0 * rt));
    if (k == kmax)
      checks.add("coupling-martingale", mg.mean(), 0.0, mg.std_error(),
                 std::abs(mg.mean()) - 3.0 * mg.std_error() <= 0.0);
    add_row(mcsv, {fmt(moment_T[k]), fmti(moment_reps), fmt(m2.mean()), fmt(m2.std_error()),
                   fmt(m2.mean() / rt), fmt(mj.mean()), fmt(mj.std_error()), fmt(mo.mean()),
                   fmt(mo.std_error())});
  }
  json manifest{{"command", "verify-concentration"},
                {"seed", seed},
                {"n", ns},
                {"T", T},
                {"reps", reps},
                {"moment_T", moment_T},
                {"moment_reps", moment_reps}};
  if (have_pairs) {
    json pj = json::array();
    for (const auto& p : explicit_pairs) pj.push_back(json::array({p.first, p.second}));
    manifest["pairs"] = pj;
  }
  return finish(std::move(manifest), {"pair-concentration", "excursion-bounds"},
                std::move(checks),
                {{"concentration.csv", std::move(csv)}, {"coupling_moments.csv", std::move(mcsv)}});
}

// ------------------------------------------------------- verify-tightness

RunResult cmd_tightness(const json& m, int workers) {
  check_fields(m, {"n", "T", "deltas", "reps"});
  std::uint64_t seed = seed_field(m);
  std::vector<std::int64_t> ns = int_list(m, "n", {32, 128}, 2, 100000);
  double T = real_field(m, "T", 1.0, 1e-3, 100.0);
  std::vector<double> deltas =
      real_list(m, "deltas", {0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625}, 1e-9, T);
  if (deltas.size() > 32) fail("deltas supports at most 32 values");
  for (std::size_t i = 0; i < deltas.size(); ++i)
    for (std::size_t j = i + 1; j < deltas.size(); ++j)
      if (deltas[i] == deltas[j]) fail("deltas must be distinct");
  std::int64_t reps = int_field(m, "reps", 10000, 1, 1'000'000);
  std::size_t D = deltas.size();
  Checks checks;
  std::string csv = "n,T,delta,reps,exceed_rate,std_error,bound,pass\n";
  for (std::size_t ni = 0; ni < ns.size(); ++ni) {
    std::int64_t n = ns[ni];
    double scale = double(n) * double(n);
    double H = T * scale;
    if (double(reps) * H > 6e9) fail("tightness: event budget exceeded");
    std::vector<std::uint8_t> flags(std::size_t(reps) * D, 0);
    parallel_for(reps, workers, [&](std::int64_t r) {
      KeyedStream stream(StreamKey{seed, experiment_id::kTightness,
                                   std::uint32_t(ni) << 20 | std::uint32_t(r), 0,
                                   StreamFamily::kPrimary});
      std::int64_t start = (n + 1) / 2;
      CadlagPath walk = simulate_srw(WalkSpec{start, 1.0, H}, stream);
      std::vector<double> mt, mv;
      mt.reserve(walk.jump_count());
      mv.reserve(walk.jump_count());
      double init = double(fold_lattice(start, n)) / double(n);
      double lastv = init, lastt = 0.0;
      auto times = walk.jump_times();
      auto values = walk.jump_values();
      for (std::size_t q = 0; q < times.size(); ++q) {
        double fv = double(fold_lattice(std::int64_t(std::llround(values[q])), n)) / double(n);
        if (fv == lastv) continue;
        double tm = times[q] / scale;
        if (tm <= lastt) tm = advance_time(lastt, 0.0);
        mt.push_back(tm);
        mv.push_back(fv);
        lastv = fv;
        lastt = tm;
      }
      CadlagPath macro(init, std::max(T, lastt), std::move(mt), std::move(mv));
      for (std::size_t d = 0; d < D; ++d)
        flags[std::size_t(r) * D + d] =
            oscillation_modulus(macro, T, deltas[d]) > std::pow(deltas[d], 0.125) ? 1 : 0;
    });
    for (std::size_t d = 0; d < D; ++d) {
      std::int64_t hits = 0;
      for (std::int64_t r = 0; r < reps; ++r) hits += flags[std::size_t(r) * D + d];
      double p = double(hits) / double(reps);
      double se = std::sqrt(std::max(p * (1.0 - p), 0.0) / double(reps));
      double bound = 1000.0 * T * (std::sqrt(deltas[d]) + 1.0 / (std::sqrt(deltas[d]) * scale));
      bool ok = upper_ok(p, se, bound);
      checks.add("tightness-n" + fmti(n) + "-delta" + fmt(deltas[d]), p, bound, se, ok);
      add_row(csv, {fmti(n), fmt(T), fmt(deltas[d]), fmti(reps), fmt(p), fmt(se), fmt(bound),
                    ok ? "1" : "0"});
    }
  }
  json manifest{{"command", "verify-tightness"},
                {"seed", seed},
                {"n", ns},
                {"T", T},
                {"deltas", deltas},
                {"reps", reps}};
  return finish(std::move(manifest), {"trajectory-tightness"}, std::move(checks),
                {{"tightness.csv", std::move(csv)}});
}

// ---------------------------------------------------- verify-hydrodynamic

RunResult cmd_hydro(const json& m, int workers) {
  check_fields(m, {"n", "times", "profile", "reps"});
  std::uint64_t seed = seed_field(m);
  std::vector<std::int64_t> ns = int_list(m, "n", {64, 256, 512}, 2, 60000);
  std::vector<double> times = real_list(m, "times", {0.01, 0.1, 1.0}, 1e-6, 100.0);
  require_increasing(times, "times");
  Profile profile =
      m.contains("profile") ? Profile::from_json(m.at("profile")) : Profile::indicator(0.0, 0.5);
  std::vector<std::int64_t> reps_n(ns.size());
  if (m.contains("reps")) {
    std::vector<std::int64_t> given = int_list(m, "reps", {}, 8, 10000);
    if (given.size() == 1) {
      std::fill(reps_n.begin(), reps_n.end(), given[0]);
    } else if (given.size() == ns.size()) {
      reps_n = given;
    } else {
      fail("reps must be a single count or one count per n");
    }
  } else {
    for (std::size_t ni = 0; ni < ns.size(); ++ni) {
      std::vector<std::uint8_t> eta = discretize_profile(profile, ns[ni]);
      std::int64_t c = 0;
      for (std::uint8_t o : eta) c += o;
      std::int64_t r = (10240 + c - 1) / c;
      r = ((r + 7) / 8) * 8;
      reps_n[ni] = std::clamp<std::int64_t>(r, 16, 10000);
    }
  }
  HeatKernelParams params{64, 0.06, 64};
  InitialLaw law = profile.initial_law();
  auto ref_cdf = [&](double y, double t) -> double {
    switch (law.kind) {
      case InitialLaw::Kind::kUniform:
        return rbm_pushforward_cdf(law.a, law.b, y, t, params);
      case InitialLaw::Kind::kDirac:
        return rbm_transition_cdf(law.x, y, t, params);
      case InitialLaw::Kind::kAtoms: {
        double s = 0.0;
        for (double a : law.atoms) s += rbm_transition_cdf(a, y, t, params);
        return s / double(law.atoms.size());
      }
    }
    return 0.0;
  };
  std::vector<PointMeasure> refs;
  refs.reserve(times.size());
  for (double t : times)
    refs.push_back(discretize_cdf([&](double y) { return ref_cdf(y, t); }, 4096));

  const std::int64_t B = 8;
  Checks checks;
  std::string csv = "n,t,wasserstein,std_error\n";
  std::vector<std::vector<double>> w1(times.size()), w1se(times.size());
  for (std::size_t ni = 0; ni < ns.size(); ++ni) {
    std::int64_t n = ns[ni];
    std::int64_t R = reps_n[ni];
    std::vector<std::uint8_t> eta0 = discretize_profile(profile, n);
    std::size_t c = 0;
    for (std::uint8_t o : eta0) c += o;
    double volume = 0.5 * double(n + 1) * times.back() * double(n) * double(n) * double(R);
    if (volume > 2e10) fail("hydrodynamic: event budget exceeded");
    std::vector<double> snaps(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) snaps[k] = times[k] * double(n) * double(n);
    std::vector<std::uint16_t> occ_pos(std::size_t(R) * times.size() * c);
    parallel_for(R, workers, [&](std::int64_t r) {
      std::size_t base = std::size_t(r) * times.size() * c;
      run_ssep(SsepConfig{n, 0.5}, eta0, snaps, seed, experiment_id::kHydrodynamic,
               std::uint32_t(ni) << 20 | std::uint32_t(r),
               [&](std::size_t si, const std::vector<std::uint8_t>& eta) {
                 std::size_t w = base + si * c, cnt = 0;
                 for (std::int64_t v = 1; v <= n; ++v)
                   if (eta[std::size_t(v - 1)]) occ_pos[w + cnt++] = std::uint16_t(v);
                 require(cnt == c, "hydrodynamic: occupancy count drifted");
               });
    });
    std::int64_t batchsz = (R + B - 1) / B;
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      std::vector<std::int64_t> cnt(std::size_t(n) + 1, 0);
      std::vector<std::vector<std::int64_t>> bcnt(static_cast<std::size_t>(B));
      std::vector<std::int64_t> breps(std::size_t(B), 0);
      for (auto& bc : bcnt) bc.assign(std::size_t(n) + 1, 0);
      for (std::int64_t r = 0; r < R; ++r) {
        std::size_t b = std::size_t(r / batchsz);
        ++breps[b];
        std::size_t w = std::size_t(r) * times.size() * c + ti * c;
        for (std::size_t q = 0; q < c; ++q) {
          ++cnt[occ_pos[w + q]];
          ++bcnt[b][occ_pos[w + q]];
        }
      }
      auto measure_from = [&](const std::vector<std::int64_t>& counts, std::int64_t tot) {
        std::vector<double> locs, ws;
        for (std::int64_t v = 1; v <= n; ++v) {
          if (counts[std::size_t(v)] > 0) {
            locs.push_back(double(v) / double(n));
            ws.push_back(double(counts[std::size_t(v)]) / double(tot));
          }
        }
        return PointMeasure(std::move(locs), std::move(ws));
      };
      double full = wasserstein1(measure_from(cnt, R * std::int64_t(c)), refs[ti]);
      std::vector<double> loo;
      for (std::int64_t b = 0; b < B; ++b) {
        if (breps[std::size_t(b)] == 0 || breps[std::size_t(b)] == R) continue;
        std::vector<std::int64_t> rest = cnt;
        for (std::int64_t v = 1; v <= n; ++v) rest[std::size_t(v)] -= bcnt[std::size_t(b)][std::size_t(v)];
        loo.push_back(wasserstein1(
            measure_from(rest, (R - breps[std::size_t(b)]) * std::int64_t(c)), refs[ti]));
      }
      double se = jackknife_se(loo);
      w1[ti].push_back(full);
      w1se[ti].push_back(se);
      add_row(csv, {fmti(n), fmt(times[ti]), fmt(full), fmt(se)});
    }
  }
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    std::string tag = fmt(times[ti]);
    double last = w1[ti].back(), lastse = w1se[ti].back();
    checks.add("hydro-final-t" + tag, last, 0.05, lastse, upper_ok(last, lastse, 0.05));
    if (ns.size() >= 2) add_monotone_check(checks, "hydro-monotone-t" + tag, w1[ti], w1se[ti]);
  }
  json manifest{{"command", "verify-hydrodynamic"},
                {"seed", seed},
                {"n", ns},
                {"times", times},
                {"profile", profile.to_json()},
                {"reps", reps_n}};
  return finish(std::move(manifest), {"hydrodynamic-profile"}, std::move(checks),
                {{"hydrodynamic.csv", std::move(csv)}});
}

// ---------------------------------------------------- verify-independence

struct GridSampler {
  const double* grid = nullptr;
  std::size_t count = 0;
  std::size_t idx = 0;
  std::int64_t p1 = 0, p2 = 0;
  std::array<std::int64_t, 8> rec1{}, rec2{};

  void flush(double t) {
    while (idx < count && grid[idx] < t) {
      rec1[idx] = p1;
      rec2[idx] = p2;
      ++idx;
    }
  }
  void on_s1(double t, std::int64_t pos) {
    flush(t);
    p1 = pos;
  }
  void on_s2(double t, std::int64_t pos) {
    flush(t);
    p2 = pos;
  }
  void on_s3(double, std::int64_t) {}
  void on_entry(double, std::int64_t) {}
  void on_exit(double, std::int64_t) {}
  bool should_stop() const { return false; }
  void finish() {
    while (idx < count) {
      rec1[idx] = p1;
      rec2[idx] = p2;
      ++idx;
    }
  }
};

RunResult cmd_independence(const json& m, int workers) {
  check_fields(m, {"n", "grid", "reps", "permutations"});
  std::uint64_t seed = seed_field(m);
  std::int64_t n = int_field(m, "n", 256, 2, 100000);
  std::vector<double> grid = real_list(m, "grid", {0.0, 0.25, 0.5, 1.0}, 0.0, 100.0);
  require_increasing(grid, "grid");
  if (grid.size() > 8) fail("grid supports at most 8 times");
  std::int64_t N = int_field(m, "reps", 5000, 10, 20000);
  std::int64_t B = int_field(m, "permutations", 199, 19, 9999);
  std::int64_t I = (n + 2) / 3, J = (2 * n + 2) / 3;
  if (I == J) J = I + 1;
  std::size_t K = grid.size();
  std::vector<double> gm(K);
  for (std::size_t k = 0; k < K; ++k) gm[k] = grid[k] * double(n) * double(n);
  double H = std::max(gm.back(), 1e-9);
  if (3.0 * double(N) * 2.5 * H > 1.2e10) fail("independence: event budget exceeded");
  std::vector<std::vector<double>> rows_joint(static_cast<std::size_t>(N)), rows_split(static_cast<std::size_t>(N));
  auto fold_of = [&](std::int64_t x) { return double(fold_lattice(x, n)) / double(n); };
  parallel_for(N, workers, [&](std::int64_t r) {
    KeyedStream primary(StreamKey{seed, experiment_id::kIndependence, std::uint32_t(r), 0,
                                  StreamFamily::kPrimary});
    KeyedStream aux(StreamKey{seed, experiment_id::kIndependence, std::uint32_t(r), 0,
                              StreamFamily::kAuxiliary});
    GridSampler s;
    s.grid = gm.data();
    s.count = K;
    s.p1 = I;
    s.p2 = J;
    run_coupled_triple(I, J, H, 0.5, primary, aux, s);
    s.finish();
    std::vector<double> row(2 * K);
    for (std::size_t k = 0; k < K; ++k) {
      row[k] = fold_of(s.rec1[k]);
      row[K + k] = fold_of(s.rec2[k]);
    }
    rows_joint[std::size_t(r)] = std::move(row);
  });
  parallel_for(N, workers, [&](std::int64_t r) {
    std::array<GridSampler, 2> s;
    for (int half = 0; half < 2; ++half) {
      std::uint32_t rep = (std::uint32_t(1) << 20) + 2 * std::uint32_t(r) + std::uint32_t(half);
      KeyedStream primary(
          StreamKey{seed, experiment_id::kIndependence, rep, 0, StreamFamily::kPrimary});
      KeyedStream aux(
          StreamKey{seed, experiment_id::kIndependence, rep, 0, StreamFamily::kAuxiliary});
      s[half].grid = gm.data();
      s[half].count = K;
      s[half].p1 = I;
      s[half].p2 = J;
      run_coupled_triple(I, J, H, 0.5, primary, aux, s[half]);
      s[half].finish();
    }
    std::vector<double> row(2 * K);
    for (std::size_t k = 0; k < K; ++k) {
      row[k] = fold_of(s[0].rec1[k]);
      row[K + k] = fold_of(s[1].rec2[k]);
    }
    rows_split[std::size_t(r)] = std::move(row);
  });
  KeyedStream perm(
      StreamKey{seed, experiment_id::kIndependence, 0, 1, StreamFamily::kAuxiliary});
  EnergyTestResult joint = energy_two_sample_test(rows_joint, rows_split, int(B), perm);
  Checks checks;
  checks.add("independence-null", joint.p_value, 0.01, 0.0, joint.p_value > 0.01);

  // Synthetic alternative: duplicated coordinate against an independent copy.
  std::int64_t NP = 2000;
  KeyedStream syn(StreamKey{seed, experiment_id::kIndependence, 1, 2, StreamFamily::kAuxiliary});
  std::vector<std::vector<double>> pa(static_cast<std::size_t>(NP)), pb(static_cast<std::size_t>(NP));
  for (std::int64_t i = 0; i < NP; ++i) {
    double xv = syn.uniform01();
    pa[std::size_t(i)] = {xv, xv};
  }
  for (std::int64_t i = 0; i < NP; ++i) {
    double xv = syn.uniform01(), yv = syn.uniform01();
    pb[std::size_t(i)] = {xv, yv};
  }
  KeyedStream perm2(
      StreamKey{seed, experiment_id::kIndependence, 2, 3, StreamFamily::kAuxiliary});
  EnergyTestResult power = energy_two_sample_test(pa, pb, int(B), perm2);
  checks.add("independence-power", power.p_value, 0.01, 0.0, power.p_value <= 0.01);

  std::string gtag;
  for (std::size_t k = 0; k < K; ++k) gtag += (k ? ";" : "") + fmt(grid[k]);
  std::string csv = "test,n,grid,reps,permutations,statistic,p_value\n";
  add_row(csv, {"joint-null", fmti(n), gtag, fmti(N), fmti(B), fmt(joint.statistic),
                fmt(joint.p_value)});
  add_row(csv, {"synthetic-power", "-", "-", fmti(NP), fmti(B), fmt(power.statistic),
                fmt(power.p_value)});
  json manifest{{"command", "verify-independence"},
                {"seed", seed},
                {"n", n},
                {"grid", grid},
                {"reps", N},
                {"permutations", B}};
  return finish(std::move(manifest), {"joint-law-equivalence"}, std::move(checks),
                {{"independence.csv", std::move(csv)}});
}

// ------------------------------------------------------- verify-marginals

RunResult cmd_marginals(const json& m, int workers) {
  check_fields(m, {"n", "t", "reps"});
  std::uint64_t seed = seed_field(m);
  std::vector<std::int64_t> ns = int_list(m, "n", {64, 256, 1024}, 2, 60000);
  double t = real_field(m, "t", 0.1, 1e-6, 10.0);
  std::int64_t reps = int_field(m, "reps", 100000, 100, 1'000'000);
  HeatKernelParams params{64, 0.06, 64};
  const std::int64_t B = 10;
  std::int64_t batchsz = (reps + B - 1) / B;
  std::vector<double> gl_x, gl_w;
  detail::gauss_legendre(8, gl_x, gl_w);
  PointMeasure uref =
      discretize_cdf([](double v) { return std::clamp(v, 0.0, 1.0); }, 8192);
  Checks checks;
  std::string csv = "n,t,reps,w1,std_error\n";
  std::vector<double> totals, tses;
  for (std::size_t ni = 0; ni < ns.size(); ++ni) {
    std::int64_t n = ns[ni];
    double micro_t = t * double(n) * double(n);
    std::vector<std::int32_t> xi(static_cast<std::size_t>(reps)), yi(static_cast<std::size_t>(reps));
    parallel_for(reps, workers, [&](std::int64_t r) {
      KeyedStream stream(StreamKey{seed, experiment_id::kMarginals,
                                   std::uint32_t(ni) << 20 | std::uint32_t(r), 0,
                                   StreamFamily::kPrimary});
      std::int64_t start = 1 + std::int64_t(stream.uniform_below(std::uint32_t(n)));
      std::int64_t disp = sample_srw_displacement(micro_t, 1.0, stream);
      xi[std::size_t(r)] = std::int32_t(start);
      yi[std::size_t(r)] = std::int32_t(fold_lattice(start + disp, n));
    });
    // Conditioning uses a fixed number of start bins so each conditional
    // keeps reps/K samples at every lattice size; conditioning on single
    // vertices would shrink the per-cell sample to reps/n and the empirical
    // W1 noise floor would grow with n instead of converging.
    const std::int64_t K = std::min<std::int64_t>(16, n);
    std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> bins(
        static_cast<std::size_t>(K));
    std::vector<std::int64_t> xc(std::size_t(n) + 1, 0);
    std::vector<std::int64_t> xcb((std::size_t(n) + 1) * std::size_t(B), 0);
    std::vector<std::int64_t> bsize(std::size_t(B), 0);
    for (std::int64_t r = 0; r < reps; ++r) {
      std::int32_t b = std::int32_t(r / batchsz);
      std::int64_t v = xi[std::size_t(r)];
      bins[std::size_t((v - 1) * K / n)].push_back({yi[std::size_t(r)], b});
      ++xc[std::size_t(v)];
      ++xcb[std::size_t(v) * std::size_t(B) + std::size_t(b)];
      ++bsize[std::size_t(b)];
    }
    auto xmeasure = [&](std::int64_t drop_batch) {
      std::vector<double> locs, ws;
      std::int64_t tot = reps - (drop_batch >= 0 ? bsize[std::size_t(drop_batch)] : 0);
      for (std::int64_t v = 1; v <= n; ++v) {
        std::int64_t cv = xc[std::size_t(v)];
        if (drop_batch >= 0)
          cv -= xcb[std::size_t(v) * std::size_t(B) + std::size_t(drop_batch)];
        if (cv > 0) {
          locs.push_back(double(v) / double(n));
          ws.push_back(double(cv) / double(tot));
        }
      }
      return PointMeasure(std::move(locs), std::move(ws));
    };
    double comp1_full = wasserstein1(xmeasure(-1), uref);
    std::vector<double> comp1_loo, comp2_loo(std::size_t(B), 0.0);
    std::vector<std::int64_t> active;
    for (std::int64_t b = 0; b < B; ++b)
      if (bsize[std::size_t(b)] > 0 && bsize[std::size_t(b)] < reps) active.push_back(b);
    for (std::int64_t b : active) comp1_loo.push_back(wasserstein1(xmeasure(b), uref));
    double comp2_full = 0.0;
    for (std::int64_t kk = 0; kk < K; ++kk) {
      const auto& bin = bins[std::size_t(kk)];
      if (bin.empty()) continue;
      double a = double(kk) / double(K), bp = double(kk + 1) / double(K);
      double mid = 0.5 * (a + bp), half = 0.5 * (bp - a);
      auto cdf = [&](double y) {
        double s = 0.0;
        for (std::size_t q = 0; q < gl_x.size(); ++q)
          s += gl_w[q] * rbm_transition_cdf(mid + half * gl_x[q], y, t, params);
        return 0.5 * s;
      };
      PointMeasure ref = discretize_cdf(cdf, 2048);
      std::vector<double> ys;
      ys.reserve(bin.size());
      for (const auto& e : bin) ys.push_back(double(e.first) / double(n));
      comp2_full +=
          (double(bin.size()) / double(reps)) * wasserstein1(PointMeasure::from_samples(ys), ref);
      for (std::size_t ai = 0; ai < active.size(); ++ai) {
        std::int64_t b = active[ai];
        std::vector<double> sub;
        sub.reserve(bin.size());
        for (const auto& e : bin)
          if (e.second != b) sub.push_back(double(e.first) / double(n));
        if (sub.empty()) continue;
        comp2_loo[std::size_t(ai)] +=
            (double(sub.size()) / double(reps - bsize[std::size_t(b)])) *
            wasserstein1(PointMeasure::from_samples(sub), ref);
      }
    }
    double total = comp1_full + comp2_full;
    std::vector<double> loo;
    for (std::size_t ai = 0; ai < active.size(); ++ai)
      loo.push_back(comp1_loo[ai] + comp2_loo[ai]);
    double se = jackknife_se(loo);
    totals.push_back(total);
    tses.push_back(se);
    add_row(csv, {fmti(n), fmt(t), fmti(reps), fmt(total), fmt(se)});
  }
  checks.add("marginal-final", totals.back(), 0.05, tses.back(),
             upper_ok(totals.back(), tses.back(), 0.05));
  if (ns.size() >= 2) add_monotone_check(checks, "marginal-monotone", totals, tses);
  json manifest{{"command", "verify-marginals"},
                {"seed", seed},
                {"n", ns},
                {"t", t},
                {"reps", reps}};
  return finish(std::move(manifest), {"marginal-convergence"}, std::move(checks),
                {{"marginals.csv", std::move(csv)}});
}

// --------------------------------------------------------------- report

constexpr std::array<std::pair<const char*, const char*>, 8> kClaims{{
    {"srw-visits", "expected origin visits of the rate-2 walk stay below 3*sqrt(T)"},
    {"return-scaling", "mean origin returns of the rescaled walk grow like 1/epsilon"},
    {"excursion-bounds", "adjacency excursion count and occupation time grow like sqrt(T)"},
    {"pair-concentration", "detached shadow walker stays within n^(-1/4) of its partner"},
    {"trajectory-tightness", "rescaled trajectory oscillation obeys the modulus bound"},
    {"marginal-convergence",
     "tracked-particle two-time law approaches the reflected Brownian pair law"},
    {"joint-law-equivalence", "two tracked trajectories decorrelate to independent copies"},
    {"hydrodynamic-profile", "occupation density follows the folded heat evolution"},
}};

RunResult cmd_report(const json& m, int) {
  check_fields(m, {"verdicts"});
  std::uint64_t seed = seed_field(m);
  json vlist = m.contains("verdicts") ? m.at("verdicts") : json::array();
  if (!vlist.is_array()) fail("verdicts must be an array");
  for (const json& v : vlist) {
    if (!v.is_object() || !v.contains("claims") || !v.at("claims").is_array() ||
        !v.contains("passed") || !v.at("passed").is_boolean() || !v.contains("command") ||
        !v.at("command").is_string())
      fail("verdict entries need command, claims and passed fields");
  }
  std::string csv = "claim,status,sources\n";
  std::string txt = "claim                      status    description\n";
  json claim_status = json::object();
  std::vector<std::string> failing;
  bool any_fail = false;
  for (const auto& [claim, desc] : kClaims) {
    std::string status = "UNTESTED";
    std::string sources;
    for (const json& v : vlist) {
      bool covers = false;
      for (const json& c : v.at("claims"))
        if (c.is_string() && c.get<std::string>() == claim) covers = true;
      if (!covers) continue;
      if (!sources.empty()) sources += ';';
      sources += v.at("command").get<std::string>();
      if (!v.at("passed").get<bool>())
        status = "FAIL";
      else if (status != "FAIL")
        status = "PASS";
    }
    if (status == "FAIL") {
      any_fail = true;
      failing.push_back(claim);
    }
    claim_status[claim] = status;
    add_row(csv, {claim, status, sources});
    std::string line = claim;
    line.resize(27, ' ');
    std::string st = status;
    st.resize(10, ' ');
    txt += line + st + desc + "\n";
  }
  std::string overall = any_fail ? "FAIL" : (vlist.empty() ? "UNTESTED" : "PASS");
  txt += "\noverall: " + overall + "\n";
  if (!failing.empty()) {
    txt += "failing:";
    for (const auto& f : failing) txt += " " + f;
    txt += "\n";
  }
  json manifest{{"command", "report"}, {"seed", seed}, {"verdicts", vlist}};
  manifest["version"] = kArtifactVersion;
  RunResult out;
  out.passed = !any_fail;
  out.verdict = json{{"command", "report"},   {"version", kArtifactVersion},
                     {"seed", seed},          {"claims", claim_status},
                     {"status", overall},     {"failing", failing},
                     {"checks", json::array()}, {"passed", !any_fail}};
  out.manifest = std::move(manifest);
  out.files = {{"report.csv", std::move(csv)}, {"report.txt", std::move(txt)}};
  return out;
}

}  // namespace

RunResult run_manifest(const json& manifest, int workers) {
  if (!manifest.is_object()) throw InvalidArgument("manifest: must be a JSON object");
  if (!manifest.contains("command") || !manifest.at("command").is_string())
    throw InvalidArgument("manifest: missing string field 'command'");
  std::string cmd = manifest.at("command").get<std::string>();
  int w = std::clamp(workers, 1, 64);
  if (cmd == "simulate") return cmd_simulate(manifest, w);
  if (cmd == "verify-visits") return cmd_visits(manifest, w);
  if (cmd == "verify-returns-scaling") return cmd_returns(manifest, w);
  if (cmd == "verify-concentration") return cmd_concentration(manifest, w);
  if (cmd == "verify-tightness") return cmd_tightness(manifest, w);
  if (cmd == "verify-hydrodynamic") return cmd_hydro(manifest, w);
  if (cmd == "verify-independence") return cmd_independence(manifest, w);
  if (cmd == "verify-marginals") return cmd_marginals(manifest, w);
  if (cmd == "report") return cmd_report(manifest, w);
  throw InvalidArgument("manifest: unknown command '" + cmd + "'");
}

void write_run_outputs(const RunResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw RuntimeFailure("cannot create output directory " + out_dir);
  auto write = [&](const std::string& name, const std::string& content) {
    fs::path p = fs::path(out_dir) / name;
    std::ofstream os(p, std::ios::binary);
    if (!os) throw RuntimeFailure("cannot open " + p.string());
    os << content;
    os.flush();
    if (!os) throw RuntimeFailure("write failed for " + p.string());
  };
  write("manifest.json", result.manifest.dump(2) + "\n");
  write("verdict.json", result.verdict.dump(2) + "\n");
  for (const auto& [name, content] : result.files) write(name, content);
}

}  // namespace interlab
