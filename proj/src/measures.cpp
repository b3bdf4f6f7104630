#include "interlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "interlab/error.hpp"

namespace interlab {

namespace {

double kahan_sum(const std::vector<double>& v) {
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    double y = x - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace

PointMeasure::PointMeasure(std::vector<double> locations, std::vector<double> weights) {
  require(locations.size() == weights.size(),
          "PointMeasure: location/weight lists must have equal length");
  require(!locations.empty(), "PointMeasure: needs at least one atom");
  std::vector<std::size_t> order(locations.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return locations[a] < locations[b]; });
  loc_.reserve(order.size());
  w_.reserve(order.size());
  for (std::size_t idx : order) {
    double x = locations[idx], w = weights[idx];
    require(x >= 0.0 && x <= 1.0, "PointMeasure: atom location outside [0,1]");
    require(w > 0.0 && std::isfinite(w), "PointMeasure: weights must be positive");
    if (!loc_.empty() && loc_.back() == x) {
      w_.back() += w;
    } else {
      loc_.push_back(x);
      w_.push_back(w);
    }
  }
  require(std::fabs(kahan_sum(w_) - 1.0) <= 1e-12, "PointMeasure: weights must sum to 1");
  cum_.resize(w_.size());
  double run = 0.0;
  for (std::size_t i = 0; i < w_.size(); ++i) {
    run += w_[i];
    cum_[i] = run;
  }
  cum_.back() = 1.0;
}

PointMeasure PointMeasure::uniform_atoms(std::vector<double> locations) {
  require(!locations.empty(), "PointMeasure: needs at least one atom");
  std::vector<double> w(locations.size(), 1.0 / double(locations.size()));
  return PointMeasure(std::move(locations), std::move(w));
}

PointMeasure PointMeasure::from_samples(const std::vector<double>& samples) {
  return uniform_atoms(samples);
}

double PointMeasure::cdf(double x) const {
  auto it = std::upper_bound(loc_.begin(), loc_.end(), x);
  if (it == loc_.begin()) return 0.0;
  return cum_[std::size_t(it - loc_.begin()) - 1];
}

double ks_distance(const PointMeasure& empirical,
                   const std::function<double(double)>& reference_cdf) {
  double f1 = reference_cdf(1.0);
  require(std::fabs(f1 - 1.0) <= 1e-9, "ks_distance: reference CDF must reach 1 at 1");
  require(reference_cdf(0.0) >= -1e-12, "ks_distance: reference CDF negative at 0");
  const auto& loc = empirical.locations();
  double best = 0.0, prev_cum = 0.0, prev_ref = 0.0;
  for (std::size_t i = 0; i < loc.size(); ++i) {
    double ref = reference_cdf(loc[i]);
    require(ref >= prev_ref - 1e-12 && ref <= 1.0 + 1e-12,
            "ks_distance: reference CDF not nondecreasing into [0,1]");
    double cum = empirical.cdf(loc[i]);
    best = std::max(best, std::fabs(cum - ref));
    best = std::max(best, std::fabs(prev_cum - ref));
    prev_cum = cum;
    prev_ref = ref;
  }
  return best;
}

double wasserstein1(const PointMeasure& a, const PointMeasure& b) {
  const auto& la = a.locations();
  const auto& lb = b.locations();
  std::size_t ia = 0, ib = 0;
  double prev_x = 0.0, total = 0.0;
  while (ia < la.size() || ib < lb.size()) {
    double x = std::min(ia < la.size() ? la[ia] : 1.0, ib < lb.size() ? lb[ib] : 1.0);
    if (x > prev_x) total += std::fabs(a.cdf(prev_x) - b.cdf(prev_x)) * (x - prev_x);
    while (ia < la.size() && la[ia] == x) ++ia;
    while (ib < lb.size() && lb[ib] == x) ++ib;
    prev_x = x;
  }
  if (prev_x < 1.0) total += std::fabs(a.cdf(prev_x) - b.cdf(prev_x)) * (1.0 - prev_x);
  return total;
}

PointMeasure discretize_cdf(const std::function<double(double)>& cdf, std::size_t k) {
  require(k >= 1, "discretize_cdf: needs at least one cell");
  std::vector<double> loc, w;
  double prev = cdf(0.0);
  require(prev >= -1e-12, "discretize_cdf: CDF negative at 0");
  if (prev > 0.0) {
    loc.push_back(0.0);
    w.push_back(prev);
  }
  for (std::size_t i = 1; i <= k; ++i) {
    double x = double(i) / double(k);
    double cur = cdf(x);
    require(cur >= prev - 1e-12, "discretize_cdf: CDF not nondecreasing");
    double mass = cur - prev;
    if (mass > 0.0) {
      loc.push_back(x);
      w.push_back(mass);
    }
    prev = cur;
  }
  require(std::fabs(prev - 1.0) <= 1e-9, "discretize_cdf: CDF must reach 1 at 1");
  // Absorb the sub-1e-9 closure defect into the largest cell so weights sum to 1.
  double defect = 1.0 - kahan_sum(w);
  *std::max_element(w.begin(), w.end()) += defect;
  return PointMeasure(std::move(loc), std::move(w));
}

}  // namespace interlab
