#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace interlab {

// Weighted atoms on [0,1].  Construction sorts by location, merges duplicate
// locations, and validates that weights are positive and sum to 1 within 1e-12.
class PointMeasure {
 public:
  PointMeasure(std::vector<double> locations, std::vector<double> weights);
  static PointMeasure uniform_atoms(std::vector<double> locations);
  static PointMeasure from_samples(const std::vector<double>& samples);

  const std::vector<double>& locations() const { return loc_; }
  const std::vector<double>& weights() const { return w_; }
  std::size_t size() const { return loc_.size(); }
  // Right-continuous CDF: total weight of atoms at locations <= x.
  double cdf(double x) const;

 private:
  std::vector<double> loc_, w_, cum_;
};

// Sup distance between the empirical CDF and a continuous reference CDF on
// [0,1], evaluated at every atom and its left limit.  The reference must be
// nondecreasing with F(0) >= 0 and F(1) = 1.
double ks_distance(const PointMeasure& empirical,
                   const std::function<double(double)>& reference_cdf);

// Exact L1 distance between the two CDFs, integrated over the merged
// breakpoint partition of [0,1].
double wasserstein1(const PointMeasure& a, const PointMeasure& b);

// Atomic approximation with k cells: mass F(i/k) - F((i-1)/k) placed at i/k,
// plus any atom the CDF has at 0.  Wasserstein-1 error at most 1/k.
PointMeasure discretize_cdf(const std::function<double(double)>& cdf, std::size_t k);

}  // namespace interlab
