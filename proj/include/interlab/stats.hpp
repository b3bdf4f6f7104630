#pragma once

#include <cstdint>
#include <vector>

#include "interlab/rng.hpp"

namespace interlab {

// Streaming mean/variance accumulator (Welford).
class MeanVar {
 public:
  void add(double x) {
    ++n_;
    double d = x - mean_;
    mean_ += d / double(n_);
    m2_ += d * (x - mean_);
  }
  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / double(n_ - 1) : 0.0; }
  double std_error() const;

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0, m2_ = 0.0;
};

struct LeastSquaresFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};

LeastSquaresFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Goodness of fit of observed counts against expected counts (same total).
// Adjacent cells are pooled until every expected count is at least 5.
ChiSquareResult chi_square_gof(const std::vector<double>& observed,
                               const std::vector<double>& expected);

// Homogeneity of two independent count vectors over the same cells, with the
// same pooling rule applied to both groups' expected counts.
ChiSquareResult chi_square_two_sample(const std::vector<double>& counts_a,
                                      const std::vector<double>& counts_b);

// Asymptotic Kolmogorov-Smirnov p-value for sup distance d at sample size n
// (Stephens' small-sample adjustment).
double ks_p_value(double d, std::size_t n);

struct EnergyTestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int permutations = 0;
};

// Two-sample energy-distance test between point clouds in R^d with a
// permutation p-value: p = (1 + #{perm >= observed}) / (B + 1).
EnergyTestResult energy_two_sample_test(const std::vector<std::vector<double>>& a,
                                        const std::vector<std::vector<double>>& b,
                                        int n_permutations, KeyedStream& stream);

struct DistanceCorrelationResult {
  double dcov2 = 0.0;       // squared sample distance covariance
  double dcor = 0.0;        // sample distance correlation
  double statistic = 0.0;   // n * dcov2 / (mean|x-x'| * mean|y-y'|)
  double threshold = 0.0;
  bool reject = false;      // dependence detected at the configured level
};

// Conservative distance-covariance independence test at level alpha:
// reject iff statistic >= (Phi^{-1}(1 - alpha/2))^2.
DistanceCorrelationResult distance_correlation_test(const std::vector<double>& x,
                                                    const std::vector<double>& y,
                                                    double alpha = 0.001);

struct MannKendallResult {
  int s = 0;
  double p_value = 1.0;     // P(S_perm >= S_observed) under random ordering
};

// Exact one-sided Mann-Kendall trend test (enumerates all orderings; m <= 8).
MannKendallResult mann_kendall_increasing(const std::vector<double>& values);

}  // namespace interlab
