#include "interlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "interlab/error.hpp"

namespace interlab {

double MeanVar::std_error() const {
  return n_ > 1 ? std::sqrt(variance() / double(n_)) : 0.0;
}

LeastSquaresFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "least_squares: needs >= 2 paired points");
  std::size_t n = x.size();
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / double(n);
  double my = std::accumulate(y.begin(), y.end(), 0.0) / double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, "least_squares: x values must not be constant");
  LeastSquaresFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = y[i] - fit.intercept - fit.slope * x[i];
      ssr += r * r;
    }
    fit.slope_se = std::sqrt(ssr / double(n - 2) / sxx);
  }
  return fit;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "pearson: needs >= 2 paired points");
  std::size_t n = x.size();
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / double(n);
  double my = std::accumulate(y.begin(), y.end(), 0.0) / double(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0 && syy > 0.0, "pearson: degenerate sample");
  return sxy / std::sqrt(sxx * syy);
}

namespace {

double chi_square_tail(double statistic, int dof) {
  if (dof <= 0) return 1.0;
  return boost::math::gamma_q(double(dof) / 2.0, statistic / 2.0);
}

// Pool adjacent cells until every pooled expected count reaches min_expected;
// a trailing underweight group is merged backwards into its predecessor.
void pool_cells(const std::vector<double>& expected, std::vector<std::size_t>& group_of,
                std::size_t& n_groups, double min_expected) {
  group_of.assign(expected.size(), 0);
  n_groups = 0;
  double acc = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    group_of[i] = n_groups;
    acc += expected[i];
    if (acc >= min_expected) {
      ++n_groups;
      acc = 0.0;
    }
  }
  if (acc > 0.0 && n_groups > 0) {
    for (std::size_t i = expected.size(); i-- > 0 && group_of[i] == n_groups;) {
      group_of[i] = n_groups - 1;
    }
  } else if (acc > 0.0) {
    n_groups = 1;
  }
}

}  // namespace

ChiSquareResult chi_square_gof(const std::vector<double>& observed,
                               const std::vector<double>& expected) {
  require(observed.size() == expected.size() && observed.size() >= 2,
          "chi_square_gof: needs >= 2 matching cells");
  double tot_obs = std::accumulate(observed.begin(), observed.end(), 0.0);
  double tot_exp = std::accumulate(expected.begin(), expected.end(), 0.0);
  require(tot_exp > 0.0, "chi_square_gof: expected counts must be positive");
  require(std::fabs(tot_obs - tot_exp) <= 1e-6 * tot_exp,
          "chi_square_gof: observed and expected totals differ");
  for (double e : expected) require(e >= 0.0, "chi_square_gof: negative expected count");
  std::vector<std::size_t> group_of;
  std::size_t n_groups = 0;
  pool_cells(expected, group_of, n_groups, 5.0);
  require(n_groups >= 2, "chi_square_gof: too little expected mass to form two cells");
  std::vector<double> obs(n_groups, 0.0), exp_(n_groups, 0.0);
  for (std::size_t i = 0; i < observed.size(); ++i) {
    obs[group_of[i]] += observed[i];
    exp_[group_of[i]] += expected[i];
  }
  ChiSquareResult r;
  for (std::size_t g = 0; g < n_groups; ++g) {
    double d = obs[g] - exp_[g];
    r.statistic += d * d / exp_[g];
  }
  r.dof = int(n_groups) - 1;
  r.p_value = chi_square_tail(r.statistic, r.dof);
  return r;
}

ChiSquareResult chi_square_two_sample(const std::vector<double>& counts_a,
                                      const std::vector<double>& counts_b) {
  require(counts_a.size() == counts_b.size() && counts_a.size() >= 2,
          "chi_square_two_sample: needs >= 2 matching cells");
  double na = std::accumulate(counts_a.begin(), counts_a.end(), 0.0);
  double nb = std::accumulate(counts_b.begin(), counts_b.end(), 0.0);
  require(na > 0.0 && nb > 0.0, "chi_square_two_sample: empty sample");
  std::size_t k = counts_a.size();
  // Expected count in cell i for group g is n_g * pooled_i / (na + nb); pool
  // on the smaller group's expected counts so both groups clear the floor.
  std::vector<double> min_exp(k);
  double scale = std::min(na, nb) / (na + nb);
  for (std::size_t i = 0; i < k; ++i) min_exp[i] = (counts_a[i] + counts_b[i]) * scale;
  std::vector<std::size_t> group_of;
  std::size_t n_groups = 0;
  pool_cells(min_exp, group_of, n_groups, 5.0);
  require(n_groups >= 2, "chi_square_two_sample: too little mass to form two cells");
  std::vector<double> a(n_groups, 0.0), b(n_groups, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    a[group_of[i]] += counts_a[i];
    b[group_of[i]] += counts_b[i];
  }
  ChiSquareResult r;
  for (std::size_t g = 0; g < n_groups; ++g) {
    double pooled = a[g] + b[g];
    double ea = pooled * na / (na + nb);
    double eb = pooled * nb / (na + nb);
    r.statistic += (a[g] - ea) * (a[g] - ea) / ea + (b[g] - eb) * (b[g] - eb) / eb;
  }
  r.dof = int(n_groups) - 1;
  r.p_value = chi_square_tail(r.statistic, r.dof);
  return r;
}

double ks_p_value(double d, std::size_t n) {
  require(d >= 0.0, "ks_p_value: distance must be nonnegative");
  if (d == 0.0) return 1.0;
  double sn = std::sqrt(double(n));
  double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * double(k) * double(k) * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double euclidean_flat(const double* p, const double* q, std::size_t dim) {
  double s = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    double d = p[k] - q[k];
    s += d * d;
  }
  return std::sqrt(s);
}

// Sum of pairwise distances within the index range [lo, hi) of `order`, over
// row-major flattened points.
double within_group_sum(const std::vector<double>& flat, std::size_t dim,
                        const std::vector<std::size_t>& order, std::size_t lo,
                        std::size_t hi) {
  double s = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double* pi = flat.data() + order[i] * dim;
    for (std::size_t j = i + 1; j < hi; ++j) {
      s += euclidean_flat(pi, flat.data() + order[j] * dim, dim);
    }
  }
  return s;
}

double energy_statistic(double s_all, double s_a, double s_b, double n, double m) {
  double s_ab = s_all - s_a - s_b;
  return 2.0 * s_ab / (n * m) - 2.0 * s_a / (n * n) - 2.0 * s_b / (m * m);
}

}  // namespace

EnergyTestResult energy_two_sample_test(const std::vector<std::vector<double>>& a,
                                        const std::vector<std::vector<double>>& b,
                                        int n_permutations, KeyedStream& stream) {
  require(a.size() >= 2 && b.size() >= 2, "energy test: each sample needs >= 2 points");
  require(n_permutations >= 1, "energy test: needs >= 1 permutation");
  std::size_t dim = a.front().size();
  require(dim >= 1, "energy test: zero-dimensional points");
  for (const auto& p : a) require(p.size() == dim, "energy test: ragged sample");
  for (const auto& p : b) require(p.size() == dim, "energy test: ragged sample");
  std::size_t n = a.size(), total = a.size() + b.size();
  std::vector<double> flat;
  flat.reserve(total * dim);
  for (const auto& p : a) flat.insert(flat.end(), p.begin(), p.end());
  for (const auto& p : b) flat.insert(flat.end(), p.begin(), p.end());
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  double s_a = within_group_sum(flat, dim, order, 0, n);
  double s_b = within_group_sum(flat, dim, order, n, total);
  double s_cross = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* pi = flat.data() + i * dim;
    for (std::size_t j = n; j < total; ++j) {
      s_cross += euclidean_flat(pi, flat.data() + j * dim, dim);
    }
  }
  double s_all = s_a + s_b + s_cross;
  double dn = double(n), dm = double(total - n);
  EnergyTestResult r;
  r.statistic = energy_statistic(s_all, s_a, s_b, dn, dm);
  r.permutations = n_permutations;
  int exceed = 0;
  for (int p = 0; p < n_permutations; ++p) {
    for (std::size_t i = total - 1; i > 0; --i) {
      std::size_t j = stream.uniform_below(std::uint32_t(i) + 1);
      std::swap(order[i], order[j]);
    }
    double pa = within_group_sum(flat, dim, order, 0, n);
    double pb = within_group_sum(flat, dim, order, n, total);
    if (energy_statistic(s_all, pa, pb, dn, dm) >= r.statistic) ++exceed;
  }
  r.p_value = double(1 + exceed) / double(n_permutations + 1);
  return r;
}

DistanceCorrelationResult distance_correlation_test(const std::vector<double>& x,
                                                    const std::vector<double>& y,
                                                    double alpha) {
  std::size_t n = x.size();
  require(n == y.size() && n >= 4, "distance_correlation_test: needs >= 4 paired points");
  require(alpha > 0.0 && alpha < 1.0, "distance_correlation_test: alpha outside (0,1)");
  std::vector<double> ax(n, 0.0), ay(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      ax[i] += std::fabs(x[i] - x[j]);
      ay[i] += std::fabs(y[i] - y[j]);
    }
    ax[i] /= double(n);
    ay[i] /= double(n);
  }
  double gx = std::accumulate(ax.begin(), ax.end(), 0.0) / double(n);
  double gy = std::accumulate(ay.begin(), ay.end(), 0.0) / double(n);
  require(gx > 0.0 && gy > 0.0, "distance_correlation_test: degenerate sample");
  double vxy = 0.0, vxx = 0.0, vyy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double aij = std::fabs(x[i] - x[j]) - ax[i] - ax[j] + gx;
      double bij = std::fabs(y[i] - y[j]) - ay[i] - ay[j] + gy;
      vxy += aij * bij;
      vxx += aij * aij;
      vyy += bij * bij;
    }
  }
  vxy /= double(n) * double(n);
  vxx /= double(n) * double(n);
  vyy /= double(n) * double(n);
  DistanceCorrelationResult r;
  r.dcov2 = vxy;
  r.dcor = (vxx > 0.0 && vyy > 0.0) ? std::sqrt(std::max(0.0, vxy) / std::sqrt(vxx * vyy)) : 0.0;
  r.statistic = double(n) * vxy / (gx * gy);
  // Quantile of the standard normal at 1 - alpha/2 by bisection on erf.
  double lo = 0.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < 1.0 - alpha / 2.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double z = 0.5 * (lo + hi);
  r.threshold = z * z;
  r.reject = r.statistic >= r.threshold;
  return r;
}

MannKendallResult mann_kendall_increasing(const std::vector<double>& values) {
  std::size_t m = values.size();
  require(m >= 3 && m <= 8, "mann_kendall_increasing: supports 3..8 points");
  auto s_of = [&](const std::vector<std::size_t>& idx) {
    int s = 0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        double d = values[idx[j]] - values[idx[i]];
        s += (d > 0.0) - (d < 0.0);
      }
    }
    return s;
  };
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  MannKendallResult r;
  r.s = s_of(idx);
  std::int64_t total = 0, at_least = 0;
  std::sort(idx.begin(), idx.end());
  do {
    ++total;
    if (s_of(idx) >= r.s) ++at_least;
  } while (std::next_permutation(idx.begin(), idx.end()));
  r.p_value = double(at_least) / double(total);
  return r;
}

}  // namespace interlab
