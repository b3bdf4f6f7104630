#include "interlab/reflected_bm.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "interlab/interchange.hpp"

namespace interlab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTailTol = 1e-12;

double gauss_density(double z, double t) {
  return std::exp(-z * z / (2.0 * t)) / std::sqrt(2.0 * kPi * t);
}

double gauss_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

void validate_point(double x, double y, double t, const HeatKernelParams& params) {
  require(x >= 0.0 && x <= 1.0, "heat kernel: x must lie in [0,1]");
  require(y >= 0.0 && y <= 1.0, "heat kernel: y must lie in [0,1]");
  require(t > 0.0 && std::isfinite(t), "heat kernel: t must be positive");
  require(params.image_terms >= 1 && params.spectral_max_terms >= 1 &&
              params.time_switch > 0.0,
          "heat kernel: invalid parameters");
}

// Images with |k| > K contribute Gaussian terms with arguments of modulus at
// least 2K; certify the truncation with a geometric envelope.
void certify_image_tail(int K, double t) {
  double ratio = std::exp(-4.0 * double(K) / t);
  double bound = 4.0 * gauss_density(2.0 * double(K), t) / (1.0 - ratio);
  if (!(ratio < 1.0) || !(bound < kTailTol))
    throw RuntimeFailure("heat kernel: image expansion not converged; raise image_terms");
}

void certify_spectral_tail(int k, double t) {
  double head = 2.0 * std::exp(-double(k) * double(k) * kPi * kPi * t / 2.0);
  double ratio = std::exp(-double(k) * kPi * kPi * t);
  if (!(ratio < 1.0) || !(head / (1.0 - ratio) < kTailTol))
    throw RuntimeFailure("heat kernel: spectral expansion not converged; raise max terms");
}

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

}  // namespace

double rbm_density_images(double x, double y, double t, const HeatKernelParams& params) {
  validate_point(x, y, t, params);
  int K = params.image_terms;
  certify_image_tail(K, t);
  double sum = 0.0;
  for (int k = -K; k <= K; ++k) {
    double shift = 2.0 * double(k);
    sum += gauss_density(y - x + shift, t) + gauss_density(y + x + shift, t);
  }
  return sum;
}

double rbm_density_spectral(double x, double y, double t, const HeatKernelParams& params) {
  validate_point(x, y, t, params);
  double sum = 1.0;
  int k = 1;
  for (; k <= params.spectral_max_terms; ++k) {
    double amp = 2.0 * std::exp(-double(k) * double(k) * kPi * kPi * t / 2.0);
    if (amp < kTailTol * 0.1) break;
    sum += amp * std::cos(double(k) * kPi * x) * std::cos(double(k) * kPi * y);
  }
  certify_spectral_tail(k, t);
  return sum;
}

double rbm_cdf_images(double x, double y, double t, const HeatKernelParams& params) {
  validate_point(x, y, t, params);
  int K = params.image_terms;
  certify_image_tail(K, t);
  double rt = std::sqrt(t);
  double sum = 0.0;
  for (int k = -K; k <= K; ++k) {
    double shift = 2.0 * double(k);
    sum += gauss_cdf((y - x + shift) / rt) - gauss_cdf((-x + shift) / rt);
    sum += gauss_cdf((y + x + shift) / rt) - gauss_cdf((x + shift) / rt);
  }
  return clamp01(sum);
}

double rbm_cdf_spectral(double x, double y, double t, const HeatKernelParams& params) {
  validate_point(x, y, t, params);
  double sum = y;
  int k = 1;
  for (; k <= params.spectral_max_terms; ++k) {
    double amp = 2.0 * std::exp(-double(k) * double(k) * kPi * kPi * t / 2.0);
    if (amp < kTailTol * 0.1) break;
    sum += amp * std::cos(double(k) * kPi * x) * std::sin(double(k) * kPi * y) / (double(k) * kPi);
  }
  certify_spectral_tail(k, t);
  return clamp01(sum);
}

double rbm_transition_density(double x, double y, double t, const HeatKernelParams& params) {
  return t < params.time_switch ? rbm_density_images(x, y, t, params)
                                : rbm_density_spectral(x, y, t, params);
}

double rbm_transition_cdf(double x, double y, double t, const HeatKernelParams& params) {
  return t < params.time_switch ? rbm_cdf_images(x, y, t, params)
                                : rbm_cdf_spectral(x, y, t, params);
}

double rbm_stationary_cdf(double x) {
  require(x >= 0.0 && x <= 1.0, "stationary cdf: x must lie in [0,1]");
  return x;
}

double rbm_pushforward_cdf(double a, double b, double y, double t,
                           const HeatKernelParams& params) {
  require(a >= 0.0 && a < b && b <= 1.0, "pushforward cdf: need 0 <= a < b <= 1");
  std::vector<double> nodes, weights;
  detail::gauss_legendre(64, nodes, weights);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    sum += weights[i] * rbm_transition_cdf(mid + half * nodes[i], y, t, params);
  return clamp01(0.5 * sum);
}

InitialLaw InitialLaw::uniform(double a, double b) {
  require(a >= 0.0 && a < b && b <= 1.0, "initial law: need 0 <= a < b <= 1");
  InitialLaw law;
  law.kind = Kind::kUniform;
  law.a = a;
  law.b = b;
  return law;
}

InitialLaw InitialLaw::dirac(double x) {
  require(x >= 0.0 && x <= 1.0, "initial law: atom must lie in [0,1]");
  InitialLaw law;
  law.kind = Kind::kDirac;
  law.x = x;
  return law;
}

InitialLaw InitialLaw::equal_atoms(std::vector<double> positions) {
  require(!positions.empty(), "initial law: need at least one atom");
  for (double p : positions)
    require(p >= 0.0 && p <= 1.0, "initial law: atoms must lie in [0,1]");
  InitialLaw law;
  law.kind = Kind::kAtoms;
  law.atoms = std::move(positions);
  return law;
}

double InitialLaw::sample(KeyedStream& stream) const {
  switch (kind) {
    case Kind::kUniform:
      return a + (b - a) * stream.uniform01();
    case Kind::kDirac:
      return x;
    case Kind::kAtoms:
      return atoms[stream.uniform_below(std::uint32_t(atoms.size()))];
  }
  throw InvalidArgument("initial law: unknown kind");
}

std::vector<double> sample_reflected_path(const InitialLaw& law, const std::vector<double>& grid,
                                          KeyedStream& stream) {
  double prev = 0.0;
  for (double g : grid) {
    require(std::isfinite(g) && g > prev, "reflected path: grid must be strictly increasing and positive");
    prev = g;
  }
  std::vector<double> out;
  out.reserve(grid.size() + 1);
  double z = law.sample(stream);
  out.push_back(fold_real(z));
  prev = 0.0;
  for (double g : grid) {
    z += stream.normal() * std::sqrt(g - prev);
    out.push_back(fold_real(z));
    prev = g;
  }
  return out;
}

namespace detail {

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  require(order >= 1, "gauss-legendre: order must be positive");
  static std::mutex mutex;
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(order);
    if (it != cache.end()) {
      nodes = it->second.first;
      weights = it->second.second;
      return;
    }
  }
  int n = order;
  std::vector<double> xs(n), ws(n);
  int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (double(i) + 0.75) / (double(n) + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / double(j);
      }
      pp = double(n) * (z * p1 - p2) / (z * z - 1.0);
      double step = p1 / pp;
      z -= step;
      if (std::abs(step) < 1e-15) break;
    }
    xs[i] = -z;
    xs[n - 1 - i] = z;
    double w = 2.0 / ((1.0 - z * z) * pp * pp);
    ws[i] = w;
    ws[n - 1 - i] = w;
  }
  {
    std::lock_guard<std::mutex> lock(mutex);
    cache.emplace(order, std::make_pair(xs, ws));
  }
  nodes = std::move(xs);
  weights = std::move(ws);
}

}  // namespace detail

}  // namespace interlab
