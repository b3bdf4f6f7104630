#include <doctest.h>

#include <cmath>
#include <vector>

#include "interlab/error.hpp"
#include "interlab/reflected_bm.hpp"

using namespace interlab;

namespace {

double integrate01(const std::vector<double>& nodes, const std::vector<double>& weights,
                   double (*f)(double, double, double, const HeatKernelParams&), double x,
                   double t) {
  HeatKernelParams params;
  double acc = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    double y = 0.5 * (nodes[k] + 1.0);
    acc += 0.5 * weights[k] * f(x, y, t, params);
  }
  return acc;
}

}  // namespace

TEST_CASE("gauss-legendre rules integrate polynomials exactly") {
  std::vector<double> nodes, weights;
  detail::gauss_legendre(8, nodes, weights);
  REQUIRE(nodes.size() == 8);
  REQUIRE(weights.size() == 8);
  double total = 0.0, second = 0.0, tenth = 0.0;
  for (std::size_t k = 0; k < 8; ++k) {
    total += weights[k];
    second += weights[k] * nodes[k] * nodes[k];
    tenth += weights[k] * std::pow(nodes[k], 10);
  }
  CHECK(total == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(second == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(tenth == doctest::Approx(2.0 / 11.0).epsilon(1e-13));  // degree 10 < 2*8-1
  for (double w : weights) CHECK(w > 0.0);
  for (std::size_t k = 1; k < 8; ++k) CHECK(nodes[k] > nodes[k - 1]);
}

TEST_CASE("heat kernel representations agree near the switchover") {
  HeatKernelParams params;
  for (double x : {0.0, 0.17, 0.5, 0.83, 1.0}) {
    for (double y : {0.0, 0.25, 0.5, 0.9, 1.0}) {
      for (double t : {0.2, 0.25, 0.3}) {
        double di = rbm_density_images(x, y, t, params);
        double ds = rbm_density_spectral(x, y, t, params);
        CHECK(di == doctest::Approx(ds).epsilon(1e-9));
        double ci = rbm_cdf_images(x, y, t, params);
        double cs = rbm_cdf_spectral(x, y, t, params);
        CHECK(ci == doctest::Approx(cs).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("transition density normalizes and is symmetric") {
  std::vector<double> nodes, weights;
  detail::gauss_legendre(64, nodes, weights);
  for (double t : {0.01, 0.1, 0.25, 1.0}) {
    for (double x : {0.0, 0.3, 0.5, 1.0}) {
      double mass = integrate01(nodes, weights, rbm_transition_density, x, t);
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
  for (double t : {0.05, 0.5}) {
    for (double x : {0.1, 0.4, 0.9}) {
      for (double y : {0.2, 0.6, 0.8}) {
        CHECK(rbm_transition_density(x, y, t) ==
              doctest::Approx(rbm_transition_density(y, x, t)).epsilon(1e-11));
      }
    }
  }
  // Short-time kernel at an interior point matches the free Gaussian.
  double free_gauss = 1.0 / std::sqrt(2.0 * 3.14159265358979323846 * 0.01);
  CHECK(rbm_transition_density(0.5, 0.5, 0.01) == doctest::Approx(free_gauss).epsilon(1e-3));
}

TEST_CASE("transition cdf is a proper distribution function") {
  for (double t : {0.02, 0.25, 2.0}) {
    for (double x : {0.0, 0.37, 1.0}) {
      CHECK(rbm_transition_cdf(x, 0.0, t) == doctest::Approx(0.0).epsilon(1e-10));
      CHECK(rbm_transition_cdf(x, 1.0, t) == doctest::Approx(1.0).epsilon(1e-10));
      double prev = -1.0;
      for (double y = 0.0; y <= 1.0; y += 0.05) {
        double c = rbm_transition_cdf(x, y, t);
        CHECK(c >= prev - 1e-12);
        CHECK(c >= -1e-12);
        CHECK(c <= 1.0 + 1e-12);
        prev = c;
      }
    }
  }
  // Long-time limit is the uniform law.
  for (double y : {0.2, 0.5, 0.9})
    CHECK(rbm_transition_cdf(0.3, y, 50.0) == doctest::Approx(y).epsilon(1e-9));
}

TEST_CASE("uniform start is stationary") {
  HeatKernelParams params;
  for (double t : {0.03, 0.2, 1.0}) {
    for (double y : {0.1, 0.45, 0.8, 1.0}) {
      CHECK(rbm_pushforward_cdf(0.0, 1.0, y, t, params) == doctest::Approx(y).epsilon(1e-7));
    }
  }
  CHECK(rbm_stationary_cdf(0.0) == 0.0);
  CHECK(rbm_stationary_cdf(0.25) == 0.25);
  CHECK(rbm_stationary_cdf(1.0) == 1.0);
  CHECK_THROWS_AS(rbm_stationary_cdf(-0.5), InvalidArgument);
  CHECK_THROWS_AS(rbm_stationary_cdf(2.0), InvalidArgument);
}

TEST_CASE("pushforward cdf averages the transition cdf over the start interval") {
  std::vector<double> nodes, weights;
  detail::gauss_legendre(64, nodes, weights);
  for (double t : {0.05, 0.4}) {
    for (double y : {0.3, 0.7}) {
      double manual = 0.0;
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        double x = 0.2 + 0.6 * 0.5 * (nodes[k] + 1.0);
        manual += 0.5 * weights[k] * rbm_transition_cdf(x, y, t);
      }
      CHECK(rbm_pushforward_cdf(0.2, 0.8, y, t) == doctest::Approx(manual).epsilon(1e-9));
    }
  }
  // Monotone in y.
  double lo = rbm_pushforward_cdf(0.0, 0.5, 0.3, 0.05);
  double hi = rbm_pushforward_cdf(0.0, 0.5, 0.7, 0.05);
  CHECK(lo < hi);
  CHECK_THROWS_AS(rbm_pushforward_cdf(0.5, 0.2, 0.5, 0.1), InvalidArgument);
}

TEST_CASE("kernel arguments outside the square or time axis are rejected") {
  CHECK_THROWS_AS(rbm_transition_density(-0.1, 0.5, 0.1), InvalidArgument);
  CHECK_THROWS_AS(rbm_transition_density(0.5, 1.5, 0.1), InvalidArgument);
  CHECK_THROWS_AS(rbm_transition_density(0.5, 0.5, 0.0), InvalidArgument);
  CHECK_THROWS_AS(rbm_transition_cdf(0.5, 0.5, -1.0), InvalidArgument);
}

TEST_CASE("initial laws sample inside their supports") {
  KeyedStream s(StreamKey{51u, 1040u, 0u, 0, StreamFamily::kAuxiliary});
  InitialLaw uni = InitialLaw::uniform(0.25, 0.75);
  for (int i = 0; i < 500; ++i) {
    double v = uni.sample(s);
    CHECK(v >= 0.25);
    CHECK(v <= 0.75);
  }
  InitialLaw point = InitialLaw::dirac(0.6);
  CHECK(point.sample(s) == 0.6);
  InitialLaw atoms = InitialLaw::equal_atoms({0.1, 0.9});
  for (int i = 0; i < 200; ++i) {
    double v = atoms.sample(s);
    CHECK((v == 0.1 || v == 0.9));
  }
  CHECK_THROWS_AS(InitialLaw::uniform(0.8, 0.2), InvalidArgument);
  CHECK_THROWS_AS(InitialLaw::dirac(1.5), InvalidArgument);
  CHECK_THROWS_AS(InitialLaw::equal_atoms({}), InvalidArgument);
}

TEST_CASE("reflected path sampling folds into the interval and replays") {
  std::vector<double> grid{0.1, 0.25, 0.7};
  KeyedStream s(StreamKey{53u, 1041u, 0u, 0, StreamFamily::kAuxiliary});
  std::vector<double> path = sample_reflected_path(InitialLaw::dirac(0.4), grid, s);
  REQUIRE(path.size() == 4);
  CHECK(path[0] == 0.4);
  for (double v : path) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  KeyedStream r(StreamKey{53u, 1041u, 0u, 0, StreamFamily::kAuxiliary});
  CHECK(sample_reflected_path(InitialLaw::dirac(0.4), grid, r) == path);

  KeyedStream q(StreamKey{53u, 1041u, 1u, 0, StreamFamily::kAuxiliary});
  CHECK_THROWS_AS(sample_reflected_path(InitialLaw::dirac(0.4), {0.5, 0.5}, q), InvalidArgument);
  CHECK_THROWS_AS(sample_reflected_path(InitialLaw::dirac(0.4), {-0.1}, q), InvalidArgument);
}
