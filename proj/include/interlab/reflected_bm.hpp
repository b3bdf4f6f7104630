#pragma once

#include <cstddef>
#include <vector>

#include "interlab/error.hpp"
#include "interlab/rng.hpp"

namespace interlab {

// Transition kernel of Brownian motion on [0,1] with variance t at time t,
// reflected at both endpoints.  Below time_switch the density is summed over
// mirror images of the Gaussian kernel; at or above it the cosine
// eigenfunction expansion converges faster and is used instead.  Both
// representations are exposed so they can be checked against each other.
struct HeatKernelParams {
  int image_terms = 64;
  double time_switch = 0.25;
  int spectral_max_terms = 64;
};

double rbm_density_images(double x, double y, double t, const HeatKernelParams& params = {});
double rbm_density_spectral(double x, double y, double t, const HeatKernelParams& params = {});
double rbm_cdf_images(double x, double y, double t, const HeatKernelParams& params = {});
double rbm_cdf_spectral(double x, double y, double t, const HeatKernelParams& params = {});

double rbm_transition_density(double x, double y, double t, const HeatKernelParams& params = {});
double rbm_transition_cdf(double x, double y, double t, const HeatKernelParams& params = {});

// Stationary law is uniform on [0,1].
double rbm_stationary_cdf(double x);

// P(X_t <= y) when X_0 ~ Uniform[a,b], computed by Gauss-Legendre quadrature
// of the transition cdf over the initial interval.
double rbm_pushforward_cdf(double a, double b, double y, double t,
                           const HeatKernelParams& params = {});

struct InitialLaw {
  enum class Kind { kUniform, kDirac, kAtoms };
  Kind kind = Kind::kUniform;
  double a = 0.0, b = 1.0;      // kUniform
  double x = 0.0;               // kDirac
  std::vector<double> atoms;    // kAtoms, equal weights

  static InitialLaw uniform(double a, double b);
  static InitialLaw dirac(double x);
  static InitialLaw equal_atoms(std::vector<double> positions);

  double sample(KeyedStream& stream) const;
};

// Exact simulation at the given strictly increasing times: a standard
// Brownian path from X_0 via Gaussian increments, folded into [0,1] at each
// grid point.  Output holds the folded value at time 0 followed by one value
// per grid time.
std::vector<double> sample_reflected_path(const InitialLaw& law, const std::vector<double>& grid,
                                          KeyedStream& stream);

namespace detail {
// Nodes and weights on [-1,1]; cached per order.
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);
}  // namespace detail

}  // namespace interlab
