#ifndef TABAYES_DISTRIBUTIONS_HPP
#define TABAYES_DISTRIBUTIONS_HPP

#include <span>
#include <utility>
#include <vector>

#include "tabayes/rng.hpp"

namespace tabayes {

// Elementary samplers. Gamma is parameterized by shape and rate throughout.

double sample_normal(double mu, double sigma2, RngHandle& rng);
double sample_gamma(double shape, double rate, RngHandle& rng);

/// log of a Gamma(shape, 1) draw. Stays finite for shapes small enough
/// that the draw itself would underflow to zero.
double sample_log_gamma(double shape, RngHandle& rng);

int sample_bernoulli(double p, RngHandle& rng);

/// Beta(1, b) by inversion.
double sample_beta_one(double b, RngHandle& rng);

/// Dirichlet(alpha) on the closed simplex. Weights sum to one within 1e-12.
std::vector<double> sample_dirichlet(std::span<const double> alpha, RngHandle& rng);

double normal_log_density(double x, double mu, double sigma2);
double normal_cdf(double x);

/// Normal-inverse-gamma prior: 1/sigma2 ~ Gamma(alpha, beta) (rate beta),
/// mu | sigma2 ~ Normal(mu0, sigma2 / kappa).
struct NigParams {
  double alpha = 1.0;
  double beta = 1.0;
  double mu0 = 0.0;
  double kappa = 1.0;

  void validate() const;
};

/// Joint log density of (mu, sigma2). Returns -infinity for sigma2 <= 0 so
/// that samplers can propose such points and reject them.
double nig_log_density(double mu, double sigma2, const NigParams& params);

/// (mu, sigma2) draw from the prior.
std::pair<double, double> sample_nig(const NigParams& params, RngHandle& rng);

/// Nearest multiple of h, ties to even.
double discretize(double x, double h);

/// Normal(mu, sigma2) discretized onto the lattice {i * bin_width}: the mass
/// of each lattice point is the base mass of its bin.
struct DiscretizedBase {
  double mu = 0.0;
  double sigma2 = 1.0;
  double bin_width = 1e-5;

  void validate() const;
  double sample(RngHandle& rng) const;
};

}  // namespace tabayes

#endif  // TABAYES_DISTRIBUTIONS_HPP
