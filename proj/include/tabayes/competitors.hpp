#ifndef TABAYES_COMPETITORS_HPP
#define TABAYES_COMPETITORS_HPP

#include <Eigen/Dense>
#include <cstddef>

#include "tabayes/discrete_measure.hpp"
#include "tabayes/distributions.hpp"
#include "tabayes/functionals.hpp"
#include "tabayes/posterior_samples.hpp"
#include "tabayes/rng.hpp"

namespace tabayes {

/// Functional values under Bayesian bootstrap reweightings of the data. A
/// draw whose functional fails is redrawn, at most max_retries times in a
/// row; the failures are counted in the diagnostics.
PosteriorSamples bb_posterior(const Dataset& data, const FunctionalKind& functional, std::size_t n_draws,
                              RngHandle& rng, std::size_t max_retries = 100);

struct BelSettings {
  /// Multiplier on the conjugate posterior's shape and rate.
  double proposal_scale = 0.25;
  double min_acceptance = 0.01;
  int max_widenings = 3;
  /// Drops the subjective prior from the target (flat p).
  bool flat_prior = false;
};

/// Conjugate NIG posterior under a normal likelihood, with shape and rate
/// multiplied by scale.
NigParams bel_proposal(const Dataset& data, const NigParams& prior, double scale);

/// Independence MH targeting R_n(mu, sigma2) p(mu, sigma2). When the kept
/// acceptance rate is below min_acceptance, or no in-hull starting point turns
/// up in 1000 proposals, the proposal's shape, rate and kappa are halved and
/// the chain restarts.
PosteriorSamples bel_posterior(const Dataset& data, const NigParams& prior, const ChainSettings& chain,
                               RngHandle& rng, const BelSettings& settings = {});

/// Tuning for the general Bayes posterior on (mu, mu2').
struct GbSpec {
  /// Half the inverse sample covariance of (x, x^2).
  Eigen::Matrix2d tuning;
  Eigen::Vector2d proposal_mean;
  Eigen::Matrix2d proposal_cov;
  NigParams prior;

  static GbSpec from_data(const Dataset& data, const NigParams& prior);
  void validate() const;
};

/// sum_i l_i^T C l_i with l_i = (x_i - m1, x_i^2 - m2).
double gb_loss(const Dataset& data, const Eigen::Matrix2d& tuning, double m1, double m2);

/// Prior on (mu, mu2') by the unit-Jacobian change of variables from the NIG.
double gb_log_prior(double m1, double m2, const NigParams& prior);

/// Independence MH on (mu, mu2') with a Gaussian proposal truncated to
/// mu2' > mu^2; draws are reported as (mu, sigma2).
PosteriorSamples gb_posterior(const Dataset& data, const NigParams& prior, const ChainSettings& chain,
                              RngHandle& rng);

}  // namespace tabayes

#endif  // TABAYES_COMPETITORS_HPP
