#ifndef TABAYES_TA_ENGINE_HPP
#define TABAYES_TA_ENGINE_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "tabayes/density.hpp"
#include "tabayes/discrete_measure.hpp"
#include "tabayes/functionals.hpp"
#include "tabayes/posterior_samples.hpp"
#include "tabayes/random_measure.hpp"
#include "tabayes/rng.hpp"

namespace tabayes {

/// Subjective prior density p on the weighted coordinates of theta.
struct SubjectivePrior {
  std::size_t dim = 1;
  std::function<double(std::span<const double>)> log_density;

  static SubjectivePrior normal(double mean, double variance);
  static SubjectivePrior nig(const NigParams& params);
};

enum class WeightingMode {
  /// m(theta) = p(theta) / q(theta) on the full vector.
  FullVector,
  /// m(theta) = p(theta_k) / q(theta_k) on margin k only.
  SingleMargin,
};

/// theta-augmented model: the proposal DP reweighted by m = p / q, where q is
/// the density of theta induced by the proposal prior.
struct TaModelSpec {
  DpSpec proposal{};
  FunctionalKind functional = FunctionalKind::mean();
  SubjectivePrior prior = SubjectivePrior::normal(0.0, 1.0);
  WeightingMode weighting = WeightingMode::FullVector;
  std::size_t margin = 0;
  std::size_t prior_draws_for_q = 50000;
  /// Options for the KDE of q. Empty log_scale selects the default: the
  /// variance coordinate of MeanVar is estimated on the log scale.
  KdeOptions q_options{BandwidthRule::PluginDiagonal, {}, {}, 0};

  void validate() const;
  std::size_t weighted_dim() const;
  /// Coordinates of theta that enter the weighting function.
  std::array<double, 2> weighted(const Theta& theta) const;
  KdeOptions resolved_q_options() const;
};

struct PriorQ {
  DensityModel density;
  std::size_t usable = 0;
  std::size_t discarded = 0;
};

/// theta draws from the proposal prior (functional failures discarded).
struct ThetaDraws {
  std::vector<Theta> draws;
  std::size_t discarded = 0;
};

ThetaDraws draw_prior_thetas(const TaModelSpec& spec, std::size_t count, RngHandle& rng);
ThetaDraws draw_posterior_thetas(const TaModelSpec& spec, const Dataset& data, std::size_t count, RngHandle& rng);

/// KDE of the proposal-induced prior of the weighted coordinates.
/// Throws std::runtime_error when more than half the draws are unusable.
PriorQ estimate_prior_q(const TaModelSpec& spec, RngHandle& rng);

/// KDE of theta under the proposal posterior; needed for grid sampling.
DensityModel estimate_posterior_q(const TaModelSpec& spec, const Dataset& data, std::size_t draws, RngHandle& rng);

/// log m(theta) = log p - log q on the weighted coordinates.
double log_weight(const TaModelSpec& spec, const DensityModel& q_prior, const Theta& theta);

/// Self-normalized p / q weights for draws from the proposal prior.
std::vector<double> prior_reweighting(const TaModelSpec& spec, const DensityModel& q_prior,
                                      std::span<const Theta> draws);

/// Independence Metropolis-Hastings on theta with proposals theta(F'),
/// F' ~ proposal posterior, accepted with min(1, m(theta') / m(theta)).
PosteriorSamples ta_posterior_mh(const TaModelSpec& spec, const Dataset& data, const DensityModel& q_prior,
                                 const ChainSettings& chain, RngHandle& rng);

struct Grid1d {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t points = 2001;
};

/// Grid evaluation of p * q_post / q_prior, sampled by inverse CDF. Throws
/// std::runtime_error when the outer 5% of grid cells on either side
/// together carry more than 1% of the mass.
PosteriorSamples ta_posterior_grid_1d(const TaModelSpec& spec, const DensityModel& q_prior,
                                      const DensityModel& q_post, const Grid1d& grid, std::size_t n_samples,
                                      RngHandle& rng);

/// Normalized grid masses behind ta_posterior_grid_1d.
std::vector<double> ta_grid_masses(const TaModelSpec& spec, const DensityModel& q_prior, const DensityModel& q_post,
                                   const Grid1d& grid);

struct NormalApprox {
  Eigen::VectorXd mean;
  Eigen::MatrixXd precision;
};

/// Combines the quadratic expansions of log q_post (mode t_qn, curvature
/// sigma_n_inv) and log m (mode t0, curvature h0): H_n = H0 + Sigma_n^-1,
/// t_n = H_n^-1 (H0 t0 + Sigma_n^-1 t_qn).
NormalApprox normal_approx(const Eigen::VectorXd& t_qn, const Eigen::MatrixXd& sigma_n_inv, const Eigen::VectorXd& t0,
                           const Eigen::MatrixXd& h0);

}  // namespace tabayes

#endif  // TABAYES_TA_ENGINE_HPP
