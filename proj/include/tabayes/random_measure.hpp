#ifndef TABAYES_RANDOM_MEASURE_HPP
#define TABAYES_RANDOM_MEASURE_HPP

#include <cstddef>
#include <variant>
#include <vector>

#include "tabayes/discrete_measure.hpp"
#include "tabayes/distributions.hpp"
#include "tabayes/rng.hpp"

namespace tabayes {

/// Product base on (x, c, c*y) for missing-at-random data: x from a
/// discretized normal, c ~ Bernoulli(p_observed), c*y from a discretized
/// normal when c = 1 and exactly 0 when c = 0.
struct MarProductBase {
  DiscretizedBase x{10.0, 1.0, 1e-4};
  double p_observed = 0.2;
  DiscretizedBase cy{0.0, 2500.0, 1e-4};

  void validate() const;
};

using BaseMeasure = std::variant<DiscretizedBase, MarProductBase>;

std::size_t base_dim(const BaseMeasure& base);

/// Writes one base draw into out (size base_dim(base)).
void sample_base(const BaseMeasure& base, RngHandle& rng, double* out);

/// Dirichlet process DP(concentration, base), truncated once the stick mass
/// broken off reaches 1 - truncation.
struct DpSpec {
  double concentration = 0.5;
  BaseMeasure base = DiscretizedBase{};
  double truncation = 1e-8;

  void validate() const;
  std::size_t dim() const { return base_dim(base); }
};

/// Raw stick-breaking weights with Beta(1, concentration) sticks, stopping
/// when the cumulative mass is >= 1 - truncation. Not renormalized.
std::vector<double> stick_breaking_weights(double concentration, double truncation, RngHandle& rng);

DiscreteMeasure sample_dp_prior(const DpSpec& spec, RngHandle& rng);

/// How a posterior DP draw is generated.
///
/// StickBreaking breaks sticks with concentration phi + n and draws each atom
/// from the base with probability phi / (phi + n), otherwise uniformly from
/// the data. DirichletSplit uses the equivalent decomposition
/// F = sum_i W_i delta(x_i) + W_0 F_0 with (W_1..W_n, W_0) ~ Dirichlet(1..1, phi)
/// and F_0 ~ DP(phi, base); its cost is O(n) instead of O(n log(1/eps)).
enum class PosteriorScheme { DirichletSplit, StickBreaking };

/// Draw from DP(phi + n, (phi G0 + n F_n) / (phi + n)). Empty data draws from the prior.
DiscreteMeasure sample_dp_posterior(const DpSpec& spec, const Dataset& data, RngHandle& rng,
                                    PosteriorScheme scheme = PosteriorScheme::DirichletSplit);

/// Dirichlet(1, ..., 1) weights on the observed points.
DiscreteMeasure bayesian_bootstrap_draw(const Dataset& data, RngHandle& rng);

}  // namespace tabayes

#endif  // TABAYES_RANDOM_MEASURE_HPP
