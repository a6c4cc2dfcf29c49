#include "tabayes/random_measure.hpp"

#include <cmath>
#include <stdexcept>

namespace tabayes {

void MarProductBase::validate() const {
  x.validate();
  cy.validate();
  if (!(p_observed >= 0.0 && p_observed <= 1.0))
    throw std::invalid_argument("MarProductBase: p_observed must lie in [0, 1]");
}

std::size_t base_dim(const BaseMeasure& base) {
  return std::holds_alternative<DiscretizedBase>(base) ? 1 : 3;
}

void sample_base(const BaseMeasure& base, RngHandle& rng, double* out) {
  if (const auto* b = std::get_if<DiscretizedBase>(&base)) {
    out[0] = b->sample(rng);
    return;
  }
  const auto& m = std::get<MarProductBase>(base);
  out[0] = m.x.sample(rng);
  const int c = sample_bernoulli(m.p_observed, rng);
  out[1] = static_cast<double>(c);
  out[2] = c == 1 ? m.cy.sample(rng) : 0.0;
}

void DpSpec::validate() const {
  if (!(concentration > 0.0) || !std::isfinite(concentration))
    throw std::invalid_argument("DpSpec: concentration must be > 0");
  if (!(truncation > 0.0 && truncation <= 0.01)) throw std::invalid_argument("DpSpec: truncation must lie in (0, 0.01]");
  std::visit([](const auto& b) { b.validate(); }, base);
}

std::vector<double> stick_breaking_weights(double concentration, double truncation, RngHandle& rng) {
  std::vector<double> weights;
  double remaining = 1.0;
  while (remaining > truncation) {
    const double v = sample_beta_one(concentration, rng);
    weights.push_back(remaining * v);
    remaining *= 1.0 - v;
  }
  return weights;
}

namespace {

// Appends a truncated DP(spec.concentration, base) draw scaled by `scale`.
void append_prior_atoms(const DpSpec& spec, double scale, RngHandle& rng, std::vector<double>& atoms,
                        std::vector<double>& weights) {
  const std::size_t dim = spec.dim();
  std::vector<double> sticks = stick_breaking_weights(spec.concentration, spec.truncation, rng);
  double total = 0.0;
  for (double w : sticks) total += w;
  const std::size_t offset = atoms.size();
  atoms.resize(offset + sticks.size() * dim);
  for (std::size_t k = 0; k < sticks.size(); ++k) {
    sample_base(spec.base, rng, atoms.data() + offset + k * dim);
    weights.push_back(scale * sticks[k] / total);
  }
}

DiscreteMeasure posterior_split(const DpSpec& spec, const Dataset& data, RngHandle& rng) {
  const std::size_t n = data.size();
  std::vector<double> alpha(n + 1, 1.0);
  alpha[n] = spec.concentration;
  std::vector<double> mix = sample_dirichlet(alpha, rng);

  std::vector<double> atoms(data.values().begin(), data.values().end());
  std::vector<double> weights(mix.begin(), mix.begin() + static_cast<std::ptrdiff_t>(n));
  append_prior_atoms(spec, mix[n], rng, atoms, weights);
  return DiscreteMeasure::normalized(spec.dim(), std::move(atoms), std::move(weights));
}

DiscreteMeasure posterior_sticks(const DpSpec& spec, const Dataset& data, RngHandle& rng) {
  const std::size_t dim = spec.dim();
  const double n = static_cast<double>(data.size());
  const double total_mass = spec.concentration + n;
  const double p_base = spec.concentration / total_mass;
  std::vector<double> weights = stick_breaking_weights(total_mass, spec.truncation, rng);
  std::vector<double> atoms(weights.size() * dim);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    double* out = atoms.data() + k * dim;
    if (rng.uniform() < p_base) {
      sample_base(spec.base, rng, out);
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
      const auto row = data.row(pick(rng.engine()));
      for (std::size_t j = 0; j < dim; ++j) out[j] = row[j];
    }
  }
  return DiscreteMeasure::normalized(dim, std::move(atoms), std::move(weights));
}

}  // namespace

DiscreteMeasure sample_dp_prior(const DpSpec& spec, RngHandle& rng) {
  spec.validate();
  std::vector<double> atoms;
  std::vector<double> weights;
  append_prior_atoms(spec, 1.0, rng, atoms, weights);
  return DiscreteMeasure::normalized(spec.dim(), std::move(atoms), std::move(weights));
}

DiscreteMeasure sample_dp_posterior(const DpSpec& spec, const Dataset& data, RngHandle& rng, PosteriorScheme scheme) {
  spec.validate();
  if (data.empty()) return sample_dp_prior(spec, rng);
  if (data.dim() != spec.dim()) throw std::invalid_argument("sample_dp_posterior: data dimension does not match base");
  return scheme == PosteriorScheme::DirichletSplit ? posterior_split(spec, data, rng) : posterior_sticks(spec, data, rng);
}

DiscreteMeasure bayesian_bootstrap_draw(const Dataset& data, RngHandle& rng) {
  if (data.empty()) throw std::invalid_argument("bayesian_bootstrap_draw: empty data");
  std::vector<double> alpha(data.size(), 1.0);
  return DiscreteMeasure(data.dim(), std::vector<double>(data.values().begin(), data.values().end()),
                         sample_dirichlet(alpha, rng));
}

}  // namespace tabayes
