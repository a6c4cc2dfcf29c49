#include "tabayes/ta_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tabayes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kInitialRedraws = 100;

std::vector<double> flatten_weighted(const TaModelSpec& spec, std::span<const Theta> thetas) {
  const std::size_t d = spec.weighted_dim();
  std::vector<double> flat;
  flat.reserve(thetas.size() * d);
  for (const Theta& t : thetas) {
    const auto w = spec.weighted(t);
    flat.insert(flat.end(), w.begin(), w.begin() + static_cast<std::ptrdiff_t>(d));
  }
  return flat;
}

bool admissible_for_kde(const std::array<double, 2>& w, std::size_t d, const KdeOptions& options) {
  for (std::size_t j = 0; j < d; ++j) {
    if (!std::isfinite(w[j])) return false;
    if (j < options.log_scale.size() && options.log_scale[j] && !(w[j] > 0.0)) return false;
  }
  return true;
}

}  // namespace

SubjectivePrior SubjectivePrior::normal(double mean, double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("SubjectivePrior::normal: variance must be > 0");
  return {1, [mean, variance](std::span<const double> t) { return normal_log_density(t[0], mean, variance); }};
}

SubjectivePrior SubjectivePrior::nig(const NigParams& params) {
  params.validate();
  return {2, [params](std::span<const double> t) { return nig_log_density(t[0], t[1], params); }};
}

void TaModelSpec::validate() const {
  proposal.validate();
  if (functional.input_dim() != proposal.dim())
    throw std::invalid_argument("TaModelSpec: functional does not read the proposal's atoms");
  if (weighting == WeightingMode::SingleMargin && margin >= functional.output_dim())
    throw std::invalid_argument("TaModelSpec: margin index out of range");
  if (prior.dim != weighted_dim()) throw std::invalid_argument("TaModelSpec: prior dimension does not match weighting");
  if (!prior.log_density) throw std::invalid_argument("TaModelSpec: prior density is not set");
  if (prior_draws_for_q < DensityModel::kMinSamples)
    throw std::invalid_argument("TaModelSpec: prior_draws_for_q is below the KDE minimum");
}

std::size_t TaModelSpec::weighted_dim() const {
  return weighting == WeightingMode::FullVector ? functional.output_dim() : 1;
}

std::array<double, 2> TaModelSpec::weighted(const Theta& theta) const {
  if (weighting == WeightingMode::FullVector) return theta.values;
  return {theta[margin], 0.0};
}

KdeOptions TaModelSpec::resolved_q_options() const {
  KdeOptions o = q_options;
  if (o.log_scale.empty()) {
    const std::size_t d = weighted_dim();
    o.log_scale.assign(d, false);
    const bool variance_kind = functional.type == FunctionalType::Variance;
    const bool meanvar_kind = functional.type == FunctionalType::MeanVar;
    if (weighting == WeightingMode::FullVector) {
      if (variance_kind) o.log_scale[0] = true;
      if (meanvar_kind) o.log_scale[1] = true;
    } else if ((meanvar_kind && margin == 1) || variance_kind) {
      o.log_scale[0] = true;
    }
  }
  return o;
}

ThetaDraws draw_prior_thetas(const TaModelSpec& spec, std::size_t count, RngHandle& rng) {
  ThetaDraws out;
  out.draws.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const DiscreteMeasure f = sample_dp_prior(spec.proposal, rng);
    try {
      out.draws.push_back(evaluate(spec.functional, f));
    } catch (const FunctionalError&) {
      ++out.discarded;
    }
  }
  return out;
}

ThetaDraws draw_posterior_thetas(const TaModelSpec& spec, const Dataset& data, std::size_t count, RngHandle& rng) {
  ThetaDraws out;
  out.draws.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const DiscreteMeasure f = sample_dp_posterior(spec.proposal, data, rng);
    try {
      out.draws.push_back(evaluate(spec.functional, f));
    } catch (const FunctionalError&) {
      ++out.discarded;
    }
  }
  return out;
}

PriorQ estimate_prior_q(const TaModelSpec& spec, RngHandle& rng) {
  spec.validate();
  const KdeOptions options = spec.resolved_q_options();
  ThetaDraws draws = draw_prior_thetas(spec, spec.prior_draws_for_q, rng);
  std::vector<Theta> kept;
  kept.reserve(draws.draws.size());
  for (const Theta& t : draws.draws) {
    if (admissible_for_kde(spec.weighted(t), spec.weighted_dim(), options)) kept.push_back(t);
    else ++draws.discarded;
  }
  if (2 * draws.discarded > spec.prior_draws_for_q)
    throw std::runtime_error("estimate_prior_q: more than half of the prior draws are unusable");
  const std::vector<double> flat = flatten_weighted(spec, kept);
  return {DensityModel::fit(spec.weighted_dim(), flat, options), kept.size(), draws.discarded};
}

DensityModel estimate_posterior_q(const TaModelSpec& spec, const Dataset& data, std::size_t draws, RngHandle& rng) {
  spec.validate();
  KdeOptions options = spec.resolved_q_options();
  options.table_points = 0;
  ThetaDraws d = draw_posterior_thetas(spec, data, draws, rng);
  std::vector<Theta> kept;
  for (const Theta& t : d.draws)
    if (admissible_for_kde(spec.weighted(t), spec.weighted_dim(), options)) kept.push_back(t);
  return DensityModel::fit(spec.weighted_dim(), flatten_weighted(spec, kept), options);
}

double log_weight(const TaModelSpec& spec, const DensityModel& q_prior, const Theta& theta) {
  const auto w = spec.weighted(theta);
  const std::span<const double> point(w.data(), spec.weighted_dim());
  for (double v : point)
    if (!std::isfinite(v)) return kNegInf;
  const double lp = spec.prior.log_density(point);
  if (!std::isfinite(lp)) return kNegInf;
  const double lq = q_prior.log_density(point);
  if (!std::isfinite(lq)) return kNegInf;
  return lp - lq;
}

std::vector<double> prior_reweighting(const TaModelSpec& spec, const DensityModel& q_prior,
                                      std::span<const Theta> draws) {
  std::vector<double> w(draws.size());
  double max_lw = kNegInf;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    w[i] = log_weight(spec, q_prior, draws[i]);
    max_lw = std::max(max_lw, w[i]);
  }
  if (!std::isfinite(max_lw)) throw std::runtime_error("prior_reweighting: every weight is zero");
  double total = 0.0;
  for (double& v : w) {
    v = std::exp(v - max_lw);
    total += v;
  }
  for (double& v : w) v /= total;
  return w;
}

PosteriorSamples ta_posterior_mh(const TaModelSpec& spec, const Dataset& data, const DensityModel& q_prior,
                                 const ChainSettings& chain, RngHandle& rng) {
  spec.validate();
  chain.validate();
  if (data.empty()) throw std::invalid_argument("ta_posterior_mh: data must be nonempty");
  if (q_prior.dim() != spec.weighted_dim()) throw std::invalid_argument("ta_posterior_mh: q_prior dimension mismatch");

  PosteriorSamples out("tab", spec.functional.output_dim(), rng.seed());
  out.chain = chain;
  out.reserve(chain.kept());
  ChainDiagnostics& diag = out.diagnostics();

  Theta current;
  double current_lw = kNegInf;
  bool initialized = false;
  for (int attempt = 0; attempt < kInitialRedraws && !initialized; ++attempt) {
    try {
      current = evaluate(spec.functional, sample_dp_posterior(spec.proposal, data, rng));
      current_lw = log_weight(spec, q_prior, current);
      initialized = true;
    } catch (const FunctionalError&) {
      ++diag.functional_failures;
    }
  }
  if (!initialized) throw std::runtime_error("ta_posterior_mh: no usable initial state after 100 draws");

  for (std::size_t step = 0; step < chain.length; ++step) {
    bool accept = false;
    ++diag.proposals;
    try {
      const Theta proposal = evaluate(spec.functional, sample_dp_posterior(spec.proposal, data, rng));
      const double lw = log_weight(spec, q_prior, proposal);
      diag.max_log_weight = std::max(diag.max_log_weight, lw);
      if (lw == kNegInf) accept = false;
      else if (current_lw == kNegInf) accept = true;
      else accept = std::log(rng.uniform()) < lw - current_lw;
      if (accept) {
        current = proposal;
        current_lw = lw;
      }
    } catch (const FunctionalError&) {
      ++diag.functional_failures;
    }
    if (accept) ++diag.accepted;
    if (step >= chain.burn_in) out.push(current.view(), accept);
  }
  diag.failed = diag.accepted == 0;
  return out;
}

std::vector<double> ta_grid_masses(const TaModelSpec& spec, const DensityModel& q_prior, const DensityModel& q_post,
                                   const Grid1d& grid) {
  spec.validate();
  if (spec.weighted_dim() != 1 || spec.functional.output_dim() != 1)
    throw std::invalid_argument("ta_grid_masses: functional must be one-dimensional");
  if (!(grid.hi > grid.lo) || grid.points < 3) throw std::invalid_argument("ta_grid_masses: invalid grid");
  if (q_prior.dim() != 1 || q_post.dim() != 1) throw std::invalid_argument("ta_grid_masses: densities must be 1-d");

  const double step = (grid.hi - grid.lo) / static_cast<double>(grid.points - 1);
  std::vector<double> log_mass(grid.points);
  double max_v = kNegInf;
  for (std::size_t g = 0; g < grid.points; ++g) {
    const double t = grid.lo + static_cast<double>(g) * step;
    const std::span<const double> point(&t, 1);
    const double lp = spec.prior.log_density(point);
    const double lq = q_prior.log_density(point);
    const double lpost = q_post.log_density(point);
    log_mass[g] = (std::isfinite(lp) && std::isfinite(lq) && std::isfinite(lpost)) ? lp + lpost - lq : kNegInf;
    max_v = std::max(max_v, log_mass[g]);
  }
  if (!std::isfinite(max_v)) throw std::runtime_error("ta_grid_masses: posterior has no mass on the grid");
  double total = 0.0;
  for (double& v : log_mass) {
    v = std::exp(v - max_v);
    total += v;
  }
  if (!(total > 0.0)) throw std::runtime_error("ta_grid_masses: zero normalizing constant");
  for (double& v : log_mass) v /= total;
  return log_mass;
}

PosteriorSamples ta_posterior_grid_1d(const TaModelSpec& spec, const DensityModel& q_prior,
                                      const DensityModel& q_post, const Grid1d& grid, std::size_t n_samples,
                                      RngHandle& rng) {
  const std::vector<double> masses = ta_grid_masses(spec, q_prior, q_post, grid);
  const std::size_t edge = std::max<std::size_t>(1, grid.points / 20);
  double boundary = 0.0;
  for (std::size_t g = 0; g < edge; ++g) boundary += masses[g] + masses[grid.points - 1 - g];
  if (boundary > 0.01) throw std::runtime_error("ta_posterior_grid_1d: grid too narrow (boundary mass > 1%)");

  std::vector<double> cdf(masses.size());
  double acc = 0.0;
  for (std::size_t g = 0; g < masses.size(); ++g) cdf[g] = (acc += masses[g]);

  const double step = (grid.hi - grid.lo) / static_cast<double>(grid.points - 1);
  PosteriorSamples out("tab-grid", 1, rng.seed());
  out.chain = ChainSettings{n_samples, 0, rng.seed()};
  out.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double u = rng.uniform() * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto g = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size() - 1)));
    const double t = grid.lo + (static_cast<double>(g) + rng.uniform() - 0.5) * step;
    out.push(std::span<const double>(&t, 1), true);
  }
  out.diagnostics().proposals = n_samples;
  out.diagnostics().accepted = n_samples;
  return out;
}

NormalApprox normal_approx(const Eigen::VectorXd& t_qn, const Eigen::MatrixXd& sigma_n_inv, const Eigen::VectorXd& t0,
                           const Eigen::MatrixXd& h0) {
  const auto d = t_qn.size();
  if (t0.size() != d || sigma_n_inv.rows() != d || sigma_n_inv.cols() != d || h0.rows() != d || h0.cols() != d)
    throw std::invalid_argument("normal_approx: dimension mismatch");
  auto asymmetric = [](const Eigen::MatrixXd& m) {
    return (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff());
  };
  if (asymmetric(sigma_n_inv) || asymmetric(h0)) throw std::invalid_argument("normal_approx: matrices must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> sigma_llt(sigma_n_inv);
  if (sigma_llt.info() != Eigen::Success) throw std::invalid_argument("normal_approx: Sigma_n^-1 must be SPD");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> h0_eig(h0);
  if (h0_eig.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, h0.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("normal_approx: H0 must be positive semidefinite");

  NormalApprox out;
  out.precision = h0 + sigma_n_inv;
  Eigen::LLT<Eigen::MatrixXd> hn_llt(out.precision);
  if (hn_llt.info() != Eigen::Success) throw std::invalid_argument("normal_approx: H_n is not SPD");
  out.mean = hn_llt.solve(h0 * t0 + sigma_n_inv * t_qn);
  return out;
}

}  // namespace tabayes
