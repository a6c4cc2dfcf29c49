#include "tabayes/competitors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "tabayes/empirical_likelihood.hpp"
#include "tabayes/random_measure.hpp"

namespace tabayes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_scalar_data(const Dataset& data, const char* who) {
  if (data.dim() != 1) throw std::invalid_argument(std::string(who) + ": data must be one-dimensional");
  if (data.size() < 3) throw std::invalid_argument(std::string(who) + ": at least three observations are required");
}

bool accept_move(double log_ratio, RngHandle& rng) {
  if (log_ratio >= 0.0) return true;
  if (std::isnan(log_ratio)) return false;
  return std::log(rng.uniform()) < log_ratio;
}

}  // namespace

PosteriorSamples bb_posterior(const Dataset& data, const FunctionalKind& functional, std::size_t n_draws,
                              RngHandle& rng, std::size_t max_retries) {
  if (data.size() == 0) throw std::invalid_argument("bb_posterior: empty data");
  if (data.dim() != functional.input_dim())
    throw std::invalid_argument("bb_posterior: data dimension does not match the functional");
  PosteriorSamples out("bb", functional.output_dim(), rng.seed());
  out.reserve(n_draws);
  auto& diag = out.diagnostics();
  for (std::size_t d = 0; d < n_draws; ++d) {
    std::size_t tries = 0;
    while (true) {
      ++diag.proposals;
      try {
        const Theta t = evaluate(functional, bayesian_bootstrap_draw(data, rng));
        out.push(t.view(), true);
        ++diag.accepted;
        break;
      } catch (const FunctionalError&) {
        ++diag.functional_failures;
        if (++tries > max_retries) {
          diag.failed = true;
          return out;
        }
      }
    }
  }
  return out;
}

NigParams bel_proposal(const Dataset& data, const NigParams& prior, double scale) {
  prior.validate();
  if (!(scale > 0.0)) throw std::invalid_argument("bel_proposal: scale must be positive");
  const auto x = data.values();
  const double n = static_cast<double>(x.size());
  double xbar = 0.0;
  for (double v : x) xbar += v;
  xbar /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - xbar) * (v - xbar);
  NigParams post;
  post.kappa = prior.kappa + n;
  post.mu0 = (prior.kappa * prior.mu0 + n * xbar) / post.kappa;
  post.alpha = scale * (prior.alpha + 0.5 * n);
  post.beta =
      scale * (prior.beta + 0.5 * ss + prior.kappa * n * (xbar - prior.mu0) * (xbar - prior.mu0) / (2.0 * post.kappa));
  return post;
}

PosteriorSamples bel_posterior(const Dataset& data, const NigParams& prior, const ChainSettings& chain,
                               RngHandle& rng, const BelSettings& settings) {
  require_scalar_data(data, "bel_posterior");
  chain.validate();
  const auto x = data.values();
  NigParams proposal = bel_proposal(data, prior, settings.proposal_scale);

  auto log_target = [&](double mu, double sigma2) {
    if (!(sigma2 > 0.0)) return kNegInf;
    const double lr = profile_el(x, mu, sigma2).log_r;
    if (lr == kNegInf) return kNegInf;
    return settings.flat_prior ? lr : lr + nig_log_density(mu, sigma2, prior);
  };

  auto widen = [&] {
    proposal.alpha *= 0.5;
    proposal.beta *= 0.5;
    proposal.kappa *= 0.5;
  };

  PosteriorSamples out;
  for (int attempt = 0;; ++attempt) {
    out = PosteriorSamples("bel", 2, rng.seed());
    out.chain = chain;
    out.reserve(chain.kept());
    auto& diag = out.diagnostics();
    diag.restarts = static_cast<std::size_t>(attempt);

    double mu = 0.0, sigma2 = 0.0, log_m = kNegInf;
    for (int i = 0; i < 1000 && log_m == kNegInf; ++i) {
      std::tie(mu, sigma2) = sample_nig(proposal, rng);
      log_m = log_target(mu, sigma2) - nig_log_density(mu, sigma2, proposal);
    }
    if (log_m == kNegInf) {
      diag.failed = true;
      if (attempt >= settings.max_widenings) return out;
      widen();
      continue;
    }

    for (std::size_t step = 0; step < chain.length; ++step) {
      const auto [mu_p, s2_p] = sample_nig(proposal, rng);
      const double lt = log_target(mu_p, s2_p);
      const double log_m_p = lt == kNegInf ? kNegInf : lt - nig_log_density(mu_p, s2_p, proposal);
      ++diag.proposals;
      if (log_m_p > diag.max_log_weight) diag.max_log_weight = log_m_p;
      const bool acc = log_m_p != kNegInf && accept_move(log_m_p - log_m, rng);
      if (acc) {
        mu = mu_p;
        sigma2 = s2_p;
        log_m = log_m_p;
        ++diag.accepted;
      }
      if (step >= chain.burn_in) {
        const double theta[2] = {mu, sigma2};
        out.push(theta, acc);
      }
    }
    diag.failed = diag.accepted == 0;
    if (diag.acceptance_rate() >= settings.min_acceptance || attempt >= settings.max_widenings) break;
    widen();
  }
  return out;
}

GbSpec GbSpec::from_data(const Dataset& data, const NigParams& prior) {
  require_scalar_data(data, "GbSpec");
  const auto x = data.values();
  const double n = static_cast<double>(x.size());
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (double v : x) mean += Eigen::Vector2d(v, v * v);
  mean /= n;
  Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
  for (double v : x) {
    const Eigen::Vector2d d = Eigen::Vector2d(v, v * v) - mean;
    s += d * d.transpose();
  }
  s /= (n - 1.0);
  Eigen::LLT<Eigen::Matrix2d> llt(s);
  if (llt.info() != Eigen::Success || s.determinant() <= 1e-12 * s.squaredNorm())
    throw std::runtime_error("GbSpec: sample covariance of (x, x^2) is singular");
  GbSpec spec;
  spec.tuning = 0.5 * s.inverse();
  spec.proposal_mean = mean;
  spec.proposal_cov = s / n;
  spec.prior = prior;
  spec.validate();
  return spec;
}

void GbSpec::validate() const {
  prior.validate();
  if (Eigen::LLT<Eigen::Matrix2d>(tuning).info() != Eigen::Success)
    throw std::invalid_argument("GbSpec: tuning matrix must be SPD");
  if (Eigen::LLT<Eigen::Matrix2d>(proposal_cov).info() != Eigen::Success)
    throw std::invalid_argument("GbSpec: proposal covariance must be SPD");
}

double gb_loss(const Dataset& data, const Eigen::Matrix2d& tuning, double m1, double m2) {
  double loss = 0.0;
  for (double v : data.values()) {
    const Eigen::Vector2d l(v - m1, v * v - m2);
    loss += l.dot(tuning * l);
  }
  return loss;
}

double gb_log_prior(double m1, double m2, const NigParams& prior) {
  return nig_log_density(m1, m2 - m1 * m1, prior);
}

PosteriorSamples gb_posterior(const Dataset& data, const NigParams& prior, const ChainSettings& chain,
                              RngHandle& rng) {
  chain.validate();
  const GbSpec spec = GbSpec::from_data(data, prior);
  const Eigen::Matrix2d lower = spec.proposal_cov.llt().matrixL();
  const Eigen::Matrix2d prec = spec.proposal_cov.inverse();

  PosteriorSamples out("gb", 2, rng.seed());
  out.chain = chain;
  out.reserve(chain.kept());
  auto& diag = out.diagnostics();

  auto propose = [&](Eigen::Vector2d& m) {
    for (int i = 0; i < 100000; ++i) {
      const Eigen::Vector2d z(sample_normal(0.0, 1.0, rng), sample_normal(0.0, 1.0, rng));
      m = spec.proposal_mean + lower * z;
      if (m[1] > m[0] * m[0]) return true;
    }
    return false;
  };
  // Truncation normalizer cancels in the ratio.
  auto log_m = [&](const Eigen::Vector2d& m) {
    const Eigen::Vector2d d = m - spec.proposal_mean;
    const double log_q = -0.5 * d.dot(prec * d);
    return -gb_loss(data, spec.tuning, m[0], m[1]) + gb_log_prior(m[0], m[1], prior) - log_q;
  };

  Eigen::Vector2d state;
  if (!propose(state)) throw std::runtime_error("gb_posterior: truncated proposal has negligible mass");
  double lm = log_m(state);
  for (std::size_t step = 0; step < chain.length; ++step) {
    Eigen::Vector2d cand;
    if (!propose(cand)) throw std::runtime_error("gb_posterior: truncated proposal has negligible mass");
    const double lc = log_m(cand);
    ++diag.proposals;
    if (lc > diag.max_log_weight) diag.max_log_weight = lc;
    const bool acc = accept_move(lc - lm, rng);
    if (acc) {
      state = cand;
      lm = lc;
      ++diag.accepted;
    }
    if (step >= chain.burn_in) {
      const double theta[2] = {state[0], state[1] - state[0] * state[0]};
      out.push(theta, acc);
    }
  }
  diag.failed = diag.accepted == 0;
  return out;
}

}  // namespace tabayes
