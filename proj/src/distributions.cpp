#include "tabayes/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tabayes {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

double sample_normal(double mu, double sigma2, RngHandle& rng) {
  require_finite(mu, "mu");
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2))
    throw std::invalid_argument("sample_normal: sigma2 must be finite and >= 0");
  if (sigma2 == 0.0) return mu;
  std::normal_distribution<double> dist(mu, std::sqrt(sigma2));
  return dist(rng.engine());
}

double sample_gamma(double shape, double rate, RngHandle& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape)) throw std::invalid_argument("sample_gamma: shape must be > 0");
  if (!(rate > 0.0) || !std::isfinite(rate)) throw std::invalid_argument("sample_gamma: rate must be > 0");
  std::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(rng.engine());
}

double sample_log_gamma(double shape, RngHandle& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape)) throw std::invalid_argument("sample_log_gamma: shape must be > 0");
  if (shape >= 1.0) {
    std::gamma_distribution<double> dist(shape, 1.0);
    return std::log(dist(rng.engine()));
  }
  // G(a) = G(a + 1) * U^(1/a)
  std::gamma_distribution<double> dist(shape + 1.0, 1.0);
  const double g = dist(rng.engine());
  return std::log(g) + std::log(rng.uniform()) / shape;
}

int sample_bernoulli(double p, RngHandle& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_bernoulli: p must lie in [0, 1]");
  if (p == 0.0) return 0;
  if (p == 1.0) return 1;
  return rng.uniform() < p ? 1 : 0;
}

double sample_beta_one(double b, RngHandle& rng) {
  if (!(b > 0.0) || !std::isfinite(b)) throw std::invalid_argument("sample_beta_one: b must be > 0");
  // CDF 1 - (1 - v)^b, so v = 1 - U^(1/b) with U uniform.
  return -std::expm1(std::log(rng.uniform()) / b);
}

std::vector<double> sample_dirichlet(std::span<const double> alpha, RngHandle& rng) {
  if (alpha.empty()) throw std::invalid_argument("sample_dirichlet: empty parameter vector");
  for (double a : alpha)
    if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("sample_dirichlet: every alpha must be > 0");

  std::vector<double> out(alpha.size());
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    out[i] = sample_log_gamma(alpha[i], rng);
    max_log = std::max(max_log, out[i]);
  }
  double total = 0.0;
  for (double& v : out) {
    v = std::exp(v - max_log);
    total += v;
  }
  for (double& v : out) v /= total;
  return out;
}

double normal_log_density(double x, double mu, double sigma2) {
  const double d = x - mu;
  return -0.5 * (std::log(2.0 * std::numbers::pi * sigma2) + d * d / sigma2);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

void NigParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("NigParams: alpha must be > 0");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("NigParams: beta must be > 0");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("NigParams: kappa must be > 0");
  require_finite(mu0, "NigParams: mu0");
}

double nig_log_density(double mu, double sigma2, const NigParams& params) {
  params.validate();
  if (!(sigma2 > 0.0)) return -std::numeric_limits<double>::infinity();
  const double precision = 1.0 / sigma2;
  // Gamma density of the precision plus the Jacobian |d precision / d sigma2| = sigma2^-2.
  const double log_gamma = params.alpha * std::log(params.beta) - std::lgamma(params.alpha) +
                           (params.alpha - 1.0) * std::log(precision) - params.beta * precision;
  return log_gamma - 2.0 * std::log(sigma2) + normal_log_density(mu, params.mu0, sigma2 / params.kappa);
}

std::pair<double, double> sample_nig(const NigParams& params, RngHandle& rng) {
  params.validate();
  const double sigma2 = 1.0 / sample_gamma(params.alpha, params.beta, rng);
  return {sample_normal(params.mu0, sigma2 / params.kappa, rng), sigma2};
}

double discretize(double x, double h) {
  if (!std::isfinite(x)) throw std::invalid_argument("discretize: x must be finite");
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("discretize: h must be > 0");
  // The default rounding mode is round-to-nearest, ties-to-even.
  return std::nearbyint(x / h) * h;
}

void DiscretizedBase::validate() const {
  require_finite(mu, "DiscretizedBase: mu");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw std::invalid_argument("DiscretizedBase: sigma2 must be > 0");
  if (!(bin_width > 0.0) || !std::isfinite(bin_width))
    throw std::invalid_argument("DiscretizedBase: bin width must be > 0");
}

double DiscretizedBase::sample(RngHandle& rng) const {
  return discretize(sample_normal(mu, sigma2, rng), bin_width);
}

}  // namespace tabayes
