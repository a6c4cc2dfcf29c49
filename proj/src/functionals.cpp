#include "tabayes/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tabayes {

std::size_t FunctionalKind::output_dim() const {
  return type == FunctionalType::MeanVar || type == FunctionalType::RawMoments2 ? 2 : 1;
}

std::size_t FunctionalKind::input_dim() const { return type == FunctionalType::Aipw ? 3 : 1; }

std::string FunctionalKind::name() const {
  switch (type) {
    case FunctionalType::Mean: return "mean";
    case FunctionalType::Variance: return "variance";
    case FunctionalType::MeanVar: return "meanvar";
    case FunctionalType::RawMoments2: return "raw_moments2";
    case FunctionalType::Aipw: return "aipw";
  }
  return "unknown";
}

namespace {

void require_scalar(const DiscreteMeasure& f, const char* what) {
  if (f.dim() != 1) throw std::invalid_argument(std::string(what) + ": expects a measure on R");
}

void require_mar(const DiscreteMeasure& f, const char* what) {
  if (f.dim() != 3) throw std::invalid_argument(std::string(what) + ": expects atoms (x, c, c*y)");
}

double expit(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

bool observed(std::span<const double> atom) { return atom[1] > 0.5; }

}  // namespace

double mean(const DiscreteMeasure& f) {
  require_scalar(f, "mean");
  double mu = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) mu += f.weight(i) * f.atom(i)[0];
  return mu;
}

MeanVar mean_var(const DiscreteMeasure& f) {
  const double mu = mean(f);
  double s2 = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = f.atom(i)[0] - mu;
    s2 += f.weight(i) * d * d;
  }
  return {mu, s2};
}

RawMoments raw_moments2(const DiscreteMeasure& f) {
  require_scalar(f, "raw_moments2");
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = f.atom(i)[0];
    m1 += f.weight(i) * x;
    m2 += f.weight(i) * x * x;
  }
  return {m1, m2};
}

RegressionFit fit_weighted_logistic(const DiscreteMeasure& f, const AipwSettings& settings) {
  if (f.dim() < 2) throw std::invalid_argument("fit_weighted_logistic: expects atoms (x, c, ...)");
  const std::size_t n = f.size();

  double x_bar = 0.0;
  double c_bar = 0.0;
  bool any_zero = false;
  bool any_one = false;
  constexpr double inf = std::numeric_limits<double>::infinity();
  double lo[2] = {inf, inf};
  double hi[2] = {-inf, -inf};
  for (std::size_t j = 0; j < n; ++j) {
    if (f.weight(j) <= 0.0) continue;
    const auto a = f.atom(j);
    const int c = observed(a) ? 1 : 0;
    x_bar += f.weight(j) * a[0];
    c_bar += f.weight(j) * c;
    (c ? any_one : any_zero) = true;
    lo[c] = std::min(lo[c], a[0]);
    hi[c] = std::max(hi[c], a[0]);
  }
  if (!(any_zero && any_one)) throw FunctionalError("fit_weighted_logistic: every atom has the same c");
  if (std::min(lo[0], lo[1]) == std::max(hi[0], hi[1]))
    throw FunctionalError("fit_weighted_logistic: singular design");
  // With one covariate the MLE exists iff the x ranges of the two classes
  // overlap in more than a point.
  const bool separated = hi[0] <= lo[1] || hi[1] <= lo[0];

  // Centered parameterization a + b (x - x_bar) for conditioning.
  double a = std::log(c_bar / (1.0 - c_bar));
  double b = 0.0;

  struct Eval {
    double s0, s1, h00, h01, h11, norm, max_abs_eta;
  };
  auto evaluate_at = [&](double a_, double b_) {
    Eval e{0, 0, 0, 0, 0, 0, 0};
    for (std::size_t j = 0; j < n; ++j) {
      const double w = f.weight(j);
      if (w <= 0.0) continue;
      const auto atom = f.atom(j);
      const double u = atom[0] - x_bar;
      const double eta = a_ + b_ * u;
      e.max_abs_eta = std::max(e.max_abs_eta, std::abs(eta));
      const double p = expit(eta);
      const double r = (observed(atom) ? 1.0 : 0.0) - p;
      const double v = w * p * (1.0 - p);
      e.s0 += w * r;
      e.s1 += w * u * r;
      e.h00 += v;
      e.h01 += v * u;
      e.h11 += v * u * u;
    }
    // Score of the original (intercept, slope) parameterization.
    e.norm = std::hypot(e.s0, e.s1 + x_bar * e.s0);
    return e;
  };

  RegressionFit fit;
  Eval cur = evaluate_at(a, b);
  for (int it = 0; it < settings.max_iterations; ++it) {
    fit.iterations = it;
    if (cur.norm < settings.tolerance) {
      fit.converged = true;
      break;
    }
    const double det = cur.h00 * cur.h11 - cur.h01 * cur.h01;
    if (!(det > 1e-300)) {
      if (separated) break;  // saturated at the limit
      throw FunctionalError("fit_weighted_logistic: singular design");
    }
    const double da = (cur.h11 * cur.s0 - cur.h01 * cur.s1) / det;
    const double db = (cur.h00 * cur.s1 - cur.h01 * cur.s0) / det;
    double step = 1.0;
    bool improved = false;
    Eval next{};
    for (int halving = 0; halving < 40; ++halving, step *= 0.5) {
      next = evaluate_at(a + step * da, b + step * db);
      if (next.norm < cur.norm) {
        improved = true;
        break;
      }
    }
    if (!improved) break;
    a += step * da;
    b += step * db;
    cur = next;
    fit.iterations = it + 1;
  }
  // No finite root exists under separation; Newton has pushed the fitted
  // probabilities towards their limits.
  fit.separated = separated;
  if (separated) fit.converged = false;

  fit.intercept = a - b * x_bar;
  fit.slope = b;
  fit.residual_norm = cur.norm;
  return fit;
}

RegressionFit fit_weighted_linear(const DiscreteMeasure& f) {
  require_mar(f, "fit_weighted_linear");
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (observed(f.atom(j)) && f.weight(j) > 0.0) {
      total += f.weight(j);
      ++count;
    }
  }
  if (count < 2) throw FunctionalError("fit_weighted_linear: fewer than two observed atoms");

  double x_bar = 0.0;
  double y_bar = 0.0;
  double x2 = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const auto a = f.atom(j);
    if (!observed(a) || f.weight(j) <= 0.0) continue;
    const double w = f.weight(j) / total;
    x_bar += w * a[0];
    y_bar += w * a[2];
    x2 += w * a[0] * a[0];
  }
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const auto a = f.atom(j);
    if (!observed(a) || f.weight(j) <= 0.0) continue;
    const double w = f.weight(j) / total;
    const double dx = a[0] - x_bar;
    sxx += w * dx * dx;
    sxy += w * dx * (a[2] - y_bar);
  }
  if (!(sxx > 1e-12 * x2)) throw FunctionalError("fit_weighted_linear: singular design");

  RegressionFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = y_bar - fit.slope * x_bar;
  fit.converged = true;

  double r0 = 0.0;
  double r1 = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const auto a = f.atom(j);
    if (!observed(a) || f.weight(j) <= 0.0) continue;
    const double w = f.weight(j) / total;
    const double e = a[2] - fit.intercept - fit.slope * a[0];
    r0 += w * e;
    r1 += w * a[0] * e;
  }
  fit.residual_norm = std::hypot(r0, r1);
  return fit;
}

double fitted_propensity(const RegressionFit& fit, double x, double cap) {
  return expit(std::clamp(fit.intercept + fit.slope * x, -cap, cap));
}

AipwResult aipw(const DiscreteMeasure& f, const AipwSettings& settings) {
  require_mar(f, "aipw");
  AipwResult result;
  result.outcome = fit_weighted_linear(f);

  bool all_observed = true;
  for (std::size_t j = 0; j < f.size(); ++j)
    if (f.weight(j) > 0.0 && !observed(f.atom(j))) all_observed = false;
  if (all_observed) {
    result.propensity.intercept = settings.predictor_cap;
    result.propensity.slope = 0.0;
    result.propensity.converged = false;
    result.propensity.separated = true;
  } else {
    result.propensity = fit_weighted_logistic(f, settings);
  }

  double value = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const auto a = f.atom(j);
    const double zeta = result.outcome.intercept + result.outcome.slope * a[0];
    double term = zeta;
    if (observed(a)) {
      double p = fitted_propensity(result.propensity, a[0], settings.predictor_cap);
      if (p < settings.propensity_floor) {
        p = settings.propensity_floor;
        ++result.floor_hits;
      }
      term += (a[2] - zeta) / p;
    }
    value += f.weight(j) * term;
  }
  result.value = value;
  return result;
}

Theta evaluate(const FunctionalKind& kind, const DiscreteMeasure& f) {
  Theta t;
  t.dim = kind.output_dim();
  switch (kind.type) {
    case FunctionalType::Mean:
      t[0] = mean(f);
      break;
    case FunctionalType::Variance:
      t[0] = mean_var(f).sigma2;
      break;
    case FunctionalType::MeanVar: {
      const auto mv = mean_var(f);
      t[0] = mv.mu;
      t[1] = mv.sigma2;
      break;
    }
    case FunctionalType::RawMoments2: {
      const auto rm = raw_moments2(f);
      t[0] = rm.mu;
      t[1] = rm.mu2prime;
      break;
    }
    case FunctionalType::Aipw: {
      const auto r = aipw(f, kind.aipw);
      if (!r.propensity.converged) throw FunctionalError("aipw: propensity fit did not converge");
      t[0] = r.value;
      break;
    }
  }
  return t;
}

}  // namespace tabayes
