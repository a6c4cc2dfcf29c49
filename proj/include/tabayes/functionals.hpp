#ifndef TABAYES_FUNCTIONALS_HPP
#define TABAYES_FUNCTIONALS_HPP

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include "tabayes/discrete_measure.hpp"

namespace tabayes {

/// A functional could not be evaluated on a particular measure (singular
/// design, separation, degenerate missingness pattern). Samplers treat the
/// measure as unusable rather than aborting.
class FunctionalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Value of a functional; dimension 1 or 2.
struct Theta {
  std::array<double, 2> values{0.0, 0.0};
  std::size_t dim = 1;

  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  std::span<const double> view() const { return {values.data(), dim}; }
};

struct AipwSettings {
  int max_iterations = 100;
  double tolerance = 1e-9;
  /// Clamp on |psi0 + psi1 x| when fitted propensities are evaluated.
  double predictor_cap = 30.0;
  double propensity_floor = 1e-6;
};

enum class FunctionalType { Mean, Variance, MeanVar, RawMoments2, Aipw };

struct FunctionalKind {
  FunctionalType type = FunctionalType::Mean;
  AipwSettings aipw{};

  static FunctionalKind mean() { return {FunctionalType::Mean, {}}; }
  static FunctionalKind variance() { return {FunctionalType::Variance, {}}; }
  static FunctionalKind mean_var() { return {FunctionalType::MeanVar, {}}; }
  static FunctionalKind raw_moments2() { return {FunctionalType::RawMoments2, {}}; }
  static FunctionalKind aipw_mean(AipwSettings s = {}) { return {FunctionalType::Aipw, s}; }

  std::size_t output_dim() const;
  /// Dimension of the atoms the functional reads.
  std::size_t input_dim() const;
  std::string name() const;
};

struct MeanVar {
  double mu;
  double sigma2;
};

struct RawMoments {
  double mu;
  double mu2prime;
};

double mean(const DiscreteMeasure& f);
MeanVar mean_var(const DiscreteMeasure& f);
RawMoments raw_moments2(const DiscreteMeasure& f);

/// Coefficients of a two-parameter regression (intercept, slope) together
/// with the norm of its defining estimating equation at the returned value.
struct RegressionFit {
  double intercept = 0.0;
  double slope = 0.0;
  bool converged = false;
  /// Logistic fit only: some |s0 + s1 x| exceeds the predictor cap, i.e. the
  /// data are (quasi-)separated and the maximum likelihood estimate is at
  /// infinity. The fitted probabilities are then the clamped limit.
  bool separated = false;
  double residual_norm = 0.0;
  int iterations = 0;
};

/// Weighted logistic regression of c on x over atoms (x, c, ...).
///
/// Solves sum_j w_j (1, x_j)^T (c_j - expit(s0 + s1 x_j)) = 0 by Newton's
/// method with step halving. Under separation Newton keeps pushing the
/// predictor outward until the score vanishes to tolerance; the fit is then
/// flagged separated with converged = false. Throws
/// FunctionalError when every atom carries the same c.
RegressionFit fit_weighted_logistic(const DiscreteMeasure& f, const AipwSettings& settings = {});

/// Weighted least squares of y on x over the atoms with c = 1, weights
/// renormalized on that subset. Atoms are (x, c, c*y). Throws FunctionalError
/// with fewer than two observed atoms or when their x values do not vary.
RegressionFit fit_weighted_linear(const DiscreteMeasure& f);

/// Fitted propensity expit(clamp(s0 + s1 x, +-cap)).
double fitted_propensity(const RegressionFit& fit, double x, double cap);

struct AipwResult {
  double value = 0.0;
  RegressionFit outcome;
  RegressionFit propensity;
  /// Observed atoms whose fitted propensity was raised to the floor.
  std::size_t floor_hits = 0;

  bool separated() const { return propensity.separated; }
};

/// Augmented inverse propensity weighted mean of y under f:
/// E_f[ zeta(X) + C (Y - zeta(X)) / p(X) ] with zeta and p from the two fits.
/// When every atom is observed the propensity is the limiting clamped fit
/// (predictor at +cap), flagged separated.
AipwResult aipw(const DiscreteMeasure& f, const AipwSettings& settings = {});

/// Evaluates the functional. Throws FunctionalError when the measure does not
/// admit a value, including AIPW with a separated or stalled propensity fit.
Theta evaluate(const FunctionalKind& kind, const DiscreteMeasure& f);

}  // namespace tabayes

#endif  // TABAYES_FUNCTIONALS_HPP
