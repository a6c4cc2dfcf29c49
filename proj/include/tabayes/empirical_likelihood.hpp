#ifndef TABAYES_EMPIRICAL_LIKELIHOOD_HPP
#define TABAYES_EMPIRICAL_LIKELIHOOD_HPP

#include <Eigen/Dense>
#include <array>
#include <span>

namespace tabayes {

/// Profile empirical likelihood at one parameter value.
struct ElSolveResult {
  /// log R_n, zero at the unconstrained optimum; -infinity outside the hull.
  double log_r = 0.0;
  Eigen::Vector2d lambda = Eigen::Vector2d::Zero();
  bool in_hull = true;
  bool converged = true;
  int iterations = 0;
};

struct ElSettings {
  int max_iterations = 50;
  double gradient_tolerance = 1e-9;
};

/// True when the origin lies in the interior of the convex hull of the
/// points (zero vectors are ignored).
bool origin_in_hull_interior(std::span<const std::array<double, 2>> g);

/// Maximizes sum log(n w_i) subject to sum w_i g_i = 0 through the dual:
/// lambda minimizes -sum log*(1 + lambda^T g_i), where log* continues log
/// quadratically below 1/n. Each Newton step is the least-squares solve of
/// the iteratively reweighted system.
ElSolveResult el_solve(std::span<const std::array<double, 2>> g, const ElSettings& settings = {});

/// Estimating function (x - mu, (x - mu)^2 - sigma2) for the mean and variance.
ElSolveResult profile_el(std::span<const double> data, double mu, double sigma2, const ElSettings& settings = {});

}  // namespace tabayes

#endif  // TABAYES_EMPIRICAL_LIKELIHOOD_HPP
