#include "tabayes/empirical_likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace tabayes {

bool origin_in_hull_interior(std::span<const std::array<double, 2>> g) {
  std::vector<double> angles;
  angles.reserve(g.size());
  for (const auto& p : g)
    if (p[0] != 0.0 || p[1] != 0.0) angles.push_back(std::atan2(p[1], p[0]));
  if (angles.size() < 3) return false;
  std::sort(angles.begin(), angles.end());
  double max_gap = 2.0 * std::numbers::pi - (angles.back() - angles.front());
  for (std::size_t i = 1; i < angles.size(); ++i) max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
  return max_gap < std::numbers::pi - 1e-12;
}

namespace {

struct LogStar {
  double threshold;
  double log_threshold;
  double n;

  explicit LogStar(double count) : threshold(1.0 / count), log_threshold(-std::log(count)), n(count) {}

  double value(double z) const {
    if (z >= threshold) return std::log(z);
    const double t = n * z;
    return log_threshold - 1.5 + 2.0 * t - 0.5 * t * t;
  }
  double d1(double z) const { return z >= threshold ? 1.0 / z : 2.0 * n - n * n * z; }
  double d2(double z) const { return z >= threshold ? -1.0 / (z * z) : -n * n; }
};

}  // namespace

ElSolveResult el_solve(std::span<const std::array<double, 2>> g, const ElSettings& settings) {
  ElSolveResult result;
  bool all_zero = true;
  for (const auto& p : g)
    if (p[0] != 0.0 || p[1] != 0.0) all_zero = false;
  if (all_zero) return result;
  if (!origin_in_hull_interior(g)) {
    result.in_hull = false;
    result.converged = true;
    result.log_r = -std::numeric_limits<double>::infinity();
    return result;
  }

  const LogStar ls(static_cast<double>(g.size()));
  auto objective = [&](const Eigen::Vector2d& lambda) {
    double f = 0.0;
    for (const auto& p : g) f -= ls.value(1.0 + lambda[0] * p[0] + lambda[1] * p[1]);
    return f;
  };

  auto gradient = [&](const Eigen::Vector2d& lambda) {
    Eigen::Vector2d grad = Eigen::Vector2d::Zero();
    for (const auto& p : g) {
      const Eigen::Vector2d gi(p[0], p[1]);
      grad -= ls.d1(1.0 + lambda.dot(gi)) * gi;
    }
    return grad;
  };

  Eigen::Vector2d lambda = Eigen::Vector2d::Zero();
  double f = 0.0;
  Eigen::Vector2d grad = gradient(lambda);
  result.converged = false;
  for (int it = 0; it < settings.max_iterations; ++it) {
    result.iterations = it;
    if (grad.norm() < settings.gradient_tolerance) {
      result.converged = true;
      break;
    }
    Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
    for (const auto& p : g) {
      const Eigen::Vector2d gi(p[0], p[1]);
      hess -= ls.d2(1.0 + lambda.dot(gi)) * gi * gi.transpose();
    }
    const Eigen::Vector2d step = hess.ldlt().solve(-grad);
    // Near the optimum the objective is flat to rounding, so a step that does
    // not raise it beyond rounding is also taken when it shrinks the gradient.
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f)) * static_cast<double>(g.size());
    double t = 1.0;
    bool moved = false;
    for (int h = 0; h < 60; ++h, t *= 0.5) {
      const Eigen::Vector2d trial = lambda + t * step;
      const double ft = objective(trial);
      if (ft < f || ft <= f + slack) {
        const Eigen::Vector2d gt = gradient(trial);
        if (ft < f || gt.norm() < grad.norm()) {
          lambda = trial;
          f = ft;
          grad = gt;
          moved = true;
          break;
        }
      }
    }
    result.iterations = it + 1;
    if (!moved) break;
  }

  double log_r = 0.0;
  for (const auto& p : g) {
    const double z = 1.0 + lambda[0] * p[0] + lambda[1] * p[1];
    log_r -= z > 0.0 ? std::log(z) : std::numeric_limits<double>::infinity();
  }
  result.lambda = lambda;
  result.log_r = std::min(log_r, 0.0);
  return result;
}

ElSolveResult profile_el(std::span<const double> data, double mu, double sigma2, const ElSettings& settings) {
  if (data.size() < 3) throw std::invalid_argument("profile_el: at least three observations are required");
  std::vector<std::array<double, 2>> g(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double d = data[i] - mu;
    g[i] = {d, d * d - sigma2};
  }
  return el_solve(g, settings);
}

}  // namespace tabayes
