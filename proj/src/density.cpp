#include "tabayes/density.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tabayes {

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct Scale {
  double sd;
  double robust;
  double q_lo;
  double q_hi;
};

Scale coordinate_scale(std::vector<double> values) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  std::sort(values.begin(), values.end());
  const double iqr = quantile_sorted(values, 0.75) - quantile_sorted(values, 0.25);
  const double robust = iqr > 0.0 ? std::min(sd, iqr / 1.349) : sd;
  return {sd, robust, quantile_sorted(values, 0.001), quantile_sorted(values, 0.999)};
}

}  // namespace

DensityModel DensityModel::fit(std::size_t dim, std::span<const double> samples, const KdeOptions& options) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("DensityModel: dimension must be 1 or 2");
  if (samples.size() % dim != 0) throw std::invalid_argument("DensityModel: sample size is not a multiple of dim");
  const std::size_t n = samples.size() / dim;
  if (n < kMinSamples) throw std::invalid_argument("DensityModel: at least 10 samples are required");

  DensityModel m;
  m.dim_ = dim;
  m.log_scale_ = options.log_scale;
  m.log_scale_.resize(dim, false);
  m.fitted_.assign(samples.begin(), samples.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      double& v = m.fitted_[i * dim + j];
      if (!std::isfinite(v)) throw std::invalid_argument("DensityModel: samples must be finite");
      if (m.log_scale_[j]) {
        if (!(v > 0.0)) throw std::invalid_argument("DensityModel: log-scale coordinate needs positive samples");
        v = std::log(v);
      }
    }
  }

  std::array<Scale, 2> scales{};
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = m.fitted_[i * dim + j];
    scales[j] = coordinate_scale(std::move(col));
    if (!(scales[j].sd > 0.0)) throw std::invalid_argument("DensityModel: degenerate samples (zero variance)");
  }

  const double nd = static_cast<double>(n);
  auto& h = m.bandwidth_;
  h = {0.0, 0.0, 0.0, 0.0};
  switch (options.rule) {
    case BandwidthRule::Silverman:
    case BandwidthRule::PluginDiagonal: {
      double factor;
      if (options.rule == BandwidthRule::Silverman)
        factor = dim == 1 ? 0.9 * std::pow(nd, -0.2) : std::pow(nd, -1.0 / 6.0);
      else
        factor = std::pow(4.0 / ((static_cast<double>(dim) + 2.0) * nd), 1.0 / (static_cast<double>(dim) + 4.0));
      for (std::size_t j = 0; j < dim; ++j) {
        const double bw = scales[j].robust * factor;
        h[j * dim + j] = bw * bw;
      }
      break;
    }
    case BandwidthRule::Explicit:
      if (dim == 1) {
        if (options.bandwidth.size() != 1 || !(options.bandwidth[0] > 0.0))
          throw std::invalid_argument("DensityModel: explicit 1-d bandwidth must be one positive value");
        h[0] = options.bandwidth[0] * options.bandwidth[0];
      } else {
        if (options.bandwidth.size() != 4)
          throw std::invalid_argument("DensityModel: explicit 2-d bandwidth must be a 2x2 matrix");
        std::copy(options.bandwidth.begin(), options.bandwidth.end(), h.begin());
        if (h[1] != h[2]) throw std::invalid_argument("DensityModel: bandwidth matrix must be symmetric");
      }
      break;
  }

  if (dim == 1) {
    if (!(h[0] > 0.0)) throw std::invalid_argument("DensityModel: bandwidth must be positive");
    m.precision_[0] = 1.0 / h[0];
    m.log_norm_ = -0.5 * std::log(2.0 * std::numbers::pi * h[0]);
  } else {
    const double det = h[0] * h[3] - h[1] * h[2];
    if (!(h[0] > 0.0) || !(det > 0.0)) throw std::invalid_argument("DensityModel: bandwidth must be positive definite");
    m.precision_ = {h[3] / det, -h[1] / det, -h[2] / det, h[0] / det};
    m.log_norm_ = -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(det);
  }

  if (options.table_points > 0) {
    if (options.table_points < 4) throw std::invalid_argument("DensityModel: table needs at least 4 points per axis");
    for (std::size_t j = 0; j < dim; ++j) {
      const double pad = 3.0 * std::sqrt(h[j * dim + j]);
      m.table_lo_[j] = scales[j].q_lo - pad;
      m.table_step_[j] = (scales[j].q_hi + pad - m.table_lo_[j]) / static_cast<double>(options.table_points - 1);
    }
    m.build_table(options.table_points);
  }
  return m;
}

double DensityModel::fitted_log_density(const std::array<double, 2>& z) const {
  const std::size_t n = size();
  double min_q = std::numeric_limits<double>::infinity();
  thread_local std::vector<double> q;
  q.resize(n);
  if (dim_ == 1) {
    const double p = precision_[0];
    for (std::size_t i = 0; i < n; ++i) {
      const double d = z[0] - fitted_[i];
      q[i] = d * d * p;
      min_q = std::min(min_q, q[i]);
    }
  } else {
    const double p00 = precision_[0], p01 = precision_[1], p11 = precision_[3];
    for (std::size_t i = 0; i < n; ++i) {
      const double d0 = z[0] - fitted_[2 * i];
      const double d1 = z[1] - fitted_[2 * i + 1];
      q[i] = d0 * d0 * p00 + 2.0 * d0 * d1 * p01 + d1 * d1 * p11;
      min_q = std::min(min_q, q[i]);
    }
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += std::exp(-0.5 * (q[i] - min_q));
  return log_norm_ - 0.5 * min_q + std::log(sum / static_cast<double>(n));
}

void DensityModel::build_table(std::size_t points) {
  table_points_ = points;
  const std::size_t n = size();
  if (dim_ == 1) {
    table_.resize(points);
    for (std::size_t g = 0; g < points; ++g)
      table_[g] = fitted_log_density({table_lo_[0] + static_cast<double>(g) * table_step_[0], 0.0});
    return;
  }

  table_.assign(points * points, 0.0);
  if (precision_[1] != 0.0) {
    for (std::size_t gx = 0; gx < points; ++gx)
      for (std::size_t gy = 0; gy < points; ++gy)
        table_[gx * points + gy] = fitted_log_density({table_lo_[0] + static_cast<double>(gx) * table_step_[0],
                                                       table_lo_[1] + static_cast<double>(gy) * table_step_[1]});
    return;
  }

  // Diagonal kernel: the node sums factor into a product of per-axis kernel
  // matrices, accumulated blockwise.
  constexpr std::size_t kBlock = 2048;
  const auto g = static_cast<Eigen::Index>(points);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(g, g);
  Eigen::MatrixXd ex(g, static_cast<Eigen::Index>(kBlock));
  Eigen::MatrixXd ey(g, static_cast<Eigen::Index>(kBlock));
  for (std::size_t start = 0; start < n; start += kBlock) {
    const std::size_t len = std::min(kBlock, n - start);
    const auto b = static_cast<Eigen::Index>(len);
    for (Eigen::Index k = 0; k < b; ++k) {
      const std::size_t i = start + static_cast<std::size_t>(k);
      for (Eigen::Index node = 0; node < g; ++node) {
        const double dx = table_lo_[0] + static_cast<double>(node) * table_step_[0] - fitted_[2 * i];
        const double dy = table_lo_[1] + static_cast<double>(node) * table_step_[1] - fitted_[2 * i + 1];
        ex(node, k) = std::exp(-0.5 * dx * dx * precision_[0]);
        ey(node, k) = std::exp(-0.5 * dy * dy * precision_[3]);
      }
    }
    acc.noalias() += ex.leftCols(b) * ey.leftCols(b).transpose();
  }
  const double log_n = std::log(static_cast<double>(n));
  for (std::size_t gx = 0; gx < points; ++gx) {
    for (std::size_t gy = 0; gy < points; ++gy) {
      const double s = acc(static_cast<Eigen::Index>(gx), static_cast<Eigen::Index>(gy));
      table_[gx * points + gy] =
          s > 1e-250 ? log_norm_ + std::log(s) - log_n
                     : fitted_log_density({table_lo_[0] + static_cast<double>(gx) * table_step_[0],
                                           table_lo_[1] + static_cast<double>(gy) * table_step_[1]});
    }
  }
}

double DensityModel::table_lookup(const std::array<double, 2>& z, bool& hit) const {
  hit = false;
  std::array<std::size_t, 2> idx{};
  std::array<double, 2> frac{};
  for (std::size_t j = 0; j < dim_; ++j) {
    const double pos = (z[j] - table_lo_[j]) / table_step_[j];
    if (!(pos >= 0.0) || pos > static_cast<double>(table_points_ - 1)) return 0.0;
    idx[j] = std::min(static_cast<std::size_t>(pos), table_points_ - 2);
    frac[j] = pos - static_cast<double>(idx[j]);
  }
  hit = true;
  if (dim_ == 1) return table_[idx[0]] + frac[0] * (table_[idx[0] + 1] - table_[idx[0]]);
  const std::size_t g = table_points_;
  const double v00 = table_[idx[0] * g + idx[1]];
  const double v01 = table_[idx[0] * g + idx[1] + 1];
  const double v10 = table_[(idx[0] + 1) * g + idx[1]];
  const double v11 = table_[(idx[0] + 1) * g + idx[1] + 1];
  return (1.0 - frac[0]) * ((1.0 - frac[1]) * v00 + frac[1] * v01) + frac[0] * ((1.0 - frac[1]) * v10 + frac[1] * v11);
}

bool DensityModel::to_fitted(std::span<const double> point, std::array<double, 2>& z, double& log_jacobian) const {
  if (point.size() != dim_) throw std::invalid_argument("DensityModel: point dimension mismatch");
  log_jacobian = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) {
    if (!std::isfinite(point[j])) throw std::invalid_argument("DensityModel: point must be finite");
    if (log_scale_[j]) {
      if (!(point[j] > 0.0)) return false;
      z[j] = std::log(point[j]);
      log_jacobian -= z[j];
    } else {
      z[j] = point[j];
    }
  }
  return true;
}

double DensityModel::log_density(std::span<const double> point) const {
  std::array<double, 2> z{};
  double log_jac = 0.0;
  if (!to_fitted(point, z, log_jac)) return -std::numeric_limits<double>::infinity();
  if (!table_.empty()) {
    bool hit = false;
    const double v = table_lookup(z, hit);
    if (hit) return v + log_jac;
  }
  return fitted_log_density(z) + log_jac;
}

double DensityModel::log_density_exact(std::span<const double> point) const {
  std::array<double, 2> z{};
  double log_jac = 0.0;
  if (!to_fitted(point, z, log_jac)) return -std::numeric_limits<double>::infinity();
  return fitted_log_density(z) + log_jac;
}

double DensityModel::density(std::span<const double> point) const { return std::exp(log_density(point)); }

}  // namespace tabayes
