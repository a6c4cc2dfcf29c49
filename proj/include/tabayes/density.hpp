#ifndef TABAYES_DENSITY_HPP
#define TABAYES_DENSITY_HPP

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace tabayes {

enum class BandwidthRule {
  /// 1-d: 0.9 * min(sd, IQR / 1.349) * n^(-1/5). 2-d: per-coordinate robust
  /// scale times n^(-1/6).
  Silverman,
  /// Normal-reference diagonal rule (4 / ((d + 2) n))^(1 / (d + 4)) times the
  /// per-coordinate robust scale.
  PluginDiagonal,
  /// Bandwidth given in KdeOptions::bandwidth.
  Explicit,
};

struct KdeOptions {
  BandwidthRule rule = BandwidthRule::Silverman;
  /// Explicit bandwidth. d = 1: the kernel standard deviation. d = 2: the
  /// kernel covariance matrix, row-major (4 values, symmetric positive definite).
  std::vector<double> bandwidth;
  /// Coordinates estimated on the log scale. The density is reported in the
  /// original coordinates (the Jacobian 1/x is applied on evaluation).
  std::vector<bool> log_scale;
  /// When positive, log density is tabulated on this many nodes per axis
  /// over the bulk of the samples and interpolated there; points outside the
  /// table are evaluated exactly.
  std::size_t table_points = 0;
};

/// Gaussian kernel density estimate in one or two dimensions.
class DensityModel {
 public:
  static constexpr std::size_t kMinSamples = 10;

  /// samples: row-major, dim values per sample, in original coordinates.
  static DensityModel fit(std::size_t dim, std::span<const double> samples, const KdeOptions& options = {});

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return fitted_.size() / dim_; }

  /// Kernel covariance in fitted coordinates, row-major 2x2 (d = 1 uses [0]).
  const std::array<double, 4>& bandwidth() const noexcept { return bandwidth_; }
  const std::vector<bool>& log_scale() const noexcept { return log_scale_; }
  bool tabulated() const noexcept { return !table_.empty(); }

  /// Log density in original coordinates. Throws std::invalid_argument for
  /// non-finite points; returns -infinity for non-positive values of a
  /// log-scale coordinate.
  double log_density(std::span<const double> point) const;
  double log_density_exact(std::span<const double> point) const;
  double density(std::span<const double> point) const;

 private:
  DensityModel() = default;

  bool to_fitted(std::span<const double> point, std::array<double, 2>& z, double& log_jacobian) const;
  double fitted_log_density(const std::array<double, 2>& z) const;
  double table_lookup(const std::array<double, 2>& z, bool& hit) const;
  void build_table(std::size_t points);

  std::size_t dim_ = 1;
  std::vector<double> fitted_;
  std::vector<bool> log_scale_;
  std::array<double, 4> bandwidth_{};
  std::array<double, 4> precision_{};
  double log_norm_ = 0.0;

  std::size_t table_points_ = 0;
  std::array<double, 2> table_lo_{};
  std::array<double, 2> table_step_{};
  std::vector<double> table_;
};

}  // namespace tabayes

#endif  // TABAYES_DENSITY_HPP
