#ifndef TABAYES_HPD_HPP
#define TABAYES_HPD_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tabayes {

/// Highest posterior density region estimated from Monte Carlo draws.
///
/// 1-d regions are a single interval. 2-d regions are the cells of a regular
/// grid whose smoothed density reaches the threshold; membership of an
/// arbitrary point uses the same interpolated density.
struct HpdRegion {
  std::size_t dim = 1;
  double level = 0.95;

  double lower = 0.0;
  double upper = 0.0;

  std::array<double, 2> origin{};  // centre of cell (0, 0)
  std::array<double, 2> step{};
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> grid_density;  // nx * ny, x index fastest
  std::vector<std::uint8_t> mask;
  double threshold = 0.0;
  double area = 0.0;

  /// Interval length or region area.
  double size() const { return dim == 1 ? upper - lower : area; }
  bool contains(std::span<const double> point) const;
  /// Smoothed density interpolated from the grid; zero off the grid.
  double density_at(double x, double y) const;
};

/// Shortest window of sorted draws holding ceil(level * M) of them.
/// Needs at least 100 draws.
HpdRegion hpd_1d(std::span<const double> samples, double level);

/// samples: row-major pairs. Binned Gaussian KDE on a grid of resolution^2
/// cells over the sample range padded by three bandwidths. Needs at least
/// 500 draws; throws when a coordinate does not vary.
HpdRegion hpd_2d(std::span<const double> samples, double level, std::size_t resolution = 200);

}  // namespace tabayes

#endif  // TABAYES_HPD_HPP
