#include "tabayes/hpd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tabayes/density.hpp"

namespace tabayes {

namespace {

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("hpd: level must be in (0, 1)");
}

// Gaussian smoothing of one axis of a row-major nx*ny array.
void smooth_axis(std::vector<double>& grid, std::size_t nx, std::size_t ny, bool along_x, double sd_cells) {
  const auto half = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sd_cells));
  std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
  double ksum = 0.0;
  for (std::ptrdiff_t k = -half; k <= half; ++k) {
    const double v = std::exp(-0.5 * static_cast<double>(k * k) / (sd_cells * sd_cells));
    kernel[static_cast<std::size_t>(k + half)] = v;
    ksum += v;
  }
  for (auto& v : kernel) v /= ksum;

  const std::size_t len = along_x ? nx : ny;
  const std::size_t lines = along_x ? ny : nx;
  std::vector<double> line(len), out(len);
  for (std::size_t l = 0; l < lines; ++l) {
    for (std::size_t i = 0; i < len; ++i) line[i] = along_x ? grid[l * nx + i] : grid[i * nx + l];
    for (std::size_t i = 0; i < len; ++i) {
      double acc = 0.0;
      const auto ii = static_cast<std::ptrdiff_t>(i);
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, ii - half);
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(len) - 1, ii + half);
      for (std::ptrdiff_t j = lo; j <= hi; ++j) acc += kernel[static_cast<std::size_t>(j - ii + half)] * line[static_cast<std::size_t>(j)];
      out[i] = acc;
    }
    for (std::size_t i = 0; i < len; ++i) (along_x ? grid[l * nx + i] : grid[i * nx + l]) = out[i];
  }
}

double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (pos - static_cast<double>(i)) * (v[i + 1] - v[i]);
}

}  // namespace

bool HpdRegion::contains(std::span<const double> point) const {
  if (point.size() != dim) throw std::invalid_argument("HpdRegion::contains: dimension mismatch");
  if (dim == 1) return point[0] >= lower && point[0] <= upper;
  return density_at(point[0], point[1]) >= threshold;
}

double HpdRegion::density_at(double x, double y) const {
  const double fx = (x - origin[0]) / step[0];
  const double fy = (y - origin[1]) / step[1];
  if (!(fx >= 0.0 && fy >= 0.0 && fx <= static_cast<double>(nx - 1) && fy <= static_cast<double>(ny - 1))) return 0.0;
  const auto i = std::min(static_cast<std::size_t>(fx), nx - 2);
  const auto j = std::min(static_cast<std::size_t>(fy), ny - 2);
  const double tx = fx - static_cast<double>(i);
  const double ty = fy - static_cast<double>(j);
  const double* g = grid_density.data();
  return (1 - tx) * (1 - ty) * g[j * nx + i] + tx * (1 - ty) * g[j * nx + i + 1] + (1 - tx) * ty * g[(j + 1) * nx + i] +
         tx * ty * g[(j + 1) * nx + i + 1];
}

HpdRegion hpd_1d(std::span<const double> samples, double level) {
  check_level(level);
  if (samples.size() < 100) throw std::invalid_argument("hpd_1d: at least 100 samples are required");
  std::vector<double> s(samples.begin(), samples.end());
  for (double v : s)
    if (!std::isfinite(v)) throw std::invalid_argument("hpd_1d: non-finite sample");
  std::sort(s.begin(), s.end());
  const std::size_t m = s.size();
  const auto k = static_cast<std::size_t>(std::ceil(level * static_cast<double>(m)));
  std::size_t best = 0;
  for (std::size_t i = 1; i + k <= m; ++i)
    if (s[i + k - 1] - s[i] < s[best + k - 1] - s[best]) best = i;
  HpdRegion r;
  r.dim = 1;
  r.level = level;
  r.lower = s[best];
  r.upper = s[best + k - 1];
  return r;
}

HpdRegion hpd_2d(std::span<const double> samples, double level, std::size_t resolution) {
  check_level(level);
  if (samples.size() % 2 != 0) throw std::invalid_argument("hpd_2d: samples must be pairs");
  const std::size_t m = samples.size() / 2;
  if (m < 500) throw std::invalid_argument("hpd_2d: at least 500 samples are required");
  if (resolution < 10) throw std::invalid_argument("hpd_2d: grid resolution must be at least 10");

  KdeOptions opts;
  opts.rule = BandwidthRule::PluginDiagonal;
  const DensityModel kde = DensityModel::fit(2, samples, opts);
  const std::array<double, 2> h{std::sqrt(kde.bandwidth()[0]), std::sqrt(kde.bandwidth()[3])};

  HpdRegion r;
  r.dim = 2;
  r.level = level;
  r.nx = r.ny = resolution;
  for (int d = 0; d < 2; ++d) {
    double lo = samples[d], hi = samples[d];
    for (std::size_t i = 0; i < m; ++i) {
      lo = std::min(lo, samples[2 * i + d]);
      hi = std::max(hi, samples[2 * i + d]);
    }
    lo -= 3.0 * h[d];
    hi += 3.0 * h[d];
    // Long tails would leave the kernel narrower than a cell; fall back to
    // the central 99.8% of draws so the grid resolves the bulk.
    if ((hi - lo) / static_cast<double>(resolution - 1) > 0.5 * h[d]) {
      std::vector<double> col(m);
      for (std::size_t i = 0; i < m; ++i) col[i] = samples[2 * i + d];
      lo = std::max(lo, quantile(col, 0.001) - 3.0 * h[d]);
      hi = std::min(hi, quantile(col, 0.999) + 3.0 * h[d]);
    }
    r.origin[d] = lo;
    r.step[d] = (hi - lo) / static_cast<double>(resolution - 1);
  }

  // Linear binning onto grid nodes; draws off the grid are dropped from the
  // smoothed mass but still enter the threshold with density zero.
  std::vector<double> grid(r.nx * r.ny, 0.0);
  for (std::size_t s = 0; s < m; ++s) {
    const double fx = (samples[2 * s] - r.origin[0]) / r.step[0];
    const double fy = (samples[2 * s + 1] - r.origin[1]) / r.step[1];
    if (!(fx >= 0.0 && fy >= 0.0 && fx <= static_cast<double>(r.nx - 1) && fy <= static_cast<double>(r.ny - 1)))
      continue;
    const auto i = std::min(static_cast<std::size_t>(fx), r.nx - 2);
    const auto j = std::min(static_cast<std::size_t>(fy), r.ny - 2);
    const double tx = fx - static_cast<double>(i), ty = fy - static_cast<double>(j);
    grid[j * r.nx + i] += (1 - tx) * (1 - ty);
    grid[j * r.nx + i + 1] += tx * (1 - ty);
    grid[(j + 1) * r.nx + i] += (1 - tx) * ty;
    grid[(j + 1) * r.nx + i + 1] += tx * ty;
  }
  smooth_axis(grid, r.nx, r.ny, true, h[0] / r.step[0]);
  smooth_axis(grid, r.nx, r.ny, false, h[1] / r.step[1]);
  const double norm = 1.0 / (static_cast<double>(m) * r.step[0] * r.step[1]);
  for (auto& v : grid) v *= norm;
  r.grid_density = std::move(grid);

  std::vector<double> at_samples(m);
  for (std::size_t s = 0; s < m; ++s) at_samples[s] = r.density_at(samples[2 * s], samples[2 * s + 1]);
  std::sort(at_samples.begin(), at_samples.end());
  const auto k = static_cast<std::size_t>(std::ceil(level * static_cast<double>(m)));
  r.threshold = at_samples[m - k];

  r.mask.assign(r.nx * r.ny, 0);
  std::size_t cells = 0;
  for (std::size_t c = 0; c < r.mask.size(); ++c)
    if (r.grid_density[c] >= r.threshold && r.grid_density[c] > 0.0) {
      r.mask[c] = 1;
      ++cells;
    }
  r.area = static_cast<double>(cells) * r.step[0] * r.step[1];
  return r;
}

}  // namespace tabayes
