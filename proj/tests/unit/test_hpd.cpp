#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "tabayes/distributions.hpp"
#include "tabayes/hpd.hpp"
#include "test_support.hpp"

using namespace tabayes;

namespace {

std::vector<double> normal_pairs(std::size_t m, std::uint64_t seed, double rho = 0.0) {
  RngHandle rng(seed);
  std::vector<double> out(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    const double a = sample_normal(0.0, 1.0, rng);
    const double b = sample_normal(0.0, 1.0, rng);
    out[2 * i] = a;
    out[2 * i + 1] = rho * a + std::sqrt(1.0 - rho * rho) * b;
  }
  return out;
}

double fraction_inside(const HpdRegion& r, const std::vector<double>& s) {
  std::size_t in = 0;
  const std::size_t m = s.size() / 2;
  for (std::size_t i = 0; i < m; ++i) in += r.contains(std::span<const double>(&s[2 * i], 2));
  return static_cast<double>(in) / static_cast<double>(m);
}

}  // namespace

TEST_CASE("1-d HPD of uniform draws") {
  RngHandle rng(1);
  std::vector<double> u(100000);
  for (auto& v : u) v = rng.uniform();
  const HpdRegion r = hpd_1d(u, 0.95);
  CHECK(std::abs(r.size() - 0.95) < 0.01);
  CHECK(r.dim == 1);
}

TEST_CASE("1-d HPD of normal draws") {
  RngHandle rng(2);
  std::vector<double> x(100000);
  for (auto& v : x) v = sample_normal(0.0, 1.0, rng);
  const HpdRegion r = hpd_1d(x, 0.95);
  CHECK(std::abs(r.lower + 1.96) < 0.05);
  CHECK(std::abs(r.upper - 1.96) < 0.05);
  const double inside = static_cast<double>(std::count_if(x.begin(), x.end(), [&](double v) {
                          return r.contains(std::span<const double>(&v, 1));
                        })) /
                        static_cast<double>(x.size());
  CHECK(inside >= 0.95);
}

TEST_CASE("1-d HPD of identical draws") {
  const std::vector<double> x(200, 2.5);
  const HpdRegion r = hpd_1d(x, 0.95);
  CHECK(r.size() == 0.0);
  const double v = 2.5;
  CHECK(r.contains(std::span<const double>(&v, 1)));
}

TEST_CASE("1-d HPD needs 100 draws and a valid level") {
  const std::vector<double> x(99, 1.0);
  CHECK_THROWS(hpd_1d(x, 0.95));
  const std::vector<double> y(100, 1.0);
  CHECK_THROWS(hpd_1d(y, 0.0));
  CHECK_THROWS(hpd_1d(y, 1.5));
}

TEST_CASE("1-d HPD contains the histogram mode bin") {
  RngHandle rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(5000);
    const double shape = 1.0 + trial;
    for (auto& v : x) v = sample_gamma(shape, 1.0, rng);
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    const double width = (*hi - *lo) / 50.0;
    std::vector<int> counts(50, 0);
    for (double v : x) ++counts[std::min<std::size_t>(49, static_cast<std::size_t>((v - *lo) / width))];
    const auto mode = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    const double centre = *lo + (static_cast<double>(mode) + 0.5) * width;
    const HpdRegion r = hpd_1d(x, 0.95);
    CHECK(r.lower <= centre);
    CHECK(centre <= r.upper);
  }
}

TEST_CASE("2-d HPD area of a standard normal cloud") {
  const auto s = normal_pairs(100000, 4);
  const HpdRegion r = hpd_2d(s, 0.95);
  CHECK(r.dim == 2);
  CHECK(std::abs(r.area - std::numbers::pi * 5.991) < 0.8);
  CHECK(fraction_inside(r, s) >= 0.95);
}

TEST_CASE("2-d HPD at level near one holds every draw") {
  const auto s = normal_pairs(2000, 5, 0.6);
  const HpdRegion r = hpd_2d(s, 1.0 - 1e-9);
  CHECK(fraction_inside(r, s) == 1.0);
}

TEST_CASE("2-d HPD holds the mean of a unimodal cloud") {
  RngHandle rng(6);
  std::vector<double> s;
  for (int i = 0; i < 20000; ++i) {
    s.push_back(sample_normal(3.5, 1.0, rng));
    s.push_back(sample_gamma(4.0, 0.5, rng));
  }
  const HpdRegion r = hpd_2d(s, 0.95);
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < s.size(); i += 2) {
    m0 += s[i];
    m1 += s[i + 1];
  }
  const double centre[2] = {m0 / 20000.0, m1 / 20000.0};
  CHECK(r.contains(centre));
  CHECK(fraction_inside(r, s) >= 0.95);
}

TEST_CASE("2-d HPD area grows with the level") {
  const auto s = normal_pairs(5000, 7, -0.3);
  double prev = 0.0;
  for (double level : {0.5, 0.7, 0.8, 0.9, 0.95, 0.99}) {
    const HpdRegion r = hpd_2d(s, level);
    CHECK(r.area >= prev);
    CHECK(r.area >= 0.0);
    prev = r.area;
  }
}

TEST_CASE("2-d HPD mask and area agree") {
  const auto s = normal_pairs(3000, 8);
  const HpdRegion r = hpd_2d(s, 0.9, 80);
  CHECK(r.nx == 80);
  CHECK(r.ny == 80);
  std::size_t cells = 0;
  for (auto m : r.mask) cells += m;
  CHECK(r.area == doctest::Approx(static_cast<double>(cells) * r.step[0] * r.step[1]));
  CHECK(r.density_at(1e6, 0.0) == 0.0);
}

TEST_CASE("2-d HPD errors") {
  CHECK_THROWS(hpd_2d(normal_pairs(499, 9), 0.95));
  std::vector<double> flat = normal_pairs(1000, 10);
  for (std::size_t i = 1; i < flat.size(); i += 2) flat[i] = 1.0;
  CHECK_THROWS(hpd_2d(flat, 0.95));
  CHECK_THROWS(hpd_2d(normal_pairs(1000, 11), 0.95, 5));
}
