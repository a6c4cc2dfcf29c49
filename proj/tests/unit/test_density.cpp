#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "tabayes/density.hpp"
#include "tabayes/distributions.hpp"
#include "tabayes/rng.hpp"

using namespace tabayes;

namespace {

std::vector<double> normal_samples(std::size_t n, double mu, double var, RngHandle& r) {
  std::vector<double> v(n);
  for (auto& x : v) x = sample_normal(mu, var, r);
  return v;
}

double integrate_1d(const DensityModel& m, double lo, double hi, int steps = 20000) {
  const double dx = (hi - lo) / steps;
  double s = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double x = lo + (i + 0.5) * dx;
    s += m.density(std::span<const double>(&x, 1));
  }
  return s * dx;
}

}  // namespace

TEST_CASE("1-d Silverman fit recovers the standard normal density at zero") {
  RngHandle r(1);
  const auto v = normal_samples(10000, 0.0, 1.0, r);
  const auto m = DensityModel::fit(1, v, {});
  const double zero = 0.0;
  CHECK(std::abs(m.density(std::span<const double>(&zero, 1)) - 0.3989) < 0.02);
  const double h = std::sqrt(m.bandwidth()[0]);
  CHECK(h == doctest::Approx(0.9 * std::pow(10000.0, -0.2)).epsilon(0.05));
}

TEST_CASE("densities integrate to one over six standard deviations") {
  RngHandle r(2);
  for (auto rule : {BandwidthRule::Silverman, BandwidthRule::PluginDiagonal}) {
    const auto v = normal_samples(2000, 3.0, 4.0, r);
    const auto m = DensityModel::fit(1, v, {rule, {}, {}, 0});
    CHECK(std::abs(integrate_1d(m, 3.0 - 12.0, 3.0 + 12.0) - 1.0) < 0.01);
  }
  // 2-d, with one log-scale coordinate integrated in original units.
  std::vector<double> s;
  for (int i = 0; i < 2000; ++i) {
    s.push_back(sample_normal(0.0, 1.0, r));
    s.push_back(std::exp(sample_normal(1.0, 0.09, r)));
  }
  const auto m2 = DensityModel::fit(2, s, {BandwidthRule::PluginDiagonal, {}, {false, true}, 0});
  const int nx = 300, ny = 600;
  const double dx = 12.0 / nx, dy = 12.0 / ny;
  double total = 0.0;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const double p[2] = {-6.0 + (i + 0.5) * dx, (j + 0.5) * dy};
      total += m2.density(p);
    }
  CHECK(std::abs(total * dx * dy - 1.0) < 0.01);
}

TEST_CASE("degenerate inputs are rejected") {
  std::vector<double> same(100, 2.5);
  CHECK_THROWS(DensityModel::fit(1, same, {}));
  std::vector<double> few{1, 2, 3, 4, 5};
  CHECK_THROWS(DensityModel::fit(1, few, {}));
  std::vector<double> bad{1, 2, 3, 4, 5, 6, 7, 8, 9, NAN};
  CHECK_THROWS(DensityModel::fit(1, bad, {}));
  std::vector<double> neg{1, 2, 3, 4, 5, 6, 7, 8, 9, -1};
  CHECK_THROWS(DensityModel::fit(1, neg, {BandwidthRule::Silverman, {}, {true}, 0}));
  std::vector<double> ok{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto m = DensityModel::fit(1, ok, {});
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS(m.log_density(std::span<const double>(&inf, 1)));
  CHECK_THROWS(DensityModel::fit(1, ok, {BandwidthRule::Explicit, {-1.0}, {}, 0}));
  CHECK_THROWS(DensityModel::fit(2, std::vector<double>(40, 1.0), {}));
}

TEST_CASE("unimodal argmax sits at the sample mean") {
  RngHandle r(3);
  const auto v = normal_samples(20000, 2.0, 1.0, r);
  const auto m = DensityModel::fit(1, v, {});
  double best = -1e300, arg = 0.0;
  const double step = 0.25;
  for (double x = -2.0; x <= 6.0; x += step) {
    const double ld = m.log_density(std::span<const double>(&x, 1));
    if (ld > best) {
      best = ld;
      arg = x;
    }
  }
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  CHECK(std::abs(arg - mean) <= step);
}

TEST_CASE("symmetric samples give a symmetric density") {
  RngHandle r(4);
  std::vector<double> v;
  for (int i = 0; i < 500; ++i) {
    const double x = sample_normal(0.0, 2.0, r);
    v.push_back(x);
    v.push_back(-x);
  }
  const auto m = DensityModel::fit(1, v, {});
  for (double a : {0.1, 0.7, 2.0, 5.5}) {
    const double na = -a;
    CHECK(std::abs(m.log_density(std::span<const double>(&a, 1)) - m.log_density(std::span<const double>(&na, 1))) <
          1e-12);
  }
}

TEST_CASE("far tails stay finite") {
  RngHandle r(5);
  const auto v = normal_samples(1000, 0.0, 1.0, r);
  const auto m = DensityModel::fit(1, v, {});
  const double far = 50.0;
  const double ld = m.log_density(std::span<const double>(&far, 1));
  CHECK(std::isfinite(ld));
  CHECK(ld < -1000.0);
  // Closed form: dominated by the nearest kernel.
  double xmax = -1e300;
  for (double x : v) xmax = std::max(xmax, x);
  const double h2 = m.bandwidth()[0];
  const double nearest = -0.5 * (far - xmax) * (far - xmax) / h2 - 0.5 * std::log(2 * M_PI * h2) - std::log(1000.0);
  CHECK(ld >= nearest - 1e-9);
  CHECK(ld <= nearest + std::log(1000.0) + 1e-9);

  std::vector<double> s2;
  for (int i = 0; i < 500; ++i) {
    s2.push_back(sample_normal(0.0, 1.0, r));
    s2.push_back(sample_normal(0.0, 1.0, r));
  }
  const auto m2 = DensityModel::fit(2, s2, {});
  const double p[2] = {60.0, -70.0};
  CHECK(std::isfinite(m2.log_density(p)));
}

TEST_CASE("property: log density is finite everywhere") {
  RngHandle r(6);
  const auto v = normal_samples(300, 0.0, 1.0, r);
  const auto m = DensityModel::fit(1, v, {});
  for (double x = -300.0; x <= 300.0; x += 0.37) {
    const double ld = m.log_density(std::span<const double>(&x, 1));
    CHECK(std::isfinite(ld));
    // exp underflows in double far out; within range it stays positive.
    if (std::abs(x) < 8.0) CHECK(m.density(std::span<const double>(&x, 1)) > 0.0);
  }
}

TEST_CASE("log-scale coordinate: Jacobian and non-positive values") {
  RngHandle r(7);
  std::vector<double> v(4000);
  for (auto& x : v) x = std::exp(sample_normal(0.0, 0.25, r));
  const auto m = DensityModel::fit(1, v, {BandwidthRule::Silverman, {}, {true}, 0});
  CHECK(std::abs(integrate_1d(m, 1e-6, 15.0, 60000) - 1.0) < 0.01);
  const double zero = 0.0;
  CHECK(m.log_density(std::span<const double>(&zero, 1)) == -std::numeric_limits<double>::infinity());
  // Lognormal density at 1 is 1 / sqrt(2 pi 0.25).
  const double one = 1.0;
  CHECK(m.density(std::span<const double>(&one, 1)) == doctest::Approx(1.0 / std::sqrt(2 * M_PI * 0.25)).epsilon(0.05));
}

TEST_CASE("tabulated evaluation matches the exact KDE") {
  RngHandle r(8);
  std::vector<double> s;
  for (int i = 0; i < 3000; ++i) {
    s.push_back(sample_normal(1.0, 4.0, r));
    s.push_back(std::exp(sample_normal(2.0, 0.5, r)));
  }
  const KdeOptions opts{BandwidthRule::PluginDiagonal, {}, {false, true}, 256};
  const auto m = DensityModel::fit(2, s, opts);
  CHECK(m.tabulated());
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double p[2] = {sample_normal(1.0, 4.0, r), std::exp(sample_normal(2.0, 0.5, r))};
    worst = std::max(worst, std::abs(m.log_density(p) - m.log_density_exact(p)));
  }
  CHECK(worst < 5e-3);
  const double off[2] = {40.0, 1e6};
  CHECK(m.log_density(off) == doctest::Approx(m.log_density_exact(off)).epsilon(1e-12));

  std::vector<double> v(3000);
  for (auto& x : v) x = sample_normal(0.0, 1.0, r);
  const auto m1 = DensityModel::fit(1, v, {BandwidthRule::Silverman, {}, {}, 512});
  for (double x = -3.0; x <= 3.0; x += 0.013)
    CHECK(std::abs(m1.log_density(std::span<const double>(&x, 1)) - m1.log_density_exact(std::span<const double>(&x, 1))) <
          1e-3);
}

TEST_CASE("explicit 2-d bandwidth with correlation") {
  RngHandle r(9);
  std::vector<double> s;
  for (int i = 0; i < 200; ++i) {
    s.push_back(sample_normal(0.0, 1.0, r));
    s.push_back(sample_normal(0.0, 1.0, r));
  }
  const auto m = DensityModel::fit(2, s, {BandwidthRule::Explicit, {0.2, 0.05, 0.05, 0.3}, {}, 0});
  CHECK(m.bandwidth()[1] == 0.05);
  // Direct mixture evaluation.
  const double p[2] = {0.3, -0.2};
  const double det = 0.2 * 0.3 - 0.05 * 0.05;
  long double acc = 0;
  for (int i = 0; i < 200; ++i) {
    const double dx = p[0] - s[2 * i], dy = p[1] - s[2 * i + 1];
    const double q = (0.3 * dx * dx - 2 * 0.05 * dx * dy + 0.2 * dy * dy) / det;
    acc += std::exp(-0.5 * q) / (2 * M_PI * std::sqrt(det));
  }
  CHECK(m.density(p) == doctest::Approx(static_cast<double>(acc / 200)).epsilon(1e-10));
  CHECK_THROWS(DensityModel::fit(2, s, {BandwidthRule::Explicit, {0.2, 0.5, 0.5, 0.3}, {}, 0}));
}

TEST_CASE("property: doubling the sample does not increase integrated error (sign test)") {
  RngHandle r(10);
  auto iae = [](const DensityModel& m) {
    double e = 0.0;
    const double dx = 0.02;
    for (double x = -6.0; x <= 6.0; x += dx)
      e += std::abs(m.density(std::span<const double>(&x, 1)) - std::exp(-0.5 * x * x) / std::sqrt(2 * M_PI)) * dx;
    return e;
  };
  int better = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const auto big = normal_samples(800, 0.0, 1.0, r);
    const std::vector<double> small(big.begin(), big.begin() + 400);
    if (iae(DensityModel::fit(1, big, {})) <= iae(DensityModel::fit(1, small, {}))) ++better;
  }
  // One-sided sign test at about the 2% level.
  CHECK(better >= 15);
}

TEST_CASE("tabulated log density agrees with exact evaluation in the bulk") {
  RngHandle r(21);
  std::vector<double> s;
  for (int i = 0; i < 20000; ++i) {
    s.push_back(sample_normal(3.0, 4.0, r));
    s.push_back(1.0 / sample_gamma(4.0, 30.0, r));
  }
  KdeOptions opts;
  opts.log_scale = {false, true};
  opts.table_points = 256;
  const auto m = DensityModel::fit(2, s, opts);
  REQUIRE(m.tabulated());
  double worst = 0.0;
  for (std::size_t i = 0; i < 2000; ++i) {
    const std::span<const double> p(&s[2 * i], 2);
    worst = std::max(worst, std::abs(m.log_density(p) - m.log_density_exact(p)));
  }
  INFO("max log-density gap " << worst);
  CHECK(worst < 5e-3);
}
