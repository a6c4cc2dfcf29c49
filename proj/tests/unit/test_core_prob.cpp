#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "tabayes/distributions.hpp"
#include "tabayes/rng.hpp"
#include "test_support.hpp"

using namespace tabayes;
using test_support::mean;

TEST_CASE("rng: identical seeds give identical streams, children differ") {
  RngHandle a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  RngHandle c0 = RngHandle(42).child(0), c1 = RngHandle(42).child(1), c0b = RngHandle(42).child(0);
  CHECK(c0.seed() != c1.seed());
  CHECK(c0() == c0b());
  std::set<std::uint64_t> firsts;
  for (std::uint64_t i = 0; i < 1000; ++i) firsts.insert(RngHandle(7).child(i)());
  CHECK(firsts.size() == 1000);
}

TEST_CASE("rng: uniform stays in the open unit interval") {
  RngHandle r(1);
  double lo = 1.0, hi = 0.0, s = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    s += u;
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(s / 1e5 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("sample_normal") {
  RngHandle r(3);
  CHECK(sample_normal(5.0, 0.0, r) == 5.0);
  std::vector<double> v(100000);
  for (auto& x : v) x = sample_normal(3.5, 4.0, r);
  CHECK(std::abs(mean(v) - 3.5) < 0.02);
  CHECK(test_support::sd(v) == doctest::Approx(2.0).epsilon(0.01));
  CHECK_THROWS_AS(sample_normal(0.0, -1.0, r), std::invalid_argument);
}

TEST_CASE("sample_dirichlet") {
  RngHandle r(4);
  const std::vector<double> one{1.0};
  CHECK(sample_dirichlet(one, r) == std::vector<double>{1.0});

  const std::vector<double> big{1e6, 1e6};
  for (int i = 0; i < 100; ++i) {
    const auto w = sample_dirichlet(big, r);
    CHECK(w[0] > 0.499);
    CHECK(w[0] < 0.501);
  }

  const std::vector<double> three{1.0, 1.0, 1.0};
  double m[3] = {0, 0, 0};
  for (int i = 0; i < 100000; ++i) {
    const auto w = sample_dirichlet(three, r);
    for (int j = 0; j < 3; ++j) m[j] += w[j];
  }
  for (double x : m) CHECK(std::abs(x / 1e5 - 1.0 / 3.0) < 0.005);

  CHECK_THROWS(sample_dirichlet(std::vector<double>{}, r));
  CHECK_THROWS(sample_dirichlet(std::vector<double>{1.0, 0.0}, r));
  CHECK_THROWS(sample_dirichlet(std::vector<double>{1.0, -2.0}, r));
}

TEST_CASE("property: dirichlet draws lie in the simplex") {
  RngHandle r(5);
  for (int rep = 0; rep < 2000; ++rep) {
    const std::size_t k = 1 + static_cast<std::size_t>(r.uniform() * 30);
    std::vector<double> alpha(k);
    for (auto& a : alpha) a = std::exp(-6.0 + 10.0 * r.uniform());  // 0.0025 .. 55
    const auto w = sample_dirichlet(alpha, r);
    double s = 0.0;
    for (double x : w) {
      CHECK(x >= 0.0);
      CHECK(x <= 1.0);
      s += x;
    }
    CHECK(std::abs(s - 1.0) < 1e-12);
  }
}

TEST_CASE("nig_log_density integrates to one") {
  const NigParams p{6.623, 60.442, 3.5, 1.0};
  // Midpoint rule; the sigma2 integrand vanishes at 0 faster than any power.
  const int nm = 1000, ns = 2400;
  const double dm = 50.0 / nm, ds = 120.0 / ns;
  double total = 0.0;
  for (int i = 0; i < nm; ++i)
    for (int j = 0; j < ns; ++j) total += std::exp(nig_log_density(-20.0 + (i + 0.5) * dm, (j + 0.5) * ds, p));
  CHECK(std::abs(total * dm * ds - 1.0) < 0.01);
}

TEST_CASE("nig_log_density boundary and parameter checks") {
  const NigParams p{6.623, 60.442, 3.5, 1.0};
  CHECK(nig_log_density(1.0, 0.0, p) == -std::numeric_limits<double>::infinity());
  CHECK(nig_log_density(1.0, -2.0, p) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS(nig_log_density(1.0, 1.0, NigParams{-1.0, 1.0, 0.0, 1.0}));
  CHECK_THROWS(nig_log_density(1.0, 1.0, NigParams{1.0, 0.0, 0.0, 1.0}));
}

TEST_CASE("nig_log_density matches the gamma change of variables") {
  // Independent evaluation: tau = 1/sigma2 ~ Gamma(a, rate b), |d tau / d sigma2| = sigma2^-2.
  const NigParams p{6.623, 60.442, 3.5, 1.0};
  for (double mu : {-3.0, 3.5, 9.0})
    for (double s2 : {2.0, 10.0, 40.0}) {
      const double tau = 1.0 / s2;
      const double log_gamma = p.alpha * std::log(p.beta) - std::lgamma(p.alpha) + (p.alpha - 1) * std::log(tau) - p.beta * tau;
      const double log_normal = -0.5 * std::log(2 * M_PI * s2) - 0.5 * (mu - p.mu0) * (mu - p.mu0) / s2;
      CHECK(nig_log_density(mu, s2, p) == doctest::Approx(log_gamma - 2 * std::log(s2) + log_normal).epsilon(1e-12));
    }
}

TEST_CASE("marginal prior mean of sigma2 is beta / (alpha - 1)") {
  const NigParams p{6.623, 60.442, 3.5, 1.0};
  RngHandle r(8);
  std::vector<double> s2(100000), mu(100000);
  for (std::size_t i = 0; i < s2.size(); ++i) std::tie(mu[i], s2[i]) = sample_nig(p, r);
  const double expected = 60.442 / 5.623;
  CHECK(expected == doctest::Approx(10.749).epsilon(1e-4));
  // sd of sigma2 is about 5, so the Monte Carlo SE is about 0.016.
  CHECK(std::abs(mean(s2) - expected) < 0.06);
  CHECK(std::abs(mean(mu) - 3.5) < 0.05);
}

TEST_CASE("sample_gamma and sample_bernoulli") {
  RngHandle r(9);
  std::vector<double> g(100000);
  for (auto& x : g) x = sample_gamma(6.623, 60.442, r);
  CHECK(std::abs(mean(g) - 0.1096) < 0.002);
  CHECK_THROWS(sample_gamma(-1.0, 1.0, r));
  CHECK_THROWS(sample_gamma(1.0, 0.0, r));
  for (int i = 0; i < 100; ++i) {
    CHECK(sample_bernoulli(0.0, r) == 0);
    CHECK(sample_bernoulli(1.0, r) == 1);
  }
  CHECK_THROWS(sample_bernoulli(1.5, r));
  // Small shapes go through the boosted path.
  std::vector<double> small(100000);
  for (auto& x : small) x = sample_gamma(0.1, 2.0, r);
  CHECK(std::abs(mean(small) - 0.05) < 0.003);
}

TEST_CASE("sample_beta_one has the Beta(1, b) law") {
  RngHandle r(10);
  std::vector<double> v(20000);
  for (auto& x : v) x = sample_beta_one(0.5, r);
  const double d = test_support::ks_one_sample(v, [](double x) { return 1.0 - std::pow(1.0 - x, 0.5); });
  CHECK(d < test_support::ks_critical_01(v.size()));
}

TEST_CASE("discretize") {
  CHECK(discretize(0.4, 1.0) == 0.0);
  CHECK(discretize(3.1415926, 1e-5) == doctest::Approx(3.14159).epsilon(1e-12));
  CHECK(discretize(0.5, 1.0) == 0.0);
  CHECK(discretize(1.5, 1.0) == 2.0);
  CHECK(discretize(-2.5, 1.0) == -2.0);
  CHECK_THROWS(discretize(std::numeric_limits<double>::quiet_NaN(), 1.0));
  CHECK_THROWS(discretize(std::numeric_limits<double>::infinity(), 1.0));
  CHECK_THROWS(discretize(1.0, 0.0));
}

TEST_CASE("property: discretize is idempotent and lands on the lattice") {
  RngHandle r(11);
  for (int i = 0; i < 10000; ++i) {
    const double h = std::pow(10.0, -1.0 - 5.0 * r.uniform());
    const double x = sample_normal(0.0, 100.0, r);
    const double d = discretize(x, h);
    CHECK(discretize(d, h) == d);
    CHECK(std::abs(d - x) <= 0.5 * h * (1 + 1e-9));
    CHECK(std::abs(d / h - std::nearbyint(d / h)) < 1e-6);
  }
}

TEST_CASE("discretized base draws are lattice points") {
  DiscretizedBase base{0.0, 100.0, 1e-5};
  RngHandle r(12);
  std::vector<double> v(20000);
  for (auto& x : v) {
    x = base.sample(r);
    CHECK(std::abs(x / 1e-5 - std::nearbyint(x / 1e-5)) < 1e-6);
  }
  CHECK(std::abs(mean(v)) < 0.25);
  CHECK_THROWS((DiscretizedBase{0.0, 1.0, 0.0}.validate()));
  CHECK_THROWS((DiscretizedBase{0.0, -1.0, 1e-5}.validate()));
}
