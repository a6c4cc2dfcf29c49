#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "tabayes/competitors.hpp"
#include "tabayes/data_gen.hpp"
#include "tabayes/empirical_likelihood.hpp"
#include "test_support.hpp"

using namespace tabayes;

namespace {

const NigParams kPrior{6.623, 60.442, 3.5, 1.0};

Dataset normal_data(std::size_t n, double mu, double var, std::uint64_t seed) {
  RngHandle r(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = sample_normal(mu, var, r);
  return Dataset::from_scalars(x);
}

double batch_se(const std::vector<double>& x, std::size_t batches = 100) {
  const std::size_t len = x.size() / batches;
  std::vector<double> means(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t i = b * len; i < (b + 1) * len; ++i) means[b] += x[i];
    means[b] /= static_cast<double>(len);
  }
  return test_support::sd(means) / std::sqrt(static_cast<double>(batches));
}

}  // namespace

TEST_CASE("BB mean is centred on the sample mean") {
  const Dataset data = normal_data(40, 1.0, 4.0, 1);
  RngHandle rng(1);
  const auto out = bb_posterior(data, FunctionalKind::mean(), 5000, rng);
  CHECK(out.method() == "bb");
  CHECK(out.size() == 5000);
  const auto m = out.column(0);
  const double x_bar = test_support::mean(data.column(0));
  CHECK(std::abs(test_support::mean(m) - x_bar) < 3.0 * test_support::sd(m) / std::sqrt(5000.0));
}

TEST_CASE("BB variance draws are nonnegative") {
  const Dataset data = normal_data(15, 0.0, 1.0, 2);
  RngHandle rng(2);
  const auto out = bb_posterior(data, FunctionalKind::variance(), 2000, rng);
  for (double v : out.column(0)) CHECK(v >= 0.0);
}

TEST_CASE("BB mean of two points is uniform") {
  const Dataset data = Dataset::from_scalars({0.0, 1.0});
  RngHandle rng(3);
  const auto out = bb_posterior(data, FunctionalKind::mean(), 4000, rng);
  const double ks = test_support::ks_one_sample(out.column(0), [](double x) { return std::clamp(x, 0.0, 1.0); });
  CHECK(ks < test_support::ks_critical_01(4000));
}

TEST_CASE("BB counts functional failures") {
  // Two observed atoms at one x make every linear fit singular.
  const Dataset data(3, {1.0, 1.0, 2.0, 1.0, 1.0, 3.0, 2.0, 0.0, 0.0});
  RngHandle rng(4);
  const auto out = bb_posterior(data, FunctionalKind::aipw_mean(), 10, rng, 5);
  CHECK(out.diagnostics().failed);
  CHECK(out.diagnostics().functional_failures > 0);
}

TEST_CASE("BEL never moves outside the hull") {
  const Dataset data = normal_data(10, 0.0, 1.0, 5);
  const auto x = data.column(0);
  RngHandle rng(5);
  const auto out = bel_posterior(data, kPrior, ChainSettings{4000, 500, 5}, rng);
  CHECK(out.method() == "bel");
  // The prior puts sigma2 near 10 against unit-variance data, so the first
  // proposal rarely lands in the hull and has to be widened.
  CHECK(out.diagnostics().restarts > 0);
  CHECK(out.diagnostics().acceptance_rate() > 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto d = out.draw(i);
    CHECK(d[1] > 0.0);
    const auto r = profile_el(x, d[0], d[1]);
    CHECK(r.in_hull);
  }
}

TEST_CASE("BEL posterior mean of mu concentrates at the sample mean") {
  const Dataset data = normal_data(200, 0.0, 1.0, 6);
  RngHandle rng(6);
  const auto out = bel_posterior(data, NigParams{2.0, 1.0, 0.0, 0.01}, ChainSettings{20000, 2000, 6}, rng);
  const auto mu = out.column(0);
  const double x_bar = test_support::mean(data.column(0));
  CHECK(std::abs(test_support::mean(mu) - x_bar) < 3.0 * batch_se(mu));
}

TEST_CASE("BEL with a flat prior matches the grid-normalized EL at n = 4") {
  const std::vector<double> x{-1.2, -0.3, 0.5, 1.4};
  const Dataset data = Dataset::from_scalars(x);
  const std::vector<double> mu_edges{-1.2, -0.5, 0.1, 0.7, 1.4};
  const std::vector<double> s2_edges{0.0, 0.6, 1.0, 1.5, 2.5, 8.0};
  const std::size_t nm = mu_edges.size() - 1;
  const std::size_t ns = s2_edges.size() - 1;

  // Cell masses by midpoint integration of R_n.
  std::vector<double> oracle(nm * ns, 0.0);
  constexpr int kSub = 60;
  double total = 0.0;
  for (std::size_t a = 0; a < nm; ++a) {
    for (std::size_t b = 0; b < ns; ++b) {
      const double dm = (mu_edges[a + 1] - mu_edges[a]) / kSub;
      const double ds = (s2_edges[b + 1] - s2_edges[b]) / kSub;
      double s = 0.0;
      for (int i = 0; i < kSub; ++i)
        for (int j = 0; j < kSub; ++j) {
          const auto r = profile_el(x, mu_edges[a] + (i + 0.5) * dm, s2_edges[b] + (j + 0.5) * ds);
          if (r.in_hull) s += std::exp(r.log_r);
        }
      oracle[a * ns + b] = s * dm * ds;
      total += oracle[a * ns + b];
    }
  }
  for (double& v : oracle) v /= total;

  RngHandle rng(7);
  BelSettings settings;
  settings.flat_prior = true;
  const auto out = bel_posterior(data, NigParams{2.0, 2.0, 0.0, 0.1}, ChainSettings{200000, 5000, 7}, rng, settings);
  REQUIRE_FALSE(out.diagnostics().failed);
  for (std::size_t a = 0; a < nm; ++a) {
    for (std::size_t b = 0; b < ns; ++b) {
      std::vector<double> hit(out.size());
      for (std::size_t i = 0; i < out.size(); ++i) {
        const auto d = out.draw(i);
        hit[i] = d[0] >= mu_edges[a] && d[0] < mu_edges[a + 1] && d[1] >= s2_edges[b] && d[1] < s2_edges[b + 1];
      }
      const double p = test_support::mean(hit);
      const double se = std::max(batch_se(hit), 1e-4);
      INFO("cell " << a << "," << b << " mh " << p << " grid " << oracle[a * ns + b]);
      CHECK(std::abs(p - oracle[a * ns + b]) < 3.0 * se);
    }
  }
}

TEST_CASE("BEL proposal is the scaled conjugate posterior") {
  const Dataset data = Dataset::from_scalars({1.0, 2.0, 3.0, 6.0});
  const NigParams prior{3.0, 4.0, 0.0, 2.0};
  const NigParams p = bel_proposal(data, prior, 0.25);
  // kappa_n = 6, mu_n = 12 / 6, alpha_n = 5, beta_n = 4 + 14/2 + 2*4*9/(2*6).
  CHECK(p.kappa == doctest::Approx(6.0));
  CHECK(p.mu0 == doctest::Approx(2.0));
  CHECK(p.alpha == doctest::Approx(0.25 * 5.0));
  CHECK(p.beta == doctest::Approx(0.25 * (4.0 + 7.0 + 6.0)));
}

TEST_CASE("GB draws have positive variance") {
  RngHandle rng(8);
  const Dataset data = gen_meanvar(30, rng);
  const auto out = gb_posterior(data, kPrior, ChainSettings{5000, 500, 8}, rng);
  CHECK(out.method() == "gb");
  for (double v : out.column(1)) CHECK(v > 0.0);
  CHECK(out.diagnostics().acceptance_rate() > 0.0);
}

TEST_CASE("GB loss is stationary at the sample moments") {
  const Dataset data = normal_data(50, 3.0, 9.0, 9);
  const GbSpec spec = GbSpec::from_data(data, kPrior);
  const double m1 = spec.proposal_mean[0];
  const double m2 = spec.proposal_mean[1];
  const auto x = data.column(0);
  double s1 = 0.0, s2 = 0.0;
  for (double v : x) {
    s1 += v;
    s2 += v * v;
  }
  CHECK(m1 == doctest::Approx(s1 / 50.0).epsilon(1e-14));
  CHECK(m2 == doctest::Approx(s2 / 50.0).epsilon(1e-14));
  const double h = 1e-4;
  const double g1 = (gb_loss(data, spec.tuning, m1 + h, m2) - gb_loss(data, spec.tuning, m1 - h, m2)) / (2.0 * h);
  const double g2 = (gb_loss(data, spec.tuning, m1, m2 + h) - gb_loss(data, spec.tuning, m1, m2 - h)) / (2.0 * h);
  CHECK(std::abs(g1) < 1e-6);
  CHECK(std::abs(g2) < 1e-6);
  // C is half the inverse sample covariance.
  CHECK((2.0 * spec.tuning * spec.proposal_cov * 50.0 - Eigen::Matrix2d::Identity()).norm() < 1e-10);
}

TEST_CASE("GB prior change of variables has unit Jacobian") {
  for (int i = -5; i <= 5; ++i)
    for (int j = 1; j <= 10; ++j) {
      const double m1 = 0.7 * i;
      const double m2 = m1 * m1 + 1.3 * j;
      const double diff = std::exp(gb_log_prior(m1, m2, kPrior)) - std::exp(nig_log_density(m1, m2 - m1 * m1, kPrior));
      CHECK(std::abs(diff) < 1e-14);
    }
  CHECK(gb_log_prior(2.0, 3.0, kPrior) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("GB rejects a singular covariance") {
  const Dataset data = Dataset::from_scalars({1.0, 1.0, 1.0, 1.0});
  RngHandle rng(10);
  CHECK_THROWS(gb_posterior(data, kPrior, ChainSettings{100, 10, 10}, rng));
  const Dataset two_points = Dataset::from_scalars({0.0, 1.0, 0.0, 1.0});
  CHECK_THROWS(GbSpec::from_data(two_points, kPrior));
}

TEST_CASE("competitors need three observations") {
  const Dataset data = Dataset::from_scalars({1.0, 2.0});
  RngHandle rng(11);
  CHECK_THROWS(bel_posterior(data, kPrior, ChainSettings{100, 10, 11}, rng));
  CHECK_THROWS(gb_posterior(data, kPrior, ChainSettings{100, 10, 11}, rng));
}

TEST_CASE("three methods stay in a sanity envelope around the true mean") {
  std::array<int, 3> inside{0, 0, 0};
  constexpr int kReplicates = 100;
  for (int r = 0; r < kReplicates; ++r) {
    RngHandle data_rng(1000 + r);
    const Dataset data = gen_meanvar(50, data_rng);
    RngHandle rng(2000 + r);
    const std::array<PosteriorSamples, 3> outs{bb_posterior(data, FunctionalKind::mean_var(), 2000, rng),
                                               bel_posterior(data, kPrior, ChainSettings{3000, 500, 0}, rng),
                                               gb_posterior(data, kPrior, ChainSettings{3000, 500, 0}, rng)};
    for (std::size_t k = 0; k < 3; ++k) {
      const auto mu = outs[k].column(0);
      if (std::abs(test_support::mean(mu) - kMeanvarTrueMean) < 4.0 * test_support::sd(mu)) ++inside[k];
    }
  }
  for (int c : inside) CHECK(c >= 95);
}
