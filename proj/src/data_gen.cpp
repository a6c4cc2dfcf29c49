#include "tabayes/data_gen.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tabayes/distributions.hpp"

namespace tabayes {

Dataset gen_meanvar(std::size_t n, RngHandle& rng) {
  if (n == 0) throw std::invalid_argument("gen_meanvar: n must be positive");
  std::vector<double> x(n);
  for (auto& v : x) {
    const int z = sample_bernoulli(0.25, rng);
    v = -6.0 * z + sample_normal(5.0, 4.0, rng);
  }
  return Dataset::from_scalars(std::move(x));
}

Dataset gen_mar(int model_id, std::size_t n, RngHandle& rng) {
  if (model_id < 1 || model_id > 4) throw std::invalid_argument("gen_mar: model id must be in 1..4");
  if (n == 0) throw std::invalid_argument("gen_mar: n must be positive");
  const bool quadratic = model_id == 2 || model_id == 4;
  const bool probit = model_id >= 3;
  std::vector<double> rows;
  rows.reserve(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = sample_normal(10.0, 100.0, rng);
    const double e = sample_normal(0.0, 4.0, rng);
    const double y = quadratic ? 0.006 * (x * x + 40.0 * x + 400.0) + e : 1.0 + 0.5 * x + e;
    const double u = (x - 10.0) / 10.0;
    const double p = probit ? normal_cdf(u) : 1.0 / (1.0 + std::exp(-u));
    const int c = sample_bernoulli(p, rng);
    rows.push_back(x);
    rows.push_back(c);
    rows.push_back(c == 1 ? y : 0.0);
  }
  return Dataset(3, std::move(rows));
}

}  // namespace tabayes
