#include "tabayes/discrete_measure.hpp"

#include <cmath>
#include <stdexcept>

namespace tabayes {

Dataset::Dataset(std::size_t dim, std::vector<double> values) : dim_(dim), values_(std::move(values)) {
  if (dim_ == 0) throw std::invalid_argument("Dataset: dimension must be positive");
  if (values_.size() % dim_ != 0) throw std::invalid_argument("Dataset: value count is not a multiple of dim");
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("Dataset: values must be finite");
}

Dataset Dataset::from_scalars(std::vector<double> values) { return Dataset(1, std::move(values)); }

std::vector<double> Dataset::column(std::size_t j) const {
  if (j >= dim_) throw std::out_of_range("Dataset::column");
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i * dim_ + j];
  return out;
}

DiscreteMeasure::DiscreteMeasure(std::size_t dim, std::vector<double> atoms, std::vector<double> weights)
    : dim_(dim), atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (dim_ == 0) throw std::invalid_argument("DiscreteMeasure: dimension must be positive");
  if (weights_.empty()) throw std::invalid_argument("DiscreteMeasure: needs at least one atom");
  if (atoms_.size() != weights_.size() * dim_) throw std::invalid_argument("DiscreteMeasure: atom/weight size mismatch");
  for (double a : atoms_)
    if (!std::isfinite(a)) throw std::invalid_argument("DiscreteMeasure: atoms must be finite");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("DiscreteMeasure: weights must be >= 0");
    total += w;
  }
  if (std::abs(total - 1.0) > kWeightTolerance) throw std::invalid_argument("DiscreteMeasure: weights must sum to one");
}

DiscreteMeasure DiscreteMeasure::normalized(std::size_t dim, std::vector<double> atoms, std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0) || !std::isfinite(total)) throw std::invalid_argument("DiscreteMeasure: total weight must be positive");
  for (double& w : weights) w /= total;
  return DiscreteMeasure(dim, std::move(atoms), std::move(weights));
}

DiscreteMeasure DiscreteMeasure::empirical(const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("DiscreteMeasure::empirical: empty data");
  const std::size_t n = data.size();
  return DiscreteMeasure(data.dim(), std::vector<double>(data.values().begin(), data.values().end()),
                         std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

}  // namespace tabayes
