#ifndef TABAYES_DISCRETE_MEASURE_HPP
#define TABAYES_DISCRETE_MEASURE_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace tabayes {

/// Observed data: n points in R^dim, stored row-major.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t dim, std::vector<double> values);

  static Dataset from_scalars(std::vector<double> values);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : values_.size() / dim_; }
  bool empty() const noexcept { return values_.empty(); }

  std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
  std::span<const double> values() const noexcept { return values_; }

  /// Column j as a vector.
  std::vector<double> column(std::size_t j) const;

 private:
  std::size_t dim_ = 1;
  std::vector<double> values_;
};

/// Finitely supported probability measure on R^dim.
///
/// Invariants: at least one atom, finite atoms, non-negative weights summing
/// to one within 1e-10. Immutable after construction.
class DiscreteMeasure {
 public:
  static constexpr double kWeightTolerance = 1e-10;

  /// Validates; throws std::invalid_argument when an invariant fails.
  DiscreteMeasure(std::size_t dim, std::vector<double> atoms, std::vector<double> weights);

  /// Rescales non-negative weights to sum to one before validating.
  static DiscreteMeasure normalized(std::size_t dim, std::vector<double> atoms, std::vector<double> weights);

  /// Equal weights on the data points.
  static DiscreteMeasure empirical(const Dataset& data);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return weights_.size(); }

  std::span<const double> atom(std::size_t i) const { return {atoms_.data() + i * dim_, dim_}; }
  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> atoms() const noexcept { return atoms_; }

 private:
  std::size_t dim_;
  std::vector<double> atoms_;
  std::vector<double> weights_;
};

}  // namespace tabayes

#endif  // TABAYES_DISCRETE_MEASURE_HPP
