#ifndef TABAYES_POSTERIOR_SAMPLES_HPP
#define TABAYES_POSTERIOR_SAMPLES_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace tabayes {

/// Markov chain length and burn-in. The seed is provenance: samplers take
/// their RngHandle explicitly.
struct ChainSettings {
  std::size_t length = 20000;
  std::size_t burn_in = 1000;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t kept() const { return length - burn_in; }
};

struct ChainDiagnostics {
  std::size_t proposals = 0;
  std::size_t accepted = 0;
  /// Proposals whose functional could not be evaluated (counted as rejections).
  std::size_t functional_failures = 0;
  /// Largest log weight ratio log(p / q) seen on a proposal.
  double max_log_weight = -std::numeric_limits<double>::infinity();
  /// Proposal widenings performed before the kept chain.
  std::size_t restarts = 0;
  /// Set when the chain never accepted a move.
  bool failed = false;

  double acceptance_rate() const {
    return proposals == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
  }
};

/// Monte Carlo draws of theta from one method on one dataset.
class PosteriorSamples {
 public:
  PosteriorSamples() = default;
  PosteriorSamples(std::string method, std::size_t dim, std::uint64_t seed);

  const std::string& method() const noexcept { return method_; }
  std::size_t dim() const noexcept { return dim_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : draws_.size() / dim_; }

  void reserve(std::size_t n);
  void push(std::span<const double> theta, bool accepted);

  std::span<const double> draw(std::size_t i) const { return {draws_.data() + i * dim_, dim_}; }
  std::span<const double> flat() const noexcept { return draws_; }
  bool accepted(std::size_t i) const { return accepted_[i] != 0; }
  std::vector<double> column(std::size_t j) const;
  double mean(std::size_t j) const;

  ChainDiagnostics& diagnostics() noexcept { return diagnostics_; }
  const ChainDiagnostics& diagnostics() const noexcept { return diagnostics_; }
  ChainSettings chain{};

  /// "# method=... seed=..." line, then draw_index,theta_1[,theta_2],accepted.
  void write_csv(std::ostream& out) const;
  static PosteriorSamples read_csv(std::istream& in);

 private:
  std::string method_;
  std::size_t dim_ = 1;
  std::uint64_t seed_ = 0;
  std::vector<double> draws_;
  std::vector<std::uint8_t> accepted_;
  ChainDiagnostics diagnostics_;
};

}  // namespace tabayes

#endif  // TABAYES_POSTERIOR_SAMPLES_HPP
