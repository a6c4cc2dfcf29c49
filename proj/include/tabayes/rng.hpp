#ifndef TABAYES_RNG_HPP
#define TABAYES_RNG_HPP

#include <cstdint>
#include <random>

namespace tabayes {

/// SplitMix64 finalizer. Used to decorrelate seeds before they reach the engine.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Deterministic random stream.
///
/// A handle owns its engine state; it is never shared between threads.
/// Independent streams are obtained with child(index), whose seed is
/// splitmix64(seed ^ splitmix64(index)). Two handles built from the same
/// seed produce the same sequence of draws.
class RngHandle {
 public:
  using engine_type = std::mt19937_64;
  using result_type = engine_type::result_type;

  explicit RngHandle(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  RngHandle child(std::uint64_t index) const;

  /// Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform() noexcept;

  engine_type& engine() noexcept { return engine_; }

  static constexpr result_type min() { return engine_type::min(); }
  static constexpr result_type max() { return engine_type::max(); }
  result_type operator()() { return engine_(); }

 private:
  std::uint64_t seed_;
  engine_type engine_;
};

}  // namespace tabayes

#endif  // TABAYES_RNG_HPP
