#include "tabayes/rng.hpp"

namespace tabayes {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngHandle::RngHandle(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

RngHandle RngHandle::child(std::uint64_t index) const {
  return RngHandle(splitmix64(seed_ ^ splitmix64(index)));
}

double RngHandle::uniform() noexcept {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace tabayes
