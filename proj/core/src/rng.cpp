#include "fedx/rng.hpp"

#include <cmath>
#include <numbers>

namespace fedx {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_key(const StreamKey& key) {
  std::uint64_t k = key.seed;
  const std::uint64_t fields[] = {static_cast<std::uint64_t>(key.purpose), key.client, key.round,
                                  key.iteration};
  for (std::uint64_t f : fields) k = mix64(k ^ mix64(f + 1 + kGolden));
  return k;
}

std::uint64_t Stream::next() {
  state_ += kGolden;
  return mix64(state_);
}

double Stream::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Stream::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Stream::below(std::uint64_t n) {
  // Values below `threshold` would bias the modulus.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % n;
  }
}

}  // namespace fedx
