#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace fedx {

// Every random draw in the library comes from a Stream derived from
// (seed, purpose, client, round, iteration). Derivation:
//
//   key = seed
//   for field in (purpose, client, round, iteration):
//     key = mix64(key ^ mix64(field + 1 + kGolden))
//
// and the stream is a SplitMix64 sequence started at `key`:
//   state += kGolden; out = mix64(state)
//
// mix64 is the SplitMix64 finalizer (Stafford variant 13). Doubles take the
// top 53 bits; normals use Box-Muller on (1 - u1, u2), cosine branch only;
// bounded integers use rejection on next() % n. Any port that reproduces
// these four rules reproduces every draw.
enum class Purpose : std::uint64_t {
  kDataPositive = 1,
  kDataNegative = 2,
  kEvalPositive = 3,
  kEvalNegative = 4,
  kHeterogeneity = 5,
  kLabelFlip = 6,
  kInit = 7,
  kBootstrap = 8,
  kActiveSample = 9,
  kHistorySample = 10,
  kBufferNegScores = 11,
  kBufferPosScores = 12,
  kMonteCarlo = 13,
};

struct StreamKey {
  std::uint64_t seed = 0;
  Purpose purpose = Purpose::kInit;
  std::uint64_t client = 0;
  std::uint64_t round = 0;
  std::uint64_t iteration = 0;
};

std::uint64_t mix64(std::uint64_t z);
std::uint64_t derive_key(const StreamKey& key);

class Stream {
 public:
  explicit Stream(const StreamKey& key) : state_(derive_key(key)) {}
  static Stream from_raw(std::uint64_t state) {
    Stream s;
    s.state_ = state;
    return s;
  }

  std::uint64_t next();
  // Uniform in [0, 1).
  double uniform();
  double normal();
  // Uniform in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);

  // Fisher-Yates: for i = n-1 down to 1, swap(i, below(i + 1)).
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  Stream() = default;
  std::uint64_t state_ = 0;
};

inline Stream make_stream(std::uint64_t seed, Purpose purpose, std::uint64_t client = 0,
                          std::uint64_t round = 0, std::uint64_t iteration = 0) {
  return Stream(StreamKey{seed, purpose, client, round, iteration});
}

}  // namespace fedx
