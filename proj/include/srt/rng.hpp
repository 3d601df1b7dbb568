#pragma once

// Counter-based random streams.
//
// A stream is a 64-bit key plus a 64-bit counter. The i-th output is
//     mix64(key + i * 0x9E3779B97F4A7C15),   i = 1, 2, ...
// where mix64 is the SplitMix64 finalizer. Streams are addressed rather than
// advanced: the stream for a child is derived from its parent key and an index,
//     child(key, i) = mix64(key ^ mix64(i + 0xD1B54A32D192ED03)),
// so every node of an Ulam-Harris tree u = u1 u2 ... un owns the key obtained by
// folding child() over the word. Outputs are reproducible within one build;
// nothing here promises bit-compatibility with other implementations.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

namespace srt {

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t index) {
  return mix64(parent ^ mix64(index + 0xD1B54A32D192ED03ULL));
}

class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t key = 0) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    ++counter_;
    return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Address of a stream in the tree of derived streams.
struct StreamKey {
  std::uint64_t value = 0;

  constexpr StreamKey child(std::uint64_t index) const { return {derive_key(value, index)}; }
  StreamKey word(std::span<const std::uint32_t> path) const {
    StreamKey k = *this;
    for (auto i : path) k = k.child(i);
    return k;
  }
  CounterRng stream() const { return CounterRng(value); }

  friend constexpr bool operator==(StreamKey, StreamKey) = default;
};

// Purpose tags live above the range used for Ulam-Harris child indices.
namespace tag {
inline constexpr std::uint64_t kXi = (1ULL << 40) + 1;
inline constexpr std::uint64_t kXiPd = (1ULL << 40) + 2;
inline constexpr std::uint64_t kInit = (1ULL << 40) + 3;
inline constexpr std::uint64_t kString = (1ULL << 40) + 4;
inline constexpr std::uint64_t kReplicate = (1ULL << 40) + 5;
inline constexpr std::uint64_t kRetry = (1ULL << 40) + 6;
}  // namespace tag

// Uniform on [0,1) with 53 random bits.
inline double uniform01(CounterRng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on (0,1), safe for log().
inline double uniform_open(CounterRng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Uniform integer in [0, n) by Lemire's multiply-shift (n > 0).
inline std::uint64_t uniform_index(CounterRng& rng, std::uint64_t n) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

// Standard normal by the polar method; the second variate is discarded so a
// draw consumes a self-contained block of the stream.
inline double std_normal(CounterRng& rng) {
  for (;;) {
    const double u = 2.0 * uniform01(rng) - 1.0;
    const double v = 2.0 * uniform01(rng) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

}  // namespace srt
