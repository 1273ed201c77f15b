#pragma once

#include <cmath>
#include <cstdint>

namespace banditlab {

// splitmix64 finalizer (Stafford variant 13). Used both as the stream
// derivation function and as the core of the generator below.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives the seed for replication r from a base seed. Chaining mix calls
// derives further independent streams, e.g. mix(mix(base, r), 1).
inline std::uint64_t mix(std::uint64_t base, std::uint64_t r) {
  return splitmix64(base ^ (0x9e3779b97f4a7c15ULL * (r + 1)));
}

inline std::uint64_t mix(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return mix(mix(base, a), b);
}

// Counter-based generator: output t is splitmix64 applied to seed + t.
// Bit-identical across platforms, cheap to fork, no warm-up.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_++); }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform index in [0, n). Rejection-free multiply-shift; the bias for
  // n << 2^64 is far below anything observable.
  std::uint64_t next_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Standard normal via Box-Muller (both draws consumed each call).
  double next_gaussian() {
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace banditlab
