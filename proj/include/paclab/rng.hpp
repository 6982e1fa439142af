#pragma once

#include <cstdint>
#include <string_view>

namespace paclab {

// splitmix64 finalizer. Also used as the mixing step for seed derivation.
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline uint64_t hash_tag(std::string_view tag) {
  // FNV-1a
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Counter-based stream derivation: every stream is a pure function of
// (master_seed, purpose_tag, index, subindex), so parallel and serial runs
// see identical draws.
inline uint64_t derive_seed(uint64_t master, std::string_view purpose, uint64_t index = 0,
                            uint64_t subindex = 0) {
  uint64_t s = mix64(master ^ hash_tag(purpose));
  s = mix64(s ^ index);
  s = mix64(s ^ subindex);
  return s;
}

// Minimal deterministic generator (splitmix64 stream). Not cryptographic;
// statistically solid for Monte Carlo at the scales used here.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 mantissa bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Unbiased uniform in [0, n): Lemire's multiply-shift with rejection.
  uint32_t next_below(uint32_t n) {
    uint32_t x = static_cast<uint32_t>(next_u64());
    uint64_t m = static_cast<uint64_t>(x) * n;
    uint32_t l = static_cast<uint32_t>(m);
    if (l < n) {
      uint32_t t = (0u - n) % n;
      while (l < t) {
        x = static_cast<uint32_t>(next_u64());
        m = static_cast<uint64_t>(x) * n;
        l = static_cast<uint32_t>(m);
      }
    }
    return static_cast<uint32_t>(m >> 32);
  }

 private:
  uint64_t state_;
};

}  // namespace paclab
