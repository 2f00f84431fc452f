// Deterministic random number generation with keyed substreams.
//
// Generator: xoshiro256++ (Blackman & Vigna), seeded through splitmix64 as
// recommended by the authors.  We avoid std::mt19937 + std distributions
// because the standard leaves distribution algorithms implementation-defined,
// which would break the bit-identical reproducibility contract across
// toolchains.
//
// Substreams: every (master seed, stream tag, replicate index) triple maps to
// an independent generator state via a splitmix64-finalizer hash chain, so
// replicate-parallel experiments produce identical output for any worker
// count: results are stored per replicate and reduced in index order.
#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace vrjplab {

namespace detail {

// splitmix64 finalizer (public domain reference constants).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// FNV-1a 64-bit hash, used to derive stream tags from test names.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Combines master seed, stream tag, and replicate index into one 64-bit key.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t tag,
                                    std::uint64_t replicate) {
  std::uint64_t h = detail::mix64(master);
  h = detail::mix64(h ^ tag);
  h = detail::mix64(h ^ replicate);
  return h;
}

// xoshiro256++ with a cached Gaussian spare (Marsaglia polar method).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    // Expand the 64-bit seed into 256 bits of state with splitmix64.
    std::uint64_t sm = seed;
    for (auto& word : s_) {
      sm += 0x9E3779B97F4A7C15ULL;
      std::uint64_t z = sm;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      word = z ^ (z >> 31);
    }
    // All-zero state is invalid for xoshiro; the expansion above cannot
    // produce it for any seed, but guard anyway.
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  Rng(std::uint64_t master, std::uint64_t tag, std::uint64_t replicate)
      : Rng(substream_seed(master, tag, replicate)) {}

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = detail::rotl(s_[3], 45);
    return result;
  }

  // Uniform on the open interval (0,1): 53-bit mantissa offset by half an ulp
  // so 0 and 1 are never returned (safe for logs and inversions).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) *
           (1.0 / 9007199254740992.0);
  }

  // Standard normal via the Marsaglia polar method with a cached spare.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, q;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    const double f = std::sqrt(-2.0 * std::log(q) / q);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  // Exponential with the given rate.
  double exponential(double rate) { return -std::log(uniform()) / rate; }

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace vrjplab
