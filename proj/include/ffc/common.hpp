// SPDX-License-Identifier: Apache-2.0

#ifndef FFC_COMMON_HPP
#define FFC_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ffc {

//============================================================================
// Error taxonomy. Everything the library throws derives from Error so that
// callers (CLI, fuzz harnesses) can distinguish data problems from bugs.

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid caller-supplied data (bad values, violated preconditions).
struct InputError : Error {
  using Error::Error;
};

// Malformed serialized data (bitstream, scene file, config payloads).
struct FormatError : Error {
  using Error::Error;
};

// Internal inconsistency detected while encoding/decoding.
struct CodecError : Error {
  using Error::Error;
};

// Edge/cloud disagreement (declared counts vs derived structures).
struct DivergenceError : Error {
  using Error::Error;
};

// Bad run configuration (maps to CLI usage errors).
struct ConfigError : Error {
  using Error::Error;
};

//============================================================================
// Deterministic RNG. std::shuffle / std::uniform_int_distribution are not
// specified bit-exactly across standard libraries, so everything that must
// reproduce byte-identical output uses this splitmix64 stream instead.

inline std::uint64_t splitmix64(std::uint64_t& state)
{
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() { return splitmix64(state_); }

  // Uniform in [0, bound) by rejection; bound > 0.
  std::uint64_t next_below(std::uint64_t bound)
  {
    const std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % bound);
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % bound;
  }

  // Uniform double in [0, 1).
  double next_unit() { return double(next() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double next_range(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

private:
  std::uint64_t state_;
};

// Stable seed derivation for sub-streams (per voxel, per stage, ...).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0)
{
  std::uint64_t s = base;
  (void)splitmix64(s);
  s ^= 0x9e3779b97f4a7c15ULL * (a + 1);
  (void)splitmix64(s);
  s ^= 0xc2b2ae3d27d4eb4fULL * (b + 1);
  (void)splitmix64(s);
  s ^= 0x165667b19e3779f9ULL * (c + 1);
  return splitmix64(s);
}

// Order-independent 64-bit content hash (FNV-1a over a byte stream).
class Fnv1a {
public:
  void update(const void* data, std::size_t n)
  {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; i++) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ULL;
    }
  }

  void update_u64(std::uint64_t v)
  {
    for (int i = 0; i < 8; i++) {
      hash_ ^= (v >> (8 * i)) & 0xff;
      hash_ *= 0x100000001b3ULL;
    }
  }

  std::uint64_t value() const { return hash_; }

private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace ffc

#endif  // FFC_COMMON_HPP
