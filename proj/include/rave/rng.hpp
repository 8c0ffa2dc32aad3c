#pragma once

#include <cstdint>

namespace rave {

// Counter-based generator: every variate is a pure function of
// (seed, id, component), so streams are splittable by index and the
// first N draws of a longer stream equal the shorter stream.
namespace rng {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t x) noexcept {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t id,
                                  std::uint64_t component) noexcept {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ (id * 0xD1342543DE82EF95ull + 0x2545F4914F6CDD1Dull));
  h = mix64(h ^ (component * kGolden + 1ull));
  return h;
}

// Uniform in [0,1) with 53 random bits.
inline double uniform01(std::uint64_t seed, std::uint64_t id,
                        std::uint64_t component) noexcept {
  return static_cast<double>(counter_hash(seed, id, component) >> 11) *
         0x1.0p-53;
}

inline double uniform(std::uint64_t seed, std::uint64_t id,
                      std::uint64_t component, double lo, double hi) noexcept {
  return lo + (hi - lo) * uniform01(seed, id, component);
}

// Derives an independent-stream seed from a tag, e.g. per replication.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag_a,
                                 std::uint64_t tag_b = 0) noexcept {
  return counter_hash(seed, tag_a, tag_b);
}

}  // namespace rng
}  // namespace rave
