#pragma once

#include <cstdint>
#include <string_view>

namespace lidarvt {

/**
 * SplitMix64 stream (Steele, Lea & Flood constants). Every seeded decision in
 * the dataset tooling (fold shuffles, augmentation draws) comes from this
 * generator so other implementations can reproduce them exactly.
 */
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0,1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Integer in [0, bound) by modulo reduction.
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

 private:
  std::uint64_t state_;
};

/// 64-bit FNV-1a of a string, used to key streams on identifiers.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed for a stream keyed on (seed, key, index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view key, std::uint64_t index) {
  SplitMix64 mix(seed ^ fnv1a64(key));
  const std::uint64_t a = mix.next();
  SplitMix64 idx(index);
  return a ^ idx.next();
}

}  // namespace lidarvt
