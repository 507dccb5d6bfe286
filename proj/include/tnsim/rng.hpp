#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace tnsim {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return splitmix64(h ^ splitmix64(v));
}

/// FNV-1a, used to turn a stream purpose string into a key.
constexpr std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Key for the stream (seed, purpose, agent, ...).
template <typename... Parts>
constexpr std::uint64_t stream_key(std::uint64_t seed, std::string_view purpose, Parts... parts) {
  std::uint64_t h = hash_combine(seed, hash_string(purpose));
  ((h = hash_combine(h, static_cast<std::uint64_t>(parts))), ...);
  return h;
}

/// Maps 64 random bits to [0, 1) with 53 bits of precision.
constexpr double unit_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Reproducible random source. std::mt19937_64's output sequence is fixed by
/// the standard; the distributions below are written out here because the
/// standard library's are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::string_view purpose) : engine_(stream_key(seed, purpose)) {}

  std::uint64_t bits() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform() { return unit_from_bits(engine_()); }
  /// Uniform on (0, 1].
  double uniform_open0() { return 1.0 - uniform(); }
  double exponential(double rate) { return -std::log(uniform_open0()) / rate; }
  /// Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) {
    // Reject the low residue so the modulo is unbiased.
    const std::uint64_t limit = (0 - n) % n;
    for (;;) {
      const std::uint64_t x = engine_();
      if (x >= limit) return x % n;
    }
  }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tnsim
