#pragma once

#include <cstdint>

namespace pedebate {

// Counter-based deterministic generator (SplitMix64 over a keyed counter).
// Equal (seed, counter) pairs produce equal streams on every platform, which
// keeps transcripts byte-identical across reruns. Branch enumeration never
// touches this.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() {
    std::uint64_t v = seed_ ^ mix(stream_ * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
    v = mix(v + counter_);
    ++counter_;
    return mix(v);
  }

  // Uniform double in [0,1) with 53 bits of precision.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  int bernoulli(double p) { return next_unit() < p ? 1 : 0; }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

// Stateless keyed hash for pure pseudorandom strategy decisions.
std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v);
std::uint64_t hash_str(std::uint64_t h, const char* data, std::size_t len);
double unit_from_hash(std::uint64_t h);

}  // namespace pedebate
