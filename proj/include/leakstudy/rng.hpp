#pragma once

#include <cstdint>

namespace leakstudy {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Counter-based generator: draw i of stream s under seed k is a pure function
// of (k, s, i), so any subset of draws can be produced in any order or on any
// thread with identical results.
//   key      = mix64(seed ^ mix64(stream + 0x9E3779B97F4A7C15))
//   bits(i)  = mix64(key + (i + 1) * 0x9E3779B97F4A7C15)
//   uniform  = ((bits >> 11) + 0.5) * 2^-53, in (0, 1)
//   normal(i) uses uniforms 2i and 2i+1 (Box-Muller, cosine branch)
class CounterRng {
public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t bits(std::uint64_t i) const;
  double uniform(std::uint64_t i) const;
  double normal(std::uint64_t i) const;

private:
  std::uint64_t key_;
};

// Sequential convenience view over a CounterRng.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}

  double uniform() { return rng_.uniform(next_++); }
  double normal() { return rng_.normal(next_++); }
  double normal(double mean, double sd) { return mean + sd * normal(); }
  // Integer in [lo, hi].
  int uniform_int(int lo, int hi);

private:
  CounterRng rng_;
  std::uint64_t next_ = 0;
};

// Seed for trial t derived from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t t);

}  // namespace leakstudy
