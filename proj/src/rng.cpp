#include "leakstudy/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace leakstudy {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix64(seed ^ mix64(stream + kGolden))) {}

std::uint64_t CounterRng::bits(std::uint64_t i) const { return mix64(key_ + (i + 1) * kGolden); }

double CounterRng::uniform(std::uint64_t i) const {
  return (static_cast<double>(bits(i) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t i) const {
  const double u1 = uniform(2 * i);
  const double u2 = uniform(2 * i + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int RngStream::uniform_int(int lo, int hi) {
  const double u = uniform();
  const int span = hi - lo + 1;
  return lo + std::min(span - 1, static_cast<int>(u * span));
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t t) { return mix64(base ^ mix64(t * kGolden + 1)); }

}  // namespace leakstudy
