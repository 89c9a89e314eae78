#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace oppsim {

/// Seeded generator with distribution helpers defined on raw engine output,
/// so a seed produces the same stream on every standard library.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : m_engine(seed) {}

  /// Derives an independent stream for a (seed, stream id) pair.
  static Rng derive(std::uint64_t seed, std::uint64_t stream)
  {
    return Rng(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t next() { return m_engine(); }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [lo, hi], unbiased by rejection.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi)
  {
    const std::uint64_t span = hi - lo;
    if (span == ~std::uint64_t{0})
      return next();
    const std::uint64_t range = span + 1;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % range);
    std::uint64_t x;
    do
      x = next();
    while (x >= limit);
    return lo + x % range;
  }

  double exponential(double mean) { return -mean * std::log1p(-uniform01()); }

  bool bernoulli(double p) { return uniform01() < p; }

  static std::uint64_t splitmix64(std::uint64_t x)
  {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

private:
  std::mt19937_64 m_engine;
};

} // namespace oppsim
