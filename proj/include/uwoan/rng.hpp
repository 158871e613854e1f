#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace uwoan {

/// The single random stream of a run. Draws are converted from raw 64-bit
/// engine output here rather than through <random> distributions, whose
/// algorithms differ between standard libraries.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : m_engine(seed) {}

  std::uint64_t next() { return m_engine(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(m_engine() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  double normal(double mean, double sd)
  {
    // Box-Muller; u1 is kept away from 0.
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

private:
  std::mt19937_64 m_engine;
};

} // namespace uwoan
