#ifndef DOGM_COUNTER_RNG_HPP_
#define DOGM_COUNTER_RNG_HPP_

#include <cmath>
#include <cstdint>

namespace dogm
{

/// SplitMix64 finaliser; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z)
{
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value)
{
  return mix64(seed ^ mix64(value));
}

/// Stateless random stream addressed by (key, counter). Draws depend only on
/// the address, so parallel consumers reproduce the sequential result.
class CounterStream
{
public:
  constexpr explicit CounterStream(std::uint64_t key) : key_(key) {}

  std::uint64_t bits(std::uint64_t counter) const { return mix64(key_ ^ mix64(counter)); }

  /// Uniform in (0, 1).
  double uniform(std::uint64_t counter) const
  {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Two independent standard normals via Box-Muller from counters 2c, 2c+1.
  void normal_pair(std::uint64_t counter, double & a, double & b) const
  {
    const double u1 = uniform(2 * counter);
    const double u2 = uniform(2 * counter + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    a = r * std::cos(2.0 * M_PI * u2);
    b = r * std::sin(2.0 * M_PI * u2);
  }

private:
  std::uint64_t key_;
};

}  // namespace dogm

#endif  // DOGM_COUNTER_RNG_HPP_
