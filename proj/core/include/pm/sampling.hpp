#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "pm/grid_density.hpp"
#include "pm/map.hpp"

namespace pm {

// splitmix64 step; the de-facto standard seed scrambler.
inline std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Seed for one chunk of a run. Every parallel estimator derives its chunk
// streams this way, so results depend on (seed, chunk index) only and never
// on the thread schedule.
inline std::uint64_t chunk_seed(std::uint64_t base, std::uint64_t chunk) {
  std::uint64_t s = base ^ (0x9E3779B97F4A7C15ull * (chunk + 1));
  return splitmix64(s);
}

inline std::mt19937_64 chunk_rng(std::uint64_t base, std::uint64_t chunk) {
  return std::mt19937_64(chunk_seed(base, chunk));
}

// Uniform double in [0,1) with 53 random bits. Hand-rolled because the
// standard distributions are implementation-defined and we pin byte-exact
// reproducibility of every estimate.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller (cosine half; two uniforms per draw, fixed
// consumption order).
inline double normal01(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 == 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(6.283185307179586476925286766559 * u2);
}

// Inverse-CDF sampler for a GridDensity: the CDF is piecewise linear, so a
// draw is a binary search plus one interpolation. Exact for the
// piecewise-constant density itself.
class DensitySampler {
public:
  explicit DensitySampler(const GridDensity& f);
  double draw(std::mt19937_64& rng) const;

private:
  std::vector<double> cdf_;  // cdf_[i] = mass of cells [0, i); size bins+1
};

// Draws x0 uniformly and discards burn_in iterations of a fixed map before
// returning the orbit point. Approximate: the returned distribution is the
// burn_in-step push-forward of Lebesgue, not the invariant density. Prefer
// DensitySampler on an invariant density estimate when available.
class OrbitSampler {
public:
  OrbitSampler(const MapParameter& p, int burn_in);
  double draw(std::mt19937_64& rng) const;

private:
  MapParameter p_;
  int burn_in_;
};

}  // namespace pm
