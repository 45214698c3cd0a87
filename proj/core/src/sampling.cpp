#include "pm/sampling.hpp"

#include <algorithm>
#include <stdexcept>

namespace pm {

DensitySampler::DensitySampler(const GridDensity& f) {
  const int m = f.bins();
  cdf_.resize(static_cast<std::size_t>(m) + 1);
  cdf_[0] = 0.0;
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    if (f[i] < 0.0)
      throw std::invalid_argument("DensitySampler: negative density value");
    acc += f[i];
    cdf_[i + 1] = acc;
  }
  if (!(acc > 0.0)) throw std::invalid_argument("DensitySampler: zero mass");
  for (double& c : cdf_) c /= acc;
  cdf_.back() = 1.0;
}

double DensitySampler::draw(std::mt19937_64& rng) const {
  const double u = uniform01(rng);
  // First index with cdf_[i] > u; the draw lands in cell i-1.
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  int i = static_cast<int>(it - cdf_.begin()) - 1;
  const int m = static_cast<int>(cdf_.size()) - 1;
  if (i >= m) i = m - 1;
  const double lo = cdf_[i], hi = cdf_[i + 1];
  const double frac = hi > lo ? (u - lo) / (hi - lo) : 0.0;
  return (i + frac) / m;
}

OrbitSampler::OrbitSampler(const MapParameter& p, int burn_in)
    : p_(p), burn_in_(burn_in) {
  if (burn_in < 0) throw std::invalid_argument("OrbitSampler: burn_in < 0");
}

double OrbitSampler::draw(std::mt19937_64& rng) const {
  double x = uniform01(rng);
  for (int k = 0; k < burn_in_; ++k) x = apply(p_, x);
  return x;
}

}  // namespace pm
