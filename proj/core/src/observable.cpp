#include "pm/observable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pm {

ScalarObservable certify_observable(std::string name,
                                    std::function<double(double)> f,
                                    int grid) {
  if (grid < 2) throw std::invalid_argument("certify_observable: grid < 2");
  double sup = 0.0, lip = 0.0;
  double prev = f(0.0);
  sup = std::abs(prev);
  const double h = 1.0 / grid;
  for (int i = 1; i <= grid; ++i) {
    const double v = f(i * h);
    sup = std::max(sup, std::abs(v));
    lip = std::max(lip, std::abs(v - prev) / h);
    prev = v;
  }
  if (!std::isfinite(sup) || !std::isfinite(lip))
    throw std::invalid_argument("certify_observable: non-finite values on [0,1]");
  return ScalarObservable{std::move(name), std::move(f), sup, lip};
}

ScalarObservable observable_preset(const std::string& name,
                                   const MapParameter& map) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (name == "coord")
    return certify_observable("coord", [](double x) { return x; });
  if (name == "cos")
    return certify_observable("cos",
                              [=](double x) { return std::cos(two_pi * x); });
  if (name == "coboundary-sin") {
    auto g = [=](double x) { return 0.25 * std::sin(two_pi * x); };
    return certify_observable("coboundary-sin", [=](double x) {
      return g(x) - g(apply(map, x));
    });
  }
  throw std::invalid_argument("observable_preset: unknown preset '" + name + "'");
}

double ObservableSpec::sup_norm() const {
  double s = 0.0;
  for (int c = 0; c < dim(); ++c) {
    const double off = shift.empty() ? 0.0 : std::abs(shift[c]);
    s = std::max(s, components[c].sup_bound + off);
  }
  return s;
}

double ObservableSpec::lip_const() const {
  double l = 0.0;
  for (const auto& c : components) l = std::max(l, c.lip_bound);
  return l;
}

void ObservableSpec::eval(double x, double* out) const {
  for (int c = 0; c < dim(); ++c) {
    out[c] = components[c].f(x);
    if (!shift.empty()) out[c] -= shift[c];
  }
}

ObservableSpec centered_against(ObservableSpec spec, const GridDensity& density) {
  const int m = density.bins();
  std::vector<double> mean(spec.components.size(), 0.0);
  for (int i = 0; i < m; ++i) {
    const double x = density.midpoint(i);
    const double w = density[i] / m;
    for (std::size_t c = 0; c < spec.components.size(); ++c)
      mean[c] += w * spec.components[c].f(x);
  }
  const double mass = density.mass();
  if (!(mass > 0.0))
    throw std::domain_error("centered_against: density has no mass");
  for (auto& v : mean) v /= mass;
  spec.shift = std::move(mean);
  return spec;
}

ObservableSpec observable_spec_preset(const std::string& name,
                                      const MapParameter& map) {
  ObservableSpec spec;
  if (name == "coord") {
    spec.components = {observable_preset("coord", map)};
  } else if (name == "coord-cos") {
    spec.components = {observable_preset("coord", map),
                       observable_preset("cos", map)};
  } else if (name == "coboundary-sin") {
    spec.components = {observable_preset("coboundary-sin", map)};
  } else if (name == "coord+coboundary") {
    spec.components = {observable_preset("coord", map),
                       observable_preset("coboundary-sin", map)};
  } else {
    throw std::invalid_argument("observable_spec_preset: unknown preset '" +
                                name + "'");
  }
  return spec;
}

SmoothTestFunction gaussian_bump(int dim) {
  if (dim < 1) throw std::invalid_argument("gaussian_bump: dim < 1");
  SmoothTestFunction h;
  h.name = "gaussian-bump";
  h.dim = dim;
  h.value = [](std::span<const double> w) {
    double r2 = 0.0;
    for (double wi : w) r2 += wi * wi;
    return std::exp(-0.5 * r2);
  };
  h.gradient = [](std::span<const double> w, std::span<double> g) {
    double r2 = 0.0;
    for (double wi : w) r2 += wi * wi;
    const double v = std::exp(-0.5 * r2);
    for (std::size_t i = 0; i < w.size(); ++i) g[i] = -w[i] * v;
  };
  h.grad_norm = std::exp(-0.5);
  h.d2_norm = 1.0;
  const double s6 = std::sqrt(6.0);
  h.d3_norm = std::sqrt(6.0 * (3.0 - s6)) * std::exp(0.5 * (s6 - 3.0));
  return h;
}

}  // namespace pm
