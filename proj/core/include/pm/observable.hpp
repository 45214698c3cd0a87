#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pm/grid_density.hpp"
#include "pm/map.hpp"

namespace pm {

// Scalar observable on [0,1] carrying certified sup and Lipschitz bounds.
struct ScalarObservable {
  std::string name;
  std::function<double(double)> f;
  double sup_bound = 0.0;
  double lip_bound = 0.0;

  double operator()(double x) const { return f(x); }
};

// Certifies sup|f| and Lip(f) by evaluation on a uniform grid of `grid`
// intervals (grid+1 points). The recorded bounds are exact for the grid
// restriction and are used as the constants everywhere else.
ScalarObservable certify_observable(std::string name,
                                    std::function<double(double)> f,
                                    int grid = 1 << 16);

// Named scalar presets shared by the tools and tests:
//   coord            x
//   cos              cos(2 pi x)
//   coboundary-sin   g - g(T x)  with  g(x) = sin(2 pi x) / 4
// The coboundary preset needs the map parameter; the others ignore it.
ScalarObservable observable_preset(const std::string& name,
                                   const MapParameter& map);

// Vector observable f : [0,1] -> R^d with optional per-component centering.
struct ObservableSpec {
  std::vector<ScalarObservable> components;
  std::vector<double> shift;  // subtracted per component; empty = uncentered

  int dim() const { return static_cast<int>(components.size()); }
  bool centered() const { return !shift.empty(); }
  double sup_norm() const;   // max over components, shift included
  double lip_const() const;  // max over components

  void eval(double x, double* out) const;
};

// Subtracts the density-grid mean of each component, so that the grid
// integral of every centered component is zero by construction.
ObservableSpec centered_against(ObservableSpec spec, const GridDensity& density);

// Named vector presets:
//   coord              d=1: (x)
//   coord-cos          d=2: (x, cos(2 pi x))
//   coboundary-sin     d=1: (g - g o T)
//   coord+coboundary   d=2: (x, g - g o T)
ObservableSpec observable_spec_preset(const std::string& name,
                                      const MapParameter& map);

// Smooth test function h : R^d -> R with recorded derivative sup norms.
struct SmoothTestFunction {
  std::string name;
  int dim = 1;
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  double grad_norm = 0.0;  // sup |grad h|
  double d2_norm = 0.0;    // sup |D^2 h| (operator norm)
  double d3_norm = 0.0;    // sup |D^3 h| (symmetric injective norm)
};

// h(w) = exp(-|w|^2 / 2). The derivative norms are exact in every dimension:
// sup|grad h| = e^{-1/2}, sup|D2 h| = 1 (attained at 0), and
// sup|D3 h| = sqrt(6 (3 - sqrt 6)) e^{(sqrt 6 - 3)/2}.
SmoothTestFunction gaussian_bump(int dim);

}  // namespace pm
