#pragma once

#include <functional>

#include "pm/grid_density.hpp"

namespace pm {

// Geometry constant of the invariant cone at parameter beta.
// a(beta) = 2^beta (2 + beta). Total as a formula; callers validate beta.
double cone_constant_a(double beta);

struct ConeCheckOptions {
  double slack = 1e-12;        // additive tolerance on every inequality
  int pointwise_skip = 1;      // cells exempt from the pointwise bound
  int monotone_skip = 0;       // cells exempt from both monotonicity checks
};

// Sampled verdict on cone membership: f >= 0, f decreasing,
// x^{beta+1} f(x) increasing, f(x) <= a(beta) x^{-beta} m(f).
struct ConeReport {
  double beta = 0.0;
  int resolution = 0;
  bool positive_ok = false;
  bool decreasing_ok = false;
  bool weighted_increasing_ok = false;
  bool pointwise_bound_ok = false;
  // Worst signed slack over all checked inequalities (violation - tolerance
  // scale); negative means margin everywhere.
  double max_violation = 0.0;

  bool pass() const {
    return positive_ok && decreasing_ok && weighted_increasing_ok &&
           pointwise_bound_ok;
  }
};

// Grid version: checks at the grid's own midpoints; the first cell is exempt
// from the pointwise bound by default (bin averaging inflates it for
// unbounded densities).
ConeReport cone_check(const GridDensity& f, double beta,
                      ConeCheckOptions opt = {});

// Callable version: sampled at the midpoints of a uniform grid of the given
// resolution, all cells checked (no exemption by default), mass taken as the
// midpoint-rule integral.
ConeReport cone_check(const std::function<double(double)>& f, double beta,
                      int resolution, ConeCheckOptions opt = {.pointwise_skip = 0});

// Cone embedding of a Lipschitz function against a cone density h:
//
//   F = (f + lambda x + nu) h + delta,
//   lambda = -A, nu = 6A, delta = 2AB max{a/(beta+1), 4a/(a-1)},
//
// valid whenever |f|_sup + Lip(f) <= A, h in the cone with mass <= B.
// The bracket stays within [4A, 8A], so F inherits cone membership.
struct ConeEmbedding {
  double lambda = 0.0;
  double nu = 0.0;
  double delta = 0.0;
  double A = 0.0;
  double B = 0.0;
  bool degenerate = false;  // A == 0 or B == 0: F is identically zero
  GridDensity F;
  ConeReport report;  // cone_check of F at h's resolution
  double l1_norm = 0.0;

  // Empirical constant |F|_1 / (A B); recorded, not asserted.
  double l1_ratio() const { return (A > 0 && B > 0) ? l1_norm / (A * B) : 0.0; }
};

ConeEmbedding lip_cone_embed(const std::function<double(double)>& f, double A,
                             const GridDensity& h, double B, double beta);

}  // namespace pm
