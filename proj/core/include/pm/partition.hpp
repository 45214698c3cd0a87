#pragma once

#include <optional>
#include <vector>

#include "pm/grid_density.hpp"
#include "pm/map.hpp"
#include "pm/rate_fit.hpp"

namespace pm {

// Monotonicity cells of the n-step composition: 2^n intervals on which
// T_n o ... o T_1 is a diffeomorphism onto (0,1). Endpoints are iterated
// branch preimages of {0, 1/2, 1}. Cells are indexed 1..2^n left to right;
// since every branch is increasing, the spatial order equals the
// lexicographic order of branch itineraries (left < right, first map most
// significant).
struct BranchPartition {
  int n = 0;
  AdmissibleSequence seq;
  std::vector<double> endpoints;  // 2^n + 1, strictly increasing, 0 and 1 at the ends

  int cells() const { return static_cast<int>(endpoints.size()) - 1; }
  double length(int theta) const;  // theta in [1, cells()]

  // Branch taken at step k (1-based) by cell theta.
  Branch branch_at(int theta, int k) const;

  // Inverse of the composition restricted to cell theta.
  double cell_inverse(int theta, double y) const;

  // Derivative of the full composition at x (chain rule along the orbit).
  double composite_derivative(double x) const;
};

// Builds the partition by pulling {0,1} back through the branch inverses of
// T_n, ..., T_1. Every endpoint is verified to land in {0,1} under the
// forward composition within 1e-8. n <= 20 (2^n cells).
BranchPartition build_partition(const AdmissibleSequence& seq, int n);

// Length of the leftmost cell (0, e_n): an all-left chain of branch
// inverses of 1, so no partition is materialized and n is not capped by the
// cell-count guard.
double leftmost_cell_length(const AdmissibleSequence& seq, int n);

// Log-log fit of leftmost cell length against n. Theory: length decays like
// n^{-1/beta_star} for the constant sequence.
RateFit leftmost_length_law(const AdmissibleSequence& seq,
                            const std::vector<int>& n_values);

// Density conditioned on one cell: h_theta = 1_{I_theta} h / mu_h(I_theta),
// kept on the same grid (boundary cells carry their covered fraction).
struct ConditionalDensity {
  int theta = 0;
  double cell_measure = 0.0;           // mu_h(I_theta)
  GridDensity base;                    // original h
  GridDensity conditional;             // h_theta, mass 1
  std::optional<GridDensity> pushed;   // filled by pushforward_conditional
};

ConditionalDensity conditional_density(const GridDensity& h,
                                       const BranchPartition& part, int theta);

// Push-forward of h_theta through the composition, evaluated at grid
// midpoints via the per-cell inverse:
//   (T~_n)_* h_theta (x) = h(u) / (mu_h(I_theta) (T~_n)'(u)),
//   u = (T~_n |_theta)^{-1}(x).
// Stores the result in cd.pushed and returns it. Decreasing whenever h is.
GridDensity pushforward_conditional(const AdmissibleSequence& seq,
                                    const BranchPartition& part,
                                    ConditionalDensity& cd);

}  // namespace pm
