#pragma once

#include <span>
#include <vector>

#include "pm/birkhoff.hpp"
#include "pm/observable.hpp"
#include "pm/parallel.hpp"

namespace pm {

struct ValueWithError {
  double value = 0.0;
  double std_error = 0.0;
};

// E[h(Z)] for Z ~ N(0, Sigma). Sigma is d x d row-major and must be
// positive-definite above an eigenvalue floor of 1e-10. For d <= 2 this is
// tensor Gauss-Hermite quadrature after the symmetric square-root change of
// variables (std_error 0); for d >= 3 it is seeded-chunk Monte Carlo.
ValueWithError gaussian_expectation(std::span<const double> sigma, int d,
                                    const SmoothTestFunction& h,
                                    const McOptions& mc);

// |mean of h(W) over the ensemble - E[h(Z)]|, Z ~ N(0, Sigma), with the two
// standard errors combined.
ValueWithError smooth_distance(const BirkhoffEnsemble& ensemble,
                               std::span<const double> sigma,
                               const SmoothTestFunction& h,
                               const McOptions& mc);

// Empirical 1-Wasserstein distance between the sample set and N(0, variance):
// sorted samples against the Gaussian quantiles at (i - 1/2) / M.
double kantorovich_exact_1d(std::vector<double> samples, double variance);

// Average of kantorovich_exact_1d over `directions` projections (equally
// spaced half-circle angles for d = 2, a seeded quasi-uniform set otherwise).
// A lower-bound surrogate for the d-dimensional Kantorovich distance.
double kantorovich_sliced(const BirkhoffEnsemble& ensemble,
                          std::span<const double> sigma, int directions = 64);

}  // namespace pm
