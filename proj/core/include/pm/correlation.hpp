#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pm/map.hpp"
#include "pm/observable.hpp"
#include "pm/parallel.hpp"
#include "pm/rate_fit.hpp"
#include "pm/sampling.hpp"

namespace pm {

// Decay rate n^(1 - 1/beta) (log n)^(1/beta) with rho(0) = rho(1) = 1.
// Natural logarithm; n is real so the rate can be integrated for tail bounds.
double rho(double n, double beta);

// Multi-time functional F(x_0, ..., x_k) evaluated along orbit blocks.
//
// gap_indices l_1 < ... < l_p split the argument list into p+1 blocks:
// block 0 covers arguments 0..l_1, block j covers l_j+1..l_{j+1}, block p
// covers l_p+1..k. Argument i inside block j is the composition at absolute
// time times[i] applied to the block's base point x_j.
struct FunctionalSpec {
  int k = 1;
  std::vector<int> gap_indices;    // 0 <= l_1 < ... < l_p < k
  std::vector<long long> times;    // size k+1, times[0] = 0, nondecreasing
  std::function<double(std::span<const double>)> F;
  double sup_norm = 0.0;
  std::vector<double> lip_consts;  // Lip(F; i) for arguments 0..l_p

  int blocks() const { return static_cast<int>(gap_indices.size()) + 1; }
  void validate() const;  // throws std::invalid_argument with the violation
};

// Sum of rho over the block gaps: sum_i rho(times[l_i + 1] - times[l_i]).
double rho_gap_sum(const FunctionalSpec& spec, double beta);

struct CorrelationEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

// Estimates the difference between the diagonal integral of the block
// functional (all blocks fed the same draw) and the product integral
// (independent draws per block). mus supplies the block-1..p measures;
// block 0 always draws from mu.
CorrelationEstimate lhs_functional_correlation(
    const AdmissibleSequence& seq, const FunctionalSpec& spec,
    const DensitySampler& mu, const std::vector<DensitySampler>& mus,
    const McOptions& mc);

// Estimates mu(H G) - mu(H) mu(G) for H = prod_{i<=l} f_i at times[i] and
// G = prod_{i>l} f_i at times[i]. The three averages use independent draw
// streams; the standard error combines them by the delta method.
CorrelationEstimate multicorrelation(const AdmissibleSequence& seq,
                                     const std::vector<ScalarObservable>& fs,
                                     const std::vector<long long>& times,
                                     int gap_index, const DensitySampler& mu,
                                     const McOptions& mc);

struct SweepPoint {
  long long n = 0;
  CorrelationEstimate est;
};

// Pair-correlation sweep: estimates mu(f . g o T~_n) - mu(f) mu_n(g) for
// every gap in one pass. Each draw contributes one orbit of length max(gaps)
// serving all gaps; the product means come from an independent draw stream
// inside the same sample budget.
std::vector<SweepPoint> pair_correlation_sweep(
    const AdmissibleSequence& seq, const ScalarObservable& f,
    const ScalarObservable& g, const std::vector<long long>& gaps,
    const DensitySampler& mu, const McOptions& mc);

// Smallest C making |estimate| <= C (sup_norm + max lip) sum rho(gaps) hold
// across a sweep; infinity when a denominator vanishes.
double bound_conformance_constant(
    const std::vector<std::pair<FunctionalSpec, CorrelationEstimate>>& sweep,
    double beta);

}  // namespace pm
