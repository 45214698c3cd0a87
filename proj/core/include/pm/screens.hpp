#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pm/map.hpp"
#include "pm/observable.hpp"
#include "pm/parallel.hpp"
#include "pm/sampling.hpp"

namespace pm {

// Bounded differentiable probe F with certified sup norms, used where a
// condition quantifies over all such functions and only a family is testable.
struct BoundedDifferentiable {
  std::string name;
  int dim = 1;
  std::function<double(std::span<const double>)> value;
  double sup_norm = 0.0;
  double grad_norm = 0.0;
};

// Index tuple of the block-covariance condition: with S_i the partial sum
// of f up to time i, estimate
//   Cov[ F(S_i, f^i, f^j, f^k), (f_a^{k+p})^a (f_b^{k+p+q})^b (f_c^{k+p+l})^c ]
// for 0 <= i <= j <= k, gaps p, q, l >= 0 with q + l' ordered as
// k <= k+p <= k+p+q <= k+p+l, exponents 1 <= a+b+c <= 3.
struct B2Tuple {
  long long i = 0, j = 0, k = 0;
  long long p = 0, q = 0, l = 0;  // l >= q
  int alpha = 0, beta = 0, gamma = 0;
  int a = 1, b = 0, c = 0;

  void validate(int d) const;  // throws std::invalid_argument
};

struct B2Probe {
  std::string probe;
  B2Tuple tuple;
  double cov = 0.0;
  double std_error = 0.0;
  double rho_p = 0.0;
  double ratio = 0.0;  // |cov| / ((sup F + grad F) rho(p))
};

struct B2Report {
  double C_fit = 0.0;       // smallest uniform C after a 3 std-error allowance
  double worst_ratio = 0.0;
  std::vector<B2Probe> probes;
};

// Probe family with certified norms: a Gaussian bump over the full argument
// vector (scaled to the observable's range) and tanh projections of the
// first component of the S_i and f^k blocks.
std::vector<BoundedDifferentiable> b2_probe_family(int d, double f_sup);

B2Report check_B2(const MapParameter& map, const ObservableSpec& f,
                  double beta, const std::vector<BoundedDifferentiable>& F,
                  const std::vector<B2Tuple>& tuples, const DensitySampler& mu,
                  const McOptions& mc);

// Degenerate-direction screen: estimates Var(v . S_N) across the N grid for
// each direction v and fits the growth exponent; a direction whose variance
// fails to grow at least like N^{1/2} is flagged as coboundary-suspect.
// Heuristic evidence, not a proof.
struct CoboundaryReport {
  struct Direction {
    std::vector<double> v;
    double growth_exponent = 0.0;
    std::vector<double> variances;  // one per N grid entry
    bool flagged = false;
  };
  std::vector<Direction> directions;
  bool any_flagged = false;
};

CoboundaryReport coboundary_screen(const MapParameter& map,
                                   const ObservableSpec& f,
                                   const std::vector<long long>& N_grid,
                                   int n_directions, const DensitySampler& mu,
                                   const McOptions& mc);

}  // namespace pm
