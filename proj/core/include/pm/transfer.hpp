#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "pm/grid_density.hpp"
#include "pm/map.hpp"

namespace pm {

// Pointwise transfer operator: (L f)(x) = sum over preimages y of x of
// f(y) / T'(y), one preimage per branch.
double transfer_apply_pointwise(const MapParameter& p,
                                const std::function<double(double)>& f,
                                double x);

// Galerkin projection of the transfer operator onto the uniform grid.
// Column-stochastic in the density convention: entry(i,j) is the fraction of
// cell j that lands in cell i, computed exactly from branch inverses of the
// cell endpoints. apply() maps density values to density values and
// preserves mass.
struct UlamOperator {
  double alpha = 0.0;
  int bins = 0;
  // Compressed columns: rows/vals of column j occupy [ptr[j], ptr[j+1]).
  std::vector<int> ptr;
  std::vector<int> row;
  std::vector<double> val;

  GridDensity apply(const GridDensity& f) const;
  double entry(int i, int j) const;  // dense lookup, test use
  double column_sum(int j) const;
};

UlamOperator ulam_matrix(const MapParameter& p, int bins);

// Sparse triplet export, schema "row,col,value", column-major order.
void write_sparse_csv(const UlamOperator& L, const std::string& path);

class convergence_error : public std::runtime_error {
public:
  convergence_error(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_;
};

// Invariant density estimate: power iteration of the Ulam operator from the
// flat density, stopped when the successive L1 change drops below tol.
// Throws convergence_error (carrying the last change) on iteration budget
// exhaustion. Result has mass exactly 1 after normalization.
GridDensity invariant_density(const MapParameter& p, int bins,
                              double tol = 1e-10, int max_iters = 100000);

// Two-route check of int f(T x) g(x) dx = int f(x) (L g)(x) dx. Both sides
// via composite Gauss-Legendre with panels split at 1/2 and at the branch
// inverses of 1/2, plus a geometric cascade toward the origin where the
// integrands lose smoothness. Returns |lhs - rhs|.
double duality_residual(const MapParameter& p,
                        const std::function<double(double)>& f,
                        const std::function<double(double)>& g,
                        int panels = 256);

// Circular moving average of radius epsilon in the circle metric
// d(x,y) = min(|x-y|, 1-|x-y|). epsilon snaps to a whole number of cells;
// mass is preserved exactly by construction.
double snapped_epsilon(double epsilon, int bins);
GridDensity averaging_apply(double epsilon, const GridDensity& f);

// Smoothing radius with the induced composition depth: n_epsilon steps of
// the transfer operator are taken after one averaging step.
struct PerturbationParams {
  double epsilon = 0.0;
  int n_epsilon = 0;

  // n_epsilon = ceil(c * epsilon^{-beta}).
  static PerturbationParams from_epsilon(double epsilon, double beta,
                                         double c = 1.0);
};

// Applies A_epsilon, then the Ulam operators of maps start_index,
// start_index+1, ..., start_index+n_epsilon-1 from the sequence (1-based).
GridDensity perturbed_compose(const AdmissibleSequence& seq,
                              std::size_t start_index,
                              const PerturbationParams& params,
                              const GridDensity& f);

}  // namespace pm
