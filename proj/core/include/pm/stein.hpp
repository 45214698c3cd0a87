#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pm/birkhoff.hpp"
#include "pm/map.hpp"
#include "pm/observable.hpp"
#include "pm/parallel.hpp"
#include "pm/sampling.hpp"

namespace pm {

// Default gap radius floor(N^beta).
long long default_gap_radius(long long N, double beta);

// sum_{i=0}^{cap} (i+1) rho(i, beta), plus a closed-form integral correction
// for the dropped tail so the value is stable in the cap. Requires beta < 1/3.
double weighted_tau_sum(double beta, long long tail_cap);

// sum_{i=K+1}^{inf} rho(i, beta): raw sum to the cap plus the integral
// correction. Requires beta < 1/2.
double tau_tail_sum(double beta, long long K, long long tail_cap);

// C* = 12 d^3 max{C2, sqrt(C4)} (|D2 h| + |f|_inf |D3 h|) sum (i+1) tau(i).
// The weighted tau sum is passed in so callers can pin it (tests) or use
// weighted_tau_sum (experiments).
double stein_constant(int d, double C2, double C4, double d2_norm,
                      double d3_norm, double f_sup, double weighted_sum);

// C* ((K+1)/sqrt(N) + tau_tail) + sqrt(N) tilde_tau.
double stein_bound(double C_star, long long N, long long K, double tau_tail,
                   double tilde_tau);

// Fitted constants of the pair / quadruple correlation conditions: smallest
// C2, C4 making every sampled inequality hold after a 3 std-error allowance.
struct A1Report {
  double C2 = 0.0;
  double C4 = 0.0;
  double worst_pair_ratio = 0.0;  // |estimate| / rho, no allowance
  double worst_quad_ratio = 0.0;
  int pair_probes = 0;
  int quad_probes = 0;
};

// Estimates |mu(f_a f_b^n)| over the lag grid and the quadruple moments
// |mu(f_a f_b^l f_c^m f_d^n)| (bounded by C4 min{tau(l), tau(n-m)}) and
// |mu(f_a f_b^l f_c^m f_d^n) - mu(f_a f_b^l) mu(f_c^m f_d^n)| (bounded by
// C4 tau(m-l)) over tuples (l, m, n) built from the lag grid.
A1Report check_A1(const MapParameter& map, const ObservableSpec& f,
                  double beta, const std::vector<long long>& lags,
                  const DensitySampler& mu, const McOptions& mc);

// Empirical tilde-tau(K): max over a probe grid of
// |mu(f^n . grad h(v + t W^n))|. The probe grid covers n in {0, N/4, N/2,
// 3N/4, N-1}, t in {0, 1/2, 1} and v in {0} plus the positive and negative
// per-axis points at one standard deviation; a finite grid can only bound
// the defining sup from below, which the report states.
struct A2Report {
  double tilde_tau = 0.0;
  double max_std_error = 0.0;
  double rho_ratio = 0.0;  // tilde_tau / rho(K)
  int probes = 0;
};

A2Report check_A2_tilde_tau(const MapParameter& map, const ObservableSpec& f,
                            const SmoothTestFunction& h, long long N,
                            long long K, const CovarianceEstimate& cov,
                            double beta, const DensitySampler& mu,
                            const McOptions& mc);

// Everything needed to recompute the normal-approximation budget. The
// serialized form is a flat key=value file; recompute() derives C_star and
// bound from the other fields and parse(serialize()) followed by recompute()
// is bit-identical.
struct SteinBudget {
  int d = 1;
  double beta = 0.25;
  double C2 = 0.0;
  double C4 = 0.0;
  double grad_norm = 0.0;
  double d2_norm = 0.0;
  double d3_norm = 0.0;
  double f_sup = 0.0;
  long long N = 0;
  long long K = 0;
  long long tail_cap = 1000000;
  double tilde_tau = 0.0;
  double C_star = 0.0;
  double bound = 0.0;

  void recompute();
  std::string serialize() const;
  static SteinBudget parse(const std::string& text);
};

}  // namespace pm
