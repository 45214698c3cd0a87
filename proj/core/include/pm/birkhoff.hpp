#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pm/map.hpp"
#include "pm/observable.hpp"
#include "pm/parallel.hpp"
#include "pm/sampling.hpp"

namespace pm {

// Ensemble of normalized Birkhoff sums W = N^{-1/2} sum_{k<N} f(T^k x),
// one row per start point, stored as an M x d row-major block.
struct BirkhoffEnsemble {
  long long N = 0;
  int d = 1;
  std::vector<double> W;       // size() * d
  std::vector<double> starts;  // x0 per sample
  std::uint64_t seed = 0;

  std::size_t size() const { return starts.size(); }
  std::span<const double> sample(std::size_t i) const {
    return {W.data() + i * static_cast<std::size_t>(d),
            static_cast<std::size_t>(d)};
  }
};

BirkhoffEnsemble sample_birkhoff(const MapParameter& map,
                                 const ObservableSpec& f, long long N,
                                 const DensitySampler& mu, const McOptions& mc);

// One orbit's observable values f^k = f(T^k x0) with O(1) window sums.
// The stream is retained as prefix sums up to length 2^20; beyond that only
// the start point is kept and every query re-iterates the orbit, trading
// time for memory.
class ObservableStream {
 public:
  ObservableStream(const MapParameter& map, const ObservableSpec& f,
                   long long N, double x0);

  long long length() const { return N_; }
  int dim() const { return d_; }

  double at(long long k, int c) const;

  // W = N^{-1/2} sum_{k<N} f^k.
  const std::vector<double>& W() const { return W_; }

  // W^n = W - N^{-1/2} sum_{k in [n]_K} f^k with
  // [n]_K = { k in [0,N) : |k-n| <= K }.
  std::vector<double> gap_sum(long long n, long long K) const;

 private:
  std::vector<double> window(long long a, long long b) const;  // sum over [a,b)

  MapParameter map_;
  const ObservableSpec* f_;
  long long N_;
  int d_;
  double x0_;
  std::vector<double> W_;
  std::vector<double> prefix_;  // (N+1) x d when retained, empty otherwise
};

// Limiting covariance estimate
// Sigma = mu(f (x) f) + sum_{n>=1} (mu(f^n (x) f) + mu(f (x) f^n)),
// truncated at n_max, estimated over invariant-density draws with one orbit
// per draw. Symmetry is exact by construction; definiteness is reported.
struct CovarianceEstimate {
  int d = 1;
  std::vector<double> sigma;       // d x d row-major
  int truncation = 0;
  std::vector<double> term_norms;  // Frobenius norm of each lag term, n = 0..
  double tail_rho_sum = 0.0;       // sum of rho beyond the truncation
  double min_eigenvalue = 0.0;
  bool indefinite = false;         // below the eigenvalue floor; not fatal

  double entry(int i, int j) const { return sigma[i * d + j]; }
};

CovarianceEstimate covariance_series(const MapParameter& map,
                                     const ObservableSpec& f, int n_max,
                                     double beta, const DensitySampler& mu,
                                     const McOptions& mc);

}  // namespace pm
