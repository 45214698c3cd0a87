#include "pm/birkhoff.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pm/stein.hpp"

namespace pm {

BirkhoffEnsemble sample_birkhoff(const MapParameter& map,
                                 const ObservableSpec& f, long long N,
                                 const DensitySampler& mu, const McOptions& mc) {
  if (N < 1) throw std::invalid_argument("sample_birkhoff: N < 1");
  if (f.dim() < 1) throw std::invalid_argument("sample_birkhoff: empty observable");
  if (mc.samples == 0) throw std::invalid_argument("sample_birkhoff: zero samples");

  const int d = f.dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));

  struct State {
    std::vector<double> W;
    std::vector<double> starts;
  };
  const ChunkPlan plan{mc.samples, mc.chunk_size};
  auto states = run_chunks<State>(
      plan, mc.seed, mc.threads,
      [&](std::uint64_t, std::uint64_t, std::uint64_t count,
          std::mt19937_64& rng, State& st) {
        st.W.reserve(count * d);
        st.starts.reserve(count);
        std::vector<double> acc(d), val(d);
        for (std::uint64_t s = 0; s < count; ++s) {
          const double x0 = mu.draw(rng);
          std::fill(acc.begin(), acc.end(), 0.0);
          double x = x0;
          for (long long k = 0; k < N; ++k) {
            f.eval(x, val.data());
            for (int c = 0; c < d; ++c) acc[c] += val[c];
            if (k + 1 < N) x = apply(map, x);
          }
          for (int c = 0; c < d; ++c) st.W.push_back(acc[c] * scale);
          st.starts.push_back(x0);
        }
      });

  BirkhoffEnsemble e;
  e.N = N;
  e.d = d;
  e.seed = mc.seed;
  e.W.reserve(mc.samples * d);
  e.starts.reserve(mc.samples);
  for (auto& st : states) {
    e.W.insert(e.W.end(), st.W.begin(), st.W.end());
    e.starts.insert(e.starts.end(), st.starts.begin(), st.starts.end());
  }
  return e;
}

ObservableStream::ObservableStream(const MapParameter& map,
                                   const ObservableSpec& f, long long N,
                                   double x0)
    : map_(map), f_(&f), N_(N), d_(f.dim()), x0_(x0) {
  if (N < 1) throw std::invalid_argument("ObservableStream: N < 1");
  const bool retain = N <= (1ll << 20);
  std::vector<double> val(d_);
  std::vector<double> acc(d_, 0.0);
  if (retain) prefix_.assign(static_cast<std::size_t>(N + 1) * d_, 0.0);
  double x = x0;
  for (long long k = 0; k < N; ++k) {
    f.eval(x, val.data());
    for (int c = 0; c < d_; ++c) acc[c] += val[c];
    if (retain)
      for (int c = 0; c < d_; ++c)
        prefix_[static_cast<std::size_t>(k + 1) * d_ + c] = acc[c];
    if (k + 1 < N) x = apply(map, x);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  W_.resize(d_);
  for (int c = 0; c < d_; ++c) W_[c] = acc[c] * scale;
}

double ObservableStream::at(long long k, int c) const {
  if (k < 0 || k >= N_ || c < 0 || c >= d_)
    throw std::out_of_range("ObservableStream::at");
  if (!prefix_.empty())
    return prefix_[static_cast<std::size_t>(k + 1) * d_ + c] -
           prefix_[static_cast<std::size_t>(k) * d_ + c];
  double x = x0_;
  for (long long i = 0; i < k; ++i) x = apply(map_, x);
  std::vector<double> val(d_);
  f_->eval(x, val.data());
  return val[c];
}

std::vector<double> ObservableStream::window(long long a, long long b) const {
  std::vector<double> w(d_, 0.0);
  if (a >= b) return w;
  if (!prefix_.empty()) {
    for (int c = 0; c < d_; ++c)
      w[c] = prefix_[static_cast<std::size_t>(b) * d_ + c] -
             prefix_[static_cast<std::size_t>(a) * d_ + c];
    return w;
  }
  double x = x0_;
  std::vector<double> val(d_);
  for (long long k = 0; k < b; ++k) {
    if (k >= a) {
      f_->eval(x, val.data());
      for (int c = 0; c < d_; ++c) w[c] += val[c];
    }
    if (k + 1 < b) x = apply(map_, x);
  }
  return w;
}

std::vector<double> ObservableStream::gap_sum(long long n, long long K) const {
  if (n < 0 || n >= N_) throw std::out_of_range("gap_sum: n outside [0, N)");
  if (K < 0) throw std::out_of_range("gap_sum: negative K");
  const long long a = std::max<long long>(0, n - K);
  const long long b = std::min(N_, n + K + 1);
  const std::vector<double> w = window(a, b);
  const double scale = 1.0 / std::sqrt(static_cast<double>(N_));
  std::vector<double> out(W_);
  for (int c = 0; c < d_; ++c) out[c] -= w[c] * scale;
  return out;
}

CovarianceEstimate covariance_series(const MapParameter& map,
                                     const ObservableSpec& f, int n_max,
                                     double beta, const DensitySampler& mu,
                                     const McOptions& mc) {
  if (n_max < 0) throw std::invalid_argument("covariance_series: n_max < 0");
  if (mc.samples == 0)
    throw std::invalid_argument("covariance_series: zero samples");
  const int d = f.dim();
  const std::size_t dd = static_cast<std::size_t>(d) * d;

  // lag[n][i*d+j] accumulates f_i(T^n x) f_j(x).
  struct State {
    std::vector<MeanVar> lag;
  };
  const ChunkPlan plan{mc.samples, mc.chunk_size};
  auto states = run_chunks<State>(
      plan, mc.seed, mc.threads,
      [&](std::uint64_t, std::uint64_t, std::uint64_t count,
          std::mt19937_64& rng, State& st) {
        st.lag.assign(static_cast<std::size_t>(n_max + 1) * dd, MeanVar{});
        std::vector<double> v0(d), vn(d);
        for (std::uint64_t s = 0; s < count; ++s) {
          double x = mu.draw(rng);
          f.eval(x, v0.data());
          for (int n = 0; n <= n_max; ++n) {
            if (n == 0) {
              vn = v0;
            } else {
              x = apply(map, x);
              f.eval(x, vn.data());
            }
            MeanVar* row = st.lag.data() + static_cast<std::size_t>(n) * dd;
            for (int i = 0; i < d; ++i)
              for (int j = 0; j < d; ++j) row[i * d + j].add(vn[i] * v0[j]);
          }
        }
      });

  std::vector<MeanVar> lag(static_cast<std::size_t>(n_max + 1) * dd);
  for (const auto& st : states)
    for (std::size_t i = 0; i < lag.size(); ++i) lag[i].merge(st.lag[i]);

  CovarianceEstimate est;
  est.d = d;
  est.truncation = n_max;
  est.sigma.assign(dd, 0.0);
  est.term_norms.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    const MeanVar* row = lag.data() + static_cast<std::size_t>(n) * dd;
    double norm2 = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const double term =
            n == 0 ? row[i * d + j].mean()
                   : row[i * d + j].mean() + row[j * d + i].mean();
        est.sigma[i * d + j] += term;
        norm2 += term * term;
      }
    est.term_norms[n] = std::sqrt(norm2);
  }
  est.tail_rho_sum = beta < 0.5
                         ? tau_tail_sum(beta, n_max, 1000000)
                         : std::numeric_limits<double>::infinity();

  Eigen::MatrixXd S(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) S(i, j) = est.entry(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  est.min_eigenvalue = eig.eigenvalues().minCoeff();
  const double scale = std::max(1.0, std::abs(eig.eigenvalues().maxCoeff()));
  est.indefinite = est.min_eigenvalue <= 1e-10 * scale;
  return est;
}

}  // namespace pm
