#include "pm/stein.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pm/correlation.hpp"
#include "pm/csv.hpp"
#include "pm/quadrature.hpp"

namespace pm {

long long default_gap_radius(long long N, double beta) {
  if (N < 1) throw std::invalid_argument("default_gap_radius: N < 1");
  if (!(beta > 0.0) || !(beta < 1.0))
    throw std::invalid_argument("default_gap_radius: beta outside (0,1)");
  return static_cast<long long>(
      std::floor(std::pow(static_cast<double>(N), beta) + 1e-9));
}

namespace {

// Integral of u^{-s-1+...} ... specifically: int_L^inf u^(q) (ln u)^r du with
// s = -(q+1) > 0 equals s^{-(r+1)} Gamma(r+1, s ln L).
double log_power_tail(double s, double r, double L) {
  return std::pow(s, -(r + 1.0)) * upper_incomplete_gamma(r + 1.0, s * std::log(L));
}

}  // namespace

double weighted_tau_sum(double beta, long long tail_cap) {
  if (!(beta > 0.0) || !(beta < 1.0 / 3.0))
    throw std::domain_error(
        "weighted_tau_sum: divergent tail, needs beta < 1/3");
  if (tail_cap < 2) throw std::invalid_argument("weighted_tau_sum: cap < 2");
  double s = 0.0;
  for (long long i = 0; i <= tail_cap; ++i)
    s += static_cast<double>(i + 1) * rho(static_cast<double>(i), beta);
  const double r = 1.0 / beta;
  const double L = static_cast<double>(tail_cap) + 0.5;
  // sum_{i>cap} (i+1) rho(i) ~ int_L (u rho(u) + rho(u)) du, midpoint rule.
  return s + log_power_tail(r - 3.0, r, L) + log_power_tail(r - 2.0, r, L);
}

double tau_tail_sum(double beta, long long K, long long tail_cap) {
  if (!(beta > 0.0) || !(beta < 0.5))
    throw std::domain_error("tau_tail_sum: divergent tail, needs beta < 1/2");
  if (K < 0) throw std::invalid_argument("tau_tail_sum: K < 0");
  if (tail_cap <= K) throw std::invalid_argument("tau_tail_sum: cap <= K");
  double s = 0.0;
  for (long long i = K + 1; i <= tail_cap; ++i)
    s += rho(static_cast<double>(i), beta);
  const double r = 1.0 / beta;
  const double L = static_cast<double>(tail_cap) + 0.5;
  return s + log_power_tail(r - 2.0, r, L);
}

double stein_constant(int d, double C2, double C4, double d2_norm,
                      double d3_norm, double f_sup, double weighted_sum) {
  if (d < 1) throw std::invalid_argument("stein_constant: d < 1");
  for (double v : {C2, C4, d2_norm, d3_norm, f_sup, weighted_sum})
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("stein_constant: negative or non-finite input");
  const double dd = static_cast<double>(d);
  return 12.0 * dd * dd * dd * std::max(C2, std::sqrt(C4)) *
         (d2_norm + f_sup * d3_norm) * weighted_sum;
}

double stein_bound(double C_star, long long N, long long K, double tau_tail,
                   double tilde_tau) {
  if (N < 1) throw std::invalid_argument("stein_bound: N < 1");
  if (K < 0 || K >= N) throw std::invalid_argument("stein_bound: K outside [0, N)");
  const double rootN = std::sqrt(static_cast<double>(N));
  return C_star * (static_cast<double>(K + 1) / rootN + tau_tail) +
         rootN * tilde_tau;
}

A1Report check_A1(const MapParameter& map, const ObservableSpec& f,
                  double beta, const std::vector<long long>& lags,
                  const DensitySampler& mu, const McOptions& mc) {
  if (lags.empty()) throw std::invalid_argument("check_A1: empty lag grid");
  if (!std::is_sorted(lags.begin(), lags.end()) || lags.front() < 0)
    throw std::invalid_argument("check_A1: lags must be sorted and nonnegative");
  if (mc.samples == 0) throw std::invalid_argument("check_A1: zero samples");
  const int d = f.dim();
  const std::size_t dd = static_cast<std::size_t>(d) * d;

  // Thinned sub-grid for the quadruple tuples; the full grid cubed would
  // dominate the run for no extra information.
  std::vector<long long> sub;
  {
    const std::size_t q = std::min<std::size_t>(4, lags.size());
    for (std::size_t i = 0; i < q; ++i)
      sub.push_back(lags[i * (lags.size() - 1) / (q > 1 ? q - 1 : 1)]);
    std::sort(sub.begin(), sub.end());
    sub.erase(std::unique(sub.begin(), sub.end()), sub.end());
  }

  struct Tuple {
    long long l, m, n;
  };
  std::vector<Tuple> tuples;
  std::set<std::pair<long long, long long>> mn_set;
  for (long long a : sub)
    for (long long b : sub)
      for (long long c : sub) {
        tuples.push_back({a, a + b, a + b + c});
        mn_set.insert({a + b, a + b + c});
      }
  std::vector<std::pair<long long, long long>> mn(mn_set.begin(), mn_set.end());
  std::map<std::pair<long long, long long>, std::size_t> mn_index;
  for (std::size_t i = 0; i < mn.size(); ++i) mn_index[mn[i]] = i;

  long long horizon = lags.back();
  for (const auto& t : tuples) horizon = std::max(horizon, t.n);

  const std::size_t n_pair = lags.size() * dd;
  const std::size_t n_quad = tuples.size() * dd * dd;
  const std::size_t n_mn = mn.size() * dd;

  struct State {
    std::vector<MeanVar> pair, quad, late;
  };
  const ChunkPlan plan{mc.samples, mc.chunk_size};
  auto states = run_chunks<State>(
      plan, mc.seed, mc.threads,
      [&](std::uint64_t, std::uint64_t, std::uint64_t count,
          std::mt19937_64& rng, State& st) {
        st.pair.assign(n_pair, MeanVar{});
        st.quad.assign(n_quad, MeanVar{});
        st.late.assign(n_mn, MeanVar{});
        std::vector<double> orbit(static_cast<std::size_t>(horizon + 1) * d);
        for (std::uint64_t s = 0; s < count; ++s) {
          double x = mu.draw(rng);
          for (long long k = 0; k <= horizon; ++k) {
            f.eval(x, orbit.data() + static_cast<std::size_t>(k) * d);
            if (k < horizon) x = apply(map, x);
          }
          const double* v0 = orbit.data();
          for (std::size_t li = 0; li < lags.size(); ++li) {
            const double* vn =
                orbit.data() + static_cast<std::size_t>(lags[li]) * d;
            MeanVar* row = st.pair.data() + li * dd;
            for (int a = 0; a < d; ++a)
              for (int b = 0; b < d; ++b) row[a * d + b].add(v0[a] * vn[b]);
          }
          for (std::size_t ti = 0; ti < tuples.size(); ++ti) {
            const double* vl =
                orbit.data() + static_cast<std::size_t>(tuples[ti].l) * d;
            const double* vm =
                orbit.data() + static_cast<std::size_t>(tuples[ti].m) * d;
            const double* vn =
                orbit.data() + static_cast<std::size_t>(tuples[ti].n) * d;
            MeanVar* row = st.quad.data() + ti * dd * dd;
            for (int a = 0; a < d; ++a)
              for (int b = 0; b < d; ++b)
                for (int c = 0; c < d; ++c)
                  for (int e = 0; e < d; ++e)
                    row[((a * d + b) * d + c) * d + e].add(v0[a] * vl[b] *
                                                           vm[c] * vn[e]);
          }
          for (std::size_t pi = 0; pi < mn.size(); ++pi) {
            const double* vm =
                orbit.data() + static_cast<std::size_t>(mn[pi].first) * d;
            const double* vn =
                orbit.data() + static_cast<std::size_t>(mn[pi].second) * d;
            MeanVar* row = st.late.data() + pi * dd;
            for (int c = 0; c < d; ++c)
              for (int e = 0; e < d; ++e) row[c * d + e].add(vm[c] * vn[e]);
          }
        }
      });

  std::vector<MeanVar> pair(n_pair), quad(n_quad), late(n_mn);
  for (const auto& st : states) {
    for (std::size_t i = 0; i < n_pair; ++i) pair[i].merge(st.pair[i]);
    for (std::size_t i = 0; i < n_quad; ++i) quad[i].merge(st.quad[i]);
    for (std::size_t i = 0; i < n_mn; ++i) late[i].merge(st.late[i]);
  }

  std::map<long long, std::size_t> lag_index;
  for (std::size_t i = 0; i < lags.size(); ++i) lag_index[lags[i]] = i;

  A1Report rep;
  rep.pair_probes = static_cast<int>(n_pair);
  rep.quad_probes = static_cast<int>(2 * n_quad);
  for (std::size_t li = 0; li < lags.size(); ++li) {
    const double r = rho(static_cast<double>(lags[li]), beta);
    for (std::size_t e = 0; e < dd; ++e) {
      const MeanVar& mv = pair[li * dd + e];
      const double est = std::abs(mv.mean());
      rep.worst_pair_ratio = std::max(rep.worst_pair_ratio, est / r);
      rep.C2 = std::max(rep.C2, std::max(0.0, est - 3.0 * mv.std_error()) / r);
    }
  }
  for (std::size_t ti = 0; ti < tuples.size(); ++ti) {
    const auto& t = tuples[ti];
    const double r_outer = std::min(rho(static_cast<double>(t.l), beta),
                                    rho(static_cast<double>(t.n - t.m), beta));
    const double r_inner = rho(static_cast<double>(t.m - t.l), beta);
    const std::size_t li = lag_index.at(t.l);
    const std::size_t pi = mn_index.at({t.m, t.n});
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c)
          for (int e = 0; e < d; ++e) {
            const MeanVar& q = quad[ti * dd * dd + ((a * d + b) * d + c) * d + e];
            const MeanVar& p1 = pair[li * dd + a * d + b];
            const MeanVar& p2 = late[pi * dd + c * d + e];
            const double est4 = std::abs(q.mean());
            rep.worst_quad_ratio =
                std::max(rep.worst_quad_ratio, est4 / r_outer);
            rep.C4 = std::max(
                rep.C4, std::max(0.0, est4 - 3.0 * q.std_error()) / r_outer);
            const double cov = q.mean() - p1.mean() * p2.mean();
            const double se =
                std::sqrt(q.std_error() * q.std_error() +
                          p2.mean() * p2.mean() * p1.std_error() * p1.std_error() +
                          p1.mean() * p1.mean() * p2.std_error() * p2.std_error());
            rep.worst_quad_ratio =
                std::max(rep.worst_quad_ratio, std::abs(cov) / r_inner);
            rep.C4 = std::max(
                rep.C4, std::max(0.0, std::abs(cov) - 3.0 * se) / r_inner);
          }
  }
  return rep;
}

A2Report check_A2_tilde_tau(const MapParameter& map, const ObservableSpec& f,
                            const SmoothTestFunction& h, long long N,
                            long long K, const CovarianceEstimate& cov,
                            double beta, const DensitySampler& mu,
                            const McOptions& mc) {
  if (N < 1) throw std::invalid_argument("check_A2_tilde_tau: N < 1");
  if (K < 0) throw std::invalid_argument("check_A2_tilde_tau: K < 0");
  const int d = f.dim();
  if (h.dim != d)
    throw std::invalid_argument("check_A2_tilde_tau: h dimension mismatch");
  if (!h.gradient)
    throw std::invalid_argument("check_A2_tilde_tau: h has no gradient");
  if (mc.samples == 0)
    throw std::invalid_argument("check_A2_tilde_tau: zero samples");

  std::vector<long long> ns = {0, N / 4, N / 2, 3 * N / 4, N - 1};
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  const std::vector<double> ts = {0.0, 0.5, 1.0};
  std::vector<std::vector<double>> vs = {std::vector<double>(d, 0.0)};
  for (int c = 0; c < d; ++c) {
    const double s = std::sqrt(std::max(0.0, cov.entry(c, c)));
    std::vector<double> vp(d, 0.0), vm(d, 0.0);
    vp[c] = s;
    vm[c] = -s;
    vs.push_back(vp);
    vs.push_back(vm);
  }

  struct Probe {
    long long n;
    double t;
    std::size_t v;
  };
  std::vector<Probe> probes;
  for (long long n : ns)
    for (double t : ts)
      for (std::size_t v = 0; v < vs.size(); ++v) probes.push_back({n, t, v});

  const double scale = 1.0 / std::sqrt(static_cast<double>(N));

  struct State {
    std::vector<MeanVar> acc;
  };
  const ChunkPlan plan{mc.samples, mc.chunk_size};
  auto states = run_chunks<State>(
      plan, mc.seed, mc.threads,
      [&](std::uint64_t, std::uint64_t, std::uint64_t count,
          std::mt19937_64& rng, State& st) {
        st.acc.assign(probes.size(), MeanVar{});
        std::vector<double> prefix(static_cast<std::size_t>(N + 1) * d, 0.0);
        std::vector<double> val(d), arg(d), grad(d);
        for (std::uint64_t s = 0; s < count; ++s) {
          double x = mu.draw(rng);
          for (long long k = 0; k < N; ++k) {
            f.eval(x, val.data());
            for (int c = 0; c < d; ++c)
              prefix[static_cast<std::size_t>(k + 1) * d + c] =
                  prefix[static_cast<std::size_t>(k) * d + c] + val[c];
            if (k + 1 < N) x = apply(map, x);
          }
          const double* total = prefix.data() + static_cast<std::size_t>(N) * d;
          for (std::size_t pi = 0; pi < probes.size(); ++pi) {
            const auto& pr = probes[pi];
            const long long a = std::max<long long>(0, pr.n - K);
            const long long b = std::min(N, pr.n + K + 1);
            for (int c = 0; c < d; ++c) {
              const double win = prefix[static_cast<std::size_t>(b) * d + c] -
                                 prefix[static_cast<std::size_t>(a) * d + c];
              arg[c] = vs[pr.v][c] + pr.t * (total[c] - win) * scale;
            }
            h.gradient(arg, grad);
            double dot = 0.0;
            for (int c = 0; c < d; ++c) {
              const double fn = prefix[static_cast<std::size_t>(pr.n + 1) * d + c] -
                                prefix[static_cast<std::size_t>(pr.n) * d + c];
              dot += fn * grad[c];
            }
            st.acc[pi].add(dot);
          }
        }
      });

  std::vector<MeanVar> acc(probes.size());
  for (const auto& st : states)
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i].merge(st.acc[i]);

  A2Report rep;
  rep.probes = static_cast<int>(probes.size());
  for (const auto& mv : acc) {
    rep.tilde_tau = std::max(rep.tilde_tau, std::abs(mv.mean()));
    rep.max_std_error = std::max(rep.max_std_error, mv.std_error());
  }
  rep.rho_ratio = rep.tilde_tau / rho(static_cast<double>(K), beta);
  return rep;
}

void SteinBudget::recompute() {
  C_star = stein_constant(d, C2, C4, d2_norm, d3_norm, f_sup,
                          weighted_tau_sum(beta, tail_cap));
  bound = stein_bound(C_star, N, K, tau_tail_sum(beta, K, tail_cap), tilde_tau);
}

std::string SteinBudget::serialize() const {
  std::ostringstream out;
  out << "d=" << d << "\n";
  out << "beta=" << format_double(beta) << "\n";
  out << "C2=" << format_double(C2) << "\n";
  out << "C4=" << format_double(C4) << "\n";
  out << "grad_norm=" << format_double(grad_norm) << "\n";
  out << "d2_norm=" << format_double(d2_norm) << "\n";
  out << "d3_norm=" << format_double(d3_norm) << "\n";
  out << "f_sup=" << format_double(f_sup) << "\n";
  out << "N=" << N << "\n";
  out << "K=" << K << "\n";
  out << "tail_cap=" << tail_cap << "\n";
  out << "tilde_tau=" << format_double(tilde_tau) << "\n";
  out << "C_star=" << format_double(C_star) << "\n";
  out << "bound=" << format_double(bound) << "\n";
  return out.str();
}

SteinBudget SteinBudget::parse(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("SteinBudget::parse: bad line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto need = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end())
      throw std::invalid_argument(std::string("SteinBudget::parse: missing ") +
                                  key);
    return it->second;
  };
  SteinBudget b;
  b.d = std::stoi(need("d"));
  b.beta = std::stod(need("beta"));
  b.C2 = std::stod(need("C2"));
  b.C4 = std::stod(need("C4"));
  b.grad_norm = std::stod(need("grad_norm"));
  b.d2_norm = std::stod(need("d2_norm"));
  b.d3_norm = std::stod(need("d3_norm"));
  b.f_sup = std::stod(need("f_sup"));
  b.N = std::stoll(need("N"));
  b.K = std::stoll(need("K"));
  b.tail_cap = std::stoll(need("tail_cap"));
  b.tilde_tau = std::stod(need("tilde_tau"));
  b.C_star = std::stod(need("C_star"));
  b.bound = std::stod(need("bound"));
  return b;
}

}  // namespace pm
