#include "pm/screens.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pm/correlation.hpp"
#include "pm/rate_fit.hpp"

namespace pm {

void B2Tuple::validate(int d) const {
  if (i < 0 || j < i || k < j)
    throw std::invalid_argument("B2Tuple: needs 0 <= i <= j <= k");
  if (p < 0 || q < 0 || l < q)
    throw std::invalid_argument("B2Tuple: needs p >= 0 and 0 <= q <= l");
  for (int comp : {alpha, beta, gamma})
    if (comp < 0 || comp >= d)
      throw std::invalid_argument("B2Tuple: component index outside [0, d)");
  for (int e : {a, b, c})
    if (e < 0) throw std::invalid_argument("B2Tuple: negative exponent");
  if (a + b + c < 1 || a + b + c > 3)
    throw std::invalid_argument("B2Tuple: needs 1 <= a + b + c <= 3");
}

std::vector<BoundedDifferentiable> b2_probe_family(int d, double f_sup) {
  if (d < 1) throw std::invalid_argument("b2_probe_family: d < 1");
  if (!(f_sup >= 0.0))
    throw std::invalid_argument("b2_probe_family: negative sup norm");
  const int dim = 4 * d;
  const double s = std::max(1.0, f_sup);
  std::vector<BoundedDifferentiable> fam;

  BoundedDifferentiable bump;
  bump.name = "bump";
  bump.dim = dim;
  bump.value = [s](std::span<const double> u) {
    double r2 = 0.0;
    for (double ui : u) r2 += ui * ui;
    return std::exp(-0.5 * r2 / (s * s));
  };
  bump.sup_norm = 1.0;
  bump.grad_norm = std::exp(-0.5) / s;
  fam.push_back(std::move(bump));

  BoundedDifferentiable tanh_s;
  tanh_s.name = "tanh-s";
  tanh_s.dim = dim;
  tanh_s.value = [](std::span<const double> u) { return std::tanh(u[0]); };
  tanh_s.sup_norm = 1.0;
  tanh_s.grad_norm = 1.0;
  fam.push_back(std::move(tanh_s));

  BoundedDifferentiable tanh_f;
  tanh_f.name = "tanh-f";
  tanh_f.dim = dim;
  tanh_f.value = [d](std::span<const double> u) { return std::tanh(u[3 * d]); };
  tanh_f.sup_norm = 1.0;
  tanh_f.grad_norm = 1.0;
  fam.push_back(std::move(tanh_f));
  return fam;
}

B2Report check_B2(const MapParameter& map, const ObservableSpec& f,
                  double beta, const std::vector<BoundedDifferentiable>& F,
                  const std::vector<B2Tuple>& tuples, const DensitySampler& mu,
                  const McOptions& mc) {
  const int d = f.dim();
  if (F.empty() || tuples.empty())
    throw std::invalid_argument("check_B2: empty probe family or tuple set");
  for (const auto& probe : F)
    if (probe.dim != 4 * d)
      throw std::invalid_argument("check_B2: probe dimension must be 4d");
  long long horizon = 0;
  for (const auto& t : tuples) {
    t.validate(d);
    horizon = std::max(horizon, t.k + t.p + t.l);
  }
  if (mc.samples == 0) throw std::invalid_argument("check_B2: zero samples");

  const std::size_t cells = F.size() * tuples.size();
  struct State {
    std::vector<MeanVar> ab, a, b;
  };
  const ChunkPlan plan{mc.samples, mc.chunk_size};
  auto states = run_chunks<State>(
      plan, mc.seed, mc.threads,
      [&](std::uint64_t, std::uint64_t, std::uint64_t count,
          std::mt19937_64& rng, State& st) {
        st.ab.assign(cells, MeanVar{});
        st.a.assign(cells, MeanVar{});
        st.b.assign(cells, MeanVar{});
        std::vector<double> orbit(static_cast<std::size_t>(horizon + 1) * d);
        std::vector<double> prefix(static_cast<std::size_t>(horizon + 2) * d,
                                   0.0);
        std::vector<double> args(4 * d);
        for (std::uint64_t smp = 0; smp < count; ++smp) {
          double x = mu.draw(rng);
          for (long long t = 0; t <= horizon; ++t) {
            double* row = orbit.data() + static_cast<std::size_t>(t) * d;
            f.eval(x, row);
            for (int c = 0; c < d; ++c)
              prefix[static_cast<std::size_t>(t + 1) * d + c] =
                  prefix[static_cast<std::size_t>(t) * d + c] + row[c];
            if (t < horizon) x = apply(map, x);
          }
          for (std::size_t ti = 0; ti < tuples.size(); ++ti) {
            const B2Tuple& tp = tuples[ti];
            for (int c = 0; c < d; ++c) {
              args[c] = prefix[static_cast<std::size_t>(tp.i) * d + c];
              args[d + c] = orbit[static_cast<std::size_t>(tp.i) * d + c];
              args[2 * d + c] = orbit[static_cast<std::size_t>(tp.j) * d + c];
              args[3 * d + c] = orbit[static_cast<std::size_t>(tp.k) * d + c];
            }
            double prod = 1.0;
            const double va =
                orbit[static_cast<std::size_t>(tp.k + tp.p) * d + tp.alpha];
            const double vb =
                orbit[static_cast<std::size_t>(tp.k + tp.p + tp.q) * d + tp.beta];
            const double vc =
                orbit[static_cast<std::size_t>(tp.k + tp.p + tp.l) * d + tp.gamma];
            for (int e = 0; e < tp.a; ++e) prod *= va;
            for (int e = 0; e < tp.b; ++e) prod *= vb;
            for (int e = 0; e < tp.c; ++e) prod *= vc;
            for (std::size_t fi = 0; fi < F.size(); ++fi) {
              const double av = F[fi].value(args);
              const std::size_t cell = fi * tuples.size() + ti;
              st.ab[cell].add(av * prod);
              st.a[cell].add(av);
              st.b[cell].add(prod);
            }
          }
        }
      });

  std::vector<MeanVar> ab(cells), a(cells), b(cells);
  for (const auto& st : states)
    for (std::size_t i = 0; i < cells; ++i) {
      ab[i].merge(st.ab[i]);
      a[i].merge(st.a[i]);
      b[i].merge(st.b[i]);
    }

  B2Report rep;
  for (std::size_t fi = 0; fi < F.size(); ++fi)
    for (std::size_t ti = 0; ti < tuples.size(); ++ti) {
      const std::size_t cell = fi * tuples.size() + ti;
      const double ma = a[cell].mean(), mb = b[cell].mean();
      B2Probe pr;
      pr.probe = F[fi].name;
      pr.tuple = tuples[ti];
      pr.cov = ab[cell].mean() - ma * mb;
      pr.std_error =
          std::sqrt(ab[cell].std_error() * ab[cell].std_error() +
                    mb * mb * a[cell].std_error() * a[cell].std_error() +
                    ma * ma * b[cell].std_error() * b[cell].std_error());
      pr.rho_p = rho(static_cast<double>(tuples[ti].p), beta);
      const double denom =
          (F[fi].sup_norm + F[fi].grad_norm) * pr.rho_p;
      pr.ratio = std::abs(pr.cov) / denom;
      rep.worst_ratio = std::max(rep.worst_ratio, pr.ratio);
      rep.C_fit = std::max(
          rep.C_fit,
          std::max(0.0, std::abs(pr.cov) - 3.0 * pr.std_error) / denom);
      rep.probes.push_back(std::move(pr));
    }
  return rep;
}

CoboundaryReport coboundary_screen(const MapParameter& map,
                                   const ObservableSpec& f,
                                   const std::vector<long long>& N_grid,
                                   int n_directions, const DensitySampler& mu,
                                   const McOptions& mc) {
  const int d = f.dim();
  if (N_grid.size() < 4)
    throw std::invalid_argument(
        "coboundary_screen: needs at least 4 grid points for the growth fit");
  if (!std::is_sorted(N_grid.begin(), N_grid.end()) || N_grid.front() < 1)
    throw std::invalid_argument("coboundary_screen: bad N grid");
  if (n_directions < 1)
    throw std::invalid_argument("coboundary_screen: needs a direction");
  if (mc.samples == 0)
    throw std::invalid_argument("coboundary_screen: zero samples");

  const std::size_t G = N_grid.size();
  const std::size_t dd = static_cast<std::size_t>(d) * d;
  const long long N_max = N_grid.back();

  // First and second moments of S_N per grid point; every direction's
  // variance is the quadratic form in the accumulated covariance.
  struct State {
    std::vector<double> s1, s2;
    std::uint64_t n = 0;
  };
  const ChunkPlan plan{mc.samples, mc.chunk_size};
  auto states = run_chunks<State>(
      plan, mc.seed, mc.threads,
      [&](std::uint64_t, std::uint64_t, std::uint64_t count,
          std::mt19937_64& rng, State& st) {
        st.s1.assign(G * d, 0.0);
        st.s2.assign(G * dd, 0.0);
        std::vector<double> acc(d), val(d);
        for (std::uint64_t smp = 0; smp < count; ++smp) {
          double x = mu.draw(rng);
          std::fill(acc.begin(), acc.end(), 0.0);
          std::size_t g = 0;
          for (long long k = 0; k < N_max; ++k) {
            f.eval(x, val.data());
            for (int c = 0; c < d; ++c) acc[c] += val[c];
            while (g < G && N_grid[g] == k + 1) {
              double* s1 = st.s1.data() + g * d;
              double* s2 = st.s2.data() + g * dd;
              for (int i = 0; i < d; ++i) {
                s1[i] += acc[i];
                for (int j = 0; j < d; ++j) s2[i * d + j] += acc[i] * acc[j];
              }
              ++g;
            }
            if (k + 1 < N_max) x = apply(map, x);
          }
          ++st.n;
        }
      });

  std::vector<double> s1(G * d, 0.0), s2(G * dd, 0.0);
  double n = 0.0;
  for (const auto& st : states) {
    for (std::size_t i = 0; i < s1.size(); ++i) s1[i] += st.s1[i];
    for (std::size_t i = 0; i < s2.size(); ++i) s2[i] += st.s2[i];
    n += static_cast<double>(st.n);
  }
  std::vector<double> cov(G * dd);
  for (std::size_t g = 0; g < G; ++g)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        cov[g * dd + i * d + j] = s2[g * dd + i * d + j] / n -
                                  (s1[g * d + i] / n) * (s1[g * d + j] / n);

  std::vector<std::vector<double>> dirs;
  if (d == 1) {
    dirs.push_back({1.0});
  } else if (d == 2) {
    for (int j = 0; j < n_directions; ++j) {
      const double t = std::numbers::pi * j / n_directions;
      dirs.push_back({std::cos(t), std::sin(t)});
    }
  } else {
    std::uint64_t state = 0x636f626f756e6421ull;
    std::mt19937_64 rng(splitmix64(state));
    for (int j = 0; j < n_directions; ++j) {
      std::vector<double> v(d);
      double norm = 0.0;
      do {
        norm = 0.0;
        for (int c = 0; c < d; ++c) {
          v[c] = normal01(rng);
          norm += v[c] * v[c];
        }
      } while (norm == 0.0);
      norm = std::sqrt(norm);
      for (int c = 0; c < d; ++c) v[c] /= norm;
      dirs.push_back(std::move(v));
    }
  }

  CoboundaryReport rep;
  for (auto& v : dirs) {
    CoboundaryReport::Direction dir;
    dir.v = v;
    dir.variances.resize(G);
    std::vector<DecayPoint> pts(G);
    for (std::size_t g = 0; g < G; ++g) {
      double q = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) q += v[i] * cov[g * dd + i * d + j] * v[j];
      dir.variances[g] = q;
      pts[g] = {static_cast<double>(N_grid[g]), q, 0.0};
    }
    try {
      dir.growth_exponent = fit_decay(pts).exponent;
      dir.flagged = dir.growth_exponent < 0.5;
    } catch (const std::invalid_argument&) {
      // Variances indistinguishable from zero: degenerate direction.
      dir.growth_exponent = 0.0;
      dir.flagged = true;
    }
    rep.any_flagged = rep.any_flagged || dir.flagged;
    rep.directions.push_back(std::move(dir));
  }
  return rep;
}

}  // namespace pm
