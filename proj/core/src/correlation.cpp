#include "pm/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pm {

double rho(double n, double beta) {
  if (!(beta > 0.0) || !(beta < 1.0))
    throw std::invalid_argument("rho: beta outside (0,1)");
  if (n < 0.0) throw std::invalid_argument("rho: negative n");
  if (n <= 1.0) return 1.0;
  const double ib = 1.0 / beta;
  return std::pow(n, 1.0 - ib) * std::pow(std::log(n), ib);
}

void FunctionalSpec::validate() const {
  if (k < 1) throw std::invalid_argument("FunctionalSpec: k < 1");
  if (!F) throw std::invalid_argument("FunctionalSpec: missing F");
  if (times.size() != static_cast<std::size_t>(k) + 1)
    throw std::invalid_argument("FunctionalSpec: times must have k+1 entries");
  if (times[0] != 0)
    throw std::invalid_argument("FunctionalSpec: times[0] must be 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (times[i] < times[i - 1])
      throw std::invalid_argument("FunctionalSpec: times must be nondecreasing");
  if (gap_indices.empty())
    throw std::invalid_argument("FunctionalSpec: needs at least one gap index");
  for (std::size_t i = 0; i < gap_indices.size(); ++i) {
    if (gap_indices[i] < 0 || gap_indices[i] >= k)
      throw std::invalid_argument("FunctionalSpec: gap index outside [0, k)");
    if (i > 0 && gap_indices[i] <= gap_indices[i - 1])
      throw std::invalid_argument(
          "FunctionalSpec: gap indices must be strictly increasing");
  }
  const int lp = gap_indices.back();
  if (lip_consts.size() != static_cast<std::size_t>(lp) + 1)
    throw std::invalid_argument(
        "FunctionalSpec: lip_consts must cover arguments 0..l_p");
  for (double l : lip_consts)
    if (!(l >= 0.0) || !std::isfinite(l))
      throw std::invalid_argument("FunctionalSpec: bad Lipschitz constant");
  if (!(sup_norm >= 0.0) || !std::isfinite(sup_norm))
    throw std::invalid_argument("FunctionalSpec: bad sup norm");
}

double rho_gap_sum(const FunctionalSpec& spec, double beta) {
  double s = 0.0;
  for (int l : spec.gap_indices)
    s += rho(static_cast<double>(spec.times[l + 1] - spec.times[l]), beta);
  return s;
}

namespace {

void check_horizon(const AdmissibleSequence& seq, long long t_max,
                   const char* who) {
  if (t_max < 0) throw std::invalid_argument(std::string(who) + ": negative time");
  if (auto len = seq.length(); len && static_cast<std::uint64_t>(t_max) > *len)
    throw std::invalid_argument(std::string(who) +
                                ": times exceed the sequence length");
}

// Fills slots [first, last] with the orbit of x sampled at the given
// absolute times (nondecreasing within the range).
void orbit_args(const AdmissibleSequence& seq, double x,
                const std::vector<long long>& times, int first, int last,
                double* args) {
  double y = x;
  long long t = 0;
  for (int i = first; i <= last; ++i) {
    while (t < times[i]) {
      y = apply(seq.at(static_cast<std::size_t>(t + 1)), y);
      ++t;
    }
    args[i] = y;
  }
}

}  // namespace

CorrelationEstimate lhs_functional_correlation(
    const AdmissibleSequence& seq, const FunctionalSpec& spec,
    const DensitySampler& mu, const std::vector<DensitySampler>& mus,
    const McOptions& mc) {
  spec.validate();
  check_horizon(seq, spec.times.back(), "lhs_functional_correlation");
  const int p = static_cast<int>(spec.gap_indices.size());
  if (mus.size() != static_cast<std::size_t>(p))
    throw std::invalid_argument(
        "lhs_functional_correlation: needs one sampler per gap");
  if (mc.samples == 0)
    throw std::invalid_argument("lhs_functional_correlation: zero samples");

  // Block j covers argument indices [starts[j], ends[j]].
  std::vector<int> starts(p + 1), ends(p + 1);
  starts[0] = 0;
  for (int j = 0; j < p; ++j) {
    ends[j] = spec.gap_indices[j];
    starts[j + 1] = spec.gap_indices[j] + 1;
  }
  ends[p] = spec.k;

  struct State {
    BatchMeans diag, prod;
  };
  const ChunkPlan plan{mc.samples, mc.chunk_size};
  auto states = run_chunks<State>(
      plan, mc.seed, mc.threads,
      [&](std::uint64_t, std::uint64_t first, std::uint64_t count,
          std::mt19937_64& rng, State& st) {
        std::vector<double> args(spec.k + 1);
        for (std::uint64_t s = first; s < first + count; ++s) {
          const int b = BatchMeans::batch_of(s, mc.samples);
          const double x = mu.draw(rng);
          orbit_args(seq, x, spec.times, 0, spec.k, args.data());
          st.diag.add(b, spec.F(args));
          orbit_args(seq, mu.draw(rng), spec.times, starts[0], ends[0],
                     args.data());
          for (int j = 1; j <= p; ++j)
            orbit_args(seq, mus[j - 1].draw(rng), spec.times, starts[j],
                       ends[j], args.data());
          st.prod.add(b, spec.F(args));
        }
      });

  BatchMeans diag, prod;
  for (const auto& st : states) {
    diag.merge(st.diag);
    prod.merge(st.prod);
  }
  CorrelationEstimate est;
  est.value = diag.mean() - prod.mean();
  est.std_error = std::hypot(diag.std_error(), prod.std_error());
  est.samples = mc.samples;
  est.seed = mc.seed;
  return est;
}

CorrelationEstimate multicorrelation(const AdmissibleSequence& seq,
                                     const std::vector<ScalarObservable>& fs,
                                     const std::vector<long long>& times,
                                     int gap_index, const DensitySampler& mu,
                                     const McOptions& mc) {
  const int k = static_cast<int>(times.size()) - 1;
  if (k < 1) throw std::invalid_argument("multicorrelation: needs k >= 1");
  if (fs.size() != times.size())
    throw std::invalid_argument("multicorrelation: one observable per time");
  if (times[0] != 0 || !std::is_sorted(times.begin(), times.end()))
    throw std::invalid_argument("multicorrelation: bad time list");
  if (gap_index < 0 || gap_index >= k)
    throw std::invalid_argument("multicorrelation: gap index outside [0, k)");
  check_horizon(seq, times.back(), "multicorrelation");
  if (mc.samples == 0)
    throw std::invalid_argument("multicorrelation: zero samples");

  struct State {
    BatchMeans full, head, tail;
  };
  const ChunkPlan plan{mc.samples, mc.chunk_size};
  auto states = run_chunks<State>(
      plan, mc.seed, mc.threads,
      [&](std::uint64_t, std::uint64_t first, std::uint64_t count,
          std::mt19937_64& rng, State& st) {
        std::vector<double> args(k + 1);
        for (std::uint64_t s = first; s < first + count; ++s) {
          const int b = BatchMeans::batch_of(s, mc.samples);

          orbit_args(seq, mu.draw(rng), times, 0, k, args.data());
          double hg = 1.0;
          for (int i = 0; i <= k; ++i) hg *= fs[i].f(args[i]);
          st.full.add(b, hg);

          orbit_args(seq, mu.draw(rng), times, 0, gap_index, args.data());
          double h = 1.0;
          for (int i = 0; i <= gap_index; ++i) h *= fs[i].f(args[i]);
          st.head.add(b, h);

          orbit_args(seq, mu.draw(rng), times, gap_index + 1, k, args.data());
          double g = 1.0;
          for (int i = gap_index + 1; i <= k; ++i) g *= fs[i].f(args[i]);
          st.tail.add(b, g);
        }
      });

  BatchMeans full, head, tail;
  for (const auto& st : states) {
    full.merge(st.full);
    head.merge(st.head);
    tail.merge(st.tail);
  }
  const double mh = head.mean(), mg = tail.mean();
  CorrelationEstimate est;
  est.value = full.mean() - mh * mg;
  est.std_error = std::sqrt(full.std_error() * full.std_error() +
                            mg * mg * head.std_error() * head.std_error() +
                            mh * mh * tail.std_error() * tail.std_error());
  est.samples = mc.samples;
  est.seed = mc.seed;
  return est;
}

std::vector<SweepPoint> pair_correlation_sweep(
    const AdmissibleSequence& seq, const ScalarObservable& f,
    const ScalarObservable& g, const std::vector<long long>& gaps,
    const DensitySampler& mu, const McOptions& mc) {
  if (gaps.empty()) throw std::invalid_argument("pair_correlation_sweep: no gaps");
  if (!std::is_sorted(gaps.begin(), gaps.end()) || gaps.front() < 0)
    throw std::invalid_argument("pair_correlation_sweep: gaps must be sorted");
  check_horizon(seq, gaps.back(), "pair_correlation_sweep");
  if (mc.samples == 0)
    throw std::invalid_argument("pair_correlation_sweep: zero samples");

  const std::size_t ng = gaps.size();
  const long long horizon = gaps.back();

  struct State {
    std::vector<BatchMeans> diag, gprod;
    BatchMeans fprod;
  };
  const ChunkPlan plan{mc.samples, mc.chunk_size};
  auto states = run_chunks<State>(
      plan, mc.seed, mc.threads,
      [&](std::uint64_t, std::uint64_t first, std::uint64_t count,
          std::mt19937_64& rng, State& st) {
        st.diag.resize(ng);
        st.gprod.resize(ng);
        for (std::uint64_t s = first; s < first + count; ++s) {
          const int b = BatchMeans::batch_of(s, mc.samples);

          double x = mu.draw(rng);
          const double fx = f.f(x);
          std::size_t next = 0;
          for (long long t = 0; t <= horizon; ++t) {
            while (next < ng && gaps[next] == t) {
              st.diag[next].add(b, fx * g.f(x));
              ++next;
            }
            if (t < horizon)
              x = apply(seq.at(static_cast<std::size_t>(t + 1)), x);
          }

          double y = mu.draw(rng);
          st.fprod.add(b, f.f(y));
          next = 0;
          for (long long t = 0; t <= horizon; ++t) {
            while (next < ng && gaps[next] == t) {
              st.gprod[next].add(b, g.f(y));
              ++next;
            }
            if (t < horizon)
              y = apply(seq.at(static_cast<std::size_t>(t + 1)), y);
          }
        }
      });

  std::vector<BatchMeans> diag(ng), gprod(ng);
  BatchMeans fprod;
  for (const auto& st : states) {
    fprod.merge(st.fprod);
    for (std::size_t i = 0; i < ng; ++i) {
      diag[i].merge(st.diag[i]);
      gprod[i].merge(st.gprod[i]);
    }
  }

  std::vector<SweepPoint> out(ng);
  const double mf = fprod.mean(), sef = fprod.std_error();
  for (std::size_t i = 0; i < ng; ++i) {
    const double mg = gprod[i].mean(), seg = gprod[i].std_error();
    SweepPoint& pt = out[i];
    pt.n = gaps[i];
    pt.est.value = diag[i].mean() - mf * mg;
    pt.est.std_error = std::sqrt(diag[i].std_error() * diag[i].std_error() +
                                 mg * mg * sef * sef + mf * mf * seg * seg);
    pt.est.samples = mc.samples;
    pt.est.seed = mc.seed;
  }
  return out;
}

double bound_conformance_constant(
    const std::vector<std::pair<FunctionalSpec, CorrelationEstimate>>& sweep,
    double beta) {
  double c = 0.0;
  for (const auto& [spec, est] : sweep) {
    double lip = 0.0;
    for (double l : spec.lip_consts) lip = std::max(lip, l);
    const double denom = (spec.sup_norm + lip) * rho_gap_sum(spec, beta);
    const double num = std::abs(est.value);
    if (denom > 0.0)
      c = std::max(c, num / denom);
    else if (num > 0.0)
      return std::numeric_limits<double>::infinity();
  }
  return c;
}

}  // namespace pm
