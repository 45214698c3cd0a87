#include "runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>

#include "pm/birkhoff.hpp"
#include "pm/cone.hpp"
#include "pm/correlation.hpp"
#include "pm/csv.hpp"
#include "pm/distance.hpp"
#include "pm/grid_density.hpp"
#include "pm/map.hpp"
#include "pm/observable.hpp"
#include "pm/parallel.hpp"
#include "pm/partition.hpp"
#include "pm/rate_fit.hpp"
#include "pm/sampling.hpp"
#include "pm/screens.hpp"
#include "pm/stein.hpp"
#include "pm/transfer.hpp"

#ifndef PMTOOL_VERSION
#define PMTOOL_VERSION "0.0.0"
#endif

namespace pm::tool {

namespace {

struct RunContext {
  const ExperimentConfig& cfg;
  RunManifest man;
  std::vector<std::pair<std::string, std::string>> files;  // name -> bytes

  void output(std::string name, std::string content) {
    files.emplace_back(std::move(name), std::move(content));
  }
  void extra(std::string key, std::string value) {
    man.extras.emplace_back(std::move(key), std::move(value));
  }
};

McOptions mc_options(const ExperimentConfig& cfg) {
  return McOptions{cfg.samples, cfg.seed, cfg.threads, 8192};
}

// The covariance series converges with far fewer draws than the ensembles
// need, so its budget is capped; still a pure function of the config.
McOptions covariance_options(const ExperimentConfig& cfg) {
  McOptions mc = mc_options(cfg);
  mc.samples = std::min<std::uint64_t>(mc.samples, 200000);
  return mc;
}

void approx_row(std::string& out, long long N, long long K, std::uint64_t M,
                double beta, int d, const std::string& metric, double value,
                double std_error, std::uint64_t seed) {
  out += std::to_string(N);
  out += ',';
  out += std::to_string(K);
  out += ',';
  out += std::to_string(M);
  out += ',';
  out += format_double(beta);
  out += ',';
  out += std::to_string(d);
  out += ',';
  out += metric;
  out += ',';
  out += format_double(value);
  out += ',';
  out += format_double(std_error);
  out += ',';
  out += std::to_string(seed);
  out += '\n';
}

void fit_extras(RunContext& ctx, const std::vector<DecayPoint>& pts,
                const std::string& prefix) {
  try {
    const RateFit fit = fit_decay(pts);
    ctx.extra(prefix + "_exponent", format_double(fit.exponent));
    ctx.extra(prefix + "_r_squared", format_double(fit.r_squared));
    ctx.extra(prefix + "_points_used", std::to_string(fit.points_used));
  } catch (const std::invalid_argument&) {
    ctx.extra(prefix + "_exponent", "unresolved");
  }
  // Endpoint slope as a fallback the fit preconditions cannot reject.
  if (pts.size() >= 2 && pts.front().value > 0.0 && pts.back().value > 0.0 &&
      pts.front().n != pts.back().n)
    ctx.extra(prefix + "_endpoint_slope",
              format_double(std::log(pts.back().value / pts.front().value) /
                            std::log(pts.back().n / pts.front().n)));
}

void run_invariant_density(const ExperimentConfig& cfg, RunContext& ctx) {
  const MapParameter map(cfg.beta);
  const GridDensity h = invariant_density(map, cfg.bins);
  const UlamOperator L = ulam_matrix(map, cfg.bins);
  const GridDensity Lh = L.apply(h);
  double residual = 0.0;
  for (int i = 0; i < h.bins(); ++i) residual += std::abs(Lh[i] - h[i]);
  residual /= h.bins();
  const ConeReport rep = cone_check(h, cfg.beta);

  ctx.output("invariant-density.csv", to_csv(h));
  ctx.extra("bins", std::to_string(cfg.bins));
  ctx.extra("fixed_point_residual_l1", format_double(residual));
  ctx.extra("cone_pass", rep.pass() ? "true" : "false");
  ctx.extra("cone_max_violation", format_double(rep.max_violation));
}

void run_cone_check(const ExperimentConfig& cfg, RunContext& ctx) {
  std::string name = "flat";
  GridDensity h(cfg.bins, 1.0);
  if (cfg.observable != "one") {
    name = "invariant-density";
    h = invariant_density(MapParameter(cfg.beta), cfg.bins);
  }
  const ConeReport rep = cone_check(h, cfg.beta);

  std::string csv = "name,beta,bins,pass,max_violation\n";
  csv += name;
  csv += ',';
  csv += format_double(cfg.beta);
  csv += ',';
  csv += std::to_string(cfg.bins);
  csv += ',';
  csv += rep.pass() ? "pass" : "fail";
  csv += ',';
  csv += format_double(rep.max_violation);
  csv += '\n';
  ctx.output("cone-check.csv", csv);
  ctx.extra("pass", rep.pass() ? "true" : "false");
  ctx.extra("max_violation", format_double(rep.max_violation));
}

void run_partition_law(const ExperimentConfig& cfg, RunContext& ctx) {
  const AdmissibleSequence seq = cfg.sequence();

  std::string law = "n,leftmost_length\n";
  for (long long n : cfg.n_grid) {
    law += std::to_string(n);
    law += ',';
    law += format_double(leftmost_cell_length(seq, static_cast<int>(n)));
    law += '\n';
  }
  ctx.output("partition-law.csv", law);

  std::vector<int> ns;
  ns.reserve(cfg.n_grid.size());
  for (long long n : cfg.n_grid) ns.push_back(static_cast<int>(n));
  const RateFit fit = leftmost_length_law(seq, ns);
  std::string fcsv = "exponent,intercept,r_squared,points_used\n";
  fcsv += format_double(fit.exponent);
  fcsv += ',';
  fcsv += format_double(fit.intercept);
  fcsv += ',';
  fcsv += format_double(fit.r_squared);
  fcsv += ',';
  fcsv += std::to_string(fit.points_used);
  fcsv += '\n';
  ctx.output("partition-fit.csv", fcsv);
  ctx.extra("fit_exponent", format_double(fit.exponent));
  ctx.extra("fit_r_squared", format_double(fit.r_squared));

  // Materialized whole-partition checks where 2^n cells are affordable.
  long long cells_n = 0;
  for (long long n : cfg.n_grid) {
    if (n > 16) continue;
    const BranchPartition part = build_partition(seq, static_cast<int>(n));
    const double leftmost = part.length(1);
    double sum = 0.0;
    bool dominant = true;
    for (int theta = 1; theta <= part.cells(); ++theta) {
      const double len = part.length(theta);
      sum += len;
      if (len > leftmost) dominant = false;
    }
    ctx.extra("sum_lengths_n" + std::to_string(n), format_double(sum));
    ctx.extra("leftmost_dominant_n" + std::to_string(n),
              dominant ? "true" : "false");
    if (n <= 12) cells_n = n;
  }
  if (cells_n > 0) {
    const BranchPartition part = build_partition(seq, static_cast<int>(cells_n));
    std::string cells = "theta,left,right,length\n";
    for (int theta = 1; theta <= part.cells(); ++theta) {
      cells += std::to_string(theta);
      cells += ',';
      cells += format_double(part.endpoints[theta - 1]);
      cells += ',';
      cells += format_double(part.endpoints[theta]);
      cells += ',';
      cells += format_double(part.length(theta));
      cells += '\n';
    }
    ctx.output("partition-cells.csv", cells);
    ctx.extra("cells_exported_n", std::to_string(cells_n));
  }
}

void run_correlation_decay(const ExperimentConfig& cfg, RunContext& ctx) {
  const MapParameter map(cfg.beta);
  const AdmissibleSequence seq = cfg.sequence();
  const ScalarObservable f = observable_preset(cfg.observable, map);
  const GridDensity h = invariant_density(map, cfg.bins);
  const DensitySampler mu(h);
  const auto sweep =
      pair_correlation_sweep(seq, f, f, cfg.n_grid, mu, mc_options(cfg));

  const std::string id = "pair:" + cfg.observable;
  std::string csv = "experiment_id,n_gap,estimate,std_error,samples,seed\n";
  std::vector<DecayPoint> pts;
  std::vector<std::pair<FunctionalSpec, CorrelationEstimate>> conformance;
  for (const auto& pt : sweep) {
    csv += id;
    csv += ',';
    csv += std::to_string(pt.n);
    csv += ',';
    csv += format_double(pt.est.value);
    csv += ',';
    csv += format_double(pt.est.std_error);
    csv += ',';
    csv += std::to_string(pt.est.samples);
    csv += ',';
    csv += std::to_string(pt.est.seed);
    csv += '\n';
    pts.push_back({static_cast<double>(pt.n), std::abs(pt.est.value),
                   pt.est.std_error});

    FunctionalSpec spec;
    spec.k = 1;
    spec.gap_indices = {0};
    spec.times = {0, pt.n};
    spec.F = [f](std::span<const double> a) { return f(a[0]) * f(a[1]); };
    spec.sup_norm = f.sup_bound * f.sup_bound;
    spec.lip_consts = {f.lip_bound * f.sup_bound};
    conformance.emplace_back(std::move(spec), pt.est);
  }
  ctx.output("correlation-decay.csv", csv);
  ctx.extra("c_fit",
            format_double(bound_conformance_constant(conformance, cfg.beta)));
  fit_extras(ctx, pts, "fit");
}

void covariance_extras(RunContext& ctx, const CovarianceEstimate& cov) {
  for (int i = 0; i < cov.d; ++i)
    for (int j = i; j < cov.d; ++j)
      ctx.extra("sigma_" + std::to_string(i) + std::to_string(j),
                format_double(cov.entry(i, j)));
  ctx.extra("sigma_min_eigenvalue", format_double(cov.min_eigenvalue));
  ctx.extra("sigma_indefinite", cov.indefinite ? "true" : "false");
  ctx.extra("sigma_truncation", std::to_string(cov.truncation));
  ctx.extra("sigma_tail_rho_sum", format_double(cov.tail_rho_sum));
}

void run_clt_smooth(const ExperimentConfig& cfg, RunContext& ctx) {
  const MapParameter map(cfg.beta);
  const GridDensity h = invariant_density(map, cfg.bins);
  const DensitySampler mu(h);
  const ObservableSpec f =
      centered_against(observable_spec_preset(cfg.observable, map), h);
  const int d = f.dim();
  const McOptions mc = mc_options(cfg);
  const CovarianceEstimate cov =
      covariance_series(map, f, 256, cfg.beta, mu, covariance_options(cfg));
  const SmoothTestFunction bump = gaussian_bump(d);

  std::string csv = "N,K,M,beta,d,metric,value,std_error,seed\n";
  std::vector<DecayPoint> pts;
  bool nonincreasing = true;
  double prev = std::numeric_limits<double>::infinity();
  double prev_se = 0.0;
  double noise_floor = 0.0;
  for (long long N : cfg.n_grid) {
    const BirkhoffEnsemble ens = sample_birkhoff(map, f, N, mu, mc);
    const ValueWithError dist = smooth_distance(ens, cov.sigma, bump, mc);
    approx_row(csv, N, cfg.gap_radius(N), cfg.samples, cfg.beta, d, "smooth",
               dist.value, dist.std_error, cfg.seed);
    pts.push_back({static_cast<double>(N), dist.value, dist.std_error});
    if (dist.value > prev + 2.0 * std::hypot(prev_se, dist.std_error))
      nonincreasing = false;
    prev = dist.value;
    prev_se = dist.std_error;
    noise_floor = std::max(noise_floor, dist.std_error);
  }
  ctx.output("clt-smooth.csv", csv);
  covariance_extras(ctx, cov);
  ctx.extra("nonincreasing_2sigma", nonincreasing ? "true" : "false");
  ctx.extra("mc_noise_floor", format_double(noise_floor));
  fit_extras(ctx, pts, "fit");
}

void run_clt_kantorovich(const ExperimentConfig& cfg, RunContext& ctx) {
  const MapParameter map(cfg.beta);
  const GridDensity h = invariant_density(map, cfg.bins);
  const DensitySampler mu(h);
  const ObservableSpec f =
      centered_against(observable_spec_preset(cfg.observable, map), h);
  const McOptions mc = mc_options(cfg);
  const CovarianceEstimate cov =
      covariance_series(map, f, 256, cfg.beta, mu, covariance_options(cfg));
  const double variance = cov.entry(0, 0);
  if (!(variance > 0.0))
    throw std::domain_error(
        "clt-kantorovich: limiting variance is not positive");

  std::string csv = "N,K,M,beta,d,metric,value,std_error,seed\n";
  std::vector<DecayPoint> pts;
  for (long long N : cfg.n_grid) {
    const BirkhoffEnsemble ens = sample_birkhoff(map, f, N, mu, mc);
    const double dist = kantorovich_exact_1d(ens.W, variance);
    approx_row(csv, N, cfg.gap_radius(N), cfg.samples, cfg.beta, 1,
               "kantorovich", dist, 0.0, cfg.seed);
    pts.push_back({static_cast<double>(N), dist, 0.0});
  }

  // Control: the same distance on true Gaussian draws of the same variance,
  // which isolates the finite-M floor of the empirical transport estimate.
  std::vector<double> z(cfg.samples);
  const double sd = std::sqrt(variance);
  const ChunkPlan plan{cfg.samples, mc.chunk_size};
  struct None {};
  run_chunks<None>(plan, cfg.seed ^ 0x6b6e756c6cull, cfg.threads,
                   [&](std::uint64_t, std::uint64_t begin, std::uint64_t count,
                       std::mt19937_64& rng, None&) {
                     for (std::uint64_t i = 0; i < count; ++i)
                       z[begin + i] = sd * normal01(rng);
                   });
  const double null_dist = kantorovich_exact_1d(std::move(z), variance);
  approx_row(csv, 0, 0, cfg.samples, cfg.beta, 1, "kantorovich-null",
             null_dist, 0.0, cfg.seed);

  ctx.output("clt-kantorovich.csv", csv);
  covariance_extras(ctx, cov);
  ctx.extra("gaussian_control", format_double(null_dist));
  fit_extras(ctx, pts, "fit");
}

void run_stein_budget(const ExperimentConfig& cfg, RunContext& ctx) {
  const MapParameter map(cfg.beta);
  const GridDensity h = invariant_density(map, cfg.bins);
  const DensitySampler mu(h);
  const ObservableSpec f =
      centered_against(observable_spec_preset(cfg.observable, map), h);
  const int d = f.dim();
  const McOptions mc = mc_options(cfg);
  const long long N = cfg.n_grid.front();
  const long long K = cfg.gap_radius(N);

  const CovarianceEstimate cov =
      covariance_series(map, f, 256, cfg.beta, mu, covariance_options(cfg));
  std::vector<long long> lags;
  for (long long lag = 1; lag <= std::max<long long>(1, N / 2) && lag <= 64;
       lag *= 2)
    lags.push_back(lag);
  const A1Report a1 = check_A1(map, f, cfg.beta, lags, mu, mc);
  const SmoothTestFunction bump = gaussian_bump(d);
  const A2Report a2 =
      check_A2_tilde_tau(map, f, bump, N, K, cov, cfg.beta, mu, mc);

  SteinBudget budget;
  budget.d = d;
  budget.beta = cfg.beta;
  budget.C2 = a1.C2;
  budget.C4 = a1.C4;
  budget.grad_norm = bump.grad_norm;
  budget.d2_norm = bump.d2_norm;
  budget.d3_norm = bump.d3_norm;
  budget.f_sup = f.sup_norm();
  budget.N = N;
  budget.K = K;
  budget.tilde_tau = a2.tilde_tau;
  budget.recompute();

  ctx.output("stein-budget.txt", budget.serialize());
  std::string csv = "N,K,M,beta,d,metric,value,std_error,seed\n";
  approx_row(csv, N, K, cfg.samples, cfg.beta, d, "C2", budget.C2, 0.0,
             cfg.seed);
  approx_row(csv, N, K, cfg.samples, cfg.beta, d, "C4", budget.C4, 0.0,
             cfg.seed);
  approx_row(csv, N, K, cfg.samples, cfg.beta, d, "tilde-tau",
             budget.tilde_tau, a2.max_std_error, cfg.seed);
  approx_row(csv, N, K, cfg.samples, cfg.beta, d, "C-star", budget.C_star, 0.0,
             cfg.seed);
  approx_row(csv, N, K, cfg.samples, cfg.beta, d, "bound", budget.bound, 0.0,
             cfg.seed);
  ctx.output("stein-budget.csv", csv);

  covariance_extras(ctx, cov);
  ctx.extra("worst_pair_ratio", format_double(a1.worst_pair_ratio));
  ctx.extra("worst_quad_ratio", format_double(a1.worst_quad_ratio));
  ctx.extra("pair_probes", std::to_string(a1.pair_probes));
  ctx.extra("quad_probes", std::to_string(a1.quad_probes));
  ctx.extra("tilde_tau_rho_ratio", format_double(a2.rho_ratio));
  ctx.extra("tilde_tau_probes", std::to_string(a2.probes));
}

void run_rio_b2(const ExperimentConfig& cfg, RunContext& ctx) {
  const MapParameter map(cfg.beta);
  const GridDensity h = invariant_density(map, cfg.bins);
  const DensitySampler mu(h);
  const ObservableSpec f =
      centered_against(observable_spec_preset(cfg.observable, map), h);
  const int d = f.dim();

  const auto probes = b2_probe_family(d, f.sup_norm());
  std::vector<B2Tuple> tuples;
  for (long long p : cfg.n_grid) {
    B2Tuple simple;
    simple.p = p;
    tuples.push_back(simple);
    B2Tuple triple;
    triple.j = 1;
    triple.k = 2;
    triple.p = p;
    triple.q = p;
    triple.l = p;
    triple.beta = std::min(1, d - 1);
    triple.b = 1;
    triple.c = 1;
    tuples.push_back(triple);
  }
  const B2Report rep =
      check_B2(map, f, cfg.beta, probes, tuples, mu, mc_options(cfg));

  std::string csv = "N,K,M,beta,d,metric,value,std_error,seed\n";
  std::vector<DecayPoint> simple_pts;  // tanh-f probe against the lag-p power
  for (const auto& pr : rep.probes) {
    const bool simple = pr.tuple.a + pr.tuple.b + pr.tuple.c == 1;
    approx_row(csv, pr.tuple.p, pr.tuple.l, cfg.samples, cfg.beta, d,
               "b2:" + pr.probe + (simple ? ":simple" : ":triple"), pr.cov,
               pr.std_error, cfg.seed);
    if (simple && pr.probe == "tanh-f")
      simple_pts.push_back({static_cast<double>(pr.tuple.p), std::abs(pr.cov),
                            pr.std_error});
  }
  ctx.output("rio-b2.csv", csv);
  ctx.extra("c_fit", format_double(rep.C_fit));
  ctx.extra("worst_ratio", format_double(rep.worst_ratio));
  fit_extras(ctx, simple_pts, "tanh_f_fit");
}

void run_coboundary_screen(const ExperimentConfig& cfg, RunContext& ctx) {
  const MapParameter map(cfg.beta);
  const GridDensity h = invariant_density(map, cfg.bins);
  const DensitySampler mu(h);
  const ObservableSpec f = observable_spec_preset(cfg.observable, map);
  const int d = f.dim();
  const CoboundaryReport rep =
      coboundary_screen(map, f, cfg.n_grid, 64, mu, mc_options(cfg));

  std::string csv = "N,K,M,beta,d,metric,value,std_error,seed\n";
  std::string flagged;
  for (std::size_t j = 0; j < rep.directions.size(); ++j) {
    const auto& dir = rep.directions[j];
    const std::string tag = "dir" + std::to_string(j);
    for (std::size_t g = 0; g < cfg.n_grid.size(); ++g)
      approx_row(csv, cfg.n_grid[g], 0, cfg.samples, cfg.beta, d,
                 "variance:" + tag, dir.variances[g], 0.0, cfg.seed);
    approx_row(csv, 0, 0, cfg.samples, cfg.beta, d, "growth-exponent:" + tag,
               dir.growth_exponent, 0.0, cfg.seed);
    if (dir.flagged) {
      if (!flagged.empty()) flagged += ' ';
      flagged += tag;
    }
  }
  ctx.output("coboundary-screen.csv", csv);
  ctx.extra("any_flagged", rep.any_flagged ? "true" : "false");
  ctx.extra("flagged_directions", flagged.empty() ? "none" : flagged);
}

}  // namespace

std::string RunManifest::serialize() const {
  std::ostringstream out;
  out << "kind=" << kind << "\n";
  out << "config_hash=" << config_hash << "\n";
  out << "code_version=" << code_version << "\n";
  out << "seed=" << seed << "\n";
  out << "threads=" << threads << "\n";
  out << "samples=" << samples << "\n";
  out << "chunk_size=" << chunk_size << "\n";
  out << "chunk_seed_rule=" << chunk_seed_rule << "\n";
  out << "wall_seconds=" << format_double(wall_seconds) << "\n";
  for (const auto& o : outputs)
    out << "output:" << o.file << "=" << o.digest << "\n";
  for (const auto& [k, v] : extras) out << k << "=" << v << "\n";
  return out.str();
}

RunManifest run_experiment(const ExperimentConfig& cfg) {
  const auto violations = cfg.validate();
  if (!violations.empty()) {
    std::string msg = "run_experiment: config does not validate:";
    for (const auto& v : violations)
      msg += " [" + v.field + "=" + v.value + ": " + v.constraint + "]";
    throw std::invalid_argument(msg);
  }

  const auto t0 = std::chrono::steady_clock::now();
  RunContext ctx{cfg, {}, {}};
  ctx.man.kind = cfg.kind;
  ctx.man.config_hash = hex64(fnv1a64(cfg.canonical()));
  ctx.man.code_version = PMTOOL_VERSION;
  ctx.man.seed = cfg.seed;
  ctx.man.threads = cfg.threads;
  ctx.man.samples = cfg.samples;
  ctx.man.chunk_seed_rule = "splitmix64(seed xor 0x9E3779B97F4A7C15*(chunk+1))";

  if (cfg.kind == "invariant-density") run_invariant_density(cfg, ctx);
  else if (cfg.kind == "cone-check") run_cone_check(cfg, ctx);
  else if (cfg.kind == "partition-law") run_partition_law(cfg, ctx);
  else if (cfg.kind == "correlation-decay") run_correlation_decay(cfg, ctx);
  else if (cfg.kind == "clt-smooth") run_clt_smooth(cfg, ctx);
  else if (cfg.kind == "clt-kantorovich") run_clt_kantorovich(cfg, ctx);
  else if (cfg.kind == "stein-budget") run_stein_budget(cfg, ctx);
  else if (cfg.kind == "rio-b2") run_rio_b2(cfg, ctx);
  else if (cfg.kind == "coboundary-screen") run_coboundary_screen(cfg, ctx);
  else throw std::invalid_argument("run_experiment: unknown kind " + cfg.kind);

  for (const auto& [name, content] : ctx.files)
    ctx.man.outputs.push_back({name, hex64(fnv1a64(content))});

  // Everything is composed; only now touch the filesystem. write_text_atomic
  // makes each file all-or-nothing, and any flush error rolls back the files
  // written so far, so a failed run leaves the output directory as it was.
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_path);
  std::vector<fs::path> written;
  try {
    for (const auto& [name, content] : ctx.files) {
      const fs::path p = dir / name;
      write_text_atomic(p.string(), content);
      written.push_back(p);
    }
    ctx.man.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    write_text_atomic((dir / (cfg.kind + "-manifest.txt")).string(),
                      ctx.man.serialize());
  } catch (...) {
    for (const auto& p : written) {
      std::error_code ec;
      fs::remove(p, ec);
    }
    throw;
  }
  return ctx.man;
}

}  // namespace pm::tool
