#include "pm/distance.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pm/quadrature.hpp"
#include "pm/sampling.hpp"

namespace pm {

namespace {

Eigen::MatrixXd symmetric_sqrt(std::span<const double> sigma, int d,
                               const char* who) {
  if (d < 1 || sigma.size() != static_cast<std::size_t>(d) * d)
    throw std::invalid_argument(std::string(who) + ": bad sigma shape");
  Eigen::MatrixXd S(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) S(i, j) = sigma[i * d + j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  const double floor = 1e-10;
  if (eig.eigenvalues().minCoeff() <= floor)
    throw std::domain_error(std::string(who) +
                            ": sigma is not positive-definite above the "
                            "1e-10 eigenvalue floor");
  return eig.eigenvectors() *
         eig.eigenvalues().cwiseSqrt().asDiagonal() *
         eig.eigenvectors().transpose();
}

}  // namespace

ValueWithError gaussian_expectation(std::span<const double> sigma, int d,
                                    const SmoothTestFunction& h,
                                    const McOptions& mc) {
  if (h.dim != d)
    throw std::invalid_argument("gaussian_expectation: h dimension mismatch");
  const Eigen::MatrixXd A = symmetric_sqrt(sigma, d, "gaussian_expectation");

  if (d <= 2) {
    const int order = 48;
    const auto nodes = gauss_hermite(order);
    const double root2 = std::numbers::sqrt2;
    std::vector<double> z(d);
    double total = 0.0;
    if (d == 1) {
      for (const auto& n : nodes) {
        z[0] = root2 * A(0, 0) * n.x;
        total += n.w * h.value(z);
      }
    } else {
      for (const auto& n1 : nodes)
        for (const auto& n2 : nodes) {
          z[0] = root2 * (A(0, 0) * n1.x + A(0, 1) * n2.x);
          z[1] = root2 * (A(1, 0) * n1.x + A(1, 1) * n2.x);
          total += n1.w * n2.w * h.value(z);
        }
    }
    // Gauss-Hermite weights integrate against e^{-x^2}; the Gaussian
    // normalization leaves a pi^{-d/2}.
    return {total * std::pow(std::numbers::pi, -0.5 * d), 0.0};
  }

  if (mc.samples == 0)
    throw std::invalid_argument("gaussian_expectation: zero samples for d >= 3");
  const ChunkPlan plan{mc.samples, mc.chunk_size};
  auto states = run_chunks<BatchMeans>(
      plan, mc.seed, mc.threads,
      [&](std::uint64_t, std::uint64_t first, std::uint64_t count,
          std::mt19937_64& rng, BatchMeans& st) {
        std::vector<double> xi(d), z(d);
        for (std::uint64_t s = first; s < first + count; ++s) {
          for (int c = 0; c < d; ++c) xi[c] = normal01(rng);
          for (int i = 0; i < d; ++i) {
            double acc = 0.0;
            for (int j = 0; j < d; ++j) acc += A(i, j) * xi[j];
            z[i] = acc;
          }
          st.add(BatchMeans::batch_of(s, mc.samples), h.value(z));
        }
      });
  BatchMeans bm;
  for (const auto& st : states) bm.merge(st);
  return {bm.mean(), bm.std_error()};
}

ValueWithError smooth_distance(const BirkhoffEnsemble& ensemble,
                               std::span<const double> sigma,
                               const SmoothTestFunction& h,
                               const McOptions& mc) {
  if (ensemble.size() == 0)
    throw std::invalid_argument("smooth_distance: empty ensemble");
  if (h.dim != ensemble.d)
    throw std::invalid_argument("smooth_distance: h dimension mismatch");
  const ValueWithError gauss = gaussian_expectation(sigma, ensemble.d, h, mc);
  BatchMeans bm;
  const std::uint64_t M = ensemble.size();
  for (std::uint64_t i = 0; i < M; ++i)
    bm.add(BatchMeans::batch_of(i, M), h.value(ensemble.sample(i)));
  return {std::abs(bm.mean() - gauss.value),
          std::hypot(bm.std_error(), gauss.std_error)};
}

double kantorovich_exact_1d(std::vector<double> samples, double variance) {
  if (samples.empty())
    throw std::invalid_argument("kantorovich_exact_1d: no samples");
  if (!(variance >= 0.0))
    throw std::invalid_argument("kantorovich_exact_1d: negative variance");
  std::sort(samples.begin(), samples.end());
  const double sd = std::sqrt(variance);
  const double M = static_cast<double>(samples.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double q = sd * inverse_normal_cdf((static_cast<double>(i) + 0.5) / M);
    acc += std::abs(samples[i] - q);
  }
  return acc / M;
}

double kantorovich_sliced(const BirkhoffEnsemble& ensemble,
                          std::span<const double> sigma, int directions) {
  const int d = ensemble.d;
  if (ensemble.size() == 0)
    throw std::invalid_argument("kantorovich_sliced: empty ensemble");
  if (sigma.size() != static_cast<std::size_t>(d) * d)
    throw std::invalid_argument("kantorovich_sliced: bad sigma shape");
  if (directions < 1)
    throw std::invalid_argument("kantorovich_sliced: needs a direction");
  if (d == 1) {
    return kantorovich_exact_1d(
        std::vector<double>(ensemble.W.begin(), ensemble.W.end()), sigma[0]);
  }

  std::vector<std::vector<double>> dirs;
  if (d == 2) {
    for (int j = 0; j < directions; ++j) {
      const double t = std::numbers::pi * j / directions;
      dirs.push_back({std::cos(t), std::sin(t)});
    }
  } else {
    // Deterministic quasi-uniform set: normalized Gaussian vectors from a
    // fixed splitmix64 stream.
    std::uint64_t state = 0x736c696365646972ull;
    std::mt19937_64 rng(splitmix64(state));
    for (int j = 0; j < directions; ++j) {
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

  double acc = 0.0;
  std::vector<double> proj(ensemble.size());
  for (const auto& v : dirs) {
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
      const auto w = ensemble.sample(i);
      double s = 0.0;
      for (int c = 0; c < d; ++c) s += v[c] * w[c];
      proj[i] = s;
    }
    double var = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) var += v[i] * sigma[i * d + j] * v[j];
    acc += kantorovich_exact_1d(proj, std::max(0.0, var));
  }
  return acc / static_cast<double>(dirs.size());
}

}  // namespace pm
