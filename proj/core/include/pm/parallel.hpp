#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <vector>

#include "pm/sampling.hpp"

namespace pm {

// Monte Carlo run geometry. Samples are split into fixed-size chunks; the
// decomposition is a pure function of (samples, chunk_size), never of the
// thread count, and chunk results are merged in index order. Together with
// per-chunk RNG streams this makes every estimate bit-identical across
// thread counts.
struct McOptions {
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  int threads = 0;  // <=0: PMTOOL_THREADS env, else hardware_concurrency
  std::uint64_t chunk_size = 8192;
};

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PMTOOL_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

struct ChunkPlan {
  std::uint64_t total = 0;
  std::uint64_t chunk_size = 8192;

  std::uint64_t chunks() const {
    return chunk_size == 0 ? 0 : (total + chunk_size - 1) / chunk_size;
  }
  std::uint64_t begin(std::uint64_t c) const { return c * chunk_size; }
  std::uint64_t count(std::uint64_t c) const {
    const std::uint64_t b = begin(c);
    return b >= total ? 0 : std::min(chunk_size, total - b);
  }
};

// Runs body(chunk_index, first_sample, count, rng) for every chunk and
// returns the per-chunk states in index order. Workers pull chunk indices
// from a shared counter; the outputs are position-addressed, so scheduling
// cannot reorder anything the caller observes.
template <typename State, typename Body>
std::vector<State> run_chunks(const ChunkPlan& plan, std::uint64_t seed,
                              int threads, Body body) {
  const std::uint64_t n = plan.chunks();
  std::vector<State> states(n);
  if (n == 0) return states;

  const int workers =
      static_cast<int>(std::min<std::uint64_t>(resolve_threads(threads), n));
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};

  auto work = [&]() {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= n || failed.load(std::memory_order_relaxed)) break;
      try {
        std::mt19937_64 rng = chunk_rng(seed, c);
        body(c, plan.begin(c), plan.count(c), rng, states[c]);
      } catch (...) {
        failed.store(true);
        break;
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw std::runtime_error("run_chunks: worker failed");
  return states;
}

// Plain mean / standard-error accumulator. Fine for bounded summands;
// estimators with heavy-tailed summands use BatchMeans below instead.
struct MeanVar {
  double sum = 0.0;
  double sumsq = 0.0;
  std::uint64_t n = 0;

  void add(double x) {
    sum += x;
    sumsq += x * x;
    ++n;
  }
  void merge(const MeanVar& o) {
    sum += o.sum;
    sumsq += o.sumsq;
    n += o.n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  double std_error() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var =
        (sumsq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
    return var > 0.0 ? std::sqrt(var / static_cast<double>(n)) : 0.0;
  }
};

// Mean / standard-error accumulator over a fixed number of batches. The
// batch of a sample is a pure function of its global index, so batching is
// independent of the chunk decomposition as well.
struct BatchMeans {
  static constexpr int kBatches = 64;
  std::array<double, kBatches> sum{};
  std::array<std::uint64_t, kBatches> cnt{};

  static int batch_of(std::uint64_t sample, std::uint64_t total) {
    return static_cast<int>((sample * kBatches) / total);
  }
  void add(int batch, double x) {
    sum[batch] += x;
    cnt[batch] += 1;
  }
  void merge(const BatchMeans& o) {
    for (int b = 0; b < kBatches; ++b) {
      sum[b] += o.sum[b];
      cnt[b] += o.cnt[b];
    }
  }
  std::uint64_t count() const {
    std::uint64_t n = 0;
    for (auto c : cnt) n += c;
    return n;
  }
  double mean() const {
    double s = 0.0;
    for (double x : sum) s += x;
    const std::uint64_t n = count();
    return n ? s / static_cast<double>(n) : 0.0;
  }
  // Standard error of the overall mean from the spread of batch means.
  // Robust to heavy-tailed summands; exact batches with zero samples are
  // skipped (tiny runs).
  double std_error() const {
    const double m = mean();
    double ss = 0.0;
    int used = 0;
    for (int b = 0; b < kBatches; ++b) {
      if (cnt[b] == 0) continue;
      const double bm = sum[b] / static_cast<double>(cnt[b]);
      ss += (bm - m) * (bm - m);
      ++used;
    }
    if (used < 2) return 0.0;
    return std::sqrt(ss / (used - 1) / used);
  }
};

}  // namespace pm
