#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace hsmix {

using Truncation = std::map<std::string, long long>;

struct CoefficientEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
  Truncation truncation;

  static CoefficientEstimate exact(double v, Truncation t = {}) { return {v, 0.0, 0, std::move(t)}; }
};

CoefficientEstimate operator*(double s, const CoefficientEstimate& e);
// Sum of independent estimates; errors add in quadrature.
CoefficientEstimate operator+(const CoefficientEstimate& a, const CoefficientEstimate& b);

// Welford running mean and variance with exact pairwise merging.
struct RunningStats {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  void merge(const RunningStats& o);
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double std_error() const { return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

struct McOptions {
  int shards = 16;
  int workers = 0;  // 0 means hardware concurrency
};

// Independent generator for a (seed, stream, shard) triple.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t shard);

// Runs `samples` evaluations of fn(rng) split over a fixed number of shards.
// The merge happens in shard order, so the result does not depend on how many
// workers execute the shards.
template <class Fn>
RunningStats run_sharded(std::int64_t samples, std::uint64_t seed, std::uint64_t stream,
                         const McOptions& opt, Fn&& fn) {
  int shards = std::max(1, opt.shards);
  std::vector<RunningStats> parts(static_cast<std::size_t>(shards));
  auto work = [&](int s) {
    std::int64_t base = samples / shards;
    std::int64_t count = base + (s < samples % shards ? 1 : 0);
    auto rng = make_rng(seed, stream, static_cast<std::uint64_t>(s));
    RunningStats st;
    for (std::int64_t i = 0; i < count; ++i) st.add(fn(rng));
    parts[static_cast<std::size_t>(s)] = st;
  };
  int workers = opt.workers > 0 ? opt.workers : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, shards);
  if (workers == 1) {
    for (int s = 0; s < shards; ++s) work(s);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int s = w; s < shards; s += workers) work(s);
      });
    }
    for (auto& t : pool) t.join();
  }
  RunningStats total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

// Mean vector and co-moment matrix of a vector-valued sample, so that linear
// combinations of the components get correct standard errors.
struct VectorStats {
  std::int64_t n = 0;
  std::vector<double> mean;
  std::vector<double> comoment;  // row-major dim x dim

  explicit VectorStats(std::size_t dim = 0) : mean(dim, 0.0), comoment(dim * dim, 0.0) {}
  std::size_t dim() const { return mean.size(); }
  void add(const std::vector<double>& x);
  void merge(const VectorStats& o);
  // Estimate of sum_i w_i E[X_i].
  CoefficientEstimate combine(const std::vector<double>& w, double scale = 1.0, Truncation t = {}) const;
  CoefficientEstimate component(std::size_t i, double scale = 1.0, Truncation t = {}) const;
};

// Vector-valued counterpart of run_sharded; fn(rng, out) fills `out` (size dim).
template <class Fn>
VectorStats run_sharded_vec(std::int64_t samples, std::size_t dim, std::uint64_t seed, std::uint64_t stream,
                            const McOptions& opt, Fn&& fn) {
  int shards = std::max(1, opt.shards);
  std::vector<VectorStats> parts(static_cast<std::size_t>(shards), VectorStats(dim));
  auto work = [&](int s) {
    std::int64_t base = samples / shards;
    std::int64_t count = base + (s < samples % shards ? 1 : 0);
    auto rng = make_rng(seed, stream, static_cast<std::uint64_t>(s));
    VectorStats st(dim);
    std::vector<double> x(dim);
    for (std::int64_t i = 0; i < count; ++i) {
      std::fill(x.begin(), x.end(), 0.0);
      fn(rng, x);
      st.add(x);
    }
    parts[static_cast<std::size_t>(s)] = std::move(st);
  };
  int workers = opt.workers > 0 ? opt.workers : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, shards);
  if (workers == 1) {
    for (int s = 0; s < shards; ++s) work(s);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int s = w; s < shards; s += workers) work(s);
      });
    }
    for (auto& t : pool) t.join();
  }
  VectorStats total(dim);
  for (const auto& p : parts) total.merge(p);
  return total;
}

inline CoefficientEstimate to_estimate(const RunningStats& st, double scale, Truncation t = {}) {
  return {scale * st.mean, std::abs(scale) * st.std_error(), st.n, std::move(t)};
}

}  // namespace hsmix
