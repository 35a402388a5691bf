#include "hsmix/estimate.hpp"

namespace hsmix {

CoefficientEstimate operator*(double s, const CoefficientEstimate& e) {
  return {s * e.value, std::abs(s) * e.std_error, e.samples, e.truncation};
}

CoefficientEstimate operator+(const CoefficientEstimate& a, const CoefficientEstimate& b) {
  CoefficientEstimate out;
  out.value = a.value + b.value;
  out.std_error = std::hypot(a.std_error, b.std_error);
  out.samples = a.samples + b.samples;
  out.truncation = a.truncation;
  for (const auto& [k, v] : b.truncation) {
    auto it = out.truncation.find(k);
    if (it == out.truncation.end()) out.truncation[k] = v;
    else it->second = std::max(it->second, v);
  }
  return out;
}

void RunningStats::merge(const RunningStats& o) {
  if (o.n == 0) return;
  if (n == 0) {
    *this = o;
    return;
  }
  std::int64_t total = n + o.n;
  double delta = o.mean - mean;
  double nt = static_cast<double>(total);
  mean += delta * static_cast<double>(o.n) / nt;
  m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) / nt;
  n = total;
}

void VectorStats::add(const std::vector<double>& x) {
  const std::size_t k = dim();
  ++n;
  double inv = 1.0 / static_cast<double>(n);
  std::vector<double> before(k);
  for (std::size_t i = 0; i < k; ++i) {
    before[i] = x[i] - mean[i];
    mean[i] += before[i] * inv;
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) comoment[i * k + j] += before[i] * (x[j] - mean[j]);
}

void VectorStats::merge(const VectorStats& o) {
  if (o.n == 0) return;
  if (n == 0) {
    *this = o;
    return;
  }
  const std::size_t k = dim();
  double na = static_cast<double>(n), nb = static_cast<double>(o.n), nt = na + nb;
  std::vector<double> delta(k);
  for (std::size_t i = 0; i < k; ++i) delta[i] = o.mean[i] - mean[i];
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      comoment[i * k + j] += o.comoment[i * k + j] + delta[i] * delta[j] * na * nb / nt;
  for (std::size_t i = 0; i < k; ++i) mean[i] += delta[i] * nb / nt;
  n += o.n;
}

CoefficientEstimate VectorStats::combine(const std::vector<double>& w, double scale, Truncation t) const {
  const std::size_t k = dim();
  double v = 0.0, var = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    v += w[i] * mean[i];
    for (std::size_t j = 0; j < k; ++j) var += w[i] * w[j] * comoment[i * k + j];
  }
  double se = n > 1 ? std::sqrt(std::max(0.0, var) / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  return {scale * v, std::abs(scale) * se, n, std::move(t)};
}

CoefficientEstimate VectorStats::component(std::size_t i, double scale, Truncation t) const {
  std::vector<double> w(dim(), 0.0);
  w[i] = 1.0;
  return combine(w, scale, std::move(t));
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t shard) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(shard), static_cast<std::uint32_t>(shard >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace hsmix
