#pragma once

#include <bit>

#include "hsmix/error.hpp"

namespace hsmix {
namespace detail {

// Connected-graph sum table on n vertices, shared and built once (n <= 6).
const GraphSumTable& connected_table(int n);

}  // namespace detail

template <class H>
CoefficientEstimate cloud_integral(const std::vector<Polymer>& polymers, H&& h, const BoxMetric& metric,
                                   const SphereSpecies& species, std::int64_t samples, std::uint64_t seed,
                                   const McOptions& mc) {
  metric.validate();
  if (polymers.empty()) throw invalid_argument("cloud_integral needs at least one polymer");
  for (Polymer v : polymers)
    if (std::popcount(v) < 2 || std::popcount(v) > 6) throw invalid_argument("polymer sizes must lie in [2, 6]");
  if (samples < 2) throw invalid_argument("cloud_integral needs at least two samples");
  const double small = species.excluded(PairKind::small_small);
  auto st = run_sharded(samples, seed, 0x636c6f64ULL, mc, [&](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, metric.L);
    std::vector<Point> pos;
    double weight = 1.0;
    for (Polymer v : polymers) {
      int m = std::popcount(v);
      std::size_t first = pos.size();
      for (int i = 0; i < m; ++i) {
        Point q{};
        for (int k = 0; k < metric.d; ++k) q[k] = u(rng);
        pos.push_back(q);
      }
      EdgeMask o = 0;
      for (int j = 1; j < m; ++j)
        for (int i = 0; i < j; ++i)
          if (metric.distance2(pos[first + i], pos[first + j]) < small * small) o |= EdgeMask{1} << pair_index(i, j);
      weight *= detail::connected_table(m)(o);
      if (weight == 0.0) return 0.0;
    }
    return weight * h(Cloud::with_positions(polymers, pos));
  });
  return to_estimate(st, 1.0, {{"polymers", static_cast<long long>(polymers.size())}});
}

}  // namespace hsmix
