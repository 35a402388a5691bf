#include "hsmix/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "hsmix/error.hpp"

namespace hsmix {

double SphereSpecies::excluded(PairKind kind) const {
  switch (kind) {
    case PairKind::big_big: return 2.0 * R;
    case PairKind::small_small: return 2.0 * r;
    case PairKind::big_small: return R + r;
  }
  return 0.0;
}

void SphereSpecies::validate() const {
  if (!(r > 0.0) || !(R > 0.0)) throw invalid_argument("radii must be positive");
  if (!(r < R)) throw invalid_argument("small radius must be below the big radius");
}

double BoxMetric::volume() const { return std::pow(L, d); }

void BoxMetric::validate() const {
  if (d < 1 || d > kMaxDim) throw invalid_argument("dimension must lie in [1, 3] for positions");
  if (!(L > 0.0)) throw invalid_argument("box length must be positive");
}

Point BoxMetric::displacement(const Point& x, const Point& y) const {
  Point out{};
  for (int k = 0; k < d; ++k) {
    double t = y[k] - x[k];
    if (periodic) {
      t -= L * std::floor(t / L);  // now in [0, L)
      if (t > 0.5 * L) t -= L;     // (-L/2, L/2]
    }
    out[k] = t;
  }
  return out;
}

double BoxMetric::distance2(const Point& x, const Point& y) const {
  Point u = displacement(x, y);
  double s = 0.0;
  for (int k = 0; k < d; ++k) s += u[k] * u[k];
  return s;
}

double ball_volume(int d, double radius) {
  if (d < 1) throw invalid_argument("ball_volume: dimension must be >= 1");
  if (radius < 0.0) throw invalid_argument("ball_volume: negative radius");
  double half = 0.5 * d;
  return std::pow(std::numbers::pi, half) * std::pow(radius, d) / std::tgamma(half + 1.0);
}

double shell_volume(int d, double R, double r) {
  if (!(r > 0.0) || r > R) throw invalid_argument("shell_volume requires 0 < r <= R");
  return ball_volume(d, R + r) - ball_volume(d, R - r);
}

int mayer(PairKind kind, const Point& x, const Point& y, const BoxMetric& metric,
          const SphereSpecies& species) {
  double e = species.excluded(kind);
  return metric.distance2(x, y) < e * e ? -1 : 0;
}

void check_admissible(const std::vector<Point>& big_centers, const BoxMetric& metric,
                      const SphereSpecies& species) {
  double e = species.excluded(PairKind::big_big);
  for (std::size_t i = 0; i < big_centers.size(); ++i)
    for (std::size_t j = i + 1; j < big_centers.size(); ++j)
      if (metric.distance2(big_centers[i], big_centers[j]) < e * e)
        throw inadmissible_configuration("big spheres " + std::to_string(i) + " and " +
                                         std::to_string(j) + " overlap");
}

CoefficientEstimate free_volume(const std::vector<Point>& big_centers, const BoxMetric& metric,
                                const SphereSpecies& species, std::int64_t samples,
                                std::uint64_t seed, const McOptions& options) {
  metric.validate();
  check_admissible(big_centers, metric, species);
  Truncation t{{"samples", samples}};
  if (big_centers.empty()) return CoefficientEstimate::exact(metric.volume(), t);
  if (samples < 2) throw invalid_argument("free_volume needs at least two samples");
  double e2 = species.excluded(PairKind::big_small) * species.excluded(PairKind::big_small);
  auto st = run_sharded(samples, seed, 0x66726565ULL, options, [&](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, metric.L);
    Point q{};
    for (int k = 0; k < metric.d; ++k) q[k] = u(rng);
    for (const auto& p : big_centers)
      if (metric.distance2(p, q) < e2) return 0.0;
    return 1.0;
  });
  return to_estimate(st, metric.volume(), t);
}

double free_volume_exact_1d(const std::vector<Point>& big_centers, const BoxMetric& metric,
                            const SphereSpecies& species) {
  if (metric.d != 1) throw invalid_argument("free_volume_exact_1d requires d = 1");
  metric.validate();
  check_admissible(big_centers, metric, species);
  const double L = metric.L;
  const double h = species.excluded(PairKind::big_small);
  if (big_centers.empty()) return L;
  if (2.0 * h >= L) return 0.0;
  std::vector<std::pair<double, double>> iv;
  for (const auto& p : big_centers) {
    double c = p[0] - L * std::floor(p[0] / L);
    double a = c - h, b = c + h;
    if (a < 0.0) {
      iv.emplace_back(a + L, L);
      iv.emplace_back(0.0, b);
    } else if (b > L) {
      iv.emplace_back(a, L);
      iv.emplace_back(0.0, b - L);
    } else {
      iv.emplace_back(a, b);
    }
  }
  std::sort(iv.begin(), iv.end());
  double covered = 0.0, cur_a = iv[0].first, cur_b = iv[0].second;
  for (std::size_t i = 1; i < iv.size(); ++i) {
    if (iv[i].first <= cur_b) {
      cur_b = std::max(cur_b, iv[i].second);
    } else {
      covered += cur_b - cur_a;
      cur_a = iv[i].first;
      cur_b = iv[i].second;
    }
  }
  covered += cur_b - cur_a;
  return std::max(0.0, L - covered);
}

}  // namespace hsmix
