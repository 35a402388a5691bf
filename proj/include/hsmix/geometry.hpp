#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hsmix/estimate.hpp"

namespace hsmix {

// Positions carry up to three coordinates; unused trailing components stay 0.
constexpr int kMaxDim = 3;
using Point = std::array<double, kMaxDim>;

enum class PairKind { big_big, small_small, big_small };

struct SphereSpecies {
  double r = 0.5;  // small radius
  double R = 1.0;  // big radius

  double excluded(PairKind kind) const;
  void validate() const;
};

struct BoxMetric {
  int d = 1;
  double L = 1.0;
  bool periodic = true;

  double volume() const;
  // Minimum-image displacement y - x, components in (-L/2, L/2].
  Point displacement(const Point& x, const Point& y) const;
  double distance2(const Point& x, const Point& y) const;
  void validate() const;
};

double ball_volume(int d, double radius);
double shell_volume(int d, double R, double r);

// Hard-core Mayer function: -1 on overlap, 0 otherwise.
int mayer(PairKind kind, const Point& x, const Point& y, const BoxMetric& metric,
          const SphereSpecies& species);

// Flat-space overlap test used by the infinite-volume coefficients.
inline bool overlaps_flat(const Point& x, const Point& y, int d, double excluded) {
  double s = 0.0;
  for (int k = 0; k < d; ++k) {
    double t = x[k] - y[k];
    s += t * t;
  }
  return s < excluded * excluded;
}

// Throws inadmissible_configuration if two big centers are closer than 2R.
void check_admissible(const std::vector<Point>& big_centers, const BoxMetric& metric,
                      const SphereSpecies& species);

// Monte Carlo estimate of the volume available to a small-sphere center.
CoefficientEstimate free_volume(const std::vector<Point>& big_centers, const BoxMetric& metric,
                                const SphereSpecies& species, std::int64_t samples,
                                std::uint64_t seed, const McOptions& options = {});

// Exact available volume on a circle (d = 1).
double free_volume_exact_1d(const std::vector<Point>& big_centers, const BoxMetric& metric,
                            const SphereSpecies& species);

}  // namespace hsmix
