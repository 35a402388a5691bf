#pragma once

#include <vector>

namespace hsmix::rods1d {

// Region of a circle of length L available to small-sphere centres once the
// arcs of half-width `reach` around each big centre are removed.
struct FreeSpace {
  double L = 0.0;
  bool full_circle = true;
  std::vector<double> segments;  // arc lengths when !full_circle

  double length() const;
};

FreeSpace free_space(const std::vector<double>& big_centers, double L, double reach);

// Volume of configurations of m labelled rods whose centres lie in the free
// space and are pairwise at distance >= a. Arcs are assumed separated by gaps
// wider than a, which holds whenever reach > a / 2.
long double packing_volume(const FreeSpace& fs, int m, double a);

// Integral over the free space^m of the connected-graph sum of prod f^{ss}.
long double connected_volume(const FreeSpace& fs, int m, double a);

// Same integral on the infinite line with one centre pinned: (-m a)^{m-1}.
double connected_cluster_line(int m, double a);

}  // namespace hsmix::rods1d
