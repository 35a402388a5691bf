#include "hsmix/rods1d.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "hsmix/error.hpp"

namespace hsmix::rods1d {

double FreeSpace::length() const {
  if (full_circle) return L;
  double s = 0.0;
  for (double x : segments) s += x;
  return s;
}

FreeSpace free_space(const std::vector<double>& big_centers, double L, double reach) {
  FreeSpace fs;
  fs.L = L;
  if (big_centers.empty()) return fs;
  fs.full_circle = false;
  if (2.0 * reach >= L) return fs;
  // Work on blocked arcs sorted by their left end, unrolled once around.
  std::vector<std::pair<double, double>> arcs;
  for (double p : big_centers) {
    double c = p - L * std::floor(p / L);
    arcs.emplace_back(c - reach, c + reach);
  }
  std::sort(arcs.begin(), arcs.end());
  std::vector<std::pair<double, double>> merged;
  for (auto a : arcs) {
    if (!merged.empty() && a.first <= merged.back().second)
      merged.back().second = std::max(merged.back().second, a.second);
    else
      merged.push_back(a);
  }
  // The last arc may wrap onto the first one.
  while (merged.size() > 1 && merged.back().second - L >= merged.front().first) {
    merged.front().first = std::min(merged.front().first, merged.back().first - L);
    merged.front().second = std::max(merged.front().second, merged.back().second - L);
    merged.pop_back();
  }
  if (merged.front().second - merged.front().first >= L) return fs;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    double end = merged[i].second;
    double next = i + 1 < merged.size() ? merged[i + 1].first : merged.front().first + L;
    if (next > end) fs.segments.push_back(next - end);
  }
  return fs;
}

long double packing_volume(const FreeSpace& fs, int m, double a) {
  if (m < 0) throw invalid_argument("packing_volume: negative count");
  if (m == 0) return 1.0L;
  if (fs.full_circle) {
    long double room = static_cast<long double>(fs.L) - static_cast<long double>(m) * a;
    if (room <= 0) return 0.0L;
    return static_cast<long double>(fs.L) * std::pow(room, m - 1);
  }
  // Exponential generating function: product over arcs of
  // sum_j (len - (j-1) a)_+^j x^j / j!.
  std::vector<long double> poly(static_cast<std::size_t>(m) + 1, 0.0L);
  poly[0] = 1.0L;
  for (double len : fs.segments) {
    std::vector<long double> seg(static_cast<std::size_t>(m) + 1, 0.0L);
    long double fact = 1.0L;
    for (int j = 0; j <= m; ++j) {
      if (j > 0) fact *= j;
      long double room = static_cast<long double>(len) - static_cast<long double>(j - 1) * a;
      if (j == 0) seg[0] = 1.0L;
      else if (room > 0) seg[j] = std::pow(room, j) / fact;
    }
    std::vector<long double> next(static_cast<std::size_t>(m) + 1, 0.0L);
    for (int i = 0; i <= m; ++i)
      for (int j = 0; i + j <= m; ++j) next[i + j] += poly[i] * seg[j];
    poly = std::move(next);
  }
  long double fact = 1.0L;
  for (int j = 2; j <= m; ++j) fact *= j;
  return poly[m] * fact;
}

long double connected_volume(const FreeSpace& fs, int m, double a) {
  if (m < 1) throw invalid_argument("connected_volume: m must be >= 1");
  std::vector<long double> W(static_cast<std::size_t>(m) + 1), U(static_cast<std::size_t>(m) + 1, 0.0L);
  for (int j = 0; j <= m; ++j) W[j] = packing_volume(fs, j, a);
  // Split on the block containing a fixed label: W(j) = sum_i C(j-1, i-1) U(i) W(j-i).
  for (int j = 1; j <= m; ++j) {
    long double s = W[j];
    long double binom = 1.0L;  // C(j-1, i-1)
    for (int i = 1; i < j; ++i) {
      s -= binom * U[i] * W[j - i];
      binom = binom * (j - i) / i;
    }
    U[j] = s;
  }
  return U[m];
}

double connected_cluster_line(int m, double a) {
  if (m < 1) throw invalid_argument("connected_cluster_line: m must be >= 1");
  return std::pow(-static_cast<double>(m) * a, m - 1);
}

}  // namespace hsmix::rods1d
