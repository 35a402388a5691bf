#include "hsmix/polymers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "hsmix/error.hpp"
#include "hsmix/rods1d.hpp"

namespace hsmix {

namespace detail {

const GraphSumTable& connected_table(int n) {
  static const std::vector<GraphSumTable> tables = [] {
    std::vector<GraphSumTable> t(7);
    for (int m = 1; m <= 6; ++m) t[m] = GraphSumTable(m, enum_connected(m));
    return t;
  }();
  if (n < 1 || n > 6) throw resource_limit("connected-graph tables available for 1 <= n <= 6");
  return tables[n];
}

}  // namespace detail

double ursell(const std::vector<Polymer>& polymers) {
  const int n = static_cast<int>(polymers.size());
  if (n < 1) throw invalid_argument("ursell needs at least one polymer");
  if (n > 6) throw resource_limit("ursell available for at most six polymers");
  EdgeMask o = 0;
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if (polymers[i] & polymers[j]) o |= EdgeMask{1} << pair_index(i, j);
  return detail::connected_table(n)(o);
}

std::vector<Polymer> enumerate_polymers(int n_labels) {
  if (n_labels < 0) throw invalid_argument("label count must be non-negative");
  if (n_labels > 6) throw resource_limit("polymer enumeration available for at most six labels");
  std::vector<Polymer> out;
  for (Polymer v = 1; v < (Polymer{1} << n_labels); ++v)
    if (std::popcount(v) >= 2) out.push_back(v);
  return out;
}

int Cloud::size() const {
  VertexMask u = 0;
  for (Polymer v : polymers) u |= v;
  return std::popcount(u);
}

Cloud Cloud::with_positions(const std::vector<Polymer>& polymers, const std::vector<Point>& positions) {
  Cloud y;
  y.polymers = polymers;
  std::size_t next = 0;
  for (std::size_t i = 0; i < polymers.size(); ++i)
    for (Polymer v = polymers[i]; v; v &= v - 1) {
      if (next >= positions.size()) throw invalid_argument("cloud needs one position per (polymer, label)");
      y.sites.push_back({static_cast<int>(i), std::countr_zero(v), positions[next++]});
    }
  if (next != positions.size()) throw invalid_argument("cloud received surplus positions");
  return y;
}

double cloud_link(const Point& p, const Cloud& Y, const BoxMetric& metric, const SphereSpecies& species) {
  for (const auto& s : Y.sites)
    if (mayer(PairKind::big_small, p, s.position, metric, species) != 0) return -1.0;
  return 0.0;
}

void ConvergenceParams::validate() const {
  if (!(a >= 0.0) || !(b >= 0.0) || !(c >= 0.0)) throw invalid_argument("convergence constants must be non-negative");
}

double ModelParams::volume() const { return std::pow(L, d); }

double ModelParams::small_density() const {
  return finite_volume ? static_cast<double>(N_r) / volume() : rho_r;
}

double ModelParams::big_density() const {
  return finite_volume ? static_cast<double>(N_R) / volume() : rho_R;
}

void ModelParams::validate() const {
  if (d < 1 || d > kMaxDim) throw invalid_argument("dimension must lie in [1, 3]");
  species().validate();
  if (finite_volume) {
    if (!(L > R)) throw invalid_argument("box length must exceed the big radius");
    if (N_r < 0 || N_R < 0) throw invalid_argument("particle counts must be non-negative");
  } else if (rho_r < 0.0 || rho_R < 0.0) {
    throw invalid_argument("densities must be non-negative");
  }
}

KpReport kp_check(const ModelParams& params, const ConvergenceParams& cp, ExcludedReading reading) {
  cp.validate();
  double rho_R = params.big_density();
  double avail = 1.0 - rho_R * ball_volume(params.d, params.R + params.r);
  if (!(avail > 0.0)) throw invalid_argument("available volume must be positive");
  double excl = ball_volume(params.d, reading == ExcludedReading::big_pair ? 2.0 * params.R : 2.0 * params.r);
  KpReport rep;
  rep.lhs = 2.0 * params.small_density() / avail * excl * std::exp(2.0 * (cp.b + cp.c) + 1.0);
  rep.margin = cp.c - rep.lhs;
  rep.holds = rep.lhs < cp.c;
  return rep;
}

namespace {

std::vector<double> big_coordinates(const std::vector<Point>& bigs) {
  std::vector<double> x;
  for (const auto& p : bigs) x.push_back(p[0]);
  return x;
}

double activity_exact_1d(int m, const std::vector<Point>& bigs, const BoxMetric& metric,
                         const SphereSpecies& species, std::optional<double> ratio) {
  auto fs = rods1d::free_space(big_coordinates(bigs), metric.L, species.excluded(PairKind::big_small));
  double avail = fs.length();
  if (!(avail > 0.0)) throw invalid_argument("no volume available to small spheres");
  double q = ratio ? *ratio : metric.L / avail;
  long double u = rods1d::connected_volume(fs, m, species.excluded(PairKind::small_small));
  return static_cast<double>(u / std::pow(static_cast<long double>(metric.L), m)) * std::pow(q, m);
}

double midpoint_sum(int m, int cells, const std::vector<Point>& bigs, const BoxMetric& metric,
                    const SphereSpecies& species) {
  const double h = metric.L / cells;
  const double a = species.excluded(PairKind::small_small);
  const auto& table = detail::connected_table(m);
  std::vector<char> allowed(static_cast<std::size_t>(cells), 1);
  for (int c = 0; c < cells; ++c) {
    Point q{(c + 0.5) * h, 0.0, 0.0};
    for (const auto& p : bigs)
      if (mayer(PairKind::big_small, p, q, metric, species)) allowed[c] = 0;
  }
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  double sum = 0.0;
  while (true) {
    bool ok = true;
    for (int i = 0; i < m && ok; ++i) ok = allowed[idx[i]];
    if (ok) {
      EdgeMask o = 0;
      for (int j = 1; j < m; ++j)
        for (int i = 0; i < j; ++i) {
          Point x{(idx[i] + 0.5) * h, 0.0, 0.0}, y{(idx[j] + 0.5) * h, 0.0, 0.0};
          if (metric.distance2(x, y) < a * a) o |= EdgeMask{1} << pair_index(i, j);
        }
      sum += table(o);
    }
    int i = 0;
    while (i < m && ++idx[i] == cells) idx[i++] = 0;
    if (i == m) break;
  }
  return sum * std::pow(h / metric.L, m);
}

}  // namespace

CoefficientEstimate polymer_activity(Polymer V, const std::vector<Point>& big_centers, const BoxMetric& metric,
                                     const SphereSpecies& species, const QuadratureSpec& spec,
                                     std::optional<double> ratio) {
  metric.validate();
  species.validate();
  check_admissible(big_centers, metric, species);
  const int m = std::popcount(V);
  if (m < 1) throw invalid_argument("empty polymer");
  if (m == 1) return CoefficientEstimate::exact(1.0);
  if (m > 4) throw resource_limit("polymer activity available for |V| <= 4");
  Truncation trunc{{"size", m}};
  switch (spec.method) {
    case QuadratureMethod::exact_1d: {
      if (metric.d != 1) throw invalid_argument("exact activities require d = 1");
      return CoefficientEstimate::exact(activity_exact_1d(m, big_centers, metric, species, ratio), trunc);
    }
    case QuadratureMethod::midpoint_1d: {
      if (metric.d != 1) throw invalid_argument("midpoint quadrature requires d = 1");
      int coarse = std::max(4, static_cast<int>(std::ceil(spec.resolution * metric.L)));
      if (std::pow(2.0 * coarse, m) > 2e8) throw resource_limit("midpoint grid too large");
      double q = ratio ? *ratio : metric.L / free_volume_exact_1d(big_centers, metric, species);
      double lo = midpoint_sum(m, coarse, big_centers, metric, species);
      double hi = midpoint_sum(m, 2 * coarse, big_centers, metric, species);
      double scale = std::pow(q, m);
      double err = std::abs(hi - lo) * scale;
      if (err > spec.tolerance) throw precision_failure("midpoint quadrature error above tolerance");
      return {hi * scale, err, 0, trunc};
    }
    case QuadratureMethod::monte_carlo: {
      double q;
      if (ratio) q = *ratio;
      else if (metric.d == 1) q = metric.L / free_volume_exact_1d(big_centers, metric, species);
      else q = metric.volume() / free_volume(big_centers, metric, species, spec.samples, spec.seed ^ 0x5a5aULL).value;
      const auto& table = detail::connected_table(m);
      const double a = species.excluded(PairKind::small_small);
      auto st = run_sharded(spec.samples, spec.seed, 0x61637469ULL + V, {}, [&](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u(0.0, metric.L);
        std::vector<Point> x(static_cast<std::size_t>(m), Point{});
        for (auto& p : x) {
          for (int k = 0; k < metric.d; ++k) p[k] = u(rng);
          for (const auto& b : big_centers)
            if (mayer(PairKind::big_small, b, p, metric, species)) return 0.0;
        }
        EdgeMask o = 0;
        for (int j = 1; j < m; ++j)
          for (int i = 0; i < j; ++i)
            if (metric.distance2(x[i], x[j]) < a * a) o |= EdgeMask{1} << pair_index(i, j);
        return table(o);
      });
      return to_estimate(st, std::pow(q, m), trunc);
    }
  }
  throw invalid_argument("unknown quadrature method");
}

ActivityTable activity_table(int n_labels, const std::vector<Point>& big_centers, const BoxMetric& metric,
                             const SphereSpecies& species, std::optional<double> ratio) {
  if (metric.d != 1) throw invalid_argument("activity tables are exact in d = 1 only");
  ActivityTable t;
  t.n_labels = n_labels;
  t.polymers = enumerate_polymers(n_labels);
  std::vector<double> by_size(static_cast<std::size_t>(n_labels) + 1, 0.0);
  for (int m = 2; m <= n_labels; ++m) by_size[m] = activity_exact_1d(m, big_centers, metric, species, ratio);
  for (Polymer v : t.polymers) t.activity.push_back(by_size[std::popcount(v)]);
  return t;
}

double log_polymer_partition_exact(const ActivityTable& table) {
  const int n = table.n_labels;
  std::vector<double> act(std::size_t{1} << n, 0.0), Z(std::size_t{1} << n, 0.0);
  for (std::size_t i = 0; i < table.polymers.size(); ++i) act[table.polymers[i]] = table.activity[i];
  Z[0] = 1.0;
  for (VertexMask s = 1; s < (VertexMask{1} << n); ++s) {
    VertexMask low = s & (~s + 1);
    // The lowest label is either alone or in a polymer.
    double z = Z[s ^ low];
    VertexMask rest = s ^ low;
    for (VertexMask sub = rest; sub; sub = (sub - 1) & rest) z += act[sub | low] * Z[rest ^ sub];
    Z[s] = z;
  }
  return std::log(Z[(std::size_t{1} << n) - 1]);
}

namespace {

double kp_scaling(const ActivityTable& table, const std::vector<double>& a) {
  double t = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < table.polymers.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < table.polymers.size(); ++j)
      if (table.polymers[i] & table.polymers[j]) s += std::abs(table.activity[j]) * std::exp(a[j]);
    if (s > 0.0) t = std::min(t, a[i] / s);
  }
  return t;
}

}  // namespace

ClusterResult cluster_log_Z(const ActivityTable& table, const std::vector<double>& a_weights, int order,
                            bool allow_outside_domain) {
  if (order < 1) throw invalid_argument("cluster expansion order must be >= 1");
  if (order > 6) throw resource_limit("cluster expansion available up to order 6");
  if (a_weights.size() != table.polymers.size()) throw invalid_argument("one KP weight per polymer required");
  ClusterResult res;
  res.order = order;
  res.t_star = kp_scaling(table, a_weights);
  res.kp_holds = res.t_star > 1.0;
  if (!res.kp_holds && !allow_outside_domain)
    throw not_in_domain("Kotecky-Preiss condition fails for the activity table");

  const std::size_t P = table.polymers.size();
  // Multisets i_1 <= ... <= i_n carry weight 1 / prod(multiplicity!).
  std::vector<std::size_t> pick;
  std::vector<Polymer> polys;
  double total = 0.0;
  auto rec = [&](auto&& self, std::size_t from, double prod, double inv_mult, int run) -> void {
    if (!pick.empty()) total += ursell(polys) * prod * inv_mult;
    if (static_cast<int>(pick.size()) == order) return;
    for (std::size_t i = from; i < P; ++i) {
      int nrun = (!pick.empty() && pick.back() == i) ? run + 1 : 1;
      pick.push_back(i);
      polys.push_back(table.polymers[i]);
      self(self, i, prod * table.activity[i], inv_mult / nrun, nrun);
      pick.pop_back();
      polys.pop_back();
    }
  };
  rec(rec, 0, 1.0, 1.0, 0);
  res.value = total;

  double M = 0.0;
  for (std::size_t i = 0; i < P; ++i) M += std::abs(table.activity[i]) * std::exp(a_weights[i]);
  if (M == 0.0) res.tail_bound = 0.0;
  else if (!res.kp_holds) res.tail_bound = std::numeric_limits<double>::infinity();
  else res.tail_bound = M * std::pow(res.t_star, -order) / ((order + 1) * (1.0 - 1.0 / res.t_star));
  return res;
}

std::vector<double> linear_kp_weights(const ActivityTable& table) {
  double best_c = 1.0, best_t = -1.0;
  for (int i = 0; i <= 400; ++i) {
    double c = 1e-4 * std::pow(10.0, i / 80.0);
    std::vector<double> a;
    for (Polymer v : table.polymers) a.push_back(c * std::popcount(v));
    double t = kp_scaling(table, a);
    if (t > best_t) {
      best_t = t;
      best_c = c;
    }
  }
  std::vector<double> a;
  for (Polymer v : table.polymers) a.push_back(best_c * std::popcount(v));
  return a;
}

FiniteVolumeCoefficient finite_volume_irreducible_1d(int k, double L, double a, int max_excess) {
  if (k < 1) throw invalid_argument("k must be >= 1");
  if (k > 3) throw resource_limit("finite-volume coefficient available for k <= 3");
  if (max_excess < 0 || k + max_excess > 6) throw resource_limit("excess too large for the polymer tables");
  if (!(a > 0.0)) throw invalid_argument("rod length must be positive");
  // The exact activity formula needs room for the largest polymer on the circle.
  if (!(L > 2.0 * (k + 1) * a)) throw invalid_argument("circle too short for the exact activities");
  const auto subsets = enumerate_polymers(k + 1);
  const VertexMask all = (VertexMask{1} << (k + 1)) - 1;
  FiniteVolumeCoefficient out;
  out.max_excess = max_excess;
  out.by_excess.assign(static_cast<std::size_t>(max_excess) + 1, 0.0);
  std::vector<Polymer> pick;
  // Multisets of subsets with total size budget k + max_excess; weight 1/prod(multiplicity!).
  auto rec = [&](auto&& self, std::size_t from, int used, double prod, double inv_mult, int run) -> void {
    if (!pick.empty()) {
      VertexMask u = 0;
      for (Polymer v : pick) u |= v;
      if (u == all && used >= k) out.by_excess[used - k] += ursell(pick) * prod * inv_mult;
    }
    if (pick.size() == 6) return;
    for (std::size_t i = from; i < subsets.size(); ++i) {
      int m = std::popcount(subsets[i]);
      if (used + m - 1 > k + max_excess) continue;
      int nrun = (!pick.empty() && pick.back() == subsets[i]) ? run + 1 : 1;
      pick.push_back(subsets[i]);
      self(self, i, used + m - 1, prod * rods1d::connected_cluster_line(m, a), inv_mult / nrun, nrun);
      pick.pop_back();
    }
  };
  rec(rec, 0, 0, 1.0, 1.0, 0);
  double kf = 1.0;
  for (int i = 2; i <= k; ++i) kf *= i;
  for (int e = 0; e <= max_excess; ++e) {
    out.by_excess[e] /= kf;
    out.value += out.by_excess[e] * std::pow(L, -e);
  }
  return out;
}

}  // namespace hsmix
