#include "hsmix/integrals.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "hsmix/error.hpp"
#include "hsmix/polymers.hpp"

namespace hsmix {
namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

void uniform_point(Point& p, int d, const Point& lo, double width, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < d; ++k) p[k] = lo[k] + width * u(rng);
}

// Overlap graph of the first n points with a common excluded distance.
EdgeMask overlap_mask(const std::vector<Point>& x, int n, int d, double excluded) {
  EdgeMask m = 0;
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if (overlaps_flat(x[i], x[j], d, excluded)) m |= EdgeMask{1} << pair_index(i, j);
  return m;
}

void check_samples(std::int64_t samples, std::int64_t minimum, const char* what) {
  if (samples < minimum)
    throw invalid_argument(std::string(what) + ": at least " + std::to_string(minimum) + " samples required");
}

void check_dim(int d) {
  if (d < 1 || d > kMaxDim) throw invalid_argument("dimension must lie in [1, 3]");
}

// Vertices 0..free-1 uniform in the cube [-h, h]^d, the last one at the origin.
CoefficientEstimate pinned_cluster(int n_vertices, int d, double h, const GraphSumTable& table, double excluded,
                                   std::int64_t samples, std::uint64_t seed, std::uint64_t stream,
                                   const McOptions& mc, double scale, Truncation trunc) {
  const int free = n_vertices - 1;
  double vol = std::pow(2.0 * h, d * free);
  Point lo{};
  for (int k = 0; k < d; ++k) lo[k] = -h;
  auto st = run_sharded(samples, seed, stream, mc, [&](std::mt19937_64& rng) {
    std::vector<Point> x(static_cast<std::size_t>(n_vertices), Point{});
    for (int v = 0; v < free; ++v) uniform_point(x[v], d, lo, 2.0 * h, rng);
    return table(overlap_mask(x, n_vertices, d, excluded));
  });
  return to_estimate(st, scale * vol, std::move(trunc));
}

}  // namespace

CoefficientEstimate irreducible_coefficient(int n, int d, double r, std::int64_t samples, std::uint64_t seed,
                                            const McOptions& mc) {
  if (n < 1) throw invalid_argument("irreducible coefficient needs n >= 1");
  if (n > 4) throw resource_limit("irreducible coefficient available for n <= 4");
  check_dim(d);
  if (!(r > 0.0)) throw invalid_argument("radius must be positive");
  check_samples(samples, 10000, "irreducible_coefficient");
  GraphSumTable table(n + 1, enum_two_connected(n + 1));
  return pinned_cluster(n + 1, d, 2.0 * r * n, table, 2.0 * r, samples, seed, 0x62657461ULL + n, mc,
                        1.0 / factorial(n), {{"n", n}});
}

double irreducible_coefficient_exact_1d(int n, double a) {
  if (n < 1) throw invalid_argument("n must be >= 1");
  if (!(a > 0.0)) throw invalid_argument("rod length must be positive");
  return -(n + 1) * std::pow(a, n) / n;
}

CoefficientEstimate connected_cluster_integral(int m, int d, double r, std::int64_t samples, std::uint64_t seed,
                                               const McOptions& mc) {
  if (m < 1 || m > 6) throw resource_limit("connected cluster integral available for 1 <= m <= 6");
  check_dim(d);
  if (m == 1) return CoefficientEstimate::exact(1.0, {{"m", 1}});
  if (m == 2) return CoefficientEstimate::exact(-ball_volume(d, 2.0 * r), {{"m", 2}});
  check_samples(samples, 2, "connected_cluster_integral");
  GraphSumTable table(m, enum_connected(m));
  return pinned_cluster(m, d, 2.0 * r * (m - 1), table, 2.0 * r, samples, seed, 0x636f6e6eULL + m, mc, 1.0,
                        {{"m", m}});
}

CoverSum tree_covers(int k) {
  if (k < 1) throw invalid_argument("tree_covers requires k >= 1");
  if (k > 5) throw resource_limit("tree_covers available for k <= 5");
  const int n = k + 1;
  const VertexMask all = (VertexMask{1} << n) - 1;
  std::vector<VertexMask> subsets;
  for (VertexMask s = 1; s <= all; ++s)
    if (std::popcount(s) >= 2) subsets.push_back(s);
  CoverSum out;
  out.k = k;
  std::vector<VertexMask> pick;
  // Choose subsets in increasing order while the excess budget allows.
  auto rec = [&](auto&& self, std::size_t from, int budget, VertexMask covered) -> void {
    if (budget == 0) {
      if (covered == all) {
        CoverCollection c;
        c.sets = pick;
        c.ursell = ursell(pick);
        c.orderings = static_cast<long long>(factorial(static_cast<int>(pick.size())));
        out.collections.push_back(std::move(c));
      }
      return;
    }
    for (std::size_t i = from; i < subsets.size(); ++i) {
      int cost = std::popcount(subsets[i]) - 1;
      if (cost > budget) continue;
      pick.push_back(subsets[i]);
      self(self, i + 1, budget - cost, covered | subsets[i]);
      pick.pop_back();
    }
  };
  rec(rec, 0, k, 0);
  return out;
}

CoefficientEstimate AdjustmentModel::evaluate(double rho) const {
  if (!(rho >= 0.0) || rho >= 1.0) throw invalid_argument("adjustment coefficient requires 0 <= rho < 1");
  Truncation trunc{{"k", k}};
  if (variant == AdjustmentVariant::as_printed) {
    double y = rho / (1.0 - rho), sum = 0.0;
    for (const auto& c : covers.collections) {
      int top = k + static_cast<int>(c.sets.size());
      double inner = 0.0;
      for (int l = 1; l <= top; ++l) inner += binomial(top, l) * std::pow(y, l);
      sum += static_cast<double>(c.orderings) * c.ursell * inner;
    }
    auto out = sum * graph_factor;
    out.truncation = trunc;
    return out;
  }
  // Value is a polynomial in the connected integrals; errors by linearisation.
  double value = 0.0;
  std::vector<double> grad(cluster.size(), 0.0);
  for (const auto& c : covers.collections) {
    int total = 0;
    double prod = 1.0;
    for (VertexMask v : c.sets) {
      int m = std::popcount(v);
      total += m;
      prod *= cluster[m].value;
    }
    double weight = c.ursell * (std::pow(1.0 - rho, -total) - 1.0) / factorial(k);
    value += weight * prod;
    for (VertexMask v : c.sets) {
      int m = std::popcount(v);
      double rest = 1.0;
      bool skipped = false;
      for (VertexMask w : c.sets) {
        if (w == v && !skipped) {
          skipped = true;
          continue;
        }
        rest *= cluster[std::popcount(w)].value;
      }
      grad[m] += weight * rest;
    }
  }
  double var = 0.0;
  std::int64_t samples = 0;
  for (std::size_t m = 0; m < cluster.size(); ++m) {
    var += grad[m] * grad[m] * cluster[m].std_error * cluster[m].std_error;
    samples += cluster[m].samples;
  }
  return {value, std::sqrt(var), samples, trunc};
}

AdjustmentModel adjustment_model_from(int k, const std::vector<CoefficientEstimate>& cluster,
                                      AdjustmentVariant variant) {
  if (k < 1) throw invalid_argument("adjustment coefficient requires k >= 1");
  if (k > 4) throw resource_limit("adjustment coefficient available for k <= 4");
  if (static_cast<int>(cluster.size()) < k + 2) throw invalid_argument("connected integrals up to k+1 required");
  AdjustmentModel m;
  m.k = k;
  m.variant = variant;
  m.cluster = cluster;
  m.covers = tree_covers(k);
  m.graph_factor = (1.0 / factorial(k)) * cluster[k + 1];
  return m;
}

AdjustmentModel adjustment_model(int k, int d, double r, std::int64_t samples, std::uint64_t seed,
                                 AdjustmentVariant variant, const McOptions& mc) {
  if (k < 1) throw invalid_argument("adjustment coefficient requires k >= 1");
  if (k > 4) throw resource_limit("adjustment coefficient available for k <= 4");
  std::vector<CoefficientEstimate> cluster(static_cast<std::size_t>(k) + 2);
  for (int m = 1; m <= k + 1; ++m) {
    // The printed variant only needs the largest cluster.
    if (variant == AdjustmentVariant::as_printed && m != k + 1) continue;
    cluster[m] = connected_cluster_integral(m, d, r, samples, seed, mc);
  }
  return adjustment_model_from(k, cluster, variant);
}

CoefficientEstimate adjustment_coefficient(int k, double rho, int d, double r, std::int64_t samples,
                                           std::uint64_t seed, AdjustmentVariant variant, const McOptions& mc) {
  if (!(rho >= 0.0) || rho >= 1.0) throw invalid_argument("adjustment coefficient requires 0 <= rho < 1");
  return adjustment_model(k, d, r, samples, seed, variant, mc).evaluate(rho);
}

double SingleBigModel::prefactor(double rho_R, BoundKind kind) const {
  double x = kind == BoundKind::upper ? R + r : R;
  double base = 1.0 - rho_R * ball_volume(d, x);
  if (rho_R < 0.0 || !(base > 0.0)) throw invalid_argument("single-big prefactor base must be positive");
  return std::pow(base, -(s + 1));
}

CoefficientEstimate SingleBigModel::evaluate(double rho_R, BoundKind kind) const {
  double pre = prefactor(rho_R, kind);
  auto first = ball_volume(d, R + r) * irreducible;
  auto out = pre * (first + graph_term);
  out.truncation = {{"s", s}};
  return out;
}

SingleBigModel single_big_model(int s, int d, double r, double R, std::int64_t samples, std::uint64_t seed,
                                const McOptions& mc) {
  if (s < 1 || s > 3) throw resource_limit("single-big coefficient available for 1 <= s <= 3");
  check_dim(d);
  SphereSpecies{r, R}.validate();
  check_samples(samples, 2, "single_big_coefficient");
  SingleBigModel m;
  m.s = s;
  m.d = d;
  m.r = r;
  m.R = R;
  m.irreducible = s == 1 ? CoefficientEstimate::exact(-ball_volume(d, 2.0 * r), {{"n", 1}})
                         : irreducible_coefficient(s, d, r, samples, seed, mc);
  // Vertex 0 is the big sphere at the origin, 1..s+1 are small.
  const int n = s + 2;
  auto graphs = enum_two_connected(n);
  std::vector<std::vector<ColoredGraph>> by_degree(static_cast<std::size_t>(n));
  for (const auto& g : graphs) by_degree[std::popcount(g.neighbors(0))].push_back(g);
  std::vector<GraphSumTable> tables;
  tables.emplace_back(n, graphs);
  for (int l = 1; l < n; ++l) tables.emplace_back(n, by_degree[l]);
  const double h = R + r + 2.0 * r * s;
  const double vol = std::pow(2.0 * h, d * (s + 1));
  Point lo{};
  for (int k = 0; k < d; ++k) lo[k] = -h;
  auto st = run_sharded_vec(samples, tables.size(), seed, 0x736e676cULL + s, mc,
                            [&](std::mt19937_64& rng, std::vector<double>& out) {
    std::vector<Point> x(static_cast<std::size_t>(n), Point{});
    for (int v = 1; v < n; ++v) uniform_point(x[v], d, lo, 2.0 * h, rng);
    EdgeMask o = 0;
    for (int j = 1; j < n; ++j)
      for (int i = 0; i < j; ++i)
        if (overlaps_flat(x[i], x[j], d, i == 0 ? R + r : 2.0 * r)) o |= EdgeMask{1} << pair_index(i, j);
    for (std::size_t t = 0; t < tables.size(); ++t) out[t] = tables[t](o);
  });
  double scale = vol / factorial(s);
  m.graph_term = st.component(0, scale, {{"s", s}});
  m.by_big_degree.assign(static_cast<std::size_t>(n), CoefficientEstimate::exact(0.0));
  for (int l = 1; l < n; ++l) m.by_big_degree[l] = st.component(static_cast<std::size_t>(l), scale, {{"s", s}, {"l", l}});
  return m;
}

CoefficientEstimate single_big_coefficient(int s, int d, double r, double R, double rho_R, std::int64_t samples,
                                           std::uint64_t seed, BoundKind kind, const McOptions& mc) {
  return single_big_model(s, d, r, R, samples, seed, mc).evaluate(rho_R, kind);
}

CloudFactorModel::CloudFactorModel(int d, double r, double R, int l_max, int k_max)
    : d_(d), r_(r), R_(R), l_max_(l_max), k_max_(k_max) {
  check_dim(d);
  SphereSpecies{r, R}.validate();
  if (l_max < 1 || k_max < 0) throw invalid_argument("cloud factor needs l_max >= 1 and k_max >= 0");
  if (l_max + k_max > 5) throw resource_limit("cloud factor truncation requires l_max + k_max <= 5");
  for (int l = 1; l <= l_max; ++l)
    for (int k = 0; k <= k_max; ++k) {
      Term t;
      t.l = l;
      t.k = k;
      // A lone white vertex carries no small-small bond.
      t.table = l + k == 1 ? GraphSumTable() : GraphSumTable(l + k, enum_articulation_free(l, k));
      t.weight = 1.0 / (factorial(l) * factorial(k));
      terms_.push_back(std::move(t));
    }
}

void CloudFactorModel::sample_terms(const std::vector<Point>& bigs, std::mt19937_64& rng,
                                    std::vector<double>& out) const {
  const int n_max = l_max_ + k_max_;
  const double ext = R_ + r_ + 2.0 * r_ * (n_max - 1);
  Point lo{}, hi{};
  for (int k = 0; k < d_; ++k) {
    lo[k] = hi[k] = bigs.front()[k];
    for (const auto& p : bigs) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }
  double cell = 1.0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> x(static_cast<std::size_t>(n_max), Point{});
  for (int k = 0; k < d_; ++k) {
    double w = hi[k] - lo[k] + 2.0 * ext;
    cell *= w;
    for (auto& q : x) q[k] = lo[k] - ext + w * u(rng);
  }
  // Whites touched by each big sphere.
  std::vector<VertexMask> touch(bigs.size(), 0);
  for (std::size_t j = 0; j < bigs.size(); ++j)
    for (int i = 0; i < l_max_; ++i)
      if (overlaps_flat(bigs[j], x[i], d_, R_ + r_)) touch[j] |= VertexMask{1} << i;
  EdgeMask o = overlap_mask(x, n_max, d_, 2.0 * r_);
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    const Term& term = terms_[t];
    const VertexMask whites = (VertexMask{1} << term.l) - 1;
    // Inclusion-exclusion over the set S of whites actually used:
    // sum_S (-1)^{l-|S|} prod_j (-[touch_j meets S]).
    double assign = 0.0;
    for (VertexMask S = 0; S <= whites; ++S) {
      double prod = 1.0;
      for (VertexMask tj : touch)
        if (!(tj & S)) {
          prod = 0.0;
          break;
        } else {
          prod = -prod;
        }
      if (prod != 0.0) assign += ((term.l - std::popcount(S)) & 1) ? -prod : prod;
    }
    if (assign == 0.0) {
      out[t] = 0.0;
      continue;
    }
    int n = term.l + term.k;
    double graphs = n == 1 ? 1.0 : term.table(o & ((EdgeMask{1} << pair_count(n)) - 1));
    out[t] = term.weight * std::pow(cell, n) * assign * graphs;
  }
}

std::vector<double> CloudFactorModel::sample_polynomial(const std::vector<Point>& bigs, int inner,
                                                        std::mt19937_64& rng) const {
  std::vector<double> poly(static_cast<std::size_t>(max_degree()) + 1, 0.0), t(terms_.size());
  for (int i = 0; i < inner; ++i) {
    sample_terms(bigs, rng, t);
    for (std::size_t j = 0; j < terms_.size(); ++j) poly[terms_[j].l + terms_[j].k] += t[j];
  }
  for (double& c : poly) c /= inner;
  return poly;
}

double cloud_density(double rho_r, double rho_R, int d, double R) {
  double base = 1.0 - rho_R * ball_volume(d, R);
  if (rho_r < 0.0 || rho_R < 0.0 || !(base > 0.0)) throw invalid_argument("cloud density requires rho_R |B_R| < 1");
  return rho_r / base;
}

CloudFactorResult cloud_factor_terms(const std::vector<Point>& bigs, double rho_r, double rho_R, int d, double r,
                                     double R, int l_max, int k_max, std::int64_t samples, std::uint64_t seed,
                                     const McOptions& mc) {
  if (bigs.empty()) throw invalid_argument("cloud factor needs at least one big sphere");
  if (bigs.size() > 3) throw resource_limit("cloud factor available for at most three big spheres");
  check_samples(samples, 2, "cloud_factor");
  double x = cloud_density(rho_r, rho_R, d, R);
  CloudFactorModel model(d, r, R, l_max, k_max);
  auto st = run_sharded_vec(samples, model.term_count(), seed, 0x636c6f75ULL, mc,
                            [&](std::mt19937_64& rng, std::vector<double>& out) { model.sample_terms(bigs, rng, out); });
  CloudFactorResult res;
  std::vector<double> w(model.term_count());
  Truncation trunc{{"l_max", l_max}, {"k_max", k_max}};
  for (std::size_t t = 0; t < model.term_count(); ++t) {
    res.l.push_back(model.term_l(t));
    res.k.push_back(model.term_k(t));
    res.terms.push_back(st.component(t, 1.0, {{"l", model.term_l(t)}, {"k", model.term_k(t)}}));
    w[t] = std::pow(x, model.term_l(t) + model.term_k(t));
  }
  res.total = st.combine(w, 1.0, trunc);
  return res;
}

CoefficientEstimate cloud_factor(const std::vector<Point>& bigs, double rho_r, double rho_R, int d, double r,
                                 double R, int l_max, int k_max, std::int64_t samples, std::uint64_t seed,
                                 const McOptions& mc) {
  return cloud_factor_terms(bigs, rho_r, rho_R, d, r, R, l_max, k_max, samples, seed, mc).total;
}

CoefficientEstimate MultiBigModel::evaluate(double x) const {
  std::vector<double> w(coefficients.dim());
  for (std::size_t m = 0; m < w.size(); ++m) w[m] = std::pow(x, static_cast<double>(m));
  return coefficients.combine(w, scale,
                              {{"n", n}, {"k_max", k_max}, {"l_max", cutoffs.l_max}, {"cloud_k_max", cutoffs.k_max}});
}

MultiBigModel multi_big_model(int n, int d, double r, double R, int k_max, const CloudCutoffs& cutoffs,
                              std::int64_t samples, std::uint64_t seed, const McOptions& mc) {
  if (n < 1 || n > 2) throw resource_limit("multi-big coefficient available for n in {1, 2}");
  if (k_max < 0 || k_max > 2) throw resource_limit("multi-big coefficient available for k_max <= 2");
  if (cutoffs.inner_samples < 1) throw invalid_argument("inner sample count must be positive");
  check_samples(samples, 2, "multi_big_coefficient");
  CloudFactorModel cloud(d, r, R, cutoffs.l_max, cutoffs.k_max);
  const int bigs = n + 1;
  struct Entry {
    EdgeMask big_edges;
    std::vector<VertexMask> clouds;
    double weight;
  };
  std::vector<Entry> entries;
  for (int k = 0; k <= k_max; ++k) {
    if (bigs < 2 && k == 0) continue;
    for (auto& [g, h] : enum_big_two_connected(bigs, k)) {
      EdgeMask be = g.edges & ((EdgeMask{1} << pair_count(bigs)) - 1);
      entries.push_back({be, h.sets, 1.0 / factorial(k)});
    }
  }
  const int degree = k_max * cloud.max_degree();
  const double hop = std::max(2.0 * R, 2.0 * (R + r) + 2.0 * r * (cloud.max_degree() - 1));
  const double h = n * hop;
  Point lo{};
  for (int k = 0; k < d; ++k) lo[k] = -h;
  auto st = run_sharded_vec(samples, static_cast<std::size_t>(degree) + 1, seed, 0x6d756c74ULL + n, mc,
                            [&](std::mt19937_64& rng, std::vector<double>& out) {
    std::vector<Point> p(static_cast<std::size_t>(bigs), Point{});
    for (int v = 0; v < n; ++v) uniform_point(p[v], d, lo, 2.0 * h, rng);
    EdgeMask o = overlap_mask(p, bigs, d, 2.0 * R);
    // Independent cloud estimates per (hyperedge, copy), drawn lazily.
    std::map<std::pair<VertexMask, int>, std::vector<double>> cache;
    for (const auto& e : entries) {
      if ((e.big_edges & o) != e.big_edges) continue;
      std::vector<double> poly(static_cast<std::size_t>(degree) + 1, 0.0);
      poly[0] = (std::popcount(e.big_edges) & 1) ? -e.weight : e.weight;
      std::map<VertexMask, int> copies;
      for (VertexMask J : e.clouds) {
        int c = copies[J]++;
        auto key = std::make_pair(J, c);
        auto it = cache.find(key);
        if (it == cache.end()) {
          std::vector<Point> members;
          for (VertexMask s = J; s; s &= s - 1) members.push_back(p[std::countr_zero(s)]);
          it = cache.emplace(key, cloud.sample_polynomial(members, cutoffs.inner_samples, rng)).first;
        }
        std::vector<double> next(poly.size(), 0.0);
        for (std::size_t a = 0; a < poly.size(); ++a)
          if (poly[a] != 0.0)
            for (std::size_t b = 0; a + b < poly.size() && b < it->second.size(); ++b) next[a + b] += poly[a] * it->second[b];
        poly = std::move(next);
      }
      for (std::size_t m = 0; m < poly.size(); ++m) out[m] += poly[m];
    }
  });
  MultiBigModel m;
  m.n = n;
  m.k_max = k_max;
  m.cutoffs = cutoffs;
  m.R = R;
  m.d = d;
  m.coefficients = std::move(st);
  m.scale = std::pow(2.0 * h, d * n) / factorial(n);
  return m;
}

CoefficientEstimate multi_big_coefficient(int n, double rho_r, double rho_R, int d, double r, double R, int k_max,
                                          const CloudCutoffs& cutoffs, std::int64_t samples, std::uint64_t seed,
                                          const McOptions& mc) {
  double x = cloud_density(rho_r, rho_R, d, R);
  return multi_big_model(n, d, r, R, k_max, cutoffs, samples, seed, mc).evaluate(x);
}

}  // namespace hsmix
