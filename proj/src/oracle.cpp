#include "hsmix/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "hsmix/error.hpp"
#include "hsmix/graphs.hpp"
#include "hsmix/rods1d.hpp"

namespace hsmix {

ModelParams TinyInstance::params() const {
  ModelParams p;
  p.d = d;
  p.r = r;
  p.R = R;
  p.L = L;
  p.N_r = N_r;
  p.N_R = N_R;
  p.finite_volume = true;
  return p;
}

void TinyInstance::validate() const {
  if (d < 1 || d > 2) throw invalid_argument("tiny instances support d = 1 or d = 2");
  species().validate();
  if (!(L > 2.0 * R)) throw invalid_argument("box must be longer than a big diameter");
  if (N_r < 0 || N_R < 0) throw invalid_argument("counts must be non-negative");
  if (N_r > 4) throw resource_limit("tiny instances allow at most four small spheres");
  if (N_R > 2) throw resource_limit("tiny instances allow at most two big spheres");
  if (d == 2 && samples < 2) throw invalid_argument("Monte Carlo budget must be at least two samples");
}

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Small-sphere integral over the circle with big spheres at `centers`, divided by L^{N_r}.
double rods_with_bigs(const TinyInstance& inst, const std::vector<double>& centers) {
  auto fs = rods1d::free_space(centers, inst.L, inst.R + inst.r);
  return static_cast<double>(rods1d::packing_volume(fs, inst.N_r, 2.0 * inst.r) /
                             std::pow(static_cast<long double>(inst.L), inst.N_r));
}

// Monte Carlo average of the product of Mayer factors with big centres either
// fixed or sampled.
OracleValue monte_carlo(const TinyInstance& inst, const std::vector<Point>* fixed_bigs, int n_bigs, int n_small) {
  const auto metric = inst.metric();
  const auto sp = inst.species();
  auto st = run_sharded(inst.samples, inst.seed, 0x6f72636cULL, {}, [&](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, inst.L);
    std::vector<Point> bigs, smalls(static_cast<std::size_t>(n_small), Point{});
    if (fixed_bigs) bigs = *fixed_bigs;
    else bigs.assign(static_cast<std::size_t>(n_bigs), Point{});
    auto draw = [&](Point& p) {
      for (int k = 0; k < inst.d; ++k) p[k] = u(rng);
    };
    if (!fixed_bigs)
      for (auto& p : bigs) draw(p);
    for (auto& p : smalls) draw(p);
    for (std::size_t i = 0; i < bigs.size(); ++i)
      for (std::size_t j = i + 1; j < bigs.size(); ++j)
        if (mayer(PairKind::big_big, bigs[i], bigs[j], metric, sp)) return 0.0;
    for (std::size_t i = 0; i < smalls.size(); ++i) {
      for (const auto& b : bigs)
        if (mayer(PairKind::big_small, b, smalls[i], metric, sp)) return 0.0;
      for (std::size_t j = i + 1; j < smalls.size(); ++j)
        if (mayer(PairKind::small_small, smalls[i], smalls[j], metric, sp)) return 0.0;
    }
    return 1.0;
  });
  OracleValue v;
  v.interaction = st.mean;
  v.error = st.std_error();
  if (v.interaction > 0.0 && v.error > inst.max_relative_error * v.interaction)
    throw precision_failure("Monte Carlo oracle error above the requested relative tolerance");
  return v;
}

}  // namespace

OracleValue brute_Z(const TinyInstance& inst) {
  inst.validate();
  OracleValue v;
  if (inst.d == 2) {
    v = monte_carlo(inst, nullptr, inst.N_R, inst.N_r);
  } else if (inst.N_R == 0) {
    v.interaction = rods_with_bigs(inst, {});
  } else if (inst.N_R == 1) {
    v.interaction = rods_with_bigs(inst, {0.0});
  } else {
    // Fix the first big sphere at 0; the second sits at distance delta.
    // Between the breakpoints the small-sphere volume is a polynomial in delta.
    const double lo = 2.0 * inst.R, hi = inst.L - 2.0 * inst.R;
    const double reach = inst.R + inst.r, a = 2.0 * inst.r;
    std::vector<double> cuts{lo, hi};
    for (int j = 0; j <= inst.N_r; ++j)
      for (double c : {2.0 * reach + j * a, inst.L - 2.0 * reach - j * a})
        if (c > lo && c < hi) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    auto f = [&](double delta) { return rods_with_bigs(inst, {0.0, delta}); };
    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (!(cuts[i + 1] > cuts[i])) continue;
      double fine = boost::math::quadrature::gauss<double, 20>::integrate(f, cuts[i], cuts[i + 1]);
      double coarse = boost::math::quadrature::gauss<double, 10>::integrate(f, cuts[i], cuts[i + 1]);
      total += fine;
      err += std::abs(fine - coarse);
    }
    v.interaction = total / inst.L;
    v.error = err / inst.L;
  }
  double norm = factorial(inst.N_R) * factorial(inst.N_r);
  v.value = v.interaction / norm;
  v.error /= norm;
  return v;
}

OracleValue brute_Z_empty(const TinyInstance& inst) { return brute_Z_p(inst, {}); }

OracleValue brute_Z_p(const TinyInstance& inst, const std::vector<Point>& big_centers) {
  inst.validate();
  check_admissible(big_centers, inst.metric(), inst.species());
  OracleValue v;
  if (inst.d == 2) {
    v = monte_carlo(inst, &big_centers, static_cast<int>(big_centers.size()), inst.N_r);
  } else {
    std::vector<double> x;
    for (const auto& p : big_centers) x.push_back(p[0]);
    v.interaction = rods_with_bigs(inst, x);
  }
  v.value = v.interaction;
  return v;
}

SandwichReport sandwich_test(const TinyInstance& inst, const ConvergenceParams& cp, int cluster_order,
                             ExcludedReading reading) {
  inst.validate();
  if (inst.d != 1) throw invalid_argument("the sandwich test is exact in d = 1 only");
  SandwichReport rep;
  auto params = inst.params();
  auto conv = convergence_check(params, cp, reading);
  if (!conv.holds()) {
    rep.skipped = true;
    rep.reason = "not-in-domain: convergence conditions fail";
    return rep;
  }
  TinyInstance no_bigs = inst;
  no_bigs.N_R = 0;
  auto full = brute_Z(inst);
  auto empty = brute_Z_empty(no_bigs);
  // Effective partition function: Z^int / Z^empty.
  rep.exact = -std::log(full.interaction / empty.interaction) / inst.L + 0.0;
  double oracle_err = full.error / std::max(full.interaction, 1e-300) / inst.L;
  if (inst.N_R == 0) {
    rep.lower = rep.upper = 0.0;
  } else {
    try {
      auto lo = finite_volume_report(params, BoundKind::lower, cluster_order);
      auto hi = finite_volume_report(params, BoundKind::upper, cluster_order);
      // Only the big-sphere dependent part of -(1/|box|) log Z is bracketed.
      rep.lower = -(lo.free_volume.value + lo.A_term.value + lo.F1.value + lo.F2.value);
      rep.upper = -(hi.free_volume.value + hi.A_term.value + hi.F1.value + hi.F2.value);
      rep.tolerance = std::max(lo.tolerance, hi.tolerance);
    } catch (const not_in_domain& e) {
      rep.skipped = true;
      rep.reason = std::string("not-in-domain: ") + e.what();
      return rep;
    }
  }
  rep.tolerance += oracle_err + 1e-12 * (1.0 + std::abs(rep.exact));
  rep.holds = rep.lower - rep.tolerance <= rep.exact && rep.exact <= rep.upper + rep.tolerance;
  return rep;
}

TreeGraphReport tree_graph_check(int n, std::int64_t trials, std::uint64_t seed, int d, double r) {
  if (n < 2) throw invalid_argument("tree-graph check needs n >= 2");
  if (n > 6) throw resource_limit("tree-graph check available for n <= 6");
  if (d < 1 || d > kMaxDim) throw invalid_argument("dimension must lie in [1, 3]");
  if (!(r > 0.0)) throw invalid_argument("radius must be positive");
  GraphSumTable connected(n, enum_connected(n));
  GraphSumTable trees(n, enum_spanning_trees(n), false);
  TreeGraphReport rep;
  rep.n = n;
  rep.trials = trials;
  auto ratio = [&](EdgeMask o, std::int64_t& violations) {
    double c = std::abs(connected(o)), t = trees(o);
    if (c > t) ++violations;
    return t > 0.0 ? c / t : 0.0;
  };
  // Side chosen so that a typical tuple mixes overlapping and separated pairs.
  const double side = 2.0 * r * std::max(1.0, std::pow(static_cast<double>(n), 1.0 / d));
  const double excl = 2.0 * r;
  std::int64_t violations = 0;
  double worst = 0.0;
  auto rng = make_rng(seed, 0x74726565ULL, static_cast<std::uint64_t>(n));
  std::uniform_real_distribution<double> u(0.0, side);
  std::vector<Point> x(static_cast<std::size_t>(n), Point{});
  for (std::int64_t t = 0; t < trials; ++t) {
    for (auto& p : x)
      for (int k = 0; k < d; ++k) p[k] = u(rng);
    EdgeMask o = 0;
    for (int j = 1; j < n; ++j)
      for (int i = 0; i < j; ++i)
        if (overlaps_flat(x[i], x[j], d, excl)) o |= EdgeMask{1} << pair_index(i, j);
    worst = std::max(worst, ratio(o, violations));
  }
  rep.violations = violations;
  rep.max_ratio = worst;
  std::int64_t exhaustive = 0;
  double worst_all = 0.0;
  for (EdgeMask o = 0; o < (EdgeMask{1} << pair_count(n)); ++o) worst_all = std::max(worst_all, ratio(o, exhaustive));
  rep.exhaustive_violations = exhaustive;
  rep.max_ratio_exhaustive = worst_all;
  return rep;
}

}  // namespace hsmix
