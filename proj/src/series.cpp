#include "hsmix/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "hsmix/error.hpp"
#include "hsmix/rods1d.hpp"

namespace hsmix {

double falling_factorial_weight(double V, long long N, int n) {
  if (!(V > 0.0)) throw invalid_argument("volume must be positive");
  if (N < 0 || n < 1) throw invalid_argument("falling_factorial_weight needs N >= 0 and n >= 1");
  if (n >= N) return 0.0;
  double w = 1.0;
  for (int i = 1; i <= n; ++i) w *= static_cast<double>(N - i) / V;
  return w;
}

CoefficientEstimate small_sphere_series(double rho_r, int order, const std::vector<CoefficientEstimate>& beta,
                                        const DomainGuard* guard) {
  if (rho_r < 0.0) throw invalid_argument("density must be non-negative");
  if (order < 0 || order >= static_cast<int>(beta.size())) throw invalid_argument("order exceeds the coefficient table");
  if (guard) {
    auto rep = kp_check(guard->params, guard->cp, guard->reading);
    if (!rep.holds && !guard->override_domain) throw not_in_domain("small-sphere density outside the checked domain");
  }
  CoefficientEstimate out = CoefficientEstimate::exact(0.0);
  for (int n = 1; n <= order; ++n) out = out + (std::pow(rho_r, n + 1) / (n + 1)) * beta[n];
  out.truncation = {{"small_order", order}};
  return out;
}

Truncation SeriesTruncation::record() const {
  return {{"small_order", small_order},       {"adjustment_order", adjustment_order},
          {"single_order", single_order},     {"multi_order", multi_order},
          {"multi_clouds", multi_clouds},     {"cloud_l_max", cloud.l_max},
          {"cloud_k_max", cloud.k_max},       {"cloud_inner_samples", cloud.inner_samples},
          {"cluster_order", cluster_order},   {"samples", samples}};
}

void SeriesTruncation::validate() const {
  if (small_order < 0 || small_order > 4) throw resource_limit("small_order must lie in [0, 4]");
  if (adjustment_order < 0 || adjustment_order > 4) throw resource_limit("adjustment_order must lie in [0, 4]");
  if (single_order < 0 || single_order > 3) throw resource_limit("single_order must lie in [0, 3]");
  if (multi_order < 0 || multi_order > 2) throw resource_limit("multi_order must lie in [0, 2]");
  if (multi_clouds < 0 || multi_clouds > 2) throw resource_limit("multi_clouds must lie in [0, 2]");
  if (cloud.l_max < 1 || cloud.k_max < 0) throw invalid_argument("cloud cutoffs need l_max >= 1, k_max >= 0");
  if (cloud.l_max + cloud.k_max > 5) throw resource_limit("cloud cutoffs require l_max + k_max <= 5");
  if (cluster_order < 1 || cluster_order > 6) throw resource_limit("cluster_order must lie in [1, 6]");
  if (samples < 10000) throw invalid_argument("at least 10000 samples required");
}

LimitTables build_limit_tables(int d, double r, double R, const SeriesTruncation& truncation, std::uint64_t seed) {
  truncation.validate();
  SphereSpecies{r, R}.validate();
  LimitTables t;
  t.d = d;
  t.r = r;
  t.R = R;
  t.truncation = truncation;
  const auto& tr = truncation;
  t.beta.assign(static_cast<std::size_t>(tr.small_order) + 1, CoefficientEstimate::exact(0.0));
  for (int n = 1; n <= tr.small_order; ++n)
    t.beta[n] = n == 1 ? CoefficientEstimate::exact(-ball_volume(d, 2.0 * r), {{"n", 1}})
                       : irreducible_coefficient(n, d, r, tr.samples, seed, tr.mc);
  for (int k = 1; k <= tr.adjustment_order; ++k)
    t.adjustment.push_back(adjustment_model(k, d, r, tr.samples, seed, tr.variant, tr.mc));
  for (int s = 1; s <= tr.single_order; ++s) t.single.push_back(single_big_model(s, d, r, R, tr.samples, seed, tr.mc));
  for (int n = 1; n <= tr.multi_order; ++n)
    t.multi.push_back(multi_big_model(n, d, r, R, tr.multi_clouds, tr.cloud, tr.samples / 4, seed, tr.mc));
  return t;
}

namespace {

double xlogx_minus_x(double rho) { return rho > 0.0 ? rho * (std::log(rho) - 1.0) : 0.0; }

void finish(FreeEnergyReport& rep) {
  double sum = rep.free_volume.value + rep.F0.value + rep.A_term.value + rep.F1.value + rep.F2.value;
  rep.value = rep.ideal - sum;
  rep.std_error = std::sqrt(rep.free_volume.std_error * rep.free_volume.std_error + rep.F0.std_error * rep.F0.std_error +
                            rep.A_term.std_error * rep.A_term.std_error + rep.F1.std_error * rep.F1.std_error +
                            rep.F2.std_error * rep.F2.std_error);
}

}  // namespace

FreeEnergyReport limit_report(const LimitTables& tables, double rho_r, double rho_R, BoundKind kind) {
  const auto& tr = tables.truncation;
  if (static_cast<int>(tables.beta.size()) != tr.small_order + 1 ||
      static_cast<int>(tables.adjustment.size()) != tr.adjustment_order ||
      static_cast<int>(tables.single.size()) != tr.single_order ||
      static_cast<int>(tables.multi.size()) != tr.multi_order)
    throw invalid_argument("coefficient tables do not match the recorded truncation");
  if (rho_r < 0.0 || rho_R < 0.0) throw invalid_argument("densities must be non-negative");
  const int d = tables.d;
  const double x = kind == BoundKind::upper ? tables.R + tables.r : tables.R;
  const double excluded = rho_R * ball_volume(d, x);
  if (!(excluded < 1.0)) throw invalid_argument("big spheres leave no available volume");

  FreeEnergyReport rep;
  rep.bound_kind = kind;
  rep.truncation = tr.record();
  rep.ideal = xlogx_minus_x(rho_r) + xlogx_minus_x(rho_R);
  rep.free_volume = CoefficientEstimate::exact(rho_r * std::log1p(-excluded));
  rep.F0 = small_sphere_series(rho_r, tr.small_order, tables.beta);

  rep.A_term = CoefficientEstimate::exact(0.0);
  for (int k = 1; k <= tr.adjustment_order; ++k)
    rep.A_term = rep.A_term + (std::pow(rho_r, k + 1) / (k + 1)) * tables.adjustment[k - 1].evaluate(excluded);

  rep.F1 = CoefficientEstimate::exact(0.0);
  const double eff = rho_r / (1.0 - excluded);
  for (int s = 1; s <= tr.single_order; ++s)
    rep.F1 = rep.F1 + (rho_R * std::pow(eff, s + 1) / (s + 1)) * tables.single[s - 1].evaluate(rho_R, kind);

  rep.F2 = CoefficientEstimate::exact(0.0);
  if (tr.multi_order > 0) {
    const double cloud_x = cloud_density(rho_r, rho_R, d, tables.R);
    for (int n = 1; n <= tr.multi_order; ++n)
      rep.F2 = rep.F2 + (std::pow(rho_R, n + 1) / (n + 1)) * tables.multi[n - 1].evaluate(cloud_x);
  }
  finish(rep);
  return rep;
}

namespace {

struct ExpansionValue {
  double value = 0.0;
  double tail = 0.0;
};

ExpansionValue expand(const ActivityTable& table, int order) {
  if (table.polymers.empty()) return {};
  auto res = cluster_log_Z(table, linear_kp_weights(table), order);
  return {res.value, res.tail_bound};
}

}  // namespace

FreeEnergyReport finite_volume_report(const ModelParams& params, BoundKind kind, int cluster_order) {
  params.validate();
  if (!params.finite_volume) throw invalid_argument("finite_volume_report needs finite-volume parameters");
  if (params.d != 1) throw invalid_argument("finite-volume bounds are evaluated exactly in d = 1 only");
  if (params.N_R > 2) throw resource_limit("finite-volume bounds available for N_R <= 2");
  if (params.N_r > 6) throw resource_limit("finite-volume bounds available for N_r <= 6");
  const double L = params.L;
  const int Nr = static_cast<int>(params.N_r), NR = static_cast<int>(params.N_R);
  const SphereSpecies sp = params.species();
  const BoxMetric metric{1, L, true};
  const double x = kind == BoundKind::upper ? params.R + params.r : params.R;
  const double avail = L - NR * 2.0 * x;
  if (!(avail > 0.0)) throw invalid_argument("big spheres leave no available volume");
  const double t = L / avail;

  FreeEnergyReport rep;
  rep.bound_kind = kind;
  rep.truncation = {{"cluster_order", cluster_order}};
  rep.ideal = -((NR + Nr) * std::log(L) - std::lgamma(NR + 1.0) - std::lgamma(Nr + 1.0)) / L;

  auto empty = expand(activity_table(Nr, {}, metric, sp, 1.0), cluster_order);
  auto scaled = expand(activity_table(Nr, {}, metric, sp, t), cluster_order);
  rep.free_volume = CoefficientEstimate::exact(-Nr * std::log(t) / L);
  rep.F0 = CoefficientEstimate::exact(empty.value / L);
  rep.A_term = CoefficientEstimate::exact((scaled.value - empty.value) / L);
  double tol = (2.0 * empty.tail + scaled.tail) / L;

  rep.F1 = CoefficientEstimate::exact(0.0);
  rep.F2 = CoefficientEstimate::exact(0.0);
  if (NR >= 1) {
    auto one = expand(activity_table(Nr, {Point{0.0, 0.0, 0.0}}, metric, sp, t), cluster_order);
    const double h1 = one.value - scaled.value;
    const double h1_tail = one.tail + scaled.tail;
    rep.F1 = CoefficientEstimate::exact(NR * h1 / L);
    tol += NR * h1_tail / L;
    if (NR == 2) {
      const double lo = 2.0 * params.R, hi = L - 2.0 * params.R;
      if (!(hi > lo)) throw invalid_argument("box too small for two big spheres");
      // The integrand is smooth between the points where the free arcs merge
      // or cross multiples of the small diameter.
      const double reach = sp.excluded(PairKind::big_small), a = sp.excluded(PairKind::small_small);
      std::vector<double> cuts{lo, hi};
      for (int j = 0; j <= Nr; ++j) {
        for (double c : {2.0 * reach + j * a, L - 2.0 * reach - j * a})
          if (c > lo && c < hi) cuts.push_back(c);
      }
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double u, double v) { return std::abs(u - v) < 1e-12; }),
                 cuts.end());
      double worst_tail = 0.0;
      auto integrand = [&](double delta) {
        auto two = expand(activity_table(Nr, {Point{0.0, 0.0, 0.0}, Point{delta, 0.0, 0.0}}, metric, sp, t),
                          cluster_order);
        worst_tail = std::max(worst_tail, two.tail + scaled.tail + 2.0 * h1_tail);
        return std::exp(two.value - scaled.value - 2.0 * h1) / L;
      };
      double I = 0.0, quad_err = 0.0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double fine = boost::math::quadrature::gauss<double, 20>::integrate(integrand, cuts[i], cuts[i + 1]);
        double coarse = boost::math::quadrature::gauss<double, 10>::integrate(integrand, cuts[i], cuts[i + 1]);
        I += fine;
        quad_err += std::abs(fine - coarse);
      }
      if (!(I > 0.0)) throw precision_failure("two-big integral is not positive");
      rep.F2 = CoefficientEstimate::exact(std::log(I) / L);
      tol += (worst_tail + quad_err / I + 1e-13) / L;
    }
  }
  rep.tolerance = tol + 1e-14 * (1.0 + std::abs(rep.ideal));
  finish(rep);
  return rep;
}

ConvergenceReport convergence_check(const ModelParams& params, const ConvergenceParams& cp, ExcludedReading reading) {
  params.validate();
  cp.validate();
  const int d = params.d;
  const double shell = shell_volume(d, params.R, params.r);
  const double rho_R = params.big_density();
  const double avail = 1.0 - rho_R * ball_volume(d, params.R + params.r);
  if (!(avail > 0.0)) throw invalid_argument("available volume must be positive");
  const double eff = params.small_density() / avail;
  ConvergenceReport rep;
  rep.c1_margin = cp.a - (std::exp(cp.b + cp.c) * shell * eff + std::exp(cp.a) * ball_volume(d, 2.0 * params.R) * rho_R);
  rep.c2_margin = cp.b - std::exp(cp.a) * shell * rho_R;
  rep.c1 = rep.c1_margin >= 0.0;
  rep.c2 = rep.c2_margin >= 0.0;
  auto kp = kp_check(params, cp, reading);
  rep.cond1_margin = kp.margin;
  rep.cond1 = kp.holds;
  return rep;
}

std::pair<FreeEnergyReport, FreeEnergyReport> free_energy_bounds(const ModelParams& params,
                                                                 const ConvergenceParams& cp,
                                                                 const SeriesTruncation& truncation,
                                                                 std::uint64_t seed) {
  params.validate();
  truncation.validate();
  auto conv = convergence_check(params, cp, truncation.reading);
  if (!conv.holds() && !truncation.override_domain)
    throw not_in_domain("convergence conditions fail at this parameter point");
  if (params.finite_volume)
    return {finite_volume_report(params, BoundKind::lower, truncation.cluster_order),
            finite_volume_report(params, BoundKind::upper, truncation.cluster_order)};
  auto tables = build_limit_tables(params.d, params.r, params.R, truncation, seed);
  return {limit_report(tables, params.rho_r, params.rho_R, BoundKind::lower),
          limit_report(tables, params.rho_r, params.rho_R, BoundKind::upper)};
}

std::vector<DensityCurvePoint> admissible_density_curve(int d, double r, const std::vector<double>& R_grid,
                                                        double rho_r, double alpha, double b, double c) {
  if (!(alpha > std::exp(b + c))) throw invalid_argument("alpha must exceed e^{b+c}");
  if (rho_r < 0.0 || b < 0.0 || c < 0.0) throw invalid_argument("densities and constants must be non-negative");
  if (R_grid.empty()) throw invalid_argument("empty radius grid");
  for (std::size_t i = 0; i < R_grid.size(); ++i) {
    if (!(R_grid[i] > r)) throw invalid_argument("every big radius must exceed the small radius");
    if (i > 0 && !(R_grid[i] > R_grid[i - 1])) throw invalid_argument("radius grid must be increasing");
  }
  const double gap = alpha - std::exp(b + c);
  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<DensityCurvePoint> out;
  for (double R : R_grid) {
    DensityCurvePoint p;
    p.R = R;
    const double shell = shell_volume(d, R, r);
    const double big2 = ball_volume(d, 2.0 * R), reach = ball_volume(d, R + r);
    p.shell_density = shell * rho_r;
    auto evaluate = [&](double eff) {
      p.effective_density = eff;
      p.a = alpha * shell * eff;
      // Without small spheres the small-sphere branch places no constraint.
      p.log_small_branch = eff > 0.0 ? -p.a + std::log(gap * shell * eff) : -ninf;
      p.log_big_branch = b > 0.0 ? -p.a + std::log(b * big2 / shell) : ninf;
      p.log_bound = std::min(p.log_small_branch, p.log_big_branch);
    };
    evaluate(rho_r);
    // One fixed-point step: the admissible rho_R feeds back into the effective small density.
    double rho_R = std::isfinite(p.log_bound) ? std::exp(p.log_bound) / big2 : 0.0;
    double base = 1.0 - rho_R * reach;
    if (base > 0.0) evaluate(rho_r / base);
    p.bound = std::exp(p.log_bound);
    out.push_back(p);
  }
  return out;
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw invalid_argument("least squares needs two or more points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw invalid_argument("least squares needs distinct abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

}  // namespace hsmix
