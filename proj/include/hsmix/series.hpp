#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hsmix/estimate.hpp"
#include "hsmix/integrals.hpp"
#include "hsmix/polymers.hpp"

namespace hsmix {

// (N-1)(N-2)...(N-n) / V^n for n < N, else 0.
double falling_factorial_weight(double V, long long N, int n);

// Optional convergence guard for the small-sphere series.
struct DomainGuard {
  ModelParams params;
  ConvergenceParams cp;
  ExcludedReading reading = ExcludedReading::big_pair;
  bool override_domain = false;
};

// sum_{n <= order} beta_n rho^{n+1} / (n+1); beta[n] holds beta_n.
CoefficientEstimate small_sphere_series(double rho_r, int order, const std::vector<CoefficientEstimate>& beta,
                                        const DomainGuard* guard = nullptr);

struct SeriesTruncation {
  int small_order = 3;        // beta_n, n <= small_order
  int adjustment_order = 2;   // A_inf(k), k <= adjustment_order
  int single_order = 2;       // B1_inf(s), s <= single_order
  int multi_order = 1;        // B*(n), n <= multi_order
  int multi_clouds = 1;       // clouds per multi-big graph
  CloudCutoffs cloud{};
  int cluster_order = 3;      // finite-volume cluster expansion order
  std::int64_t samples = 200000;
  AdjustmentVariant variant = AdjustmentVariant::as_printed;
  ExcludedReading reading = ExcludedReading::big_pair;
  bool override_domain = false;
  McOptions mc{};

  Truncation record() const;
  void validate() const;
};

struct FreeEnergyReport {
  BoundKind bound_kind = BoundKind::upper;
  double ideal = 0.0;
  CoefficientEstimate free_volume;  // effect of the reduced available volume on the small spheres
  CoefficientEstimate F0;
  CoefficientEstimate A_term;
  CoefficientEstimate F1;
  CoefficientEstimate F2;
  double value = 0.0;       // ideal - (free_volume + F0 + A_term + F1 + F2)
  double std_error = 0.0;   // Monte Carlo part
  double tolerance = 0.0;   // deterministic truncation and quadrature bound
  Truncation truncation;
};

// Density-independent ingredients of the limit free energy, computed once so
// that every grid point reuses the same Monte Carlo draws.
struct LimitTables {
  int d = 1;
  double r = 0.0;
  double R = 0.0;
  SeriesTruncation truncation;
  std::vector<CoefficientEstimate> beta;     // index n
  std::vector<AdjustmentModel> adjustment;   // index k-1
  std::vector<SingleBigModel> single;        // index s-1
  std::vector<MultiBigModel> multi;          // index n-1
};

LimitTables build_limit_tables(int d, double r, double R, const SeriesTruncation& truncation, std::uint64_t seed);
FreeEnergyReport limit_report(const LimitTables& tables, double rho_r, double rho_R, BoundKind kind);

// Exact finite-volume bound in d = 1 (N_R <= 2, N_r <= 6), from the cluster
// expansion of the small-sphere polymer systems with the available-volume
// ratio replaced by its bound.
FreeEnergyReport finite_volume_report(const ModelParams& params, BoundKind kind, int cluster_order);

struct ConvergenceReport {
  double c1_margin = 0.0;
  double c2_margin = 0.0;
  double cond1_margin = 0.0;
  bool c1 = false;
  bool c2 = false;
  bool cond1 = false;
  bool holds() const { return c1 && c2 && cond1; }
};

ConvergenceReport convergence_check(const ModelParams& params, const ConvergenceParams& cp,
                                    ExcludedReading reading = ExcludedReading::big_pair);

// Returns (lower, upper). Throws not_in_domain when the convergence check fails
// unless the truncation asks for an override.
std::pair<FreeEnergyReport, FreeEnergyReport> free_energy_bounds(const ModelParams& params,
                                                                 const ConvergenceParams& cp,
                                                                 const SeriesTruncation& truncation,
                                                                 std::uint64_t seed);

struct DensityCurvePoint {
  double R = 0.0;
  double shell_density = 0.0;  // shell volume times rho_r
  double effective_density = 0.0;
  double a = 0.0;
  double log_small_branch = 0.0;  // log of e^{-a} (alpha - e^{b+c}) shell rho
  double log_big_branch = 0.0;    // log of e^{-a} b |B_2R| / shell
  double log_bound = 0.0;         // log of the admissible rho_R |B_2R|
  double bound = 0.0;
};

std::vector<DensityCurvePoint> admissible_density_curve(int d, double r, const std::vector<double>& R_grid,
                                                        double rho_r, double alpha, double b, double c);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace hsmix
