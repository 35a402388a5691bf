#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hsmix/estimate.hpp"
#include "hsmix/geometry.hpp"
#include "hsmix/graphs.hpp"

namespace hsmix {

// A polymer is a label set of small spheres with at least two elements.
using Polymer = VertexMask;

// Truncated (connected) weight of a tuple of polymers under the overlap
// relation; 1 for a single polymer.
double ursell(const std::vector<Polymer>& polymers);

// Every label subset of [n_labels] of size >= 2, in increasing mask order.
std::vector<Polymer> enumerate_polymers(int n_labels);

// Element of the cloud space: an ordered tuple of polymers whose labels carry
// one coordinate per (polymer, label) pair; a label shared by two polymers is
// integrated separately in each.
struct CloudSite {
  int polymer = 0;
  int label = 0;
  Point position{};
};

struct Cloud {
  std::vector<Polymer> polymers;
  std::vector<CloudSite> sites;

  int size() const;  // number of distinct labels
  // Sites ordered polymer by polymer, labels ascending within a polymer.
  static Cloud with_positions(const std::vector<Polymer>& polymers, const std::vector<Point>& positions);
};

// prod over sites of (1 + f^{ls}(p, q)) - 1, which is -1 or 0 for hard cores.
double cloud_link(const Point& p, const Cloud& Y, const BoxMetric& metric, const SphereSpecies& species);

// Integral of h(Y) against prod_i dxi(q_{V_i}), where dxi carries the
// connected-graph sum of f^{ss} inside each polymer and dq/|box| per site.
template <class H>
CoefficientEstimate cloud_integral(const std::vector<Polymer>& polymers, H&& h, const BoxMetric& metric,
                                   const SphereSpecies& species, std::int64_t samples, std::uint64_t seed,
                                   const McOptions& mc = {});

struct ConvergenceParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  void validate() const;
};

// Which excluded volume enters the small-sphere convergence condition.
enum class ExcludedReading { big_pair, small_pair };

struct ModelParams {
  int d = 1;
  double r = 0.25;
  double R = 1.0;
  double L = 0.0;        // box side (finite-volume mode)
  long long N_r = 0;
  long long N_R = 0;
  double rho_r = 0.0;    // densities (limit mode)
  double rho_R = 0.0;
  bool finite_volume = true;

  SphereSpecies species() const { return {r, R}; }
  double volume() const;
  double small_density() const;  // N_r / |box| or rho_r
  double big_density() const;
  void validate() const;
};

struct KpReport {
  bool holds = false;
  double lhs = 0.0;
  double margin = 0.0;
};

KpReport kp_check(const ModelParams& params, const ConvergenceParams& cp,
                  ExcludedReading reading = ExcludedReading::big_pair);

enum class QuadratureMethod { exact_1d, midpoint_1d, monte_carlo };

struct QuadratureSpec {
  QuadratureMethod method = QuadratureMethod::exact_1d;
  int resolution = 64;            // midpoint cells per unit length at the coarse level
  double tolerance = 1e-3;        // absolute, for the Richardson estimate
  std::int64_t samples = 100000;  // monte_carlo
  std::uint64_t seed = 1;
};

// Activity of a polymer V in the presence of big spheres. `ratio` replaces
// |box| / |available volume| when given.
CoefficientEstimate polymer_activity(Polymer V, const std::vector<Point>& big_centers, const BoxMetric& metric,
                                     const SphereSpecies& species, const QuadratureSpec& spec = {},
                                     std::optional<double> ratio = std::nullopt);

struct ActivityTable {
  int n_labels = 0;
  std::vector<Polymer> polymers;
  std::vector<double> activity;
};

// Activities of every polymer on [n_labels]; in d = 1 only |V| matters, so the
// exact values are computed once per size.
ActivityTable activity_table(int n_labels, const std::vector<Point>& big_centers, const BoxMetric& metric,
                             const SphereSpecies& species, std::optional<double> ratio = std::nullopt);

// log of 1 + sum over families of pairwise disjoint polymers of prod activity.
double log_polymer_partition_exact(const ActivityTable& table);

struct ClusterResult {
  double value = 0.0;
  double tail_bound = 0.0;  // bound on |log Z - value|
  double t_star = 0.0;      // activities may be scaled by t_star before KP fails
  int order = 0;
  bool kp_holds = false;
};

// Truncated cluster expansion with a geometric tail bound obtained from the
// Kotecky-Preiss criterion with weights a_weights[i] for polymers[i].
ClusterResult cluster_log_Z(const ActivityTable& table, const std::vector<double>& a_weights, int order,
                            bool allow_outside_domain = false);
// Picks weights c |V| with c maximising the admissible scaling t_star.
std::vector<double> linear_kp_weights(const ActivityTable& table);

// Finite-volume analogue of the irreducible coefficient for hard rods of
// length a on a circle of length L (d = 1, no big spheres). Uses the exact
// activities L^{1-|V|} c_{|V|}, so the value is a power series in 1/L whose
// constant term is the infinite-volume coefficient; terms up to
// L^{-max_excess} are kept.
struct FiniteVolumeCoefficient {
  double value = 0.0;
  std::vector<double> by_excess;  // coefficient of L^{-e}
  int max_excess = 0;
};

FiniteVolumeCoefficient finite_volume_irreducible_1d(int k, double L, double a, int max_excess = 3);

}  // namespace hsmix

#include "hsmix/detail/cloud_integral.hpp"
