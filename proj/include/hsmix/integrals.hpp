#pragma once

#include <cstdint>
#include <vector>

#include "hsmix/estimate.hpp"
#include "hsmix/geometry.hpp"
#include "hsmix/graphs.hpp"

namespace hsmix {

enum class BoundKind { upper, lower };

// (1/n!) sum over two-connected graphs on n+1 small spheres of the bond
// integral with one sphere pinned at the origin.
CoefficientEstimate irreducible_coefficient(int n, int d, double r, std::int64_t samples, std::uint64_t seed,
                                            const McOptions& mc = {});
// Closed form for hard rods of length a: -(n+1) a^n / n.
double irreducible_coefficient_exact_1d(int n, double a);

// Integral of the connected-graph sum over m small spheres, one pinned.
CoefficientEstimate connected_cluster_integral(int m, int d, double r, std::int64_t samples, std::uint64_t seed,
                                               const McOptions& mc = {});

struct CoverCollection {
  std::vector<VertexMask> sets;  // distinct subsets of [k+1], ascending masks
  double ursell = 0.0;
  long long orderings = 1;       // number of ordered tuples it stands for
};

// Collections of distinct subsets of [k+1] of size >= 2 covering [k+1] with
// tree-like overlap, i.e. sum (|V_i| - 1) = k.
struct CoverSum {
  int k = 0;
  std::vector<CoverCollection> collections;
};

CoverSum tree_covers(int k);

enum class AdjustmentVariant {
  as_printed,     // graph factor times the ordered cover sum
  cover_coupled,  // each polymer carries its own connected cluster integral
};

// Precomputed ingredients of the adjustment coefficient; evaluate() is cheap
// and reuses the same Monte Carlo draws for every density.
struct AdjustmentModel {
  int k = 0;
  AdjustmentVariant variant = AdjustmentVariant::as_printed;
  CoefficientEstimate graph_factor;               // (1/k!) connected integral on k+1 spheres
  std::vector<CoefficientEstimate> cluster;       // index m: connected integral on m spheres
  CoverSum covers;

  CoefficientEstimate evaluate(double rho) const;
};

AdjustmentModel adjustment_model(int k, int d, double r, std::int64_t samples, std::uint64_t seed,
                                 AdjustmentVariant variant = AdjustmentVariant::as_printed, const McOptions& mc = {});
// Same with the connected integrals supplied (index m, entries 0 and 1 unused).
AdjustmentModel adjustment_model_from(int k, const std::vector<CoefficientEstimate>& cluster,
                                      AdjustmentVariant variant);
CoefficientEstimate adjustment_coefficient(int k, double rho, int d, double r, std::int64_t samples,
                                           std::uint64_t seed,
                                           AdjustmentVariant variant = AdjustmentVariant::as_printed,
                                           const McOptions& mc = {});

// Single big sphere at the origin with s+1 small spheres.
struct SingleBigModel {
  int s = 0;
  int d = 1;
  double r = 0.0;
  double R = 0.0;
  CoefficientEstimate irreducible;      // beta_s
  CoefficientEstimate graph_term;       // (1/s!) sum over two-connected graphs with the big vertex
  std::vector<CoefficientEstimate> by_big_degree;  // index l: graphs whose big vertex has degree l

  double prefactor(double rho_R, BoundKind kind) const;
  CoefficientEstimate evaluate(double rho_R, BoundKind kind = BoundKind::upper) const;
};

SingleBigModel single_big_model(int s, int d, double r, double R, std::int64_t samples, std::uint64_t seed,
                                const McOptions& mc = {});
CoefficientEstimate single_big_coefficient(int s, int d, double r, double R, double rho_R, std::int64_t samples,
                                           std::uint64_t seed, BoundKind kind = BoundKind::upper,
                                           const McOptions& mc = {});

// Terms of the cloud factor for a fixed set of big centres (flat space):
// term(l, k) = (1/(l! k!)) * integral over l white and k further small spheres
// of the white-assignment sum times the articulation-free graph sum.
class CloudFactorModel {
 public:
  CloudFactorModel(int d, double r, double R, int l_max, int k_max);

  int d() const { return d_; }
  int l_max() const { return l_max_; }
  int k_max() const { return k_max_; }
  std::size_t term_count() const { return terms_.size(); }
  int term_l(std::size_t t) const { return terms_[t].l; }
  int term_k(std::size_t t) const { return terms_[t].k; }
  int max_degree() const { return l_max_ + k_max_; }

  // One unbiased draw of every term, written to out[t].
  void sample_terms(const std::vector<Point>& bigs, std::mt19937_64& rng, std::vector<double>& out) const;
  // Unbiased estimate of the polynomial coefficients (by power of the density) from `inner` draws.
  std::vector<double> sample_polynomial(const std::vector<Point>& bigs, int inner, std::mt19937_64& rng) const;

 private:
  struct Term {
    int l = 0;
    int k = 0;
    GraphSumTable table;
    double weight = 0.0;  // 1/(l! k!)
  };
  int d_;
  double r_, R_;
  int l_max_, k_max_;
  std::vector<Term> terms_;
};

double cloud_density(double rho_r, double rho_R, int d, double R);

struct CloudFactorResult {
  CoefficientEstimate total;
  std::vector<int> l, k;
  std::vector<CoefficientEstimate> terms;  // without the density power
};

CloudFactorResult cloud_factor_terms(const std::vector<Point>& bigs, double rho_r, double rho_R, int d, double r,
                                     double R, int l_max, int k_max, std::int64_t samples, std::uint64_t seed,
                                     const McOptions& mc = {});
CoefficientEstimate cloud_factor(const std::vector<Point>& bigs, double rho_r, double rho_R, int d, double r,
                                 double R, int l_max, int k_max, std::int64_t samples, std::uint64_t seed,
                                 const McOptions& mc = {});

struct CloudCutoffs {
  int l_max = 2;
  int k_max = 1;
  int inner_samples = 32;
};

// Multi-big coefficient as a polynomial in the cloud density x; the Monte
// Carlo draws are shared by every x.
struct MultiBigModel {
  int n = 1;
  int k_max = 0;
  CloudCutoffs cutoffs;
  double R = 0.0;
  int d = 1;
  VectorStats coefficients;  // component m multiplies x^m
  double scale = 1.0;

  CoefficientEstimate evaluate(double x) const;
};

MultiBigModel multi_big_model(int n, int d, double r, double R, int k_max, const CloudCutoffs& cutoffs,
                              std::int64_t samples, std::uint64_t seed, const McOptions& mc = {});
CoefficientEstimate multi_big_coefficient(int n, double rho_r, double rho_R, int d, double r, double R, int k_max,
                                          const CloudCutoffs& cutoffs, std::int64_t samples, std::uint64_t seed,
                                          const McOptions& mc = {});

}  // namespace hsmix
