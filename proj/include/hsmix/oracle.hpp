#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsmix/geometry.hpp"
#include "hsmix/series.hpp"

namespace hsmix {

struct TinyInstance {
  int d = 1;
  double L = 20.0;
  double r = 0.25;
  double R = 1.0;
  int N_r = 0;
  int N_R = 0;
  std::int64_t samples = 200000;  // Monte Carlo budget for d = 2
  std::uint64_t seed = 1;
  double max_relative_error = 1.0;  // Monte Carlo results above this raise precision_failure

  SphereSpecies species() const { return {r, R}; }
  BoxMetric metric() const { return {d, L, true}; }
  ModelParams params() const;
  void validate() const;
};

struct OracleValue {
  double value = 0.0;        // Z / |box|^N, including 1/(N_R! N_r!)
  double interaction = 0.0;  // Z^int: integral of all Mayer factors over |box|^N
  double error = 0.0;
};

// Full canonical partition function. Exact in d = 1 (closed-form rod geometry
// and Gauss-Legendre on polynomial pieces), Monte Carlo in d = 2.
OracleValue brute_Z(const TinyInstance& inst);

// Small spheres alone: integral of prod (1 + f^{ss}) over |box|^{N_r}, no 1/N_r!.
OracleValue brute_Z_empty(const TinyInstance& inst);
// Small spheres with fixed big centres, same normalisation.
OracleValue brute_Z_p(const TinyInstance& inst, const std::vector<Point>& big_centers);

struct SandwichReport {
  bool skipped = false;
  std::string reason;
  double exact = 0.0;  // -(1/|box|) log of the effective partition function
  double lower = 0.0;
  double upper = 0.0;
  double tolerance = 0.0;
  bool holds = false;
};

SandwichReport sandwich_test(const TinyInstance& inst, const ConvergenceParams& cp, int cluster_order = 3,
                             ExcludedReading reading = ExcludedReading::big_pair);

struct TreeGraphReport {
  int n = 0;
  std::int64_t trials = 0;
  std::int64_t violations = 0;
  double max_ratio = 0.0;         // max |connected sum| / tree sum over random configurations
  double max_ratio_exhaustive = 0.0;  // same over every overlap graph on n vertices
  std::int64_t exhaustive_violations = 0;
};

// Tree-graph domination on random admissible tuples (points uniform in a
// small box of side comparable to the excluded distance) and on every
// overlap graph.
TreeGraphReport tree_graph_check(int n, std::int64_t trials, std::uint64_t seed, int d = 2, double r = 0.5);

}  // namespace hsmix
