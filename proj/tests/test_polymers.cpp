#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hsmix/error.hpp"
#include "hsmix/integrals.hpp"
#include "hsmix/oracle.hpp"
#include "hsmix/polymers.hpp"

using namespace hsmix;

namespace {

ActivityTable single_type(double z) {
  ActivityTable t;
  t.n_labels = 2;
  t.polymers = {0b11};
  t.activity = {z};
  return t;
}

}  // namespace

TEST_CASE("ursell weights") {
  CHECK(ursell({0b011}) == 1.0);
  CHECK(ursell({0b011, 0b110}) == -1.0);
  CHECK(ursell({0b0011, 0b1100}) == 0.0);
  CHECK(ursell({0b011, 0b110, 0b101}) == 2.0);
  CHECK(ursell({0b011, 0b011}) == -1.0);
}

TEST_CASE("ursell weight ignores the order of polymers") {
  std::vector<Polymer> p{0b0011, 0b0110, 0b1100, 0b1001};
  double ref = ursell(p);
  std::sort(p.begin(), p.end());
  do {
    CHECK(ursell(p) == ref);
  } while (std::next_permutation(p.begin(), p.end()));
}

TEST_CASE("polymer enumeration") {
  for (int n = 2; n <= 6; ++n) {
    auto ps = enumerate_polymers(n);
    CHECK(ps.size() == (std::size_t{1} << n) - n - 1);
    CHECK(std::is_sorted(ps.begin(), ps.end()));
    for (Polymer v : ps) CHECK(std::popcount(v) >= 2);
  }
}

TEST_CASE("cloud link") {
  SphereSpecies sp{0.25, 1.0};
  BoxMetric m{1, 50.0, true};
  auto far = Cloud::with_positions({0b11}, {Point{10.0, 0, 0}, Point{10.4, 0, 0}});
  CHECK(cloud_link(Point{}, far, m, sp) == 0.0);
  auto near = Cloud::with_positions({0b11}, {Point{1.0, 0, 0}, Point{10.4, 0, 0}});
  CHECK(cloud_link(Point{}, near, m, sp) == -1.0);
  for (double q : {0.5, 1.2, 1.3, 3.0}) {
    Cloud one;
    one.polymers = {0b1};
    one.sites = {{0, 0, Point{q, 0, 0}}};
    CHECK(cloud_link(Point{}, one, m, sp) == mayer(PairKind::big_small, Point{}, Point{q, 0, 0}, m, sp));
  }
  auto shared = Cloud::with_positions({0b011, 0b110}, {Point{1, 0, 0}, Point{2, 0, 0}, Point{3, 0, 0}, Point{4, 0, 0}});
  CHECK(shared.sites.size() == 4);
  CHECK(shared.size() == 3);
}

TEST_CASE("a label shared by two copies of a polymer is integrated separately") {
  SphereSpecies sp{0.25, 1.0};
  BoxMetric m{1, 20.0, true};
  Point p{};
  auto link0 = [&](const Cloud& y, int poly) {
    for (const auto& s : y.sites)
      if (s.polymer == poly && s.label == 0) return static_cast<double>(mayer(PairKind::big_small, p, s.position, m, sp));
    return 0.0;
  };
  auto single = cloud_integral({0b11}, [&](const Cloud& y) { return link0(y, 0); }, m, sp, 400000, 3);
  auto pair = cloud_integral({0b11, 0b11}, [&](const Cloud& y) { return link0(y, 0) * link0(y, 1); }, m, sp, 4000000, 4);
  double one = 2.0 * 1.25 * 2.0 * 0.5 / (20.0 * 20.0);
  CHECK(std::abs(single.value - one) <= 3.0 * single.std_error);
  CHECK(std::abs(pair.value - one * one) <= 3.0 * pair.std_error);
}

TEST_CASE("polymer activities in 1d") {
  SphereSpecies sp{0.25, 1.0};
  BoxMetric m{1, 20.0, true};
  const double a = 0.5;
  CHECK(polymer_activity(0b1, {}, m, sp).value == 1.0);
  CHECK(polymer_activity(0b11, {}, m, sp).value == doctest::Approx(-2.0 * a / 20.0).epsilon(1e-12));
  for (Polymer V : {Polymer{0b11}, Polymer{0b111}}) {
    for (const auto& bigs : {std::vector<Point>{}, std::vector<Point>{Point{3.0, 0, 0}}}) {
      auto exact = polymer_activity(V, bigs, m, sp);
      QuadratureSpec mc{QuadratureMethod::monte_carlo};
      mc.samples = 400000;
      auto est = polymer_activity(V, bigs, m, sp, mc);
      CHECK(std::abs(est.value - exact.value) <= 3.0 * est.std_error + 1e-15);
      QuadratureSpec mid{QuadratureMethod::midpoint_1d};
      mid.resolution = V == 0b11 ? 64 : 8;
      mid.tolerance = 1e-3;
      auto grid = polymer_activity(V, bigs, m, sp, mid);
      CHECK(std::abs(grid.value - exact.value) <= std::max(grid.std_error, 1e-12) * 2.0 + 1e-6);
    }
  }
  CHECK_THROWS_AS(polymer_activity(0b11111, {}, m, sp), resource_limit);
  CHECK_THROWS_AS(polymer_activity(0b11, {}, BoxMetric{2, 20.0, true}, sp), invalid_argument);
}

TEST_CASE("activities with a given volume ratio") {
  SphereSpecies sp{0.25, 1.0};
  BoxMetric m{1, 20.0, true};
  std::vector<Point> bigs{Point{3.0, 0, 0}};
  double natural = m.L / free_volume_exact_1d(bigs, m, sp);
  auto a = polymer_activity(0b11, bigs, m, sp);
  auto b = polymer_activity(0b11, bigs, m, sp, {}, natural);
  auto c = polymer_activity(0b11, bigs, m, sp, {}, 1.0);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-14));
  CHECK(c.value * natural * natural == doctest::Approx(a.value).epsilon(1e-12));
}

TEST_CASE("cluster expansion of a single polymer type") {
  auto t = single_type(0.01);
  auto r1 = cluster_log_Z(t, {1.0}, 1);
  CHECK(r1.value == doctest::Approx(0.01));
  auto r4 = cluster_log_Z(t, {1.0}, 4);
  CHECK(std::abs(r4.value - std::log1p(0.01)) <= r4.tail_bound);
  CHECK(r4.tail_bound < r1.tail_bound);
}

TEST_CASE("cluster expansion refuses tables outside the criterion") {
  auto t = single_type(0.9);
  CHECK_THROWS_AS(cluster_log_Z(t, linear_kp_weights(t), 3), not_in_domain);
  auto r = cluster_log_Z(t, linear_kp_weights(t), 3, true);
  CHECK_FALSE(r.kp_holds);
}

TEST_CASE("cluster expansion against the brute-force partition function") {
  TinyInstance inst;
  inst.L = 20.0;
  inst.N_r = 3;
  SUBCASE("no big spheres") {
    auto z = brute_Z_empty(inst);
    auto table = activity_table(3, {}, inst.metric(), inst.species());
    auto ce = cluster_log_Z(table, linear_kp_weights(table), 3);
    CHECK(ce.kp_holds);
    CHECK(std::abs(ce.value - std::log(z.interaction)) <= ce.tail_bound + 1e-12);
    CHECK(log_polymer_partition_exact(table) == doctest::Approx(std::log(z.interaction)).epsilon(1e-10));
  }
  SUBCASE("one big sphere") {
    std::vector<Point> bigs{Point{4.0, 0, 0}};
    auto z = brute_Z_p(inst, bigs);
    double ratio = inst.L / free_volume_exact_1d(bigs, inst.metric(), inst.species());
    auto table = activity_table(3, bigs, inst.metric(), inst.species());
    auto ce = cluster_log_Z(table, linear_kp_weights(table), 3);
    // With activities normalised by the free volume, log Z^p = N_r log(|free| / |box|) + log of the polymer gas.
    double lhs = std::log(z.interaction) + inst.N_r * std::log(ratio);
    CHECK(std::abs(ce.value - lhs) <= ce.tail_bound + 1e-12);
  }
}

TEST_CASE("tail bound grows as activities approach the criterion") {
  TinyInstance inst;
  inst.L = 20.0;
  auto base = activity_table(3, {}, inst.metric(), inst.species());
  double prev_tail = 0.0, prev_t = INFINITY;
  for (double s : {1.0, 2.0, 4.0, 8.0}) {
    auto t = base;
    for (double& z : t.activity) z *= s;
    auto r = cluster_log_Z(t, linear_kp_weights(t), 3, true);
    CHECK(r.t_star < prev_t);
    if (r.kp_holds) CHECK(r.tail_bound > prev_tail);
    prev_t = r.t_star;
    prev_tail = r.tail_bound;
  }
}

TEST_CASE("Kotecky-Preiss check") {
  ModelParams p;
  p.d = 1;
  p.L = 10000.0;
  ConvergenceParams cp{0.1, 0.05, 0.5};
  p.N_r = 0;
  for (double c : {1e-3, 0.1, 2.0}) CHECK(kp_check(p, {0.1, 0.05, c}).holds);
  double prev = INFINITY;
  for (long long n = 0; n <= 20; ++n) {
    p.N_r = n;
    double margin = kp_check(p, cp).margin;
    CHECK(margin < prev);
    prev = margin;
  }
  // Largest count that still satisfies the criterion, by bisection.
  long long lo = 0, hi = 1;
  p.N_r = hi;
  while (kp_check(p, cp).holds) p.N_r = (hi *= 2);
  while (hi - lo > 1) {
    long long mid = (lo + hi) / 2;
    p.N_r = mid;
    (kp_check(p, cp).holds ? lo : hi) = mid;
  }
  p.N_r = lo;
  CHECK(kp_check(p, cp).holds);
  double near_edge = kp_check(p, cp).margin;
  p.N_r = lo + 1;
  CHECK_FALSE(kp_check(p, cp).holds);
  CHECK(near_edge >= 0.0);
  CHECK(near_edge < cp.c);
}

TEST_CASE("finite-volume irreducible coefficient approaches the limit as 1/L") {
  const double a = 0.5;
  for (int k = 1; k <= 3; ++k) {
    double limit = irreducible_coefficient_exact_1d(k, a);
    auto f = finite_volume_irreducible_1d(k, 100.0, a);
    CHECK(f.by_excess[0] == doctest::Approx(limit).epsilon(1e-12));
    double d1 = finite_volume_irreducible_1d(k, 50.0, a).value - limit;
    double d2 = finite_volume_irreducible_1d(k, 100.0, a).value - limit;
    CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(0.05));
  }
  CHECK_THROWS_AS(finite_volume_irreducible_1d(4, 100.0, a), resource_limit);
  CHECK_THROWS_AS(finite_volume_irreducible_1d(2, 2.0, a), invalid_argument);
}
