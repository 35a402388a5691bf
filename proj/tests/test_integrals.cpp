#include <doctest.h>

#include <bit>
#include <cmath>
#include <set>

#include "hsmix/error.hpp"
#include "hsmix/integrals.hpp"
#include "hsmix/rods1d.hpp"

using namespace hsmix;

namespace {

bool within(const CoefficientEstimate& e, double expected, double extra = 0.0) {
  return std::abs(e.value - expected) <= 3.0 * e.std_error + extra + 1e-12 * (1.0 + std::abs(expected));
}

double fact(int n) { return n <= 1 ? 1.0 : n * fact(n - 1); }

// Midpoint rule on a 1d interval.
template <class F>
double midpoint(F&& f, double lo, double hi, int cells) {
  double h = (hi - lo) / cells, s = 0.0;
  for (int i = 0; i < cells; ++i) s += f(lo + (i + 0.5) * h);
  return s * h;
}

// Triangle on {big at 0, q1, q2} in d = 1 integrated over (q1, q2).
double single_big_triangle_1d(double r, double R, int cells) {
  double reach = R + r, a = 2.0 * r;
  return midpoint([&](double q1) {
    if (std::abs(q1) >= reach) return 0.0;
    return midpoint([&](double q2) {
      return (std::abs(q2) < reach && std::abs(q1 - q2) < a) ? -1.0 : 0.0;
    }, -reach, reach, cells);
  }, -reach, reach, cells);
}

// Multi-big coefficient with two bigs (one at 0, one at p) and one cloud
// carrying at most two white spheres, d = 1. Returns the coefficients of x and x^2.
std::pair<double, double> two_big_one_cloud_1d(double r, double R, int cells) {
  const double reach = R + r, a = 2.0 * r;
  auto touches = [&](double big, double q) { return std::abs(q - big) < reach; };
  double c1 = 0.0, c2 = 0.0;
  const double pmax = 2.0 * reach + a;
  const double hp = 2.0 * pmax / cells;
  for (int i = 0; i < cells; ++i) {
    double p = -pmax + (i + 0.5) * hp;
    if (std::abs(p) < 2.0 * R) continue;  // the big-big bond and the bare graph cancel here
    double lo = std::min(0.0, p) - reach, hi = std::max(0.0, p) + reach;
    // One white: it must touch both bigs.
    double t1 = midpoint([&](double q) { return touches(0.0, q) && touches(p, q) ? 1.0 : 0.0; }, lo, hi, cells);
    // Two whites joined by a small bond; every big touches some white and both whites are used.
    double t2 = midpoint([&](double q1) {
      return midpoint([&](double q2) {
        if (std::abs(q1 - q2) >= a) return 0.0;
        unsigned m0 = touches(0.0, q1) | (touches(0.0, q2) << 1);
        unsigned m1 = touches(p, q1) | (touches(p, q2) << 1);
        double assign = 0.0;
        for (unsigned S = 0; S < 4; ++S) {
          double prod = ((m0 & S) ? -1.0 : 0.0) * ((m1 & S) ? -1.0 : 0.0);
          assign += ((2 - std::popcount(S)) & 1) ? -prod : prod;
        }
        return -0.5 * assign;
      }, lo, hi, cells);
    }, lo, hi, cells);
    c1 += t1 * hp;
    c2 += t2 * hp;
  }
  return {c1, c2};
}

}  // namespace

TEST_CASE("irreducible coefficient closed forms in 1d") {
  CHECK(irreducible_coefficient_exact_1d(1, 0.3) == doctest::Approx(-0.6));
  CHECK(irreducible_coefficient_exact_1d(2, 1.0) == doctest::Approx(-1.5));
  CHECK(irreducible_coefficient_exact_1d(3, 1.0) == doctest::Approx(-4.0 / 3.0));
}

TEST_CASE("first irreducible coefficient is the single bond") {
  for (int d = 1; d <= 3; ++d) {
    auto e = irreducible_coefficient(1, d, 0.5, 20000, 3);
    CHECK(within(e, -ball_volume(d, 1.0)));
  }
}

TEST_CASE("irreducible coefficients match hard rods") {
  const double r = 0.25;
  for (int n = 2; n <= 3; ++n) {
    auto e = irreducible_coefficient(n, 1, r, 400000, 7);
    CHECK(within(e, irreducible_coefficient_exact_1d(n, 2.0 * r)));
    CHECK(e.truncation.count("n") == 1);
  }
}

TEST_CASE("irreducible coefficient arguments") {
  CHECK_THROWS_AS(irreducible_coefficient(5, 1, 0.25, 20000, 1), resource_limit);
  CHECK_THROWS_AS(irreducible_coefficient(0, 1, 0.25, 20000, 1), invalid_argument);
  CHECK_THROWS_AS(irreducible_coefficient(2, 4, 0.25, 20000, 1), invalid_argument);
}

TEST_CASE("worker count does not change estimates") {
  auto a = irreducible_coefficient(3, 2, 0.5, 40000, 5, {16, 1});
  auto b = irreducible_coefficient(3, 2, 0.5, 40000, 5, {16, 3});
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("standard error shrinks like the inverse square root") {
  auto a = irreducible_coefficient(2, 2, 0.5, 50000, 8);
  auto b = irreducible_coefficient(2, 2, 0.5, 200000, 8);
  CHECK(b.std_error / a.std_error == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("connected cluster integrals on the line") {
  for (int m = 1; m <= 4; ++m) {
    auto e = connected_cluster_integral(m, 1, 0.25, 200000, 2);
    CHECK(within(e, rods1d::connected_cluster_line(m, 0.5)));
  }
}

TEST_CASE("tree covers") {
  auto c1 = tree_covers(1);
  REQUIRE(c1.collections.size() == 1);
  CHECK(c1.collections[0].sets == std::vector<VertexMask>{0b11});
  CHECK(c1.collections[0].ursell == 1.0);
  auto c2 = tree_covers(2);
  bool whole = false, chain = false;
  for (const auto& c : c2.collections) {
    if (c.sets == std::vector<VertexMask>{0b111}) whole = c.ursell == 1.0;
    if (c.sets == std::vector<VertexMask>{0b011, 0b110}) chain = c.ursell == -1.0;
  }
  CHECK(whole);
  CHECK(chain);
  for (int k = 1; k <= 4; ++k) {
    for (const auto& c : tree_covers(k).collections) {
      std::set<VertexMask> distinct(c.sets.begin(), c.sets.end());
      CHECK(distinct.size() == c.sets.size());
      VertexMask u = 0;
      int excess = 0;
      for (VertexMask v : c.sets) {
        u |= v;
        excess += std::popcount(v) - 1;
      }
      CHECK(u == (VertexMask{1} << (k + 1)) - 1);
      CHECK(excess == k);
    }
  }
}

TEST_CASE("tree covers rebuild the irreducible coefficient on the line") {
  const double a = 0.5;
  for (int k = 1; k <= 4; ++k) {
    double s = 0.0;
    for (const auto& c : tree_covers(k).collections) {
      double p = c.ursell;
      for (VertexMask v : c.sets) p *= rods1d::connected_cluster_line(std::popcount(v), a);
      s += p;
    }
    CHECK(s / fact(k) == doctest::Approx(irreducible_coefficient_exact_1d(k, a)).epsilon(1e-12));
  }
}

TEST_CASE("adjustment coefficient") {
  SUBCASE("vanishes at zero density") {
    for (int k = 1; k <= 3; ++k) {
      CHECK(adjustment_coefficient(k, 0.0, 1, 0.25, 20000, 1).value == 0.0);
      CHECK(adjustment_coefficient(k, 0.0, 1, 0.25, 20000, 1, AdjustmentVariant::cover_coupled).value == 0.0);
    }
  }
  SUBCASE("first order in 1d") {
    const double a = 0.5, rho = 0.1, y = rho / (1.0 - rho);
    auto e = adjustment_coefficient(1, rho, 1, 0.25, 20000, 1);
    CHECK(within(e, -2.0 * a * (2.0 * y + y * y)));
  }
  SUBCASE("grows with density") {
    auto m = adjustment_model(2, 1, 0.25, 100000, 4);
    double prev = 0.0;
    for (double rho = 0.02; rho < 0.5; rho += 0.04) {
      double v = std::abs(m.evaluate(rho).value);
      CHECK(v >= prev);
      prev = v;
    }
  }
  SUBCASE("rejects densities outside [0, 1)") {
    CHECK_THROWS_AS(adjustment_coefficient(1, 1.0, 1, 0.25, 20000, 1), invalid_argument);
  }
}

TEST_CASE("single-big coefficient") {
  const double r = 0.25, R = 1.0;
  auto m = single_big_model(1, 1, r, R, 400000, 6);
  CHECK(m.irreducible.value == doctest::Approx(-ball_volume(1, 2.0 * r)));
  CHECK(m.irreducible.std_error == 0.0);
  CHECK(m.prefactor(0.0, BoundKind::upper) == 1.0);
  CHECK(m.prefactor(0.0, BoundKind::lower) == 1.0);
  double coarse = single_big_triangle_1d(r, R, 500), fine = single_big_triangle_1d(r, R, 1000);
  CHECK(within(m.graph_term, fine, 2.0 * std::abs(fine - coarse)));
  CHECK(within(m.by_big_degree[2], fine, 2.0 * std::abs(fine - coarse)));
  CHECK(m.by_big_degree[1].value == 0.0);
}

TEST_CASE("cloud factor") {
  const double r = 0.25, R = 1.0;
  SUBCASE("one white with two bigs is the lens volume") {
    std::vector<Point> bigs{Point{}, Point{2.2, 0.0, 0.0}};
    auto res = cloud_factor_terms(bigs, 0.01, 0.01, 1, r, R, 1, 0, 200000, 3);
    REQUIRE(res.terms.size() == 1);
    CHECK(within(res.terms[0], 2.0 * (R + r) - 2.2));
  }
  SUBCASE("widely separated bigs give zero") {
    const int l_max = 2, k_max = 1;
    double gap = 2.0 * (R + r) + 2.0 * r * (l_max + k_max) + 0.1;
    for (int d = 1; d <= 2; ++d) {
      auto res = cloud_factor_terms({Point{}, Point{gap, 0.0, 0.0}}, 0.01, 0.01, d, r, R, l_max, k_max, 50000, 3);
      CHECK(res.total.value == 0.0);
      for (const auto& t : res.terms) CHECK(t.value == 0.0);
    }
  }
  SUBCASE("truncation limits") {
    CHECK_THROWS_AS(CloudFactorModel(1, r, R, 4, 2), resource_limit);
    CHECK_THROWS_AS(CloudFactorModel(1, r, R, 0, 1), invalid_argument);
  }
}

TEST_CASE("multi-big coefficient") {
  const double r = 0.25, R = 1.0;
  SUBCASE("single big bond") {
    auto m = multi_big_model(1, 1, r, R, 0, {}, 100000, 2);
    CHECK(within(m.evaluate(0.0), -ball_volume(1, 2.0 * R)));
    auto m2 = multi_big_model(1, 2, r, R, 0, {}, 100000, 2);
    CHECK(within(m2.evaluate(0.0), -ball_volume(2, 2.0 * R)));
  }
  SUBCASE("no small spheres leaves the big irreducible coefficient") {
    auto m = multi_big_model(2, 1, r, R, 1, {}, 100000, 2);
    CHECK(within(m.evaluate(0.0), irreducible_coefficient_exact_1d(2, 2.0 * R)));
  }
  SUBCASE("one cloud against nested quadrature") {
    CloudCutoffs cut{2, 0, 64};
    auto m = multi_big_model(1, 1, r, R, 1, cut, 100000, 9);
    auto coarse = two_big_one_cloud_1d(r, R, 150), fine = two_big_one_cloud_1d(r, R, 300);
    auto c1 = m.coefficients.component(1, m.scale), c2 = m.coefficients.component(2, m.scale);
    CHECK(within(c1, fine.first, 2.0 * std::abs(fine.first - coarse.first)));
    CHECK(within(c2, fine.second, 2.0 * std::abs(fine.second - coarse.second)));
    CHECK(fine.first == doctest::Approx(0.25).epsilon(0.02));
  }
}
