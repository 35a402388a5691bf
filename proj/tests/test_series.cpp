#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hsmix/error.hpp"
#include "hsmix/io.hpp"
#include "hsmix/series.hpp"

using namespace hsmix;

namespace {

SeriesTruncation quick_truncation() {
  SeriesTruncation tr;
  tr.samples = 50000;
  return tr;
}

}  // namespace

TEST_CASE("falling factorial weight") {
  CHECK(falling_factorial_weight(10.0, 3, 2) == doctest::Approx(0.02));
  CHECK(falling_factorial_weight(10.0, 3, 3) == 0.0);
  CHECK(falling_factorial_weight(10.0, 3, 5) == 0.0);
  const double rho = 0.3;
  double prev = INFINITY;
  for (double V : {1e2, 1e3, 1e4}) {
    double w = falling_factorial_weight(V, std::llround(rho * V), 3);
    double rel = std::abs(w / std::pow(rho, 3) - 1.0);
    CHECK(rel < prev);
    prev = rel;
  }
  CHECK(prev < 3e-3);
}

TEST_CASE("small-sphere series") {
  const double r = 0.25, a = 0.5;
  std::vector<CoefficientEstimate> beta{CoefficientEstimate::exact(0.0)};
  for (int n = 1; n <= 3; ++n) beta.push_back(irreducible_coefficient(n, 1, r, 400000, 12));
  CHECK(small_sphere_series(0.0, 3, beta).value == 0.0);
  const double rho = 0.4;
  CHECK(small_sphere_series(rho, 1, beta).value == doctest::Approx(-2.0 * a * rho * rho / 2.0));
  // Hard rods: excess free energy rho log(1 - a rho), expanded to third order in a rho.
  double y = a * rho, tonks = -rho * (y + y * y / 2.0 + y * y * y / 3.0);
  auto f = small_sphere_series(rho, 3, beta);
  CHECK(std::abs(f.value - tonks) <= 3.0 * f.std_error);
  CHECK(f.truncation.at("small_order") == 3);
  CHECK_THROWS_AS(small_sphere_series(rho, 4, beta), invalid_argument);
}

TEST_CASE("small-sphere series honours the domain guard") {
  std::vector<CoefficientEstimate> beta{CoefficientEstimate::exact(0.0), CoefficientEstimate::exact(-1.0)};
  ModelParams p;
  p.finite_volume = false;
  p.rho_r = 5.0;
  DomainGuard guard{p, {0.1, 0.05, 0.5}, ExcludedReading::big_pair, false};
  CHECK_THROWS_AS(small_sphere_series(5.0, 1, beta, &guard), not_in_domain);
  guard.override_domain = true;
  CHECK_NOTHROW(small_sphere_series(5.0, 1, beta, &guard));
}

TEST_CASE("convergence check") {
  ModelParams p;
  p.d = 1;
  p.finite_volume = false;
  ConvergenceParams cp{0.2, 0.05, 0.5};
  auto empty = convergence_check(p, cp);
  CHECK(empty.holds());
  CHECK(empty.c1_margin == doctest::Approx(cp.a));
  CHECK(empty.c2_margin == doctest::Approx(cp.b));
  CHECK(empty.cond1_margin == doctest::Approx(cp.c));
  const double edge = cp.a * std::exp(-cp.a) / ball_volume(1, 2.0 * p.R);
  p.rho_R = edge * (1.0 + 1e-6);
  CHECK_FALSE(convergence_check(p, cp).c1);
  p.rho_R = edge * (1.0 - 1e-6);
  CHECK(convergence_check(p, cp).c1);
}

TEST_CASE("convergence margins are monotone and continuous") {
  ModelParams p;
  p.d = 1;
  p.L = 1000.0;
  ConvergenceParams cp{0.2, 0.05, 0.5};
  for (long long NR = 0; NR <= 8; ++NR) {
    double prev1 = INFINITY, prev3 = INFINITY;
    for (long long Nr = 0; Nr <= 8; ++Nr) {
      p.N_r = Nr;
      p.N_R = NR;
      auto c = convergence_check(p, cp);
      CHECK(c.c1_margin <= prev1);
      CHECK(c.cond1_margin < prev3);
      if (Nr > 0) CHECK(prev1 - c.c1_margin < 0.05);
      prev1 = c.c1_margin;
      prev3 = c.cond1_margin;
    }
  }
  p.N_r = 2;
  double prev = INFINITY;
  for (long long NR = 0; NR <= 8; ++NR) {
    p.N_R = NR;
    auto c = convergence_check(p, cp);
    CHECK(c.c2_margin < prev);
    prev = c.c2_margin;
  }
}

TEST_CASE("limit bounds at zero big density") {
  auto tables = build_limit_tables(1, 0.25, 1.0, quick_truncation(), 3);
  auto lo = limit_report(tables, 0.01, 0.0, BoundKind::lower);
  auto up = limit_report(tables, 0.01, 0.0, BoundKind::upper);
  CHECK(lo.value == up.value);
  CHECK(lo.A_term.value == 0.0);
  CHECK(lo.F1.value == 0.0);
  CHECK(lo.F2.value == 0.0);
  CHECK(lo.free_volume.value == 0.0);
  CHECK(lo.value == doctest::Approx(lo.ideal - lo.F0.value).epsilon(1e-14));
}

TEST_CASE("limit bounds at zero small density") {
  auto tables = build_limit_tables(1, 0.25, 1.0, quick_truncation(), 3);
  const double rho_R = 0.02;
  auto lo = limit_report(tables, 0.0, rho_R, BoundKind::lower);
  auto up = limit_report(tables, 0.0, rho_R, BoundKind::upper);
  CHECK(lo.value == up.value);
  CHECK(lo.F0.value == 0.0);
  CHECK(lo.F1.value == 0.0);
  double f2 = rho_R * rho_R / 2.0 * tables.multi[0].evaluate(0.0).value;
  CHECK(lo.F2.value == doctest::Approx(f2));
  CHECK(lo.value == doctest::Approx(lo.ideal - f2));
}

TEST_CASE("limit bounds are ordered over a density grid") {
  auto tables = build_limit_tables(1, 0.25, 1.0, quick_truncation(), 5);
  for (int i = 1; i <= 5; ++i)
    for (int j = 1; j <= 5; ++j) {
      double rho_r = 0.0012 * i, rho_R = 0.004 * j;
      auto lo = limit_report(tables, rho_r, rho_R, BoundKind::lower);
      auto up = limit_report(tables, rho_r, rho_R, BoundKind::upper);
      CHECK(up.value - lo.value >= -3.0 * std::hypot(lo.std_error, up.std_error));
    }
}

TEST_CASE("free energy bounds") {
  ModelParams p;
  p.d = 1;
  p.L = 400.0;
  p.N_r = 2;
  p.N_R = 1;
  ConvergenceParams cp{0.15, 0.05, 0.5};
  auto [lo, up] = free_energy_bounds(p, cp, quick_truncation(), 1);
  CHECK(lo.value <= up.value + lo.tolerance + up.tolerance);
  p.N_R = 0;
  auto [lo0, up0] = free_energy_bounds(p, cp, quick_truncation(), 1);
  CHECK(lo0.value == doctest::Approx(up0.value).epsilon(1e-14));
  p.N_r = 300;
  CHECK_THROWS_AS(free_energy_bounds(p, cp, quick_truncation(), 1), not_in_domain);
}

TEST_CASE("truncation validation") {
  auto tr = quick_truncation();
  tr.small_order = 5;
  CHECK_THROWS_AS(tr.validate(), resource_limit);
  tr = quick_truncation();
  tr.samples = 10;
  CHECK_THROWS_AS(tr.validate(), invalid_argument);
  CHECK(quick_truncation().record().at("samples") == 50000);
}

TEST_CASE("admissible density curve") {
  const double b = 0.1, c = 0.1, alpha = 2.0 * std::exp(b + c);
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(2.0 * std::pow(10.0, i / 20.0));
  auto curve = admissible_density_curve(3, 1.0, grid, 1e-4, alpha, b, c);
  REQUIRE(curve.size() == grid.size());
  std::size_t peak = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(curve[i].bound >= 0.0);
    if (curve[i].bound > curve[peak].bound) peak = i;
  }
  for (std::size_t i = peak + 1; i < curve.size(); ++i) CHECK(curve[i].log_bound < curve[i - 1].log_bound);
  CHECK(curve[peak].bound > 0.0);
  CHECK_THROWS_AS(admissible_density_curve(3, 1.0, grid, 1e-4, std::exp(b + c), b, c), invalid_argument);
  CHECK_THROWS_AS(admissible_density_curve(3, 1.0, {0.5}, 1e-4, alpha, b, c), invalid_argument);
}

TEST_CASE("admissible density curve without small spheres") {
  const double b = 0.1, c = 0.1;
  auto curve = admissible_density_curve(3, 1.0, {5.0, 10.0}, 0.0, 3.0, b, c);
  for (const auto& p : curve) {
    CHECK(p.a == 0.0);
    CHECK(p.bound == doctest::Approx(b * ball_volume(3, 2.0 * p.R) / shell_volume(3, p.R, 1.0)));
  }
}

TEST_CASE("least squares") {
  auto fit = least_squares({1.0, 2.0, 3.0, 4.0}, {1.0, 3.0, 5.0, 7.0});
  CHECK(fit.slope == doctest::Approx(2.0));
  CHECK(fit.intercept == doctest::Approx(-1.0));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK_THROWS_AS(least_squares({1.0}, {1.0}), invalid_argument);
}

TEST_CASE("csv and json output") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
  CHECK(std::stod(csv_number(0.1)) == 0.1);
  CsvTable t({"x", "note"});
  t.add({"1", "a,b"});
  std::ostringstream out;
  t.write(out, "seed=1");
  CHECK(out.str() == "# seed=1\r\nx,note\r\n1,\"a,b\"\r\n");
  CHECK(t.to_json()[0]["note"] == "a,b");
  auto j = to_json(CoefficientEstimate::exact(1.5, {{"n", 2}}));
  CHECK(j["value"] == 1.5);
  CHECK(j["truncation"]["n"] == 2);
}
