#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hsmix/error.hpp"
#include "hsmix/graphs.hpp"
#include "hsmix/integrals.hpp"
#include "hsmix/io.hpp"
#include "hsmix/oracle.hpp"
#include "hsmix/polymers.hpp"
#include "hsmix/series.hpp"

using namespace hsmix;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string out_dir = "hsmix_out";
  std::uint64_t seed = 1;
  int workers = 0;
  int shards = 16;
  int d = 1;
  double r = 0.25;
  double R = 1.0;
  std::int64_t samples = 200000;
  std::string excluded = "big";  // convergence condition reading: big or small pair
  double a = 0.15, b = 0.05, c = 0.5;

  McOptions mc() const { return {shards, workers}; }
  ExcludedReading reading() const {
    return excluded == "small" ? ExcludedReading::small_pair : ExcludedReading::big_pair;
  }
  ConvergenceParams cp() const { return {a, b, c}; }
};

std::string g_config;  // resolved configuration, echoed into every artifact

void write_outputs(const Common& o, const std::string& name, const CsvTable& table, Json extra = Json::object()) {
  fs::create_directories(o.out_dir);
  std::ofstream csv(fs::path(o.out_dir) / (name + ".csv"), std::ios::binary);
  table.write(csv, "hsmix " + std::string(kVersion) + "\n" + g_config);
  Json j;
  j["version"] = kVersion;
  j["config"] = g_config;
  for (auto& [k, v] : extra.items()) j[k] = v;
  j["rows"] = table.to_json();
  std::ofstream js(fs::path(o.out_dir) / (name + ".json"));
  js << j.dump(2) << "\n";
}

std::string num(double v) { return csv_number(v); }

int run_graphs(const Common& o, int n, int max_vertices) {
  GraphLimits lim;
  lim.max_vertices = max_vertices;
  auto conn = enum_connected(n, lim);
  std::size_t two = n >= 2 ? enum_two_connected(n, lim).size() : 0;
  std::int64_t brute_c = brute_count_connected(n), brute_t = n >= 2 ? brute_count_two_connected(n) : 0;
  std::cout << "n=" << n << " connected=" << conn.size() << " two_connected=" << two << "\n";
  bool ok = static_cast<std::int64_t>(conn.size()) == brute_c && static_cast<std::int64_t>(two) == brute_t;
  std::cout << "brute_force_check=" << (ok ? "pass" : "fail") << "\n";
  CsvTable t({"n", "class", "count", "brute_force"});
  t.add({std::to_string(n), "connected", std::to_string(conn.size()), std::to_string(brute_c)});
  t.add({std::to_string(n), "two_connected", std::to_string(two), std::to_string(brute_t)});
  write_outputs(o, "graphs", t);
  fs::create_directories(o.out_dir);
  std::ofstream listing(fs::path(o.out_dir) / ("connected_" + std::to_string(n) + ".txt"));
  for (const auto& g : conn) listing << g.to_text() << "\n";
  return ok ? 0 : 2;
}

int run_beta(const Common& o, int n_max) {
  if (n_max < 1) throw invalid_argument("n-max must be >= 1");
  if (n_max > 4) throw resource_limit("n-max above 4 exceeds the two-connected graph cap");
  CsvTable t({"n", "value", "std_error", "samples", "exact_1d", "z_score"});
  bool tonks = true;
  for (int n = 1; n <= n_max; ++n) {
    auto e = irreducible_coefficient(n, o.d, o.r, o.samples, o.seed, o.mc());
    std::string exact = "", z = "";
    if (o.d == 1) {
      double x = irreducible_coefficient_exact_1d(n, 2.0 * o.r);
      double zs = e.std_error > 0 ? (e.value - x) / e.std_error : (e.value == x ? 0.0 : INFINITY);
      tonks = tonks && std::abs(zs) <= 3.0;
      exact = num(x);
      z = num(zs);
    }
    std::cout << "beta_" << n << " = " << e.value << " +- " << e.std_error << (exact.empty() ? "" : " exact " + exact) << "\n";
    t.add({std::to_string(n), num(e.value), num(e.std_error), std::to_string(e.samples), exact, z});
  }
  if (o.d == 1) std::cout << "tonks_check=" << (tonks ? "pass" : "fail") << "\n";
  write_outputs(o, "beta", t);
  return 0;
}

int run_coeffs(const Common& o, double rho_r, double rho_R, int k_max, int s_max, const CloudCutoffs& cut,
               int multi_clouds, bool coupled) {
  CsvTable t({"coefficient", "order", "bound", "value", "std_error", "samples"});
  auto variant = coupled ? AdjustmentVariant::cover_coupled : AdjustmentVariant::as_printed;
  double excl = rho_R * ball_volume(o.d, o.R + o.r);
  for (int k = 1; k <= k_max; ++k) {
    auto e = adjustment_coefficient(k, excl, o.d, o.r, o.samples, o.seed, variant, o.mc());
    t.add({"adjustment", std::to_string(k), "upper", num(e.value), num(e.std_error), std::to_string(e.samples)});
    std::cout << "A_inf(" << k << ") = " << e.value << " +- " << e.std_error << "\n";
  }
  for (int s = 1; s <= s_max; ++s) {
    auto m = single_big_model(s, o.d, o.r, o.R, o.samples, o.seed, o.mc());
    for (auto kind : {BoundKind::upper, BoundKind::lower}) {
      auto e = m.evaluate(rho_R, kind);
      t.add({"single_big", std::to_string(s), bound_name(kind), num(e.value), num(e.std_error), std::to_string(e.samples)});
    }
    std::cout << "B1_inf(" << s << ") = " << m.evaluate(rho_R).value << "\n";
  }
  auto cf = cloud_factor_terms({Point{}}, rho_r, rho_R, o.d, o.r, o.R, cut.l_max, cut.k_max, o.samples, o.seed, o.mc());
  for (std::size_t i = 0; i < cf.terms.size(); ++i)
    t.add({"cloud_term_l" + std::to_string(cf.l[i]) + "_k" + std::to_string(cf.k[i]), std::to_string(cf.l[i] + cf.k[i]),
           "", num(cf.terms[i].value), num(cf.terms[i].std_error), std::to_string(cf.terms[i].samples)});
  t.add({"cloud_single_big", "", "", num(cf.total.value), num(cf.total.std_error), std::to_string(cf.total.samples)});
  for (int n = 1; n <= 2; ++n) {
    auto e = multi_big_coefficient(n, rho_r, rho_R, o.d, o.r, o.R, multi_clouds, cut, std::max<std::int64_t>(o.samples / 4, 2),
                                   o.seed, o.mc());
    t.add({"multi_big", std::to_string(n), "", num(e.value), num(e.std_error), std::to_string(e.samples)});
    std::cout << "B_star(" << n << ") = " << e.value << " +- " << e.std_error << "\n";
  }
  write_outputs(o, "coeffs", t);
  return 0;
}

int run_free_energy(const Common& o, const SeriesTruncation& tr, bool finite, double L, int N_r, int N_R,
                    double rho_r_max, double rho_R_max, int grid) {
  CsvTable t({"rho_r", "rho_R", "lower", "upper", "lower_std_error", "upper_std_error", "tolerance", "c1_margin",
              "c2_margin", "cond1_margin", "status"});
  ModelParams p;
  p.d = o.d;
  p.r = o.r;
  p.R = o.R;
  if (finite) {
    p.finite_volume = true;
    p.L = L;
    p.N_r = N_r;
    p.N_R = N_R;
    auto conv = convergence_check(p, o.cp(), o.reading());
    std::string status = "ok";
    std::string lo_s, up_s, tol_s;
    try {
      auto [lo, up] = free_energy_bounds(p, o.cp(), tr, o.seed);
      lo_s = num(lo.value);
      up_s = num(up.value);
      tol_s = num(std::max(lo.tolerance, up.tolerance));
      std::cout << "lower=" << lo.value << " upper=" << up.value << "\n";
    } catch (const not_in_domain& e) {
      status = "skipped: not-in-domain";
      std::cout << "skipped: " << e.what() << "\n";
    }
    t.add({num(p.small_density()), num(p.big_density()), lo_s, up_s, "0", "0", tol_s, num(conv.c1_margin),
           num(conv.c2_margin), num(conv.cond1_margin), status});
    write_outputs(o, "free_energy", t);
    return 0;
  }
  if (grid < 1 || grid > 100) throw invalid_argument("grid must lie in [1, 100]");
  auto tables = build_limit_tables(o.d, o.r, o.R, tr, o.seed);
  int ordered = 0, points = 0, skipped = 0;
  for (int i = 1; i <= grid; ++i)
    for (int j = 1; j <= grid; ++j) {
      p.finite_volume = false;
      p.rho_r = rho_r_max * i / grid;
      p.rho_R = rho_R_max * j / grid;
      auto conv = convergence_check(p, o.cp(), o.reading());
      if (!conv.holds() && !tr.override_domain) {
        ++skipped;
        t.add({num(p.rho_r), num(p.rho_R), "", "", "", "", "", num(conv.c1_margin), num(conv.c2_margin),
               num(conv.cond1_margin), "skipped: not-in-domain"});
        continue;
      }
      auto lo = limit_report(tables, p.rho_r, p.rho_R, BoundKind::lower);
      auto up = limit_report(tables, p.rho_r, p.rho_R, BoundKind::upper);
      ++points;
      bool ok = up.value - lo.value >= -3.0 * std::hypot(up.std_error, lo.std_error);
      ordered += ok;
      t.add({num(p.rho_r), num(p.rho_R), num(lo.value), num(up.value), num(lo.std_error), num(up.std_error), "0",
             num(conv.c1_margin), num(conv.c2_margin), num(conv.cond1_margin), ok ? "ok" : "order-violation"});
    }
  std::cout << "grid points=" << points << " ordered=" << ordered << " skipped=" << skipped << "\n";
  write_outputs(o, "free_energy", t);
  return 0;
}

int run_domain(const Common& o, double L, int N_r, int N_R, double R_min, double R_max, int R_count, double rho_r,
               double alpha) {
  Json margins = nullptr;
  if (o.R > o.r) {
    ModelParams p;
    p.d = o.d;
    p.r = o.r;
    p.R = o.R;
    p.L = L;
    p.N_r = N_r;
    p.N_R = N_R;
    auto conv = convergence_check(p, o.cp(), o.reading());
    std::cout << "c1_margin=" << conv.c1_margin << " c2_margin=" << conv.c2_margin << " cond1_margin=" << conv.cond1_margin
              << " holds=" << (conv.holds() ? "yes" : "no") << "\n";
    margins = to_json(conv);
  }
  if (R_count < 2 || !(R_max > R_min)) throw invalid_argument("radius grid needs R-count >= 2 and R-max > R-min");
  std::vector<double> grid;
  for (int i = 0; i < R_count; ++i) grid.push_back(R_min * std::pow(R_max / R_min, static_cast<double>(i) / (R_count - 1)));
  auto curve = admissible_density_curve(o.d, o.r, grid, rho_r, alpha, o.b, o.c);
  CsvTable t({"R", "shell_density", "effective_density", "a", "log_small_branch", "log_big_branch", "log_bound", "bound"});
  for (const auto& q : curve)
    t.add({num(q.R), num(q.shell_density), num(q.effective_density), num(q.a), num(q.log_small_branch),
           num(q.log_big_branch), num(q.log_bound), num(q.bound)});
  write_outputs(o, "domain", t, Json{{"margins", margins}});
  return 0;
}

int run_verify(const Common& o, const std::string& suite, std::int64_t trials) {
  bool all = suite == "all";
  bool failed = false;
  CsvTable t({"suite", "case", "result", "detail"});
  if (all || suite == "sandwich") {
    bool ok = true;
    for (int NR = 0; NR <= 2; ++NR) {
      TinyInstance inst;
      inst.d = o.d;
      inst.r = o.r;
      inst.R = o.R;
      inst.L = 400.0;
      inst.N_r = 2;
      inst.N_R = NR;
      auto rep = sandwich_test(inst, o.cp(), 3, o.reading());
      ok = ok && !rep.skipped && rep.holds;
      t.add({"sandwich", "N_R=" + std::to_string(NR), rep.skipped ? "skipped" : (rep.holds ? "pass" : "fail"),
             to_json(rep).dump()});
      std::cout << "sandwich N_R=" << NR << " lower=" << rep.lower << " exact=" << rep.exact << " upper=" << rep.upper
                << (rep.skipped ? " (skipped)" : "") << "\n";
    }
    std::cout << (ok ? "sandwich: all orderings hold" : "sandwich: ordering FAILED") << "\n";
    failed = failed || !ok;
  }
  if (all || suite == "tree-graph") {
    for (int n = 2; n <= 5; ++n) {
      auto rep = tree_graph_check(n, trials, o.seed);
      bool ok = rep.violations == 0 && rep.exhaustive_violations == 0;
      failed = failed || !ok;
      t.add({"tree-graph", "n=" + std::to_string(n), ok ? "pass" : "fail", to_json(rep).dump()});
      std::cout << "tree-graph n=" << n << " violations=" << rep.violations << " max_ratio=" << rep.max_ratio << "\n";
    }
  }
  if (all || suite == "tonks") {
    bool ok = true;
    for (int n = 1; n <= 3; ++n) {
      auto e = irreducible_coefficient(n, 1, o.r, o.samples, o.seed, o.mc());
      double x = irreducible_coefficient_exact_1d(n, 2.0 * o.r);
      bool pass = std::abs(e.value - x) <= 3.0 * e.std_error + 1e-12;
      ok = ok && pass;
      t.add({"tonks", "n=" + std::to_string(n), pass ? "pass" : "fail", num(e.value) + " vs " + num(x)});
    }
    std::cout << "tonks_check=" << (ok ? "pass" : "fail") << "\n";
    failed = failed || !ok;
  }
  if (all || suite == "kp") {
    TinyInstance inst;
    inst.r = o.r;
    inst.R = o.R;
    inst.L = 40.0 * 2.0 * o.r;
    inst.N_r = 3;
    auto z = brute_Z_empty(inst);
    auto table = activity_table(3, {}, inst.metric(), inst.species());
    auto ce = cluster_log_Z(table, linear_kp_weights(table), 3);
    double diff = std::abs(ce.value - std::log(z.interaction));
    bool ok = diff <= ce.tail_bound;
    failed = failed || !ok;
    t.add({"kp", "N_r=3", ok ? "pass" : "fail", num(diff) + " <= " + num(ce.tail_bound)});
    std::cout << "kp: |cluster - brute| = " << diff << " tail bound " << ce.tail_bound << "\n";
  }
  write_outputs(o, "verify_" + suite, t);
  return failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cluster-expansion toolkit for binary hard-sphere mixtures"};
  app.set_config("--config", "", "Configuration file (TOML or INI); flags override its values");
  app.require_subcommand(1);
  app.fallthrough();
  Common o;
  app.add_option("--out-dir", o.out_dir, "Directory for CSV/JSON artifacts")->capture_default_str();
  app.add_option("--seed", o.seed, "Random seed")->capture_default_str();
  app.add_option("--workers", o.workers, "Worker threads (0 = all cores)")->capture_default_str()->check(CLI::NonNegativeNumber);
  app.add_option("--shards", o.shards, "Monte Carlo shards (fixes the random streams)")->capture_default_str()->check(CLI::PositiveNumber);

  auto model_opts = [&](CLI::App* s) {
    s->add_option("--d", o.d, "Dimension")->capture_default_str()->check(CLI::Range(1, 3));
    s->add_option("--r", o.r, "Small radius")->capture_default_str()->check(CLI::PositiveNumber);
    s->add_option("--R", o.R, "Big radius")->capture_default_str()->check(CLI::PositiveNumber);
    s->add_option("--samples", o.samples, "Monte Carlo samples")->capture_default_str()->check(CLI::Range(std::int64_t{10000}, std::int64_t{1} << 40));
    s->add_option("--excluded", o.excluded, "Excluded volume in the small-sphere condition: big or small")
        ->capture_default_str()->check(CLI::IsMember({"big", "small"}));
    s->add_option("--a", o.a, "Convergence constant a")->capture_default_str()->check(CLI::NonNegativeNumber);
    s->add_option("--b", o.b, "Convergence constant b")->capture_default_str()->check(CLI::NonNegativeNumber);
    s->add_option("--c", o.c, "Convergence constant c")->capture_default_str()->check(CLI::NonNegativeNumber);
  };

  int n = 4, max_vertices = 7;
  auto* graphs = app.add_subcommand("graphs", "Graph-family counts and listings");
  graphs->add_option("--n", n, "Vertex count")->capture_default_str()->check(CLI::Range(1, 11));
  graphs->add_option("--max-vertices", max_vertices, "Enumeration cap")->capture_default_str();

  int n_max = 3;
  auto* beta = app.add_subcommand("beta", "Irreducible coefficient table");
  model_opts(beta);
  beta->add_option("--n-max", n_max, "Largest order")->capture_default_str();

  double rho_r = 0.005, rho_R = 0.01;
  int k_max = 2, s_max = 2, multi_clouds = 1;
  bool coupled = false;
  CloudCutoffs cut;
  auto* coeffs = app.add_subcommand("coeffs", "Limit coefficients: adjustment, single-big, cloud and multi-big");
  model_opts(coeffs);
  coeffs->add_option("--rho-r", rho_r, "Small density")->capture_default_str()->check(CLI::NonNegativeNumber);
  coeffs->add_option("--rho-R", rho_R, "Big density")->capture_default_str()->check(CLI::NonNegativeNumber);
  coeffs->add_option("--k-max", k_max, "Adjustment order")->capture_default_str();
  coeffs->add_option("--s-max", s_max, "Single-big order")->capture_default_str();
  coeffs->add_option("--cloud-l-max", cut.l_max, "Cloud white cutoff")->capture_default_str();
  coeffs->add_option("--cloud-k-max", cut.k_max, "Cloud black cutoff")->capture_default_str();
  coeffs->add_option("--cloud-inner", cut.inner_samples, "Inner samples per cloud factor")->capture_default_str();
  coeffs->add_option("--multi-clouds", multi_clouds, "Clouds per multi-big graph")->capture_default_str();
  coeffs->add_flag("--coupled-adjustment", coupled, "Couple the adjustment graph integral to the cover");

  SeriesTruncation tr;
  bool finite = false;
  double L = 400.0, rho_r_max = 0.006, rho_R_max = 0.02;
  int N_r = 2, N_R = 1, grid = 10;
  auto* fe = app.add_subcommand("free-energy", "Upper and lower free-energy bounds");
  model_opts(fe);
  fe->add_flag("--finite", finite, "Finite-volume mode (d = 1)");
  fe->add_option("--L", L, "Box length")->capture_default_str();
  fe->add_option("--N-r", N_r, "Small-sphere count")->capture_default_str();
  fe->add_option("--N-R", N_R, "Big-sphere count")->capture_default_str();
  fe->add_option("--rho-r-max", rho_r_max, "Grid maximum of the small density")->capture_default_str();
  fe->add_option("--rho-R-max", rho_R_max, "Grid maximum of the big density")->capture_default_str();
  fe->add_option("--grid", grid, "Grid points per axis")->capture_default_str();
  fe->add_option("--small-order", tr.small_order, "Small-sphere series order")->capture_default_str();
  fe->add_option("--adjustment-order", tr.adjustment_order, "Adjustment series order")->capture_default_str();
  fe->add_option("--single-order", tr.single_order, "Single-big series order")->capture_default_str();
  fe->add_option("--multi-order", tr.multi_order, "Multi-big series order")->capture_default_str();
  fe->add_option("--cluster-order", tr.cluster_order, "Finite-volume cluster expansion order")->capture_default_str();
  fe->add_flag("--override-domain", tr.override_domain, "Evaluate outside the checked convergence domain");
  fe->add_flag("--coupled-adjustment", coupled, "Couple the adjustment graph integral to the cover");

  double R_min = 2.0, R_max = 200.0, alpha = 0.0, curve_rho = 1e-4;
  int R_count = 41;
  auto* domain = app.add_subcommand("domain", "Convergence margins and the admissible-density curve");
  model_opts(domain);
  domain->add_option("--L", L, "Box length")->capture_default_str();
  domain->add_option("--N-r", N_r, "Small-sphere count")->capture_default_str();
  domain->add_option("--N-R", N_R, "Big-sphere count")->capture_default_str();
  domain->add_option("--R-min", R_min, "Smallest big radius of the curve")->capture_default_str();
  domain->add_option("--R-max", R_max, "Largest big radius of the curve")->capture_default_str();
  domain->add_option("--R-count", R_count, "Radius grid size")->capture_default_str();
  domain->add_option("--curve-rho-r", curve_rho, "Small density along the curve")->capture_default_str();
  domain->add_option("--alpha", alpha, "Curve constant (default 2 e^{b+c})");

  std::string suite = "all";
  std::int64_t trials = 10000;
  auto* verify = app.add_subcommand("verify", "Oracle suites");
  model_opts(verify);
  verify->add_option("--suite", suite, "sandwich, tree-graph, tonks, kp or all")
      ->capture_default_str()->check(CLI::IsMember({"sandwich", "tree-graph", "tonks", "kp", "all"}));
  verify->add_option("--trials", trials, "Tree-graph trials per n")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error kind=usage message=\"" << e.what() << "\"\n";
    return static_cast<int>(ExitCode::usage);
  }
  g_config = app.config_to_str(true, false);

  try {
    tr.samples = o.samples;
    tr.mc = o.mc();
    tr.reading = o.reading();
    tr.variant = coupled ? AdjustmentVariant::cover_coupled : AdjustmentVariant::as_printed;
    if (*graphs) return run_graphs(o, n, max_vertices);
    if (*beta) return run_beta(o, n_max);
    if (*coeffs) return run_coeffs(o, rho_r, rho_R, k_max, s_max, cut, multi_clouds, coupled);
    if (*fe) return run_free_energy(o, tr, finite, L, N_r, N_R, rho_r_max, rho_R_max, grid);
    if (*domain) return run_domain(o, L, N_r, N_R, R_min, R_max, R_count, curve_rho,
                                   alpha > 0.0 ? alpha : 2.0 * std::exp(o.b + o.c));
    if (*verify) return run_verify(o, suite, trials);
  } catch (const not_in_domain& e) {
    std::cout << "skipped: not-in-domain: " << e.what() << "\n";
    return static_cast<int>(ExitCode::ok);
  } catch (const precision_failure& e) {
    std::cerr << "error kind=precision message=\"" << e.what() << "\"\n";
    return static_cast<int>(ExitCode::precision);
  } catch (const resource_limit& e) {
    std::cerr << "error kind=resource message=\"" << e.what() << "\"\n";
    return static_cast<int>(ExitCode::resource);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error kind=usage message=\"" << e.what() << "\"\n";
    return static_cast<int>(ExitCode::usage);
  }
  return static_cast<int>(ExitCode::usage);
}
