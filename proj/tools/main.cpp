// hitchin-lab command line.
//
//   hitchin-lab <subcommand> [options]
//
// Exit status: 0 success, 1 a check failed, 2 usage error.
#include "hitchin/acceptance.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <utility>

namespace {

using namespace hitchin;
using nlohmann::json;

struct RunConfig {
  double t_min = 8.0;
  double t_max = 64.0;
  int t_count = 8;
  int nodes_per_octave = 12;
  int n_theta = 64;
  double rho_inner = 0.01;
  double tol = 1e-8;
  std::string format = "csv";
  std::string out_path;
  std::string cache_dir;
  int seed = 20240611;
  std::vector<int> known_red;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json number(double x) { return std::isnan(x) ? json(nullptr) : json(x); }

json to_json(const CriterionResult& r) {
  json values = json::object();
  for (const auto& [k, v] : r.values) values[k] = number(v);
  return {{"criterion", r.id}, {"name", r.name}, {"pass", r.pass}, {"failures", r.failures},
          {"values", values}};
}

std::string results_csv(const std::vector<CriterionResult>& rs) {
  std::ostringstream os;
  os << "criterion,name,key,value\n";
  for (const auto& r : rs) {
    os << r.id << ',' << r.name << ",pass," << (r.pass ? 1 : 0) << '\n';
    for (const auto& [k, v] : r.values) os << r.id << ',' << r.name << ',' << k << ',' << format_double(v) << '\n';
  }
  return os.str();
}

void emit(const RunConfig& cfg, const std::string& csv, const std::string& js) {
  const std::string& text = cfg.format == "json" ? js : csv;
  if (cfg.out_path.empty()) {
    std::cout << text;
  } else {
    write_text(cfg.out_path, text);
  }
}

int report(const RunConfig& cfg, const std::vector<CriterionResult>& rs) {
  json arr = json::array();
  for (const auto& r : rs) arr.push_back(to_json(r));
  if (!cfg.out_path.empty()) emit(cfg, results_csv(rs), arr.dump(2) + "\n");
  int failures = 0;
  for (const auto& r : rs) {
    const bool tolerated =
        std::find(cfg.known_red.begin(), cfg.known_red.end(), r.id) != cfg.known_red.end();
    std::printf("%s%s\n", r.line().c_str(), (!r.pass && tolerated) ? " (known red)" : "");
    if (!r.pass && !tolerated) ++failures;
  }
  return failures == 0 ? 0 : 1;
}

std::vector<double> t_grid(const RunConfig& cfg, int min_count) {
  if (cfg.t_min < 1.0) throw UsageError("--t-min must be >= 1");
  if (cfg.t_max < cfg.t_min) throw UsageError("--t-max must be >= --t-min");
  if (cfg.t_count < min_count)
    throw UsageError("--t-count must be >= " + std::to_string(min_count));
  return geometric_grid(cfg.t_min, cfg.t_max, cfg.t_count);
}

SweepSettings sweep_settings(const RunConfig& cfg) {
  SweepSettings s;
  s.nodes_per_octave = cfg.nodes_per_octave;
  s.n_theta = cfg.n_theta;
  s.rho_inner = cfg.rho_inner;
  return s;
}

// Fit subcommands: table rows for the chosen directions plus sweep columns.
int run_fit(const RunConfig& cfg, const PainleveTable& table, const std::vector<std::string>& dirs,
            bool judge) {
  const MetricTable mt =
      metric_difference_table(table, t_grid(cfg, 8), dirs, sweep_settings(cfg));
  emit(cfg, table_csv(mt.rows), table_json(mt.rows));
  if (!cfg.out_path.empty()) write_text(cfg.out_path + ".dat", sweep_dat(mt.points));
  int rc = 0;
  for (const TableRow& r : mt.rows) {
    const bool ok = r.identically_zero || (std::isfinite(r.exponent) && r.exponent <= r.expected + 0.1);
    std::fprintf(stderr, "%s %s exponent=%s expected=%s r_squared=%s%s\n", ok ? "PASS" : "FAIL",
                 r.direction.c_str(), format_double(r.exponent).c_str(),
                 format_double(r.expected).c_str(), format_double(r.r_squared).c_str(),
                 r.identically_zero ? " (identically zero)" : "");
    if (judge && !ok) rc = 1;
  }
  return rc;
}

int run_psi_table(const RunConfig& cfg) {
  const PainleveTable t = load_or_solve(cfg.cache_dir, 1e-6, 16.0, 16384, cfg.tol);
  double mx = 0.0;
  for (double r : ode_residuals(t)) mx = std::max(mx, std::abs(r));
  if (!cfg.out_path.empty()) write_table(t, cfg.out_path);
  std::printf("ode_residual_max=%s nodes=%zu rho_min=%s rho_max=%s\n", format_double(mx).c_str(),
              t.rho.size(), format_double(t.meta.rho_min).c_str(),
              format_double(t.meta.rho_max).c_str());
  return mx < cfg.tol ? 0 : 1;
}

int dispatch(const std::string& sub, const RunConfig& cfg) {
  if (sub == "psi-table") return run_psi_table(cfg);
  const PainleveTable table = load_or_solve(cfg.cache_dir);
  AcceptanceSettings as = default_acceptance_settings();
  as.seed = cfg.seed;
  as.sweep = sweep_settings(cfg);
  if (sub == "ft-props") return report(cfg, {check_ft_properties(table)});
  if (sub == "residual") return report(cfg, {check_residual(table)});
  if (sub == "green-scaling") return report(cfg, {check_green_scaling(table)});
  if (sub == "gauge-check") {
    as.sweep_t = t_grid(cfg, 8);
    as.rotation_t.clear();
    return report(cfg, {check_coulomb_gauge(table, run_sweeps(table, as), cfg.seed)});
  }
  if (sub == "radial-fit") return run_fit(cfg, table, {"rr"}, true);
  if (sub == "horizontal-fit") return run_fit(cfg, table, {"hh", "rh"}, true);
  if (sub == "vertical-fit") return run_fit(cfg, table, {"vv"}, true);
  if (sub == "mixed-fit") return run_fit(cfg, table, {"rv", "hv"}, true);
  if (sub == "table") return run_fit(cfg, table, {"rr", "hh", "vv", "rh", "rv", "hv"}, false);
  if (sub == "cone-check") return report(cfg, {check_cone()});
  if (sub == "crosscheck") return report(cfg, {check_chart()});
  if (sub == "newton") return report(cfg, {check_newton(table)});
  if (sub == "all") return report(cfg, run_acceptance(table, {}, as));
  throw UsageError("unknown subcommand '" + sub + "'");
}

}  // namespace

int main(int argc, char** argv) {
  static const std::vector<std::pair<std::string, std::string>> subs{
      {"psi-table", "solve the sinh-Gordon profile and report its discrete residual"},
      {"ft-props", "monotonicity and small-r behaviour of f_t"},
      {"residual", "Hitchin residual of the fiducial and approximate pairs"},
      {"green-scaling", "scaling of L_t^{-1} under t -> 2^{3/2} t"},
      {"gauge-check", "Coulomb gauge fixing and the energy identity"},
      {"radial-fit", "exponent of the radial metric difference"},
      {"horizontal-fit", "exponents of the horizontal and radial-horizontal differences"},
      {"vertical-fit", "exponent of the vertical metric difference"},
      {"mixed-fit", "radial-vertical and horizontal-vertical pairings"},
      {"cone-check", "homogeneity of the special Kaehler metric"},
      {"crosscheck", "special Kaehler metric in the z and w charts"},
      {"newton", "Newton correction of the approximate pair"},
      {"table", "all six metric differences, without judging them"},
      {"all", "every acceptance check"}};
  CLI::App app{"Numerical checks for the disk model of the Hitchin moduli space"};
  app.require_subcommand(1, 1);
  RunConfig cfg;
  if (const char* env = std::getenv("HITCHIN_CACHE_DIR")) cfg.cache_dir = env;
  for (const auto& [name, help] : subs) {
    CLI::App* sc = app.add_subcommand(name, help);
    sc->add_option("--t-min", cfg.t_min, "smallest t of the geometric grid");
    sc->add_option("--t-max", cfg.t_max, "largest t of the geometric grid");
    sc->add_option("--t-count", cfg.t_count, "number of t values");
    sc->add_option("--nodes-per-octave", cfg.nodes_per_octave, "radial resolution of sweeps")
        ->check(CLI::PositiveNumber);
    sc->add_option("--n-theta", cfg.n_theta, "angular nodes over the cover")->check(CLI::PositiveNumber);
    sc->add_option("--rho-inner", cfg.rho_inner, "innermost ring in the scaled variable")
        ->check(CLI::PositiveNumber);
    sc->add_option("--tol", cfg.tol, "tolerance of the psi solve")->check(CLI::PositiveNumber);
    sc->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    sc->add_option("--out", cfg.out_path, "output file (stdout when omitted)");
    sc->add_option("--cache-dir", cfg.cache_dir, "psi table cache (env HITCHIN_CACHE_DIR)");
    sc->add_option("--seed", cfg.seed, "seed of the random test fields");
    sc->add_option("--known-red", cfg.known_red, "failing criteria that do not set the exit status");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    return dispatch(sub, cfg);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
