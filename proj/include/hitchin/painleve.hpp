// Radial sinh-Gordon profile psi(rho):  (rho d/drho)^2 psi = 1/2 rho^2 sinh(2 psi),
// with psi ~ -(1/3) log rho at 0 and psi ~ K0(rho) at infinity.
// h_t(r) = psi(8/3 t r^{3/2}),  f_t = 1/8 + r h_t'/4.
#pragma once

#include <string>
#include <vector>

namespace hitchin {

double bessel_k0(double x);
double bessel_k1(double x);

struct PainleveMeta {
  double rho_min = 1e-6;
  double rho_max = 16.0;
  double solver_tol = 1e-8;
  int grid_size = 16384;
  int newton_iterations = 0;
  double max_residual = 0.0;
};

struct PainleveTable {
  std::vector<double> rho;
  std::vector<double> psi;
  std::vector<double> rho_dpsi;
  PainleveMeta meta;

  double s0() const;
  double ds() const;
};

// Boundary data of the discrete problem. The default is the physical one:
// rho psi' = -1/3 at rho_min and, at rho_max, the K0 decay condition. With
// right_robin the log-derivative psi'/psi = K0'/K0 is imposed and the K0
// amplitude is left free; otherwise psi(rho_max) = K0(rho_max).
//
// With left_series the left condition carries the first correction of the
// small-rho expansion, rho psi' = left_slope + (3/16) rho^2 e^{2 psi}; without
// it f_t/r^2 loses its limit near rho_min.
struct PsiBoundary {
  double left_slope = -1.0 / 3.0;
  double right_value = 0.0;
  bool right_is_k0 = true;
  bool right_robin = true;
  bool left_series = true;
  static PsiBoundary zero() { return {0.0, 0.0, false, false, false}; }
  static PsiBoundary k0_dirichlet() { return {-1.0 / 3.0, 0.0, true, false, true}; }
};

PainleveTable solve_psi(double rho_min = 1e-6, double rho_max = 16.0, int n = 16384,
                        double tol = 1e-8, const PsiBoundary& bc = {});

// Discrete residual (second difference in log rho minus the source) at the
// interior nodes, recomputed from the stored values.
std::vector<double> ode_residuals(const PainleveTable& table);

struct PsiValue {
  double psi;
  double rho_dpsi;
};
PsiValue eval_psi(const PainleveTable& table, double rho);

struct ProfileEval {
  double h;
  double r_dh;
  double f;
  double df;
};
ProfileEval profile_eval(const PainleveTable& table, double t, double r);

// h_t(r) + (1/2) log r, finite at r = 0.
double log_sqrt_r_exp_h(const PainleveTable& table, double t, double r);

struct PropertyReport {
  double f_min = 0.0;
  double f_max = 0.0;
  int monotone_r_violations = 0;
  int monotone_t_violations = 0;
  double slope_sup_f_over_r = 0.0;
  double slope_sup_f_over_r2 = 0.0;
  std::vector<double> sup_f_over_r;
  std::vector<double> sup_f_over_r2;
  std::vector<double> sup_sqrt_r_exp_abs_h;
  bool sqrt_r_exp_h_nonincreasing = true;
  // f_t(r)/r^2 at the smallest sampled radii, for each t.
  std::vector<double> f_over_r2_near_zero;
  double f_over_r2_spread = 0.0;
  double b0_first = 0.0;  // measured h_t(r) + log(r)/2 as r -> 0, smallest t
};

PropertyReport verify_ft_properties(const PainleveTable& table, const std::vector<double>& t_grid,
                                    const std::vector<double>& r_grid);

void write_table(const PainleveTable& table, const std::string& path);
PainleveTable read_table(const std::string& path);
std::string cache_file_name(double rho_min, double rho_max, int n, double tol);
// Reads a cached table from cache_dir if present, otherwise solves and writes it.
// An empty cache_dir disables caching.
PainleveTable load_or_solve(const std::string& cache_dir, double rho_min = 1e-6,
                            double rho_max = 16.0, int n = 16384, double tol = 1e-8);
// Process-wide default table (cached on disk under HITCHIN_CACHE_DIR if set).
const PainleveTable& default_table();

}  // namespace hitchin
