#include "hitchin/painleve.hpp"

#include "hitchin/conventions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace hitchin {

double bessel_k0(double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k0 requires x > 0");
  return std::cyl_bessel_k(0.0, x);
}

double bessel_k1(double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k1 requires x > 0");
  return std::cyl_bessel_k(1.0, x);
}

double PainleveTable::s0() const { return std::log(meta.rho_min); }
double PainleveTable::ds() const {
  return (std::log(meta.rho_max) - std::log(meta.rho_min)) / (meta.grid_size - 1);
}

namespace {

// Thomas algorithm; overwrites rhs with the solution.
void solve_tridiagonal(std::vector<double> lo, std::vector<double> di, std::vector<double> up,
                       std::vector<double>& rhs) {
  const std::size_t n = di.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lo[i] / di[i - 1];
    di[i] -= w * up[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= di[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - up[i] * rhs[i + 1]) / di[i];
}

double source(double s, double psi) { return 0.5 * std::exp(2.0 * s) * std::sinh(2.0 * psi); }

}  // namespace

PainleveTable solve_psi(double rho_min, double rho_max, int n, double tol, const PsiBoundary& bc) {
  if (!(rho_min > 0.0 && rho_min < 1.0 && rho_max > 1.0))
    throw DomainError("solve_psi requires 0 < rho_min < 1 < rho_max");
  if (n < 512) throw DomainError("solve_psi requires n >= 512");

  const double s0 = std::log(rho_min);
  const double ds = (std::log(rho_max) - s0) / (n - 1);
  const double inv2 = 1.0 / (ds * ds);
  const double slope = bc.left_slope;
  const double right = bc.right_is_k0 ? bessel_k0(rho_max) : bc.right_value;

  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = s0 + i * ds;

  // Unknown v = psi - slope * s has zero slope at the left end, so the ghost
  // value is a reflection and the large linear part drops out of differences.
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    double guess = 0.0;
    if (bc.right_is_k0) {
      const double rho = std::exp(s[i]);
      const double w = 1.0 / (1.0 + std::pow(rho, -4.0));
      guess = (1.0 - w) * (-s[i] / 3.0) + w * bessel_k0(rho);
    }
    v[i] = guess - slope * s[i];
  }
  const bool robin = bc.right_is_k0 && bc.right_robin;
  // Robin data psi_s = kappa psi at the right end (psi_s = rho psi').
  const double kappa = -rho_max * bessel_k1(rho_max) / bessel_k0(rho_max);
  if (!robin) v[n - 1] = right - slope * s[n - 1];

  const int m = robin ? n : n - 1;  // number of unknowns
  auto ghost_right = [&](const std::vector<double>& vv) {
    const double psi = vv[n - 1] + slope * s[n - 1];
    return vv[n - 2] + 2.0 * ds * (kappa * psi - slope);
  };
  // Left data v_s = mu(psi_0): zero for the bare Robin condition.
  const double rho_min2 = rho_min * rho_min;
  auto mu = [&](double v0) {
    return bc.left_series ? (3.0 / 16.0) * rho_min2 * std::exp(2.0 * (v0 + slope * s0)) : 0.0;
  };
  auto residual = [&](const std::vector<double>& vv, std::vector<double>& out) {
    double mx = 0.0;
    for (int i = 0; i < m; ++i) {
      const double left = i == 0 ? vv[1] - 2.0 * ds * mu(vv[0]) : vv[i - 1];
      const double next = i == n - 1 ? ghost_right(vv) : vv[i + 1];
      const double d2 = ((next - vv[i]) - (vv[i] - left)) * inv2;
      out[i] = d2 - source(s[i], vv[i] + slope * s[i]);
      mx = std::max(mx, std::abs(out[i]));
    }
    return mx;
  };

  std::vector<double> f(m), trial(n), trial_f(m);
  double fmax = residual(v, f);
  int it = 0;
  const int max_it = 200;
  for (; it < max_it && fmax > 0.1 * tol; ++it) {
    std::vector<double> lo(m, inv2), di(m), up(m, inv2), rhs(m);
    for (int i = 0; i < m; ++i) {
      const double psi = v[i] + slope * s[i];
      di[i] = -2.0 * inv2 - std::exp(2.0 * s[i]) * std::cosh(2.0 * psi);
      rhs[i] = -f[i];
    }
    up[0] = 2.0 * inv2;
    lo[0] = 0.0;
    di[0] -= 2.0 * ds * inv2 * 2.0 * mu(v[0]);
    up[m - 1] = 0.0;
    if (robin) {
      lo[m - 1] = 2.0 * inv2;
      di[m - 1] += 2.0 * ds * kappa * inv2;
    }
    solve_tridiagonal(lo, di, up, rhs);

    double step_max = 0.0;
    for (double d : rhs) step_max = std::max(step_max, std::abs(d));
    double lambda = 1.0;
    double trial_max = 0.0;
    for (;;) {
      trial = v;
      for (int i = 0; i < m; ++i) trial[i] += lambda * rhs[i];
      trial_max = residual(trial, trial_f);
      if (trial_max < (1.0 - 0.25 * lambda) * fmax || lambda < 1e-6) break;
      lambda *= 0.5;
    }
    v.swap(trial);
    f.swap(trial_f);
    fmax = trial_max;
    if (step_max * lambda < 1e-14) break;
  }
  if (!(fmax < tol)) {
    std::ostringstream os;
    os << "solve_psi: Newton did not converge after " << it << " iterations, residual " << fmax;
    throw SolverError(os.str());
  }

  PainleveTable table;
  table.meta = {rho_min, rho_max, tol, n, it, fmax};
  table.rho.resize(n);
  table.psi.resize(n);
  table.rho_dpsi.resize(n);
  for (int i = 0; i < n; ++i) {
    table.rho[i] = std::exp(s[i]);
    table.psi[i] = v[i] + slope * s[i];
  }
  table.rho.front() = rho_min;
  table.rho.back() = rho_max;
  table.rho_dpsi[0] = slope + mu(v[0]);
  for (int i = 1; i < n - 1; ++i) table.rho_dpsi[i] = (v[i + 1] - v[i - 1]) / (2.0 * ds) + slope;
  table.rho_dpsi[n - 1] = robin ? kappa * table.psi[n - 1]
                                : (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * ds) + slope;
  return table;
}

std::vector<double> ode_residuals(const PainleveTable& table) {
  const int n = static_cast<int>(table.psi.size());
  const double ds = table.ds();
  const double s0 = table.s0();
  std::vector<double> out(n > 2 ? n - 2 : 0);
  for (int i = 1; i < n - 1; ++i) {
    const double d2 =
        ((table.psi[i + 1] - table.psi[i]) - (table.psi[i] - table.psi[i - 1])) / (ds * ds);
    out[i - 1] = d2 - source(s0 + i * ds, table.psi[i]);
  }
  return out;
}

PsiValue eval_psi(const PainleveTable& table, double rho) {
  if (!(rho > 0.0)) throw DomainError("eval_psi requires rho > 0");
  const auto& g = table.rho;
  const int n = static_cast<int>(g.size());
  if (rho > table.meta.rho_max) {
    const double c = table.psi.back() / bessel_k0(table.meta.rho_max);
    return {c * bessel_k0(rho), -c * rho * bessel_k1(rho)};
  }
  if (rho < table.meta.rho_min) {
    // Two-term small-rho series rho psi' = -1/3 + mu (rho/rho_min)^{4/3},
    // matched to the first table node.
    const double mu = table.rho_dpsi.front() + 1.0 / 3.0;
    const double x = std::pow(rho / table.meta.rho_min, 4.0 / 3.0);
    return {table.psi.front() - (std::log(rho) - std::log(table.meta.rho_min)) / 3.0 +
                0.75 * mu * (x - 1.0),
            -1.0 / 3.0 + mu * x};
  }
  const auto it = std::lower_bound(g.begin(), g.end(), rho);
  if (it != g.end() && *it == rho) {
    const auto i = it - g.begin();
    return {table.psi[i], table.rho_dpsi[i]};
  }
  const double ds = table.ds();
  const double u = (std::log(rho) - table.s0()) / ds;
  int i = static_cast<int>(std::floor(u));
  i = std::clamp(i, 0, n - 2);
  const double tau = u - i;
  const double t2 = tau * tau, t3 = t2 * tau;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + tau;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  const double g0 = 0.5 * g[i] * g[i] * std::sinh(2.0 * table.psi[i]);
  const double g1 = 0.5 * g[i + 1] * g[i + 1] * std::sinh(2.0 * table.psi[i + 1]);
  const double psi = h00 * table.psi[i] + h10 * ds * table.rho_dpsi[i] +
                     h01 * table.psi[i + 1] + h11 * ds * table.rho_dpsi[i + 1];
  const double dpsi = h00 * table.rho_dpsi[i] + h10 * ds * g0 + h01 * table.rho_dpsi[i + 1] +
                      h11 * ds * g1;
  return {psi, dpsi};
}

ProfileEval profile_eval(const PainleveTable& table, double t, double r) {
  if (!(t > 0.0)) throw DomainError("profile_eval requires t > 0");
  if (!(r >= 0.0)) throw DomainError("profile_eval requires r >= 0");
  if (r == 0.0) return {std::numeric_limits<double>::infinity(), -0.5, 0.0, 0.0};
  const double rho = (8.0 / 3.0) * t * r * std::sqrt(r);
  const PsiValue p = eval_psi(table, rho);
  ProfileEval e;
  e.h = p.psi;
  e.r_dh = 1.5 * p.rho_dpsi;
  e.f = 0.125 + 0.25 * e.r_dh;
  // f' = (3/8) d(rho psi')/dr = (9/16) psi_ss / r with psi_ss from the equation.
  e.df = (9.0 / 16.0) * 0.5 * rho * rho * std::sinh(2.0 * p.psi) / r;
  return e;
}

double log_sqrt_r_exp_h(const PainleveTable& table, double t, double r) {
  const double rho = (8.0 / 3.0) * t * r * std::sqrt(r);
  if (rho < table.meta.rho_min) {
    // psi + log(rho)/3 from the series, then log(rho)/3 = log(8t/3)/3 + log(r)/2.
    const double mu = table.rho_dpsi.front() + 1.0 / 3.0;
    const double x = std::pow(rho / table.meta.rho_min, 4.0 / 3.0);
    return table.psi.front() + std::log(table.meta.rho_min) / 3.0 + 0.75 * mu * (x - 1.0) -
           std::log(8.0 * t / 3.0) / 3.0;
  }
  return eval_psi(table, rho).psi + 0.5 * std::log(r);
}

namespace {

double slope_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Maximizes g on the sampled radii, then refines by golden section in log r.
double sup_refined(const std::vector<double>& r, const std::function<double(double)>& g) {
  std::size_t best = 0;
  double bv = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double v = g(r[k]);
    if (v > bv) {
      bv = v;
      best = k;
    }
  }
  if (best == 0 || best + 1 == r.size()) return bv;
  double a = std::log(r[best - 1]), b = std::log(r[best + 1]);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double gc = g(std::exp(c)), gd = g(std::exp(d));
  for (int it = 0; it < 80; ++it) {
    if (gc > gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - gr * (b - a);
      gc = g(std::exp(c));
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + gr * (b - a);
      gd = g(std::exp(d));
    }
  }
  return std::max({bv, gc, gd});
}

}  // namespace

PropertyReport verify_ft_properties(const PainleveTable& table, const std::vector<double>& t_grid,
                                    const std::vector<double>& r_grid) {
  PropertyReport rep;
  rep.f_min = std::numeric_limits<double>::infinity();
  rep.f_max = -std::numeric_limits<double>::infinity();
  std::vector<double> r = r_grid;
  std::sort(r.begin(), r.end());
  std::vector<double> t = t_grid;
  std::sort(t.begin(), t.end());

  std::vector<std::vector<double>> fv(t.size(), std::vector<double>(r.size()));
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      const double f = profile_eval(table, t[i], r[k]).f;
      fv[i][k] = f;
      rep.f_min = std::min(rep.f_min, f);
      rep.f_max = std::max(rep.f_max, f);
      if (k > 0 && f < fv[i][k - 1] - 1e-14) ++rep.monotone_r_violations;
      if (i > 0 && f < fv[i - 1][k] - 1e-14) ++rep.monotone_t_violations;
    }
  }

  std::vector<double> lt, l1, l2;
  double prev_sup = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double ti = t[i];
    const double s1 = sup_refined(r, [&](double x) { return profile_eval(table, ti, x).f / x; });
    const double s2 =
        sup_refined(r, [&](double x) { return profile_eval(table, ti, x).f / (x * x); });
    rep.sup_f_over_r.push_back(s1);
    rep.sup_f_over_r2.push_back(s2);
    lt.push_back(std::log(ti));
    l1.push_back(std::log(s1));
    l2.push_back(std::log(s2));

    double sup_h = 0.0;
    for (double x : r) {
      const double lh = log_sqrt_r_exp_h(table, ti, x);
      const double h = lh - 0.5 * std::log(x);
      sup_h = std::max({sup_h, std::exp(lh), std::sqrt(x) * std::exp(-h)});
    }
    rep.sup_sqrt_r_exp_abs_h.push_back(sup_h);
    if (sup_h > prev_sup * (1.0 + 1e-12)) rep.sqrt_r_exp_h_nonincreasing = false;
    prev_sup = sup_h;

    rep.f_over_r2_near_zero.push_back(fv[i][0] / (r[0] * r[0]));
  }
  rep.slope_sup_f_over_r = slope_fit(lt, l1);
  rep.slope_sup_f_over_r2 = slope_fit(lt, l2);

  // Spread of f/r^2 over the two smallest radii at the smallest t.
  if (r.size() > 1) {
    const double a = fv[0][0] / (r[0] * r[0]);
    const double b = fv[0][1] / (r[1] * r[1]);
    rep.f_over_r2_spread = std::abs(a - b) / std::max(std::abs(a), 1e-300);
  }
  rep.b0_first = log_sqrt_r_exp_h(table, t.front(), 0.0);
  return rep;
}

std::string cache_file_name(double rho_min, double rho_max, int n, double tol) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "psitab_series_%.6g_%.6g_%d_%.3g.csv", rho_min, rho_max, n, tol);
  return buf;
}

void write_table(const PainleveTable& table, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot write table: " + path);
  std::fprintf(fp, "PSITAB v1 %.17g %.17g %d %.17g\n", table.meta.rho_min, table.meta.rho_max,
               table.meta.grid_size, table.meta.solver_tol);
  for (std::size_t i = 0; i < table.rho.size(); ++i)
    std::fprintf(fp, "%.17g,%.17g,%.17g\n", table.rho[i], table.psi[i], table.rho_dpsi[i]);
  if (std::fclose(fp) != 0) throw std::runtime_error("error closing table: " + path);
}

PainleveTable read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read table: " + path);
  std::string magic, version;
  PainleveTable table;
  in >> magic >> version >> table.meta.rho_min >> table.meta.rho_max >> table.meta.grid_size >>
      table.meta.solver_tol;
  if (magic != "PSITAB" || version != "v1") throw std::runtime_error("bad table header: " + path);
  std::string line;
  std::getline(in, line);
  const auto n = static_cast<std::size_t>(table.meta.grid_size);
  table.rho.reserve(n);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double a, b, c;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &a, &b, &c) != 3)
      throw std::runtime_error("bad table row in " + path);
    table.rho.push_back(a);
    table.psi.push_back(b);
    table.rho_dpsi.push_back(c);
  }
  if (table.rho.size() != n) throw std::runtime_error("table row count mismatch: " + path);
  double mx = 0.0;
  for (double v : ode_residuals(table)) mx = std::max(mx, std::abs(v));
  table.meta.max_residual = mx;
  return table;
}

PainleveTable load_or_solve(const std::string& cache_dir, double rho_min, double rho_max, int n,
                            double tol) {
  namespace fs = std::filesystem;
  if (!cache_dir.empty()) {
    const fs::path p = fs::path(cache_dir) / cache_file_name(rho_min, rho_max, n, tol);
    if (fs::exists(p)) {
      PainleveTable t = read_table(p.string());
      if (t.meta.rho_min == rho_min && t.meta.rho_max == rho_max && t.meta.grid_size == n)
        return t;
    }
    PainleveTable t = solve_psi(rho_min, rho_max, n, tol);
    fs::create_directories(cache_dir);
    write_table(t, p.string());
    return t;
  }
  return solve_psi(rho_min, rho_max, n, tol);
}

const PainleveTable& default_table() {
  static const PainleveTable table = [] {
    const char* dir = std::getenv("HITCHIN_CACHE_DIR");
    return load_or_solve(dir ? dir : "");
  }();
  return table;
}

}  // namespace hitchin
