#include "hitchin/model_fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace hitchin {

namespace {

void finalize(PolarGrid& g) {
  g.r_min = g.r.front();
  g.face.assign(g.n_r + 1, 0.0);
  for (int k = 1; k <= g.n_r; ++k) g.face[k] = 0.5 * (g.r[k - 1] + g.r[k]);
  g.dtheta = g.period() / g.n_theta;
}

void check_common(int n_r, int n_theta, int sheets) {
  if (n_r < 3) throw ConfigError("grid needs n_r >= 3");
  if (n_theta < 4 || n_theta % 2 != 0) throw ConfigError("grid needs even n_theta >= 4");
  if (sheets != 1 && sheets != 2) throw ConfigError("cover_sheets must be 1 or 2");
}

cd poly(const std::vector<cd>& c, cd z) {
  cd acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

cd poly_d(const std::vector<cd>& c, cd z) {
  cd acc = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) acc = acc * z + static_cast<double>(k) * c[k];
  return acc;
}

}  // namespace

PolarGrid PolarGrid::graded(int n_r, int n_theta, double grading, double r_max, int cover_sheets,
                            bool origin_node) {
  check_common(n_r, n_theta, cover_sheets);
  if (!(grading >= 1.0)) throw ConfigError("grading must be >= 1");
  PolarGrid g;
  g.n_r = n_r;
  g.n_theta = n_theta;
  g.r_max = r_max;
  g.grading = grading;
  g.cover_sheets = cover_sheets;
  g.spacing = Spacing::graded;
  g.r.resize(n_r + 1);
  const double off = origin_node ? 0.0 : 0.5;
  for (int k = 0; k <= n_r; ++k) g.r[k] = r_max * std::pow((k + off) / (n_r + off), grading);
  g.r[n_r] = r_max;
  finalize(g);
  return g;
}

PolarGrid PolarGrid::logarithmic(double r_inner, int nodes_per_octave, int n_theta, double r_max,
                                 int cover_sheets) {
  if (!(r_inner > 0.0 && r_inner < r_max)) throw ConfigError("need 0 < r_inner < r_max");
  if (nodes_per_octave < 1) throw ConfigError("nodes_per_octave must be positive");
  const int n_r =
      static_cast<int>(std::ceil(nodes_per_octave * std::log2(r_max / r_inner) - 1e-9));
  check_common(n_r, n_theta, cover_sheets);
  PolarGrid g;
  g.n_r = n_r;
  g.n_theta = n_theta;
  g.r_max = r_max;
  g.cover_sheets = cover_sheets;
  g.spacing = Spacing::logarithmic;
  g.nodes_per_octave = nodes_per_octave;
  g.r.resize(n_r + 1);
  for (int k = 0; k <= n_r; ++k)
    g.r[k] = r_max * std::exp2(static_cast<double>(k - n_r) / nodes_per_octave);
  g.r[n_r] = r_max;
  finalize(g);
  return g;
}

PolarGrid PolarGrid::scale_covariant(double t, double rho_inner, int nodes_per_octave, int n_theta,
                                     int cover_sheets) {
  const double octaves = std::log2(std::pow(t, 2.0 / 3.0) / rho_inner);
  const long n_r = std::lround(nodes_per_octave * octaves);
  const double r_inner = std::exp2(-static_cast<double>(n_r) / nodes_per_octave);
  return logarithmic(r_inner * (1.0 - 1e-12), nodes_per_octave, n_theta, 1.0, cover_sheets);
}

MatrixField MatrixField::zeros(GridPtr g, FormDegree d, Symmetry s, Layout l) {
  MatrixField f;
  f.degree = d;
  f.symmetry = s;
  f.layout = l;
  if (l == Layout::edges) {
    f.c0.assign(static_cast<std::size_t>(g->n_r) * g->n_theta, Mat2::Zero());
    f.c1.assign(static_cast<std::size_t>(g->nodes()), Mat2::Zero());
  } else {
    f.c0.assign(static_cast<std::size_t>(g->nodes()), Mat2::Zero());
    if (d == FormDegree::one) f.c1.assign(static_cast<std::size_t>(g->nodes()), Mat2::Zero());
  }
  f.grid = std::move(g);
  return f;
}

FieldCheck check_field(const MatrixField& f) {
  FieldCheck c;
  auto scan = [&](const std::vector<Mat2>& v) {
    for (const Mat2& m : v) {
      c.max_trace = std::max(c.max_trace, std::abs(m.trace()));
      if (f.symmetry == Symmetry::skew_hermitian)
        c.max_symmetry_defect = std::max(c.max_symmetry_defect, (m + m.adjoint()).norm());
      else if (f.symmetry == Symmetry::hermitian)
        c.max_symmetry_defect = std::max(c.max_symmetry_defect, (m - m.adjoint()).norm());
    }
  };
  scan(f.c0);
  scan(f.c1);
  return c;
}

double equivariance_defect(const MatrixField& f, int sign) {
  const PolarGrid& g = *f.grid;
  if (g.cover_sheets != 2) throw ConfigError("equivariance needs a double-cover grid");
  const int half = g.n_theta / 2;
  double d = 0.0;
  auto scan = [&](const std::vector<Mat2>& v, int rings) {
    for (int k = 0; k < rings; ++k)
      for (int j = 0; j < half; ++j)
        d = std::max(d, (v[k * g.n_theta + j + half] - sign * v[k * g.n_theta + j]).norm());
  };
  if (f.layout == Layout::edges) {
    scan(f.c0, g.n_r);
    scan(f.c1, g.rings());
  } else {
    scan(f.c0, g.rings());
    if (!f.c1.empty()) scan(f.c1, g.rings());
  }
  return d;
}

QuadDifferentialModel::QuadDifferentialModel(std::vector<cd> c, std::vector<cd> dc)
    : coeffs(std::move(c)), dot_coeffs(std::move(dc)) {
  validate();
}

void QuadDifferentialModel::validate() const {
  if (coeffs.size() < 2 || std::abs(coeffs[0]) != 0.0 || std::abs(coeffs[1]) == 0.0)
    throw ConfigError("q must have a simple zero at the origin: c0 = 0, c1 != 0");
}

cd QuadDifferentialModel::f(cd z) const { return poly(coeffs, z); }
cd QuadDifferentialModel::fp(cd z) const { return poly_d(coeffs, z); }
cd QuadDifferentialModel::fdot(cd z) const { return poly(dot_coeffs, z); }
cd QuadDifferentialModel::fdotp(cd z) const { return poly_d(dot_coeffs, z); }

QuadDifferentialModel QuadDifferentialModel::radial() const {
  QuadDifferentialModel m = *this;
  m.dot_coeffs = coeffs;
  return m;
}

QuadDifferentialModel QuadDifferentialModel::normalized() const {
  // Integral of |f| over the unit disk by a tensor Gauss-type midpoint rule.
  const int nr = 800, nt = 512;
  double acc = 0.0;
  for (int k = 0; k < nr; ++k) {
    const double r = (k + 0.5) / nr;
    double ring = 0.0;
    for (int j = 0; j < nt; ++j) ring += std::abs(f(std::polar(r, 2.0 * kPi * j / nt)));
    acc += ring * r;
  }
  acc *= (1.0 / nr) * (2.0 * kPi / nt);
  QuadDifferentialModel m = *this;
  for (auto& c : m.coeffs) c /= acc;
  // Keep qdot = q if it was the radial direction.
  if (dot_coeffs == coeffs) m.dot_coeffs = m.coeffs;
  return m;
}

double CutoffSpec::operator()(double x) const {
  if (!active || x <= rho1) return 1.0;
  if (x >= rho2) return 0.0;
  const double u = (x - rho1) / (rho2 - rho1);
  return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

double CutoffSpec::derivative(double x) const {
  if (!active || x <= rho1 || x >= rho2) return 0.0;
  const double u = (x - rho1) / (rho2 - rho1);
  return -30.0 * u * u * (1.0 - u) * (1.0 - u) / (rho2 - rho1);
}

void CutoffSpec::validate(double r_max) const {
  if (!active) return;
  if (!(rho1 > 0.0 && rho1 < rho2 && rho2 <= r_max))
    throw ConfigError("cutoff needs 0 < rho1 < rho2 <= r_max");
}

std::string to_string(PairKind k) {
  switch (k) {
    case PairKind::limiting: return "limiting";
    case PairKind::fiducial: return "fiducial";
    case PairKind::approximate: return "approximate";
    case PairKind::corrected: return "corrected";
  }
  return "?";
}

TangentPair TangentPair::zeros(GridPtr g) {
  TangentPair v;
  v.alpha = MatrixField::zeros(g, FormDegree::one, Symmetry::skew_hermitian, Layout::edges);
  v.phi = MatrixField::zeros(g, FormDegree::one_zero, Symmetry::general);
  return v;
}

namespace {
TangentPair combine(const TangentPair& a, const TangentPair& b, double sb) {
  if (a.grid() != b.grid()) throw ConfigError("tangent pairs on different grids");
  TangentPair out = a;
  for (std::size_t i = 0; i < out.alpha.c0.size(); ++i) out.alpha.c0[i] += sb * b.alpha.c0[i];
  for (std::size_t i = 0; i < out.alpha.c1.size(); ++i) out.alpha.c1[i] += sb * b.alpha.c1[i];
  for (std::size_t i = 0; i < out.phi.c0.size(); ++i) out.phi.c0[i] += sb * b.phi.c0[i];
  out.gauged = false;
  return out;
}
}  // namespace

TangentPair operator+(const TangentPair& a, const TangentPair& b) { return combine(a, b, 1.0); }
TangentPair operator-(const TangentPair& a, const TangentPair& b) { return combine(a, b, -1.0); }
TangentPair operator*(double s, const TangentPair& a) {
  TangentPair out = a;
  for (auto& m : out.alpha.c0) m *= s;
  for (auto& m : out.alpha.c1) m *= s;
  for (auto& m : out.phi.c0) m *= s;
  return out;
}

std::pair<double, double> im_dbar_log_abs(const QuadDifferentialModel& q, double r,
                                          double theta) {
  const cd z = std::polar(r, theta);
  const cd g = q.fp(z) / q.f(z);
  const cd w = 0.5 * std::conj(g) * std::polar(1.0, -theta);
  // dbar log|f| = (1/2) conj(f'/f) dzbar and dzbar = e^{-i theta}(dr - i r dtheta).
  return {w.imag(), (-kI * r * w).imag()};
}

PairSample approximate_sample(const PainleveTable& table, const QuadDifferentialModel& q,
                              double t, const CutoffSpec& chi, double r, double theta) {
  const cd z = std::polar(r, theta);
  const cd fz = q.f(z);
  const double a = std::abs(fz);
  const double c = chi(a);
  const Mat2 s = sigma3();
  PairSample out;
  if (a == 0.0) {
    out.a_r = out.a_theta = Mat2::Zero();
    out.phi = offdiag(0.0, std::exp(log_sqrt_r_exp_h(table, t, 0.0)));
    return out;
  }
  const ProfileEval p = profile_eval(table, t, a);
  const double coef = 0.5 + c * (4.0 * p.f - 0.5);
  const auto [ir, ith] = im_dbar_log_abs(q, r, theta);
  out.a_r = coef * ir * s;
  out.a_theta = coef * ith * s;
  // e^{c h} |q|^{1/2}, evaluated in log form to stay finite near the zero.
  const double lsq = c == 1.0 ? log_sqrt_r_exp_h(table, t, a) : c * p.h + 0.5 * std::log(a);
  out.phi = offdiag(std::exp(-lsq) * fz, std::exp(lsq));
  return out;
}

namespace {

HiggsPair build_pair(const PainleveTable* table, const QuadDifferentialModel& q, double t,
                     const CutoffSpec& chi, GridPtr grid, PairKind kind) {
  HiggsPair p;
  p.A = MatrixField::zeros(grid, FormDegree::one, Symmetry::skew_hermitian);
  p.Phi = MatrixField::zeros(grid, FormDegree::one_zero, Symmetry::general);
  p.t = t;
  p.kind = kind;
  p.q = q;
  p.chi = chi;
  const PolarGrid& g = *grid;
  const Mat2 s = sigma3();
  for (int k = 0; k < g.rings(); ++k) {
    for (int j = 0; j < g.n_theta; ++j) {
      const int n = g.node(k, j);
      const double th = g.theta(j);
      if (table) {
        const PairSample ps = approximate_sample(*table, q, t, chi, g.r[k], th);
        p.A.c0[n] = ps.a_r;
        p.A.c1[n] = ps.a_theta;
        p.Phi.c0[n] = ps.phi;
      } else {
        const cd z = std::polar(g.r[k], th);
        const cd fz = q.f(z);
        const double a = std::abs(fz);
        const auto [ir, ith] = im_dbar_log_abs(q, g.r[k], th);
        p.A.c0[n] = 0.5 * ir * s;
        p.A.c1[n] = 0.5 * ith * s;
        p.Phi.c0[n] = offdiag(fz / std::sqrt(a), std::sqrt(a));
      }
    }
  }
  return p;
}

}  // namespace

HiggsPair limiting_configuration(const QuadDifferentialModel& q, GridPtr grid) {
  q.validate();
  if (!(grid->r.front() > 0.0))
    throw SingularityError("limiting configuration is singular at r = 0; use r_min > 0");
  return build_pair(nullptr, q, std::numeric_limits<double>::infinity(), CutoffSpec::none(),
                    std::move(grid), PairKind::limiting);
}

HiggsPair fiducial_solution(const PainleveTable& table, double t, GridPtr grid) {
  if (!(t > 0.0)) throw DomainError("fiducial_solution requires t > 0");
  return build_pair(&table, QuadDifferentialModel{}, t, CutoffSpec::none(), std::move(grid),
                    PairKind::fiducial);
}

HiggsPair approximate_solution(const PainleveTable& table, const QuadDifferentialModel& q,
                               double t, const CutoffSpec& chi, GridPtr grid) {
  q.validate();
  chi.validate(grid->r_max);
  return build_pair(&table, q, t, chi, std::move(grid), PairKind::approximate);
}

std::vector<Mat2> radial_derivative(const PolarGrid& g, const std::vector<Mat2>& v) {
  const int nt = g.n_theta, n = g.n_r;
  std::vector<Mat2> d(v.size());
  const auto& r = g.r;
  for (int k = 0; k <= n; ++k) {
    double w0, w1, w2;
    int k0;
    if (k == 0) {
      const double h1 = r[1] - r[0], h2 = r[2] - r[1];
      w0 = -(2 * h1 + h2) / (h1 * (h1 + h2));
      w1 = (h1 + h2) / (h1 * h2);
      w2 = -h1 / (h2 * (h1 + h2));
      k0 = 0;
    } else if (k == n) {
      const double h1 = r[n - 1] - r[n - 2], h2 = r[n] - r[n - 1];
      w0 = h2 / (h1 * (h1 + h2));
      w1 = -(h1 + h2) / (h1 * h2);
      w2 = (2 * h2 + h1) / (h2 * (h1 + h2));
      k0 = n - 2;
    } else {
      const double h1 = r[k] - r[k - 1], h2 = r[k + 1] - r[k];
      w0 = -h2 / (h1 * (h1 + h2));
      w1 = (h2 - h1) / (h1 * h2);
      w2 = h1 / (h2 * (h1 + h2));
      k0 = k - 1;
    }
    for (int j = 0; j < nt; ++j)
      d[k * nt + j] = w0 * v[k0 * nt + j] + w1 * v[(k0 + 1) * nt + j] + w2 * v[(k0 + 2) * nt + j];
  }
  return d;
}

std::vector<Mat2> angular_derivative(const PolarGrid& g, const std::vector<Mat2>& v) {
  const int nt = g.n_theta;
  std::vector<Mat2> d(v.size());
  for (int k = 0; k < g.rings(); ++k)
    for (int j = 0; j < nt; ++j)
      d[k * nt + j] =
          (v[k * nt + (j + 1) % nt] - v[k * nt + (j + nt - 1) % nt]) / (2.0 * g.dtheta);
  return d;
}

MatrixField curvature(const MatrixField& A) {
  if (A.degree != FormDegree::one || A.layout != Layout::nodes)
    throw FieldTypeError("curvature expects a node-sampled 1-form");
  const PolarGrid& g = *A.grid;
  MatrixField F = MatrixField::zeros(A.grid, FormDegree::two, Symmetry::skew_hermitian);
  const auto dr_ath = radial_derivative(g, A.c1);
  const auto dth_ar = angular_derivative(g, A.c0);
  for (std::size_t i = 0; i < F.c0.size(); ++i)
    F.c0[i] = dr_ath[i] - dth_ar[i] + bracket(A.c0[i], A.c1[i]);
  return F;
}

ResidualReport hitchin_residual(const HiggsPair& pair, double t) {
  const PolarGrid& g = *pair.grid();
  ResidualReport rep;
  rep.moment = curvature(pair.A);
  rep.moment.symmetry = Symmetry::skew_hermitian;
  rep.holo = MatrixField::zeros(pair.grid(), FormDegree::one_one, Symmetry::general);
  const auto dphi_r = radial_derivative(g, pair.Phi.c0);
  const auto dphi_t = angular_derivative(g, pair.Phi.c0);
  const double t2 = std::isfinite(t) ? t * t : 0.0;
  double s_m = 0, s_h = 0, l_m = 0, l_h = 0;
  for (int k = 0; k < g.rings(); ++k) {
    const double r = g.r[k];
    const double area = g.cell_area(k);
    for (int j = 0; j < g.n_theta; ++j) {
      const int n = g.node(k, j);
      const Mat2& phi = pair.Phi.c0[n];
      // [Phi ^ Phi^*] = [phi, phi^*] dz^dzbar and dz^dzbar = -2i r dr^dtheta.
      if (std::isfinite(t)) rep.moment.c0[n] += t2 * (-2.0 * kI * r) * bracket(phi, phi.adjoint());
      const cd e = std::polar(0.5, g.theta(j));
      const Mat2 a_zbar = e * (pair.A.c0[n] + kI * pair.A.c1[n] / r);
      rep.holo.c0[n] = e * (dphi_r[n] + (kI / r) * dphi_t[n]) + bracket(a_zbar, phi);
      const double m = rep.moment.c0[n].norm() / r;
      const double h = 2.0 * rep.holo.c0[n].norm();
      s_m = std::max(s_m, m);
      s_h = std::max(s_h, h);
      l_m += area * m * m;
      l_h += area * h * h;
    }
  }
  rep.sup_moment = s_m;
  rep.sup_holo = s_h;
  rep.l2_moment = std::sqrt(l_m);
  rep.l2_holo = std::sqrt(l_h);
  return rep;
}

ResidualDefect approximate_residual_defect(const PainleveTable& table,
                                           const QuadDifferentialModel& q, double t,
                                           const CutoffSpec& chi, GridPtr grid) {
  const PolarGrid& g = *grid;
  const ResidualReport app = hitchin_residual(approximate_solution(table, q, t, chi, grid), t);
  const ResidualReport inner =
      hitchin_residual(approximate_solution(table, q, t, CutoffSpec::none(), grid), t);
  const ResidualReport outer = hitchin_residual(limiting_configuration(q, grid), t);
  const double mid = 0.5 * (chi.rho1 + chi.rho2);
  ResidualDefect d;
  d.raw_sup = std::max(app.sup_moment, app.sup_holo);
  for (int k = 0; k < g.rings(); ++k)
    for (int j = 0; j < g.n_theta; ++j) {
      const int n = g.node(k, j);
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (int dk = -1; dk <= 1; ++dk)
        for (int dj = -1; dj <= 1; ++dj) {
          const int kk = std::clamp(k + dk, 0, g.n_r);
          const int jj = (j + dj + g.n_theta) % g.n_theta;
          const double a = q.abs_q(std::polar(g.r[kk], g.theta(jj)));
          lo = std::min(lo, a);
          hi = std::max(hi, a);
        }
      const bool use_inner = q.abs_q(std::polar(g.r[k], g.theta(j))) <= mid;
      const ResidualReport& ref = use_inner ? inner : outer;
      const double v = std::max((app.moment.c0[n] - ref.moment.c0[n]).norm() / g.r[k],
                                2.0 * (app.holo.c0[n] - ref.holo.c0[n]).norm());
      if (hi <= chi.rho1) {
        d.sup_inner = std::max(d.sup_inner, v);
      } else if (lo >= chi.rho2) {
        d.sup_outer = std::max(d.sup_outer, v);
      } else {
        d.sup_annulus = std::max(d.sup_annulus, v);
        const double a = q.abs_q(std::polar(g.r[k], g.theta(j)));
        if (a < chi.rho1 || a > chi.rho2) ++d.excluded;
      }
    }
  return d;
}

void dump_field_csv(const MatrixField& f, const std::string& path, const std::string& name) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot write field dump: " + path);
  const PolarGrid& g = *f.grid;
  auto block = [&](const std::vector<Mat2>& v, const std::string& comp, bool radial_edges,
                   bool angular_edges) {
    std::fprintf(fp, "# %s %s\nr,theta,re(m11),im(m11),re(m12),im(m12),re(m21),im(m21)\n",
                 name.c_str(), comp.c_str());
    const int rings = radial_edges ? g.n_r : g.rings();
    for (int k = 0; k < rings; ++k)
      for (int j = 0; j < g.n_theta; ++j) {
        const Mat2& m = v[k * g.n_theta + j];
        const double r = radial_edges ? 0.5 * (g.r[k] + g.r[k + 1]) : g.r[k];
        const double th = angular_edges ? g.theta(j) + 0.5 * g.dtheta : g.theta(j);
        std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r, th,
                     m(0, 0).real(), m(0, 0).imag(), m(0, 1).real(), m(0, 1).imag(),
                     m(1, 0).real(), m(1, 0).imag());
      }
  };
  const bool edges = f.layout == Layout::edges;
  if (f.degree == FormDegree::one) {
    block(f.c0, "dr", edges, false);
    block(f.c1, "dtheta", false, edges);
  } else {
    block(f.c0, "coefficient", false, false);
  }
  if (std::fclose(fp) != 0) throw std::runtime_error("error closing field dump: " + path);
}

}  // namespace hitchin
