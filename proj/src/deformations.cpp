#include "hitchin/deformations.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace hitchin {

namespace {

// Connection coefficient c(|q|) = 1/2 + chi (4 f_t - 1/2) and its derivative in |q|.
struct CoefficientSample {
  double c, dc;
  double lsq;  // chi h + (1/2) log|q|
  double dlog; // d/d|q| of (chi h), times |q|
};

CoefficientSample coefficient(const PainleveTable& table, double t, const CutoffSpec& chi,
                              double a) {
  const ProfileEval p = profile_eval(table, t, a);
  const double x = chi(a), dx = chi.derivative(a);
  CoefficientSample s;
  s.c = 0.5 + x * (4.0 * p.f - 0.5);
  s.dc = dx * (4.0 * p.f - 0.5) + 4.0 * x * p.df;
  s.lsq = x == 1.0 ? log_sqrt_r_exp_h(table, t, a) : x * p.h + 0.5 * std::log(a);
  s.dlog = a * dx * p.h + x * p.r_dh;
  return s;
}

// Adot at a point as (dr, dtheta) coefficients of the sigma component.
std::pair<double, double> connection_variation(const PainleveTable& table,
                                               const QuadDifferentialModel& q, double t,
                                               const CutoffSpec& chi, double r, double th) {
  const cd z = std::polar(r, th);
  const cd f = q.f(z);
  const double a = std::abs(f);
  const cd g = q.fdot(z) / f;
  const cd gp = (q.fdotp(z) * f - q.fdot(z) * q.fp(z)) / (f * f);
  const CoefficientSample cs = coefficient(table, t, chi, a);
  const auto [wr, wth] = im_dbar_log_abs(q, r, th);
  const double cdot = cs.dc * a * g.real();
  const cd e = std::polar(1.0, th);
  // Adot = cdot Im(omega) - (c/2) d Im g, with d Im g = Im(g' dz).
  const double dr = cdot * wr - 0.5 * cs.c * (gp * e).imag();
  const double dth = cdot * wth - 0.5 * cs.c * (gp * e * kI * r).imag();
  return {dr, dth};
}

void require_same_q(const QuadDifferentialModel& a, const QuadDifferentialModel& b) {
  if (a.coeffs != b.coeffs) throw ConfigError("tangent direction does not match the pair's q");
}

double sup_difference(const MatrixField& a, const MatrixField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.c0.size(); ++i) m = std::max(m, (a.c0[i] - b.c0[i]).norm());
  return m;
}

Mat2 n_prime(double th) { return offdiag(std::polar(1.0, 0.5 * th), std::polar(1.0, -0.5 * th)); }

}  // namespace

MatrixField phi_infinity(const QuadDifferentialModel& q, GridPtr grid) {
  q.validate();
  const PolarGrid& g = *grid;
  if (!(g.r.front() > 0.0)) throw SingularityError("phi_infinity is singular at r = 0");
  MatrixField out = MatrixField::zeros(grid, FormDegree::one_zero, Symmetry::general);
  for (int k = 0; k < g.rings(); ++k)
    for (int j = 0; j < g.n_theta; ++j) {
      const cd z = std::polar(g.r[k], g.theta(j));
      const cd f = q.f(z), fd = q.fdot(z);
      const double sa = std::sqrt(std::abs(f));
      out.c0[g.node(k, j)] = offdiag(0.5 * fd / sa, 0.5 * sa * fd / f);
    }
  return out;
}

TangentPair infinity_representative(const QuadDifferentialModel& q, GridPtr grid) {
  TangentPair v = TangentPair::zeros(grid);
  v.phi = phi_infinity(q, grid);
  v.label = "infinity";
  return v;
}

TangentPair horizontal_raw(const PainleveTable& table, const QuadDifferentialModel& q, double t,
                           const CutoffSpec& chi, GridPtr grid) {
  q.validate();
  if (!(t > 0.0)) throw DomainError("horizontal_raw requires t > 0");
  const PolarGrid& g = *grid;
  if (!(g.r.front() > 0.0)) throw SingularityError("horizontal variation needs r_min > 0");
  TangentPair v = TangentPair::zeros(grid);
  v.scale = 1.0 / t;
  v.label = "horizontal";
  const Mat2 s = sigma3();
  const int nt = g.n_theta;
  for (int k = 0; k <= g.n_r; ++k)
    for (int j = 0; j < nt; ++j) {
      const int nd = g.node(k, j);
      const double th = g.theta(j);
      if (k < g.n_r) {
        const double rm = 0.5 * (g.r[k] + g.r[k + 1]);
        v.alpha.c0[nd] = (connection_variation(table, q, t, chi, rm, th).first / t) * s;
      }
      v.alpha.c1[nd] =
          (connection_variation(table, q, t, chi, g.r[k], th + 0.5 * g.dtheta).second / t) * s;
      const cd z = std::polar(g.r[k], th);
      const cd f = q.f(z);
      const double a = std::abs(f);
      const CoefficientSample cs = coefficient(table, t, chi, a);
      const double Q = (0.5 + cs.dlog) * (q.fdot(z) / f).real();
      v.phi.c0[nd] = offdiag(std::exp(-cs.lsq) * (q.fdot(z) - f * Q), std::exp(cs.lsq) * Q);
    }
  return v;
}

MatrixField correction_gauge(const PainleveTable& table, const QuadDifferentialModel& q,
                             double t, const CutoffSpec& chi, GridPtr grid) {
  const PolarGrid& g = *grid;
  MatrixField gam = MatrixField::zeros(grid, FormDegree::zero, Symmetry::skew_hermitian);
  for (int k = 0; k <= g.n_r; ++k)
    for (int j = 0; j < g.n_theta; ++j) {
      const cd z = std::polar(g.r[k], g.theta(j));
      const cd f = q.f(z);
      if (std::abs(f) == 0.0) continue;
      const double c = coefficient(table, t, chi, std::abs(f)).c;
      gam.c0[g.node(k, j)] = (-0.5 * c * (q.fdot(z) / f).imag()) * sigma3();
    }
  return gam;
}

TangentPair first_correction(const LinearOp& op, const PainleveTable& table,
                             const QuadDifferentialModel& q) {
  require_same_q(op.pair->q, q);
  const CutoffSpec& chi = op.pair->chi;
  TangentPair raw = horizontal_raw(table, q, op.t, chi, op.grid);
  const MatrixField gam = correction_gauge(table, q, op.t, chi, op.grid);
  TangentPair out = raw - (1.0 / op.t) * apply_D1(op, gam);
  out.scale = raw.scale;
  out.label = raw.label;
  return out;
}

TangentPair radial_tangent(const LinearOp& op, const PainleveTable& table) {
  TangentPair v = first_correction(op, table, op.pair->q.radial());
  v.label = "radial";
  return v;
}

VerticalData vertical_data(const LinearOp& limiting_op, const CutoffSpec& chi, int mode) {
  const PolarGrid& g = *limiting_op.grid;
  if (g.cover_sheets != 2) throw ConfigError("vertical data lives on a double-cover grid");
  if (mode < 0) throw ConfigError("vertical mode must be >= 0");
  const QuadDifferentialModel& q = limiting_op.pair->q;
  if (q.coeffs.size() != 2 || q.coeffs[1] != cd(1.0))
    throw ConfigError("vertical data is implemented for q = z dz^2");
  VerticalData d;
  d.mode = mode;
  d.xi_loc = MatrixField::zeros(limiting_op.grid, FormDegree::zero, Symmetry::skew_hermitian);
  d.xi_inf = d.xi_loc;
  MatrixField outer = d.xi_loc;
  d.eta.grid = limiting_op.grid;
  d.eta.dr.assign(g.nodes(), 0.0);
  d.eta.dtheta.assign(g.nodes(), 0.0);
  const int p = 2 * mode;
  for (int k = 0; k <= g.n_r; ++k)
    for (int j = 0; j < g.n_theta; ++j) {
      const int nd = g.node(k, j);
      const double r = g.r[k], th = g.theta(j);
      const cd w = std::polar(std::sqrt(r), 0.5 * th);
      const cd f = std::pow(w, p);
      const cd F = std::pow(w, p + 1) / double(p + 1);
      const Mat2 x = (4.0 * F.imag()) * kI * n_prime(th);
      const double c = chi(r);
      d.xi_loc.c0[nd] = x;
      d.xi_inf.c0[nd] = c * x;
      outer.c0[nd] = (1.0 - c) * x;
      // dw = (w / 2r) dr + (i w / 2) dtheta.
      d.eta.dr[nd] = 2.0 * kI * (f * w / (2.0 * r)).imag();
      d.eta.dtheta[nd] = 2.0 * kI * (f * kI * w * 0.5).imag();
    }
  d.alpha_inf = TangentPair::zeros(limiting_op.grid);
  d.alpha_inf.alpha = apply_D1(limiting_op, d.xi_loc).alpha;
  d.alpha_inf.label = "vertical infinity";
  d.beta_inf = TangentPair::zeros(limiting_op.grid);
  d.beta_inf.alpha = apply_D1(limiting_op, outer).alpha;
  d.beta_inf.label = "vertical";
  return d;
}

GaugedTangent gauge_fixed(const LinearOp& op, const TangentPair& v0, double tol) {
  GaugedTangent out;
  out.coulomb_before = coulomb_relative(op, v0);
  auto [v, res] = gauge_fix(op, v0, tol);
  out.v = std::move(v);
  out.xi = std::move(res.xi);
  out.coulomb_after = coulomb_relative(op, out.v);
  return out;
}

MixedProbe mixed_inner_probe(const TangentPair& h, const TangentPair& v) {
  MixedProbe m;
  const MetricValue a = l2_inner(h, v);
  const MetricValue b = l2_inner(v, h);
  m.pairing = a.value;
  m.pairing_err = a.err_est;
  m.symmetry_defect = std::abs(a.value - b.value);
  m.pointwise_max = pointwise_inner_max(h, v);
  return m;
}

SweepPoint sweep_point(const PainleveTable& table, double t, const SweepSettings& s) {
  SweepPoint pt;
  pt.t = t;
  auto grid = std::make_shared<const PolarGrid>(
      PolarGrid::scale_covariant(t, s.rho_inner, s.nodes_per_octave, s.n_theta, 2));
  pt.n_r = grid->n_r;

  const QuadDifferentialModel qz({0.0, 1.0}, s.horizontal_dot);
  const HiggsPair app = approximate_solution(table, qz, t, s.chi, grid);
  const LinearOp op = assemble_Lt(app, t);

  const TangentPair h0 = first_correction(op, table, qz);
  const GaugedTangent h = gauge_fixed(op, h0, s.tol);
  const TangentPair h_inf = infinity_representative(qz, grid);
  pt.sup_phi_horizontal = sup_difference(h0.phi, h_inf.phi);
  pt.hh_ref = l2_inner(h_inf, h_inf).value;
  pt.hh = l2_inner(h.v, h.v).value - pt.hh_ref;
  pt.horizontal_coulomb = h.coulomb_after;
  pt.sup_xi_horizontal = sup_norm0(h.xi);

  const TangentPair r0 = radial_tangent(op, table);
  const GaugedTangent rad = gauge_fixed(op, r0, s.tol);
  const TangentPair r_inf = infinity_representative(qz.radial(), grid);
  pt.sup_phi_radial = sup_difference(r0.phi, r_inf.phi);
  pt.rr_ref = l2_inner(r_inf, r_inf).value;
  pt.rr = l2_inner(rad.v, rad.v).value - pt.rr_ref;
  pt.radial_coulomb = rad.coulomb_after;
  pt.rh_ref = l2_inner(r_inf, h_inf).value;
  pt.rh = l2_inner(rad.v, h.v).value - pt.rh_ref;

  const LinearOp lim = assemble_Lt(limiting_configuration(qz, grid), t);
  const VerticalData vd = vertical_data(lim, s.chi, s.vertical_mode);
  const GaugedTangent v = gauge_fixed(op, vd.beta_inf, s.tol);
  pt.vv_ref = l2_inner(vd.alpha_inf, vd.alpha_inf).value;
  pt.vv = l2_inner(v.v, v.v).value - pt.vv_ref;
  pt.vv_semiflat = semiflat_vertical(vd.eta).value;
  pt.vertical_coulomb = v.coulomb_after;
  MatrixField sum = v.xi;
  for (std::size_t i = 0; i < sum.c0.size(); ++i) sum.c0[i] += vd.xi_inf.c0[i];
  pt.sup_xi_vertical = sup_norm0(sum);
  pt.hv = mixed_inner_probe(h.v, v.v);
  pt.rv = mixed_inner_probe(rad.v, v.v);
  return pt;
}

}  // namespace hitchin
