#include "hitchin/gauge_op.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace hitchin {

namespace {

using Triplet = Eigen::Triplet<double>;

// Pairing weights of edge coefficient fields: area for dr, area / r^2 for dtheta.
double radial_edge_area(const PolarGrid& g, int k) {
  return g.face[k + 1] * g.dtheta * (g.r[k + 1] - g.r[k]);
}
double angular_edge_area(const PolarGrid& g, int k) { return g.width(k) * g.r[k] * g.dtheta; }

Eigen::Matrix3d potential_matrix(const Mat2& phi) {
  Mat2 br[3];
  for (int a = 0; a < 3; ++a) br[a] = bracket(phi, su2_basis(a));
  Eigen::Matrix3d b;
  for (int a = 0; a < 3; ++a)
    for (int c = 0; c < 3; ++c) b(a, c) = inner(br[a], br[c]);
  return b;
}

}  // namespace

const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>& LinearOp::factor() const {
  if (!factor_) {
    auto f = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    f->compute(K);
    if (f->info() != Eigen::Success) throw SolverError("sparse factorization of L_t failed");
    factor_ = std::move(f);
  }
  return *factor_;
}

Mat2 potential_action(const Mat2& phi, double t, const Mat2& xi) {
  // Energy density 2 |dz|^2 t^2 Tr([phi, xi][phi, xi]^*) against mass density 2 |xi|^2.
  const Vec3 c = su2_coords(xi);
  const Vec3 x = kDzNorm2 * t * t * (potential_matrix(phi) * c);
  return su2_from(x);
}

LinearOp assemble_Lt(const HiggsPair& pair, double t) {
  LinearOp op;
  op.grid = pair.grid();
  op.t = t;
  op.kind = pair.kind;
  op.pair = std::make_shared<const HiggsPair>(pair);
  const PolarGrid& g = *op.grid;
  const int nt = g.n_theta, nr = g.n_r;
  const int n = op.size();
  op.mass.resize(n);
  op.radial_transport.resize(static_cast<std::size_t>(nr) * nt);
  op.angular_transport.resize(static_cast<std::size_t>(g.rings()) * nt);

  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(n) * 21);
  auto add_block = [&](int na, int nb, const Eigen::Matrix3d& m) {
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        if (m(a, b) != 0.0) trip.emplace_back(3 * na + a, 3 * nb + b, m(a, b));
  };
  auto add_edge = [&](int tail, int head, double w, const Mat2& u, bool head_free) {
    const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
    const Eigen::Matrix3d rot = adjoint_rotation(u);
    add_block(tail, tail, 2.0 * w * id);
    if (head_free) {
      add_block(head, head, 2.0 * w * id);
      add_block(tail, head, -2.0 * w * rot);
      add_block(head, tail, -2.0 * w * rot.transpose());
    }
  };

  const double t2 = t * t;
  for (int k = 0; k <= nr; ++k) {
    for (int j = 0; j < nt; ++j) {
      const int nd = g.node(k, j);
      if (k < nr) {
        const int up = g.node(k + 1, j);
        const double len = g.r[k + 1] - g.r[k];
        const Mat2 u = su2_exp(0.5 * (pair.A.c0[nd] + pair.A.c0[up]) * len);
        op.radial_transport[nd] = u;
        add_edge(nd, up, radial_edge_area(g, k) / (len * len), u, k + 1 < nr);
      }
      const int nx = g.node(k, (j + 1) % nt);
      const Mat2 u = su2_exp(0.5 * (pair.A.c1[nd] + pair.A.c1[nx]) * g.dtheta);
      op.angular_transport[nd] = u;
      if (k < nr) {
        const double w = angular_edge_area(g, k) / (g.r[k] * g.r[k] * g.dtheta * g.dtheta);
        add_edge(nd, nx, w, u, true);
        const double vol = g.cell_area(k);
        add_block(nd, nd, vol * 2.0 * kDzNorm2 * t2 * potential_matrix(pair.Phi.c0[nd]));
        for (int a = 0; a < 3; ++a) op.mass[3 * nd + a] = 2.0 * vol;
      }
    }
  }
  op.K.resize(n, n);
  op.K.setFromTriplets(trip.begin(), trip.end());
  return op;
}

namespace {

Eigen::VectorXd coords_of(const LinearOp& op, const MatrixField& xi) {
  Eigen::VectorXd c(op.size());
  for (int nd = 0; nd < op.unknown_nodes(); ++nd) c.segment<3>(3 * nd) = su2_coords(xi.c0[nd]);
  return c;
}

MatrixField field_of(const LinearOp& op, const Eigen::VectorXd& c) {
  MatrixField xi = MatrixField::zeros(op.grid, FormDegree::zero, Symmetry::skew_hermitian);
  for (int nd = 0; nd < op.unknown_nodes(); ++nd) xi.c0[nd] = su2_from(c.segment<3>(3 * nd));
  return xi;
}

// Weak form f = (D^1)^* v paired against the coordinate basis.
Eigen::VectorXd adjoint_weak(const LinearOp& op, const TangentPair& v) {
  const PolarGrid& g = *op.grid;
  const HiggsPair& pair = *op.pair;
  const int nt = g.n_theta, nr = g.n_r;
  Eigen::VectorXd f = Eigen::VectorXd::Zero(op.size());
  Mat2 e[3];
  for (int a = 0; a < 3; ++a) e[a] = su2_basis(a);
  auto edge = [&](int tail, int head, bool head_free, double coef, const Mat2& u,
                  const Mat2& alpha) {
    const Mat2 ad = alpha.adjoint();
    for (int a = 0; a < 3; ++a) {
      f[3 * tail + a] -= coef * (e[a] * ad).trace().real();
      if (head_free) f[3 * head + a] += coef * (u * e[a] * u.adjoint() * ad).trace().real();
    }
  };
  for (int k = 0; k < nr; ++k) {
    for (int j = 0; j < nt; ++j) {
      const int nd = g.node(k, j);
      const double len = g.r[k + 1] - g.r[k];
      edge(nd, g.node(k + 1, j), k + 1 < nr, radial_edge_area(g, k) / len,
           op.radial_transport[nd], v.alpha.c0[nd]);
      edge(nd, g.node(k, (j + 1) % nt), true,
           angular_edge_area(g, k) / (g.r[k] * g.r[k] * g.dtheta), op.angular_transport[nd],
           v.alpha.c1[nd]);
      const double vol = g.cell_area(k);
      const Mat2& phi = pair.Phi.c0[nd];
      const Mat2 pv = v.phi.c0[nd].adjoint();
      for (int a = 0; a < 3; ++a)
        f[3 * nd + a] += vol * 2.0 * kDzNorm2 * op.t * (bracket(phi, e[a]) * pv).trace().real();
    }
  }
  return f;
}

double tangent_norm2(const TangentPair& v) {
  const PolarGrid& g = *v.grid();
  double s = 0.0;
  for (int k = 0; k < g.n_r; ++k)
    for (int j = 0; j < g.n_theta; ++j)
      s += radial_edge_area(g, k) * norm2(v.alpha.c0[g.node(k, j)]);
  for (int k = 0; k <= g.n_r; ++k)
    for (int j = 0; j < g.n_theta; ++j) {
      const int nd = g.node(k, j);
      s += angular_edge_area(g, k) / (g.r[k] * g.r[k]) * norm2(v.alpha.c1[nd]);
      s += 2.0 * kDzNorm2 * g.cell_area(k) * norm2(v.phi.c0[nd]);
    }
  return s;
}

}  // namespace

MatrixField apply_Lt(const LinearOp& op, const MatrixField& xi) {
  const Eigen::VectorXd c = coords_of(op, xi);
  const Eigen::VectorXd y = (op.K * c).cwiseQuotient(op.mass);
  return field_of(op, y);
}

GaugeSolveResult solve_Lt(const LinearOp& op, const MatrixField& rhs, double tol) {
  const Eigen::VectorXd b = coords_of(op, rhs).cwiseProduct(op.mass);
  GaugeSolveResult res;
  const double bnorm = std::sqrt(b.cwiseAbs2().cwiseQuotient(op.mass).sum());
  if (bnorm == 0.0) {
    res.xi = MatrixField::zeros(op.grid, FormDegree::zero, Symmetry::skew_hermitian);
    return res;
  }
  const auto& fac = op.factor();
  Eigen::VectorXd c = fac.solve(b);
  std::ostringstream trace;
  double rel = 0.0;
  for (int it = 0; it < 4; ++it) {
    const Eigen::VectorXd r = b - op.K * c;
    rel = std::sqrt(r.cwiseAbs2().cwiseQuotient(op.mass).sum()) / bnorm;
    trace << " step " << it << ": " << rel;
    res.iterations = it;
    if (rel <= tol) break;
    c += fac.solve(r);
  }
  if (!(rel <= tol)) throw SolverError("solve_Lt did not reach tolerance;" + trace.str());
  res.residual_norm = rel;
  res.xi = field_of(op, c);
  return res;
}

TangentPair apply_D1(const LinearOp& op, const MatrixField& xi) {
  const PolarGrid& g = *op.grid;
  const HiggsPair& pair = *op.pair;
  const int nt = g.n_theta, nr = g.n_r;
  TangentPair out = TangentPair::zeros(op.grid);
  // Boundary-ring values are used as given (zero for solver output).
  auto val = [&](int k, int j) -> Mat2 { return xi.c0[g.node(k, j)]; };
  for (int k = 0; k <= nr; ++k)
    for (int j = 0; j < nt; ++j) {
      const int nd = g.node(k, j);
      const Mat2 x = val(k, j);
      if (k < nr) {
        const Mat2& u = op.radial_transport[nd];
        out.alpha.c0[nd] = (u * val(k + 1, j) * u.adjoint() - x) / (g.r[k + 1] - g.r[k]);
      }
      const Mat2& u = op.angular_transport[nd];
      out.alpha.c1[nd] = (u * val(k, (j + 1) % nt) * u.adjoint() - x) / g.dtheta;
      out.phi.c0[nd] = op.t * bracket(pair.Phi.c0[nd], x);
    }
  return out;
}

MatrixField coulomb_residual(const LinearOp& op, const TangentPair& v) {
  if (v.grid() != op.grid) throw ConfigError("tangent pair and operator on different grids");
  const Eigen::VectorXd f = adjoint_weak(op, v);
  return field_of(op, f.cwiseQuotient(op.mass));
}

MatrixField coulomb_residual(const HiggsPair& pair, const TangentPair& v) {
  return coulomb_residual(assemble_Lt(pair, pair.t), v);
}

double coulomb_relative(const LinearOp& op, const TangentPair& v) {
  const Eigen::VectorXd f = adjoint_weak(op, v);
  const double res = std::sqrt(f.cwiseAbs2().cwiseQuotient(op.mass).sum());
  double opn = 0.0;
  for (int i = 0; i < op.size(); ++i) opn = std::max(opn, op.K.coeff(i, i) / op.mass[i]);
  const double vn = std::sqrt(tangent_norm2(v));
  if (vn == 0.0) return 0.0;
  return res / (std::sqrt(opn) * vn);
}

std::pair<TangentPair, GaugeSolveResult> gauge_fix(const LinearOp& op, const TangentPair& v,
                                                   double tol) {
  const Eigen::VectorXd f = adjoint_weak(op, v);
  const MatrixField rhs = field_of(op, f.cwiseQuotient(op.mass));
  GaugeSolveResult res = solve_Lt(op, rhs, tol);
  TangentPair out = v - apply_D1(op, res.xi);
  out.gauged = true;
  out.scale = v.scale;
  out.label = v.label;
  return {std::move(out), std::move(res)};
}

std::pair<TangentPair, GaugeSolveResult> gauge_fix(const HiggsPair& pair, const TangentPair& v,
                                                   double tol) {
  return gauge_fix(assemble_Lt(pair, pair.t), v, tol);
}

double l2_norm0(const MatrixField& xi) {
  const PolarGrid& g = *xi.grid;
  double s = 0.0;
  for (int k = 0; k <= g.n_r; ++k)
    for (int j = 0; j < g.n_theta; ++j) s += g.cell_area(k) * norm2(xi.c0[g.node(k, j)]);
  return std::sqrt(s);
}

double sup_norm0(const MatrixField& xi) {
  double s = 0.0;
  for (const Mat2& m : xi.c0) s = std::max(s, m.norm());
  return s;
}

EnergySplit energy_identity(const LinearOp& op, const MatrixField& xi) {
  const PolarGrid& g = *op.grid;
  const HiggsPair& pair = *op.pair;
  EnergySplit e{};
  const Eigen::VectorXd c = coords_of(op, xi);
  e.quadratic_form = c.dot(op.K * c);
  MatrixField full = xi;
  for (int j = 0; j < g.n_theta; ++j) full.c0[g.node(g.n_r, j)] = Mat2::Zero();
  const auto dr = radial_derivative(g, full.c0);
  const auto dth = angular_derivative(g, full.c0);
  for (int k = 0; k <= g.n_r; ++k)
    for (int j = 0; j < g.n_theta; ++j) {
      const int nd = g.node(k, j);
      const Mat2& x = full.c0[nd];
      const Mat2 cr = dr[nd] + bracket(pair.A.c0[nd], x);
      const Mat2 ct = dth[nd] + bracket(pair.A.c1[nd], x);
      const double vol = g.cell_area(k);
      e.gradient += vol * (norm2(cr) + norm2(ct) / (g.r[k] * g.r[k]));
      e.potential += vol * 2.0 * kDzNorm2 * norm2(op.t * bracket(pair.Phi.c0[nd], x));
    }
  return e;
}

SpectrumEstimate smallest_eigenvalue(const LinearOp& op, int steps, unsigned seed) {
  // Lanczos on S = M^{1/2} K^{-1} M^{1/2}; its top eigenvalue is 1 / lambda_min.
  const int n = op.size();
  const Eigen::VectorXd sq = op.mass.cwiseSqrt();
  const auto& fac = op.factor();
  steps = std::min(steps, n);
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd Q(n, steps + 1);
  Eigen::VectorXd q(n);
  for (int i = 0; i < n; ++i) q[i] = nd(rng);
  q.normalize();
  Q.col(0) = q;
  std::vector<double> alpha, beta;
  int m = 0;
  for (; m < steps; ++m) {
    Eigen::VectorXd w = sq.cwiseProduct(fac.solve(Eigen::VectorXd(sq.cwiseProduct(Q.col(m)))));
    const double a = Q.col(m).dot(w);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i <= m; ++i) w -= Q.col(i).dot(w) * Q.col(i);
    const double b = w.norm();
    if (b < 1e-14 * std::abs(a)) {
      ++m;
      break;
    }
    beta.push_back(b);
    Q.col(m + 1) = w / b;
  }
  const int dim = static_cast<int>(alpha.size());
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    T(i, i) = alpha[i];
    if (i + 1 < dim) T(i, i + 1) = T(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  return {1.0 / es.eigenvalues().maxCoeff(), dim};
}

void dump_operator_triplets(const LinearOp& op, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot write operator dump: " + path);
  std::fprintf(fp, "# row col value (K; mass on the diagonal block follows)\n");
  for (int c = 0; c < op.K.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(op.K, c); it; ++it)
      std::fprintf(fp, "%ld %ld %.17g\n", static_cast<long>(it.row()),
                   static_cast<long>(it.col()), it.value());
  std::fprintf(fp, "# mass\n");
  for (int i = 0; i < op.size(); ++i) std::fprintf(fp, "%d %d %.17g\n", i, i, op.mass[i]);
  if (std::fclose(fp) != 0) throw std::runtime_error("error closing operator dump: " + path);
}

Tridiagonal radial_block(const LinearOp& op) {
  const PolarGrid& g = *op.grid;
  const int nr = g.n_r, nt = g.n_theta;
  Tridiagonal tri;
  tri.lower.assign(nr, 0.0);
  tri.diag.assign(nr, 0.0);
  tri.upper.assign(nr, 0.0);
  const double scale = 1.0 / (8.0 * kPi);
  for (int c = 0; c < op.K.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(op.K, c); it; ++it) {
      if (it.row() % 3 != 2 || it.col() % 3 != 2) continue;
      const int kr = static_cast<int>(it.row() / 3) / nt;
      const int kc = static_cast<int>(it.col() / 3) / nt;
      const double v = it.value() * scale;
      if (kr == kc) tri.diag[kr] += v;
      else if (kc == kr + 1) tri.upper[kr] += v;
      else if (kc == kr - 1) tri.lower[kr] += v;
    }
  (void)nr;
  return tri;
}

GreenScalingReport verify_green_scaling(const PainleveTable& table, double t, double factor,
                                        const PacketSpec& packet, int nodes_per_octave,
                                        int n_theta, double rho_inner) {
  if (!(factor >= 1.0)) throw ConfigError("green scaling needs factor >= 1");
  GreenScalingReport rep;
  rep.t = t;
  rep.factor = factor;
  const double tp = factor * t;
  auto solve_at = [&](double tt, GridPtr& grid_out) {
    auto grid =
        std::make_shared<const PolarGrid>(PolarGrid::scale_covariant(tt, rho_inner, nodes_per_octave, n_theta));
    const HiggsPair pair = fiducial_solution(table, tt, grid);
    const LinearOp op = assemble_Lt(pair, tt);
    MatrixField rhs = MatrixField::zeros(grid, FormDegree::zero, Symmetry::skew_hermitian);
    const double sc = std::pow(tt, 2.0 / 3.0);
    for (int k = 0; k < grid->rings(); ++k)
      for (int j = 0; j < n_theta; ++j) {
        const cd w = sc * std::polar(grid->r[k], grid->theta(j));
        const double prof = std::exp(-std::pow(std::abs(w), packet.power));
        rhs.c0[grid->node(k, j)] = prof * (1.0 + packet.mix * w.real()) * sigma3();
      }
    GaugeSolveResult res = solve_Lt(op, rhs, 1e-10);
    for (auto& m : res.xi.c0) m *= std::pow(tt, 4.0 / 3.0);
    grid_out = grid;
    return std::make_pair(res.xi, 1.0 / smallest_eigenvalue(op).lambda_min);
  };
  GridPtr g1, g2;
  auto [u1, n1] = solve_at(t, g1);
  auto [u2, n2] = solve_at(tp, g2);
  rep.inverse_norm_t = n1;
  rep.inverse_norm_tp = n2;
  // Ring k of the t grid corresponds to ring k of the t' grid in the scaled variable.
  const double ratio = std::pow(factor, 2.0 / 3.0);
  double dev = 0.0, ref = 0.0;
  int shared = 0;
  for (int k = 0; k < g1->n_r; ++k) {
    if (std::abs(g2->r[k] * ratio - g1->r[k]) > 1e-9 * g1->r[k])
      throw ConfigError("green scaling grids do not share scaled rings; use factor 2^{3p/(2m)}");
    for (int j = 0; j < n_theta; ++j) {
      const int nd = g1->node(k, j);
      dev = std::max(dev, (u1.c0[nd] - u2.c0[nd]).norm());
      ref = std::max(ref, u1.c0[nd].norm());
      ++shared;
    }
  }
  rep.deviation = ref > 0.0 ? dev / ref : 0.0;
  rep.shared_nodes = shared;
  return rep;
}

}  // namespace hitchin
