#include "hitchin/gauge_op.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hitchin {

namespace {

// Finite-volume residual of -(1/2)(r k')' + 4 t^2 |c| r^2 sinh(2k) = 0 integrated
// over the control cell of each unknown ring; the flux through the origin is the
// log singularity's -1/2.
std::vector<double> radial_residual(const PolarGrid& g, double t, double abs_c,
                                    const std::vector<double>& k) {
  const int n = g.n_r;
  std::vector<double> res(n);
  auto flux = [&](int i) {  // through face i+1/2, i.e. between rings i and i+1
    return g.face[i + 1] * (k[i + 1] - k[i]) / (g.r[i + 1] - g.r[i]);
  };
  double lower = -0.5;
  for (int i = 0; i < n; ++i) {
    const double upper = flux(i);
    const double o = g.outer_face(i), in = g.face[i];
    res[i] = -0.5 * (upper - lower) + 2.0 * t * t * abs_c * g.r[i] * (o * o - in * in) *
                                          std::sinh(2.0 * k[i]);
    lower = upper;
  }
  return res;
}

std::vector<double> thomas(const Tridiagonal& m, std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  std::vector<double> di = m.diag;
  for (std::size_t i = 1; i < n; ++i) {
    const double w = m.lower[i] / di[i - 1];
    di[i] -= w * m.upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= di[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - m.upper[i] * rhs[i + 1]) / di[i];
  return rhs;
}

// Approximate pair moved by the complex gauge exp(u diag(1,-1)): Higgs entries
// scaled by e^{-u}, e^{u}, connection coefficient shifted by r u'.
HiggsPair gauged_pair(const HiggsPair& app, const std::vector<double>& u) {
  const PolarGrid& g = *app.grid();
  HiggsPair p = app;
  p.kind = PairKind::corrected;
  std::vector<double> du(u.size(), 0.0);
  const int n = g.n_r;
  for (int i = 0; i <= n; ++i) {
    const int a = i == 0 ? 0 : (i == n ? n - 2 : i - 1);
    const int b = a + 1, c = a + 2;
    // Three-point nonuniform derivative at ring i through rings a, b, c.
    const double x = g.r[i], xa = g.r[a], xb = g.r[b], xc = g.r[c];
    du[i] = u[a] * ((x - xb) + (x - xc)) / ((xa - xb) * (xa - xc)) +
            u[b] * ((x - xa) + (x - xc)) / ((xb - xa) * (xb - xc)) +
            u[c] * ((x - xa) + (x - xb)) / ((xc - xa) * (xc - xb));
  }
  const Mat2 s = sigma3();
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j < g.n_theta; ++j) {
      const int nd = g.node(i, j);
      Mat2& phi = p.Phi.c0[nd];
      phi(0, 1) *= std::exp(-u[i]);
      phi(1, 0) *= std::exp(u[i]);
      const auto [wr, wth] = im_dbar_log_abs(app.q, g.r[i], g.theta(j));
      p.A.c0[nd] += (g.r[i] * du[i] * wr) * s;
      p.A.c1[nd] += (g.r[i] * du[i] * wth) * s;
    }
  return p;
}

}  // namespace

NewtonReport newton_correct(const PainleveTable& table, const HiggsPair& approximate,
                            double tol, int max_iter) {
  const PolarGrid& g = *approximate.grid();
  const QuadDifferentialModel& q = approximate.q;
  if (q.coeffs.size() != 2) throw ConfigError("newton_correct needs q = c z dz^2");
  if (g.cover_sheets != 1) throw ConfigError("newton_correct runs on a single-sheet grid");
  if (!(g.r.front() > 0.0)) throw ConfigError("newton_correct needs r_min > 0");
  if (g.n_r < 3) throw ConfigError("newton_correct needs at least 3 unknown rings");
  const double t = approximate.t;
  const double abs_c = std::abs(q.coeffs[1]);
  const double scale = std::cbrt(abs_c);
  const int n = g.n_r;

  NewtonReport rep;
  rep.k_approximate.resize(n + 1);
  std::vector<double> k_ref(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double a = abs_c * g.r[i];
    rep.k_approximate[i] = approximate.chi(a) * profile_eval(table, t, a).h;
    k_ref[i] = profile_eval(table, t, scale * g.r[i]).h;
  }
  const std::vector<double> target = radial_residual(g, t, abs_c, k_ref);

  std::vector<double> k = rep.k_approximate;
  std::vector<double> u(n + 1, 0.0);
  auto defect = [&]() {
    std::vector<double> r = radial_residual(g, t, abs_c, k);
    double mx = 0.0;
    for (int i = 0; i < n; ++i) {
      r[i] -= target[i];
      mx = std::max(mx, std::abs(r[i]));
    }
    return std::make_pair(r, mx);
  };
  auto [res, mx] = defect();
  rep.residuals.push_back(mx);
  int it = 0;
  while (it == 0 || mx > tol) {
    if (it == max_iter) {
      std::ostringstream os;
      os << "newton_correct: no convergence after " << max_iter << " iterations, residual "
         << mx;
      throw SolverError(os.str());
    }
    const LinearOp op = assemble_Lt(gauged_pair(approximate, u), t);
    const Tridiagonal jac = radial_block(op);
    std::vector<double> rhs(res.begin(), res.begin() + n);
    for (double& v : rhs) v = -v;
    const std::vector<double> step = thomas(jac, rhs);
    for (int i = 0; i < n; ++i) {
      k[i] += step[i];
      u[i] = k[i] - rep.k_approximate[i];
    }
    ++it;
    std::tie(res, mx) = defect();
    rep.residuals.push_back(mx);
  }
  rep.iterations = it;
  rep.k_corrected = k;
  rep.corrected = gauged_pair(approximate, u);
  rep.gamma = MatrixField::zeros(approximate.grid(), FormDegree::zero, Symmetry::hermitian);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j < g.n_theta; ++j) {
      Mat2 m = Mat2::Zero();
      m(0, 0) = u[i];
      m(1, 1) = -u[i];
      rep.gamma.c0[g.node(i, j)] = m;
    }
  double dist = 0.0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j < g.n_theta; ++j) {
      const int nd = g.node(i, j);
      dist = std::max({dist, (rep.corrected.Phi.c0[nd] - approximate.Phi.c0[nd]).norm(),
                       (rep.corrected.A.c0[nd] - approximate.A.c0[nd]).norm(),
                       (rep.corrected.A.c1[nd] - approximate.A.c1[nd]).norm() / g.r[i]});
    }
  rep.distance = dist;
  return rep;
}

}  // namespace hitchin
