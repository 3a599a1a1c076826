#include "hitchin/gauge_op.hpp"
#include "hitchin/metrics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hitchin;

namespace {
struct Fixture {
  GridPtr grid = std::make_shared<PolarGrid>(PolarGrid::graded(48, 32, 2.0));
  HiggsPair pair = approximate_solution(default_table(), QuadDifferentialModel{}, 4.0,
                                        CutoffSpec{}, grid);
  LinearOp op = assemble_Lt(pair, 4.0);

  MatrixField random_xi(unsigned seed) const {
    std::mt19937 rng(seed);
    std::normal_distribution<double> n;
    MatrixField xi = MatrixField::zeros(grid, FormDegree::zero, Symmetry::skew_hermitian);
    for (int i = 0; i < op.unknown_nodes(); ++i) xi.c0[i] = su2_from(Vec3(n(rng), n(rng), n(rng)));
    return xi;
  }
};
}  // namespace

TEST_SUITE("gauge_op") {

TEST_CASE("assembled operator is symmetric and positive") {
  const Fixture f;
  const Eigen::SparseMatrix<double> asym = f.op.K - Eigen::SparseMatrix<double>(f.op.K.transpose());
  CHECK(asym.norm() < 1e-12 * f.op.K.norm());
  CHECK(smallest_eigenvalue(f.op).lambda_min > 0.0);
}

TEST_CASE("solve inverts apply") {
  const Fixture f;
  const MatrixField rhs = f.random_xi(3);
  const GaugeSolveResult s = solve_Lt(f.op, rhs);
  const MatrixField back = apply_Lt(f.op, s.xi);
  double err = 0.0;
  for (int i = 0; i < f.op.unknown_nodes(); ++i) err = std::max(err, (back.c0[i] - rhs.c0[i]).norm());
  CHECK(err < 1e-8);
  for (int i = f.op.unknown_nodes(); i < f.grid->nodes(); ++i) REQUIRE(s.xi.c0[i].norm() == 0.0);
}

TEST_CASE("Coulomb residual is the adjoint of D1") {
  const Fixture f;
  const MatrixField xi = f.random_xi(5);
  const TangentPair d = apply_D1(f.op, xi);
  const EnergySplit e = energy_identity(f.op, xi);
  CHECK(l2_inner(d, d).value / kMetricScale == doctest::Approx(e.quadratic_form).epsilon(1e-9));
}

TEST_CASE("energy identity for a smooth field") {
  double prev = 0.0, order = 0.0;
  for (int n : {32, 64}) {
    const GridPtr g = std::make_shared<PolarGrid>(PolarGrid::graded(n, n, 2.0));
    const LinearOp op = assemble_Lt(
        approximate_solution(default_table(), QuadDifferentialModel{}, 4.0, CutoffSpec{}, g), 4.0);
    MatrixField xi = MatrixField::zeros(g, FormDegree::zero, Symmetry::skew_hermitian);
    for (int k = 0; k < g->n_r; ++k)
      for (int j = 0; j < g->n_theta; ++j) {
        const double r = g->r[k], th = g->theta(j), b = 1.0 - r * r;
        xi.c0[g->node(k, j)] = su2_from(Vec3(b * r * std::cos(th), b * r * r * std::sin(2 * th), b));
      }
    const EnergySplit e = energy_identity(op, xi);
    const double rel = std::abs((e.gradient + e.potential) / e.quadratic_form - 1.0);
    CHECK(rel < 1e-3);
    if (prev > 0.0) order = std::log2(prev / rel);
    prev = rel;
  }
  CHECK(order > 1.5);
}

TEST_CASE("gauge fixing lands in Coulomb gauge and is idempotent") {
  const Fixture f;
  TangentPair v = apply_D1(f.op, f.random_xi(9));
  v.phi.c0[100] += f.random_xi(11).c0[100];
  const auto [fixed, res] = gauge_fix(f.op, v);
  CHECK(coulomb_relative(f.op, fixed) < 1e-9);
  const auto again = gauge_fix(f.op, fixed).first;
  CHECK(l2_norm0(gauge_fix(f.op, fixed).second.xi) < 1e-9 * l2_norm0(res.xi));
  CHECK(again.gauged);
}

TEST_CASE("potential action vanishes on the commutant") {
  CHECK(potential_action(sigma3(), 3.0, sigma3()).norm() == 0.0);
  CHECK(potential_action(offdiag(1.0, 0.0), 2.0, su2_basis(0)).norm() > 0.0);
}

TEST_CASE("Green's function scaling") {
  // At t = 16 the packet solution has decayed long before the Dirichlet ring.
  const GreenScalingReport r =
      verify_green_scaling(default_table(), 16.0, std::pow(2.0, 1.5), PacketSpec{}, 12, 16);
  CHECK(r.deviation < 1e-6);
  CHECK(r.inverse_norm_tp <= r.inverse_norm_t);
  CHECK(r.shared_nodes > 0);
}

TEST_CASE("Newton correction converges") {
  const GridPtr g = std::make_shared<PolarGrid>(PolarGrid::graded(128, 16, 2.0));
  const HiggsPair p = approximate_solution(default_table(), QuadDifferentialModel{}, 4.0,
                                           CutoffSpec{}, g);
  const NewtonReport n = newton_correct(default_table(), p);
  REQUIRE(n.residuals.size() >= 3);
  CHECK(n.residuals.back() < 1e-12);
  CHECK(n.residuals[1] < n.residuals[0] * n.residuals[0] * 1e3 + 1e-13);
  CHECK(n.corrected.kind == PairKind::corrected);
  CHECK(n.distance > 0.0);
}

}
