#include "hitchin/model_fields.hpp"

#include <doctest.h>

#include <cmath>

using namespace hitchin;

namespace {
GridPtr graded(int n_r, int n_theta, double grading = 1.0, int sheets = 1) {
  return std::make_shared<PolarGrid>(PolarGrid::graded(n_r, n_theta, grading, 1.0, sheets));
}
}  // namespace

TEST_SUITE("model_fields") {

TEST_CASE("su(2) basis is orthogonal and the exponential is unitary") {
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      CHECK(inner(su2_basis(a), su2_basis(b)) == doctest::Approx(a == b ? 2.0 : 0.0));
  const Vec3 c(0.3, -1.2, 0.7);
  CHECK((su2_coords(su2_from(c)) - c).norm() < 1e-15);
  const Mat2 u = su2_exp(su2_from(c));
  CHECK((u * u.adjoint() - Mat2::Identity()).norm() < 1e-14);
  CHECK(std::abs(u.determinant() - 1.0) < 1e-14);
  const Eigen::Matrix3d R = adjoint_rotation(u);
  CHECK((R.transpose() * R - Eigen::Matrix3d::Identity()).norm() < 1e-13);
}

TEST_CASE("graded grid tiles the disk") {
  const PolarGrid g = PolarGrid::graded(40, 16, 2.0);
  CHECK(g.r.back() == 1.0);
  CHECK(g.face[0] == 0.0);
  double area = 0.0;
  for (int k = 0; k < g.rings(); ++k) area += g.cell_area(k) * g.n_theta;
  CHECK(area == doctest::Approx(kPi).epsilon(1e-13));
  for (int k = 1; k < g.rings(); ++k) REQUIRE(g.r[k] > g.r[k - 1]);
}

TEST_CASE("logarithmic grid ring count") {
  const PolarGrid g = PolarGrid::logarithmic(1.0 / 64.0, 4, 8);
  CHECK(g.n_r == 24);
  CHECK(g.r[g.n_r - 4] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("grid configuration errors") {
  CHECK_THROWS_AS(PolarGrid::graded(2, 8), ConfigError);
  CHECK_THROWS_AS(PolarGrid::graded(8, 7), ConfigError);
  CHECK_THROWS_AS(PolarGrid::graded(8, 8, 0.5), ConfigError);
  CHECK_THROWS_AS(PolarGrid::logarithmic(2.0, 4, 8), ConfigError);
}

TEST_CASE("quadratic differential model") {
  CHECK_THROWS_AS(QuadDifferentialModel({1.0, 1.0}, {1.0}), ConfigError);
  CHECK_THROWS_AS(QuadDifferentialModel({0.0, 0.0}, {1.0}), ConfigError);
  const QuadDifferentialModel q({0.0, 2.0, 1.0}, {1.0, 3.0});
  CHECK(std::abs(q.f(cd(0.5, 0.5)) - cd(0.5, 0.5) * (2.0 + cd(0.5, 0.5))) < 1e-15);
  CHECK(std::abs(q.fp(0.25) - 2.5) < 1e-15);
  CHECK(std::abs(q.fdotp(0.25) - 3.0) < 1e-15);
  CHECK(std::abs(q.radial().fdot(0.3) - q.f(0.3)) < 1e-15);
  // int |z| dA = 2 pi / 3 over the unit disk
  CHECK(std::abs(QuadDifferentialModel{}.normalized().coeffs[1]) ==
        doctest::Approx(1.5 / kPi).epsilon(1e-6));
}

TEST_CASE("cutoff") {
  const CutoffSpec chi;
  CHECK(chi(0.1) == 1.0);
  CHECK(chi(0.9) == 0.0);
  double prev = 1.0;
  for (int i = 0; i <= 100; ++i) {
    const double x = 0.6 + 0.3 * i / 100.0;
    REQUIRE(chi(x) <= prev + 1e-15);
    prev = chi(x);
    const double h = 1e-6;
    REQUIRE(std::abs(chi.derivative(x) - (chi(x + h) - chi(x - h)) / (2 * h)) < 1e-5);
  }
  CHECK(CutoffSpec::none()(0.99) == 1.0);
  CHECK_THROWS_AS((CutoffSpec{0.9, 0.5, true}.validate(1.0)), ConfigError);
}

TEST_CASE("limiting configuration") {
  const QuadDifferentialModel q;
  const GridPtr g = graded(48, 32, 1.0, 2);
  const HiggsPair p = limiting_configuration(q, g);
  CHECK(check_field(p.A).ok());
  CHECK(check_field(p.Phi).max_trace < 1e-14);
  // On the double cover of q = z the limiting Higgs field is single valued.
  CHECK(equivariance_defect(p.Phi, 1) < 1e-12);
  CHECK_THROWS_AS(limiting_configuration(q, std::make_shared<PolarGrid>(
                                                PolarGrid::graded(8, 8, 1.0, 1.0, 1, true))),
                  SingularityError);
  CHECK_THROWS_AS(equivariance_defect(limiting_configuration(q, graded(8, 8)).Phi, 1), ConfigError);
}

TEST_CASE("fiducial residual converges at second order") {
  const PainleveTable& table = default_table();
  ResidualReport coarse, fine;
  for (int n : {32, 64}) {
    const ResidualReport r = hitchin_residual(fiducial_solution(table, 2.0, graded(n, n, 2.0)), 2.0);
    (n == 32 ? coarse : fine) = r;
  }
  CHECK(std::log2(coarse.l2_moment / fine.l2_moment) > 1.9);
  CHECK(std::log2(coarse.l2_holo / fine.l2_holo) > 1.9);
  CHECK_THROWS_AS(fiducial_solution(table, 0.0, graded(8, 8)), DomainError);
}

TEST_CASE("approximate pair is exact away from the cutoff annulus") {
  const ResidualDefect d = approximate_residual_defect(default_table(), QuadDifferentialModel{},
                                                       4.0, CutoffSpec{}, graded(128, 32, 2.0));
  CHECK(d.sup_inner < 1e-10);
  CHECK(d.sup_outer < 1e-10);
  CHECK(d.sup_annulus > 0.0);
}

TEST_CASE("tangent pair arithmetic") {
  const GridPtr g = graded(8, 8);
  TangentPair a = TangentPair::zeros(g);
  a.phi.c0[3] = sigma3();
  const TangentPair b = 2.0 * a - a + a;
  CHECK((b.phi.c0[3] - 2.0 * sigma3()).norm() == 0.0);
  CHECK_THROWS_AS(a + TangentPair::zeros(graded(8, 8)), ConfigError);
}

}
