#include "hitchin/deformations.hpp"

#include <doctest.h>

#include <cmath>

using namespace hitchin;

TEST_SUITE("deformations") {

TEST_CASE("limit of the horizontal variation has the special Kaehler norm") {
  const GridPtr g = std::make_shared<PolarGrid>(PolarGrid::graded(128, 64, 2.0));
  const TangentPair v = infinity_representative(QuadDifferentialModel{}, g);
  CHECK(l2_inner(v, v).value == doctest::Approx(1.571385597).epsilon(1e-8));
  CHECK(l2_inner(v, v).value == doctest::Approx(kPi / 2).epsilon(1e-3));
}

TEST_CASE("correction gauge is skew-hermitian and diagonal") {
  const GridPtr g = std::make_shared<PolarGrid>(PolarGrid::graded(16, 16, 2.0));
  const QuadDifferentialModel q({0.0, 1.0}, {cd(0.3, 0.7)});
  const MatrixField gam = correction_gauge(default_table(), q, 4.0, CutoffSpec{}, g);
  CHECK(check_field(gam).ok());
  for (const Mat2& m : gam.c0) REQUIRE(std::abs(m(0, 1)) == 0.0);
}

TEST_CASE("one sweep point") {
  SweepSettings s;
  s.nodes_per_octave = 6;
  s.n_theta = 32;
  const SweepPoint p = sweep_point(default_table(), 8.0, s);
  CHECK(p.rv.pairing == 0.0);
  CHECK(p.hv.pairing == 0.0);
  CHECK(std::abs(p.rr) < 0.01 * p.rr_ref);
  CHECK(p.radial_coulomb < 1e-8);
  CHECK(p.vertical_coulomb < 1e-8);
  CHECK(p.vv_semiflat == doctest::Approx(p.vv_ref).epsilon(1e-2));
}

TEST_CASE("radial and horizontal first corrections share the operator") {
  const GridPtr g = std::make_shared<PolarGrid>(PolarGrid::graded(48, 16, 2.0));
  const QuadDifferentialModel q;
  const HiggsPair p = approximate_solution(default_table(), q, 4.0, CutoffSpec{}, g);
  const LinearOp op = assemble_Lt(p, 4.0);
  const TangentPair r = radial_tangent(op, default_table());
  const TangentPair h = first_correction(op, default_table(), q.radial());
  double d = 0.0;
  for (std::size_t i = 0; i < r.phi.c0.size(); ++i) d = std::max(d, (r.phi.c0[i] - h.phi.c0[i]).norm());
  CHECK(d < 1e-14);
}

}
