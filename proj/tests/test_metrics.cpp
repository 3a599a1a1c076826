#include "hitchin/metrics.hpp"

#include <doctest.h>

#include <cmath>

using namespace hitchin;

TEST_SUITE("metrics") {

TEST_CASE("radial quadrature integrates the leading power exactly") {
  const RadialQuadrature q = RadialQuadrature::graded(64, 2.0, 1.0, -0.5);
  double s = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i)
    if (q.nodes[i] > 0.0) s += q.weights[i] / std::sqrt(q.nodes[i]);
  CHECK(s == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("special Kaehler metric of z dz^2 in the direction dz^2") {
  const MetricValue m = sk_metric(QuadDifferentialModel{});
  CHECK(m.value == doctest::Approx(kPi / 2).epsilon(1e-14));
  CHECK(kahler_potential(QuadDifferentialModel{}).value == doctest::Approx(kPi / 3).epsilon(1e-3));
}

TEST_CASE("cone structure") {
  const QuadDifferentialModel q({0.0, 1.0, cd(0.2, 0.1)}, {cd(0.5, -0.3), 0.4});
  const ConeReport c = cone_check(q, {0.5, 2.0, 3.0});
  CHECK(c.max_rel_error < 1e-12);
  for (double x : c.homogeneity_ratio) CHECK(x == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.unit_speed == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("z and w charts agree") {
  const ChartReport r = chart_crosscheck(QuadDifferentialModel{}, {2048, 64, 2.0, 1.0});
  CHECK(r.rel_mismatch < 1e-12);
  CHECK(r.z_chart == doctest::Approx(kPi / 2).epsilon(1e-12));
  const ChartReport s = chart_crosscheck(QuadDifferentialModel({0.0, 1.0}, {0.0, 1.0}), {2048, 64, 2.0, 1.0});
  CHECK(s.z_chart == doctest::Approx(kPi / 6).epsilon(1e-6));
}

TEST_CASE("L2 inner product is symmetric and scaled") {
  const GridPtr g = std::make_shared<PolarGrid>(PolarGrid::graded(16, 8));
  TangentPair a = TangentPair::zeros(g), b = TangentPair::zeros(g);
  for (int i = 0; i < g->nodes(); ++i) {
    a.phi.c0[i] = offdiag(1.0, 0.0);
    b.phi.c0[i] = offdiag(cd(0.0, 1.0), 2.0);
  }
  CHECK(l2_inner(a, b).value == doctest::Approx(l2_inner(b, a).value));
  // kMetricScale * 2 * 2 Tr(phi phi^*) * pi = pi / 2 for a constant unit offdiagonal
  CHECK(l2_inner(a, a).value == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(pointwise_inner_max(a, a) > 0.0);
}

}
