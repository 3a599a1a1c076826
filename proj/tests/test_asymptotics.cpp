#include "hitchin/asymptotics.hpp"

#include <doctest.h>

#include <cmath>

using namespace hitchin;

namespace {
std::vector<Sample> sample(const std::vector<double>& ts, double (*f)(double)) {
  std::vector<Sample> s;
  for (double t : ts) s.push_back({t, f(t)});
  return s;
}
}  // namespace

TEST_SUITE("asymptotics") {

TEST_CASE("exact power law") {
  const PowerLawFit f = fit_power_law(sample(geometric_grid(4, 256, 9), [](double t) {
    return -3.0 * std::pow(t, -2.0);
  }));
  CHECK(f.exponent == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(f.coefficient == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK(f.t_lo == doctest::Approx(4.0 * std::pow(64.0, 3.0 / 8.0)));
  CHECK_FALSE(f.prefers_exponential);
}

TEST_CASE("exponential decay is flagged") {
  const auto s = sample(geometric_grid(2, 40, 10), [](double t) { return std::exp(-t); });
  CHECK(fit_power_law(s, Window::all).prefers_exponential);
  CHECK(fit_exponential(s).rate == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("fit errors") {
  CHECK_THROWS_AS(fit_power_law({{1, 1}, {2, 1}, {3, 1}}), DomainError);
  CHECK_THROWS_AS(fit_power_law({{1, 1}, {2, -1}, {3, 1}, {4, 1}}, Window::all), DomainError);
}

TEST_CASE("two-term expansion") {
  auto f = [](double t) { return std::pow(t, -2.0 / 3.0) + 0.5 * std::pow(t, -4.0 / 3.0); };
  std::vector<Sample> s;
  for (double t : geometric_grid(8, 64, 8)) s.push_back({t, f(t)});
  const PowerLawFit single = fit_power_law(s, Window::all);
  CHECK(single.exponent > -0.734);
  CHECK(single.exponent < -0.704);
  const ExpansionPeel p = peel_expansion(s, {-2.0 / 3.0, -4.0 / 3.0, -2.0});
  CHECK(p.terms_used == 2);
  CHECK(p.coefficients[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(p.coefficients[1] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(p.coefficients[2] == 0.0);
  CHECK_THROWS(peel_expansion(s, {-1.0, -0.5}));
}

TEST_CASE("packet integrals") {
  CHECK(packet_integral_radial([](double) { return 1.0; }, 3, 27.0) ==
        doctest::Approx(0.25).epsilon(1e-14));
  const double T = 4.0;  // t = 8
  CHECK(packet_integral_radial([](double s) { return std::exp(-s); }, 0, 8.0) ==
        doctest::Approx((1.0 - std::exp(-T)) / T).epsilon(1e-13));
  CHECK_THROWS_AS(packet_integral_radial([](double) { return 1.0; }, -1, 8.0), DomainError);
  const cd a = packet_integral_disk([](cd) { return cd(1.0); }, 1, 8.0);
  CHECK(a.real() == doctest::Approx(kPi).epsilon(1e-13));
  CHECK(std::abs(a.imag()) < 1e-14);
}

TEST_CASE("expected exponents") {
  CHECK(expected_exponent("rr") == doctest::Approx(-5.0 / 3.0));
  CHECK(expected_exponent("hh") == doctest::Approx(-2.0 / 3.0));
  CHECK(expected_exponent("rh") == doctest::Approx(-1.0));
  CHECK_THROWS(expected_exponent("xx"));
}

TEST_CASE("serialization") {
  CHECK(format_double(NAN) == "nan");
  CHECK(std::stod(format_double(0.1)) == 0.1);
  const auto g = geometric_grid(8, 64, 4);
  CHECK(g.front() == 8.0);
  CHECK(g.back() == 64.0);
  CHECK(g[1] == doctest::Approx(16.0));
  TableRow r;
  r.direction = "rv";
  r.exponent = NAN;
  CHECK(table_csv({r}).rfind("direction,t_lo,t_hi,exponent,coefficient,r_squared,expected\n", 0) == 0);
  CHECK(table_json({r}).find("\"exponent\": null") != std::string::npos);
}

TEST_CASE("metric difference table on a coarse sweep") {
  SweepSettings s;
  s.nodes_per_octave = 6;
  s.n_theta = 32;
  CHECK_THROWS_AS(metric_difference_table(default_table(), geometric_grid(8, 32, 5), {"rr"}, s),
                  ConfigError);
  CHECK_THROWS_AS(metric_difference_table(default_table(), {8, 9, 10, 11, 12, 13, 14, 14}, {"rr"}, s),
                  ConfigError);
  const MetricTable t =
      metric_difference_table(default_table(), geometric_grid(8, 32, 8), {"rr", "rv"}, s);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].exponent == doctest::Approx(-2.0).epsilon(0.05));
  CHECK(t.rows[1].identically_zero);
  CHECK(std::isnan(t.rows[1].exponent));
}

}
