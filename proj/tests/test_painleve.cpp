#include "hitchin/conventions.hpp"
#include "hitchin/painleve.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace hitchin;

TEST_SUITE("painleve") {

TEST_CASE("Bessel functions match mpmath") {
  CHECK(bessel_k0(1.0) == doctest::Approx(0.42102443824070834).epsilon(1e-15));
  CHECK(bessel_k1(1.0) == doctest::Approx(0.60190723019723458).epsilon(1e-15));
  CHECK(bessel_k0(4.0) == doctest::Approx(0.011159676085853028).epsilon(1e-14));
}

TEST_CASE("connection constants of the sigma = 1/3 solution") {
  const PainleveTable& t = default_table();
  // psi ~ (2/pi) sin(pi sigma / 2) K0 = K0 / pi at infinity.
  for (double rho : {4.0, 6.0, 8.0})
    CHECK(eval_psi(t, rho).psi / bessel_k0(rho) == doctest::Approx(1.0 / M_PI).epsilon(1e-5));
  // psi + log(rho)/3 -> -log(2^{-1} Gamma(1/3) / Gamma(2/3)) at zero.
  CHECK(eval_psi(t, 1e-5).psi + std::log(1e-5) / 3.0 ==
        doctest::Approx(0.0108768087797019).epsilon(1e-6));
}

TEST_CASE("table invariants") {
  const PainleveTable& t = default_table();
  double mx = 0.0;
  for (double r : ode_residuals(t)) mx = std::max(mx, std::abs(r));
  CHECK(mx < 1e-8);
  for (std::size_t i = 1; i < t.psi.size(); ++i) {
    REQUIRE(t.psi[i] > 0.0);
    REQUIRE(t.psi[i] < t.psi[i - 1]);
  }
}

TEST_CASE("interpolation reproduces nodes and stays continuous") {
  const PainleveTable& t = default_table();
  const std::size_t i = t.rho.size() / 3;
  CHECK(eval_psi(t, t.rho[i]).psi == t.psi[i]);
  const double a = t.rho[i] * (1.0 - 1e-12), b = t.rho[i] * (1.0 + 1e-12);
  CHECK(std::abs(eval_psi(t, a).psi - eval_psi(t, b).psi) < 1e-10);
}

TEST_CASE("far extension follows K0 continuously") {
  const PainleveTable& t = default_table();
  const double rm = t.meta.rho_max;
  const PsiValue in = eval_psi(t, rm * (1 - 1e-10)), out = eval_psi(t, rm * (1 + 1e-10));
  CHECK(out.psi == doctest::Approx(in.psi).epsilon(1e-8));
  CHECK(out.rho_dpsi == doctest::Approx(in.rho_dpsi).epsilon(1e-6));
  const double c = t.psi.back() / bessel_k0(rm);
  CHECK(eval_psi(t, 2 * rm).psi == doctest::Approx(c * bessel_k0(2 * rm)).epsilon(1e-12));
}

TEST_CASE("profile: f_t limits and the sinh identity") {
  const PainleveTable& t = default_table();
  CHECK(profile_eval(t, 3.0, 0.0).f == 0.0);
  const ProfileEval far = profile_eval(t, 64.0, 1.0);
  CHECK(far.f == doctest::Approx(0.125).epsilon(1e-12));
  // f_t'(r) r^{-2} = 2 t^2 sinh(2 h_t(r))
  for (double r : {0.05, 0.2, 0.5}) {
    const ProfileEval p = profile_eval(t, 2.0, r);
    CHECK(p.df / (r * r) == doctest::Approx(2.0 * 4.0 * std::sinh(2.0 * p.h)).epsilon(1e-10));
  }
  CHECK(profile_eval(t, 2.0, 0.5).f == doctest::Approx(0.088355444621356805).epsilon(1e-9));
}

TEST_CASE("f_t / r^2 has a limit at the origin") {
  const PainleveTable& t = default_table();
  const double a = profile_eval(t, 1.0, 1e-6).f / 1e-12;
  const double b = profile_eval(t, 1.0, 1e-3).f / 1e-6;
  CHECK(a == doctest::Approx(b).epsilon(1e-4));
}

TEST_CASE("property report") {
  const PainleveTable& t = default_table();
  std::vector<double> ts, rs;
  for (int i = 0; i <= 8; ++i) ts.push_back(std::pow(2.0, i));
  for (int i = 0; i <= 80; ++i) rs.push_back(1e-4 * std::pow(1e4, i / 80.0));
  const PropertyReport p = verify_ft_properties(t, ts, rs);
  CHECK(p.f_min >= 0.0);
  CHECK(p.f_max <= 0.125);
  CHECK(p.monotone_r_violations == 0);
  CHECK(p.monotone_t_violations == 0);
  CHECK(p.slope_sup_f_over_r == doctest::Approx(2.0 / 3.0).epsilon(0.02));
  CHECK(p.slope_sup_f_over_r2 == doctest::Approx(4.0 / 3.0).epsilon(0.02));
}

TEST_CASE("cache round trip is bit exact") {
  const PainleveTable t = solve_psi(1e-4, 12.0, 1024, 1e-8);
  const auto dir = std::filesystem::temp_directory_path() / "hitchin_unit_cache";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / cache_file_name(1e-4, 12.0, 1024, 1e-8)).string();
  write_table(t, path);
  const PainleveTable r = read_table(path);
  REQUIRE(r.psi.size() == t.psi.size());
  for (std::size_t i = 0; i < t.psi.size(); ++i) {
    REQUIRE(r.psi[i] == t.psi[i]);
    REQUIRE(r.rho_dpsi[i] == t.rho_dpsi[i]);
  }
}

TEST_CASE("bad arguments") {
  CHECK_THROWS_AS(solve_psi(2.0, 16.0), DomainError);
  CHECK_THROWS_AS(eval_psi(default_table(), -1.0), DomainError);
  CHECK_THROWS_AS(profile_eval(default_table(), 0.0, 0.5), DomainError);
}

}
