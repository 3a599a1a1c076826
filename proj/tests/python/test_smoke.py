import math

import pytest

import hitchin_lab as hl


@pytest.fixture(scope="module")
def table():
    return hl.default_table()


def test_bessel():
    assert hl.bessel_k0(1.0) == pytest.approx(0.42102443824070834, rel=1e-15)
    assert hl.bessel_k1(1.0) == pytest.approx(0.60190723019723458, rel=1e-15)


def test_psi_table(table):
    assert len(table) == len(table.psi)
    assert table.ode_residual_max < 1e-8
    psi, rho_dpsi = hl.eval_psi(table, 1.0)
    assert psi == pytest.approx(0.13414962705063929, rel=1e-9)
    assert rho_dpsi == pytest.approx(-0.19213193609477158, rel=1e-9)
    # far field amplitude from the connection formula
    assert hl.eval_psi(table, 6.0)[0] / hl.bessel_k0(6.0) == pytest.approx(1 / math.pi, rel=1e-5)


def test_profile(table):
    p = hl.profile_eval(table, 2.0, 0.5)
    assert p["f"] == pytest.approx(0.088355444621356805, rel=1e-9)
    assert p["f"] == pytest.approx(0.125 + p["r_dh"] / 4, rel=1e-14)
    with pytest.raises(ValueError):
        hl.profile_eval(table, 0.0, 0.5)


def test_small_solve():
    t = hl.solve_psi(1e-4, 12.0, 1024)
    assert t.rho_min == 1e-4
    assert t.ode_residual_max < 1e-8


def test_metrics():
    q = hl.QuadDifferential()
    assert hl.sk_metric(q) == pytest.approx(math.pi / 2, rel=1e-14)
    z, w, mismatch = hl.chart_crosscheck(q)
    assert mismatch < 1e-12
    cone = hl.cone_check(hl.QuadDifferential([0, 1, 0.2 + 0.1j], [0.5 - 0.3j, 0.4]), [0.5, 2.0])
    assert cone["max_rel_error"] < 1e-12
    with pytest.raises(ValueError):
        hl.QuadDifferential([1, 1], [1])


def test_fits():
    ts = [8 * 2 ** (i / 2) for i in range(9)]
    fit = hl.fit_power_law(ts, [3 * t ** -2 for t in ts])
    assert fit["exponent"] == pytest.approx(-2.0, rel=1e-12)
    peel = hl.peel_expansion(ts, [t ** (-2 / 3) + 0.5 * t ** (-4 / 3) for t in ts], [-2 / 3, -4 / 3])
    assert peel["coefficients"] == pytest.approx([1.0, 0.5], rel=1e-9)
    assert hl.packet_integral(lambda s: 1.0, 3, 27.0) == pytest.approx(0.25, rel=1e-14)


def test_metric_table(table):
    rows = hl.metric_difference_table(table, [8 * 2 ** (i / 4) for i in range(8)], ["rr", "rv"], 6, 32)
    rr, rv = rows
    assert rr["exponent"] == pytest.approx(-2.0, abs=0.1)
    assert rv["identically_zero"] and rv["exponent"] is None
    with pytest.raises(ValueError):
        hl.metric_difference_table(table, [8, 16, 32, 64], ["rr"])


def test_acceptance_subset():
    results = hl.run_acceptance([9, 10])
    assert [r["id"] for r in results] == [9, 10]
    assert all(r["pass"] for r in results)
    assert results[0]["line"].startswith("C09 PASS")
