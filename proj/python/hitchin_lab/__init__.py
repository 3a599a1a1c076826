"""Disk-model numerics: the sinh-Gordon profile, metric integrals and exponent fits."""

from ._core import (
    ConfigError,
    DomainError,
    PainleveTable,
    QuadDifferential,
    SolverError,
    bessel_k0,
    bessel_k1,
    chart_crosscheck,
    cone_check,
    default_table,
    eval_psi,
    fit_power_law,
    kahler_potential,
    metric_difference_table,
    packet_integral,
    peel_expansion,
    profile_eval,
    run_acceptance,
    sk_metric,
    solve_psi,
)

__version__ = "0.1.0"
