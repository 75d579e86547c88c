"""Acceptance gate: one test per shipped criterion.

Each test states its tolerance inline and prints the quantities it
checked (visible with ``pytest -rA``).  Criterion 8 is split: 8a pins
the built-in scatter-table total to the documented 10^6 occurrences,
which the tabulated cells do not satisfy (they sum to 100 000); it is
expected to fail until the upstream table is corrected, and is kept
red rather than weakened.  Everything else must pass.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq

from surfride import (
    ConvergenceError,
    Level2Evaluator,
    NoSolutionError,
    PhasePoint,
    PropulsionModel,
    ResistanceModel,
    ShipModel,
    SurgeSystem,
    ValidationError,
    WaveScatterTable,
    build_system,
    calibrate_wave_force,
    classify_asymptotics,
    compute_threshold,
    cos_power_integral,
    heteroclinic_newton,
    integrate,
    local_wave_force,
    melnikov_i_integral,
    melnikov_k_integral,
    rate_window,
    self_propulsion_speed,
    tangent_bifurcation_rates,
    wave_for_ship,
)
from surfride.sgisc import _imo_quadratic

from conftest import (
    LOWER_TANGENT_FN,
    PROPULSION_COEFFS,
    RESISTANCE_COEFFS,
    build_full_ship,
    build_model_ship,
)

REFERENCE_LAMBDA = 1.25
REFERENCE_STEEPNESS = 0.04


@pytest.fixture(scope="module", autouse=True)
def warm_kernels():
    """Compile/load the integrator kernels outside any timed section."""
    system = SurgeSystem(
        abar=(0.1, 0.0, 0.0, 0.0, 0.0), rbar=0.3, q=1.0, k_w=1.0,
        c_w=2.0, f_w=10.0, n_p=10.0, order=5, total_mass=50.0,
    )
    integrate(system, PhasePoint(y=0.5, v=0.5), tau_end=1.0)
    classify_asymptotics(system, PhasePoint(y=0.5, v=0.5))


def _model_case():
    ship = build_model_ship()
    res = ResistanceModel(*RESISTANCE_COEFFS)
    prop = PropulsionModel(**PROPULSION_COEFFS)
    wave = wave_for_ship(ship, REFERENCE_LAMBDA, REFERENCE_STEEPNESS)
    return ship, res, prop, wave


def test_criterion_01_tangent_and_heteroclinic_anchors():
    """Calibrated towing-tank case: upper tangent within 2%, both exact
    thresholds within 3% for some added mass in [0, 0.1 M]; under 1 min."""
    start = time.perf_counter()
    ship, res, prop, wave = _model_case()
    f_w = calibrate_wave_force(ship, res, prop, wave, LOWER_TANGENT_FN)

    n_lo, n_hi = tangent_bifurcation_rates(ship, res, prop, wave, f_w=f_w)
    fn_lo = ship.froude_number(self_propulsion_speed(res, prop, n_lo))
    fn_hi = ship.froude_number(self_propulsion_speed(res, prop, n_hi))
    print(f"calibrated f_w = {f_w:.6f} N; tangent Fn {fn_lo:.6f} / {fn_hi:.6f}")
    assert fn_lo == pytest.approx(LOWER_TANGENT_FN, rel=1e-9)
    assert fn_hi == pytest.approx(0.5639, rel=0.02)

    anchors_hit = []
    for frac in (0.0, 0.05, 0.10):
        heavy = build_model_ship(added_mass=frac * ship.mass)
        surf = heteroclinic_newton(heavy, res, prop, wave, f_w=f_w)
        block = heteroclinic_newton(heavy, res, prop, wave, branch="block", f_w=f_w)
        hit = (
            abs(surf.fn_cr / 0.3318 - 1.0) <= 0.03
            and abs(block.fn_cr / 0.5532 - 1.0) <= 0.03
        )
        anchors_hit.append(hit)
        print(
            f"Mx/M = {frac:.2f}: surf Fn {surf.fn_cr:.6f} "
            f"({surf.fn_cr / 0.3318 - 1.0:+.2%}), "
            f"block Fn {block.fn_cr:.6f} "
            f"({block.fn_cr / 0.5532 - 1.0:+.2%}) -> {'ok' if hit else 'miss'}"
        )
    assert any(anchors_hit)

    elapsed = time.perf_counter() - start
    print(f"criterion 1 runtime {elapsed:.1f} s")
    assert elapsed < 60.0


# Ten synthetic cases built by scaling the reference resistance curve
# (second column) and the wave force (third column): the threshold net
# thrust |r_bar| then spans [0.05, 0.8] across both branches.
ORACLE_CASES = (
    ("surf", 0.08, 5.2),
    ("surf", 0.15, 2.0),
    ("surf", 0.30, 1.0),
    ("surf", 0.60, 1.0),
    ("surf", 1.00, 0.75),
    ("block", 0.15, 4.0),
    ("block", 0.30, 2.0),
    ("block", 0.30, 0.6),
    ("block", 0.60, 1.0),
    ("block", 0.60, 0.52),
)


def test_criterion_02_newton_agrees_with_bisection_oracle():
    """Newton shooting vs the independent bisection-of-fate oracle:
    n_cr within 0.1% on ten cases spanning |r_bar| in [0.05, 0.8]."""
    start = time.perf_counter()
    ship, res0, prop, wave = _model_case()
    f0 = local_wave_force(ship, REFERENCE_LAMBDA, REFERENCE_STEEPNESS)

    magnitudes = []
    for branch, res_scale, force_mult in ORACLE_CASES:
        res = ResistanceModel(*[c * res_scale for c in res0.coeffs])
        f_w = f0 * force_mult
        newton = compute_threshold(
            "newton", ship, res, prop, wave, branch=branch, f_w=f_w
        )
        oracle = compute_threshold(
            "bisection", ship, res, prop, wave, branch=branch, f_w=f_w
        )
        rel = abs(oracle.n_p - newton.n_p) / newton.n_p
        print(
            f"{branch:5s} scale {res_scale:4.2f} x{force_mult:4.2f}: "
            f"r_bar {newton.r_bar:+.4f}, n_cr {newton.n_p:.5f}, "
            f"oracle gap {rel:.2e}"
        )
        assert rel <= 1e-3
        sign = -1.0 if branch == "surf" else 1.0
        assert math.copysign(1.0, newton.r_bar) == sign
        magnitudes.append(abs(newton.r_bar))

    assert all(0.05 <= m <= 0.80 for m in magnitudes)
    assert min(magnitudes) <= 0.06 and max(magnitudes) >= 0.74

    elapsed = time.perf_counter() - start
    print(f"criterion 2 runtime {elapsed:.1f} s")
    assert elapsed < 120.0


def test_criterion_03_melnikov_specialisations():
    """Order-1 threshold reproduces the closed linear-damping relation
    r_bar = -(4/pi) A1 solved independently; order-5 reproduces the
    larger root of the vulnerability-criteria quadratic.  1e-10 relative
    over 100 random coefficient draws each."""
    rng = np.random.default_rng(20260815)
    kan_checked = imo_checked = 0
    for _ in range(2000):
        if kan_checked >= 100 and imo_checked >= 100:
            break
        ship = ShipModel(
            length=rng.uniform(1.5, 5.0), mass=rng.uniform(20.0, 200.0)
        )
        res = ResistanceModel(
            rng.uniform(0.0, 20.0), rng.uniform(-30.0, 10.0),
            rng.uniform(0.0, 25.0), rng.uniform(-8.0, 2.0),
            rng.uniform(0.0, 1.0),
        )
        prop = PropulsionModel(
            kappa0=rng.uniform(0.2, 0.9), kappa1=rng.uniform(-0.5, 0.0),
            kappa2=rng.uniform(-0.3, 0.1), t_p=rng.uniform(0.0, 0.3),
            w_p=rng.uniform(0.0, 0.3), d_p=rng.uniform(0.05, 0.3),
        )
        wave = wave_for_ship(ship, rng.uniform(0.8, 2.2), rng.uniform(0.01, 0.08))
        f_w = rng.uniform(5.0, 100.0)

        if kan_checked < 100:
            try:
                m1 = compute_threshold("melnikov1", ship, res, prop, wave, f_w=f_w)
                n_lo, n_hi = rate_window(ship, res, prop, wave, f_w=f_w)

                def splitting(n):
                    sysn = build_system(ship, res, prop, wave, n, f_w=f_w)
                    return sysn.rbar + 4.0 / math.pi * sysn.abar[0]

                lo, hi = n_lo + 1e-9, n_hi - 1e-9
                if splitting(lo) * splitting(hi) < 0.0:
                    n_ref = brentq(splitting, lo, hi, xtol=1e-14, rtol=1e-15)
                    assert m1.n_p == pytest.approx(n_ref, rel=1e-10)
                    kan_checked += 1
            except (NoSolutionError, ConvergenceError, ValidationError):
                pass

        if imo_checked < 100:
            try:
                m5 = compute_threshold("melnikov5", ship, res, prop, wave, f_w=f_w)
            except (NoSolutionError, ConvergenceError, ValidationError):
                continue
            a, b, c = _imo_quadratic(
                ship, res, prop, np.float64(f_w), np.float64(wave.k_w)
            )
            disc = b * b - 4.0 * a * c
            if disc > 0.0:
                n_ref = (-b + math.sqrt(disc)) / (2.0 * a)
                assert m5.n_p == pytest.approx(n_ref, rel=1e-10)
                imo_checked += 1

    print(f"linear-relation draws {kan_checked}, quadratic draws {imo_checked}")
    assert kan_checked == 100 and imo_checked == 100


def test_criterion_04_separatrix_cosine_moments():
    """Closed-form cosine-power integrals vs quadrature for k = 1..10,
    and the exact low-order values."""
    exact = {1: 4.0, 2: math.pi, 3: 8.0 / 3.0, 4: 3.0 * math.pi / 4.0,
             5: 32.0 / 15.0}
    for k, value in exact.items():
        assert cos_power_integral(k) == pytest.approx(value, rel=1e-14)
    for k in range(1, 11):
        numeric, err = quad(
            lambda y: math.cos(0.5 * y) ** k, -math.pi, math.pi,
            epsabs=1e-13, epsrel=1e-13,
        )
        assert err < 1e-11
        rel = abs(cos_power_integral(k) - numeric) / numeric
        print(f"I_{k:<2d} = {cos_power_integral(k):.12f}  rel {rel:.1e}")
        assert rel <= 1e-10


def test_criterion_05_first_order_melnikov_validity_ladder():
    """Linear damping, |A1| <= 0.05: the first-order threshold sits within
    2% of the exact shooting value, and the error shrinks monotonically
    as the damping vanishes."""
    ship = ShipModel(length=2.0, mass=50.0)
    prop = PropulsionModel(
        kappa0=0.3, kappa1=0.0, kappa2=0.0, t_p=0.0, w_p=0.0, d_p=0.15
    )
    wave = wave_for_ship(ship, REFERENCE_LAMBDA, REFERENCE_STEEPNESS)
    f_w = 30.0
    q = f_w * wave.k_w / ship.total_mass

    errors = []
    for abar1 in (0.05, 0.04, 0.03, 0.02, 0.01):
        r1 = abar1 * ship.total_mass * math.sqrt(q)
        res = ResistanceModel(r1, 0.0, 0.0, 0.0, 0.0)
        first = compute_threshold(
            "melnikov1", ship, res, prop, wave, order=1, f_w=f_w
        )
        exact = heteroclinic_newton(ship, res, prop, wave, order=1, f_w=f_w)
        rel = abs(first.fn_cr - exact.fn_cr) / exact.fn_cr
        print(f"A1 = {abar1:.2f}: Fn {first.fn_cr:.8f} vs {exact.fn_cr:.8f} "
              f"-> rel {rel:.3e}")
        assert rel <= 0.02
        errors.append(rel)
    assert all(a > b for a, b in zip(errors, errors[1:]))


def test_criterion_06_undamped_energy_conservation():
    """v^2/2 - cos y - r_bar y stays within 1e-8 over tau in [0, 100]."""
    system = SurgeSystem(
        abar=(0.0,) * 5, rbar=0.3, q=1.0, k_w=1.0, c_w=2.0,
        f_w=10.0, n_p=10.0, order=5, total_mass=50.0,
    )
    path = integrate(system, PhasePoint(y=0.5, v=0.8), tau_end=100.0)
    h = 0.5 * path.vs**2 - np.cos(path.ys) - system.rbar * path.ys
    drift = float(np.max(np.abs(h - h[0])))
    print(f"energy drift {drift:.2e}")
    assert drift <= 1e-8


def test_criterion_07_front_moment_recursions():
    """I_n and K_n recursions vs adaptive quadrature, n = 1..5, to 1e-8
    relative on 50 random (beta, c) pairs with |beta| < |c|."""
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(50):
        c = rng.uniform(0.3, 3.0) * rng.choice([-1.0, 1.0])
        beta = rng.uniform(0.05, 0.95) * rng.choice([-1.0, 1.0]) * c
        for n in range(1, 6):
            num_i = c**n * quad(
                lambda t: math.exp(
                    (beta - n * c) * t - 2 * n * np.logaddexp(0.0, -c * t)
                ),
                -np.inf, np.inf, epsabs=1e-12, epsrel=1e-12,
            )[0]
            num_k = c * quad(
                lambda t: math.exp(
                    (beta - c) * t - (n + 2) * np.logaddexp(0.0, -c * t)
                ),
                -np.inf, np.inf, epsabs=1e-12, epsrel=1e-12,
            )[0]
            rel_i = abs(melnikov_i_integral(n, beta, c) - num_i) / abs(num_i)
            rel_k = abs(melnikov_k_integral(n, beta, c) - num_k) / abs(num_k)
            assert rel_i <= 1e-8 and rel_k <= 1e-8
            worst = max(worst, rel_i, rel_k)
    print(f"worst front-moment relative error {worst:.2e}")


def test_criterion_08a_scatter_table_total():
    """The built-in occurrence table should hold 10^6 observations.  The
    tabulated cells actually sum to 100 000; the counts are kept exactly
    as published, so this check is red by design (see ships table note
    in the README and the spot-check test alongside)."""
    table = WaveScatterTable.standard()
    assert table.total == 1.0e6


def test_criterion_08b_vulnerability_machinery(monkeypatch):
    """Spot-checked scatter cells, 81 x 101 wave grid, C nondecreasing in
    service Froude number with C(0) = 0, and a full single-threaded
    level-2 assessment under 30 s."""
    monkeypatch.setenv("SURFRIDE_THREADS", "1")

    table = WaveScatterTable.standard()
    assert table.counts.shape == (17, 16)
    assert table.counts[0, 3] == 1186.0
    assert table.counts[2, 6] == 4860.4
    assert table.counts[4, 8] == 1275.2

    ship, res, prop = build_full_ship()
    start = time.perf_counter()
    evaluator = Level2Evaluator(ship, res, prop)
    result = evaluator.assess(0.30)
    elapsed = time.perf_counter() - start
    print(f"single-threaded level-2 assessment {elapsed:.2f} s, "
          f"C(0.30) = {result.c_value:.6f}")
    assert elapsed < 30.0
    assert evaluator.fn_cr.shape == (81, 101)

    sweep = [evaluator.assess(fn).c_value for fn in np.linspace(0.0, 0.45, 20)]
    assert sweep[0] == 0.0
    assert all(a <= b for a, b in zip(sweep, sweep[1:]))
    assert sweep[-1] > 0.0


def test_criterion_09_analytic_methods_bracket_the_exact_threshold():
    """Calibrated towing-tank case: every analytic surf-riding threshold
    lies between the tangent and blocking Froude numbers and within 10%
    of the Newton value; the Melnikov family beyond first order is
    within 5%."""
    ship, res, prop, wave = _model_case()
    f_w = calibrate_wave_force(ship, res, prop, wave, LOWER_TANGENT_FN)

    exact = heteroclinic_newton(ship, res, prop, wave, f_w=f_w)
    blocking = heteroclinic_newton(ship, res, prop, wave, branch="block", f_w=f_w)
    n_lo, _ = tangent_bifurcation_rates(ship, res, prop, wave, f_w=f_w)
    fn_lo = ship.froude_number(self_propulsion_speed(res, prop, n_lo))

    methods = (
        "quad_damping", "cubic", "piecewise_linear",
        "melnikov1", "melnikov3", "melnikov5",
        "ext_melnikov_1", "ext_melnikov_2",
    )
    melnikov_family = {"melnikov3", "melnikov5", "ext_melnikov_1",
                       "ext_melnikov_2"}
    for method in methods:
        fn_cr = compute_threshold(
            method, ship, res, prop, wave, f_w=f_w
        ).fn_cr
        deviation = fn_cr / exact.fn_cr - 1.0
        print(f"{method:15s} Fn {fn_cr:.6f} ({deviation:+.2%})")
        assert fn_lo <= fn_cr <= blocking.fn_cr
        assert abs(deviation) <= 0.10
        if method in melnikov_family:
            assert abs(deviation) <= 0.05
