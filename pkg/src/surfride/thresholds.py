"""Analytic surf-riding / wave-blocking threshold estimates.

Each method replaces part of the pendulum-form surge equation

    y'' + D(y') + sin y = rbar,   D(v) = sum_k abar_k v^k

by a tractable approximation whose saddle-to-saddle connection is known
in closed form, then solves for the propeller rate at which the
connection condition is met:

* ``quad_damping_threshold``  — equivalent quadratic damping; the orbit
  equation for v^2 is linear in y and the connection condition is
  algebraic;
* ``cubic_threshold``         — cubic fit of the restoring term; the
  connection is a logistic front between outer roots;
* ``piecewise_linear_threshold`` — continuous piecewise-linear restoring;
  the orbit is matched exactly across segment boundaries;
* ``melnikov_threshold``      — perturbative splitting of the undamped
  separatrix, truncation order 1..5; exactly quadratic in the rate;
* ``ext_melnikov_1_threshold`` — splitting about the quadratic-damping
  connection (keeps the damping non-perturbative);
* ``ext_melnikov_2_threshold`` — splitting about the damped cubic
  connection, with exponentially weighted logistic integrals.

All methods return a ThresholdResult.  ``compute_threshold`` dispatches
by method name and also wraps the exact solvers from ``dynamics``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq
from scipy.special import gamma as _gamma_fn

from .errors import ConvergenceError, NoSolutionError, ValidationError
from .hull import (
    PropulsionModel,
    ResistanceModel,
    ShipModel,
    self_propulsion_speed,
)
from .surge import (
    SurgeSystem,
    WaveCondition,
    build_system,
    rate_window,
)
from .surge import MAX_ORDER

MU_CUBIC = 8.0 / (3.0 * math.pi**3)

_BRANCHES = ("surf", "block")

ANALYTIC_METHODS = (
    "quad_damping",
    "cubic",
    "piecewise_linear",
    "melnikov1",
    "melnikov3",
    "melnikov5",
    "ext_melnikov_1",
    "ext_melnikov_2",
)
ALL_METHODS = ("newton", "bisection") + ANALYTIC_METHODS

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(240)


def _check_branch(branch: str) -> int:
    """Branch sign: -1 for surf-riding (descending), +1 for blocking."""
    if branch not in _BRANCHES:
        raise ValidationError(f"branch must be one of {_BRANCHES}, got {branch!r}")
    return -1 if branch == "surf" else +1


# ---------------------------------------------------------------------------
# results and fits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdResult:
    """Threshold of one method on one branch.

    n_p: critical propeller rate [1/s]; fn_cr: nominal Froude number of
    the calm-water speed at n_p; r_bar: nondimensional net thrust at the
    wave celerity for n_p.  details carries method internals.
    """

    method: str
    branch: str
    n_p: float
    fn_cr: float
    r_bar: float
    details: dict = field(default_factory=dict)


@dataclass(frozen=True)
class DampingFit:
    """Equivalent-quadratic damping fit D(v) ~ -gamma v^2.

    Without a branch the fit interval is (0, v_e), giving
    gamma = -5 sum_k abar_k v_e^(k-2) / (k+3).  With a branch the fit
    runs over that branch's speed interval ((-v_e, 0) for surf-riding),
    and gamma1 / gamma2 carry the least-squares refit of the residual
    D(v) + gamma v^2 onto {v, v^2} over the same interval."""

    gamma: float
    v_e: float
    gamma1: float = 0.0
    gamma2: float = 0.0


@dataclass(frozen=True)
class CubicRestoring:
    """Cubic-restoring geometry at a given net thrust rbar.

    a1 < a2 < a3 are the rest points of mu y (y^2 - pi^2) + rbar = 0;
    a_tilde and mu_tilde are the unit-interval offset and stiffness of
    the rescaled front; c_tilde its logistic rate (negative descending)."""

    rbar: float
    a1: float
    a2: float
    a3: float
    a_tilde: float
    mu_tilde: float
    c_tilde: float


def _interval_moment(a: float, b: float, m: int) -> float:
    return (b ** (m + 1) - a ** (m + 1)) / (m + 1)


def _damping_value(abar: tuple[float, ...], v: np.ndarray) -> np.ndarray:
    out = np.zeros_like(v)
    for k in range(len(abar), 0, -1):
        out = (out + abar[k - 1]) * v
    return out


def fit_quadratic_damping(
    system: SurgeSystem, v_e: float = 2.0, branch: str | None = None
) -> DampingFit:
    """Least-squares equivalent-quadratic damping coefficient.

    gamma minimises int_0^{v_e} (D(v) + gamma v^2)^2 dv, giving
    gamma = -5 sum_k abar_k v_e^(k-2) / (k+3).  With a branch given, the
    residual D(v) - gamma sgn(v) v^2 is additionally fitted to
    gamma1 v + gamma2 v^2 over the branch speed interval ((-v_e, 0) for
    surf, (0, v_e) for blocking).
    """
    if v_e <= 0.0:
        raise ValidationError(f"v_e must be > 0, got {v_e}")
    abar = system.abar
    if branch is None:
        gamma = -5.0 * sum(
            abar[k - 1] * v_e ** (k - 2) / (k + 3) for k in range(1, MAX_ORDER + 1)
        )
        return DampingFit(gamma=gamma, v_e=v_e)
    sign = _check_branch(branch)
    lo, hi = (-v_e, 0.0) if sign < 0 else (0.0, v_e)
    m = [_interval_moment(lo, hi, p) for p in range(0, 8)]
    gamma = -sum(
        abar[k - 1] * m[k + 2] for k in range(1, MAX_ORDER + 1)
    ) / m[4]
    gram = np.array([[m[2], m[3]], [m[3], m[4]]])
    rhs = np.empty(2)
    for i in (1, 2):
        acc = sum(abar[k - 1] * m[i + k] for k in range(1, MAX_ORDER + 1))
        rhs[i - 1] = acc + gamma * m[i + 2]
    g1, g2 = np.linalg.solve(gram, rhs)
    return DampingFit(gamma=gamma, v_e=v_e, gamma1=float(g1), gamma2=float(g2))


def fit_cubic_damping(system: SurgeSystem, v_e: float = 2.0) -> float:
    """Least-squares equivalent-linear damping D(v) ~ -beta v over
    (0, v_e): beta = -3 sum_k abar_k v_e^(k-1) / (k+2)."""
    if v_e <= 0.0:
        raise ValidationError(f"v_e must be > 0, got {v_e}")
    return -3.0 * sum(
        system.abar[k - 1] * v_e ** (k - 1) / (k + 2)
        for k in range(1, MAX_ORDER + 1)
    )


def cubic_restoring(rbar: float, branch: str = "surf") -> CubicRestoring:
    """Rest points and front geometry of the cubic restoring model
    mu y (y^2 - pi^2) + rbar with mu = 8 / (3 pi^3)."""
    sign = _check_branch(branch)
    roots = np.sort(np.roots([MU_CUBIC, 0.0, -MU_CUBIC * math.pi**2, rbar]))
    if np.max(np.abs(roots.imag)) > 1.0e-9:
        raise NoSolutionError(
            f"cubic restoring has no three rest points at rbar = {rbar:.6g}"
        )
    a1, a2, a3 = (float(r) for r in roots.real)
    span = a3 - a1
    a_tilde = (a2 - a1) / span
    mu_tilde = MU_CUBIC * span * span
    c_tilde = sign * math.sqrt(mu_tilde / 2.0)
    return CubicRestoring(
        rbar=rbar, a1=a1, a2=a2, a3=a3,
        a_tilde=a_tilde, mu_tilde=mu_tilde, c_tilde=c_tilde,
    )


# ---------------------------------------------------------------------------
# shared rate-window root finding
# ---------------------------------------------------------------------------

def _prepare(
    ship: ShipModel,
    res: ResistanceModel,
    prop: PropulsionModel,
    wave: WaveCondition,
    f_w: float | None,
    order: int,
) -> tuple[float, float, Callable[[float], SurgeSystem]]:
    if f_w is None:
        from .hull import fk_amplitude

        f_w = fk_amplitude(ship, wave.k_w, wave.amplitude)[0]
    n_lo, n_hi = rate_window(ship, res, prop, wave, f_w=f_w)

    def build(n: float) -> SurgeSystem:
        return build_system(ship, res, prop, wave, n, order=order, f_w=f_w)

    return n_lo, n_hi, build


def _scan_root(
    f: Callable[[float], float],
    n_lo: float,
    n_hi: float,
    label: str,
    n_points: int = 61,
) -> tuple[float, int]:
    """Largest root of f on the open rate window, by grid scan plus
    Brent refinement.  Points where f raises Convergence/NoSolution
    errors are skipped."""
    pad = 1.0e-6 * (n_hi - n_lo)
    xs = np.linspace(n_lo + pad, n_hi - pad, n_points)
    vals: list[tuple[float, float]] = []
    for x in xs:
        try:
            vals.append((float(x), f(float(x))))
        except (ConvergenceError, NoSolutionError):
            continue
    roots = []
    for (x1, f1), (x2, f2) in zip(vals, vals[1:]):
        if f1 == 0.0:
            roots.append(x1)
        elif f1 * f2 < 0.0:
            roots.append(float(brentq(f, x1, x2, xtol=1e-13, rtol=8.9e-16)))
    if not roots:
        raise NoSolutionError(
            f"{label}: no threshold crossing on rate window "
            f"({n_lo:.6g}, {n_hi:.6g})"
        )
    return max(roots), len(roots)


def _finish(
    method: str,
    branch: str,
    n_cr: float,
    ship: ShipModel,
    res: ResistanceModel,
    prop: PropulsionModel,
    build: Callable[[float], SurgeSystem],
    details: dict,
) -> ThresholdResult:
    system = build(n_cr)
    u_cr = self_propulsion_speed(res, prop, n_cr)
    return ThresholdResult(
        method=method,
        branch=branch,
        n_p=float(n_cr),
        fn_cr=ship.froude_number(u_cr),
        r_bar=system.rbar,
        details=details,
    )


# ---------------------------------------------------------------------------
# equivalent quadratic damping
# ---------------------------------------------------------------------------

def _iterated_quadratic_fit(
    system: SurgeSystem, v_e0: float, iterate: bool
) -> tuple[float, float, int]:
    """Fixed point of v_e = v_e0 (1 + 4 gamma^2)^(-1/4), the peak speed
    of the quadratically damped connection."""
    v_e = v_e0
    gamma = fit_quadratic_damping(system, v_e).gamma
    if not iterate:
        return gamma, v_e, 0
    for it in range(1, 101):
        v_new = v_e0 * (1.0 + 4.0 * gamma * gamma) ** (-0.25)
        g_new = fit_quadratic_damping(system, v_new).gamma
        done = abs(g_new - gamma) <= 1.0e-13 * max(1.0, abs(g_new))
        v_e, gamma = v_new, g_new
        if done:
            return gamma, v_e, it
    raise ConvergenceError("equivalent-damping speed-scale iteration stalled")


def quad_damping_threshold(
    ship: ShipModel,
    res: ResistanceModel,
    prop: PropulsionModel,
    wave: WaveCondition,
    branch: str = "surf",
    order: int = 5,
    f_w: float | None = None,
    v_e: float = 2.0,
    iterate_v_e: bool = True,
) -> ThresholdResult:
    """Threshold from the equivalent-quadratic damping model.

    With D(v) replaced by -gamma v^2 the squared-speed orbit equation is
    linear in y and the saddle connection requires
    rbar^2 (1 + 4 gamma^2) = 4 gamma^2, i.e. |rbar| = 2|gamma| /
    sqrt(1 + 4 gamma^2); the sign is negative for surf-riding and
    positive for blocking.
    """
    sign = _check_branch(branch)
    n_lo, n_hi, build = _prepare(ship, res, prop, wave, f_w, order)
    state: dict = {}

    def residual(n: float) -> float:
        system = build(n)
        gamma, v_eff, iters = _iterated_quadratic_fit(system, v_e, iterate_v_e)
        r_cr = sign * 2.0 * abs(gamma) / math.sqrt(1.0 + 4.0 * gamma * gamma)
        state.update(gamma=gamma, v_e=v_eff, iterations=iters, r_bar_cr=r_cr)
        return system.rbar - r_cr

    n_cr, n_roots = _scan_root(residual, n_lo, n_hi, "quad_damping")
    residual(n_cr)
    details = dict(state, roots_found=n_roots)
    return _finish("quad_damping", branch, n_cr, ship, res, prop, build, details)


# ---------------------------------------------------------------------------
# cubic restoring
# ---------------------------------------------------------------------------

def cubic_threshold(
    ship: ShipModel,
    res: ResistanceModel,
    prop: PropulsionModel,
    wave: WaveCondition,
    branch: str = "surf",
    order: int = 5,
    f_w: float | None = None,
    v_e: float = 2.0,
) -> ThresholdResult:
    """Threshold from the cubic-restoring / linear-damping model.

    The damped logistic front between the outer rest points exists when
    mu_tilde/2 -+ beta sqrt(mu_tilde/2) - mu_tilde a_tilde = 0 (upper
    sign blocking), with beta the equivalent-linear damping fit; the
    residual is solved for the propeller rate.
    """
    sign = _check_branch(branch)
    n_lo, n_hi, build = _prepare(ship, res, prop, wave, f_w, order)
    state: dict = {}

    def residual(n: float) -> float:
        system = build(n)
        beta = fit_cubic_damping(system, v_e)
        geo = cubic_restoring(system.rbar, branch)
        half = geo.mu_tilde / 2.0
        state.update(beta=beta, geometry=geo)
        return half - sign * beta * math.sqrt(half) - geo.mu_tilde * geo.a_tilde

    n_cr, n_roots = _scan_root(residual, n_lo, n_hi, "cubic")
    residual(n_cr)
    geo: CubicRestoring = state["geometry"]
    details = dict(
        beta=state["beta"],
        a_roots=(geo.a1, geo.a2, geo.a3),
        a_tilde=geo.a_tilde,
        mu_tilde=geo.mu_tilde,
        c_tilde=geo.c_tilde,
        roots_found=n_roots,
    )
    return _finish("cubic", branch, n_cr, ship, res, prop, build, details)


# ---------------------------------------------------------------------------
# continuous piecewise-linear restoring
# ---------------------------------------------------------------------------

def _pwl_gap(rbar: float, beta_lin: float, tau_bar: float) -> np.ndarray:
    """Boundary mismatch of the piecewise-linear connection.

    The descending connection leaves the saddle of the outer down-slope
    segment, transits the middle up-slope segment in time tau_bar, and
    must arrive on the stable ray of the far saddle; continuity of
    position and velocity at the exit boundary gives the two components.
    """
    two_over_pi = 2.0 / math.pi
    b = beta_lin
    disc_saddle = b * b + 4.0 * two_over_pi
    lam1 = (-b + math.sqrt(disc_saddle)) / 2.0
    lam2 = (-b - math.sqrt(disc_saddle)) / 2.0
    osc = 4.0 * two_over_pi - b * b
    if osc <= 0.0:
        raise NoSolutionError(
            f"piecewise-linear focus is non-oscillatory (damping {b:.6g})"
        )
    lam_r = -b / 2.0
    lam_i = math.sqrt(osc) / 2.0
    c_r = (math.pi / 4.0) * (1.0 - rbar)
    c_i = c_r * (lam1 + lam_r) / lam_i
    e = math.exp(lam_r * tau_bar)
    cs = math.cos(lam_i * tau_bar)
    sn = math.sin(lam_i * tau_bar)
    g1 = 2.0 * e * (c_r * cs - c_i * sn) + (math.pi / 2.0) * (1.0 + rbar)
    g2 = (
        2.0 * e * ((c_r * lam_r - c_i * lam_i) * cs - (c_r * lam_i + c_i * lam_r) * sn)
        - (math.pi / 2.0) * lam2 * (1.0 + rbar)
    )
    return np.array([g1, g2])


def piecewise_linear_threshold(
    ship: ShipModel,
    res: ResistanceModel,
    prop: PropulsionModel,
    wave: WaveCondition,
    branch: str = "surf",
    order: int = 5,
    f_w: float | None = None,
    v_e: float = 2.0,
    max_iter: int = 60,
) -> ThresholdResult:
    """Threshold from the continuous piecewise-linear restoring model.

    The restoring is a triangle wave of slope -+ 2/pi; inside each
    segment the equation is linear, so the connection is matched exactly
    at the segment boundaries.  The two matching conditions are solved
    for (rate, transit time) by a damped Newton iteration with a
    finite-difference Jacobian, seeded from the order-5 separatrix
    splitting.  The blocking branch maps onto the descending problem by
    the half-turn reflection of the phase plane, which flips the sign of
    rbar and keeps the damping.
    """
    sign = _check_branch(branch)
    n_lo, n_hi, build = _prepare(ship, res, prop, wave, f_w, order)

    def gap(n: float, tau_bar: float) -> np.ndarray:
        system = build(n)
        rb = system.rbar if sign < 0 else -system.rbar
        beta_lin = -fit_cubic_damping(system, v_e)
        return _pwl_gap(rb, beta_lin, tau_bar)

    seed = melnikov_threshold(
        ship, res, prop, wave, branch=branch, order=min(order, 5), f_w=f_w
    )
    n = seed.n_p

    # transit-time seed: first sign change of the position mismatch over
    # one focus period
    system = build(n)
    beta_lin = -fit_cubic_damping(system, v_e)
    osc = 8.0 / math.pi - beta_lin * beta_lin
    if osc <= 0.0:
        raise NoSolutionError(
            f"piecewise-linear focus is non-oscillatory (damping {beta_lin:.6g})"
        )
    lam_i = math.sqrt(osc) / 2.0
    rb0 = system.rbar if sign < 0 else -system.rbar
    taus = np.linspace(1.0e-3, 2.0 * math.pi / lam_i, 400)
    g1s = [_pwl_gap(rb0, beta_lin, t)[0] for t in taus]
    tau_bar = None
    for (t1, v1), (t2, v2) in zip(zip(taus, g1s), zip(taus[1:], g1s[1:])):
        if v1 * v2 <= 0.0:
            tau_bar = float(
                brentq(lambda t: _pwl_gap(rb0, beta_lin, t)[0], t1, t2)
            )
            break
    if tau_bar is None:
        raise ConvergenceError(
            "piecewise-linear matching: no transit-time sign change within "
            "one focus period"
        )

    g = gap(n, tau_bar)
    scale = 1.0e-7
    for _ in range(max_iter):
        dn = scale * max(1.0, abs(n))
        dt = scale * max(1.0, abs(tau_bar))
        j_n = (gap(n + dn, tau_bar) - gap(n - dn, tau_bar)) / (2.0 * dn)
        j_t = (gap(n, tau_bar + dt) - gap(n, tau_bar - dt)) / (2.0 * dt)
        try:
            step = np.linalg.solve(np.column_stack([j_n, j_t]), -g)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(
                f"singular piecewise-linear Jacobian at n = {n:.8g}"
            ) from exc
        lam = 1.0
        for _ in range(12):
            n_new = n + lam * step[0]
            t_new = tau_bar + lam * step[1]
            if n_lo < n_new < n_hi and t_new > 0.0:
                g_new = gap(n_new, t_new)
                if np.linalg.norm(g_new) < np.linalg.norm(g):
                    break
            lam *= 0.5
        else:
            n_new, t_new = n + lam * step[0], tau_bar + lam * step[1]
            g_new = gap(n_new, t_new)
        rel = max(
            abs(n_new - n) / max(1.0, abs(n_new)),
            abs(t_new - tau_bar) / max(1.0, abs(t_new)),
        )
        n, tau_bar, g = n_new, t_new, g_new
        if rel < 1.0e-12:
            break
    residual = float(np.linalg.norm(g))
    if residual > 1.0e-9:
        raise ConvergenceError(
            f"piecewise-linear matching stalled: residual {residual:.3e} "
            f"at n = {n:.8g}"
        )
    details = dict(
        tau_bar=float(tau_bar),
        beta=float(-beta_lin),
        residual=residual,
        seed_rate=seed.n_p,
    )
    return _finish("piecewise_linear", branch, n, ship, res, prop, build, details)


# ---------------------------------------------------------------------------
# separatrix splitting (orders 1..5)
# ---------------------------------------------------------------------------

def cos_power_integral(k: int) -> float:
    """I_k = integral of cos^k(y/2) dy over one wavelength (-pi, pi):
    2 sqrt(pi) Gamma((k+1)/2) / Gamma((k+2)/2)."""
    if k < 0:
        raise ValidationError(f"moment index must be >= 0, got {k}")
    return 2.0 * math.sqrt(math.pi) * _gamma_fn((k + 1) / 2.0) / _gamma_fn((k + 2) / 2.0)


def melnikov_threshold(
    ship: ShipModel,
    res: ResistanceModel,
    prop: PropulsionModel,
    wave: WaveCondition,
    branch: str = "surf",
    order: int = 5,
    f_w: float | None = None,
) -> ThresholdResult:
    """Threshold from first-order splitting of the undamped separatrix.

    The connection condition is 2 pi rbar(n) = sum_k abar_k(n) s^k I_k
    with s = -2 (surf) or +2 (blocking) the peak separatrix speed and
    I_k the cosine power integrals.  rbar is exactly quadratic in the
    rate and only abar_1 is rate-dependent (affinely), so the condition
    is a quadratic equation; its larger real root is the threshold.
    """
    sign = _check_branch(branch)
    if not 1 <= order <= MAX_ORDER:
        raise ValidationError(f"order must be in 1..{MAX_ORDER}, got {order}")
    n_lo, n_hi, build = _prepare(ship, res, prop, wave, f_w, order)
    ref = build(0.5 * (n_lo + n_hi))

    s = 2.0 * sign
    f_wave = ref.f_w
    mass = ref.total_mass
    c_w = ref.c_w
    sqrt_q_mass = mass * math.sqrt(ref.q)

    # rbar(n) = (tau0 n^2 + tau1 c_w n + tau2 c_w^2 - R(c_w)) / f_w and
    # abar_1(n) = abar_1(0) - tau1 n / (mass sqrt q): assemble the
    # quadratic A n^2 + B n + C = 0 of the connection condition.
    from .hull import resistance

    i1 = cos_power_integral(1)
    abar0 = list(ref.abar)
    abar0[0] += prop.tau1 * ref.n_p / sqrt_q_mass  # strip rate dependence
    two_pi = 2.0 * math.pi
    coef_a = two_pi * prop.tau0 / f_wave
    coef_b = two_pi * prop.tau1 * c_w / f_wave + s * i1 * prop.tau1 / sqrt_q_mass
    coef_c = two_pi * (prop.tau2 * c_w**2 - resistance(res, c_w)) / f_wave - sum(
        abar0[k - 1] * s**k * cos_power_integral(k) for k in range(1, order + 1)
    )
    disc = coef_b * coef_b - 4.0 * coef_a * coef_c
    if disc < 0.0:
        raise NoSolutionError(
            f"melnikov{order}: separatrix splitting has no real rate "
            f"(discriminant {disc:.6g})"
        )
    n_cr = (-coef_b + math.sqrt(disc)) / (2.0 * coef_a)
    details = dict(
        order=order,
        quadratic=(coef_a, coef_b, coef_c),
        window=(n_lo, n_hi),
    )
    return _finish(
        f"melnikov{order}", branch, n_cr, ship, res, prop, build, details
    )


# ---------------------------------------------------------------------------
# extended splitting about the quadratic-damping connection
# ---------------------------------------------------------------------------

def _em1_melnikov(
    sigma: float, g1: float, g2: float, gamma: float, sign: int
) -> tuple[float, float]:
    """Splitting integral about the equivalent-quadratic connection,
    by Gauss-Legendre quadrature, and its closed form as a diagnostic.

    With gamma the branch-side damping fit, the connection orbit is
    v(y) = sign * 2 kappa cos((y - phi) / 2) on (phi - pi, phi + pi),
    kappa = (1 + 4 gamma^2)^(-1/4), phi = atan(2 gamma), weighted by
    exp(-2 gamma y); both branches share one formula, the travel
    direction only flips the linear-correction term.
    """
    kappa = (1.0 + 4.0 * gamma * gamma) ** (-0.25)
    phi = math.atan(2.0 * gamma)
    u = math.pi * _GL_NODES
    w = math.pi * _GL_WEIGHTS
    cos_half = np.cos(u / 2.0)
    integrand = (
        sigma
        - sign * 2.0 * g1 * kappa * cos_half
        - 4.0 * g2 * kappa**2 * cos_half**2
    ) * np.exp(-2.0 * gamma * u)
    quad = math.exp(-2.0 * gamma * phi) * float(np.dot(w, integrand))

    tgp = 2.0 * gamma * math.pi
    if abs(gamma) > 1.0e-8:
        sinh_term = math.sinh(tgp) / gamma
        quad_term = math.sinh(tgp) / (gamma * (1.0 + 4.0 * gamma * gamma))
    else:
        sinh_term = 2.0 * math.pi * (1.0 + tgp * tgp / 6.0)
        quad_term = sinh_term / (1.0 + 4.0 * gamma * gamma)
    lin_term = 8.0 * kappa * math.cosh(tgp) / (1.0 + 16.0 * gamma * gamma)
    closed = math.exp(-2.0 * gamma * phi) * (
        sigma * sinh_term
        - sign * g1 * lin_term
        - 2.0 * g2 * kappa**2 * quad_term
    )
    return quad, closed


def ext_melnikov_1_threshold(
    ship: ShipModel,
    res: ResistanceModel,
    prop: PropulsionModel,
    wave: WaveCondition,
    branch: str = "surf",
    order: int = 5,
    f_w: float | None = None,
    v_e: float = 2.0,
) -> ThresholdResult:
    """Threshold from splitting about the quadratic-damping connection.

    The branch-side equivalent-quadratic part of the damping is kept in
    the unperturbed connection, which exists at rbar = -2 gamma /
    sqrt(1 + 4 gamma^2); the detuning sigma from that base and the
    residual-damping refit gamma1 v + gamma2 v^2 enter the weighted
    splitting integral.  The quadrature value is authoritative; the
    closed form is evaluated as a diagnostic.
    """
    sign = _check_branch(branch)
    n_lo, n_hi, build = _prepare(ship, res, prop, wave, f_w, order)
    state: dict = {}

    def residual(n: float) -> float:
        system = build(n)
        fit = fit_quadratic_damping(system, v_e, branch)
        r_base = -2.0 * fit.gamma / math.sqrt(1.0 + 4.0 * fit.gamma**2)
        sigma = system.rbar - r_base
        quad, closed = _em1_melnikov(
            sigma, fit.gamma1, fit.gamma2, fit.gamma, sign
        )
        state.update(fit=fit, sigma=sigma, quad=quad, closed=closed, r_base=r_base)
        return quad

    n_cr, n_roots = _scan_root(residual, n_lo, n_hi, "ext_melnikov_1")
    residual(n_cr)
    fit: DampingFit = state["fit"]
    scale = max(1.0, abs(state["quad"]), abs(state["closed"]))
    closed_rel = abs(state["quad"] - state["closed"]) / scale
    details = dict(
        gamma=fit.gamma,
        gamma1=fit.gamma1,
        gamma2=fit.gamma2,
        v_e=fit.v_e,
        sigma=state["sigma"],
        closed_form_rel_diff=closed_rel,
        closed_form_ok=closed_rel < 1.0e-2,
        roots_found=n_roots,
    )
    return _finish("ext_melnikov_1", branch, n_cr, ship, res, prop, build, details)


# ---------------------------------------------------------------------------
# extended splitting about the damped cubic connection
# ---------------------------------------------------------------------------

def _sine_cubic_residual_fit() -> tuple[float, float, float]:
    """Least-squares fit of sin y - mu y (pi^2 - y^2) onto {y, y^3, y^5}
    over (-pi, pi)."""
    powers = (1, 3, 5)
    gram = np.array(
        [
            [2.0 * math.pi ** (i + j + 1) / (i + j + 1) for j in powers]
            for i in powers
        ]
    )
    sine_moments = {
        1: 2.0 * math.pi,
        3: 2.0 * (math.pi**3 - 6.0 * math.pi),
        5: 2.0 * (math.pi**5 - 20.0 * math.pi**3 + 120.0 * math.pi),
    }
    rhs = np.array(
        [
            sine_moments[i]
            + MU_CUBIC * 2.0 * math.pi ** (i + 4) * (1.0 / (i + 4) - 1.0 / (i + 2))
            for i in powers
        ]
    )
    s1, s3, s5 = np.linalg.solve(gram, rhs)
    return float(s1), float(s3), float(s5)


_SIGMA135 = _sine_cubic_residual_fit()


def melnikov_i_integral(n: int, beta: float, c_tilde: float) -> float:
    """Weighted logistic-front speed moments

        I_n = c^n int exp((beta - n c) tau) (1 + exp(-c tau))^(-2n) dtau

    over the real line, c = c_tilde, by the contiguous recursion from
    I_1 = pi beta csc(pi beta / c) sgn(c) / c.  Requires |beta| < |c|.
    """
    if n < 1:
        raise ValidationError(f"moment index must be >= 1, got {n}")
    if c_tilde == 0.0:
        raise ValidationError("c_tilde must be nonzero")
    ratio = beta / c_tilde
    if abs(ratio) >= 1.0:
        raise ConvergenceError(
            f"weighted front integral diverges: |beta/c| = {abs(ratio):.6g} >= 1"
        )
    if abs(ratio) < 1.0e-12:
        val = math.copysign(1.0, c_tilde)
    else:
        val = (
            math.pi
            * beta
            * math.copysign(1.0, c_tilde)
            / (c_tilde * math.sin(math.pi * ratio))
        )
    for m in range(1, n):
        val *= -(beta * beta - m * m * c_tilde * c_tilde) / (
            2.0 * m * (2.0 * m + 1.0) * c_tilde
        )
    return val


def melnikov_k_integral(n: int, beta: float, c_tilde: float) -> float:
    """Weighted logistic-front position moments

        K_n = c int exp((beta - c) tau) (1 + exp(-c tau))^(-(n+2)) dtau

    by the contiguous recursion from K_0 = I_1.  Requires |beta| < |c|.
    """
    if n < 0:
        raise ValidationError(f"moment index must be >= 0, got {n}")
    val = melnikov_i_integral(1, beta, c_tilde)
    for m in range(n):
        val *= ((m + 1.0) * c_tilde + beta) / ((m + 2.0) * c_tilde)
    return val


def _em2_melnikov(
    system: SurgeSystem, branch: str, sign: int, v_e: float, state: dict
) -> float:
    """Splitting integral about the damped cubic-restoring connection."""
    beta_lin = -fit_cubic_damping(system, v_e)  # true-signed linear damping

    def base_condition(rbar: float) -> float:
        geo = cubic_restoring(rbar, branch)
        half = geo.mu_tilde / 2.0
        return half + sign * beta_lin * math.sqrt(half) - geo.mu_tilde * geo.a_tilde

    r_edge = 2.0 * MU_CUBIC * math.pi**3 / (3.0 * math.sqrt(3.0)) * (1.0 - 1.0e-9)
    lo, hi = (-r_edge, 0.0) if sign < 0 else (0.0, r_edge)
    f_lo, f_hi = base_condition(lo), base_condition(hi)
    if f_lo * f_hi > 0.0:
        raise NoSolutionError(
            "no damped cubic base connection on the branch interval "
            f"(damping {beta_lin:.6g})"
        )
    r_base = float(brentq(base_condition, lo, hi, xtol=1e-14, rtol=8.9e-16))

    geo = cubic_restoring(r_base, branch)
    c_t = geo.c_tilde
    span = geo.a3 - geo.a1
    if abs(beta_lin) >= abs(c_t):
        raise ConvergenceError(
            f"weighted front integral diverges: damping {beta_lin:.6g} "
            f"outside the front-rate strip |c| = {abs(c_t):.6g}; perturb the "
            f"operating point"
        )
    ratio = beta_lin / c_t
    if abs(abs(ratio) - round(abs(ratio))) < 1.0e-9 and round(abs(ratio)) != 0:
        raise ConvergenceError(
            f"weighted front integral at a resonance pole (beta/c = {ratio:.9g}); "
            f"perturb the operating point"
        )

    # residual-damping fit over the branch speed interval
    m_lo, m_hi = (-v_e, 0.0) if sign < 0 else (0.0, v_e)
    m = [_interval_moment(m_lo, m_hi, p) for p in range(0, 8)]
    gram = np.array([[m[2], m[3]], [m[3], m[4]]])
    abar = system.abar
    rhs = np.empty(2)
    for i in (1, 2):
        acc = sum(abar[k - 1] * m[i + k] for k in range(1, MAX_ORDER + 1))
        rhs[i - 1] = acc - beta_lin * m[i + 1]
    b1, b2 = (float(x) for x in np.linalg.solve(gram, rhs))

    # restoring-residual polynomial recentred on the front: coefficients
    # of (s1 y + s3 y^3 + s5 y^5) at y = a1 + span * ytilde
    s1, s3, s5 = _SIGMA135
    poly = np.polynomial.Polynomial([0.0, s1, 0.0, s3, 0.0, s5])
    recentred = poly(np.polynomial.Polynomial([geo.a1, span]))
    b_p = recentred.coef
    if len(b_p) < 6:
        b_p = np.pad(b_p, (0, 6 - len(b_p)))

    sigma = system.rbar - r_base
    i_vals = [melnikov_i_integral(k, beta_lin, c_t) for k in (1, 2, 3)]
    k_vals = [melnikov_k_integral(p, beta_lin, c_t) for p in range(6)]
    m_val = (
        sigma * span * i_vals[0]
        - b1 * span**2 * i_vals[1]
        - b2 * span**3 * i_vals[2]
        - span * sum(b_p[p] * k_vals[p] for p in range(6))
    )
    state.update(
        beta=beta_lin,
        r_base=r_base,
        sigma=sigma,
        c_tilde=c_t,
        span=span,
        beta1=b1,
        beta2=b2,
        b_poly=tuple(float(x) for x in b_p),
    )
    return m_val


def ext_melnikov_2_threshold(
    ship: ShipModel,
    res: ResistanceModel,
    prop: PropulsionModel,
    wave: WaveCondition,
    branch: str = "surf",
    order: int = 5,
    f_w: float | None = None,
    v_e: float = 2.0,
) -> ThresholdResult:
    """Threshold from splitting about the damped cubic connection.

    The unperturbed orbit is the logistic front of the cubic-restoring
    model with the equivalent-linear damping kept non-perturbatively
    (exponential weight exp(beta tau)).  Perturbations are the thrust
    detuning sigma, the residual damping refit beta1 v + beta2 v^2, and
    the quintic least-squares residual of the true sine restoring; all
    integrals reduce to the weighted logistic moments I_n and K_n.
    """
    sign = _check_branch(branch)
    n_lo, n_hi, build = _prepare(ship, res, prop, wave, f_w, order)
    state: dict = {}

    def residual(n: float) -> float:
        return _em2_melnikov(build(n), branch, sign, v_e, state)

    n_cr, n_roots = _scan_root(residual, n_lo, n_hi, "ext_melnikov_2")
    residual(n_cr)
    details = dict(state, roots_found=n_roots, sigma135=_SIGMA135)
    return _finish("ext_melnikov_2", branch, n_cr, ship, res, prop, build, details)


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def compute_threshold(
    method: str,
    ship: ShipModel,
    res: ResistanceModel,
    prop: PropulsionModel,
    wave: WaveCondition,
    branch: str = "surf",
    order: int = 5,
    f_w: float | None = None,
    **kwargs,
) -> ThresholdResult:
    """Compute one threshold by method name (see ALL_METHODS)."""
    _check_branch(branch)
    if method == "newton":
        from .dynamics import heteroclinic_newton

        sol = heteroclinic_newton(
            ship, res, prop, wave, branch=branch, order=order, f_w=f_w, **kwargs
        )
        return ThresholdResult(
            method="newton",
            branch=branch,
            n_p=sol.n_p,
            fn_cr=sol.fn_cr,
            r_bar=sol.r_bar,
            details=dict(
                tau_i=sol.tau_i, residual=sol.residual, iterations=sol.iterations
            ),
        )
    if method == "bisection":
        from .dynamics import heteroclinic_bisection

        bracket = kwargs.pop("n_bracket", None)
        if bracket is None:
            seed = melnikov_threshold(
                ship, res, prop, wave, branch=branch, order=min(order, 5), f_w=f_w
            )
            n_lo, n_hi, _ = _prepare(ship, res, prop, wave, f_w, order)
            width = 0.08
            last_error: ValidationError | None = None
            for _ in range(4):
                lo = max(n_lo * 1.000001, seed.n_p * (1.0 - width))
                hi = min(n_hi * 0.999999, seed.n_p * (1.0 + width))
                try:
                    n_cr = heteroclinic_bisection(
                        ship, res, prop, wave, (lo, hi),
                        branch=branch, order=order, f_w=f_w, **kwargs,
                    )
                    break
                except ValidationError as exc:
                    last_error = exc
                    width *= 2.0
            else:
                raise ValidationError(
                    f"could not bracket the {branch} threshold around the "
                    f"order-5 splitting seed {seed.n_p:.6g}"
                ) from last_error
        else:
            n_cr = heteroclinic_bisection(
                ship, res, prop, wave, bracket,
                branch=branch, order=order, f_w=f_w, **kwargs,
            )
        _, _, build = _prepare(ship, res, prop, wave, f_w, order)
        return _finish("bisection", branch, n_cr, ship, res, prop, build, {})
    table = {
        "quad_damping": quad_damping_threshold,
        "cubic": cubic_threshold,
        "piecewise_linear": piecewise_linear_threshold,
        "melnikov1": lambda *a, **k: melnikov_threshold(*a, order=1, **k),
        "melnikov3": lambda *a, **k: melnikov_threshold(*a, order=3, **k),
        "melnikov5": lambda *a, **k: melnikov_threshold(*a, order=5, **k),
        "ext_melnikov_1": ext_melnikov_1_threshold,
        "ext_melnikov_2": ext_melnikov_2_threshold,
    }
    if method not in table:
        raise ValidationError(
            f"unknown method {method!r}; expected one of {ALL_METHODS}"
        )
    fn = table[method]
    if method.startswith("melnikov"):
        return fn(ship, res, prop, wave, branch=branch, f_w=f_w, **kwargs)
    return fn(ship, res, prop, wave, branch=branch, order=order, f_w=f_w, **kwargs)
