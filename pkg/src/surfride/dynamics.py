"""Numerical phase-plane analysis: integration, asymptotic classification,
and the exact heteroclinic (surf-riding / wave-blocking) threshold.

The exact threshold is the propeller rate at which the unstable manifold
of one saddle of the pendulum-form surge system connects to the stable
manifold of the saddle one wave behind (surf-riding) or ahead
(wave-blocking).  Two independent solvers are provided:

* ``heteroclinic_newton`` — shooting from small eigenvector offsets of
  both saddles, matched at a mid-span section by a two-variable Newton
  iteration in (n_p, tau_i);
* ``heteroclinic_bisection`` — a slow, robust oracle that classifies the
  fate of the unstable manifold and bisects the propeller rate.

Wave-blocking is handled through the conjugacy (y, v, rbar) ->
(-y, -v, -rbar), which maps ascending connections onto the canonical
descending ones.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as _k
from .errors import ConvergenceError, NoSolutionError, ValidationError
from .hull import (
    PropulsionModel,
    ResistanceModel,
    ShipModel,
    resistance,
    self_propulsion_speed,
    thrust,
)
from .surge import (
    PhasePoint,
    SurgeSystem,
    WaveCondition,
    build_system,
    rate_window,
)

V_DIVERGENCE = 1.0e3

_BRANCHES = ("surf", "block")


def _check_branch(branch: str) -> str:
    if branch not in _BRANCHES:
        raise ValidationError(f"branch must be one of {_BRANCHES}, got {branch!r}")
    return branch


# ---------------------------------------------------------------------------
# fixed-step integration with error diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntegrationResult:
    """Sampled trajectory plus step-halving diagnostics.

    error_estimate: max phase-distance between the dtau and dtau/2 runs at
    the sampled times (a practical global-error proxy).
    energy_drift: max |H - H(0)| along the run, H = v^2/2 - cos y - rbar y.
    For damped systems H is not conserved; the value is still reported and
    is only meaningful as a conservation check when all abar vanish.
    """

    taus: np.ndarray
    ys: np.ndarray
    vs: np.ndarray
    dtau: float
    error_estimate: float
    energy_drift: float


def integrate(
    system: SurgeSystem,
    p0: PhasePoint,
    tau_end: float,
    dtau: float = 1.0e-3,
    stride: int | None = None,
) -> IntegrationResult:
    """RK4 trajectory from p0 over [0, tau_end] at fixed step dtau.

    Raises ConvergenceError when |v| exceeds the divergence guard.
    """
    if tau_end <= 0.0:
        raise ValidationError(f"tau_end must be > 0, got {tau_end}")
    if dtau <= 0.0 or dtau > tau_end:
        raise ValidationError(f"dtau must be in (0, tau_end], got {dtau}")
    n_steps = max(1, int(round(tau_end / dtau)))
    if stride is None:
        stride = max(1, n_steps // 4000)
    abar = system.abar_array
    taus, ys, vs, status = _k.trajectory(
        p0.y, p0.v, n_steps, stride, dtau, system.rbar, abar, V_DIVERGENCE
    )
    if status == _k.DIVERGED:
        raise ConvergenceError(
            f"trajectory diverged (|v| > {V_DIVERGENCE:g}) before tau = {tau_end:g}"
        )
    taus2, ys2, vs2, status2 = _k.trajectory(
        p0.y, p0.v, 2 * n_steps, 2 * stride, 0.5 * dtau, system.rbar, abar, V_DIVERGENCE
    )
    if status2 == _k.DIVERGED:
        raise ConvergenceError(
            f"trajectory diverged (|v| > {V_DIVERGENCE:g}) before tau = {tau_end:g}"
        )
    m = min(len(ys), len(ys2))
    err = float(
        np.max(np.hypot(ys[:m] - ys2[:m], vs[:m] - vs2[:m])) if m else 0.0
    )
    h = 0.5 * vs * vs - np.cos(ys) - system.rbar * ys
    drift = float(np.max(np.abs(h - h[0])))
    return IntegrationResult(
        taus=taus, ys=ys, vs=vs, dtau=dtau, error_estimate=err, energy_drift=drift
    )


def integrate_dimensional(
    ship: ShipModel,
    res: ResistanceModel,
    prop: PropulsionModel,
    wave: WaveCondition,
    n_p: float,
    f_w: float,
    xi0: float,
    u0: float,
    t_end: float,
    dt: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """RK4 on the dimensional wave-frame surge equation (reference path).

        dxi/dt = u - c_w
        (m + m_x) du/dt = T_e(u; n) - R(u) - f_w sin(k_w xi)

    Used to cross-check the nondimensional propagator; deliberately
    independent of the pendulum-form code.
    """
    mass = ship.total_mass
    c_w = wave.celerity
    k_w = wave.k_w

    def rhs(xi: float, u: float) -> tuple[float, float]:
        du = (thrust(prop, u, n_p) - resistance(res, u) - f_w * math.sin(k_w * xi)) / mass
        return u - c_w, du

    n_steps = max(1, int(round(t_end / dt)))
    ts = np.empty(n_steps + 1)
    xis = np.empty(n_steps + 1)
    us = np.empty(n_steps + 1)
    ts[0], xis[0], us[0] = 0.0, xi0, u0
    xi, u = xi0, u0
    for i in range(1, n_steps + 1):
        k1x, k1u = rhs(xi, u)
        k2x, k2u = rhs(xi + 0.5 * dt * k1x, u + 0.5 * dt * k1u)
        k3x, k3u = rhs(xi + 0.5 * dt * k2x, u + 0.5 * dt * k2u)
        k4x, k4u = rhs(xi + dt * k3x, u + dt * k3u)
        xi += (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        u += (dt / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        ts[i], xis[i], us[i] = i * dt, xi, u
    return ts, xis, us


# ---------------------------------------------------------------------------
# asymptotic classification
# ---------------------------------------------------------------------------

class AsymptoticClass(enum.Enum):
    SURF_RIDING = "surf_riding"
    OVERTAKEN_PERIODIC = "overtaken_periodic"


def classify_asymptotics(
    system: SurgeSystem,
    p0: PhasePoint,
    dtau: float = 1.0e-3,
    tau_max: float = 1.0e4,
    capture_tol: float = 1.0e-4,
    period_rtol: float = 1.0e-3,
) -> AsymptoticClass:
    """Asymptotic fate of the trajectory through p0.

    surf_riding: the state enters a phase-distance ball of radius
    capture_tol around the stable (wave-fixed) equilibrium, modulo one
    wavelength.  overtaken_periodic: y passes three consecutive
    wavelengths in one direction with period-converged crossing intervals
    (relative tolerance period_rtol).  Runs that settle neither way by
    tau_max, or that diverge, raise ConvergenceError.
    """
    if abs(system.rbar) <= 1.0:
        y_stable = system.stable_equilibrium()
    else:
        y_stable = math.nan
    code, tau = _k.classify(
        p0.y,
        p0.v,
        dtau,
        tau_max,
        system.rbar,
        system.abar_array,
        y_stable,
        capture_tol,
        period_rtol,
        V_DIVERGENCE,
    )
    if code == _k.CAPTURED:
        return AsymptoticClass.SURF_RIDING
    if code == _k.ROTATING:
        return AsymptoticClass.OVERTAKEN_PERIODIC
    if code == _k.DIVERGED:
        raise ConvergenceError(
            f"trajectory diverged (|v| > {V_DIVERGENCE:g}) at tau = {tau:.6g}"
        )
    raise ConvergenceError(
        f"asymptotic class undecided after tau = {tau_max:g} "
        f"(capture_tol = {capture_tol:g}, period_rtol = {period_rtol:g})"
    )


# ---------------------------------------------------------------------------
# saddle geometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SaddlePair:
    """The two saddles bounding a candidate heteroclinic connection.

    y_alpha is the departure saddle, y_omega = y_alpha -+ 2 pi the arrival
    saddle (minus for surf-riding, plus for wave-blocking); both are kept
    unwrapped so the connection spans exactly one wavelength.  mu_alpha is
    the positive (unstable) eigenvalue at departure, mu_omega the negative
    (stable) eigenvalue at arrival, both in nondimensional time.  h_alpha
    and h_omega are the eigenvector offsets of norm eps_h used to seed the
    shooting legs.  x_alpha / x_omega give the saddle locations as
    (xi_G / lambda, u [m/s]).
    """

    branch: str
    y_alpha: float
    y_omega: float
    mu_alpha: float
    mu_omega: float
    h_alpha: PhasePoint
    h_omega: PhasePoint
    x_alpha: tuple[float, float]
    x_omega: tuple[float, float]
    eps_h: float


def _saddle_eigs(system: SurgeSystem, y0: float) -> tuple[float, float]:
    """(unstable, stable) eigenvalues of [[0, 1], [-cos y0, -abar1]]."""
    a1 = system.abar[0]
    cos0 = math.cos(y0)
    disc = a1 * a1 - 4.0 * cos0
    if disc <= 0.0 or cos0 >= 0.0:
        raise NoSolutionError(
            f"point y = {y0:.6g} is not a saddle (cos y = {cos0:.6g})"
        )
    sq = math.sqrt(disc)
    return (-a1 + sq) / 2.0, (-a1 - sq) / 2.0


def saddle_pair(
    system: SurgeSystem, branch: str = "surf", eps_h: float = 1.0e-5
) -> SaddlePair:
    """Saddle endpoints and shooting offsets for the requested branch."""
    _check_branch(branch)
    if abs(system.rbar) >= 1.0:
        raise NoSolutionError(
            f"no saddle pair: |rbar| = {abs(system.rbar):.6g} >= 1"
        )
    asin_r = math.asin(system.rbar)
    if branch == "surf":
        y_alpha = math.pi - asin_r
        y_omega = y_alpha - 2.0 * math.pi
        sign_out, sign_in = -1.0, +1.0
    else:
        y_alpha = -math.pi - asin_r
        y_omega = y_alpha + 2.0 * math.pi
        sign_out, sign_in = +1.0, -1.0
    mu_a, _ = _saddle_eigs(system, y_alpha)
    _, mu_o = _saddle_eigs(system, y_omega)
    na = math.hypot(1.0, mu_a)
    no = math.hypot(1.0, mu_o)
    h_alpha = PhasePoint(y=sign_out * eps_h / na, v=sign_out * eps_h * mu_a / na)
    h_omega = PhasePoint(y=sign_in * eps_h / no, v=sign_in * eps_h * mu_o / no)

    def to_paper(y: float) -> tuple[float, float]:
        return y / (2.0 * math.pi), system.c_w

    return SaddlePair(
        branch=branch,
        y_alpha=y_alpha,
        y_omega=y_omega,
        mu_alpha=mu_a,
        mu_omega=mu_o,
        h_alpha=h_alpha,
        h_omega=h_omega,
        x_alpha=to_paper(y_alpha),
        x_omega=to_paper(y_omega),
        eps_h=eps_h,
    )


# ---------------------------------------------------------------------------
# heteroclinic connection: Newton shooting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeteroclinicSolution:
    """A converged saddle-to-saddle connection.

    n_p: critical propeller rate [1/s]; tau_i: half duration of the
    matched shooting legs (nondimensional); residual: phase-plane distance
    between the two legs at the matching time; fn_cr: nominal Froude
    number of the calm-water speed at n_p.
    """

    branch: str
    n_p: float
    tau_i: float
    saddles: SaddlePair
    residual: float
    fn_cr: float
    r_bar: float
    iterations: int


def _legs_to_section(
    system: SurgeSystem, eps_h: float, dtau: float, tau_max: float
) -> tuple[float, float, float, float] | None:
    """Shoot both legs of the canonical (descending) connection to the
    mid-span section y_mid = y_alpha - pi.

    Returns (v_forward, t_forward, v_backward, t_backward) at the first
    section crossing, or None when either leg misses the section.
    """
    sp = saddle_pair(system, "surf", eps_h)
    y_mid = sp.y_alpha - math.pi
    abar = system.abar_array
    status_f, t_f, v_f = _k.section_crossing(
        sp.y_alpha + sp.h_alpha.y,
        sp.h_alpha.v,
        y_mid,
        -1,
        dtau,
        tau_max,
        system.rbar,
        abar,
        V_DIVERGENCE,
    )
    if status_f != _k.CROSSED:
        return None
    status_b, t_b, v_b = _k.section_crossing(
        sp.y_omega + sp.h_omega.y,
        sp.h_omega.v,
        y_mid,
        +1,
        -dtau,
        tau_max,
        system.rbar,
        abar,
        V_DIVERGENCE,
    )
    if status_b != _k.CROSSED:
        return None
    return v_f, t_f, v_b, t_b


def _shooting_gap(
    system: SurgeSystem, tau_i: float, eps_h: float, dtau: float
) -> tuple[float, float]:
    """G(n, tau_i): forward leg minus backward leg after duration tau_i."""
    sp = saddle_pair(system, "surf", eps_h)
    abar = system.abar_array
    yf, vf = _k.final_state(
        sp.y_alpha + sp.h_alpha.y, sp.h_alpha.v, tau_i, dtau, system.rbar, abar
    )
    yb, vb = _k.final_state(
        sp.y_omega + sp.h_omega.y, sp.h_omega.v, -tau_i, dtau, system.rbar, abar
    )
    return yf - yb, vf - vb


def _build_canonical(
    ship: ShipModel,
    res: ResistanceModel,
    prop: PropulsionModel,
    wave: WaveCondition,
    n_p: float,
    order: int,
    f_w: float | None,
    branch: str,
) -> SurgeSystem:
    system = build_system(ship, res, prop, wave, n_p, order=order, f_w=f_w)
    return system if branch == "surf" else system.mirrored()


def heteroclinic_newton(
    ship: ShipModel,
    res: ResistanceModel,
    prop: PropulsionModel,
    wave: WaveCondition,
    n_guess: float | None = None,
    branch: str = "surf",
    order: int = 5,
    f_w: float | None = None,
    eps_h: float = 1.0e-5,
    dtau: float = 1.0e-4,
    max_iter: int = 50,
) -> HeteroclinicSolution:
    """Exact threshold by two-variable Newton shooting.

    Unknowns are the propeller rate n_p and the half-leg duration tau_i.
    The forward leg starts eps_h along the unstable eigenvector of the
    departure saddle, the backward (time-reversed) leg eps_h along the
    stable eigenvector of the arrival saddle; G(n, tau_i) is their
    phase-plane gap at the common matching time.  A one-dimensional
    section pre-solve (matching leg velocities at mid-span over a bracket
    of rates) supplies the seed, then Newton polishes both unknowns with a
    central finite-difference Jacobian.
    """
    _check_branch(branch)

    def canonical(n: float) -> SurgeSystem:
        return _build_canonical(ship, res, prop, wave, n, order, f_w, branch)

    n_low, n_high = rate_window(ship, res, prop, wave, f_w=f_w)

    # --- 1-D pre-solve on the mid-span section -----------------------------
    if n_guess is not None and not (n_low < n_guess < n_high):
        raise ValidationError(
            f"n_guess = {n_guess:.6g} outside the equilibria window "
            f"({n_low:.6g}, {n_high:.6g})"
        )
    tau_scan = 400.0

    def section_gap(n: float) -> float | None:
        legs = _legs_to_section(canonical(n), eps_h, dtau, tau_scan)
        if legs is None:
            return None
        v_f, _, v_b, _ = legs
        return v_f - v_b

    margin = 1.0e-4 * (n_high - n_low)
    if n_guess is not None:
        half = 0.08 * (n_high - n_low)
        lo = max(n_low + margin, n_guess - half)
        hi = min(n_high - margin, n_guess + half)
    else:
        lo, hi = n_low + margin, n_high - margin
    grid = np.linspace(lo, hi, 25)
    vals = [(n, section_gap(float(n))) for n in grid]
    vals = [(n, g) for n, g in vals if g is not None]
    bracket = None
    for (n1, g1), (n2, g2) in zip(vals, vals[1:]):
        if g1 == 0.0:
            bracket = (n1, n1)
            break
        if g1 * g2 < 0.0:
            bracket = (n1, n2)
            break
    if bracket is None and n_guess is None:
        raise ConvergenceError(
            f"no section sign change on ({lo:.6g}, {hi:.6g}) for branch {branch!r}"
        )
    if bracket is None:
        # widen to the full equilibria window before giving up
        grid = np.linspace(n_low + margin, n_high - margin, 49)
        vals = [(float(n), section_gap(float(n))) for n in grid]
        vals = [(n, g) for n, g in vals if g is not None]
        for (n1, g1), (n2, g2) in zip(vals, vals[1:]):
            if g1 * g2 < 0.0:
                bracket = (n1, n2)
                break
        if bracket is None:
            raise ConvergenceError(
                f"no section sign change inside the equilibria window for "
                f"branch {branch!r}"
            )
    if bracket[0] == bracket[1]:
        n0 = bracket[0]
    else:
        from scipy.optimize import brentq

        n0 = float(
            brentq(section_gap, bracket[0], bracket[1], xtol=1e-12, rtol=1e-10)
        )
    legs = _legs_to_section(canonical(n0), eps_h, dtau, tau_scan)
    if legs is None:
        raise ConvergenceError("section legs lost after pre-solve")
    _, t_f, _, t_b = legs
    tau_i = 0.5 * (t_f + t_b)

    # --- 2-D Newton polish ---------------------------------------------------
    n = n0
    scale = 1.0e-7

    def gap(nv: float, tv: float) -> np.ndarray:
        return np.array(_shooting_gap(canonical(nv), tv, eps_h, dtau))

    g = gap(n, tau_i)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        dn = scale * max(1.0, abs(n))
        dt = scale * max(1.0, abs(tau_i))
        j_n = (gap(n + dn, tau_i) - gap(n - dn, tau_i)) / (2.0 * dn)
        j_t = (gap(n, tau_i + dt) - gap(n, tau_i - dt)) / (2.0 * dt)
        jac = np.column_stack([j_n, j_t])
        try:
            step = np.linalg.solve(jac, -g)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(
                f"singular shooting Jacobian at n = {n:.8g}"
            ) from exc
        lam = 1.0
        for _ in range(10):
            n_new = n + lam * step[0]
            tau_new = tau_i + lam * step[1]
            if n_low < n_new < n_high and tau_new > 0.0:
                g_new = gap(n_new, tau_new)
                if np.linalg.norm(g_new) < np.linalg.norm(g):
                    break
            lam *= 0.5
        else:
            n_new, tau_new = n + lam * step[0], tau_i + lam * step[1]
            g_new = gap(n_new, tau_new)
        rel = max(
            abs(n_new - n) / max(1.0, abs(n_new)),
            abs(tau_new - tau_i) / max(1.0, abs(tau_new)),
        )
        n, tau_i, g = n_new, tau_new, g_new
        if rel < 1.0e-10:
            break
    residual = float(np.linalg.norm(g))
    if residual > 1.0e-8:
        raise ConvergenceError(
            f"heteroclinic Newton stalled: residual {residual:.3e} after "
            f"{iterations} iterations (branch {branch!r})"
        )

    system = build_system(ship, res, prop, wave, n, order=order, f_w=f_w)
    saddles = saddle_pair(system, branch, eps_h)
    u_cr = self_propulsion_speed(res, prop, n)
    return HeteroclinicSolution(
        branch=branch,
        n_p=float(n),
        tau_i=float(tau_i),
        saddles=saddles,
        residual=residual,
        fn_cr=ship.froude_number(u_cr),
        r_bar=system.rbar,
        iterations=iterations,
    )


# ---------------------------------------------------------------------------
# heteroclinic connection: bisection oracle
# ---------------------------------------------------------------------------

def _manifold_fate(
    system: SurgeSystem,
    eps_h: float,
    dtau: float,
    tau_max: float,
) -> int:
    """CAPTURED / ROTATING fate of the canonical descending unstable
    manifold."""
    sp = saddle_pair(system, "surf", eps_h)
    code, tau = _k.classify(
        sp.y_alpha + sp.h_alpha.y,
        sp.h_alpha.v,
        dtau,
        tau_max,
        system.rbar,
        system.abar_array,
        system.stable_equilibrium(),
        1.0e-4,
        1.0e-3,
        V_DIVERGENCE,
    )
    if code in (_k.CAPTURED, _k.ROTATING):
        return code
    raise ConvergenceError(
        f"manifold fate undecided at n = {system.n_p:.8g} "
        f"(code {code}, tau {tau:.4g})"
    )


def heteroclinic_bisection(
    ship: ShipModel,
    res: ResistanceModel,
    prop: PropulsionModel,
    wave: WaveCondition,
    n_bracket: tuple[float, float],
    branch: str = "surf",
    order: int = 5,
    f_w: float | None = None,
    rel_tol: float = 1.0e-6,
    eps_h: float = 1.0e-5,
    dtau: float = 1.0e-3,
    tau_max: float = 4.0e3,
) -> float:
    """Threshold rate by bisecting the fate of the unstable manifold.

    n_bracket must straddle the threshold: the manifold is captured by the
    stable equilibrium on one side and rotates past the next saddle on the
    other.  Independent of the Newton solver; used as its oracle.
    """
    _check_branch(branch)
    lo, hi = float(n_bracket[0]), float(n_bracket[1])
    if not lo < hi:
        raise ValidationError(f"invalid bracket: ({lo:.6g}, {hi:.6g})")

    def fate(n: float) -> int:
        system = _build_canonical(ship, res, prop, wave, n, order, f_w, branch)
        return _manifold_fate(system, eps_h, dtau, tau_max)

    f_lo = fate(lo)
    f_hi = fate(hi)
    if f_lo == f_hi:
        raise ValidationError(
            f"bracket ({lo:.6g}, {hi:.6g}) does not straddle the threshold: "
            f"both endpoints classify the same"
        )
    while (hi - lo) > rel_tol * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        if fate(mid) == f_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
