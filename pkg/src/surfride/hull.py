"""Hull, propulsion, and wave-force primitives.

Everything dimensional lives here: the ship description (mass, added mass,
sectional-area stations), the calm-water resistance polynomial, the
propeller thrust model, the self-propulsion balance, and the Froude-Krylov
surge force exerted by a regular following wave.

Conventions
-----------
* SI units throughout: m, kg, s, N.
* Station positions x are measured from amidships, positive towards the bow.
* u is the ship speed over ground, n the propeller rate in rev/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import NoSolutionError, ValidationError

G_DEFAULT = 9.81        # gravitational acceleration [m/s^2]
RHO_DEFAULT = 1000.0    # water density [kg/m^3]


# ---------------------------------------------------------------------------
# ship description
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Station:
    """One transverse strip of the submerged hull."""

    x: float        # longitudinal position of the strip centre [m]
    area: float     # submerged sectional area [m^2]
    draft: float    # local draft [m]
    seg_len: float  # hull length represented by this strip [m]

    def __post_init__(self) -> None:
        if not math.isfinite(self.x):
            raise ValidationError(f"station x must be finite, got {self.x}")
        if not (math.isfinite(self.area) and self.area >= 0.0):
            raise ValidationError(f"station area must be >= 0, got {self.area}")
        if not (math.isfinite(self.draft) and self.draft >= 0.0):
            raise ValidationError(f"station draft must be >= 0, got {self.draft}")
        if not (math.isfinite(self.seg_len) and self.seg_len > 0.0):
            raise ValidationError(f"station seg_len must be > 0, got {self.seg_len}")


@dataclass(frozen=True)
class ResistanceModel:
    """Calm-water resistance R(u) = r1 u + r2 u^2 + ... + r5 u^5 [N].

    ``u_valid`` optionally records the top speed covered by the regression
    (informational only).
    """

    r1: float
    r2: float = 0.0
    r3: float = 0.0
    r4: float = 0.0
    r5: float = 0.0
    u_valid: float | None = None

    def __post_init__(self) -> None:
        for name in ("r1", "r2", "r3", "r4", "r5"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"resistance coefficient {name} must be finite")
        if self.u_valid is not None and self.u_valid <= 0.0:
            raise ValidationError("u_valid must be > 0 when given")

    @property
    def coeffs(self) -> tuple[float, float, float, float, float]:
        return (self.r1, self.r2, self.r3, self.r4, self.r5)

    def __call__(self, u: float) -> float:
        return resistance(self, u)


@dataclass(frozen=True)
class PropulsionModel:
    """Propeller thrust T_e = (1 - t_p) rho n^2 d_p^4 K_T(J).

    K_T(J) = kappa0 + kappa1 J + kappa2 J^2 with advance ratio
    J = u (1 - w_p) / (n d_p).  Expanding K_T yields the equivalent
    quadratic form T_e = tau0 n^2 + tau1 u n + tau2 u^2; the tau
    coefficients are fixed at construction.
    """

    kappa0: float
    kappa1: float
    kappa2: float
    t_p: float
    w_p: float
    d_p: float
    rho: float = RHO_DEFAULT
    tau0: float = field(init=False, repr=False)
    tau1: float = field(init=False, repr=False)
    tau2: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        for name in ("kappa0", "kappa1", "kappa2"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"thrust coefficient {name} must be finite")
        if not 0.0 <= self.t_p < 1.0:
            raise ValidationError(f"thrust deduction t_p must be in [0, 1), got {self.t_p}")
        if not 0.0 <= self.w_p < 1.0:
            raise ValidationError(f"wake fraction w_p must be in [0, 1), got {self.w_p}")
        if self.d_p <= 0.0:
            raise ValidationError(f"propeller diameter d_p must be > 0, got {self.d_p}")
        if self.rho <= 0.0:
            raise ValidationError(f"water density rho must be > 0, got {self.rho}")
        pull = (1.0 - self.t_p) * self.rho
        wake = 1.0 - self.w_p
        object.__setattr__(self, "tau0", self.kappa0 * pull * self.d_p**4)
        object.__setattr__(self, "tau1", self.kappa1 * pull * wake * self.d_p**3)
        object.__setattr__(self, "tau2", self.kappa2 * pull * wake**2 * self.d_p**2)

    def advance_ratio(self, u: float, n: float) -> float:
        if n <= 0.0:
            raise ValidationError(f"propeller rate n must be > 0, got {n}")
        return u * (1.0 - self.w_p) / (n * self.d_p)

    def kt(self, j: float) -> float:
        return self.kappa0 + self.kappa1 * j + self.kappa2 * j * j


@dataclass(frozen=True)
class ShipModel:
    """Hull mass properties and sectional-area curve.

    The station strips, when present, must tile the hull: consecutive x
    strictly increasing, and the total strip span equal to the ship length
    within 1%.  An empty station list is allowed; only wave-force
    evaluations require stations.
    """

    length: float
    stations: tuple[Station, ...] = ()
    mass: float = 0.0
    added_mass: float = 0.0
    rho: float = RHO_DEFAULT
    gravity: float = G_DEFAULT

    def __post_init__(self) -> None:
        if not (math.isfinite(self.length) and self.length > 0.0):
            raise ValidationError(f"ship length must be > 0, got {self.length}")
        if not (math.isfinite(self.mass) and self.mass > 0.0):
            raise ValidationError(f"ship mass must be > 0, got {self.mass}")
        if not (math.isfinite(self.added_mass) and self.added_mass >= 0.0):
            raise ValidationError(f"added mass must be >= 0, got {self.added_mass}")
        if self.rho <= 0.0:
            raise ValidationError(f"water density rho must be > 0, got {self.rho}")
        if self.gravity <= 0.0:
            raise ValidationError(f"gravity must be > 0, got {self.gravity}")
        stations = tuple(self.stations)
        object.__setattr__(self, "stations", stations)
        if stations:
            xs = [st.x for st in stations]
            if any(b <= a for a, b in zip(xs, xs[1:])):
                raise ValidationError("stations must be ordered by strictly increasing x")
            aft_edge = stations[0].x - 0.5 * stations[0].seg_len
            fore_edge = stations[-1].x + 0.5 * stations[-1].seg_len
            span = fore_edge - aft_edge
            if abs(span - self.length) > 0.01 * self.length:
                raise ValidationError(
                    f"station strips span {span:.6g} m; expected the ship length "
                    f"{self.length:.6g} m within 1%"
                )

    @property
    def total_mass(self) -> float:
        """Ship mass plus surge added mass [kg]."""
        return self.mass + self.added_mass

    def froude_number(self, u: float) -> float:
        return u / math.sqrt(self.length * self.gravity)

    def speed_for_froude(self, fn: float) -> float:
        return fn * math.sqrt(self.length * self.gravity)


# ---------------------------------------------------------------------------
# calm-water force balance
# ---------------------------------------------------------------------------

def resistance(model: ResistanceModel, u: float) -> float:
    """Calm-water resistance R(u) [N]."""
    return u * (
        model.r1 + u * (model.r2 + u * (model.r3 + u * (model.r4 + u * model.r5)))
    )


def resistance_slope(model: ResistanceModel, u: float) -> float:
    """dR/du [N s/m]."""
    return model.r1 + u * (
        2.0 * model.r2
        + u * (3.0 * model.r3 + u * (4.0 * model.r4 + u * 5.0 * model.r5))
    )


def thrust(model: PropulsionModel, u: float, n: float) -> float:
    """Effective propeller thrust T_e(u; n) [N].

    Non-positive propeller rates are rejected: the K_T(J) form and the
    quadratic form agree only on n > 0, and the surge model is used
    exclusively in that regime.
    """
    if n <= 0.0:
        raise ValidationError(f"propeller rate n must be > 0, got {n}")
    return model.tau0 * n * n + model.tau1 * u * n + model.tau2 * u * u


def thrust_from_kt(model: PropulsionModel, u: float, n: float) -> float:
    """T_e via the K_T(J) form; identical to ``thrust`` on n > 0."""
    j = model.advance_ratio(u, n)
    return (1.0 - model.t_p) * model.rho * n * n * model.d_p**4 * model.kt(j)


def thrust_partial_n(model: PropulsionModel, u: float, n: float) -> float:
    """dT_e/dn [N s]."""
    return 2.0 * model.tau0 * n + model.tau1 * u


def self_propulsion_speed(
    res: ResistanceModel,
    prop: PropulsionModel,
    n: float,
    u_max: float | None = None,
) -> float:
    """Calm-water speed u with T_e(u; n) = R(u).

    The returned root satisfies |T_e - R| < 1e-9 * max(1, R(u)).
    """
    if n <= 0.0:
        raise ValidationError(f"propeller rate n must be > 0, got {n}")

    def excess(u: float) -> float:
        return thrust(prop, u, n) - resistance(res, u)

    lo = 0.0
    if excess(lo) <= 0.0:
        raise NoSolutionError(
            f"propeller produces no net thrust at rest for n = {n:.6g} 1/s"
        )
    hi = u_max if u_max is not None else 1.0
    for _ in range(200):
        if excess(hi) < 0.0:
            break
        if u_max is not None:
            raise NoSolutionError(
                f"no self-propulsion balance below u = {u_max:.6g} m/s for n = {n:.6g}"
            )
        hi *= 2.0
    else:
        raise NoSolutionError(
            f"thrust exceeds resistance at all probed speeds for n = {n:.6g}"
        )
    u = brentq(excess, lo, hi, xtol=1e-12, rtol=8.9e-16, maxiter=200)
    tol = 1e-9 * max(1.0, abs(resistance(res, u)))
    if abs(excess(u)) > tol:
        raise NoSolutionError(
            f"self-propulsion balance did not refine below tolerance at n = {n:.6g}"
        )
    return float(u)


def rate_for_speed(res: ResistanceModel, prop: PropulsionModel, u: float) -> float:
    """Propeller rate n > 0 whose calm-water balance speed is u.

    Solves tau0 n^2 + tau1 u n + (tau2 u^2 - R(u)) = 0, larger root.
    """
    if u < 0.0:
        raise ValidationError(f"speed u must be >= 0, got {u}")
    a = prop.tau0
    b = prop.tau1 * u
    c = prop.tau2 * u * u - resistance(res, u)
    if a == 0.0:
        if b == 0.0:
            raise NoSolutionError("degenerate thrust model: tau0 = 0 and tau1 u = 0")
        n = -c / b
    else:
        disc = b * b - 4.0 * a * c
        if disc < 0.0:
            raise NoSolutionError(
                f"no real propeller rate balances the ship at u = {u:.6g} m/s"
            )
        sq = math.sqrt(disc)
        n = max((-b + sq) / (2.0 * a), (-b - sq) / (2.0 * a))
    if n <= 0.0:
        raise NoSolutionError(
            f"no positive propeller rate balances the ship at u = {u:.6g} m/s"
        )
    return float(n)


# ---------------------------------------------------------------------------
# Froude-Krylov surge force
# ---------------------------------------------------------------------------

def _fk_moments(
    stations: tuple[Station, ...], wave_numbers: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Cosine/sine strip moments of the sectional-area curve.

    For each wave number k:
      Fc(k) = sum_m S(x_m) exp(-k d(x_m)/2) cos(k x_m) dx_m
      Fs(k) = sum_m S(x_m) exp(-k d(x_m)/2) sin(k x_m) dx_m
    """
    k = np.atleast_1d(np.asarray(wave_numbers, dtype=float))[:, None]
    x = np.array([st.x for st in stations], dtype=float)[None, :]
    w = np.array([st.area * st.seg_len for st in stations], dtype=float)[None, :]
    d = np.array([st.draft for st in stations], dtype=float)[None, :]
    damp = w * np.exp(-0.5 * k * d)
    fc = np.sum(damp * np.cos(k * x), axis=1)
    fs = np.sum(damp * np.sin(k * x), axis=1)
    return fc, fs


def fk_amplitude(ship: ShipModel, k_w: float, zeta_w: float) -> tuple[float, float]:
    """Froude-Krylov surge force amplitude f_w [N] and phase eps [rad].

    The surge wave force is f_w sin(k_w xi_G + eps) with f_w >= 0.  The
    phase depends on where the station grid puts its origin; the amplitude
    does not.
    """
    if not ship.stations:
        raise ValidationError("Froude-Krylov force needs at least one station")
    if k_w <= 0.0:
        raise ValidationError(f"wave number k_w must be > 0, got {k_w}")
    if zeta_w < 0.0:
        raise ValidationError(f"wave amplitude zeta_w must be >= 0, got {zeta_w}")
    fc, fs = _fk_moments(ship.stations, np.array([k_w]))
    scale = ship.rho * ship.gravity * zeta_w * k_w
    f_w = scale * math.hypot(float(fc[0]), float(fs[0]))
    eps = math.atan2(float(fs[0]), float(fc[0]))
    return f_w, eps


def local_wave_force(ship: ShipModel, r_i: float, s_j: float) -> float:
    """Surge wave-force amplitude [N] for a local regular wave.

    The local wave has length r_i * L, height s_j * r_i * L, and therefore
    wave number 2 pi / (r_i L) and amplitude s_j r_i L / 2.
    """
    if r_i <= 0.0:
        raise ValidationError(f"wavelength ratio r_i must be > 0, got {r_i}")
    if s_j <= 0.0:
        raise ValidationError(f"wave steepness s_j must be > 0, got {s_j}")
    wavelength = r_i * ship.length
    k = 2.0 * math.pi / wavelength
    zeta = 0.5 * s_j * wavelength
    f_w, _ = fk_amplitude(ship, k, zeta)
    return f_w


def refine_stations(stations: tuple[Station, ...], factor: int) -> tuple[Station, ...]:
    """Resample the sectional-area curve onto a ``factor`` times finer grid.

    Areas and drafts are interpolated linearly between station centres; the
    overall strip span is preserved.
    """
    if factor < 1:
        raise ValidationError(f"refinement factor must be >= 1, got {factor}")
    if not stations:
        raise ValidationError("cannot refine an empty station list")
    if factor == 1:
        return tuple(stations)
    aft = stations[0].x - 0.5 * stations[0].seg_len
    fore = stations[-1].x + 0.5 * stations[-1].seg_len
    n_fine = len(stations) * factor
    seg = (fore - aft) / n_fine
    centres = aft + seg * (np.arange(n_fine) + 0.5)
    x0 = np.array([st.x for st in stations])
    areas = np.interp(centres, x0, np.array([st.area for st in stations]))
    drafts = np.interp(centres, x0, np.array([st.draft for st in stations]))
    return tuple(
        Station(x=float(xc), area=float(a), draft=float(d), seg_len=float(seg))
        for xc, a, d in zip(centres, areas, drafts)
    )
