"""Nondimensional surge dynamics of a ship in pure following seas.

In the wave frame (xi_G the position of the ship's centre relative to the
wave, u the speed over ground, c_w the wave celerity) the surge equation
of motion expanded about u = c_w reads

    (m + m_x) xi_G'' + sum_j c_j (xi_G')^j + f_w sin(k_w xi_G)
        = T_e(c_w; n) - R(c_w),

where xi_G' = u - c_w and the c_j collect resistance and thrust
derivatives.  Scaling y = k_w xi_G and tau = sqrt(q) t with
q = f_w k_w / (m + m_x) turns this into a damped, torqued pendulum:

    y'' + sum_k Abar_k (y')^k + sin(y) = r_bar,
    r_bar = (T_e(c_w; n) - R(c_w)) / f_w.

Surf-riding equilibria (the ship locked at wave celerity) exist iff
|r_bar| <= 1.  This module builds the pendulum-form system from a
ship/wave description, locates its equilibria, and finds the tangent
(equilibrium appearance/disappearance) propeller rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NoSolutionError, ValidationError
from .hull import (
    PropulsionModel,
    ResistanceModel,
    ShipModel,
    fk_amplitude,
    rate_for_speed,
    resistance,
    thrust,
)

MAX_ORDER = 5


# ---------------------------------------------------------------------------
# wave description and phase-plane point
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WaveCondition:
    """A regular following wave tied to a ship length.

    Constructed from the wavelength-to-ship-length ratio and wave steepness
    H/lambda; the derived fields (wavelength, wave number, deep-water
    celerity, amplitude) are mutually consistent by construction.
    """

    lambda_ratio: float
    steepness: float
    ship_length: float
    gravity: float = 9.81
    wavelength: float = field(init=False)
    k_w: float = field(init=False)
    celerity: float = field(init=False)
    amplitude: float = field(init=False)

    def __post_init__(self) -> None:
        if self.lambda_ratio <= 0.0:
            raise ValidationError(f"lambda/L must be > 0, got {self.lambda_ratio}")
        if self.steepness < 0.0:
            raise ValidationError(f"steepness H/lambda must be >= 0, got {self.steepness}")
        if self.ship_length <= 0.0:
            raise ValidationError(f"ship length must be > 0, got {self.ship_length}")
        if self.gravity <= 0.0:
            raise ValidationError(f"gravity must be > 0, got {self.gravity}")
        wavelength = self.lambda_ratio * self.ship_length
        object.__setattr__(self, "wavelength", wavelength)
        object.__setattr__(self, "k_w", 2.0 * math.pi / wavelength)
        object.__setattr__(self, "celerity", math.sqrt(self.gravity / self.k_w))
        object.__setattr__(self, "amplitude", 0.5 * self.steepness * wavelength)


def wave_for_ship(
    ship: ShipModel, lambda_ratio: float, steepness: float
) -> WaveCondition:
    """WaveCondition matching the ship's length and gravity."""
    return WaveCondition(
        lambda_ratio=lambda_ratio,
        steepness=steepness,
        ship_length=ship.length,
        gravity=ship.gravity,
    )


@dataclass(frozen=True)
class PhasePoint:
    """Nondimensional phase-plane state: y = k_w xi_G, v = dy/dtau."""

    y: float
    v: float


# ---------------------------------------------------------------------------
# the pendulum-form surge system
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SurgeSystem:
    """Pendulum form  y'' + sum_k abar[k-1] (y')^k + sin y = rbar.

    Carries the nondimensionalisation constants (q, k_w, c_w, f_w) needed
    to map back to dimensional position/speed, plus the inputs that
    produced it (n_p, order, total_mass).
    """

    abar: tuple[float, float, float, float, float]
    rbar: float
    q: float
    k_w: float
    c_w: float
    f_w: float
    n_p: float
    order: int
    total_mass: float

    # -- dynamics ----------------------------------------------------------

    def damping(self, v: float) -> float:
        """sum_k abar[k-1] v^k."""
        acc = 0.0
        for a in reversed(self.abar):
            acc = (acc + a) * v
        return acc

    def acceleration(self, y: float, v: float) -> float:
        """dv/dtau = rbar - damping(v) - sin y."""
        return self.rbar - self.damping(v) - math.sin(y)

    def hamiltonian(self, y: float, v: float) -> float:
        """v^2/2 - cos y - rbar*y; conserved when all abar vanish."""
        return 0.5 * v * v - math.cos(y) - self.rbar * y

    @property
    def abar_array(self) -> np.ndarray:
        return np.asarray(self.abar, dtype=float)

    # -- equilibria ---------------------------------------------------------

    def stable_equilibrium(self) -> float:
        """The node/focus equilibrium asin(rbar) in (-pi/2, pi/2)."""
        if abs(self.rbar) > 1.0:
            raise NoSolutionError(
                f"no equilibria: |rbar| = {abs(self.rbar):.6g} > 1"
            )
        return math.asin(self.rbar)

    def saddle(self) -> float:
        """The saddle equilibrium pi - asin(rbar), wrapped to (-pi, pi]."""
        if abs(self.rbar) > 1.0:
            raise NoSolutionError(
                f"no equilibria: |rbar| = {abs(self.rbar):.6g} > 1"
            )
        return _wrap_angle(math.pi - math.asin(self.rbar))

    # -- coordinate maps ----------------------------------------------------

    def time_from_tau(self, tau: float) -> float:
        return tau / math.sqrt(self.q)

    def to_dimensional(self, p: PhasePoint) -> tuple[float, float]:
        """(xi_G [m], u [m/s]) from a nondimensional phase point."""
        xi = p.y / self.k_w
        u = self.c_w + math.sqrt(self.q) * p.v / self.k_w
        return xi, u

    def from_dimensional(self, xi: float, u: float) -> PhasePoint:
        y = self.k_w * xi
        v = (u - self.c_w) * self.k_w / math.sqrt(self.q)
        return PhasePoint(y=y, v=v)

    def mirrored(self) -> "SurgeSystem":
        """The conjugate system under (y, v, rbar) -> (-y, -v, -rbar).

        Odd damping coefficients are preserved, even ones change sign;
        ascending (wave-blocking) orbits of the original system map to
        descending (surf-riding) orbits of the mirror.
        """
        flipped = tuple(
            a if (k % 2 == 1) else -a for k, a in enumerate(self.abar, start=1)
        )
        return replace(self, abar=flipped, rbar=-self.rbar)


def _wrap_angle(y: float) -> float:
    """Wrap to the principal interval (-pi, pi]."""
    w = math.fmod(y + math.pi, 2.0 * math.pi)
    if w <= 0.0:
        w += 2.0 * math.pi
    return w - math.pi


# ---------------------------------------------------------------------------
# building the system from ship + wave
# ---------------------------------------------------------------------------

def surge_coefficients(
    res: ResistanceModel, prop: PropulsionModel, n_p: float
) -> tuple[float, float, float, float, float]:
    """Wave-frame damping polynomial coefficients c_j.

    Expanding T_e(u; n) - R(u) about any speed leaves the polynomial
    structure intact; in the wave frame the damping polynomial in
    (u - c_w) starts from c_1 = r1 - tau1 n and c_2 = r2 - tau2, with the
    cubic and higher terms carrying the resistance coefficients unchanged.
    """
    return (
        res.r1 - prop.tau1 * n_p,
        res.r2 - prop.tau2,
        res.r3,
        res.r4,
        res.r5,
    )


def build_system(
    ship: ShipModel,
    res: ResistanceModel,
    prop: PropulsionModel,
    wave: WaveCondition,
    n_p: float,
    order: int = MAX_ORDER,
    f_w: float | None = None,
) -> SurgeSystem:
    """Assemble the nondimensional pendulum system at propeller rate n_p.

    order truncates the damping polynomial (1 <= order <= 5): the wave-frame
    coefficients a_k = (1/(m+m_x)) sum_{j>=k} c_j C(j,k) c_w^(j-k) are kept
    for k <= order.  f_w overrides the strip-theory Froude-Krylov amplitude
    (used by calibrated runs); otherwise the amplitude comes from the
    ship's sectional-area curve.
    """
    if n_p <= 0.0:
        raise ValidationError(f"propeller rate n_p must be > 0, got {n_p}")
    if not 1 <= order <= MAX_ORDER:
        raise ValidationError(f"damping order must be in 1..{MAX_ORDER}, got {order}")
    if f_w is None:
        f_w, _ = fk_amplitude(ship, wave.k_w, wave.amplitude)
    if f_w <= 0.0:
        raise ValidationError(f"wave force amplitude must be > 0, got {f_w}")

    mass = ship.total_mass
    c_w = wave.celerity
    k_w = wave.k_w
    cj = surge_coefficients(res, prop, n_p)

    a = [0.0] * MAX_ORDER
    for k in range(1, order + 1):
        s = 0.0
        for j in range(k, MAX_ORDER + 1):
            s += cj[j - 1] * math.comb(j, k) * c_w ** (j - k)
        a[k - 1] = s / mass

    q = f_w * k_w / mass
    abar = tuple(
        a[k - 1] * q ** (0.5 * k - 1.0) / k_w ** (k - 1) for k in range(1, MAX_ORDER + 1)
    )
    rbar = (thrust(prop, c_w, n_p) - resistance(res, c_w)) / f_w
    return SurgeSystem(
        abar=abar,
        rbar=rbar,
        q=q,
        k_w=k_w,
        c_w=c_w,
        f_w=f_w,
        n_p=n_p,
        order=order,
        total_mass=mass,
    )


# ---------------------------------------------------------------------------
# equilibria and tangent (saddle-node) propeller rates
# ---------------------------------------------------------------------------

def equilibria(system: SurgeSystem) -> list[tuple[float, str]]:
    """Equilibria (y, kind) in the principal interval (-pi, pi].

    kind is "stable" (node or focus) or "saddle", decided by the
    eigenvalues of the linearisation [[0, 1], [-cos y0, -abar1]].  Returns
    an empty list when |rbar| > 1 and the two degenerate points merged
    into one entry at |rbar| = 1.
    """
    r = system.rbar
    if abs(r) > 1.0:
        return []
    ys = math.asin(r)
    if abs(r) == 1.0:
        return [(_wrap_angle(ys), "degenerate")]
    out = []
    a1 = system.abar[0]
    for y0 in (ys, math.pi - ys):
        cos0 = math.cos(y0)
        if cos0 < 0.0:
            # eigenvalues of [[0, 1], [-cos y0, -a1]] are real with
            # opposite signs
            kind = "saddle"
        elif a1 > 0.0:
            kind = "stable"
        elif a1 == 0.0:
            kind = "stable"  # undamped centre
        else:
            kind = "unstable"
        out.append((_wrap_angle(y0), kind))
    out.sort(key=lambda t: t[0])
    return out


def thrust_excess(
    res: ResistanceModel, prop: PropulsionModel, c_w: float, n_p: float
) -> float:
    """T_e(c_w; n_p) - R(c_w) [N]."""
    return thrust(prop, c_w, n_p) - resistance(res, c_w)


def _rate_for_excess(
    res: ResistanceModel, prop: PropulsionModel, c_w: float, target: float
) -> float:
    """Largest n with T_e(c_w; n) - R(c_w) = target."""
    a = prop.tau0
    b = prop.tau1 * c_w
    c = prop.tau2 * c_w * c_w - resistance(res, c_w) - target
    if a == 0.0:
        if b == 0.0:
            raise NoSolutionError("degenerate thrust model: tau0 = 0 and tau1 c_w = 0")
        n = -c / b
    else:
        disc = b * b - 4.0 * a * c
        if disc < 0.0:
            raise NoSolutionError(
                f"no propeller rate achieves thrust excess {target:.6g} N at c_w"
            )
        sq = math.sqrt(disc)
        n = max((-b + sq) / (2.0 * a), (-b - sq) / (2.0 * a))
    if n <= 0.0:
        raise NoSolutionError(
            f"no positive propeller rate achieves thrust excess {target:.6g} N at c_w"
        )
    return float(n)


def tangent_bifurcation_rates(
    ship: ShipModel,
    res: ResistanceModel,
    prop: PropulsionModel,
    wave: WaveCondition,
    f_w: float | None = None,
) -> tuple[float, float]:
    """Propeller rates (n_low, n_high) where equilibria appear/disappear.

    Surf-riding equilibria exist for rbar in [-1, 1]; the boundaries are
    T_e(c_w; n) - R(c_w) = -f_w (n_low) and +f_w (n_high).
    """
    if f_w is None:
        f_w, _ = fk_amplitude(ship, wave.k_w, wave.amplitude)
    if f_w <= 0.0:
        raise ValidationError(f"wave force amplitude must be > 0, got {f_w}")
    n_low = _rate_for_excess(res, prop, wave.celerity, -f_w)
    n_high = _rate_for_excess(res, prop, wave.celerity, +f_w)
    return n_low, n_high


def rate_window(
    ship: ShipModel,
    res: ResistanceModel,
    prop: PropulsionModel,
    wave: WaveCondition,
    f_w: float | None = None,
) -> tuple[float, float]:
    """Open rate interval holding every threshold: from the lower tangent
    bifurcation up to the upper one.

    A strong enough wave keeps equilibria alive down to zero rate (the
    thrust deficit at the celerity never reaches -f_w); the window then
    starts at 0.
    """
    if f_w is None:
        f_w, _ = fk_amplitude(ship, wave.k_w, wave.amplitude)
    if f_w <= 0.0:
        raise ValidationError(f"wave force amplitude must be > 0, got {f_w}")
    n_high = _rate_for_excess(res, prop, wave.celerity, +f_w)
    try:
        n_low = _rate_for_excess(res, prop, wave.celerity, -f_w)
    except NoSolutionError:
        n_low = 0.0
    return n_low, n_high


def rate_for_froude(
    ship: ShipModel, res: ResistanceModel, prop: PropulsionModel, fn: float
) -> float:
    """Propeller rate whose calm-water (nominal) Froude number is fn."""
    return rate_for_speed(res, prop, ship.speed_for_froude(fn))


def calibrate_wave_force(
    ship: ShipModel,
    res: ResistanceModel,
    prop: PropulsionModel,
    wave: WaveCondition,
    fn_lower_tangent: float,
) -> float:
    """Wave-force amplitude f_w placing the lower tangent rate at the
    given nominal Froude number.

    At the lower tangent, T_e(c_w; n) - R(c_w) = -f_w with n the rate whose
    calm-water speed is fn_lower_tangent * sqrt(g L).
    """
    n_star = rate_for_froude(ship, res, prop, fn_lower_tangent)
    f_w = resistance(res, wave.celerity) - thrust(prop, wave.celerity, n_star)
    if f_w <= 0.0:
        raise NoSolutionError(
            "calibration failed: the requested lower-tangent speed implies a "
            "non-positive wave force amplitude"
        )
    return float(f_w)
