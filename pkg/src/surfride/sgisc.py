"""Surf-riding / broaching vulnerability assessment, levels 1 and 2.

Level 1 screens by ship length and service Froude number alone.  Level
2 exposes the ship to a wave scatter table: every sea state is mapped
onto a grid of encountered regular waves (wavelength ratio r, steepness
s) with a statistical weight, each regular wave gets a critical Froude
number from the order-5 separatrix-splitting condition driven by the
hull-pressure wave force, and the weighted fraction of encountered
waves whose critical Froude number the service speed exceeds forms the
vulnerability index C, compared against the standard R_SR = 0.005.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _scatter_table
from .errors import NoSolutionError, ValidationError
from .hull import (
    G_DEFAULT,
    PropulsionModel,
    ResistanceModel,
    ShipModel,
    local_wave_force,
    self_propulsion_speed,
)

R_SR = 0.005
LEVEL1_LENGTH = 200.0
LEVEL1_FROUDE = 0.3

_SPECTRAL_NU = 0.425
_T01_FACTOR = 1.086

# order-5 splitting constants: weights of the damping-polynomial
# coefficients in the critical-rate condition (velocity moments of the
# connecting orbit)
_SPLIT_WEIGHTS = (8.0, -4.0 * math.pi, 64.0 / 3.0, -12.0 * math.pi, 1024.0 / 15.0)


def worker_threads() -> int:
    """Worker-thread count from the SURFRIDE_THREADS environment
    variable (default 1).  Results are identical for any setting."""
    raw = os.environ.get("SURFRIDE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValidationError(
            f"SURFRIDE_THREADS must be an integer, got {raw!r}"
        ) from exc
    if n < 1:
        raise ValidationError(f"SURFRIDE_THREADS must be >= 1, got {n}")
    return n


# ---------------------------------------------------------------------------
# level 1
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Level1Result:
    length: float
    fn_service: float
    not_vulnerable: bool


def level1_check(ship: ShipModel, fn_service: float) -> Level1Result:
    """Level-1 screen: not vulnerable when the ship is at least 200 m
    long or the service Froude number does not exceed 0.3."""
    if fn_service < 0.0:
        raise ValidationError(f"fn_service must be >= 0, got {fn_service}")
    ok = ship.length >= LEVEL1_LENGTH or fn_service <= LEVEL1_FROUDE
    return Level1Result(
        length=ship.length, fn_service=fn_service, not_vulnerable=ok
    )


# ---------------------------------------------------------------------------
# scatter table and local wave statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WaveScatterTable:
    """Sea-state occurrence counts over (significant wave height,
    zero-crossing period) bin centres."""

    hs: np.ndarray
    tz: np.ndarray
    counts: np.ndarray

    def __post_init__(self) -> None:
        hs = np.asarray(self.hs, dtype=float)
        tz = np.asarray(self.tz, dtype=float)
        counts = np.asarray(self.counts, dtype=float)
        if counts.shape != (hs.size, tz.size):
            raise ValidationError(
                f"counts shape {counts.shape} does not match "
                f"{hs.size} heights x {tz.size} periods"
            )
        if np.any(counts < 0.0):
            raise ValidationError("scatter counts must be >= 0")
        if not counts.sum() > 0.0:
            raise ValidationError("scatter counts must not all vanish")
        object.__setattr__(self, "hs", hs)
        object.__setattr__(self, "tz", tz)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def standard(cls) -> "WaveScatterTable":
        return cls(
            hs=_scatter_table.HS_BINS.copy(),
            tz=_scatter_table.TZ_BINS.copy(),
            counts=_scatter_table.COUNTS.copy(),
        )

    @classmethod
    def from_csv(cls, path) -> "WaveScatterTable":
        """Load a scatter table from CSV: a header row whose first cell
        is a label and whose remaining cells are the zero-crossing
        period bin centres, then one row per significant-wave-height
        bin (centre first, counts after)."""
        import csv
        from pathlib import Path

        path = Path(path)
        try:
            with path.open(newline="") as handle:
                rows = [row for row in csv.reader(handle) if row]
        except OSError as exc:
            raise ValidationError(f"cannot read scatter table {path}: {exc}") from exc
        if len(rows) < 2 or len(rows[0]) < 2:
            raise ValidationError(
                f"scatter table {path} needs a period header row and "
                "at least one height row"
            )
        try:
            tz = np.array([float(cell) for cell in rows[0][1:]])
            hs = np.array([float(row[0]) for row in rows[1:]])
            counts = np.array(
                [[float(cell) for cell in row[1:]] for row in rows[1:]]
            )
        except (ValueError, IndexError) as exc:
            raise ValidationError(
                f"scatter table {path} has a non-numeric or ragged cell: {exc}"
            ) from exc
        if counts.shape != (hs.size, tz.size):
            raise ValidationError(
                f"scatter table {path} is ragged: expected "
                f"{hs.size} x {tz.size} counts, got {counts.shape}"
            )
        return cls(hs=hs, tz=tz, counts=counts)

    @property
    def total(self) -> float:
        return float(self.counts.sum())

    @property
    def weights(self) -> np.ndarray:
        """Occurrence probability of each sea state (counts normalised
        by the table total)."""
        return self.counts / self.total


@dataclass(frozen=True)
class LocalWaveGrid:
    """Regular-wave grid: wavelength-to-ship-length ratios r and wave
    steepnesses s, with the cell sizes used as integration weights."""

    r: np.ndarray
    s: np.ndarray
    dr: float
    ds: float

    @classmethod
    def standard(cls) -> "LocalWaveGrid":
        return cls(
            r=np.linspace(1.0, 3.0, 81),
            s=np.linspace(0.03, 0.15, 101),
            dr=0.025,
            ds=0.0012,
        )


def local_wave_pdf(
    ship_length: float,
    hs: float,
    tz: float,
    grid: LocalWaveGrid | None = None,
    gravity: float = G_DEFAULT,
) -> np.ndarray:
    """Probability mass of encountering each regular wave of the grid
    within one sea state (narrow-band statistics of the wave field met
    along the track, cell sizes folded in).

    Returns an array of shape (len(grid.r), len(grid.s)).
    """
    if grid is None:
        grid = LocalWaveGrid.standard()
    if ship_length <= 0.0:
        raise ValidationError(f"ship_length must be > 0, got {ship_length}")
    if hs <= 0.0 or tz <= 0.0:
        raise ValidationError(
            f"hs and tz must be > 0, got hs = {hs}, tz = {tz}"
        )
    nu = _SPECTRAL_NU
    t01 = _T01_FACTOR * tz
    r = np.asarray(grid.r)[:, None]
    s = np.asarray(grid.s)[None, :]
    root1p = math.sqrt(1.0 + nu * nu)
    prefactor = (
        4.0
        * math.sqrt(gravity)
        / (math.pi * nu)
        * ship_length**2.5
        * t01
        / hs**3
        * (root1p / (1.0 + root1p))
        * grid.dr
        * grid.ds
    )
    detune = 1.0 - np.sqrt(gravity * t01 * t01 / (2.0 * math.pi * r * ship_length))
    expo = -2.0 * (ship_length * r * s / hs) ** 2 * (1.0 + (detune / nu) ** 2)
    return prefactor * s * s * r**1.5 * np.exp(expo)


# ---------------------------------------------------------------------------
# critical rate / speed for one regular wave
# ---------------------------------------------------------------------------

def _imo_quadratic(
    ship: ShipModel,
    res: ResistanceModel,
    prop: PropulsionModel,
    wave_force: np.ndarray,
    k_w: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Coefficients (A, B, C) of the order-5 splitting condition as a
    quadratic in the propeller rate, broadcast over wave force and
    wavenumber arrays."""
    mass = ship.total_mass
    c = np.sqrt(ship.gravity / k_w)
    r1, r2, r3, r4, r5 = res.coeffs
    sq1 = np.sqrt(wave_force * k_w * mass)
    a0 = -prop.tau1 / sq1
    a1 = (
        r1 + 2.0 * r2 * c + 3.0 * r3 * c**2 + 4.0 * r4 * c**3 + 5.0 * r5 * c**4
        - 2.0 * prop.tau2 * c
    ) / sq1
    a2 = (r2 + 3.0 * r3 * c + 6.0 * r4 * c**2 + 10.0 * r5 * c**3 - prop.tau2) / (
        k_w * mass
    )
    a3 = (r3 + 4.0 * r4 * c + 10.0 * r5 * c**2) * np.sqrt(
        wave_force / (k_w * mass) ** 3
    )
    a4 = (r4 + 5.0 * r5 * c) * wave_force / (k_w * mass) ** 2
    a5 = r5 * np.sqrt(wave_force**3 / (k_w * mass) ** 5)
    w1, w2, w3, w4, w5 = _SPLIT_WEIGHTS
    two_pi = 2.0 * math.pi
    coef_a = two_pi * prop.tau0 / wave_force
    coef_b = two_pi * prop.tau1 * c / wave_force + w1 * a0
    r_at_c = c * (r1 + c * (r2 + c * (r3 + c * (r4 + c * r5))))
    coef_c = (
        two_pi * (prop.tau2 * c**2 - r_at_c) / wave_force
        + w1 * a1 + w2 * a2 + w3 * a3 + w4 * a4 + w5 * a5
    )
    return coef_a, coef_b, coef_c


def critical_revs_imo(
    ship: ShipModel,
    res: ResistanceModel,
    prop: PropulsionModel,
    r_ratio: float,
    steepness: float,
) -> float:
    """Critical propeller rate for one regular wave (wavelength ratio
    r_ratio, steepness): the larger real root of the order-5 splitting
    condition with the hull-pressure wave force."""
    f_w = local_wave_force(ship, r_ratio, steepness)
    k_w = 2.0 * math.pi / (r_ratio * ship.length)
    coef_a, coef_b, coef_c = _imo_quadratic(
        ship, res, prop, np.float64(f_w), np.float64(k_w)
    )
    disc = coef_b * coef_b - 4.0 * coef_a * coef_c
    if disc < 0.0:
        raise NoSolutionError(
            f"no real critical rate for wave r = {r_ratio:.6g}, "
            f"s = {steepness:.6g} (discriminant {disc:.6g})"
        )
    n_cr = float((-coef_b + math.sqrt(disc)) / (2.0 * coef_a))
    if n_cr <= 0.0:
        raise NoSolutionError(
            f"critical rate is not positive for wave r = {r_ratio:.6g}, "
            f"s = {steepness:.6g} (got {n_cr:.6g})"
        )
    return n_cr


def critical_speed(
    ship: ShipModel,
    res: ResistanceModel,
    prop: PropulsionModel,
    r_ratio: float,
    steepness: float,
) -> float:
    """Critical Froude number for one regular wave: calm-water
    self-propulsion speed at the critical rate, over sqrt(g L)."""
    n_cr = critical_revs_imo(ship, res, prop, r_ratio, steepness)
    u_cr = self_propulsion_speed(res, prop, n_cr)
    return ship.froude_number(u_cr)


# ---------------------------------------------------------------------------
# level 2
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Level2Result:
    """Outcome of the level-2 assessment.

    c_value is the weighted fraction of encountered regular waves whose
    critical Froude number the service speed strictly exceeds;
    not_vulnerable means c_value <= r_sr.  no_root_cells counts grid
    waves without a usable critical rate (they contribute zero);
    monotonicity_violations counts grid points where the critical
    Froude number increases with steepness at fixed wavelength.
    """

    fn_service: float
    c_value: float
    r_sr: float
    not_vulnerable: bool
    no_root_cells: int
    monotonicity_violations: int
    fn_cr_grid: np.ndarray = field(repr=False)
    seastate_contributions: np.ndarray = field(repr=False)


class Level2Evaluator:
    """Precomputed level-2 machinery for one ship.

    The critical-Froude-number grid and the per-sea-state encounter
    weights depend only on the ship, so they are computed once here;
    :meth:`assess` then prices any number of service speeds cheaply.
    """

    def __init__(
        self,
        ship: ShipModel,
        res: ResistanceModel,
        prop: PropulsionModel,
        scatter: WaveScatterTable | None = None,
        grid: LocalWaveGrid | None = None,
    ) -> None:
        self.ship = ship
        self.scatter = scatter if scatter is not None else WaveScatterTable.standard()
        self.grid = grid if grid is not None else LocalWaveGrid.standard()
        self.fn_cr, self.no_root_cells = _critical_speed_grid(
            ship, res, prop, self.grid
        )
        diffs = np.diff(self.fn_cr, axis=1)
        self.monotonicity_violations = int(
            np.count_nonzero(diffs[np.isfinite(diffs)] > 1.0e-12)
        )
        # encounter probability mass per sea state, stacked over the
        # scatter table (zero-count sea states are skipped)
        weights = self.scatter.weights
        self._w_local = np.zeros(weights.shape + self.fn_cr.shape)
        for a in range(weights.shape[0]):
            for b in range(weights.shape[1]):
                if weights[a, b] == 0.0:
                    continue
                self._w_local[a, b] = local_wave_pdf(
                    ship.length,
                    float(self.scatter.hs[a]),
                    float(self.scatter.tz[b]),
                    self.grid,
                    gravity=ship.gravity,
                )

    def assess(self, fn_service: float) -> Level2Result:
        if fn_service < 0.0:
            raise ValidationError(f"fn_service must be >= 0, got {fn_service}")
        exceeded = np.zeros(self.fn_cr.shape, dtype=bool)
        finite = np.isfinite(self.fn_cr)
        exceeded[finite] = fn_service > self.fn_cr[finite]
        inner = np.tensordot(self._w_local, exceeded.astype(float), axes=2)
        contributions = self.scatter.weights * inner
        c_value = float(contributions.sum())
        return Level2Result(
            fn_service=fn_service,
            c_value=c_value,
            r_sr=R_SR,
            not_vulnerable=c_value <= R_SR,
            no_root_cells=self.no_root_cells,
            monotonicity_violations=self.monotonicity_violations,
            fn_cr_grid=self.fn_cr,
            seastate_contributions=contributions,
        )


def _critical_speed_grid(
    ship: ShipModel,
    res: ResistanceModel,
    prop: PropulsionModel,
    grid: LocalWaveGrid,
) -> tuple[np.ndarray, int]:
    """Critical Froude number for every grid wave, NaN where the
    splitting condition has no usable (real, positive) rate.  Returns
    the grid and the count of such cells."""
    from .hull import _fk_moments

    length = ship.length
    k_r = 2.0 * math.pi / (np.asarray(grid.r) * length)
    fc, fs = _fk_moments(ship.stations, k_r)
    amp = np.hypot(fc, fs)
    zeta = np.asarray(grid.s)[None, :] * (np.asarray(grid.r)[:, None] * length) / 2.0
    f_w = ship.rho * ship.gravity * zeta * k_r[:, None] * amp[:, None]
    coef_a, coef_b, coef_c = _imo_quadratic(ship, res, prop, f_w, k_r[:, None])
    coef_a = np.broadcast_to(coef_a, f_w.shape)
    coef_b = np.broadcast_to(coef_b, f_w.shape)
    coef_c = np.broadcast_to(coef_c, f_w.shape)
    disc = coef_b * coef_b - 4.0 * coef_a * coef_c
    n_cr = np.full(f_w.shape, np.nan)
    real = disc >= 0.0
    n_cr[real] = (-coef_b[real] + np.sqrt(disc[real])) / (2.0 * coef_a[real])
    valid = real & (n_cr > 0.0)
    n_cr[~valid] = np.nan

    fn_cr = np.full(f_w.shape, np.nan)
    rows = np.arange(f_w.shape[0])

    def solve_rows(row_chunk: np.ndarray) -> None:
        for i in row_chunk:
            for j in range(f_w.shape[1]):
                if not valid[i, j]:
                    continue
                u = self_propulsion_speed(res, prop, float(n_cr[i, j]))
                fn_cr[i, j] = ship.froude_number(u)

    n_workers = worker_threads()
    if n_workers == 1:
        solve_rows(rows)
    else:
        chunks = np.array_split(rows, n_workers)
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(solve_rows, chunks))
    return fn_cr, int(np.size(valid) - np.count_nonzero(valid))


def level2_assess(
    ship: ShipModel,
    res: ResistanceModel,
    prop: PropulsionModel,
    fn_service: float,
    scatter: WaveScatterTable | None = None,
    grid: LocalWaveGrid | None = None,
) -> Level2Result:
    """Level-2 vulnerability index against a wave scatter table.

    C = sum over sea states of W2 * sum over grid waves of w_ij C2_ij,
    where W2 is the sea-state occurrence probability, w_ij the local
    encounter probability mass, and C2_ij = 1 exactly when the service
    Froude number strictly exceeds the critical Froude number of grid
    wave (i, j).  Not vulnerable when C <= 0.005.
    """
    return Level2Evaluator(ship, res, prop, scatter, grid).assess(fn_service)
