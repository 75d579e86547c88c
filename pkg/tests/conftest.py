"""Shared fixtures: the towing-tank reference case and synthetic hulls.

The reference ship is a 2.75 m destroyer model (DTMB 5415 form) whose
resistance and thrust regressions are used throughout the tests; its
sectional-area curve is synthetic (a parabolic strip curve scaled to the
62.6 kg displacement), so wave-force amplitudes derived from it are
plausible rather than measured.  Threshold anchors therefore pin the
wave force by calibration, not by the hull integral.
"""

from __future__ import annotations

import json
import math

import numpy as np
import pytest

from surfride import (
    PropulsionModel,
    ResistanceModel,
    ShipModel,
    Station,
    calibrate_wave_force,
    wave_for_ship,
)

MODEL_LENGTH = 2.75
MODEL_MASS = 62.6
MODEL_BEAM = 0.3687
MODEL_DRAFT = 0.1190
RESISTANCE_COEFFS = (9.407, -21.96, 19.56, -5.243, 0.4599)
PROPULSION_COEFFS = dict(
    kappa0=0.6882, kappa1=-0.4047, kappa2=-0.09504, t_p=0.15, w_p=0.06, d_p=0.1045
)
REFERENCE_LAMBDA = 1.25
REFERENCE_STEEPNESS = 0.04
LOWER_TANGENT_FN = 0.2602

FULL_SCALE = 142.17 / 2.75


def parabolic_stations(
    length: float,
    beam: float,
    draft: float,
    volume: float,
    n_stations: int = 41,
    midship_coeff: float = 0.82,
) -> tuple[Station, ...]:
    """Synthetic sectional-area curve: parabolic area, quartic draft taper,
    scaled so the strip integral reproduces the given displaced volume."""
    dx = length / n_stations
    xs = -length / 2.0 + dx * (np.arange(n_stations) + 0.5)
    areas = np.clip(
        midship_coeff * beam * draft * (1.0 - (2.0 * xs / length) ** 2), 1e-12, None
    )
    areas *= volume / float(np.sum(areas * dx))
    drafts = draft * np.sqrt(np.clip(1.0 - (2.0 * xs / length) ** 4, 0.01, None))
    return tuple(
        Station(x=float(x), area=float(a), draft=float(d), seg_len=dx)
        for x, a, d in zip(xs, areas, drafts)
    )


def build_model_ship(added_mass: float = 0.0) -> ShipModel:
    return ShipModel(
        length=MODEL_LENGTH,
        stations=parabolic_stations(
            MODEL_LENGTH, MODEL_BEAM, MODEL_DRAFT, MODEL_MASS / 1000.0
        ),
        mass=MODEL_MASS,
        added_mass=added_mass,
    )


def build_full_ship() -> tuple[ShipModel, ResistanceModel, PropulsionModel]:
    """Froude-scaled full-size counterpart of the model (142.17 m)."""
    length = MODEL_LENGTH * FULL_SCALE
    volume = (MODEL_MASS / 1000.0) * FULL_SCALE**3
    ship = ShipModel(
        length=length,
        stations=parabolic_stations(
            length, MODEL_BEAM * FULL_SCALE, MODEL_DRAFT * FULL_SCALE, volume
        ),
        mass=1000.0 * volume,
        added_mass=0.0,
    )
    res = ResistanceModel(
        *[
            c * FULL_SCALE ** (3.0 - (k + 1) / 2.0)
            for k, c in enumerate(RESISTANCE_COEFFS)
        ]
    )
    prop = PropulsionModel(
        **{**PROPULSION_COEFFS, "d_p": PROPULSION_COEFFS["d_p"] * FULL_SCALE}
    )
    return ship, res, prop


@pytest.fixture(scope="session")
def model_ship() -> ShipModel:
    return build_model_ship()


@pytest.fixture(scope="session")
def model_res() -> ResistanceModel:
    return ResistanceModel(*RESISTANCE_COEFFS)


@pytest.fixture(scope="session")
def model_prop() -> PropulsionModel:
    return PropulsionModel(**PROPULSION_COEFFS)


@pytest.fixture(scope="session")
def reference_wave(model_ship):
    return wave_for_ship(model_ship, REFERENCE_LAMBDA, REFERENCE_STEEPNESS)


@pytest.fixture(scope="session")
def calibrated_fw(model_ship, model_res, model_prop, reference_wave) -> float:
    """Wave force pinned so the lower tangent bifurcation sits at the
    reference Froude number 0.2602."""
    return calibrate_wave_force(
        model_ship, model_res, model_prop, reference_wave, LOWER_TANGENT_FN
    )


@pytest.fixture(scope="session")
def full_ship_models():
    return build_full_ship()


@pytest.fixture()
def ship_file(tmp_path):
    """Factory writing a ship definition JSON; returns the path."""

    def write(doc: dict, name: str = "ship.json") -> str:
        path = tmp_path / name
        path.write_text(json.dumps(doc, indent=2) + "\n")
        return str(path)

    return write


def model_ship_doc() -> dict:
    """Ship-file document matching the model-scale fixtures."""
    stations = parabolic_stations(
        MODEL_LENGTH, MODEL_BEAM, MODEL_DRAFT, MODEL_MASS / 1000.0
    )
    return {
        "length": MODEL_LENGTH,
        "mass": MODEL_MASS,
        "added_mass": 0.0,
        "rho": 1000.0,
        "stations": [
            {"x": st.x, "area": st.area, "draft": st.draft, "seg_len": st.seg_len}
            for st in stations
        ],
        "resistance": dict(zip(("r1", "r2", "r3", "r4", "r5"), RESISTANCE_COEFFS)),
        "propulsion": dict(PROPULSION_COEFFS),
    }


@pytest.fixture()
def model_ship_file(ship_file) -> str:
    return ship_file(model_ship_doc())
