"""Ship definition files.

A ship is a single JSON document with fixed field names and SI units:

    {
      "length": 2.75,            # ship length [m]
      "mass": 62.6,              # ship mass [kg]
      "added_mass": 0.0,         # surge added mass [kg] (required)
      "rho": 1000.0,             # water density [kg/m^3] (optional)
      "stations": [              # sectional-area strips, aft to fore
        {"x": -1.34, "area": 0.002, "draft": 0.05, "seg_len": 0.067},
        ...
      ],
      "resistance": {"r1": ..., "r2": ..., "r3": ..., "r4": ..., "r5": ...},
      "propulsion": {"kappa0": ..., "kappa1": ..., "kappa2": ...,
                     "t_p": ..., "w_p": ..., "d_p": ...}
    }
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import ValidationError
from .hull import (
    RHO_DEFAULT,
    PropulsionModel,
    ResistanceModel,
    ShipModel,
    Station,
)

_TOP_KEYS = {
    "length", "mass", "added_mass", "rho", "stations", "resistance", "propulsion",
}
_STATION_KEYS = ("x", "area", "draft", "seg_len")
_RESISTANCE_KEYS = ("r1", "r2", "r3", "r4", "r5")
_PROPULSION_KEYS = ("kappa0", "kappa1", "kappa2", "t_p", "w_p", "d_p")


def _require(mapping: dict, key: str, where: str) -> object:
    if not isinstance(mapping, dict):
        raise ValidationError(f"{where} must be a JSON object")
    if key not in mapping:
        ctx = f"{where}.{key}" if where != "ship file" else key
        raise ValidationError(f"ship file is missing required key '{ctx}'")
    return mapping[key]


def _number(mapping: dict, key: str, where: str) -> float:
    value = _require(mapping, key, where)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        ctx = f"{where}.{key}" if where != "ship file" else key
        raise ValidationError(f"ship file key '{ctx}' must be a number, got {value!r}")
    return float(value)


def load_ship(path: str | Path) -> tuple[ShipModel, ResistanceModel, PropulsionModel]:
    """Load a ship definition file; see the module docstring for the format.

    Raises ValidationError for unreadable files, malformed JSON (with the
    line and column of the defect), and missing or mistyped keys (naming
    the key).
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read ship file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"ship file {path} is not valid JSON: {exc.msg} "
            f"(line {exc.lineno}, column {exc.colno})"
        ) from exc
    if not isinstance(doc, dict):
        raise ValidationError(f"ship file {path} must contain a JSON object")
    unknown = sorted(set(doc) - _TOP_KEYS)
    if unknown:
        raise ValidationError(
            f"ship file {path} has unknown keys: {', '.join(unknown)}"
        )

    length = _number(doc, "length", "ship file")
    mass = _number(doc, "mass", "ship file")
    added_mass = _number(doc, "added_mass", "ship file")
    rho = _number(doc, "rho", "ship file") if "rho" in doc else RHO_DEFAULT

    raw_stations = _require(doc, "stations", "ship file")
    if not isinstance(raw_stations, list):
        raise ValidationError("ship file key 'stations' must be an array")
    stations = []
    for idx, item in enumerate(raw_stations):
        where = f"stations[{idx}]"
        if not isinstance(item, dict):
            raise ValidationError(f"ship file entry {where} must be an object")
        extra = sorted(set(item) - set(_STATION_KEYS))
        if extra:
            raise ValidationError(
                f"ship file entry {where} has unknown keys: {', '.join(extra)}"
            )
        stations.append(
            Station(**{key: _number(item, key, where) for key in _STATION_KEYS})
        )

    raw_res = _require(doc, "resistance", "ship file")
    res = ResistanceModel(
        **{key: _number(raw_res, key, "resistance") for key in _RESISTANCE_KEYS}
    )
    raw_prop = _require(doc, "propulsion", "ship file")
    prop = PropulsionModel(
        rho=rho,
        **{key: _number(raw_prop, key, "propulsion") for key in _PROPULSION_KEYS},
    )
    ship = ShipModel(
        length=length,
        stations=tuple(stations),
        mass=mass,
        added_mass=added_mass,
        rho=rho,
    )
    return ship, res, prop
