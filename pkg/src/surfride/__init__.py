"""Surf-riding and wave-blocking thresholds for ships in following seas.

The surge motion of a ship overtaken by regular following waves reduces
to a forced, nonlinearly damped pendulum.  This package finds the two
global bifurcations of that system — the capture into surf-riding and
the blocking of wave overtaking — by exact heteroclinic shooting, by a
bisection oracle on trajectory fates, and by six analytic approximations
of increasing fidelity, and applies them in the second-generation
intact-stability vulnerability checks for broaching.
"""

from .dynamics import (
    AsymptoticClass,
    HeteroclinicSolution,
    IntegrationResult,
    SaddlePair,
    classify_asymptotics,
    heteroclinic_bisection,
    heteroclinic_newton,
    integrate,
    integrate_dimensional,
    saddle_pair,
)
from .errors import (
    ConvergenceError,
    NoSolutionError,
    SurfrideError,
    ValidationError,
)
from .hull import (
    PropulsionModel,
    ResistanceModel,
    ShipModel,
    Station,
    fk_amplitude,
    local_wave_force,
    rate_for_speed,
    refine_stations,
    resistance,
    resistance_slope,
    self_propulsion_speed,
    thrust,
    thrust_from_kt,
)
from .sgisc import (
    Level1Result,
    Level2Evaluator,
    Level2Result,
    LocalWaveGrid,
    WaveScatterTable,
    critical_revs_imo,
    critical_speed,
    level1_check,
    level2_assess,
    local_wave_pdf,
)
from .shipfile import load_ship
from .surge import (
    PhasePoint,
    SurgeSystem,
    WaveCondition,
    build_system,
    calibrate_wave_force,
    equilibria,
    rate_for_froude,
    rate_window,
    surge_coefficients,
    tangent_bifurcation_rates,
    thrust_excess,
    wave_for_ship,
)
from .thresholds import (
    ALL_METHODS,
    ANALYTIC_METHODS,
    ThresholdResult,
    compute_threshold,
    cos_power_integral,
    cubic_threshold,
    ext_melnikov_1_threshold,
    ext_melnikov_2_threshold,
    melnikov_i_integral,
    melnikov_k_integral,
    melnikov_threshold,
    piecewise_linear_threshold,
    quad_damping_threshold,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_METHODS",
    "ANALYTIC_METHODS",
    "AsymptoticClass",
    "ConvergenceError",
    "HeteroclinicSolution",
    "IntegrationResult",
    "Level1Result",
    "Level2Evaluator",
    "Level2Result",
    "LocalWaveGrid",
    "NoSolutionError",
    "PhasePoint",
    "PropulsionModel",
    "ResistanceModel",
    "SaddlePair",
    "ShipModel",
    "Station",
    "SurfrideError",
    "SurgeSystem",
    "ThresholdResult",
    "ValidationError",
    "WaveCondition",
    "WaveScatterTable",
    "build_system",
    "calibrate_wave_force",
    "classify_asymptotics",
    "compute_threshold",
    "cos_power_integral",
    "critical_revs_imo",
    "critical_speed",
    "cubic_threshold",
    "equilibria",
    "ext_melnikov_1_threshold",
    "ext_melnikov_2_threshold",
    "fk_amplitude",
    "heteroclinic_bisection",
    "heteroclinic_newton",
    "integrate",
    "integrate_dimensional",
    "level1_check",
    "level2_assess",
    "load_ship",
    "local_wave_force",
    "local_wave_pdf",
    "melnikov_i_integral",
    "melnikov_k_integral",
    "melnikov_threshold",
    "piecewise_linear_threshold",
    "quad_damping_threshold",
    "rate_for_froude",
    "rate_for_speed",
    "rate_window",
    "refine_stations",
    "resistance",
    "resistance_slope",
    "saddle_pair",
    "self_propulsion_speed",
    "surge_coefficients",
    "tangent_bifurcation_rates",
    "thrust",
    "thrust_excess",
    "thrust_from_kt",
    "wave_for_ship",
]
