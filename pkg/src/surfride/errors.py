"""Exception hierarchy for the surfride package.

Three failure families are distinguished so that callers (and the CLI,
which maps them to distinct exit codes) can react appropriately:

* bad input data             -> ValidationError
* iteration did not converge -> ConvergenceError
* no solution exists         -> NoSolutionError
"""

from __future__ import annotations


class SurfrideError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(SurfrideError):
    """Raised when input data is malformed or out of its admissible range."""


class ConvergenceError(SurfrideError):
    """Raised when an iterative solver exhausts its budget without meeting
    its tolerance, or when a trajectory classification stays undecided."""


class NoSolutionError(SurfrideError):
    """Raised when the requested quantity provably does not exist for the
    given inputs (e.g. no equilibria, empty bracketing interval)."""
