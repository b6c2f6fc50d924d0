#!/usr/bin/env python3
"""
Error hierarchy - every failure raised by moranlab derives from MoranLabError
"""

from typing import Any, List, Optional


class MoranLabError(Exception):
    """Base class for all moranlab errors."""


class SpecError(MoranLabError, ValueError):
    """Invalid construction spec, level rule or word."""


class MeasureError(MoranLabError, ValueError):
    """Invalid weight rule, measure evaluation or undefined quantity (q = 1)."""


class RealizationError(MoranLabError, ValueError):
    """Placement impossible, word beyond the realized depth or mismatched inputs."""


class FiltrationError(MoranLabError, ValueError):
    """Filtration cannot be built or queried (depth, path length, geometry)."""


class EstimationError(MoranLabError, ValueError):
    """Estimator preconditions violated (scales, radii, regions)."""


class CoverError(MoranLabError, ValueError):
    """A collection of words or balls is not a cover (or not disjoint when required)."""


class WitnessNotFoundError(MoranLabError):
    """No level between the shortest and longest word satisfies the claimed comparison."""


class NonConvergenceError(MoranLabError):
    """A numerical routine failed to reach its certified tolerance."""


class ConfigError(MoranLabError, ValueError):
    """Run configuration failed to parse or validate.

    Args:
        message: Human readable summary
        key_paths: Dotted key paths of the offending config entries
    """

    def __init__(self, message: str, key_paths: Optional[List[str]] = None):
        super().__init__(message)
        self.key_paths = key_paths or []


class AxiomViolationError(MoranLabError):
    """Hard failure of an exact axiom (M1, M3 or F1); carries the full report."""

    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report


class ParameterError(MoranLabError, ValueError):
    """Numerical parameter outside its documented range (windows, q, depth, s)."""
