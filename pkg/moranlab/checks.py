#!/usr/bin/env python3
"""
Axiom checks - shared report types for Moran (M1-M5) and filtration (F1-F4) certification
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from .errors import AxiomViolationError

logger = logging.getLogger(__name__)


class CheckKind(Enum):
    """How an axiom is certified on finite data."""
    EXACT = "exact"
    TREND = "trend"


@dataclass
class AxiomCheck:
    """Represents the outcome for a single axiom."""
    name: str
    kind: CheckKind
    passed: bool
    deviation: float = 0.0
    detail: str = ""
    hard: bool = False  # failure of a hard check invalidates the object itself
    window: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'kind': self.kind.value,
            'passed': self.passed,
            'deviation': _finite_or_text(self.deviation),
            'detail': self.detail,
            'hard': self.hard,
            'window': self.window,
        }


@dataclass
class AxiomReport:
    """Represents the certification of all axioms of one object."""
    subject: str
    depth: int
    checks: List[AxiomCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def hard_failures(self) -> List[AxiomCheck]:
        return [check for check in self.checks if check.hard and not check.passed]

    def check(self, name: str) -> AxiomCheck:
        for item in self.checks:
            if item.name == name:
                return item
        raise KeyError(name)

    def raise_on_hard_failure(self) -> None:
        failures = self.hard_failures
        if failures:
            names = ', '.join(f.name for f in failures)
            details = '; '.join(f"{f.name}: {f.detail}" for f in failures)
            raise AxiomViolationError(f"{self.subject}: hard failure of {names} ({details})", report=self)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'subject': self.subject,
            'depth': self.depth,
            'passed': self.passed,
            'hard_failures': [f.name for f in self.hard_failures],
            'checks': [check.to_dict() for check in self.checks],
        }

    def csv_rows(self) -> List[List[Any]]:
        return [[c.name, c.kind.value, c.passed, _finite_or_text(c.deviation), c.detail] for c in self.checks]


def _finite_or_text(value: float) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value
