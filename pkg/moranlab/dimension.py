#!/usr/bin/env python3
"""
Dimension formulas - per-level roots s_n, tail-window limits and the cover comparison oracle

For a spatially symmetric spec, s_n solves F_n(s) = Σ_{k<=n} log Σ_i c_{k,i}^s = 0.
The lower and upper limits of (s_n) give the Hausdorff and packing dimensions.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from .codetree import ConstructionSpec, Level, Word, symbolic_log_diameter
from .errors import CoverError, NonConvergenceError, ParameterError, SpecError, WitnessNotFoundError
from .util.config import get_defaults
from .util.numerics import default_tail_window, log_sum_exp, oscillation, tail_extremes

logger = logging.getLogger(__name__)

MAX_ITERATIONS = 200
MAX_BRACKET_DOUBLINGS = 64
# Above this many (level, type) cells levels are solved one at a time
_VECTORIZED_CELLS = 4_000_000


class _LevelTable:
    """Distinct level types among levels 1..n, log ratios padded with -inf."""

    def __init__(self, spec: ConstructionSpec, n: int):
        type_of: Dict[Level, int] = {}
        types: List[Level] = []
        self.level_type = np.empty(n, dtype=np.int64)
        for k in range(1, n + 1):
            level = spec.level(k)
            t = type_of.get(level)
            if t is None:
                t = len(types)
                type_of[level] = t
                types.append(level)
            self.level_type[k - 1] = t

        width = max(level.branching for level in types)
        self.log_ratios = np.full((len(types), width), -np.inf)
        for t, level in enumerate(types):
            self.log_ratios[t, :level.branching] = level.log_ratios
        self.mask = np.isfinite(self.log_ratios)
        self._finite_log_ratios = np.where(self.mask, self.log_ratios, 0.0)
        self.n = n

    @property
    def type_count(self) -> int:
        return self.log_ratios.shape[0]

    def type_lse(self, s: np.ndarray) -> np.ndarray:
        """log Σ_i c_i^s for every type, shape s.shape + (types,)."""
        s = np.asarray(s, dtype=float)
        scaled = np.where(self.mask, s[..., None, None] * self._finite_log_ratios, -np.inf)
        return logsumexp(scaled, axis=-1)

    def counts(self, n: int) -> np.ndarray:
        return np.bincount(self.level_type[:n], minlength=self.type_count).astype(float)

    def cumulative_counts(self) -> np.ndarray:
        onehot = np.zeros((self.n, self.type_count))
        onehot[np.arange(self.n), self.level_type] = 1.0
        return np.cumsum(onehot, axis=0)


def _bisect(F: Callable[[np.ndarray], np.ndarray], size: int, tolerance: float,
            residual_limit: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Bisection for the roots of decreasing functions with F(0) >= 0, vectorized over `size`.

    The bracket starts at [0, 1] and its upper end doubles until F < 0.

    Returns:
        (roots, |F(roots)|)
    """
    lo = np.zeros(size)
    hi = np.ones(size)
    trivial = F(lo) <= 0.0  # all N_k = 1

    f_hi = F(hi)
    doublings = 0
    while np.any((f_hi >= 0.0) & ~trivial):
        grow = (f_hi >= 0.0) & ~trivial
        lo = np.where(grow, hi, lo)
        hi = np.where(grow, 2.0 * hi, hi)
        f_hi = F(hi)
        doublings += 1
        if doublings > MAX_BRACKET_DOUBLINGS:
            raise NonConvergenceError(f"bracket did not close after {doublings} doublings")
    logger.debug(f"bisection bracket grown {doublings} times for {size} level(s)")

    best_s = np.where(trivial, 0.0, hi)
    best_r = np.where(trivial, 0.0, np.abs(f_hi))
    done = trivial | (best_r <= tolerance)

    for _ in range(MAX_ITERATIONS):
        if np.all(done):
            break
        mid = 0.5 * (lo + hi)
        collapsed = (mid <= lo) | (mid >= hi)
        f_mid = F(mid)
        better = ~done & (np.abs(f_mid) < best_r)
        best_s = np.where(better, mid, best_s)
        best_r = np.where(better, np.abs(f_mid), best_r)
        positive = f_mid > 0.0
        lo = np.where(~done & positive, mid, lo)
        hi = np.where(~done & ~positive, mid, hi)
        done = done | collapsed | (best_r <= tolerance)

    worst = float(np.max(best_r)) if size else 0.0
    if worst > residual_limit:
        raise NonConvergenceError(f"residual {worst:.3e} above the certified limit {residual_limit:.1e}")
    return best_s, best_r


def level_equation(spec: ConstructionSpec, n: int, s: float) -> float:
    """F_n(s) = Σ_{k<=n} log Σ_i c_{k,i}^s evaluated with log-sum-exp per level type."""
    table = _LevelTable(spec, n)
    return float(np.dot(table.counts(n), table.type_lse(np.array(s))))


def solve_level_dimension(spec: ConstructionSpec, n: int, tolerance: Optional[float] = None) -> float:
    """
    Solve Π_{k<=n} Σ_i c_{k,i}^s = 1 for s >= 0.

    Args:
        spec: Construction spec
        n: Level, at least 1
        tolerance: Early-exit bound on |F_n(s)|

    Returns:
        s_n (0 when every N_k = 1)
    """
    s, _ = _solve_with_residual(spec, n, tolerance)
    return s


def _solve_with_residual(spec: ConstructionSpec, n: int, tolerance: Optional[float] = None) -> Tuple[float, float]:
    if n < 1:
        raise ParameterError(f"level must be at least 1, got {n}")
    defaults = get_defaults()
    tolerance = defaults.tolerance if tolerance is None else tolerance
    table = _LevelTable(spec, n)
    counts = table.counts(n)
    roots, residuals = _bisect(lambda s: table.type_lse(s) @ counts, 1, tolerance, defaults.residual_limit)
    return float(roots[0]), float(residuals[0])


@dataclass
class DimensionReport:
    """Finite prefix of (s_n) with tail-window estimates of s_* and s^*."""
    s_sequence: np.ndarray
    residuals: np.ndarray
    s_star: float
    s_upper_star: float
    tail_window: int
    solver_tolerance: float
    oscillation_previous: float
    oscillation_last: float
    source: str = "base"

    @property
    def n_max(self) -> int:
        return int(self.s_sequence.size)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'source': self.source,
            'n_max': self.n_max,
            's_star': self.s_star,
            's_upper_star': self.s_upper_star,
            'tail_window': self.tail_window,
            'solver_tolerance': self.solver_tolerance,
            'max_residual': float(np.max(self.residuals)) if self.n_max else 0.0,
            'oscillation': {
                'previous_window': None if math.isnan(self.oscillation_previous) else self.oscillation_previous,
                'last_window': self.oscillation_last,
            },
            's_sequence': [float(s) for s in self.s_sequence],
        }

    def csv_rows(self) -> List[List[Any]]:
        return [[n, float(s), float(r)] for n, (s, r) in enumerate(zip(self.s_sequence, self.residuals), start=1)]


def dimension_report(spec: ConstructionSpec, n_max: int, tail_window: Optional[int] = None,
                     tolerance: Optional[float] = None, parallel: bool = False,
                     max_workers: Optional[int] = None, source: str = "base") -> DimensionReport:
    """
    Solve s_1..s_{n_max} and estimate s_* and s^* on the last `tail_window` levels.

    Args:
        spec: Construction spec
        n_max: Number of levels
        tail_window: Window size, default 20% of n_max
        tolerance: Early-exit bound on |F_n|
        parallel: Solve levels on a thread pool when they cannot be vectorized
        max_workers: Pool size, default from configuration

    Returns:
        DimensionReport
    """
    defaults = get_defaults()
    tail_window = default_tail_window(n_max) if tail_window is None else tail_window
    if n_max < 1 or tail_window < 1 or n_max < tail_window:
        raise ParameterError(f"need n_max >= tail_window >= 1, got n_max={n_max}, tail_window={tail_window}")
    tolerance = defaults.tolerance if tolerance is None else tolerance

    table = _LevelTable(spec, n_max)
    if n_max * table.type_count <= _VECTORIZED_CELLS:
        cumulative = table.cumulative_counts()
        s_values, residuals = _bisect(lambda s: np.sum(cumulative * table.type_lse(s), axis=1),
                                      n_max, tolerance, defaults.residual_limit)
    else:
        s_values = np.zeros(n_max)
        residuals = np.zeros(n_max)
        if parallel:
            with ThreadPoolExecutor(max_workers=max_workers or defaults.max_workers) as executor:
                future_to_level = {
                    executor.submit(_solve_with_residual, spec, n, tolerance): n
                    for n in range(1, n_max + 1)
                }
                for future in as_completed(future_to_level):
                    n = future_to_level[future]
                    s_values[n - 1], residuals[n - 1] = future.result()
        else:
            for n in range(1, n_max + 1):
                s_values[n - 1], residuals[n - 1] = _solve_with_residual(spec, n, tolerance)

    s_star, s_upper_star = tail_extremes(s_values, tail_window)
    previous, last = oscillation(s_values, tail_window)
    logger.info(f"dimension_report: n_max={n_max} window={tail_window} "
                f"s_*={s_star:.10f} s^*={s_upper_star:.10f}")
    return DimensionReport(s_sequence=s_values, residuals=residuals, s_star=s_star,
                           s_upper_star=s_upper_star, tail_window=tail_window,
                           solver_tolerance=tolerance, oscillation_previous=previous,
                           oscillation_last=last, source=source)


def realized_dimension_report(realization, n_max: int, tail_window: Optional[int] = None) -> DimensionReport:
    """Same solver fed with the realized per-level ratios instead of the base ratios."""
    return dimension_report(realization.geometric_spec(), n_max, tail_window, source="realized")


def homogeneous_ratio_sequence(spec: ConstructionSpec, n_max: int) -> np.ndarray:
    """r_n = Σ_{k<=n} log N_k / (-Σ_{k<=n} log c_k) for n = 1..n_max."""
    if not spec.is_homogeneous:
        raise SpecError("closed-form ratios need a homogeneous spec")
    log_counts = np.array([math.log(spec.branching(k)) for k in range(1, n_max + 1)])
    log_ratios = np.array([spec.level(k).log_ratios[0] for k in range(1, n_max + 1)])
    return np.cumsum(log_counts) / -np.cumsum(log_ratios)


def homogeneous_dimension(spec: ConstructionSpec, n_max: int,
                          tail_window: Optional[int] = None) -> Tuple[float, float]:
    """
    Tail-window liminf/limsup of r_n for homogeneous specs.

    Returns:
        (liminf estimate, limsup estimate)
    """
    tail_window = default_tail_window(n_max) if tail_window is None else tail_window
    if n_max < tail_window or tail_window < 1:
        raise ParameterError(f"need n_max >= tail_window >= 1, got n_max={n_max}, tail_window={tail_window}")
    return tail_extremes(homogeneous_ratio_sequence(spec, n_max), tail_window)


@dataclass
class WitnessCertificate:
    """Level k whose full level sum compares with the cover (or disjoint family) sum as claimed."""
    level: int
    claim: int
    s: float
    level_log_sum: float
    cover_log_sum: float
    level_log_sums: Dict[int, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'level': self.level,
            'claim': self.claim,
            's': self.s,
            'level_log_sum': self.level_log_sum,
            'cover_log_sum': self.cover_log_sum,
            'level_log_sums': {str(k): v for k, v in self.level_log_sums.items()},
        }


def is_symbolic_cover(spec: ConstructionSpec, words: Sequence[Word], depth: Optional[int] = None) -> bool:
    """True when every depth-`depth` word has an ancestor (or itself) among `words`."""
    cover = {w.indices for w in words}
    depth = max((len(w) for w in words), default=0) if depth is None else depth

    def covered(indices: Tuple[int, ...]) -> bool:
        if indices in cover:
            return True
        if len(indices) >= depth:
            return False
        n = spec.branching(len(indices) + 1)
        return all(covered(indices + (i,)) for i in range(1, n + 1))

    return covered(())


def is_pairwise_disjoint(words: Sequence[Word]) -> bool:
    """Cylinders are pairwise disjoint iff no word is a prefix of another."""
    seen = {w.indices for w in words}
    if len(seen) != len(words):
        return False
    return not any(w.indices[:n] in seen for w in words for n in range(len(w)))


def cover_comparison_witness(spec: ConstructionSpec, cover: Sequence[Word], s: float,
                             claim: int = 1, tolerance: float = 1e-12) -> WitnessCertificate:
    """
    Find k in [k1, k2] comparing Σ_{Σ_k} 𝚌^s with Σ_{cover} 𝚌^s.

    Claim 1 (cover): Σ_{Σ_k} 𝚌^s <= Σ_cover 𝚌^s for some k.
    Claim 2 (pairwise disjoint family): Σ_{Σ_k} 𝚌^s >= Σ_family 𝚌^s for some k.

    Raises:
        CoverError: If the input is not a cover (claim 1) or not disjoint (claim 2)
        WitnessNotFoundError: If no level qualifies
    """
    if s <= 0:
        raise ParameterError(f"s must be positive, got {s}")
    if claim not in (1, 2):
        raise ParameterError(f"claim must be 1 or 2, got {claim}")
    words = list(cover)
    if not words:
        raise CoverError("empty collection of words")
    for word in words:
        spec.validate_word(word)

    k1 = min(len(w) for w in words)
    k2 = max(len(w) for w in words)
    if claim == 1 and not is_symbolic_cover(spec, words, k2):
        raise CoverError(f"words do not cover all of Σ_{k2}")
    if claim == 2 and not is_pairwise_disjoint(words):
        raise CoverError("words are not pairwise disjoint")

    cover_log = log_sum_exp([s * symbolic_log_diameter(spec, w) for w in words])
    table = _LevelTable(spec, max(k2, 1))
    per_level = table.type_lse(np.array(s))[table.level_type]
    cumulative = np.concatenate(([0.0], np.cumsum(per_level)))
    level_sums = {k: float(cumulative[k]) for k in range(k1, k2 + 1)}

    for k, level_log in level_sums.items():
        holds = level_log <= cover_log + tolerance if claim == 1 else level_log >= cover_log - tolerance
        if holds:
            return WitnessCertificate(level=k, claim=claim, s=s, level_log_sum=level_log,
                                      cover_log_sum=cover_log, level_log_sums=level_sums)

    raise WitnessNotFoundError(f"no level in [{k1}, {k2}] satisfies claim {claim} at s={s}")
