#!/usr/bin/env python3
"""
General filtrations - level collections squeezed between radii delta_n <= gamma_n,
built from a realization or from symbolic space, with F1-F4 certification and local
dimensions read off the filtration cells
"""

import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .checks import AxiomCheck, AxiomReport, CheckKind
from .codetree import ConstructionSpec, Word, cylinder_log_diameter
from .errors import FiltrationError, MeasureError, ParameterError
from .realization import IntervalRealization, verify_moran_axioms
from .util.config import get_defaults
from .util.numerics import default_tail_window, tail_extremes, trend_to_one

if TYPE_CHECKING:
    from .measure import MoranMeasure

logger = logging.getLogger(__name__)

# Absolute slack on log diameters when comparing against log gamma_n
LOG_SLACK = 1e-12
DEFAULT_C0 = 0.5
# Distinct live diameters tracked by member_count before it gives up
_DISTINCT_DIAMETERS = 100_000


class SpecGeometry:
    """Cylinder diameters of a spatially symmetric spec: root diameter times the ratio product."""

    def __init__(self, spec: ConstructionSpec, depth: int):
        self.spec = spec
        self.depth = depth
        self.log_root = spec.log_root_diameter
        mins = [min(spec.level(k).log_ratios) for k in range(1, depth + 2)]
        maxs = [max(spec.level(k).log_ratios) for k in range(1, depth + 2)]
        # index n holds level n, n = 0..depth+1
        self.level_min = self.log_root + np.concatenate(([0.0], np.cumsum(mins)))
        self.level_max = self.log_root + np.concatenate(([0.0], np.cumsum(maxs)))
        self.min_log_ratio = np.concatenate(([0.0], mins))

    def log_diameter(self, word: Word) -> float:
        return cylinder_log_diameter(self.spec, word)

    def child_log_diameters(self, word: Word, log_diameter: float) -> List[Tuple[Word, float]]:
        logs = self.spec.level(len(word) + 1).log_ratios
        return [(word.child(i), log_diameter + c) for i, c in enumerate(logs, start=1)]

    def path_log_diameters(self, path: Word) -> np.ndarray:
        """log diam of path|_m for m = 0..len(path)."""
        logs = [self.spec.level(k).log_ratios[i - 1] for k, i in enumerate(path.indices, start=1)]
        return self.log_root + np.concatenate(([0.0], np.cumsum(logs)))

    def level_is_uniform(self, n: int) -> bool:
        return bool(self.level_min[n] == self.level_max[n])

    def m5_ratio(self, n: int) -> float:
        """Worst log(diam E_w/R) / log(min offspring diam/R) over words of length n."""
        a = self.level_max[n] - self.log_root
        b = self.min_log_ratio[n + 1]
        return float(a / (a + b))


class MaterializedGeometry:
    """Diameters read from an explicit word -> interval realization."""

    def __init__(self, realization: IntervalRealization):
        self.realization = realization
        self.depth = realization.depth
        self.log_root = math.log(realization.root_length)
        levels: Dict[int, List[float]] = {}
        for indices, (left, right) in realization.explicit.items():
            if right <= left:
                raise FiltrationError(f"degenerate interval for word {Word(indices)}")
            levels.setdefault(len(indices), []).append(math.log(right - left))
        self.level_min = np.array([min(levels[n]) for n in range(self.depth + 1)])
        self.level_max = np.array([max(levels[n]) for n in range(self.depth + 1)])

    def log_diameter(self, word: Word) -> float:
        return self.realization.log_diameter(word)

    def child_log_diameters(self, word: Word, log_diameter: float) -> List[Tuple[Word, float]]:
        if len(word) >= self.depth:
            raise FiltrationError(f"word {word} has no materialized offsprings")
        children = []
        i = 1
        while (word.indices + (i,)) in self.realization.explicit:
            child = word.child(i)
            children.append((child, self.realization.log_diameter(child)))
            i += 1
        return children

    def path_log_diameters(self, path: Word) -> np.ndarray:
        return np.array([self.log_diameter(path.prefix(m)) for m in range(len(path) + 1)])

    def level_is_uniform(self, n: int) -> bool:
        return bool(self.level_min[n] == self.level_max[n])

    def m5_ratio(self, n: int) -> float:
        worst = 1.0
        for indices in self.realization.explicit:
            if len(indices) != n:
                continue
            word = Word(indices)
            a = self.log_diameter(word) - self.log_root
            children = self.child_log_diameters(word, a)
            m = min(d for _, d in children) - self.log_root
            worst = min(worst, a / m)
        return worst


@dataclass(eq=False)
class GeneralFiltration:
    """
    Radii gamma_n, delta_n (as logs) for n = 1..depth together with the geometry that
    defines Q_n: the words with diam <= gamma_n < diam of their parent.
    """
    log_gamma: np.ndarray
    log_delta: np.ndarray
    C0: float
    geometry: Any
    thresholds: List[int] = field(default_factory=list)
    k_of_n: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    uniform_levels: bool = False
    source: str = "realization"

    @property
    def depth(self) -> int:
        return int(self.log_gamma.size)

    @property
    def gamma(self) -> np.ndarray:
        return np.exp(self.log_gamma)

    @property
    def delta(self) -> np.ndarray:
        return np.exp(self.log_delta)

    def _level(self, n: int) -> float:
        if n < 1 or n > self.depth:
            raise FiltrationError(f"filtration level {n} outside 1..{self.depth}")
        return float(self.log_gamma[n - 1]) + LOG_SLACK

    def members(self, n: int, within: Optional[Word] = None, limit: Optional[int] = None) -> List[Word]:
        """
        Q_n (or its members meeting the cylinder of `within`) in lexicographic order.

        Raises:
            FiltrationError: If more than `limit` members would be produced
        """
        bound = self._level(n)
        limit = get_defaults().enumeration_limit if limit is None else limit
        start = Word() if within is None else within
        log_start = self.geometry.log_diameter(start)
        if log_start <= bound:
            return [self._crossing_prefix(start, bound)]

        found: List[Word] = []
        stack = [(start, log_start)]
        while stack:
            word, log_d = stack.pop()
            for child, log_child in reversed(self.geometry.child_log_diameters(word, log_d)):
                if log_child <= bound:
                    found.append(child)
                    if len(found) > limit:
                        raise FiltrationError(f"Q_{n} has more than {limit} members")
                else:
                    stack.append((child, log_child))
        found.sort(key=lambda w: w.indices)
        return found

    def _crossing_prefix(self, word: Word, bound: float) -> Word:
        for m in range(len(word) + 1):
            prefix = word.prefix(m)
            if self.geometry.log_diameter(prefix) <= bound:
                return prefix
        return word

    def cell_of(self, path: Word, n: int) -> Word:
        """
        Q_n(x): the member of Q_n on the path.

        Raises:
            FiltrationError: If the path ends before reaching diameter gamma_n
        """
        return path.prefix(self._cell_lengths(self.geometry.path_log_diameters(path), [n])[0])

    def _cell_lengths(self, path_logs: np.ndarray, levels: Sequence[int]) -> List[int]:
        lengths = []
        for n in levels:
            inside = np.flatnonzero(path_logs <= self._level(n))
            if inside.size == 0:
                raise FiltrationError(f"path of length {path_logs.size - 1} too short to determine Q_{n}(x)")
            lengths.append(int(inside[0]))
        return lengths

    def member_count(self, n: int, limit: Optional[int] = None) -> Optional[int]:
        """
        #Q_n, grouping live words by diameter; None when too many distinct diameters arise.
        """
        bound = self._level(n)
        limit = _DISTINCT_DIAMETERS if limit is None else limit
        if isinstance(self.geometry, MaterializedGeometry):
            try:
                return len(self.members(n, limit=limit))
            except FiltrationError:
                return None
        if self.geometry.log_root <= bound:
            return 1
        spec = self.geometry.spec
        # rounded log diameter -> (exact representative, multiplicity)
        live: Dict[float, Tuple[float, int]] = {round(self.geometry.log_root, 10): (self.geometry.log_root, 1)}
        count = 0
        k = 0
        while live:
            k += 1
            logs = spec.level(k).log_ratios
            deeper: Dict[float, Tuple[float, int]] = {}
            for log_d, multiplicity in live.values():
                for c in logs:
                    child = log_d + c
                    if child <= bound:
                        count += multiplicity
                    else:
                        key = round(child, 10)
                        exact, seen = deeper.get(key, (child, 0))
                        deeper[key] = (exact, seen + multiplicity)
            if len(deeper) > limit:
                return None
            live = deeper
        return count


def _thresholds(geometry: Any, depth: int) -> Tuple[List[int], np.ndarray]:
    """
    Threshold sequence N_2 < N_3 < ... and the index k(n) used at level n.

    N_k is the smallest level from which the M5 ratio stays above 1 - 1/k up to depth.
    """
    ratios = np.array([geometry.m5_ratio(n) for n in range(0, depth + 1)])
    suffix_min = np.minimum.accumulate(ratios[::-1])[::-1]
    thresholds: List[int] = []
    k = 2
    while True:
        target = 1.0 - 1.0 / k - 1e-12
        position = int(np.searchsorted(suffix_min, target, side='left'))
        n_k = max(position, 1)
        if thresholds:
            n_k = max(n_k, thresholds[-1] + 1)
        if n_k > depth:
            break
        thresholds.append(n_k)
        k += 1

    k_of_n = np.full(depth, 2, dtype=np.int64)
    for index, n_k in enumerate(thresholds):
        k_of_n[n_k - 1:] = index + 2
    return thresholds, k_of_n


def _assemble(geometry: Any, depth: int, C0: float, source: str) -> GeneralFiltration:
    if not (0.0 < C0 < 1.0):
        raise FiltrationError(f"C0 must lie in (0, 1), got {C0!r}")
    log_gamma = np.array(geometry.level_min[1:depth + 1], dtype=float)
    thresholds, k_of_n = _thresholds(geometry, depth)
    exponent = k_of_n / (k_of_n - 1.0)
    log_root = geometry.log_root
    log_delta = math.log(C0) + log_root + exponent * (log_gamma - log_root)
    uniform = all(geometry.level_is_uniform(n) for n in range(1, depth + 1))
    logger.info(f"filtration from {source}: depth={depth} thresholds={len(thresholds)} "
                f"k(depth)={int(k_of_n[-1]) if depth else 0} uniform_levels={uniform}")
    return GeneralFiltration(log_gamma=log_gamma, log_delta=log_delta, C0=C0, geometry=geometry,
                             thresholds=thresholds, k_of_n=k_of_n, uniform_levels=uniform, source=source)


def build_filtration(realization: IntervalRealization, depth: Optional[int] = None) -> GeneralFiltration:
    """
    Filtration of a realized Moran construction.

    gamma_n is the smallest realized level-n diameter, Q_n the diameter-crossing
    antichain and delta_n = C0 R (gamma_n/R)^(k/(k-1)) with k taken from the threshold
    sequence.

    Raises:
        FiltrationError: If depth exceeds the realized depth
        AxiomViolationError: If the realization fails M1 or M3
    """
    depth = realization.depth if depth is None else depth
    if depth < 1:
        raise ParameterError(f"depth must be at least 1, got {depth}")
    if depth > realization.depth:
        raise FiltrationError(f"depth {depth} exceeds the realized depth {realization.depth}")

    verify_moran_axioms(realization, depth).raise_on_hard_failure()
    if realization.is_explicit:
        if depth >= realization.depth:
            raise FiltrationError("explicit realizations need one materialized level below the filtration depth")
        geometry: Any = MaterializedGeometry(realization)
    else:
        geometry = SpecGeometry(realization.geometric_spec(), depth)
    return _assemble(geometry, depth, realization.C0_certified, source=realization.label)


def symbolic_filtration(spec: ConstructionSpec, depth: int, C0: float = DEFAULT_C0) -> GeneralFiltration:
    """Filtration of symbolic space, cylinder diameters root_diameter times the ratio product."""
    if depth < 1:
        raise ParameterError(f"depth must be at least 1, got {depth}")
    return _assemble(SpecGeometry(spec, depth), depth, C0, source="symbolic")


def _ratio_series(filtration: GeneralFiltration) -> Tuple[np.ndarray, np.ndarray]:
    """F3 ratios log delta_n / log delta_{n+1} (n < depth) and F4 ratios log gamma_n / log delta_n."""
    f3 = filtration.log_delta[:-1] / filtration.log_delta[1:]
    f4 = filtration.log_gamma / filtration.log_delta
    return f3, f4


def verify_filtration_axioms(filtration: GeneralFiltration, trend_window: Optional[int] = None) -> AxiomReport:
    """
    Certify F1 (delta_n <= gamma_n, exact), F2 (gamma_n strictly decreasing) and the
    trends F3, F4 toward 1 over the last 2 * trend_window levels.
    """
    depth = filtration.depth
    trend_window = max(1, depth // 4) if trend_window is None else trend_window
    if trend_window < 1 or 2 * trend_window > depth:
        raise ParameterError(f"filtration of depth {depth} cannot certify a trend window of {trend_window}")
    tolerance = get_defaults().trend_tolerance

    report = AxiomReport(subject=f"filtration {filtration.source}", depth=depth)
    excess = filtration.log_delta - filtration.log_gamma
    worst = int(np.argmax(excess))
    f1 = bool(np.all(excess <= 0.0))
    report.checks.append(AxiomCheck(
        name="F1", kind=CheckKind.EXACT, passed=f1, deviation=max(0.0, float(excess[worst])), hard=True,
        detail="delta_n <= gamma_n on every level" if f1 else f"delta_{worst + 1} > gamma_{worst + 1}"))

    steps = np.diff(filtration.log_gamma)
    f2 = bool(np.all(steps < 0.0))
    report.checks.append(AxiomCheck(
        name="F2", kind=CheckKind.EXACT, passed=f2, deviation=float(max(0.0, np.max(steps))) if steps.size else 0.0,
        detail="gamma_n strictly decreasing" if f2 else "gamma_n fails to decrease"))

    f3, f4 = _ratio_series(filtration)
    span = 2 * trend_window
    for name, series, last_n in (("F3", f3, depth - 1), ("F4", f4, depth)):
        tail = series[-span:]
        ns = np.arange(last_n - tail.size + 1, last_n + 1)
        trend = trend_to_one(tail, ns, tolerance)
        report.checks.append(AxiomCheck(
            name=name, kind=CheckKind.TREND, passed=trend.passed, deviation=trend.extrapolated_deviation,
            window=trend_window,
            detail=f"final deviation {trend.final_deviation:.3e}, extrapolated "
                   f"{trend.extrapolated_deviation:.3e}, non-increasing={trend.non_increasing}"))
    logger.info(f"verify_filtration_axioms: {report.subject} depth={depth} passed={report.passed}")
    return report


@dataclass
class LocalDimensionEstimate:
    """log mu(Q_n(x)) / log delta_n along one path with tail-window extremes."""
    ratios: np.ndarray
    lower: float
    upper: float
    tail_window: int

    def to_dict(self) -> Dict[str, Any]:
        return {'lower': self.lower, 'upper': self.upper, 'tail_window': self.tail_window,
                'depth': int(self.ratios.size)}

    def csv_rows(self) -> List[List[Any]]:
        return [[n, float(r)] for n, r in enumerate(self.ratios, start=1)]


def _require_non_atomic(measure: 'MoranMeasure', path: Word, depth: int) -> None:
    """Some level in the second half of the path must split the mass between two live offsprings."""
    for k in range(depth // 2 + 1, depth + 1):
        weights = measure.child_weights(path.prefix(k - 1))
        if np.count_nonzero(weights > 0.0) >= 2:
            return
    raise MeasureError(f"measure is atomic along the path: no mass split on levels {depth // 2 + 1}..{depth}")


def local_dim_via_filtration(measure: 'MoranMeasure', filtration: GeneralFiltration, path_prefix: Word,
                             tail_window: Optional[int] = None) -> LocalDimensionEstimate:
    """
    Lower and upper local dimension estimates from the cells Q_n(x) containing the path.

    Raises:
        FiltrationError: If the path is too short for the deepest level
        MeasureError: If the measure is atomic along the path or the path leaves the support
    """
    depth = filtration.depth
    tail_window = default_tail_window(depth) if tail_window is None else tail_window
    measure.spec.validate_word(path_prefix)
    lengths = filtration._cell_lengths(filtration.geometry.path_log_diameters(path_prefix), range(1, depth + 1))
    deepest = max(lengths)
    _require_non_atomic(measure, path_prefix, max(deepest, 1))

    path_masses = np.empty(deepest + 1)
    path_masses[0] = math.log(measure.root_mass)
    with np.errstate(divide='ignore'):
        for m in range(1, deepest + 1):
            weight = measure.child_weights(path_prefix.prefix(m - 1))[path_prefix.indices[m - 1] - 1]
            path_masses[m] = path_masses[m - 1] + math.log(weight) if weight > 0.0 else -math.inf
    log_masses = path_masses[lengths]
    if not np.all(np.isfinite(log_masses)):
        raise MeasureError("path leaves the support of the measure")
    ratios = log_masses / filtration.log_delta
    lower, upper = tail_extremes(ratios, tail_window)
    logger.debug(f"local_dim_via_filtration: depth={depth} lower={lower:.6f} upper={upper:.6f}")
    return LocalDimensionEstimate(ratios=ratios, lower=lower, upper=upper, tail_window=tail_window)


def filtration_summary_rows(filtration: GeneralFiltration, count_limit: Optional[int] = None) -> List[List[Any]]:
    """Rows n, gamma_n, delta_n, level_size, F3_ratio, F4_ratio (F3 empty on the last level)."""
    f3, f4 = _ratio_series(filtration)
    rows = []
    for n in range(1, filtration.depth + 1):
        size = filtration.member_count(n, count_limit)
        rows.append([n, float(filtration.gamma[n - 1]), float(filtration.delta[n - 1]),
                     '' if size is None else size,
                     float(f3[n - 1]) if n < filtration.depth else '', float(f4[n - 1])])
    return rows
