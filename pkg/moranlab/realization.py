#!/usr/bin/env python3
"""
Interval realizations - nested closed intervals on the line for a construction spec,
Moran axiom certification, projection of words to points and point sampling
"""

import dataclasses
import logging
import math
import sys
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .checks import AxiomCheck, AxiomReport, CheckKind
from .codetree import (
    EAGER_VALIDATION_DEPTH,
    ConstructionSpec,
    Level,
    SpecKind,
    TailRule,
    Word,
    level_size,
    make_spec,
    words_at_level,
)
from .errors import ParameterError, RealizationError
from .util.config import get_defaults
from .util.numerics import default_tail_window, ols_slope, trend_to_one

if TYPE_CHECKING:
    from .measure import MoranMeasure

logger = logging.getLogger(__name__)

EPS = sys.float_info.epsilon
# Relative slack for nesting and diameter-bound comparisons
FIDELITY_TOLERANCE = 1e-12


class GapRule(Enum):
    """Policy for placing children inside their parent interval."""
    UNIFORM_GAPS = "uniform_gaps"
    EDGE_ANCHORED = "edge_anchored"
    LEFT_PACKED = "left_packed"


@dataclass(frozen=True)
class LevelPlacement:
    """Child offsets and lengths as fractions of the parent interval."""
    offsets: Tuple[float, ...]
    ratios: Tuple[float, ...]
    log_ratios: Tuple[float, ...]

    @property
    def branching(self) -> int:
        return len(self.offsets)

    def min_gap(self) -> float:
        """Smallest space between consecutive siblings (negative when they overlap)."""
        if self.branching < 2:
            return math.inf
        return min(self.offsets[i + 1] - (self.offsets[i] + self.ratios[i]) for i in range(self.branching - 1))


def _cumulative_offsets(ratios: Sequence[float], lead: float, gap: float) -> Tuple[float, ...]:
    offsets = []
    for i in range(len(ratios)):
        offsets.append(math.fsum([lead] + list(ratios[:i]) + [gap] * i))
    return tuple(offsets)


def place_level(level: Level, gap_rule: GapRule, k: int = 0) -> LevelPlacement:
    """
    Place the children of one level inside the unit interval.

    Raises:
        RealizationError: If the ratios do not fit under the rule
    """
    ratios = level.ratios
    total = math.fsum(ratios)
    n = level.branching

    if gap_rule is GapRule.UNIFORM_GAPS:
        if total >= 1.0:
            raise RealizationError(f"level {k}: Σc = {total!r} >= 1 leaves no room for positive gaps")
        gap = (1.0 - total) / (n + 1)
        offsets = _cumulative_offsets(ratios, gap, gap)
    elif gap_rule is GapRule.EDGE_ANCHORED:
        if total > 1.0:
            raise RealizationError(f"level {k}: Σc = {total!r} > 1 cannot be nested")
        if total == 1.0 and n > 1:
            logger.warning(f"level {k}: edge_anchored children touch (Σc = 1)")
        gap = (1.0 - total) / (n - 1) if n > 1 else 0.0
        offsets = _cumulative_offsets(ratios, 0.0, gap)
    else:
        if total > 1.0:
            raise RealizationError(f"level {k}: Σc = {total!r} > 1 cannot be nested")
        if n > 1:
            logger.warning(f"level {k}: left_packed siblings touch; disjointness fails")
        offsets = _cumulative_offsets(ratios, 0.0, 0.0)
    return LevelPlacement(offsets=offsets, ratios=tuple(ratios), log_ratios=level.log_ratios)


class _PlacementTail(TailRule):
    """Realized ratios of a placed realization, as a spec tail."""
    name = "realized"

    def __init__(self, realization: 'IntervalRealization'):
        self.realization = realization

    def level(self, k: int) -> Level:
        placement = self.realization.placement(k)
        return Level.from_log_ratios(placement.branching, placement.log_ratios)


@dataclass(frozen=True)
class PointEstimate:
    """Midpoint of the deepest interval on a path with a certified error bound."""
    value: float
    error: float

    def to_dict(self) -> Dict[str, float]:
        return {'value': self.value, 'error': self.error}


@dataclass(frozen=True)
class PointCloud:
    """Sorted sample of points on the line together with where it came from."""
    points: np.ndarray
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        points = np.sort(np.asarray(self.points, dtype=float).ravel())
        object.__setattr__(self, 'points', points)

    def __len__(self) -> int:
        return int(self.points.size)

    def to_text(self) -> str:
        """Newline-delimited decimal text."""
        return ''.join(f"{repr(float(x))}\n" for x in self.points)


@dataclass(eq=False)
class IntervalRealization:
    """
    Nested closed intervals E_w realizing a spec on the line up to `depth`.

    Placed realizations compute intervals on demand from per-level placements; explicit
    realizations hold a hand-built word -> interval map.
    """
    spec: ConstructionSpec
    depth: int
    gap_rule: str
    root_left: float = 0.0
    root_length: float = 1.0
    C0_certified: float = 0.5
    label: str = ""
    placements: Optional[Tuple[LevelPlacement, ...]] = None
    tail_placement: Optional[LevelPlacement] = None
    explicit: Optional[Dict[Tuple[int, ...], Tuple[float, float]]] = None
    eta: Optional[float] = None
    _placement_cache: Dict[int, LevelPlacement] = field(default_factory=dict, repr=False)

    @property
    def is_explicit(self) -> bool:
        return self.explicit is not None

    def placement(self, k: int) -> LevelPlacement:
        """Placement of level k (1-based)."""
        if self.is_explicit:
            raise RealizationError("explicit realizations have no level placements")
        cached = self._placement_cache.get(k)
        if cached is None:
            if self.placements is not None and k <= len(self.placements):
                cached = self.placements[k - 1]
            elif self.tail_placement is not None:
                cached = self.tail_placement
            else:
                cached = place_level(self.spec.level(k), GapRule(self.gap_rule), k)
            self._placement_cache[k] = cached
        return cached

    def with_depth(self, depth: int) -> 'IntervalRealization':
        """Same placement materialized to another depth; common prefixes are unchanged."""
        if self.is_explicit and depth > self.depth:
            raise RealizationError("explicit realizations cannot be deepened")
        return dataclasses.replace(self, depth=depth, _placement_cache={})

    def _check_word(self, word: Word) -> None:
        self.spec.validate_word(word)
        if len(word) > self.depth:
            raise RealizationError(f"word {word} beyond the realized depth {self.depth}")

    def interval(self, word: Word) -> Tuple[float, float]:
        """(left, right) endpoints of E_w."""
        self._check_word(word)
        if self.is_explicit:
            try:
                return self.explicit[word.indices]
            except KeyError:
                raise RealizationError(f"no interval for word {word}")
        left, length = self.root_left, self.root_length
        for k, index in enumerate(word.indices, start=1):
            placement = self.placement(k)
            left = left + placement.offsets[index - 1] * length
            length = length * placement.ratios[index - 1]
        return left, left + length

    def log_diameter(self, word: Word) -> float:
        self._check_word(word)
        if self.is_explicit:
            left, right = self.interval(word)
            return math.log(right - left) if right > left else -math.inf
        value = math.log(self.root_length)
        for k, index in enumerate(word.indices, start=1):
            value += self.placement(k).log_ratios[index - 1]
        return value

    def error_bound(self, n: int) -> float:
        """Bound on endpoint rounding after n placement steps."""
        return 4.0 * (n + 1) * EPS * (abs(self.root_left) + self.root_length)

    def level_arrays(self, n: int, limit: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        """
        Left endpoints and lengths of all level-n intervals in lexicographic order.

        Raises:
            RealizationError: If the level is deeper than the realization or too large
        """
        limit = get_defaults().materialize_limit if limit is None else limit
        if n > self.depth:
            raise RealizationError(f"level {n} beyond the realized depth {self.depth}")
        if self.is_explicit:
            words = sorted(w for w in self.explicit if len(w) == n)
            lefts = np.array([self.explicit[w][0] for w in words])
            rights = np.array([self.explicit[w][1] for w in words])
            return lefts, rights - lefts
        if level_size(self.spec, n) > limit:
            raise RealizationError(f"level {n} has more than {limit} intervals")
        lefts = np.array([self.root_left])
        lengths = np.array([self.root_length])
        for k in range(1, n + 1):
            placement = self.placement(k)
            offsets = np.asarray(placement.offsets)
            ratios = np.asarray(placement.ratios)
            lefts = (lefts[:, None] + offsets[None, :] * lengths[:, None]).ravel()
            lengths = (lengths[:, None] * ratios[None, :]).ravel()
        logger.debug(f"level_arrays: materialized {lefts.size} intervals at level {n}")
        return lefts, lengths

    def geometric_spec(self) -> ConstructionSpec:
        """Spec whose ratios are the realized length ratios and whose root is the root interval."""
        if self.is_explicit:
            raise RealizationError("explicit realizations have no level ratios")
        return ConstructionSpec(levels=(), tail=_PlacementTail(self), root_diameter=self.root_length,
                                kind=SpecKind.SPATIALLY_SYMMETRIC)

    def words(self, n: int) -> List[Word]:
        if self.is_explicit:
            return [Word(w) for w in sorted(self.explicit) if len(w) == n]
        return list(words_at_level(self.spec, n, limit=get_defaults().materialize_limit))


def realize_on_interval(spec: ConstructionSpec, gap_rule: Union[str, GapRule] = GapRule.UNIFORM_GAPS,
                        depth: Optional[int] = None, root_left: float = 0.0,
                        root_length: Optional[float] = None) -> IntervalRealization:
    """
    Realize a spec as nested intervals placed by a gap rule.

    Args:
        spec: Construction spec
        gap_rule: 'uniform_gaps', 'edge_anchored' or 'left_packed'
        depth: Realized depth, default from configuration
        root_left: Left endpoint of E_∅
        root_length: Length of E_∅, default the spec's root diameter

    Returns:
        IntervalRealization with lazily computed intervals

    Raises:
        RealizationError: If some level cannot be placed
    """
    try:
        rule = GapRule(gap_rule)
    except ValueError:
        raise RealizationError(f"unknown gap rule {gap_rule!r}; expected one of {[r.value for r in GapRule]}")
    depth = get_defaults().depth if depth is None else depth
    if depth < 0:
        raise ParameterError(f"depth must be non-negative, got {depth}")
    root_length = spec.root_diameter if root_length is None else float(root_length)

    realization = IntervalRealization(spec=spec, depth=depth, gap_rule=rule.value, root_left=float(root_left),
                                      root_length=root_length, label=f"{rule.value}@{depth}")
    for k in range(1, min(depth, EAGER_VALIDATION_DEPTH) + 1):
        realization.placement(k)
    logger.info(f"realize_on_interval: {rule.value} to depth {depth}")
    return realization


def uniformly_perfect_example(eta: float, depth: int) -> IntervalRealization:
    """
    Asymptotically spatially symmetric realization inside [0, 2] built with annulus parameter eta.

    Both children sit at distance at most r from the parent's center: child 0 shares the
    parent's center and child 1 is centered (1 + eta/3)/2 parent radii to the right. The
    base ratio is c = eta^2/3; first-level children have diameter c, so level-n
    diameters equal c^n and the realized level-1 ratio is c/2.

    Raises:
        RealizationError: If eta is outside (0, 1)
    """
    if not (0.0 < eta < 1.0):
        raise RealizationError(f"eta must lie in (0, 1), got {eta!r}")
    if depth < 0:
        raise ParameterError(f"depth must be non-negative, got {depth}")
    c = eta * eta / 3.0
    spec = make_spec(2, c, kind=SpecKind.HOMOGENEOUS, root_diameter=2.0)
    shift = (1.0 + eta / 3.0) / 2.0

    def placement_for(ratio: float) -> LevelPlacement:
        return LevelPlacement(offsets=((1.0 - ratio) / 2.0, (1.0 + shift - ratio) / 2.0),
                              ratios=(ratio, ratio), log_ratios=(math.log(ratio),) * 2)

    first, later = placement_for(c / 2.0), placement_for(c)
    realization = IntervalRealization(spec=spec, depth=depth, gap_rule="uniformly_perfect", root_left=0.0,
                                      root_length=2.0, label=f"uniformly_perfect(eta={eta})@{depth}",
                                      placements=(first,), tail_placement=later, eta=eta)
    check = example_bounds_check(realization)
    if not check.passed:
        raise RealizationError(f"diameter bounds violated: {check.detail}")
    return realization


def example_bounds_check(realization: IntervalRealization, depth: Optional[int] = None) -> AxiomCheck:
    """
    c^n <= diam E_w <= 2 c^n / eta for every materialized word of the uniformly perfect example,
    compared in log scale with slack FIDELITY_TOLERANCE.

    Whole levels are checked from their interval lengths while they fit the materialize
    limit; deeper levels are level-constant and checked through one word.
    """
    if realization.eta is None:
        raise RealizationError("diameter bounds apply to the uniformly perfect example only")
    eta = realization.eta
    c = eta * eta / 3.0
    depth = realization.depth if depth is None else depth
    limit = get_defaults().materialize_limit
    worst = 0.0
    lengths = np.array([realization.root_length])
    for n in range(1, depth + 1):
        log_low = n * math.log(c)
        log_high = math.log(2.0 / eta) + log_low
        if level_size(realization.spec, n) <= limit:
            lengths = (lengths[:, None] * np.asarray(realization.placement(n).ratios)[None, :]).ravel()
            smallest, largest = math.log(float(np.min(lengths))), math.log(float(np.max(lengths)))
        else:
            smallest = largest = realization.log_diameter(Word((1,) * n))
        worst = max(worst, log_low - smallest, largest - log_high)
    passed = worst <= FIDELITY_TOLERANCE
    return AxiomCheck(name="diameter_bounds", kind=CheckKind.EXACT, passed=passed, deviation=max(worst, 0.0),
                      detail=f"c^n <= diam <= 2c^n/eta with c={c!r}, worst log excess {worst:.3e}")


def explicit_realization(spec: ConstructionSpec,
                         intervals: Mapping[Union[str, Word], Sequence[float]],
                         label: str = "explicit") -> IntervalRealization:
    """
    Hand-built realization from a word -> (left, right) map; the root entry is required.

    Raises:
        RealizationError: On malformed intervals or a missing root
    """
    table: Dict[Tuple[int, ...], Tuple[float, float]] = {}
    for key, bounds in intervals.items():
        word = key if isinstance(key, Word) else Word.parse(str(key))
        spec.validate_word(word)
        if len(bounds) != 2 or not all(math.isfinite(float(b)) for b in bounds):
            raise RealizationError(f"interval for {word} must be two finite numbers, got {bounds!r}")
        left, right = float(bounds[0]), float(bounds[1])
        if right < left:
            raise RealizationError(f"interval for {word} has right < left: {bounds!r}")
        table[word.indices] = (left, right)
    if () not in table:
        raise RealizationError("explicit realization needs the root interval")
    root_left, root_right = table[()]
    depth = max(len(w) for w in table)
    return IntervalRealization(spec=spec, depth=depth, gap_rule="explicit", root_left=root_left,
                               root_length=root_right - root_left, label=label, explicit=table)


def point_of(realization: IntervalRealization, path_prefix: Word) -> PointEstimate:
    """
    Midpoint of E_w for the given prefix, with half-length plus rounding as error bound.

    Raises:
        ParameterError: For the empty prefix
        RealizationError: If the prefix is deeper than the realization
    """
    if len(path_prefix) < 1:
        raise ParameterError("point_of needs a prefix of length >= 1")
    left, right = realization.interval(path_prefix)
    return PointEstimate(value=0.5 * (left + right),
                         error=0.5 * (right - left) + realization.error_bound(len(path_prefix)))


def asymptotic_symmetry_ratio(realization: IntervalRealization, word: Word) -> float:
    """(log diam E_w - log diam E_∅) over the base-spec log contraction along w."""
    if len(word) < 1:
        raise ParameterError("asymptotic_symmetry_ratio needs a word of length >= 1")
    realized = realization.log_diameter(word) - math.log(realization.root_length)
    base = math.fsum(realization.spec.level(k).log_ratios[i - 1] for k, i in enumerate(word.indices, start=1))
    return realized / base


def interval_rows(realization: IntervalRealization, depth: Optional[int] = None) -> List[List[Any]]:
    """(word, left, right) rows for levels 0..depth in lexicographic order."""
    depth = realization.depth if depth is None else depth
    rows: List[List[Any]] = []
    for n in range(0, depth + 1):
        for word in realization.words(n):
            left, right = realization.interval(word)
            rows.append([str(word), left, right])
    return rows


def _exact_level_checks_placed(realization: IntervalRealization, depth: int) -> Tuple[float, float, float, str]:
    """Worst nesting excess, worst sibling gap and smallest length ratio over placements 1..depth."""
    nesting, gap, smallest = 0.0, math.inf, math.inf
    where = ""
    for k in range(1, depth + 1):
        placement = realization.placement(k)
        for offset, ratio in zip(placement.offsets, placement.ratios):
            excess = max(-offset, offset + ratio - 1.0)
            if excess > nesting:
                nesting, where = excess, f"level {k}"
            smallest = min(smallest, ratio)
        level_gap = placement.min_gap()
        if level_gap < gap:
            gap = level_gap
            if gap <= 0.0:
                where = where or f"level {k}"
    return nesting, gap, smallest, where


def _exact_level_checks_explicit(realization: IntervalRealization, depth: int) -> Tuple[float, float, float, str]:
    nesting, gap, smallest = 0.0, math.inf, math.inf
    where = ""
    table = realization.explicit
    for indices, (left, right) in table.items():
        if not indices or len(indices) > depth:
            continue
        parent = table.get(indices[:-1])
        if parent is None:
            raise RealizationError(f"explicit realization misses the parent of {Word(indices)}")
        p_left, p_right = parent
        scale = max(p_right - p_left, EPS)
        excess = max(p_left - left, right - p_right) / scale
        if excess > nesting:
            nesting, where = excess, f"word {Word(indices)}"
        smallest = min(smallest, (right - left) / scale)
    children: Dict[Tuple[int, ...], List[Tuple[float, float, Tuple[int, ...]]]] = {}
    for indices, (left, right) in table.items():
        if indices and len(indices) <= depth:
            children.setdefault(indices[:-1], []).append((left, right, indices))
    for parent, siblings in children.items():
        siblings.sort()
        p_left, p_right = table[parent]
        scale = max(p_right - p_left, EPS)
        for (l1, r1, w1), (l2, r2, w2) in zip(siblings, siblings[1:]):
            level_gap = (l2 - r1) / scale
            if level_gap < gap:
                gap = level_gap
                if gap <= 0.0:
                    where = f"siblings {Word(w1)} and {Word(w2)}"
    return nesting, gap, smallest, where


def _level_log_extremes(realization: IntervalRealization, depth: int) -> List[Tuple[float, float]]:
    """(min, max) of log diam for every level 0..depth."""
    if realization.is_explicit:
        extremes = []
        for n in range(0, depth + 1):
            _, lengths = realization.level_arrays(n)
            with np.errstate(divide='ignore'):
                logs = np.log(lengths)
            extremes.append((float(np.min(logs)), float(np.max(logs))))
        return extremes
    low = high = math.log(realization.root_length)
    extremes = [(low, high)]
    for k in range(1, depth + 1):
        logs = realization.placement(k).log_ratios
        low += min(logs)
        high += max(logs)
        extremes.append((low, high))
    return extremes


def verify_moran_axioms(realization: IntervalRealization, depth: Optional[int] = None,
                        m5_window: Optional[int] = None) -> AxiomReport:
    """
    Certify M1-M5 on levels 1..depth.

    M1 (nesting), M3 (sibling disjointness) and M4 (positive length, inradius C0 times the
    diameter) are exact; M2 (diameters shrink) and M5 (log diameters of a word and of its
    smallest offspring are comparable) are trend checks over the window.

    Args:
        realization: Interval realization
        depth: Levels to certify, default the realized depth
        m5_window: Trend window, default 20% of depth

    Returns:
        AxiomReport; never raises on failure, see AxiomReport.raise_on_hard_failure
    """
    depth = realization.depth if depth is None else depth
    if depth < 1 or depth > realization.depth:
        raise ParameterError(f"depth {depth} outside 1..{realization.depth}")
    window = default_tail_window(depth) if m5_window is None else m5_window
    if window < 1 or window > depth:
        raise ParameterError(f"m5 window {window} outside 1..{depth}")
    trend_tolerance = get_defaults().trend_tolerance

    if realization.is_explicit:
        nesting, gap, smallest, where = _exact_level_checks_explicit(realization, depth)
    else:
        nesting, gap, smallest, where = _exact_level_checks_placed(realization, depth)

    report = AxiomReport(subject=f"realization {realization.label}", depth=depth)
    report.checks.append(AxiomCheck(
        name="M1", kind=CheckKind.EXACT, passed=nesting <= FIDELITY_TOLERANCE, deviation=nesting, hard=True,
        detail="children nested in their parents" if nesting <= FIDELITY_TOLERANCE
        else f"child leaves its parent by {nesting:.3e} (relative) at {where}"))
    disjoint = gap > 0.0
    report.checks.append(AxiomCheck(
        name="M3", kind=CheckKind.EXACT, passed=disjoint, deviation=max(0.0, -gap) if math.isfinite(gap) else 0.0,
        hard=True,
        detail=f"minimal relative sibling gap {gap:.6g}" if disjoint
        else f"siblings intersect (relative gap {gap:.3e}) at {where}"))
    report.checks.append(AxiomCheck(
        name="M4", kind=CheckKind.EXACT, passed=smallest > 0.0, deviation=0.0,
        detail=f"every interval contains a ball of radius {realization.C0_certified}·diam"
        if smallest > 0.0 else "degenerate interval of zero length"))

    extremes = _level_log_extremes(realization, depth)
    start = max(1, depth - window + 1)
    ns = np.arange(start, depth + 1)
    log_max = np.array([extremes[n][1] for n in ns])
    if ns.size >= 2:
        slope, _, _ = ols_slope(ns, log_max)
        shrinking = bool(np.all(np.diff(log_max) < 0.0)) and slope < 0.0
    else:
        shrinking = depth >= 1 and extremes[depth][1] < extremes[0][1]
    report.checks.append(AxiomCheck(
        name="M2", kind=CheckKind.TREND, passed=shrinking, deviation=math.exp(extremes[depth][1]),
        window=window, detail=f"max diameter {math.exp(extremes[depth][1]):.3e} at level {depth}"))

    report.checks.append(_m5_check(realization, extremes, depth, window, trend_tolerance))
    if realization.eta is not None:
        report.checks.append(example_bounds_check(realization, depth))
    logger.info(f"verify_moran_axioms: {report.subject} depth={depth} passed={report.passed}")
    return report


def _m5_check(realization: IntervalRealization, extremes: List[Tuple[float, float]], depth: int,
              window: int, tolerance: float) -> AxiomCheck:
    """Per-level worst ratio log(diam E_w / R) / log(min offspring diam / R)."""
    log_root = extremes[0][1]
    ns, ratios = [], []
    for n in range(max(1, depth - window + 1), depth + 1):
        if realization.is_explicit:
            if n >= depth:
                continue
            worst = _explicit_m5_ratio(realization, n, log_root)
        else:
            a = extremes[n][1] - log_root
            b = min(realization.placement(n + 1).log_ratios)
            worst = a / (a + b)
        ns.append(n)
        ratios.append(worst)
    if not ratios:
        return AxiomCheck(name="M5", kind=CheckKind.TREND, passed=False, deviation=math.inf, window=window,
                          detail="not enough levels for the M5 trend")
    trend = trend_to_one(ratios, ns, tolerance)
    return AxiomCheck(name="M5", kind=CheckKind.TREND, passed=trend.passed, deviation=trend.extrapolated_deviation,
                      window=window,
                      detail=f"final deviation {trend.final_deviation:.3e}, extrapolated "
                             f"{trend.extrapolated_deviation:.3e}, non-increasing={trend.non_increasing}")


def _explicit_m5_ratio(realization: IntervalRealization, n: int, log_root: float) -> float:
    worst = 1.0
    table = realization.explicit
    for indices, (left, right) in table.items():
        if len(indices) != n:
            continue
        child_lengths = [r - l for w, (l, r) in table.items() if len(w) == n + 1 and w[:n] == indices]
        if not child_lengths or min(child_lengths) <= 0.0 or right <= left:
            continue
        a = math.log(right - left) - log_root
        m = math.log(min(child_lengths)) - log_root
        worst = min(worst, a / m) if m != 0.0 else worst
    return worst


def sample_points(realization: IntervalRealization, measure: 'MoranMeasure', count: int, seed: int,
                  depth: Optional[int] = None) -> PointCloud:
    """
    μ-distributed points: words drawn level by level from the offspring weights, mapped
    to interval midpoints at the realized depth.

    Raises:
        RealizationError: If the measure lives on another spec
    """
    if measure.spec != realization.spec:
        raise RealizationError("measure and realization are built on different specs")
    if count < 1:
        raise ParameterError(f"count must be positive, got {count}")
    depth = realization.depth if depth is None else depth
    if depth > realization.depth:
        raise RealizationError(f"depth {depth} beyond the realized depth {realization.depth}")
    paths = measure.sample_index_paths(count, depth, seed)

    if realization.is_explicit:
        points = []
        for row in paths:
            left, right = realization.interval(Word(tuple(int(i) for i in row)))
            points.append(0.5 * (left + right))
        values = np.array(points)
    else:
        lefts = np.full(count, realization.root_left)
        lengths = np.full(count, realization.root_length)
        for k in range(1, depth + 1):
            placement = realization.placement(k)
            chosen = paths[:, k - 1] - 1
            lefts = lefts + np.asarray(placement.offsets)[chosen] * lengths
            lengths = lengths * np.asarray(placement.ratios)[chosen]
        values = lefts + 0.5 * lengths

    provenance = {'realization': realization.label, 'seed': seed, 'count': count, 'depth': depth}
    logger.debug(f"sample_points: {count} points at depth {depth} seed {seed}")
    return PointCloud(points=values, provenance=provenance)
