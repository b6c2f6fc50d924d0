#!/usr/bin/env python3
"""
Empirical estimators - box counting, ball masses and local slopes, greedy delta-packing
sums and the conversion of ball covers to symbolic covers
"""

import bisect
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .codetree import Word
from .errors import CoverError, EstimationError, ParameterError
from .measure import MoranMeasure, level_log_masses
from .realization import IntervalRealization, PointCloud
from .util.config import get_defaults
from .util.numerics import default_tail_window, log_sum_exp, ols_slope, tail_extremes

logger = logging.getLogger(__name__)

# Relative slack for closed-ball and diameter comparisons
CLOSED_SLACK = 1e-12
MIN_SCALES = 4


@dataclass(frozen=True)
class ScaleRange:
    """Strictly decreasing radii r_1 > r_2 > ... inside (0, root_diameter)."""
    r_values: Tuple[float, ...]
    base: float

    def __post_init__(self):
        values = tuple(float(r) for r in self.r_values)
        if not values:
            raise EstimationError("scale range is empty")
        if any(not (r > 0.0 and math.isfinite(r)) for r in values):
            raise EstimationError(f"radii must be positive and finite, got {values}")
        if any(b >= a for a, b in zip(values, values[1:])):
            raise EstimationError("radii must be strictly decreasing")
        object.__setattr__(self, 'r_values', values)

    @classmethod
    def geometric(cls, start: float, base: Optional[float] = None, count: int = 7,
                  root_diameter: float = 1.0) -> 'ScaleRange':
        """start, start*base, ..., start*base^(count-1); base defaults to MORANLAB_SCALE_BASE."""
        base = get_defaults().scale_base if base is None else base
        if not (0.0 < base < 1.0):
            raise EstimationError(f"scale base must lie in (0, 1), got {base}")
        if not (0.0 < start < root_diameter):
            raise EstimationError(f"largest radius {start} must lie in (0, {root_diameter})")
        return cls(r_values=tuple(start * base ** i for i in range(count)), base=base)

    def __len__(self) -> int:
        return len(self.r_values)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.r_values)


@dataclass
class BoxCountResult:
    """Slope of log N(r) against log(1/r) with the per-scale counts."""
    slope: float
    intercept: float
    residual: float
    counts: np.ndarray
    scales: ScaleRange
    degenerate: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            'slope': self.slope,
            'intercept': self.intercept,
            'residual': self.residual,
            'degenerate': self.degenerate,
            'scales': list(self.scales.r_values),
            'counts': [float(c) for c in self.counts],
        }

    def csv_rows(self) -> List[List[Any]]:
        return [[r, float(c)] for r, c in zip(self.scales.r_values, self.counts)]


def box_count_dimension(cloud: PointCloud, scales: ScaleRange) -> BoxCountResult:
    """
    Box-counting dimension of a point cloud.

    Boxes are half-open [m r, (m+1) r); counts at grid offsets 0 and r/2 are averaged.

    Raises:
        EstimationError: On an empty cloud or fewer than four scales
    """
    points = cloud.points
    if points.size == 0:
        raise EstimationError("point cloud is empty")
    if len(scales) < MIN_SCALES:
        raise EstimationError(f"box counting needs at least {MIN_SCALES} scales, got {len(scales)}")

    counts = np.empty(len(scales))
    for i, r in enumerate(scales.r_values):
        occupied = [np.unique(np.floor((points - offset) / r)).size for offset in (0.0, 0.5 * r)]
        counts[i] = 0.5 * (occupied[0] + occupied[1])
        logger.debug(f"box_count_dimension: r={r:.3e} boxes={counts[i]}")

    if points[0] == points[-1]:
        logger.warning("box_count_dimension: all points are equal; slope set to 0")
        return BoxCountResult(slope=0.0, intercept=0.0, residual=0.0, counts=counts, scales=scales,
                              degenerate=True)

    slope, intercept, residual = ols_slope(np.log(1.0 / scales.array), np.log(counts))
    logger.info(f"box_count_dimension: slope={slope:.6f} residual={residual:.3e} over {len(scales)} scales")
    return BoxCountResult(slope=slope, intercept=intercept, residual=residual, counts=counts, scales=scales)


def _check_pair(measure: MoranMeasure, realization: IntervalRealization) -> None:
    if measure.spec != realization.spec:
        raise EstimationError("measure and realization are built on different specs")


def ball_log_mass(measure: MoranMeasure, realization: IntervalRealization, center: float,
                  radius: float) -> float:
    """
    log mu(B(center, radius)) for the closed ball, summing cylinders inside the ball and
    realized-depth cylinders that meet it.
    """
    _check_pair(measure, realization)
    if radius <= 0:
        raise ParameterError(f"radius must be positive, got {radius}")
    slack = CLOSED_SLACK * realization.root_length
    low, high = center - radius - slack, center + radius + slack

    pieces: List[float] = []
    stack = [(Word(), math.log(measure.root_mass))]
    while stack:
        word, log_mass = stack.pop()
        left, right = realization.interval(word)
        if right < low or left > high:
            continue
        if (left >= low and right <= high) or len(word) >= realization.depth:
            pieces.append(log_mass)
            continue
        weights = measure.child_weights(word)
        for i, p in enumerate(weights, start=1):
            if p > 0.0:
                stack.append((word.child(i), log_mass + math.log(p)))
    return log_sum_exp(pieces)


@dataclass
class LocalSlopeResult:
    """log mu(B(x, r)) / log r per scale with tail-window extremes."""
    x: float
    ratios: np.ndarray
    lower: float
    upper: float
    scales: ScaleRange

    def to_dict(self) -> Dict[str, Any]:
        return {
            'x': self.x,
            'lower': self.lower,
            'upper': self.upper,
            'ratios': [float(r) for r in self.ratios],
            'scales': list(self.scales.r_values),
        }

    def csv_rows(self) -> List[List[Any]]:
        return [[r, float(v)] for r, v in zip(self.scales.r_values, self.ratios)]


def local_dimension_slope(measure: MoranMeasure, realization: IntervalRealization, x: float,
                          scales: ScaleRange, tail_window: Optional[int] = None) -> LocalSlopeResult:
    """
    Ratios log mu(B(x, r)) / log r on the scale grid and their tail min/max.

    Raises:
        EstimationError: If x lies outside the root interval or a radius is not below 1
    """
    left, right = realization.interval(Word())
    if not (left <= x <= right):
        raise EstimationError(f"x={x} lies outside the root interval [{left}, {right}]")
    if scales.r_values[0] >= 1.0:
        raise EstimationError("local slopes need radii below 1 (log r < 0)")
    tail_window = default_tail_window(len(scales)) if tail_window is None else tail_window

    ratios = np.array([ball_log_mass(measure, realization, x, r) / math.log(r) for r in scales.r_values])
    lower, upper = tail_extremes(ratios, tail_window)
    return LocalSlopeResult(x=x, ratios=ratios, lower=lower, upper=upper, scales=scales)


@dataclass
class LeafSupport:
    """Midpoints of the realized-depth intervals carrying their masses, sorted by position."""
    points: np.ndarray
    masses: np.ndarray
    cumulative: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        order = np.argsort(self.points, kind='stable')
        self.points = np.asarray(self.points)[order]
        self.masses = np.asarray(self.masses)[order]
        self.cumulative = np.concatenate(([0.0], np.cumsum(self.masses)))

    def ball_mass(self, center: float, radius: float) -> float:
        """Mass of the atoms in the closed ball."""
        slack = CLOSED_SLACK * max(1.0, abs(center))
        lo = int(np.searchsorted(self.points, center - radius - slack, side='left'))
        hi = int(np.searchsorted(self.points, center + radius + slack, side='right'))
        return float(self.cumulative[hi] - self.cumulative[lo])


def leaf_support(measure: MoranMeasure, realization: IntervalRealization,
                 depth: Optional[int] = None) -> LeafSupport:
    """Discretize mu on the realized prefix; zero-mass leaves are dropped."""
    _check_pair(measure, realization)
    depth = realization.depth if depth is None else depth
    if realization.is_explicit:
        words = realization.words(depth)
        bounds = np.array([realization.interval(w) for w in words])
        mids = bounds.mean(axis=1)
        log_masses = np.array([measure.cylinder_log_mass(w) for w in words])
    else:
        lefts, lengths = realization.level_arrays(depth)
        mids = lefts + 0.5 * lengths
        log_masses = level_log_masses(measure, depth)
    live = np.isfinite(log_masses)
    return LeafSupport(points=mids[live], masses=np.exp(log_masses[live]))


@dataclass
class PackingResult:
    """S_q of a greedy delta-packing."""
    value: float
    count: int
    centers: List[float]
    strategy: str
    q: float
    delta: float

    def to_dict(self) -> Dict[str, Any]:
        return {'value': self.value, 'count': self.count, 'strategy': self.strategy, 'q': self.q,
                'delta': self.delta}

    def csv_rows(self) -> List[List[Any]]:
        return [[self.delta, self.q, self.value, self.count, self.strategy]]


def _power(mass: float, q: float) -> float:
    return 0.0 if mass <= 0.0 else mass ** q


def _sweep_packing(points: np.ndarray, delta: float) -> List[float]:
    centers: List[float] = []
    for x in points:
        if not centers or x - centers[-1] > 2.0 * delta:
            centers.append(float(x))
    return centers


def _mass_greedy_packing(support: LeafSupport, points: np.ndarray, delta: float) -> List[float]:
    masses = np.array([support.ball_mass(x, delta) for x in points])
    order = np.argsort(-masses, kind='stable')
    placed: List[float] = []
    for index in order:
        x = float(points[index])
        position = bisect.bisect_left(placed, x)
        if position > 0 and x - placed[position - 1] <= 2.0 * delta:
            continue
        if position < len(placed) and placed[position] - x <= 2.0 * delta:
            continue
        placed.insert(position, x)
    return placed


def sq_packing_sum(measure: MoranMeasure, realization: IntervalRealization, q: float, delta: float,
                   region: Optional[Tuple[float, float]] = None,
                   support: Optional[LeafSupport] = None) -> PackingResult:
    """
    Greedy estimate of S_q(mu, region, delta): disjoint closed delta-balls centered at support
    points, swept left to right; for q >= 1 a mass-first ordering is also tried and the
    larger sum kept. 0^q counts as 0.

    Raises:
        ParameterError: If delta <= 0 or q < 0
    """
    if delta <= 0:
        raise ParameterError(f"delta must be positive, got {delta}")
    if q < 0:
        raise ParameterError(f"q must be non-negative, got {q}")
    support = leaf_support(measure, realization) if support is None else support
    points = support.points
    if region is not None:
        low, high = region
        points = points[(points >= low) & (points <= high)]
    if points.size == 0:
        return PackingResult(value=0.0, count=0, centers=[], strategy="sweep", q=q, delta=delta)

    candidates = [("sweep", _sweep_packing(points, delta))]
    if q >= 1.0:
        candidates.append(("mass_greedy", _mass_greedy_packing(support, points, delta)))

    best: Optional[PackingResult] = None
    for strategy, centers in candidates:
        value = math.fsum(_power(support.ball_mass(c, delta), q) for c in centers)
        if best is None or value > best.value:
            best = PackingResult(value=value, count=len(centers), centers=centers, strategy=strategy,
                                 q=q, delta=delta)
    logger.debug(f"sq_packing_sum: q={q} delta={delta:.3e} S={best.value:.6e} "
                 f"count={best.count} via {best.strategy}")
    return best


@dataclass
class CoverConversion:
    """Symbolic cover assembled from the diameter-crossing words of each ball."""
    words: List[Word]
    per_ball: List[int]

    @property
    def max_per_ball(self) -> int:
        return max(self.per_ball, default=0)

    def to_dict(self) -> Dict[str, Any]:
        return {'words': [str(w) for w in self.words], 'per_ball': self.per_ball,
                'max_per_ball': self.max_per_ball}


def _crossing_words(realization: IntervalRealization, low: float, high: float) -> List[Word]:
    """Words meeting [low, high] whose diameter is at most diam(ball) while the parent's is larger."""
    diameter = high - low
    slack = CLOSED_SLACK * realization.root_length
    bound = diameter * (1.0 + CLOSED_SLACK)
    found: List[Word] = []
    stack = [Word()]
    while stack:
        word = stack.pop()
        left, right = realization.interval(word)
        if right < low - slack or left > high + slack:
            continue
        if right - left <= bound or len(word) >= realization.depth:
            found.append(word)
            continue
        n = realization.spec.branching(len(word) + 1)
        stack.extend(word.child(i) for i in range(n, 0, -1))
    return found


def ball_to_cylinder_cover(realization: IntervalRealization,
                           balls: Sequence[Tuple[float, float]]) -> CoverConversion:
    """
    Convert closed intervals covering the realized limit-set prefix to a symbolic cover.

    Raises:
        CoverError: If some realized-depth interval midpoint is not covered by any ball
    """
    intervals = [(float(a), float(b)) for a, b in balls]
    if not intervals:
        raise CoverError("no balls given")
    if any(b < a for a, b in intervals):
        raise CoverError("ball given with right end below left end")

    lefts, lengths = realization.level_arrays(realization.depth)
    mids = lefts + 0.5 * lengths
    slack = CLOSED_SLACK * realization.root_length
    covered = np.zeros(mids.size, dtype=bool)
    for a, b in intervals:
        covered |= (mids >= a - slack) & (mids <= b + slack)
    if not np.all(covered):
        missing = float(mids[np.argmin(covered)])
        raise CoverError(f"balls fail to cover the realized set near x={missing!r}")

    words: Dict[Tuple[int, ...], Word] = {}
    per_ball = []
    for a, b in intervals:
        crossing = _crossing_words(realization, a, b)
        per_ball.append(len(crossing))
        for word in crossing:
            words[word.indices] = word
    ordered = [words[key] for key in sorted(words)]
    logger.info(f"ball_to_cylinder_cover: {len(intervals)} balls -> {len(ordered)} words, "
                f"max {max(per_ball)} per ball")
    return CoverConversion(words=ordered, per_ball=per_ball)
