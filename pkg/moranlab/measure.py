#!/usr/bin/env python3
"""
Moran measures - offspring weight rules, cylinder masses, entropy averages,
condition checks and L^q spectra on the codetree
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .codetree import (
    EAGER_VALIDATION_DEPTH,
    ConstructionSpec,
    Word,
    level_size,
    words_at_level,
)
from .dimension import homogeneous_ratio_sequence
from .errors import MeasureError, ParameterError
from .filtration import GeneralFiltration, symbolic_filtration
from .util.config import get_defaults
from .util.numerics import default_tail_window, log_sum_exp, ols_slope, tail_extremes

logger = logging.getLogger(__name__)

WEIGHT_SUM_TOLERANCE = 1e-12
DEFAULT_Q_GRID = (0.5, 0.9, 0.99, 1.01, 1.1, 2.0)
SANDWICH_TOLERANCE = 1e-3


class WeightRule(ABC):
    """Rule assigning conditional masses p_{w i} to the offsprings of a word."""

    name: str = "rule"
    symmetric: bool = True  # weights depend on the level only

    @abstractmethod
    def raw_weights(self, k: int, parent: Word, branching: int) -> Sequence[float]:
        """Offspring weights at level k below `parent` (|parent| = k - 1)."""

    def to_dict(self) -> Dict[str, Any]:
        raise MeasureError(f"weight rule '{self.name}' is not serializable")


class UniformWeights(WeightRule):
    """p = 1/N_k for every offspring."""
    name = "uniform"

    def raw_weights(self, k: int, parent: Word, branching: int) -> Sequence[float]:
        return [1.0 / branching] * branching

    def to_dict(self) -> Dict[str, Any]:
        return {'rule': self.name}

    def __eq__(self, other: object) -> bool:
        return isinstance(other, UniformWeights)

    def __hash__(self) -> int:
        return hash(self.name)


@dataclass(frozen=True)
class BernoulliWeights(WeightRule):
    """The same weight vector on every level."""
    weights: Tuple[float, ...]
    name = "bernoulli"

    def __post_init__(self):
        object.__setattr__(self, 'weights', tuple(float(p) for p in self.weights))

    def raw_weights(self, k: int, parent: Word, branching: int) -> Sequence[float]:
        if branching != len(self.weights):
            raise MeasureError(f"level {k} has N={branching} offsprings but {len(self.weights)} weights")
        return self.weights

    def to_dict(self) -> Dict[str, Any]:
        return {'rule': self.name, 'weights': list(self.weights)}


@dataclass(frozen=True)
class LevelWeights(WeightRule):
    """Explicit per-level weight arrays; level k uses entry (k - 1) mod p."""
    levels: Tuple[Tuple[float, ...], ...]
    name = "levels"

    def __post_init__(self):
        if not self.levels:
            raise MeasureError("level weights need at least one level")
        object.__setattr__(self, 'levels', tuple(tuple(float(p) for p in level) for level in self.levels))

    def raw_weights(self, k: int, parent: Word, branching: int) -> Sequence[float]:
        weights = self.levels[(k - 1) % len(self.levels)]
        if branching != len(weights):
            raise MeasureError(f"level {k} has N={branching} offsprings but {len(weights)} weights")
        return weights

    def to_dict(self) -> Dict[str, Any]:
        return {'rule': self.name, 'levels': [list(level) for level in self.levels]}


class CallableWeights(WeightRule):
    """Weights from a Python callable (k, parent) -> sequence; word dependent unless told otherwise."""
    name = "callable"

    def __init__(self, func: Callable[[int, Word], Sequence[float]], symmetric: bool = False):
        self.func = func
        self.symmetric = symmetric

    def raw_weights(self, k: int, parent: Word, branching: int) -> Sequence[float]:
        return self.func(k, parent)


def weight_rule_from_dict(data: Dict[str, Any]) -> WeightRule:
    """Parse {'rule': 'uniform' | 'bernoulli' | 'levels', ...}."""
    if not isinstance(data, dict):
        raise MeasureError("weight rule must be a JSON object")
    rule = data.get('rule')
    expected = {'uniform': {'rule'}, 'bernoulli': {'rule', 'weights'}, 'levels': {'rule', 'levels'}}
    if rule not in expected:
        raise MeasureError(f"unknown weight rule {rule!r}; expected one of {sorted(expected)}")
    if set(data) != expected[rule]:
        raise MeasureError(f"weight rule '{rule}' expects keys {sorted(expected[rule])}, got {sorted(data)}")
    if rule == 'uniform':
        return UniformWeights()
    if rule == 'bernoulli':
        return BernoulliWeights(tuple(data['weights']))
    return LevelWeights(tuple(tuple(level) for level in data['levels']))


@dataclass(frozen=True)
class MoranMeasure:
    """Measure on the limit set given by conditional offspring masses."""
    spec: ConstructionSpec
    rule: WeightRule
    root_mass: float = 1.0
    _level_cache: Dict[int, np.ndarray] = field(default_factory=dict, compare=False, repr=False)

    @property
    def symmetric(self) -> bool:
        return self.rule.symmetric

    def _validated(self, k: int, parent: Word, raw: Sequence[float]) -> np.ndarray:
        weights = np.asarray(raw, dtype=float)
        branching = self.spec.branching(k)
        if weights.shape != (branching,):
            raise MeasureError(f"level {k} below {parent} expects {branching} weights, got {len(weights)}")
        if np.any(weights < 0.0) or not np.all(np.isfinite(weights)):
            raise MeasureError(f"negative or non-finite weight at level {k} below {parent}: {weights.tolist()}")
        total = math.fsum(weights.tolist())
        if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise MeasureError(f"weights at level {k} below {parent} sum to {total!r}, not 1")
        return weights

    def level_weights(self, k: int) -> np.ndarray:
        """Weights of level k for symmetric rules (validated once, cached)."""
        if not self.rule.symmetric:
            raise MeasureError(f"weight rule '{self.rule.name}' depends on the word")
        cached = self._level_cache.get(k)
        if cached is None:
            branching = self.spec.branching(k)
            cached = self._validated(k, Word(), self.rule.raw_weights(k, Word(), branching))
            self._level_cache[k] = cached
        return cached

    def child_weights(self, parent: Word) -> np.ndarray:
        """Validated weights below a live parent."""
        k = len(parent) + 1
        if self.rule.symmetric:
            return self.level_weights(k)
        return self._validated(k, parent, self.rule.raw_weights(k, parent, self.spec.branching(k)))

    def cylinder_log_mass(self, word: Word) -> float:
        """log μ(E_w), or -inf for zero mass."""
        self.spec.validate_word(word)
        value = math.log(self.root_mass)
        for n, index in enumerate(word.indices):
            p = float(self.child_weights(word.prefix(n))[index - 1])
            if p == 0.0:
                return float('-inf')
            value += math.log(p)
        return value

    def sample_index_paths(self, count: int, depth: int, seed: int) -> np.ndarray:
        """
        μ-distributed random words as a (count, depth) array of 1-based indices.

        Deterministic given the seed.
        """
        if count < 1 or depth < 0:
            raise ParameterError(f"need count >= 1 and depth >= 0, got {count}, {depth}")
        rng = np.random.default_rng(seed)
        paths = np.zeros((count, depth), dtype=np.int64)
        if self.symmetric:
            for k in range(1, depth + 1):
                weights = self.level_weights(k)
                paths[:, k - 1] = rng.choice(weights.size, size=count, p=weights) + 1
            return paths
        for row in range(count):
            indices: Tuple[int, ...] = ()
            for k in range(1, depth + 1):
                weights = self.child_weights(Word(indices))
                indices += (int(rng.choice(weights.size, p=weights)) + 1,)
            paths[row] = indices
        return paths


def make_uniform_measure(spec: ConstructionSpec) -> MoranMeasure:
    """Uniformly distributed measure: p = 1/N_{|w|+1}."""
    return MoranMeasure(spec=spec, rule=UniformWeights())


def make_weighted_measure(spec: ConstructionSpec,
                          weight_rule: Union[WeightRule, Dict[str, Any], Sequence, Callable],
                          root_mass: float = 1.0) -> MoranMeasure:
    """
    Build and validate a measure from a weight rule.

    Args:
        spec: Construction spec
        weight_rule: WeightRule, JSON dict, a fixed vector, per-level vectors or a callable
        root_mass: p_∅

    Raises:
        MeasureError: Weight sums differ from 1 by more than 1e-12 or a weight is negative
    """
    if isinstance(weight_rule, WeightRule):
        rule = weight_rule
    elif isinstance(weight_rule, dict):
        rule = weight_rule_from_dict(weight_rule)
    elif callable(weight_rule):
        rule = CallableWeights(weight_rule)
    elif len(weight_rule) > 0 and isinstance(weight_rule[0], (list, tuple)):
        rule = LevelWeights(tuple(tuple(level) for level in weight_rule))
    else:
        rule = BernoulliWeights(tuple(weight_rule))

    if not (math.isfinite(root_mass) and root_mass > 0):
        raise MeasureError(f"root mass must be positive, got {root_mass!r}")
    measure = MoranMeasure(spec=spec, rule=rule, root_mass=float(root_mass))

    if rule.symmetric:
        for k in range(1, EAGER_VALIDATION_DEPTH + 1):
            measure.level_weights(k)
    else:
        measure.child_weights(Word())
    logger.debug(f"make_weighted_measure: rule '{rule.name}' validated")
    return measure


def cylinder_log_mass(measure: MoranMeasure, word: Word) -> float:
    """Σ log p along the word (including log p_∅); -inf marks zero mass."""
    return measure.cylinder_log_mass(word)


def offspring_weights(measure: MoranMeasure, word: Word) -> np.ndarray:
    """Weights of the offsprings of `word`; zeros below a zero-mass cylinder."""
    if measure.cylinder_log_mass(word) == float('-inf'):
        return np.zeros(measure.spec.branching(len(word) + 1))
    return measure.child_weights(word)


def level_log_masses(measure: MoranMeasure, n: int, limit: Optional[int] = None) -> np.ndarray:
    """log μ(E_w) for every w in Σ_n in lexicographic order."""
    limit = get_defaults().materialize_limit if limit is None else limit
    if level_size(measure.spec, n) > limit:
        raise MeasureError(f"level {n} has more than {limit} words")
    if not measure.symmetric:
        return np.array([measure.cylinder_log_mass(w) for w in words_at_level(measure.spec, n)])
    masses = np.array([math.log(measure.root_mass)])
    with np.errstate(divide='ignore'):
        for k in range(1, n + 1):
            masses = (masses[:, None] + np.log(measure.level_weights(k))[None, :]).ravel()
    return masses


def sample_index_paths(measure: MoranMeasure, count: int, depth: int, seed: int) -> np.ndarray:
    """μ-distributed random words as a (count, depth) array of 1-based indices."""
    return measure.sample_index_paths(count, depth, seed)


def sample_paths(measure: MoranMeasure, count: int, depth: int, seed: int) -> List[Word]:
    return [Word(tuple(int(i) for i in row)) for row in sample_index_paths(measure, count, depth, seed)]


def _level_terms(weights: np.ndarray, log_ratios: Sequence[float]) -> Tuple[float, float]:
    """(Σ p log p, Σ p log c) over offsprings with p > 0."""
    entropy = math.fsum(p * math.log(p) for p in weights.tolist() if p > 0.0)
    contraction = math.fsum(p * c for p, c in zip(weights.tolist(), log_ratios) if p > 0.0)
    return entropy, contraction


@dataclass
class EntropyAverageTrace:
    """Cumulative offspring entropies and log-contractions along one path."""
    path: Word
    N: int
    numerator: float
    denominator: float
    ratio: float
    numerator_series: np.ndarray
    denominator_series: np.ndarray

    @property
    def ratio_series(self) -> np.ndarray:
        return self.numerator_series / self.denominator_series

    def to_dict(self) -> Dict[str, Any]:
        return {
            'path_length': len(self.path),
            'N': self.N,
            'numerator': self.numerator,
            'denominator': self.denominator,
            'ratio': self.ratio,
        }

    def csv_rows(self) -> List[List[Any]]:
        ratios = self.ratio_series
        return [[n, float(a), float(b), float(r)] for n, (a, b, r)
                in enumerate(zip(self.numerator_series, self.denominator_series, ratios), start=1)]


def entropy_average_ratio(measure: MoranMeasure, path_prefix: Word, N: int) -> EntropyAverageTrace:
    """
    Entropy average along a path.

    Term n (n = 0..N-1) sums over the offsprings of the node path|_n, so the sums cover
    offspring levels 1..N. 0 log 0 is taken as 0.

    Raises:
        ParameterError: If N < 1 or the path is shorter than N
        MeasureError: If a visited node has zero mass
    """
    if N < 1 or len(path_prefix) < N:
        raise ParameterError(f"need 1 <= N <= path length, got N={N}, length={len(path_prefix)}")
    measure.spec.validate_word(path_prefix)

    entropies = np.zeros(N)
    contractions = np.zeros(N)
    cache: Dict[Tuple[int, int], Tuple[float, float]] = {}
    for n in range(N):
        k = n + 1
        level = measure.spec.level(k)
        if measure.symmetric:
            weights = measure.level_weights(k)
            key = (id(level), id(weights))
            terms = cache.get(key)
            if terms is None:
                terms = _level_terms(weights, level.log_ratios)
                cache[key] = terms
        else:
            weights = measure.child_weights(path_prefix.prefix(n))
            terms = _level_terms(weights, level.log_ratios)
        entropies[n], contractions[n] = terms

        if n + 1 < N and weights[path_prefix.indices[n] - 1] == 0.0:
            raise MeasureError(f"path enters a zero-mass cylinder at level {k}; all-zero weights below it")

    numerator_series = np.cumsum(entropies)
    denominator_series = np.cumsum(contractions)
    numerator = float(numerator_series[-1])
    denominator = float(denominator_series[-1])
    return EntropyAverageTrace(path=path_prefix, N=N, numerator=numerator, denominator=denominator,
                               ratio=numerator / denominator, numerator_series=numerator_series,
                               denominator_series=denominator_series)


class ConditionVerdict(Enum):
    """Decay-rate verdict for the second-moment series."""
    PLAUSIBLY_CONVERGENT = "plausibly convergent"
    DIVERGING = "diverging"
    UNDETERMINED = "undetermined"


# Slope of log term vs log n below which the series is called convergent
CONVERGENT_SLOPE = -1.1


@dataclass
class ConditionReport:
    """Partial sums of the second-moment series and diameter decay speeds."""
    n_max: int
    suprema: np.ndarray
    l2_partial_sums: np.ndarray
    diamspeed_values: np.ndarray
    diamspeed_liminf: float
    decay_slope: float
    verdict: ConditionVerdict
    modes: Dict[str, int] = field(default_factory=dict)

    @property
    def diamspeed_positive(self) -> bool:
        return self.diamspeed_liminf > 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n_max': self.n_max,
            'l2_partial_sum': float(self.l2_partial_sums[-1]),
            'decay_slope': self.decay_slope,
            'verdict': self.verdict.value,
            'diamspeed_liminf': self.diamspeed_liminf,
            'diamspeed_positive': self.diamspeed_positive,
            'modes': dict(self.modes),
        }

    def csv_rows(self) -> List[List[Any]]:
        terms = np.diff(np.concatenate(([0.0], self.l2_partial_sums)))
        return [[n, float(t), float(s), float(d)] for n, (t, s, d)
                in enumerate(zip(terms, self.l2_partial_sums, self.diamspeed_values), start=1)]


def _second_moment(weights: np.ndarray, log_ratios: Sequence[float]) -> float:
    return math.fsum(p * (math.log(p) ** 2 + c ** 2) for p, c in zip(weights.tolist(), log_ratios) if p > 0.0)


def check_entropy_conditions(measure: MoranMeasure, n_max: int, path_sample: int = 8, seed: int = 0,
                             sample_size: int = 256,
                             enumeration_limit: Optional[int] = None) -> ConditionReport:
    """
    Evaluate the diameter-speed condition and partial sums of the second-moment series.

    Term n of the series is n^-2 times the supremum over w in Σ_n of
    Σ_j p_{wj} ((log p_{wj})^2 + (log c_{wj})^2); zero-mass words contribute 0. The
    supremum is exact for symmetric rules and enumerable levels, otherwise taken over a
    seeded uniform sample of words.

    Args:
        measure: Moran measure
        n_max: Number of series terms
        path_sample: μ-sampled paths used for diameter speeds
        seed: Seed for path and word sampling
        sample_size: Words per level when a level is too large to enumerate
        enumeration_limit: Largest level enumerated exactly

    Returns:
        ConditionReport with partial sums, diameter speeds and a verdict
    """
    if n_max < 1:
        raise ParameterError(f"n_max must be positive, got {n_max}")
    limit = get_defaults().enumeration_limit if enumeration_limit is None else enumeration_limit
    spec = measure.spec
    rng = np.random.default_rng(seed)
    modes = {'symmetric': 0, 'enumerated': 0, 'sampled': 0}

    suprema = np.zeros(n_max)
    for n in range(1, n_max + 1):
        log_ratios = spec.level(n + 1).log_ratios
        if measure.symmetric:
            suprema[n - 1] = _second_moment(measure.level_weights(n + 1), log_ratios)
            modes['symmetric'] += 1
            continue
        if level_size(spec, n) <= limit:
            words = words_at_level(spec, n)
            modes['enumerated'] += 1
        else:
            if modes['sampled'] == 0:
                logger.warning(f"level {n} too large to enumerate; sampling {sample_size} words per level")
            words = (Word(tuple(int(rng.integers(1, spec.branching(k) + 1)) for k in range(1, n + 1)))
                     for _ in range(sample_size))
            modes['sampled'] += 1
        suprema[n - 1] = max(_second_moment(offspring_weights(measure, w), log_ratios) for w in words)

    ns = np.arange(1, n_max + 1, dtype=float)
    terms = suprema / ns ** 2
    partial_sums = np.cumsum(terms)

    start = max(1, n_max // 10)
    decade = (ns >= start) & (terms > 0.0)
    if np.count_nonzero(decade) >= 3:
        slope, _, _ = ols_slope(np.log(ns[decade]), np.log(terms[decade]))
        verdict = ConditionVerdict.PLAUSIBLY_CONVERGENT if slope < CONVERGENT_SLOPE else ConditionVerdict.DIVERGING
    else:
        slope = float('nan')
        verdict = ConditionVerdict.UNDETERMINED

    paths = sample_index_paths(measure, path_sample, n_max, seed)
    speeds = np.empty((path_sample, n_max))
    for row, path in enumerate(paths):
        logs = np.array([spec.level(k).log_ratios[i - 1] for k, i in enumerate(path.tolist(), start=1)])
        speeds[row] = -(spec.log_root_diameter + np.cumsum(logs)) / ns
    diamspeed = np.min(speeds, axis=0)
    liminf, _ = tail_extremes(diamspeed, default_tail_window(n_max))

    logger.info(f"check_entropy_conditions: n_max={n_max} slope={slope:.3f} verdict={verdict.value} "
                f"diamspeed liminf={liminf:.4f}")
    return ConditionReport(n_max=n_max, suprema=suprema, l2_partial_sums=partial_sums,
                           diamspeed_values=diamspeed, diamspeed_liminf=liminf, decay_slope=float(slope),
                           verdict=verdict, modes=modes)


@dataclass
class LqSpectrumEstimate:
    """τ_q over the filtration levels with its tail-window liminf."""
    q: float
    tau_series: np.ndarray
    tau: float
    tail_window: int
    x_path: Optional[Word] = None
    r: Optional[float] = None

    def dimension(self) -> float:
        if self.q == 1.0:
            raise MeasureError("L^q dimension is undefined at q=1")
        return self.tau / (self.q - 1.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'q': self.q,
            'tau': self.tau,
            'tail_window': self.tail_window,
            'local': self.x_path is not None,
            'r': self.r,
        }

    def csv_rows(self) -> List[List[Any]]:
        return [[n, float(t)] for n, t in enumerate(self.tau_series, start=1)]


def _log_power_sum(weights: np.ndarray, q: float) -> float:
    """log Σ_{p>0} p^q (0^q counts as 0, including q = 0)."""
    live = weights[weights > 0.0]
    return log_sum_exp(q * np.log(live))


def _ball_cylinder(filtration: GeneralFiltration, x_path: Word, r: float) -> Word:
    """Smallest-length prefix u of x with diam E_u <= r: the symbolic ball B(x, r)."""
    log_r = math.log(r)
    for m in range(len(x_path) + 1):
        prefix = x_path.prefix(m)
        if filtration.geometry.log_diameter(prefix) <= log_r:
            return prefix
    raise ParameterError(f"path of length {len(x_path)} too short to resolve radius {r}")


def lq_spectrum_symbolic(measure: MoranMeasure, filtration: GeneralFiltration, q: float,
                         x_path: Optional[Word] = None, r: Optional[float] = None,
                         depth: Optional[int] = None, tail_window: Optional[int] = None,
                         enumeration_limit: Optional[int] = None) -> LqSpectrumEstimate:
    """
    Evaluate log Σ_{Q} μ(Q)^q / log δ_n over filtration levels and take the tail liminf.

    Without x_path and r the sum runs over all of 𝒬_n; with them over the members
    meeting the symbolic ball B(x, r).

    Raises:
        MeasureError: If q < 0
    """
    if q < 0:
        raise MeasureError(f"q must be non-negative, got {q}")
    if (x_path is None) != (r is None):
        raise ParameterError("local spectra need both x_path and r")
    depth = filtration.depth if depth is None else depth
    if depth < 1 or depth > filtration.depth:
        raise ParameterError(f"depth {depth} outside 1..{filtration.depth}")
    tail_window = default_tail_window(depth) if tail_window is None else tail_window
    limit = get_defaults().enumeration_limit if enumeration_limit is None else enumeration_limit

    ball = None
    if x_path is not None:
        measure.spec.validate_word(x_path)
        ball = _ball_cylinder(filtration, x_path, r) if r < measure.spec.root_diameter else Word()
        if measure.cylinder_log_mass(ball) == float('-inf'):
            raise MeasureError(f"x lies outside the support: μ(B(x, r)) = 0")

    log_sums = np.empty(depth)
    if filtration.uniform_levels and measure.symmetric:
        # 𝒬_n = Σ_n: the sum factorizes level by level below the ball cylinder
        start = 0 if ball is None else len(ball)
        base = q * (math.log(measure.root_mass) if ball is None else measure.cylinder_log_mass(ball))
        level_terms = np.array([_log_power_sum(measure.level_weights(k), q) for k in range(1, depth + 1)])
        cumulative = np.concatenate(([0.0], np.cumsum(level_terms)))
        for n in range(1, depth + 1):
            if ball is not None and n <= start:
                log_sums[n - 1] = q * measure.cylinder_log_mass(x_path.prefix(n))
            else:
                log_sums[n - 1] = base + cumulative[n] - cumulative[start]
    else:
        for n in range(1, depth + 1):
            members = filtration.members(n, within=ball, limit=limit)
            log_masses = np.array([measure.cylinder_log_mass(w) for w in members])
            live = log_masses[np.isfinite(log_masses)]
            log_sums[n - 1] = log_sum_exp(q * live)

    tau_series = log_sums / filtration.log_delta[:depth]
    tau, _ = tail_extremes(tau_series, tail_window)
    logger.debug(f"lq_spectrum_symbolic: q={q} depth={depth} tau={tau:.6f}")
    return LqSpectrumEstimate(q=q, tau_series=tau_series, tau=tau, tail_window=tail_window,
                              x_path=x_path, r=r)


def local_lq_spectrum_grid(measure: MoranMeasure, filtration: GeneralFiltration, q: float,
                           x_path: Word, r_values: Sequence[float],
                           depth: Optional[int] = None) -> Dict[float, LqSpectrumEstimate]:
    """Local spectra on a decreasing r-grid; no extrapolation to r -> 0."""
    return {float(r): lq_spectrum_symbolic(measure, filtration, q, x_path=x_path, r=float(r), depth=depth)
            for r in sorted(r_values, reverse=True)}


def lq_dimension(measure: MoranMeasure, q: float, depth: int, tail_window: Optional[int] = None,
                 filtration: Optional[GeneralFiltration] = None) -> float:
    """
    Global L^q dimension τ_q / (q - 1).

    Raises:
        MeasureError: At q = 1 (undefined) or q < 0
    """
    if q == 1.0:
        raise MeasureError("L^q dimension is undefined at q=1")
    if q < 0:
        raise MeasureError(f"q must be non-negative, got {q}")
    filtration = symbolic_filtration(measure.spec, depth) if filtration is None else filtration
    return lq_spectrum_symbolic(measure, filtration, q, depth=depth, tail_window=tail_window).dimension()


def uniform_measure_lq_dimension(spec: ConstructionSpec, q: float, n_max: int,
                                 tail_window: Optional[int] = None) -> float:
    """
    Closed form for uniformly distributed measures on homogeneous constructions:
    s_* for q > 1 and s^* for 0 < q < 1, from the partial-sum ratios.
    """
    if q <= 0 or q == 1.0:
        raise MeasureError(f"closed form holds for q in (0,1) or q > 1, got {q}")
    tail_window = default_tail_window(n_max) if tail_window is None else tail_window
    lower, upper = tail_extremes(homogeneous_ratio_sequence(spec, n_max), tail_window)
    return lower if q > 1 else upper


@dataclass
class SandwichReport:
    """dim_q near 1 against the entropy-average local dimensions."""
    dims: Dict[float, float]
    local_lower: float
    local_upper: float
    from_above: float  # dim_q at the smallest q > 1 on the grid
    from_below: float  # dim_q at the largest q < 1 on the grid
    tolerance: float
    monotone: bool
    holds: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            'dims': {str(q): d for q, d in sorted(self.dims.items())},
            'local_lower': self.local_lower,
            'local_upper': self.local_upper,
            'dim_q_from_above': self.from_above,
            'dim_q_from_below': self.from_below,
            'tolerance': self.tolerance,
            'monotone': self.monotone,
            'holds': self.holds,
        }

    def csv_rows(self) -> List[List[Any]]:
        return [[q, d] for q, d in sorted(self.dims.items())]


def dim_at_one_sandwich_check(measure: MoranMeasure, depth: int, q_grid: Optional[Sequence[float]] = None,
                              paths: int = 8, seed: int = 0,
                              tolerance: float = SANDWICH_TOLERANCE) -> SandwichReport:
    """
    Check dim_q (q ↓ 1) <= lower local dim <= upper local dim <= dim_q (q ↑ 1).

    Local dimensions are tail-window extremes of entropy averages along μ-sampled paths.
    """
    grid = sorted(float(q) for q in (DEFAULT_Q_GRID if q_grid is None else q_grid))
    below = [q for q in grid if q < 1.0]
    above = [q for q in grid if q > 1.0]
    if 1.0 in grid or not below or not above:
        raise ParameterError(f"q grid must straddle 1 and exclude it, got {grid}")

    filtration = symbolic_filtration(measure.spec, depth)
    dims = {q: lq_dimension(measure, q, depth, filtration=filtration) for q in grid}

    window = default_tail_window(depth)
    lowers, uppers = [], []
    for path in sample_paths(measure, paths, depth, seed):
        trace = entropy_average_ratio(measure, path, depth)
        low, high = tail_extremes(trace.ratio_series, window)
        lowers.append(low)
        uppers.append(high)
    local_lower, local_upper = min(lowers), max(uppers)

    from_above = dims[above[0]]
    from_below = dims[below[-1]]
    monotone = all(dims[a] >= dims[b] - tolerance for side in (below, above) for a, b in zip(side, side[1:]))
    holds = (from_above <= local_lower + tolerance
             and local_lower <= local_upper + tolerance
             and local_upper <= from_below + tolerance
             and monotone)
    logger.info(f"dim_at_one_sandwich_check: {from_above:.6f} <= [{local_lower:.6f}, {local_upper:.6f}] "
                f"<= {from_below:.6f} holds={holds}")
    return SandwichReport(dims=dims, local_lower=local_lower, local_upper=local_upper, from_above=from_above,
                          from_below=from_below, tolerance=tolerance, monotone=monotone, holds=holds)
