#!/usr/bin/env python3
"""
Codetree - words, construction specs, cylinder diameters and the symbolic metric

Levels are 1-based: the root word has length 0, level-k offsprings pick an index in
{1, ..., N_k}. Diameters are carried as natural logarithms.
"""

import itertools
import json
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from .errors import SpecError

logger = logging.getLogger(__name__)

# Levels validated eagerly by make_spec; deeper levels are validated when first used
EAGER_VALIDATION_DEPTH = 64


class SpecKind(Enum):
    """Structural tag of a construction."""
    HOMOGENEOUS = "homogeneous"
    SPATIALLY_SYMMETRIC = "spatially_symmetric"


@dataclass(frozen=True)
class Word:
    """A finite branch-index sequence addressing a cylinder; () is the root."""
    indices: Tuple[int, ...] = ()

    def __post_init__(self):
        indices = tuple(self.indices)
        for index in indices:
            if isinstance(index, bool) or not isinstance(index, int) or index < 1:
                raise SpecError(f"word indices must be positive integers, got {indices!r}")
        object.__setattr__(self, 'indices', indices)

    @classmethod
    def parse(cls, text: str) -> 'Word':
        """Parse '1.2.1'; '' or '∅' is the root."""
        text = text.strip()
        if text in ('', '∅'):
            return ROOT
        try:
            return cls(tuple(int(part) for part in text.split('.')))
        except ValueError:
            raise SpecError(f"cannot parse word {text!r}")

    def __len__(self) -> int:
        return len(self.indices)

    def __str__(self) -> str:
        return '.'.join(str(i) for i in self.indices) if self.indices else '∅'

    @property
    def parent(self) -> 'Word':
        if not self.indices:
            raise SpecError("the root word has no parent")
        return Word(self.indices[:-1])

    def prefix(self, n: int) -> 'Word':
        if n < 0 or n > len(self.indices):
            raise SpecError(f"prefix length {n} outside 0..{len(self.indices)}")
        return Word(self.indices[:n])

    def child(self, index: int) -> 'Word':
        return Word(self.indices + (index,))

    def concat(self, other: 'Word') -> 'Word':
        return Word(self.indices + other.indices)

    def common_prefix(self, other: 'Word') -> 'Word':
        n = 0
        for a, b in zip(self.indices, other.indices):
            if a != b:
                break
            n += 1
        return Word(self.indices[:n])

    def is_prefix_of(self, other: 'Word') -> bool:
        return other.indices[:len(self.indices)] == self.indices


ROOT = Word()


@dataclass(frozen=True)
class Level:
    """
    Offspring count N_k and contraction ratios c_{k,1..N_k} of one level.

    Levels built with from_log_ratios keep exact logarithms even when the ratios
    themselves underflow to 0.0.
    """
    branching: int
    ratios: Tuple[float, ...]
    log_ratios: Tuple[float, ...] = ()

    def __post_init__(self):
        if isinstance(self.branching, bool) or not isinstance(self.branching, int) or self.branching < 1:
            raise SpecError(f"branching must be a positive integer, got {self.branching!r}")
        if self.log_ratios:
            logs = tuple(float(v) for v in self.log_ratios)
            if len(logs) != self.branching or not all(math.isfinite(v) and v < 0.0 for v in logs):
                raise SpecError(f"level needs {self.branching} finite negative log ratios, got {logs!r}")
            object.__setattr__(self, 'log_ratios', logs)
            object.__setattr__(self, 'ratios', tuple(math.exp(v) for v in logs))
            return
        try:
            ratios = tuple(float(c) for c in self.ratios)
        except (TypeError, ValueError):
            raise SpecError(f"contraction ratios must be numbers, got {self.ratios!r}")
        if len(ratios) != self.branching:
            raise SpecError(f"level has N={self.branching} but {len(ratios)} ratios")
        for c in ratios:
            if not (0.0 < c < 1.0):
                raise SpecError(f"contraction ratio {c!r} not in (0,1)")
        object.__setattr__(self, 'ratios', ratios)
        object.__setattr__(self, 'log_ratios', tuple(math.log(c) for c in ratios))

    @classmethod
    def from_log_ratios(cls, branching: int, log_ratios: Sequence[float]) -> 'Level':
        return cls(branching, (), tuple(log_ratios))

    @property
    def is_homogeneous(self) -> bool:
        return all(v == self.log_ratios[0] for v in self.log_ratios)

    def to_dict(self) -> Dict[str, Any]:
        """Ratios when they reproduce the stored logarithms bit for bit, log_ratios otherwise."""
        if all(c > 0.0 and math.log(c) == v for c, v in zip(self.ratios, self.log_ratios)):
            return {'N': self.branching, 'ratios': list(self.ratios)}
        return {'N': self.branching, 'log_ratios': list(self.log_ratios)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Level':
        if isinstance(data, dict) and set(data) == {'N', 'log_ratios'}:
            return cls.from_log_ratios(data['N'], tuple(data['log_ratios']))
        if not isinstance(data, dict) or set(data) != {'N', 'ratios'}:
            raise SpecError(f"level must be an object with keys N and ratios (or log_ratios), got {data!r}")
        return cls(data['N'], tuple(data['ratios']))


class TailRule(ABC):
    """Rule extending a spec beyond its explicit prefix."""

    name: str = "tail"

    @abstractmethod
    def level(self, k: int) -> Level:
        """Level k (1-based)."""

    def to_dict(self) -> Dict[str, Any]:
        raise SpecError(f"tail rule '{self.name}' is not serializable")


@dataclass(frozen=True)
class PeriodicTail(TailRule):
    """Level k uses entry (k - 1) mod p of a fixed cycle."""
    levels: Tuple[Level, ...]
    name = "periodic"

    def __post_init__(self):
        if not self.levels:
            raise SpecError("periodic tail needs at least one level")
        object.__setattr__(self, 'levels', tuple(self.levels))

    def level(self, k: int) -> Level:
        return self.levels[(k - 1) % len(self.levels)]

    def to_dict(self) -> Dict[str, Any]:
        return {'rule': self.name, 'levels': [level.to_dict() for level in self.levels]}


@dataclass(frozen=True)
class DoublingBlockTail(TailRule):
    """Blocks of doubling length: level k lies in block floor(log2 k); even blocks use `first`."""
    first: Level
    second: Level
    name = "doubling_block"

    def level(self, k: int) -> Level:
        block = k.bit_length() - 1
        return self.first if block % 2 == 0 else self.second

    def to_dict(self) -> Dict[str, Any]:
        return {'rule': self.name, 'first': self.first.to_dict(), 'second': self.second.to_dict()}


@dataclass(frozen=True)
class GeometricDecayTail(TailRule):
    """Two offsprings with ratios e^-1 and e^-k at level k."""
    name = "geometric_decay"

    def level(self, k: int) -> Level:
        return Level.from_log_ratios(2, (-1.0, -float(k)))

    def to_dict(self) -> Dict[str, Any]:
        return {'rule': self.name}


@dataclass(eq=False)
class CallableTail(TailRule):
    """Arbitrary Python rules k -> N_k and (k, i) -> c_{k,i}; compared by identity."""
    branching_rule: Callable[[int], int]
    ratio_rule: Callable[[int, int], float]
    _cache: Dict[int, Level] = field(default_factory=dict, repr=False)
    name = "callable"

    def level(self, k: int) -> Level:
        cached = self._cache.get(k)
        if cached is None:
            n = self.branching_rule(k)
            try:
                n = int(n)
            except (TypeError, ValueError):
                raise SpecError(f"branching rule returned {n!r} at level {k}")
            cached = Level(n, tuple(self.ratio_rule(k, i) for i in range(1, n + 1)))
            self._cache[k] = cached
        return cached


_TAIL_PARSERS: Dict[str, Callable[[Dict[str, Any]], TailRule]] = {
    'periodic': lambda d: PeriodicTail(tuple(Level.from_dict(x) for x in d['levels'])),
    'doubling_block': lambda d: DoublingBlockTail(Level.from_dict(d['first']), Level.from_dict(d['second'])),
    'geometric_decay': lambda d: GeometricDecayTail(),
}

_TAIL_KEYS = {
    'periodic': {'rule', 'levels'},
    'doubling_block': {'rule', 'first', 'second'},
    'geometric_decay': {'rule'},
}


@dataclass(frozen=True)
class ConstructionSpec:
    """Level-indexed branching counts and contraction ratios, lazy to any depth."""
    levels: Tuple[Level, ...]
    tail: TailRule
    root_diameter: float = 1.0
    kind: SpecKind = SpecKind.SPATIALLY_SYMMETRIC

    def __post_init__(self):
        object.__setattr__(self, 'levels', tuple(self.levels))
        if not (math.isfinite(self.root_diameter) and self.root_diameter > 0):
            raise SpecError(f"root diameter must be positive and finite, got {self.root_diameter!r}")
        if not isinstance(self.kind, SpecKind):
            object.__setattr__(self, 'kind', _parse_kind(self.kind))

    def level(self, k: int) -> Level:
        """Level k >= 1 of the construction."""
        if k < 1:
            raise SpecError(f"levels are 1-based, got {k}")
        level = self.levels[k - 1] if k <= len(self.levels) else self.tail.level(k)
        if self.kind is SpecKind.HOMOGENEOUS and not level.is_homogeneous:
            raise SpecError(f"homogeneous spec has i-dependent ratios at level {k}: {level.ratios}")
        return level

    def branching(self, k: int) -> int:
        return self.level(k).branching

    def ratio(self, k: int, i: int) -> float:
        return self.level(k).ratios[i - 1]

    @property
    def is_homogeneous(self) -> bool:
        return self.kind is SpecKind.HOMOGENEOUS

    @property
    def log_root_diameter(self) -> float:
        return math.log(self.root_diameter)

    def validate_word(self, word: Word) -> None:
        """Raise SpecError unless every index i_k lies in {1..N_k}."""
        if not isinstance(word, Word):
            raise SpecError(f"expected a Word, got {type(word).__name__}")
        for k, index in enumerate(word.indices, start=1):
            n = self.branching(k)
            if index > n:
                raise SpecError(f"invalid word {word}: index {index} at level {k} exceeds N_{k}={n}")


def _parse_kind(kind: Union[str, SpecKind]) -> SpecKind:
    if isinstance(kind, SpecKind):
        return kind
    try:
        return SpecKind(kind)
    except ValueError:
        raise SpecError(f"unknown spec kind {kind!r}; expected one of {[k.value for k in SpecKind]}")


def _constant_or_callable(rule: Any, name: str) -> Callable:
    if callable(rule):
        return rule
    if name == 'branching':
        if isinstance(rule, (list, tuple)):
            cycle = tuple(rule)
            return lambda k: cycle[(k - 1) % len(cycle)]
        return lambda k: rule
    if isinstance(rule, (list, tuple)):
        ratios = tuple(rule)
        return lambda k, i: ratios[i - 1]
    return lambda k, i: rule


def make_spec(branching_rule: Union[int, Sequence[int], Callable[[int], int]],
              ratio_rule: Union[float, Sequence[float], Callable[[int, int], float]],
              kind: Union[str, SpecKind] = SpecKind.SPATIALLY_SYMMETRIC,
              root_diameter: float = 1.0) -> ConstructionSpec:
    """
    Build a validated, lazy construction spec from level rules.

    Args:
        branching_rule: N_k as a constant, a periodic cycle or a callable k -> N_k
        ratio_rule: c_{k,i} as a constant, a per-branch sequence or a callable (k, i) -> c
        kind: 'homogeneous' or 'spatially_symmetric'
        root_diameter: Diameter of the root cylinder

    Returns:
        ConstructionSpec validated on its first EAGER_VALIDATION_DEPTH levels

    Raises:
        SpecError: On ratios outside (0,1), N_k < 1 or i-dependent ratios under 'homogeneous'
    """
    kind = _parse_kind(kind)
    branching = _constant_or_callable(branching_rule, 'branching')
    ratio = _constant_or_callable(ratio_rule, 'ratio')

    try:
        if not callable(branching_rule) and not callable(ratio_rule):
            cycle_length = len(branching_rule) if isinstance(branching_rule, (list, tuple)) else 1
            cycle = tuple(
                Level(int(branching(k)), tuple(ratio(k, i) for i in range(1, int(branching(k)) + 1)))
                for k in range(1, cycle_length + 1)
            )
            tail: TailRule = PeriodicTail(cycle)
        else:
            tail = CallableTail(branching, ratio)
    except IndexError:
        raise SpecError("ratio sequence shorter than the branching count")

    spec = ConstructionSpec(levels=(), tail=tail, root_diameter=float(root_diameter), kind=kind)
    for k in range(1, EAGER_VALIDATION_DEPTH + 1):
        try:
            spec.level(k)
        except IndexError:
            raise SpecError(f"ratio sequence shorter than the branching count at level {k}")
    logger.debug(f"make_spec: {kind.value} spec with tail '{tail.name}' validated to level {EAGER_VALIDATION_DEPTH}")
    return spec


def make_spec_from_levels(levels: Sequence[Level], tail: Optional[TailRule] = None,
                          kind: Union[str, SpecKind] = SpecKind.SPATIALLY_SYMMETRIC,
                          root_diameter: float = 1.0) -> ConstructionSpec:
    """Spec with an explicit prefix; without a tail the prefix repeats periodically."""
    levels = tuple(levels)
    if tail is None:
        if not levels:
            raise SpecError("a spec needs explicit levels or a tail rule")
        tail = PeriodicTail(levels)
    spec = ConstructionSpec(levels=levels, tail=tail, root_diameter=float(root_diameter), kind=_parse_kind(kind))
    for k in range(1, max(len(levels), EAGER_VALIDATION_DEPTH) + 1):
        spec.level(k)
    return spec


# Standard constructions

def middle_thirds_spec() -> ConstructionSpec:
    """N_k = 2, c_{k,i} = 1/3."""
    return make_spec(2, 1.0 / 3.0, kind=SpecKind.HOMOGENEOUS)


def two_ratio_spec(first: float = 0.5, second: float = 0.25) -> ConstructionSpec:
    """N_k = 2 with ratios (first, second) on every level."""
    return make_spec(2, (first, second), kind=SpecKind.SPATIALLY_SYMMETRIC)


def doubling_block_spec(ratio: float = 0.5, on_branching: int = 2, off_branching: int = 1) -> ConstructionSpec:
    """Homogeneous spec whose branching alternates between blocks of doubling length."""
    first = Level(on_branching, (ratio,) * on_branching)
    second = Level(off_branching, (ratio,) * off_branching)
    return make_spec_from_levels((), tail=DoublingBlockTail(first, second), kind=SpecKind.HOMOGENEOUS)


def geometric_decay_spec() -> ConstructionSpec:
    """Two offsprings with ratios e^-1 and e^-k at level k."""
    return make_spec_from_levels((), tail=GeometricDecayTail(), kind=SpecKind.SPATIALLY_SYMMETRIC)


# Operations

def offsprings(spec: ConstructionSpec, word: Word) -> List[Word]:
    """Offsprings w1..wN_{|w|+1} in index order."""
    spec.validate_word(word)
    n = spec.branching(len(word) + 1)
    return [word.child(i) for i in range(1, n + 1)]


def symbolic_log_diameter(spec: ConstructionSpec, word: Word) -> float:
    """log of the product c_{1,i_1} ... c_{n,i_n} (no root diameter)."""
    spec.validate_word(word)
    value = 0.0
    for k, index in enumerate(word.indices, start=1):
        value += spec.level(k).log_ratios[index - 1]
    return value


def cylinder_log_diameter(spec: ConstructionSpec, word: Word) -> float:
    """
    log(root_diameter) + sum of log c_{j,i_j} along the word.

    Accumulated one level at a time so that the value of a word is exactly its
    parent's value plus one log ratio.
    """
    spec.validate_word(word)
    value = spec.log_root_diameter
    for k, index in enumerate(word.indices, start=1):
        value += spec.level(k).log_ratios[index - 1]
    return value


def symbolic_diameter(spec: ConstructionSpec, word: Word) -> float:
    """Diameter of the cylinder [w] under rho: the product of ratios along w."""
    spec.validate_word(word)
    return math.prod(spec.ratio(k, index) for k, index in enumerate(word.indices, start=1))


def rho_distance(spec: ConstructionSpec, first: Word, second: Word) -> float:
    """
    Symbolic distance between the classes of two finite words.

    Words related by prefix are at distance 0 (cylinder containment). Otherwise the
    distance is the product of ratios along the longest common prefix, 1 when it is empty.
    """
    spec.validate_word(first)
    spec.validate_word(second)
    if first.is_prefix_of(second) or second.is_prefix_of(first):
        return 0.0
    common = first.common_prefix(second)
    if len(common) == 0:
        return 1.0
    return math.prod(spec.ratio(k, index) for k, index in enumerate(common.indices, start=1))


def level_size(spec: ConstructionSpec, n: int) -> int:
    """#Σ_n as an exact integer."""
    return math.prod(spec.branching(k) for k in range(1, n + 1))


def word_index(spec: ConstructionSpec, word: Word) -> int:
    """Lexicographic position of a word within its level (mixed radix, 0-based)."""
    spec.validate_word(word)
    index = 0
    for k, i in enumerate(word.indices, start=1):
        index = index * spec.branching(k) + (i - 1)
    return index


def word_at(spec: ConstructionSpec, n: int, index: int) -> Word:
    """Inverse of word_index on level n."""
    if index < 0 or index >= level_size(spec, n):
        raise SpecError(f"index {index} outside level {n}")
    digits = []
    for k in range(n, 0, -1):
        index, digit = divmod(index, spec.branching(k))
        digits.append(digit + 1)
    return Word(tuple(reversed(digits)))


def words_at_level(spec: ConstructionSpec, n: int, limit: Optional[int] = None) -> Iterator[Word]:
    """
    Enumerate Σ_n lexicographically.

    Raises:
        SpecError: If #Σ_n exceeds `limit`
    """
    size = level_size(spec, n)
    if limit is not None and size > limit:
        raise SpecError(f"level {n} has {size} words, above the enumeration limit {limit}")
    ranges = [range(1, spec.branching(k) + 1) for k in range(1, n + 1)]
    for indices in itertools.product(*ranges):
        yield Word(indices)


# Serialization

def spec_to_dict(spec: ConstructionSpec) -> Dict[str, Any]:
    return {
        'kind': spec.kind.value,
        'root_diameter': spec.root_diameter,
        'levels': [level.to_dict() for level in spec.levels],
        'tail': spec.tail.to_dict(),
    }


def spec_from_dict(data: Dict[str, Any]) -> ConstructionSpec:
    """
    Parse the JSON form {kind, root_diameter, levels, tail}.

    A missing tail repeats the explicit levels periodically.
    """
    if not isinstance(data, dict):
        raise SpecError("spec must be a JSON object")
    unknown = set(data) - {'kind', 'root_diameter', 'levels', 'tail'}
    if unknown:
        raise SpecError(f"unknown spec keys: {sorted(unknown)}")

    levels = tuple(Level.from_dict(item) for item in data.get('levels', []))
    tail_data = data.get('tail')
    tail = None
    if tail_data is not None:
        rule = tail_data.get('rule') if isinstance(tail_data, dict) else None
        if rule not in _TAIL_PARSERS:
            raise SpecError(f"unknown tail rule {rule!r}; expected one of {sorted(_TAIL_PARSERS)}")
        if set(tail_data) != _TAIL_KEYS[rule]:
            raise SpecError(f"tail '{rule}' expects keys {sorted(_TAIL_KEYS[rule])}, got {sorted(tail_data)}")
        tail = _TAIL_PARSERS[rule](tail_data)

    return make_spec_from_levels(levels, tail=tail,
                                 kind=data.get('kind', SpecKind.SPATIALLY_SYMMETRIC.value),
                                 root_diameter=float(data.get('root_diameter', 1.0)))


def spec_to_json(spec: ConstructionSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2)


def spec_from_json(text: str) -> ConstructionSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"spec is not valid JSON: {e}")
    return spec_from_dict(data)
