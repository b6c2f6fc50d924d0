#!/usr/bin/env python3
"""
Batch front door - parse run configs, execute one named computation, emit CSV/JSON reports
"""

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Annotated, Any, Callable, Dict, List, Literal, Optional, Tuple, Union

import click
from colorama import Fore, Style, just_fix_windows_console
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .codetree import (
    ConstructionSpec,
    Word,
    doubling_block_spec,
    geometric_decay_spec,
    middle_thirds_spec,
    spec_from_dict,
    spec_from_json,
    spec_to_dict,
    two_ratio_spec,
)
from .dimension import dimension_report, realized_dimension_report
from .errors import (
    AxiomViolationError,
    ConfigError,
    CoverError,
    MoranLabError,
    NonConvergenceError,
    ParameterError,
    WitnessNotFoundError,
)
from .estimation import (
    MIN_SCALES,
    ScaleRange,
    box_count_dimension,
    leaf_support,
    local_dimension_slope,
    sq_packing_sum,
)
from .filtration import (
    LOG_SLACK,
    GeneralFiltration,
    build_filtration,
    local_dim_via_filtration,
    symbolic_filtration,
    verify_filtration_axioms,
)
from .measure import (
    MoranMeasure,
    check_entropy_conditions,
    dim_at_one_sandwich_check,
    entropy_average_ratio,
    lq_spectrum_symbolic,
    make_weighted_measure,
    sample_paths,
    weight_rule_from_dict,
)
from .realization import (
    IntervalRealization,
    PointCloud,
    explicit_realization,
    interval_rows,
    point_of,
    realize_on_interval,
    sample_points,
    uniformly_perfect_example,
    verify_moran_axioms,
)
from .reporting import render_csv, render_json
from .util.config import get_defaults, setup_logging
from .util.numerics import ols_slope, tail_extremes

logger = logging.getLogger(__name__)

COMMANDS = ('dim', 'local-dim', 'lq', 'realize', 'estimate', 'verify', 'conditions')

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_AXIOM = 3
EXIT_NONCONVERGENCE = 4

MAX_SEED = 2 ** 64 - 1
MAX_PATH_LENGTH = 1_000_000

_PRESETS: Dict[str, Callable[[], ConstructionSpec]] = {
    'middle_thirds': middle_thirds_spec,
    'two_ratio': two_ratio_spec,
    'doubling_block': doubling_block_spec,
    'geometric_decay': geometric_decay_spec,
}


# Config schema

class StrictModel(BaseModel):
    model_config = ConfigDict(extra='forbid')


class LevelModel(StrictModel):
    N: int = Field(ge=1)
    ratios: Optional[List[float]] = None
    log_ratios: Optional[List[float]] = None

    @model_validator(mode='after')
    def _one_ratio_form(self) -> 'LevelModel':
        if (self.ratios is None) == (self.log_ratios is None):
            raise ValueError("a level needs exactly one of ratios and log_ratios")
        return self


class PeriodicTailModel(StrictModel):
    rule: Literal['periodic']
    levels: List[LevelModel] = Field(min_length=1)


class DoublingBlockTailModel(StrictModel):
    rule: Literal['doubling_block']
    first: LevelModel
    second: LevelModel


class GeometricDecayTailModel(StrictModel):
    rule: Literal['geometric_decay']


TailModel = Annotated[Union[PeriodicTailModel, DoublingBlockTailModel, GeometricDecayTailModel],
                      Field(discriminator='rule')]


class SpecModel(StrictModel):
    """Inline spec: a named preset or explicit levels with an optional tail rule."""
    preset: Optional[Literal['middle_thirds', 'two_ratio', 'doubling_block', 'geometric_decay']] = None
    kind: Literal['homogeneous', 'spatially_symmetric'] = 'spatially_symmetric'
    root_diameter: float = Field(default=1.0, gt=0)
    levels: List[LevelModel] = Field(default_factory=list)
    tail: Optional[TailModel] = None

    @model_validator(mode='after')
    def _preset_or_levels(self) -> 'SpecModel':
        if self.preset is not None and (self.levels or self.tail is not None):
            raise ValueError("a preset cannot be combined with levels or tail")
        if self.preset is None and not self.levels and self.tail is None:
            raise ValueError("spec needs a preset, explicit levels or a tail rule")
        return self


class UniformRuleModel(StrictModel):
    rule: Literal['uniform']


class BernoulliRuleModel(StrictModel):
    rule: Literal['bernoulli']
    weights: List[float] = Field(min_length=1)


class LevelsRuleModel(StrictModel):
    rule: Literal['levels']
    levels: List[List[float]] = Field(min_length=1)


WeightRuleModel = Annotated[Union[UniformRuleModel, BernoulliRuleModel, LevelsRuleModel],
                            Field(discriminator='rule')]


class MeasureModel(StrictModel):
    weight_rule: WeightRuleModel = Field(default_factory=lambda: UniformRuleModel(rule='uniform'))
    root_mass: float = Field(default=1.0, gt=0)


class RealizationModel(StrictModel):
    kind: Literal['gap_rule', 'uniformly_perfect', 'explicit'] = 'gap_rule'
    gap_rule: Literal['uniform_gaps', 'edge_anchored', 'left_packed'] = 'uniform_gaps'
    eta: Optional[float] = Field(default=None, gt=0, lt=1)
    intervals: Optional[Dict[str, Tuple[float, float]]] = None

    @model_validator(mode='after')
    def _kind_parameters(self) -> 'RealizationModel':
        if self.kind == 'uniformly_perfect' and self.eta is None:
            raise ValueError("uniformly_perfect realizations need eta")
        if self.kind == 'explicit' and not self.intervals:
            raise ValueError("explicit realizations need intervals")
        return self


class ScalesModel(StrictModel):
    start: float = Field(gt=0)
    base: Optional[float] = Field(default=None, gt=0, lt=1)
    count: int = Field(default=7, ge=MIN_SCALES)


class OutputModel(StrictModel):
    path: Optional[str] = None
    format: Literal['json', 'csv'] = 'json'


class RunConfig(StrictModel):
    """One command with its construction, measure, realization and parameters."""
    model_config = ConfigDict(extra='forbid', populate_by_name=True)

    schema_version: Literal[1] = Field(default=1, alias='schema')
    command: Literal['dim', 'local-dim', 'lq', 'realize', 'estimate', 'verify', 'conditions']
    spec: Optional[Union[SpecModel, str]] = None
    measure: Optional[MeasureModel] = None
    realization: Optional[RealizationModel] = None
    depth: int = Field(default_factory=lambda: get_defaults().depth, ge=1)
    tail_window: Optional[int] = Field(default=None, ge=1)
    tolerance: float = Field(default_factory=lambda: get_defaults().tolerance, gt=0)
    seed: int = Field(default=0, ge=0, le=MAX_SEED)
    q: Optional[float] = None
    q_grid: Optional[List[float]] = None
    scales: Optional[ScalesModel] = None
    estimator: Literal['box', 'local', 'packing'] = 'box'
    points: Literal['midpoints', 'sampled'] = 'midpoints'
    sample_count: int = Field(default=4096, ge=1)
    path: Optional[str] = None
    x: Optional[float] = None
    radius: Optional[float] = Field(default=None, gt=0)
    region: Optional[Tuple[float, float]] = None
    path_sample: int = Field(default=8, ge=1)
    output: OutputModel = Field(default_factory=OutputModel)


@dataclass
class ResolvedRun:
    """A validated config with its spec, measure and tail window resolved."""
    config: RunConfig
    spec: ConstructionSpec
    measure: MoranMeasure
    tail_window: int
    echo: Dict[str, Any] = field(default_factory=dict)


def _key_path(loc: Tuple[Any, ...]) -> str:
    return '.'.join(str(part) for part in loc) or '<root>'


def _command_constraints(config: RunConfig) -> None:
    """Per-command requirements that the field types alone cannot express."""
    if config.tail_window is not None and config.tail_window > config.depth:
        raise ConfigError(f"tail_window {config.tail_window} exceeds depth {config.depth}",
                          key_paths=['tail_window'])
    uniformly_perfect = config.realization is not None and config.realization.kind == 'uniformly_perfect'
    if config.spec is None and not uniformly_perfect:
        raise ConfigError("spec is required", key_paths=['spec'])

    if config.q is not None:
        if config.q == 1.0 and config.command == 'lq':
            raise ConfigError("L^q dimension is undefined at q=1", key_paths=['q'])
        if config.q < 0:
            raise ConfigError(f"q must be non-negative, got {config.q}", key_paths=['q'])
    if config.q_grid is not None:
        if any(q == 1.0 or q < 0 for q in config.q_grid):
            raise ConfigError("q_grid entries must be non-negative and different from 1", key_paths=['q_grid'])
        if not any(q < 1.0 for q in config.q_grid) or not any(q > 1.0 for q in config.q_grid):
            raise ConfigError("q_grid must contain values on both sides of 1", key_paths=['q_grid'])
    if config.region is not None and not config.region[0] < config.region[1]:
        raise ConfigError(f"region must satisfy low < high, got {list(config.region)}", key_paths=['region'])

    if config.command == 'lq' and config.q is None and config.q_grid is None:
        raise ConfigError("lq needs q or q_grid", key_paths=['q', 'q_grid'])
    if config.command == 'estimate':
        if config.scales is None:
            raise ConfigError("estimate needs a scale range", key_paths=['scales'])
        if config.estimator == 'local' and config.x is None and config.path is None:
            raise ConfigError("local slopes need x or path", key_paths=['x', 'path'])
        if config.estimator == 'packing' and config.q is None:
            raise ConfigError("packing sums need q", key_paths=['q'])


def parse_config(text: str, overrides: Optional[Dict[str, Any]] = None,
                 base_dir: Optional[Path] = None) -> ResolvedRun:
    """
    Parse and fully resolve a JSON run config.

    Args:
        text: UTF-8 JSON text
        overrides: Top-level keys replacing those of the file (command line flags)
        base_dir: Directory that relative spec file references resolve against

    Returns:
        ResolvedRun with defaults applied and the config echo prepared

    Raises:
        ConfigError: On malformed JSON, unknown keys, range violations or missing parameters
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")

    for key, value in (overrides or {}).items():
        if key == 'output':
            merged = dict(data.get('output') or {})
            merged.update(value)
            data['output'] = merged
        else:
            data[key] = value

    try:
        config = RunConfig.model_validate(data)
    except ValidationError as e:
        paths = [_key_path(error['loc']) for error in e.errors()]
        details = '; '.join(f"{_key_path(error['loc'])}: {error['msg']}" for error in e.errors())
        raise ConfigError(f"invalid config: {details}", key_paths=paths)
    _command_constraints(config)

    spec = _resolve_spec(config, base_dir)
    measure = _resolve_measure(config, spec)
    tail_window = config.tail_window or min(get_defaults().tail_window, config.depth)

    run = ResolvedRun(config=config, spec=spec, measure=measure, tail_window=tail_window)
    run.echo = _config_echo(run)
    logger.info(f"parse_config: command={config.command} depth={config.depth} tail_window={tail_window}")
    return run


def _resolve_spec(config: RunConfig, base_dir: Optional[Path]) -> ConstructionSpec:
    realization = config.realization
    if realization is not None and realization.kind == 'uniformly_perfect':
        fixed = uniformly_perfect_example(realization.eta, 0).spec
        if config.spec is not None and spec_to_dict(_load_spec(config.spec, base_dir)) != spec_to_dict(fixed):
            raise ConfigError("uniformly_perfect realizations fix their own spec", key_paths=['spec'])
        return fixed
    return _load_spec(config.spec, base_dir)


def _load_spec(source: Union[SpecModel, str], base_dir: Optional[Path]) -> ConstructionSpec:
    try:
        if isinstance(source, str):
            spec_path = Path(source)
            if not spec_path.is_absolute() and base_dir is not None:
                spec_path = base_dir / spec_path
            try:
                return spec_from_json(spec_path.read_text(encoding='utf-8'))
            except OSError as e:
                raise ConfigError(f"cannot read spec file {spec_path}: {e}", key_paths=['spec'])
        if source.preset is not None:
            return _PRESETS[source.preset]()
        return spec_from_dict(source.model_dump(exclude={'preset'}, exclude_none=True))
    except MoranLabError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"invalid spec: {e}", key_paths=['spec'])


def _resolve_measure(config: RunConfig, spec: ConstructionSpec) -> MoranMeasure:
    model = config.measure or MeasureModel()
    try:
        rule = weight_rule_from_dict(model.weight_rule.model_dump())
        return make_weighted_measure(spec, rule, root_mass=model.root_mass)
    except MoranLabError as e:
        raise ConfigError(f"invalid measure: {e}", key_paths=['measure'])


def _config_echo(run: ResolvedRun) -> Dict[str, Any]:
    """Resolved config that parse_config accepts unchanged."""
    echo = run.config.model_dump(by_alias=True, mode='json')
    echo['spec'] = spec_to_dict(run.spec)
    echo['measure'] = {'weight_rule': run.measure.rule.to_dict(), 'root_mass': run.measure.root_mass}
    echo['tail_window'] = run.tail_window
    return echo


# Commands

@dataclass
class CommandOutcome:
    """Result payload, CSV table and exit status of one command."""
    result: Dict[str, Any]
    header: List[str]
    rows: List[List[Any]]
    exit_code: int = EXIT_OK
    summary: str = ""


def _build_realization(run: ResolvedRun, depth: Optional[int] = None) -> IntervalRealization:
    model = run.config.realization or RealizationModel()
    depth = run.config.depth if depth is None else depth
    if model.kind == 'uniformly_perfect':
        return uniformly_perfect_example(model.eta, depth)
    if model.kind == 'explicit':
        return explicit_realization(run.spec, model.intervals)
    return realize_on_interval(run.spec, model.gap_rule, depth=depth)


def _filtration_depth(run: ResolvedRun, realization: IntervalRealization) -> int:
    if realization.is_explicit:
        return min(run.config.depth, realization.depth - 1)
    return run.config.depth


def _path_length_for(filtration: GeneralFiltration, realization: Optional[IntervalRealization]) -> int:
    """Shortest path length whose prefixes reach the deepest filtration cell."""
    spec = getattr(filtration.geometry, 'spec', None)
    if spec is None:
        return realization.depth
    bound = float(filtration.log_gamma[-1]) + LOG_SLACK
    log_d = spec.log_root_diameter
    m = 0
    while log_d > bound:
        m += 1
        if m > MAX_PATH_LENGTH:
            raise ParameterError(f"filtration cells deeper than {MAX_PATH_LENGTH} levels")
        log_d += max(spec.level(m).log_ratios)
    return max(m, filtration.depth)


def _run_dim(run: ResolvedRun) -> CommandOutcome:
    config = run.config
    report = dimension_report(run.spec, config.depth, run.tail_window, config.tolerance, parallel=True)
    result = report.to_dict()
    realization_model = config.realization
    if realization_model is not None and realization_model.kind != 'explicit':
        realized = realized_dimension_report(_build_realization(run), config.depth, run.tail_window)
        result['realized'] = realized.to_dict()
    return CommandOutcome(result=result, header=['n', 's_n', 'residual'], rows=report.csv_rows(),
                          summary=f"s_* = {report.s_star:.10f}, s^* = {report.s_upper_star:.10f}")


def _run_local_dim(run: ResolvedRun) -> CommandOutcome:
    config = run.config
    realization = None
    if config.realization is not None:
        realization = _build_realization(run)
        filtration = build_filtration(realization, _filtration_depth(run, realization))
    else:
        filtration = symbolic_filtration(run.spec, config.depth)

    if config.path is not None:
        path = Word.parse(config.path)
    else:
        path = sample_paths(run.measure, 1, _path_length_for(filtration, realization), config.seed)[0]

    estimate = local_dim_via_filtration(run.measure, filtration, path, run.tail_window)
    trace = entropy_average_ratio(run.measure, path, min(len(path), config.depth))
    entropy_lower, entropy_upper = tail_extremes(trace.ratio_series, min(run.tail_window, trace.N))
    result = {
        'path': str(path),
        'filtration': estimate.to_dict(),
        'entropy_average': dict(trace.to_dict(), lower=entropy_lower, upper=entropy_upper),
    }
    return CommandOutcome(result=result, header=['n', 'ratio'], rows=estimate.csv_rows(),
                          summary=f"local dimension in [{estimate.lower:.6f}, {estimate.upper:.6f}]")


def _run_lq(run: ResolvedRun) -> CommandOutcome:
    config = run.config
    result: Dict[str, Any] = {}
    rows: List[List[Any]] = []
    summary = []

    if config.q is not None:
        filtration = symbolic_filtration(run.spec, config.depth)
        x_path = None
        if config.radius is not None or config.path is not None:
            if config.path is not None:
                x_path = Word.parse(config.path)
            else:
                x_path = sample_paths(run.measure, 1, _path_length_for(filtration, None), config.seed)[0]
        estimate = lq_spectrum_symbolic(run.measure, filtration, config.q, x_path=x_path, r=config.radius,
                                        depth=config.depth, tail_window=run.tail_window)
        dimension = estimate.dimension()
        result['spectrum'] = dict(estimate.to_dict(), dimension=dimension,
                                  path=None if x_path is None else str(x_path))
        rows.append([config.q, dimension])
        summary.append(f"dim_{config.q:g} = {dimension:.6f}")

    if config.q_grid is not None:
        sandwich = dim_at_one_sandwich_check(run.measure, config.depth, config.q_grid,
                                             paths=config.path_sample, seed=config.seed)
        result['sandwich'] = sandwich.to_dict()
        rows.extend(sandwich.csv_rows())
        summary.append(f"sandwich holds={sandwich.holds}")

    rows.sort(key=lambda row: row[0])
    return CommandOutcome(result=result, header=['q', 'dim_q'], rows=rows, summary=', '.join(summary))


def _run_realize(run: ResolvedRun) -> CommandOutcome:
    realization = _build_realization(run)
    depth = min(run.config.depth, realization.depth)
    rows = interval_rows(realization, depth)
    result = {
        'label': realization.label,
        'depth': depth,
        'intervals': [{'word': word, 'left': left, 'right': right} for word, left, right in rows],
    }
    return CommandOutcome(result=result, header=['word', 'left', 'right'], rows=rows,
                          summary=f"{len(rows)} intervals to depth {depth}")


def _scales(run: ResolvedRun, realization: IntervalRealization) -> ScaleRange:
    model = run.config.scales
    return ScaleRange.geometric(model.start, model.base, model.count, root_diameter=realization.root_length)


def _run_estimate(run: ResolvedRun) -> CommandOutcome:
    config = run.config
    realization = _build_realization(run)
    depth = min(config.depth, realization.depth)
    scales = _scales(run, realization)

    if config.estimator == 'box':
        if config.points == 'sampled':
            cloud = sample_points(realization, run.measure, config.sample_count, config.seed, depth)
        else:
            lefts, lengths = realization.level_arrays(depth)
            cloud = PointCloud(points=lefts + 0.5 * lengths, provenance={'points': 'midpoints', 'depth': depth})
        box = box_count_dimension(cloud, scales)
        result = dict(box.to_dict(), estimator='box', points=config.points, point_count=len(cloud))
        return CommandOutcome(result=result, header=['r', 'count'], rows=box.csv_rows(),
                              summary=f"box-counting slope {box.slope:.6f} (residual {box.residual:.3e})")

    if config.estimator == 'local':
        x = config.x if config.x is not None else point_of(realization, Word.parse(config.path)).value
        slope = local_dimension_slope(run.measure, realization, x, scales, min(run.tail_window, len(scales)))
        result = dict(slope.to_dict(), estimator='local')
        return CommandOutcome(result=result, header=['r', 'ratio'], rows=slope.csv_rows(),
                              summary=f"local slope in [{slope.lower:.6f}, {slope.upper:.6f}]")

    support = leaf_support(run.measure, realization, depth)
    packings = [sq_packing_sum(run.measure, realization, config.q, delta, region=config.region, support=support)
                for delta in scales.r_values]
    live = [p for p in packings if p.value > 0.0]
    tau = math.nan
    if len(live) >= 2:
        tau = ols_slope([math.log(p.delta) for p in live], [math.log(p.value) for p in live])[0]
    result = {
        'estimator': 'packing',
        'q': config.q,
        'region': None if config.region is None else list(config.region),
        'tau_estimate': tau,
        'packings': [p.to_dict() for p in packings],
    }
    rows = [row for p in packings for row in p.csv_rows()]
    return CommandOutcome(result=result, header=['delta', 'q', 'S_q', 'count', 'strategy'], rows=rows,
                          summary=f"packing exponent {tau:.6f}")


def _run_verify(run: ResolvedRun) -> CommandOutcome:
    realization = _build_realization(run)
    depth = min(run.config.depth, realization.depth)
    moran = verify_moran_axioms(realization, depth, m5_window=min(run.tail_window, depth))
    rows = moran.csv_rows()
    result: Dict[str, Any] = {'moran': moran.to_dict(), 'filtration': None}

    failures = [c.name for c in moran.hard_failures]
    if not failures:
        filtration_depth = _filtration_depth(run, realization)
        # F3/F4 trends need at least two levels
        if filtration_depth >= 2:
            filtration_report = verify_filtration_axioms(build_filtration(realization, filtration_depth),
                                                         trend_window=min(run.tail_window, filtration_depth // 2))
            result['filtration'] = filtration_report.to_dict()
            rows.extend(filtration_report.csv_rows())
            failures = [c.name for c in filtration_report.hard_failures]

    result['passed'] = not failures and moran.passed and (
        result['filtration'] is None or result['filtration']['passed'])
    return CommandOutcome(result=result, header=['check', 'kind', 'passed', 'deviation', 'detail'], rows=rows,
                          exit_code=EXIT_AXIOM if failures else EXIT_OK,
                          summary=f"hard failures: {', '.join(failures) or 'none'}")


def _run_conditions(run: ResolvedRun) -> CommandOutcome:
    config = run.config
    report = check_entropy_conditions(run.measure, config.depth, path_sample=config.path_sample, seed=config.seed)
    return CommandOutcome(result=report.to_dict(), header=['n', 'term', 'partial_sum', 'diamspeed'],
                          rows=report.csv_rows(), summary=f"verdict {report.verdict.value}")


COMMAND_HANDLERS: Dict[str, Callable[[ResolvedRun], CommandOutcome]] = {
    'dim': _run_dim,
    'local-dim': _run_local_dim,
    'lq': _run_lq,
    'realize': _run_realize,
    'estimate': _run_estimate,
    'verify': _run_verify,
    'conditions': _run_conditions,
}


def exit_code_for(error: Exception) -> int:
    """Map a library error onto the documented exit status."""
    if isinstance(error, NonConvergenceError):
        return EXIT_NONCONVERGENCE
    if isinstance(error, (AxiomViolationError, CoverError, WitnessNotFoundError)):
        return EXIT_AXIOM
    return EXIT_CONFIG


def render_outcome(run: ResolvedRun, outcome: CommandOutcome) -> str:
    if run.config.output.format == 'csv':
        return render_csv(run.echo, outcome.header, outcome.rows)
    return render_json(run.echo, outcome.result)


def _status(message: str, color: str, quiet: bool) -> None:
    if not quiet:
        click.echo(f"{color}{message}{Style.RESET_ALL}", err=True)


def run(resolved: ResolvedRun, quiet: bool = True) -> int:
    """
    Execute one command and write its report.

    The body goes to output.path when set and to stdout otherwise.

    Returns:
        Exit status: 0 success, 2 config/parameter error, 3 hard axiom failure, 4 non-convergence
    """
    config = resolved.config
    _status(f"🚀 Running '{config.command}' (depth {config.depth}, seed {config.seed})", Fore.CYAN, quiet)
    try:
        outcome = COMMAND_HANDLERS[config.command](resolved)
    except MoranLabError as e:
        code = exit_code_for(e)
        logger.error(f"{config.command} failed with exit status {code}: {e}")
        _status(f"❌ {type(e).__name__}: {e}", Fore.RED, quiet)
        return code

    body = render_outcome(resolved, outcome)
    if config.output.path:
        Path(config.output.path).write_text(body, encoding='utf-8')
        _status(f"📄 Report written to {config.output.path}", Fore.CYAN, quiet)
    else:
        click.echo(body, nl=False)

    if outcome.exit_code == EXIT_OK:
        _status(f"✅ {config.command}: {outcome.summary}", Fore.GREEN, quiet)
    else:
        _status(f"⚠️ {config.command}: {outcome.summary}", Fore.YELLOW, quiet)
    return outcome.exit_code


@click.command()
@click.option('--config', 'config_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='JSON run config ("schema": 1).')
@click.option('--command', type=click.Choice(COMMANDS), help='Override the config command.')
@click.option('--out', type=click.Path(dir_okay=False), help='Write the report here instead of stdout.')
@click.option('--format', 'output_format', type=click.Choice(['csv', 'json']), help='Report format.')
@click.option('--seed', type=click.IntRange(0, MAX_SEED), help='Override the sampling seed.')
@click.option('--depth', type=click.IntRange(min=1), help='Override the depth.')
@click.option('--quiet', is_flag=True, help='Suppress status lines on stderr.')
@click.pass_context
def main(ctx: click.Context, config_path: str, command: Optional[str], out: Optional[str],
         output_format: Optional[str], seed: Optional[int], depth: Optional[int], quiet: bool) -> None:
    """
    Compute dimensions of Moran sets and measures from a JSON run config.

    Commands: dim, local-dim, lq, realize, estimate, verify, conditions.

    Defaults (override with MORANLAB_* environment variables or a .env file):
    depth 50, tail_window 10, tolerance 1e-12, scale base 1/3. The resolved
    config is echoed into every report.

    Exit status: 0 success, 2 config error, 3 axiom hard failure, 4 non-convergence.
    """
    just_fix_windows_console()
    try:
        setup_logging()
    except ConfigError as e:
        _status(f"❌ {e}", Fore.RED, quiet)
        ctx.exit(EXIT_CONFIG)

    overrides: Dict[str, Any] = {}
    if command is not None:
        overrides['command'] = command
    if seed is not None:
        overrides['seed'] = seed
    if depth is not None:
        overrides['depth'] = depth
    output: Dict[str, Any] = {}
    if out is not None:
        output['path'] = out
    if output_format is not None:
        output['format'] = output_format
    if output:
        overrides['output'] = output

    config_file = Path(config_path)
    try:
        resolved = parse_config(config_file.read_text(encoding='utf-8'), overrides, base_dir=config_file.parent)
    except ConfigError as e:
        keys = ', '.join(e.key_paths) if e.key_paths else 'config'
        _status(f"❌ Config error at {keys}: {e}", Fore.RED, quiet)
        ctx.exit(EXIT_CONFIG)

    ctx.exit(run(resolved, quiet=quiet))


if __name__ == "__main__":
    main()
