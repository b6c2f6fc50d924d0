#!/usr/bin/env python3
"""
Tests for weight rules, cylinder masses, entropy averages and L^q spectra
"""

import math

import numpy as np
import pytest

from moranlab.codetree import ROOT, Word, make_spec, offsprings
from moranlab.dimension import homogeneous_ratio_sequence
from moranlab.errors import MeasureError, ParameterError
from moranlab.filtration import symbolic_filtration
from moranlab.measure import (
    BernoulliWeights,
    ConditionVerdict,
    LevelWeights,
    UniformWeights,
    check_entropy_conditions,
    cylinder_log_mass,
    dim_at_one_sandwich_check,
    entropy_average_ratio,
    level_log_masses,
    local_lq_spectrum_grid,
    lq_dimension,
    lq_spectrum_symbolic,
    make_uniform_measure,
    make_weighted_measure,
    offspring_weights,
    sample_paths,
    uniform_measure_lq_dimension,
    weight_rule_from_dict,
)
from moranlab.util.numerics import log_sum_exp

from .conftest import LOG2_LOG3

BERNOULLI_RATIO = -(0.3 * math.log(0.3) + 0.7 * math.log(0.7)) / math.log(3.0)


def test_bernoulli_cylinder_mass(bernoulli_thirds):
    assert cylinder_log_mass(bernoulli_thirds, Word((1, 2))) == pytest.approx(math.log(0.3) + math.log(0.7))
    assert cylinder_log_mass(bernoulli_thirds, ROOT) == 0.0


def test_root_mass_scales_every_cylinder(middle_thirds):
    measure = make_weighted_measure(middle_thirds, (0.5, 0.5), root_mass=4.0)
    assert cylinder_log_mass(measure, Word((2, 2))) == pytest.approx(math.log(4.0) + 2 * math.log(0.5))


def test_level_masses_conserve_total(bernoulli_thirds, doubling_block):
    for measure in (bernoulli_thirds, make_uniform_measure(doubling_block)):
        masses = level_log_masses(measure, 8)
        assert math.fsum(np.exp(masses).tolist()) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("branching,ratios,weights", [
    (2, 1.0 / 3.0, (0.3, 0.7)),
    (3, (0.2, 0.3, 0.4), [(0.2, 0.3, 0.5), (0.6, 0.1, 0.3)]),
])
def test_mass_conserved_along_sampled_paths(branching, ratios, weights):
    """Test mu(E_w) = sum of the children's masses on prefixes of sampled depth-1000 paths."""
    measure = make_weighted_measure(make_spec(branching, ratios), weights)
    for path in sample_paths(measure, 3, 1000, seed=11):
        for n in range(0, 1001, 25):
            parent = path.prefix(n)
            children = [cylinder_log_mass(measure, child) for child in offsprings(measure.spec, parent)]
            assert log_sum_exp(children) == pytest.approx(cylinder_log_mass(measure, parent), abs=1e-9)


def test_zero_weight_gives_zero_mass(middle_thirds):
    measure = make_weighted_measure(middle_thirds, (1.0, 0.0))
    assert cylinder_log_mass(measure, Word((2,))) == float('-inf')
    assert offspring_weights(measure, Word((2, 1))).tolist() == [0.0, 0.0]
    assert offspring_weights(measure, Word((1,))).tolist() == [1.0, 0.0]


@pytest.mark.parametrize("weights", [(0.5, 0.6), (1.2, -0.2), (0.2, 0.3, 0.5), (float('nan'), 1.0)])
def test_invalid_weights_rejected(middle_thirds, weights):
    with pytest.raises(MeasureError):
        make_weighted_measure(middle_thirds, weights)


def test_weight_sum_tolerance(middle_thirds):
    make_weighted_measure(middle_thirds, (0.5, 0.5 + 1e-13))
    with pytest.raises(MeasureError):
        make_weighted_measure(middle_thirds, (0.5, 0.5 + 1e-11))


def test_nonpositive_root_mass_rejected(middle_thirds):
    with pytest.raises(MeasureError):
        make_weighted_measure(middle_thirds, (0.5, 0.5), root_mass=0.0)


def test_weight_rule_parsing():
    assert weight_rule_from_dict({'rule': 'uniform'}) == UniformWeights()
    assert weight_rule_from_dict({'rule': 'bernoulli', 'weights': [0.3, 0.7]}) == BernoulliWeights((0.3, 0.7))
    levels = weight_rule_from_dict({'rule': 'levels', 'levels': [[0.5, 0.5], [0.1, 0.9]]})
    assert levels == LevelWeights(((0.5, 0.5), (0.1, 0.9)))
    assert levels.raw_weights(3, ROOT, 2) == (0.5, 0.5)
    with pytest.raises(MeasureError):
        weight_rule_from_dict({'rule': 'dirichlet'})
    with pytest.raises(MeasureError):
        weight_rule_from_dict({'rule': 'uniform', 'weights': [1.0]})


def test_callable_rule_depends_on_word(middle_thirds):
    def weights(k, parent):
        return (0.5, 0.5) if not parent.indices or parent.indices[-1] == 1 else (0.9, 0.1)

    measure = make_weighted_measure(middle_thirds, weights)
    assert not measure.symmetric
    assert cylinder_log_mass(measure, Word((2, 2))) == pytest.approx(math.log(0.5) + math.log(0.1))
    with pytest.raises(MeasureError):
        measure.rule.to_dict()


def test_sampling_is_seeded_and_mu_distributed(bernoulli_thirds):
    first = sample_paths(bernoulli_thirds, 4000, 3, seed=11)
    again = sample_paths(bernoulli_thirds, 4000, 3, seed=11)
    assert first == again
    share = sum(1 for w in first if w.indices[0] == 2) / len(first)
    assert share == pytest.approx(0.7, abs=0.03)


def test_bernoulli_entropy_average_is_constant(bernoulli_thirds):
    """Test that every partial ratio equals H(p)/log 3 on a path of 10^4 levels."""
    path = sample_paths(bernoulli_thirds, 1, 10_000, seed=3)[0]
    trace = entropy_average_ratio(bernoulli_thirds, path, 10_000)
    assert trace.ratio == pytest.approx(BERNOULLI_RATIO, rel=1e-9)
    assert np.allclose(trace.ratio_series, BERNOULLI_RATIO, rtol=1e-9)
    assert trace.to_dict()['path_length'] == 10_000


def test_uniform_entropy_average_matches_closed_form(doubling_block):
    measure = make_uniform_measure(doubling_block)
    trace = entropy_average_ratio(measure, Word((1,) * 512), 512)
    expected = homogeneous_ratio_sequence(doubling_block, 512)
    assert np.max(np.abs(trace.ratio_series - expected)) < 1e-12


def test_entropy_average_preconditions(middle_thirds, uniform_thirds):
    with pytest.raises(ParameterError):
        entropy_average_ratio(uniform_thirds, Word((1, 2)), 3)
    with pytest.raises(ParameterError):
        entropy_average_ratio(uniform_thirds, Word((1, 2)), 0)
    atomic = make_weighted_measure(middle_thirds, (1.0, 0.0))
    with pytest.raises(MeasureError):
        entropy_average_ratio(atomic, Word((2, 1, 1)), 3)


def test_decaying_ratios_diverge(geometric_decay):
    report = check_entropy_conditions(make_uniform_measure(geometric_decay), 1000)
    assert report.verdict is ConditionVerdict.DIVERGING
    # terms tend to 1/2
    assert report.l2_partial_sums[-1] > 200.0


def test_homogeneous_series_converges(uniform_thirds):
    report = check_entropy_conditions(uniform_thirds, 1000)
    assert report.verdict is ConditionVerdict.PLAUSIBLY_CONVERGENT
    assert report.decay_slope == pytest.approx(-2.0, abs=1e-6)
    assert report.diamspeed_liminf == pytest.approx(math.log(3.0))
    assert report.diamspeed_positive
    assert report.modes['symmetric'] == 1000
    assert len(report.csv_rows()) == 1000


def test_word_dependent_measure_enumerates_levels(middle_thirds):
    def weights(k, parent):
        return (0.5, 0.5) if not parent.indices or parent.indices[-1] == 1 else (1.0, 0.0)

    report = check_entropy_conditions(make_weighted_measure(middle_thirds, weights), 6)
    assert report.modes['enumerated'] == 6
    assert report.to_dict()['n_max'] == 6


@pytest.mark.parametrize("q", [1.5, 2.0, 3.0, 0.3, 0.5])
def test_lq_dimension_of_uniform_doubling_block(doubling_block, q):
    """Test dim_q against s_* (q > 1) and s^* (q < 1) from the closed form."""
    estimate = lq_dimension(make_uniform_measure(doubling_block), q, 2048)
    closed = uniform_measure_lq_dimension(doubling_block, q, 2048)
    assert estimate == pytest.approx(closed, abs=1e-3)


def test_lq_dimensions_of_doubling_block_split_at_one(doubling_block):
    measure = make_uniform_measure(doubling_block)
    assert lq_dimension(measure, 0.5, 2048) - lq_dimension(measure, 2.0, 2048) > 0.05


def test_lq_dimension_of_middle_thirds(uniform_thirds):
    assert lq_dimension(uniform_thirds, 2.0, 2000) == pytest.approx(LOG2_LOG3, abs=2e-3)
    assert abs(lq_dimension(uniform_thirds, 2.0, 30) - LOG2_LOG3) < 0.06


def test_lq_undefined_arguments(uniform_thirds, middle_thirds):
    with pytest.raises(MeasureError):
        lq_dimension(uniform_thirds, 1.0, 20)
    with pytest.raises(MeasureError):
        lq_dimension(uniform_thirds, -0.5, 20)
    with pytest.raises(MeasureError):
        uniform_measure_lq_dimension(middle_thirds, 1.0, 20)


def test_local_spectrum_tends_to_global(uniform_thirds, middle_thirds):
    filtration = symbolic_filtration(middle_thirds, 2000)
    path = Word((1, 2) * 1000)
    local = lq_spectrum_symbolic(uniform_thirds, filtration, 2.0, x_path=path, r=1.01 * 3.0 ** -5)
    assert local.dimension() == pytest.approx(LOG2_LOG3, abs=5e-3)
    assert local.to_dict()['local'] is True
    with pytest.raises(ParameterError):
        lq_spectrum_symbolic(uniform_thirds, filtration, 2.0, x_path=path)


def test_local_spectrum_grid_orders_radii(uniform_thirds, middle_thirds):
    filtration = symbolic_filtration(middle_thirds, 40)
    grid = local_lq_spectrum_grid(uniform_thirds, filtration, 2.0, Word((1,) * 40), [0.01, 0.1, 0.001])
    assert list(grid) == [0.1, 0.01, 0.001]


def test_local_spectrum_outside_support(middle_thirds):
    measure = make_weighted_measure(middle_thirds, (1.0, 0.0))
    filtration = symbolic_filtration(middle_thirds, 10)
    with pytest.raises(MeasureError):
        lq_spectrum_symbolic(measure, filtration, 2.0, x_path=Word((2,) * 10), r=0.05)


def test_sandwich_around_one(doubling_block):
    report = dim_at_one_sandwich_check(make_uniform_measure(doubling_block), 2048)
    assert report.holds
    assert report.monotone
    assert report.from_above <= report.local_lower + report.tolerance
    assert report.local_upper <= report.from_below + report.tolerance


def test_sandwich_grid_must_straddle_one(uniform_thirds):
    with pytest.raises(ParameterError):
        dim_at_one_sandwich_check(uniform_thirds, 20, q_grid=(0.5, 1.0, 2.0))
    with pytest.raises(ParameterError):
        dim_at_one_sandwich_check(uniform_thirds, 20, q_grid=(1.1, 2.0))
