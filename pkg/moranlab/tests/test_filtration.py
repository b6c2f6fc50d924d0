#!/usr/bin/env python3
"""
Tests for general filtrations, their certification and filtration local dimensions
"""

import math

import numpy as np
import pytest

from moranlab.codetree import Word
from moranlab.dimension import is_pairwise_disjoint, is_symbolic_cover
from moranlab.errors import AxiomViolationError, FiltrationError, MeasureError, ParameterError
from moranlab.filtration import (
    build_filtration,
    filtration_summary_rows,
    local_dim_via_filtration,
    symbolic_filtration,
    verify_filtration_axioms,
)
from moranlab.measure import make_weighted_measure
from moranlab.realization import explicit_realization, realize_on_interval

from .conftest import LOG2_LOG3

MIDDLE_THIRDS_TWO_LEVELS = {
    "∅": (0.0, 1.0), "1": (0.0, 1 / 3), "2": (2 / 3, 1.0),
    "1.1": (0.0, 1 / 9), "1.2": (2 / 9, 1 / 3), "2.1": (2 / 3, 7 / 9), "2.2": (8 / 9, 1.0),
}


def test_homogeneous_thresholds(middle_thirds):
    """Test k(n) = n + 1 and the closed form of delta_n for homogeneous specs."""
    filtration = symbolic_filtration(middle_thirds, 50)
    ns = np.arange(1, 51)
    assert filtration.k_of_n.tolist() == (ns + 1).tolist()
    assert np.allclose(filtration.log_gamma, -ns * math.log(3.0))
    assert np.allclose(filtration.log_delta, math.log(0.5) - (ns + 1) * math.log(3.0))
    assert filtration.uniform_levels


def test_symbolic_filtration_certifies(middle_thirds):
    report = verify_filtration_axioms(symbolic_filtration(middle_thirds, 50))
    assert report.passed
    assert [c.name for c in report.checks] == ["F1", "F2", "F3", "F4"]


def test_realized_two_ratio_filtration(two_ratio):
    filtration = build_filtration(realize_on_interval(two_ratio, "uniform_gaps", depth=60))
    assert filtration.depth == 60
    assert not filtration.uniform_levels
    report = verify_filtration_axioms(filtration)
    assert report.check("F1").passed and report.check("F1").deviation == 0.0
    assert report.check("F2").passed
    assert report.check("F3").deviation < 1e-2
    assert report.check("F4").deviation < 1e-2
    assert np.all(filtration.delta <= filtration.gamma)


def test_first_level_members(two_ratio):
    filtration = symbolic_filtration(two_ratio, 10)
    assert [str(w) for w in filtration.members(1)] == ["1.1", "1.2", "2"]
    assert filtration.member_count(1) == 3


@pytest.mark.parametrize("n", range(1, 7))
def test_members_partition_symbolic_space(two_ratio, n):
    """Test that Q_n is a cover by pairwise disjoint cylinders crossing gamma_n."""
    filtration = symbolic_filtration(two_ratio, 10)
    members = filtration.members(n)
    assert is_pairwise_disjoint(members)
    assert is_symbolic_cover(two_ratio, members)
    bound = filtration.log_gamma[n - 1] + 1e-12
    for word in members:
        assert filtration.geometry.log_diameter(word) <= bound
        assert filtration.geometry.log_diameter(word.parent) > bound
    assert filtration.member_count(n) == len(members)


def test_members_within_a_cylinder(three_branch):
    filtration = symbolic_filtration(three_branch, 8)
    inside = filtration.members(4, within=Word((2,)))
    assert inside and all(w.indices[0] == 2 for w in inside)
    assert set(inside) <= set(filtration.members(4))


def test_member_enumeration_limit(middle_thirds):
    filtration = symbolic_filtration(middle_thirds, 12)
    with pytest.raises(FiltrationError):
        filtration.members(10, limit=5)
    with pytest.raises(FiltrationError):
        filtration.members(13)


def test_cell_of_a_path(two_ratio):
    filtration = symbolic_filtration(two_ratio, 10)
    assert filtration.cell_of(Word((1,) * 20), 1) == Word((1, 1))
    assert filtration.cell_of(Word((2,) * 20), 1) == Word((2,))
    with pytest.raises(FiltrationError):
        filtration.cell_of(Word((1,)), 3)


def test_filtration_parameters(middle_thirds):
    with pytest.raises(FiltrationError):
        symbolic_filtration(middle_thirds, 5, C0=1.5)
    with pytest.raises(ParameterError):
        symbolic_filtration(middle_thirds, 0)
    with pytest.raises(ParameterError):
        verify_filtration_axioms(symbolic_filtration(middle_thirds, 10), trend_window=6)


def test_realization_depth_limits(middle_thirds):
    realization = realize_on_interval(middle_thirds, "edge_anchored", depth=5)
    with pytest.raises(FiltrationError):
        build_filtration(realization, depth=6)


def test_overlapping_realization_rejected(middle_thirds):
    realization = realize_on_interval(middle_thirds, "left_packed", depth=5)
    with pytest.raises(AxiomViolationError) as excinfo:
        build_filtration(realization)
    assert excinfo.value.report.check("M3").passed is False


def test_explicit_realization_filtration(middle_thirds):
    realization = explicit_realization(middle_thirds, MIDDLE_THIRDS_TWO_LEVELS)
    with pytest.raises(FiltrationError):
        build_filtration(realization)
    filtration = build_filtration(realization, depth=1)
    assert filtration.members(1) == [Word((1,)), Word((2,))]
    assert filtration.member_count(1) == 2
    assert filtration.log_gamma[0] == pytest.approx(-math.log(3.0))


def test_local_dimension_of_uniform_measure(middle_thirds, uniform_thirds):
    filtration = symbolic_filtration(middle_thirds, 1000)
    estimate = local_dim_via_filtration(uniform_thirds, filtration, Word((1, 2) * 500))
    assert estimate.lower <= estimate.upper
    assert estimate.lower == pytest.approx(LOG2_LOG3, abs=2e-2)
    assert estimate.upper == pytest.approx(LOG2_LOG3, abs=2e-2)
    assert len(estimate.csv_rows()) == 1000
    assert estimate.to_dict()['depth'] == 1000


def test_local_dimension_of_bernoulli_measure(middle_thirds, bernoulli_thirds):
    """Test the typical local dimension H(p)/log 3 along a sampled path."""
    filtration = symbolic_filtration(middle_thirds, 4000)
    rng_path = Word(tuple(int(i) for i in bernoulli_thirds.sample_index_paths(1, 4000, seed=2)[0]))
    estimate = local_dim_via_filtration(bernoulli_thirds, filtration, rng_path, tail_window=400)
    typical = -(0.3 * math.log(0.3) + 0.7 * math.log(0.7)) / math.log(3.0)
    assert estimate.lower == pytest.approx(typical, abs=4e-2)
    assert estimate.upper == pytest.approx(typical, abs=4e-2)


def test_local_dimension_needs_mass_splitting(middle_thirds):
    atomic = make_weighted_measure(middle_thirds, (1.0, 0.0))
    filtration = symbolic_filtration(middle_thirds, 20)
    with pytest.raises(MeasureError):
        local_dim_via_filtration(atomic, filtration, Word((1,) * 20))


def test_local_dimension_outside_support(middle_thirds):
    alternating = make_weighted_measure(middle_thirds, [(0.5, 0.5), (1.0, 0.0)])
    filtration = symbolic_filtration(middle_thirds, 20)
    with pytest.raises(MeasureError):
        local_dim_via_filtration(alternating, filtration, Word((1, 2) + (1,) * 18))


def test_local_dimension_needs_long_paths(middle_thirds, uniform_thirds):
    filtration = symbolic_filtration(middle_thirds, 20)
    with pytest.raises(FiltrationError):
        local_dim_via_filtration(uniform_thirds, filtration, Word((1,) * 10))


def test_summary_rows(two_ratio):
    rows = filtration_summary_rows(symbolic_filtration(two_ratio, 6))
    assert len(rows) == 6
    assert rows[0][0] == 1 and rows[0][3] == 3
    assert rows[0][1] == pytest.approx(0.25)
    assert rows[-1][4] == ''
    assert rows[0][5] == pytest.approx(math.log(0.25) / (math.log(0.5) + 2 * math.log(0.25)))
