#!/usr/bin/env python3
"""
Tests for interval placement, axiom certification, points and sampling
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moranlab.codetree import ROOT, Word, make_spec, symbolic_diameter
from moranlab.errors import ParameterError, RealizationError, SpecError
from moranlab.measure import cylinder_log_mass
from moranlab.realization import (
    GapRule,
    asymptotic_symmetry_ratio,
    example_bounds_check,
    explicit_realization,
    interval_rows,
    point_of,
    realize_on_interval,
    sample_points,
    uniformly_perfect_example,
    verify_moran_axioms,
)


def test_edge_anchored_middle_thirds(middle_thirds):
    realization = realize_on_interval(middle_thirds, "edge_anchored", depth=5)
    assert realization.interval(ROOT) == (0.0, 1.0)
    assert realization.interval(Word((1,))) == pytest.approx((0.0, 1.0 / 3.0))
    assert realization.interval(Word((2,))) == pytest.approx((2.0 / 3.0, 1.0))
    assert realization.interval(Word((2, 1))) == pytest.approx((2.0 / 3.0, 7.0 / 9.0))


def test_uniform_gaps_placement(two_ratio):
    realization = realize_on_interval(two_ratio, GapRule.UNIFORM_GAPS, depth=3)
    gap = 0.25 / 3.0
    assert realization.interval(Word((1,))) == pytest.approx((gap, gap + 0.5))
    assert realization.interval(Word((2,))) == pytest.approx((2 * gap + 0.5, 2 * gap + 0.75))


def test_root_position_and_length(middle_thirds):
    realization = realize_on_interval(middle_thirds, "edge_anchored", depth=2, root_left=-1.0, root_length=3.0)
    assert realization.interval(Word((2, 2))) == pytest.approx((5.0 / 3.0, 2.0))


@pytest.mark.parametrize("gap_rule", ["uniform_gaps", "edge_anchored", "left_packed"])
def test_oversized_levels_rejected(gap_rule):
    with pytest.raises(RealizationError):
        realize_on_interval(make_spec(2, (0.6, 0.6)), gap_rule, depth=3)


def test_uniform_gaps_need_room():
    with pytest.raises(RealizationError):
        realize_on_interval(make_spec(2, (0.5, 0.5)), "uniform_gaps", depth=3)


def test_unknown_gap_rule(middle_thirds):
    with pytest.raises(RealizationError):
        realize_on_interval(middle_thirds, "centered", depth=3)


def test_words_beyond_depth_rejected(middle_thirds):
    realization = realize_on_interval(middle_thirds, "edge_anchored", depth=2)
    with pytest.raises(RealizationError):
        realization.interval(Word((1, 1, 1)))
    with pytest.raises(SpecError):
        realization.interval(Word((3,)))


def test_deepening_keeps_common_prefixes(two_ratio):
    shallow = realize_on_interval(two_ratio, "uniform_gaps", depth=4)
    deep = shallow.with_depth(12)
    for word in shallow.words(4):
        assert deep.interval(word) == shallow.interval(word)


def test_level_arrays_match_intervals(three_branch):
    realization = realize_on_interval(three_branch, "uniform_gaps", depth=4)
    lefts, lengths = realization.level_arrays(3)
    assert lefts.size == 27
    assert np.all(np.diff(lefts) > 0.0)
    words = realization.words(3)
    for word, left, length in zip(words, lefts, lengths):
        a, b = realization.interval(word)
        assert left == pytest.approx(a, abs=1e-15)
        assert length == pytest.approx(b - a, rel=1e-12)
    with pytest.raises(RealizationError):
        realization.level_arrays(5)


def test_moran_axioms_pass_for_middle_thirds(middle_thirds):
    report = verify_moran_axioms(realize_on_interval(middle_thirds, "edge_anchored", depth=40))
    assert report.passed
    assert [c.name for c in report.checks] == ["M1", "M3", "M4", "M2", "M5"]
    assert report.check("M3").deviation == 0.0


def test_left_packed_violates_disjointness(middle_thirds):
    report = verify_moran_axioms(realize_on_interval(middle_thirds, "left_packed", depth=10))
    assert not report.check("M3").passed
    assert [c.name for c in report.hard_failures] == ["M3"]


def test_overlapping_explicit_siblings(middle_thirds):
    realization = explicit_realization(middle_thirds, {
        "∅": (0.0, 1.0), "1": (0.0, 0.6), "2": (0.5, 1.0),
        "1.1": (0.0, 0.2), "1.2": (0.4, 0.6), "2.1": (0.5, 0.6), "2.2": (0.8, 1.0),
    })
    report = verify_moran_axioms(realization)
    assert not report.passed
    assert "M3" in [c.name for c in report.hard_failures]
    assert "1" in report.check("M3").detail


def test_explicit_nesting_violation(middle_thirds):
    realization = explicit_realization(middle_thirds, {"∅": (0.0, 1.0), "1": (-0.2, 0.3), "2": (0.6, 1.0)})
    report = verify_moran_axioms(realization)
    assert not report.check("M1").passed


@pytest.mark.parametrize("intervals", [
    {"1": (0.0, 0.3), "2": (0.6, 1.0)},
    {"∅": (0.0, 1.0), "1": (0.3, 0.1)},
    {"∅": (0.0, 1.0), "1": (0.0, float('inf'))},
    {"∅": (0.0, 1.0), "1": (0.0,)},
])
def test_malformed_explicit_realizations(middle_thirds, intervals):
    with pytest.raises(RealizationError):
        explicit_realization(middle_thirds, intervals)


def test_verify_depth_bounds(middle_thirds):
    realization = realize_on_interval(middle_thirds, "edge_anchored", depth=5)
    with pytest.raises(ParameterError):
        verify_moran_axioms(realization, depth=6)
    with pytest.raises(ParameterError):
        verify_moran_axioms(realization, m5_window=6)


def test_uniformly_perfect_example_certifies():
    realization = uniformly_perfect_example(0.5, 20)
    report = verify_moran_axioms(realization)
    assert report.passed
    bounds = report.check("diameter_bounds")
    assert bounds.passed
    assert "c=0.08333" in bounds.detail



def test_uniformly_perfect_constant_is_eta_squared_over_three():
    eta = 0.3
    realization = uniformly_perfect_example(eta, 8)
    c = eta * eta / 3.0
    assert realization.spec.level(5).ratios == (c, c)
    bounds = example_bounds_check(realization)
    assert f"c={c!r}" in bounds.detail
    for n in range(1, 9):
        left, right = realization.interval(Word((2,) * n))
        assert c ** n * (1 - 1e-9) <= right - left <= 2.0 * c ** n / eta


def test_uniformly_perfect_children_stay_near_center():
    """Test that both children of every word lie within the parent's radius of its center."""
    realization = uniformly_perfect_example(0.5, 6)
    for n in range(0, 6):
        for word in realization.words(n):
            left, right = realization.interval(word)
            center, radius = 0.5 * (left + right), 0.5 * (right - left)
            for child in (word.child(1), word.child(2)):
                a, b = realization.interval(child)
                assert abs(0.5 * (a + b) - center) <= radius


@pytest.mark.parametrize("eta", [0.0, 1.0, -0.5])
def test_uniformly_perfect_eta_range(eta):
    with pytest.raises(RealizationError):
        uniformly_perfect_example(eta, 5)


def test_bounds_check_needs_the_example(middle_thirds):
    with pytest.raises(RealizationError):
        example_bounds_check(realize_on_interval(middle_thirds, "edge_anchored", depth=3))


def test_asymptotic_symmetry_ratio():
    realization = uniformly_perfect_example(0.5, 50)
    ratios = [asymptotic_symmetry_ratio(realization, Word((1,) * n)) for n in (1, 10, 50)]
    assert ratios[0] > ratios[1] > ratios[2] > 1.0
    assert ratios[2] == pytest.approx(1.0, abs=1e-2)
    with pytest.raises(ParameterError):
        asymptotic_symmetry_ratio(realization, ROOT)


def test_point_of_converges_to_endpoints(middle_thirds):
    realization = realize_on_interval(middle_thirds, "edge_anchored", depth=30)
    left_end = point_of(realization, Word((1,) * 30))
    right_end = point_of(realization, Word((2,) * 30))
    assert abs(left_end.value) <= left_end.error
    assert abs(right_end.value - 1.0) <= right_end.error
    assert left_end.error < 1e-12
    with pytest.raises(ParameterError):
        point_of(realization, ROOT)


def test_sampled_points_lie_in_level_intervals(middle_thirds, bernoulli_thirds):
    realization = realize_on_interval(middle_thirds, "edge_anchored", depth=12)
    cloud = sample_points(realization, bernoulli_thirds, 500, seed=5)
    again = sample_points(realization, bernoulli_thirds, 500, seed=5)
    assert np.array_equal(cloud.points, again.points)
    assert np.all(np.diff(cloud.points) >= 0.0)
    # second-level gaps (1/9, 2/9) and (7/9, 8/9) hold no points
    assert not np.any((cloud.points > 1.0 / 9.0) & (cloud.points < 2.0 / 9.0))
    assert not np.any((cloud.points > 1.0 / 3.0) & (cloud.points < 2.0 / 3.0))
    assert len(cloud.to_text().splitlines()) == 500
    assert cloud.provenance['seed'] == 5


def test_sampling_needs_the_same_spec(middle_thirds, two_ratio, bernoulli_thirds):
    realization = realize_on_interval(two_ratio, "uniform_gaps", depth=5)
    with pytest.raises(RealizationError):
        sample_points(realization, bernoulli_thirds, 10, seed=0)


def test_interval_rows_in_level_order(middle_thirds):
    rows = interval_rows(realize_on_interval(middle_thirds, "edge_anchored", depth=2))
    assert len(rows) == 7
    assert rows[0] == ["∅", 0.0, 1.0]
    assert [row[0] for row in rows[1:3]] == ["1", "2"]
    assert rows[-1][0] == "2.2"
    assert rows[-1][2] == pytest.approx(1.0)


def test_explicit_level_data(middle_thirds):
    realization = explicit_realization(middle_thirds, {
        "∅": (0.0, 1.0), "1": (0.0, 0.25), "2": (0.5, 1.0),
    })
    assert realization.depth == 1
    lefts, lengths = realization.level_arrays(1)
    assert lefts.tolist() == [0.0, 0.5]
    assert lengths.tolist() == [0.25, 0.5]
    assert math.isclose(realization.log_diameter(Word((2,))), math.log(0.5))
    with pytest.raises(RealizationError):
        realization.with_depth(3)


@st.composite
def periodic_trees(draw):
    """make_spec trees with a short periodic cycle of levels, each with Σc <= 0.95."""
    cycle = []
    for _ in range(draw(st.integers(min_value=1, max_value=3))):
        branching = draw(st.integers(min_value=1, max_value=3))
        shares = draw(st.lists(st.floats(min_value=0.1, max_value=1.0), min_size=branching, max_size=branching))
        fill = draw(st.floats(min_value=0.3, max_value=0.95))
        total = math.fsum(shares)
        cycle.append(tuple(fill * share / total for share in shares))
    return make_spec([len(ratios) for ratios in cycle],
                     lambda k, i: cycle[(k - 1) % len(cycle)][i - 1])


def test_uniform_gaps_of_middle_thirds():
    realization = realize_on_interval(make_spec(2, 1.0 / 3.0), "uniform_gaps", depth=1)
    assert realization.interval(Word((1,))) == pytest.approx((1.0 / 9.0, 4.0 / 9.0), abs=1e-15)
    assert realization.interval(Word((2,))) == pytest.approx((5.0 / 9.0, 8.0 / 9.0), abs=1e-15)


@given(periodic_trees())
@settings(max_examples=60, deadline=None)
def test_uniform_gaps_are_equal_and_positive(spec):
    """Test both end gaps and every sibling gap equal (1 - Σc)·|parent|/(N + 1) > 0"""
    depth = 4
    realization = realize_on_interval(spec, "uniform_gaps", depth=depth)
    for n in range(1, depth + 1):
        level = spec.level(n)
        parent_lefts, parent_lengths = realization.level_arrays(n - 1)
        lefts, lengths = realization.level_arrays(n)
        gaps = (1.0 - math.fsum(level.ratios)) * parent_lengths / (level.branching + 1)
        assert np.all(gaps > 0.0)

        child_lefts = lefts.reshape(-1, level.branching)
        child_rights = (lefts + lengths).reshape(-1, level.branching)
        assert child_lefts[:, 0] - parent_lefts == pytest.approx(gaps, abs=1e-12)
        assert parent_lefts + parent_lengths - child_rights[:, -1] == pytest.approx(gaps, abs=1e-12)
        for i in range(1, level.branching):
            assert child_lefts[:, i] - child_rights[:, i - 1] == pytest.approx(gaps, abs=1e-12)


@given(periodic_trees(), st.sampled_from(["uniform_gaps", "edge_anchored", "left_packed"]))
@settings(max_examples=60, deadline=None)
def test_interval_lengths_match_symbolic_diameters(spec, gap_rule):
    depth = 4
    realization = realize_on_interval(spec, gap_rule, depth=depth)
    for n in range(1, depth + 1):
        _, lengths = realization.level_arrays(n)
        expected = np.array([symbolic_diameter(spec, word) for word in realization.words(n)])
        assert np.max(np.abs(lengths - expected)) <= 1e-12


@given(periodic_trees(), st.sampled_from(["uniform_gaps", "edge_anchored"]))
@settings(max_examples=60, deadline=None)
def test_distinct_words_map_to_distinct_points(spec, gap_rule):
    """Test disjoint placements keep each level strictly ordered, so point_of is injective"""
    depth = 4
    realization = realize_on_interval(spec, gap_rule, depth=depth)
    for n in range(1, depth + 1):
        lefts, lengths = realization.level_arrays(n)
        assert np.all(lefts[:-1] + lengths[:-1] < lefts[1:])
    values = [point_of(realization, word).value for word in realization.words(depth)]
    assert all(a < b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("seed", [1, 2])
def test_sampled_cell_counts_follow_the_measure(middle_thirds, bernoulli_thirds, seed):
    """Test sampled points land in each level-1 and level-2 cell within 3σ of count·μ(E_w)"""
    realization = realize_on_interval(middle_thirds, "edge_anchored", depth=12)
    count = 4000
    points = sample_points(realization, bernoulli_thirds, count, seed=seed).points
    for n in (1, 2):
        lefts, lengths = realization.level_arrays(n)
        cells = np.searchsorted(lefts, points, side="right") - 1
        assert np.all(points <= lefts[cells] + lengths[cells])
        observed = np.bincount(cells, minlength=lefts.size)
        masses = np.exp([cylinder_log_mass(bernoulli_thirds, word) for word in realization.words(n)])
        sigma = np.sqrt(count * masses * (1.0 - masses))
        assert np.all(np.abs(observed - count * masses) <= 3.0 * sigma)
