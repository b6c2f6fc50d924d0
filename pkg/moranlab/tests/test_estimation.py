#!/usr/bin/env python3
"""
Tests for box counting, ball masses, local slopes, packing sums and cover conversion
"""

import math

import numpy as np
import pytest

from moranlab.dimension import dimension_report, is_pairwise_disjoint, is_symbolic_cover
from moranlab.errors import CoverError, EstimationError, ParameterError
from moranlab.estimation import (
    ScaleRange,
    ball_log_mass,
    ball_to_cylinder_cover,
    box_count_dimension,
    leaf_support,
    local_dimension_slope,
    sq_packing_sum,
)
from moranlab.measure import make_weighted_measure
from moranlab.realization import PointCloud, realize_on_interval, sample_points

from .conftest import LOG2_LOG3

BERNOULLI_RATIO = -(0.3 * math.log(0.3) + 0.7 * math.log(0.7)) / math.log(3.0)


@pytest.fixture
def thirds_depth7(middle_thirds):
    return realize_on_interval(middle_thirds, "edge_anchored", depth=7)


def test_geometric_scales():
    scales = ScaleRange.geometric(0.1, 0.5, count=4)
    assert scales.r_values == pytest.approx((0.1, 0.05, 0.025, 0.0125))
    assert len(scales) == 4
    assert ScaleRange.geometric(0.5, count=3).base == pytest.approx(1.0 / 3.0)


@pytest.mark.parametrize("values", [(), (0.1, 0.1), (0.1, 0.2), (0.1, -0.01), (float('inf'), 0.1)])
def test_invalid_scale_ranges(values):
    with pytest.raises(EstimationError):
        ScaleRange(r_values=values, base=0.5)


def test_geometric_scale_bounds():
    with pytest.raises(EstimationError):
        ScaleRange.geometric(0.1, 1.5)
    with pytest.raises(EstimationError):
        ScaleRange.geometric(2.0, 0.5)


def test_box_count_of_middle_thirds(middle_thirds):
    realization = realize_on_interval(middle_thirds, "edge_anchored", depth=12)
    lefts, lengths = realization.level_arrays(12)
    cloud = PointCloud(points=lefts + 0.5 * lengths)
    result = box_count_dimension(cloud, ScaleRange.geometric(3.0 ** -4, 1.0 / 3.0, count=7))
    report = dimension_report(middle_thirds, 12)
    assert report.s_star - 0.03 <= result.slope <= report.s_upper_star + 0.03
    assert result.residual < 0.05
    assert not result.degenerate
    assert len(result.csv_rows()) == 7


def test_box_count_of_a_segment():
    cloud = PointCloud(points=np.linspace(0.0, 1.0, 20001))
    result = box_count_dimension(cloud, ScaleRange.geometric(0.1, 0.5, count=6))
    assert result.slope == pytest.approx(1.0, abs=0.05)


def test_box_count_degenerate_and_invalid_input():
    scales = ScaleRange.geometric(0.1, 0.5, count=5)
    result = box_count_dimension(PointCloud(points=np.full(10, 0.3)), scales)
    assert result.degenerate and result.slope == 0.0
    with pytest.raises(EstimationError):
        box_count_dimension(PointCloud(points=np.array([])), scales)
    with pytest.raises(EstimationError):
        box_count_dimension(PointCloud(points=np.array([0.1, 0.2])), ScaleRange.geometric(0.1, 0.5, count=3))


def test_ball_mass_of_a_first_level_interval(uniform_thirds, middle_thirds):
    realization = realize_on_interval(middle_thirds, "edge_anchored", depth=20)
    assert math.exp(ball_log_mass(uniform_thirds, realization, 1.0 / 6.0, 1.0 / 6.0)) == pytest.approx(0.5)
    assert ball_log_mass(uniform_thirds, realization, 0.5, 1.0) == pytest.approx(0.0, abs=1e-12)
    # the gap (1/3, 2/3) carries no mass
    assert ball_log_mass(uniform_thirds, realization, 0.5, 0.1) == float('-inf')
    with pytest.raises(ParameterError):
        ball_log_mass(uniform_thirds, realization, 0.5, 0.0)


def test_ball_mass_needs_matching_specs(bernoulli_thirds, two_ratio):
    realization = realize_on_interval(two_ratio, "uniform_gaps", depth=5)
    with pytest.raises(EstimationError):
        ball_log_mass(bernoulli_thirds, realization, 0.5, 0.1)


def test_local_slopes_of_bernoulli_measure(middle_thirds, bernoulli_thirds):
    """Test the average log mu(B(x, r)) / log r over mu-typical points against H(p)/log 3."""
    realization = realize_on_interval(middle_thirds, "edge_anchored", depth=40)
    points = sample_points(realization, bernoulli_thirds, 100, seed=17).points
    scales = ScaleRange(r_values=(3.0 ** -30,), base=1.0 / 3.0)
    slopes = [local_dimension_slope(bernoulli_thirds, realization, float(x), scales).lower for x in points]
    assert float(np.mean(slopes)) == pytest.approx(BERNOULLI_RATIO, abs=0.04)


def test_local_slopes_of_uniform_measure(middle_thirds, uniform_thirds):
    realization = realize_on_interval(middle_thirds, "edge_anchored", depth=30)
    scales = ScaleRange.geometric(3.0 ** -10, 1.0 / 3.0, count=10)
    result = local_dimension_slope(uniform_thirds, realization, 0.0, scales)
    assert result.lower <= result.upper
    assert result.upper == pytest.approx(LOG2_LOG3, abs=0.05)
    assert len(result.to_dict()['ratios']) == 10


def test_local_slope_preconditions(middle_thirds, uniform_thirds):
    realization = realize_on_interval(middle_thirds, "edge_anchored", depth=10)
    scales = ScaleRange.geometric(0.1, 0.5, count=4)
    with pytest.raises(EstimationError):
        local_dimension_slope(uniform_thirds, realization, 1.5, scales)
    shifted = realize_on_interval(middle_thirds, "edge_anchored", depth=10, root_length=3.0)
    with pytest.raises(EstimationError):
        local_dimension_slope(uniform_thirds, shifted, 0.5, ScaleRange(r_values=(2.0, 1.0, 0.5, 0.25), base=0.5))


@pytest.mark.parametrize("q", [0.5, 2.0, 3.0])
def test_packing_sums_of_uniform_middle_thirds(uniform_thirds, thirds_depth7, q):
    """Test S_q = 2^((m+1)(1-q)) for delta just below the level-(m+1) length."""
    support = leaf_support(uniform_thirds, thirds_depth7)
    for m in range(0, 5):
        delta = 0.999 * 3.0 ** -(m + 1)
        result = sq_packing_sum(uniform_thirds, thirds_depth7, q, delta, support=support)
        assert result.count == 2 ** (m + 1)
        assert result.value == pytest.approx(2.0 ** ((m + 1) * (1.0 - q)), rel=1e-9)


def test_packing_sum_grows_with_delta_for_large_q(uniform_thirds, thirds_depth7):
    deltas = [0.999 * 3.0 ** -(m + 1) for m in range(5, -1, -1)]
    values = [sq_packing_sum(uniform_thirds, thirds_depth7, 2.0, d).value for d in deltas]
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_packing_region_and_parameters(uniform_thirds, thirds_depth7):
    half = sq_packing_sum(uniform_thirds, thirds_depth7, 2.0, 0.999 / 3.0, region=(0.0, 1.0 / 3.0))
    assert half.value == pytest.approx(0.25)
    empty = sq_packing_sum(uniform_thirds, thirds_depth7, 2.0, 0.1, region=(0.4, 0.6))
    assert empty.value == 0.0 and empty.count == 0
    with pytest.raises(ParameterError):
        sq_packing_sum(uniform_thirds, thirds_depth7, 2.0, 0.0)
    with pytest.raises(ParameterError):
        sq_packing_sum(uniform_thirds, thirds_depth7, -1.0, 0.1)


def test_leaf_support_drops_zero_mass(middle_thirds, thirds_depth7):
    atomic = make_weighted_measure(middle_thirds, (1.0, 0.0))
    support = leaf_support(atomic, thirds_depth7)
    assert support.points.size == 1
    assert support.ball_mass(float(support.points[0]), 1e-6) == pytest.approx(1.0)


def test_level_hulls_convert_to_the_level(middle_thirds):
    realization = realize_on_interval(middle_thirds, "edge_anchored", depth=6)
    balls = [realization.interval(w) for w in realization.words(2)]
    conversion = ball_to_cylinder_cover(realization, balls)
    assert conversion.words == realization.words(2)
    assert conversion.per_ball == [1, 1, 1, 1]
    assert is_symbolic_cover(middle_thirds, conversion.words)
    assert is_pairwise_disjoint(conversion.words)


def test_wide_balls_convert_to_large_cylinders(middle_thirds):
    realization = realize_on_interval(middle_thirds, "edge_anchored", depth=6)
    conversion = ball_to_cylinder_cover(realization, [(0.0, 0.5), (0.6, 1.0)])
    assert [str(w) for w in conversion.words] == ["1", "2"]
    assert conversion.max_per_ball == 1


@pytest.mark.parametrize("balls", [[], [(0.0, 0.3)], [(0.5, 0.2)]])
def test_non_covers_rejected(middle_thirds, balls):
    realization = realize_on_interval(middle_thirds, "edge_anchored", depth=4)
    with pytest.raises(CoverError):
        ball_to_cylinder_cover(realization, balls)
