#!/usr/bin/env python3
"""
Numerical helpers - log-domain sums, tail-window limits and trend-toward-one fits
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy import stats
from scipy.special import logsumexp

logger = logging.getLogger(__name__)


def default_tail_window(n: int) -> int:
    """Tail window used when none is given: 20% of the computed range, at least 1."""
    return max(1, int(n) // 5)


def log_sum_exp(log_values: Sequence[float]) -> float:
    """log Σ exp(v); empty input or all -inf gives -inf."""
    values = np.asarray(log_values, dtype=float)
    if values.size == 0 or not np.any(np.isfinite(values)):
        return float('-inf')
    return float(logsumexp(values))


def tail_extremes(values: Sequence[float], window: int) -> Tuple[float, float]:
    """
    Tail-window estimates of liminf and limsup.

    Args:
        values: Finite prefix of a sequence
        window: Number of trailing entries to inspect

    Returns:
        (min, max) over the last `window` entries
    """
    array = np.asarray(values, dtype=float)
    if window < 1 or window > array.size:
        raise ValueError(f"tail window {window} outside 1..{array.size}")
    tail = array[-window:]
    return float(np.min(tail)), float(np.max(tail))


def oscillation(values: Sequence[float], window: int) -> Tuple[float, float]:
    """
    Oscillation amplitude (max - min) over the previous and the last window.

    The previous amplitude is nan when fewer than two full windows exist.
    """
    array = np.asarray(values, dtype=float)
    last = array[-window:]
    last_amplitude = float(np.max(last) - np.min(last))
    if array.size < 2 * window:
        return float('nan'), last_amplitude
    previous = array[-2 * window:-window]
    return float(np.max(previous) - np.min(previous)), last_amplitude


@dataclass(frozen=True)
class TrendResult:
    """Outcome of a trend-toward-one check on a ratio sequence."""
    final_deviation: float
    extrapolated_deviation: float
    non_increasing: bool
    passed: bool


def trend_to_one(ratios: Sequence[float], ns: Sequence[int], tolerance: float) -> TrendResult:
    """
    Check that ratios r_n tend to 1 over a finite window.

    |r_n - 1| is regressed on 1/n; the intercept estimates the limiting deviation.
    The deviation must also not grow from the first half of the window to the second.

    Args:
        ratios: r_n values on the window
        ns: Matching indices n (positive)
        tolerance: Bound for the extrapolated deviation

    Returns:
        TrendResult with final and extrapolated deviations
    """
    r = np.asarray(ratios, dtype=float)
    n = np.asarray(ns, dtype=float)
    deviation = np.abs(r - 1.0)
    final = float(deviation[-1])

    if r.size < 3 or np.ptp(n) == 0:
        extrapolated = final
    else:
        fit = stats.linregress(1.0 / n, deviation)
        extrapolated = float(abs(fit.intercept))

    half = max(1, r.size // 2)
    first_half = float(np.mean(deviation[:half]))
    second_half = float(np.mean(deviation[half:])) if r.size > half else first_half
    non_increasing = second_half <= first_half * (1.0 + 1e-9) + 1e-15

    passed = bool(extrapolated < tolerance and non_increasing)
    logger.debug(f"trend_to_one: final={final:.3e} extrapolated={extrapolated:.3e} "
                 f"non_increasing={non_increasing}")
    return TrendResult(final_deviation=final, extrapolated_deviation=extrapolated,
                       non_increasing=bool(non_increasing), passed=passed)


def ols_slope(x: Sequence[float], y: Sequence[float]) -> Tuple[float, float, float]:
    """
    Ordinary least squares fit y = a + b x.

    Returns:
        (slope, intercept, rms residual)
    """
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    fit = stats.linregress(xs, ys)
    residuals = ys - (fit.intercept + fit.slope * xs)
    return float(fit.slope), float(fit.intercept), float(np.sqrt(np.mean(residuals ** 2)))
