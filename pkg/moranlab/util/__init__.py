"""
Utility modules for moranlab
"""

from .config import Defaults, get_defaults, setup_logging
from .numerics import (
    TrendResult,
    default_tail_window,
    log_sum_exp,
    ols_slope,
    oscillation,
    tail_extremes,
    trend_to_one,
)

__all__ = [
    'Defaults',
    'get_defaults',
    'setup_logging',
    'TrendResult',
    'default_tail_window',
    'log_sum_exp',
    'ols_slope',
    'oscillation',
    'tail_extremes',
    'trend_to_one',
]
