#!/usr/bin/env python3
"""
Moranlab Package
Exact and empirical dimensions of Moran sets and Moran measures
"""

__version__ = "1.0.0"
__author__ = "Moranlab Team"

# Import main entry points for easy access
try:
    from .codetree import (
        ConstructionSpec, Level, Word, make_spec, make_spec_from_levels,
        middle_thirds_spec, two_ratio_spec, doubling_block_spec, geometric_decay_spec,
        offsprings, symbolic_diameter, rho_distance, spec_from_json, spec_to_json
    )
    from .dimension import (
        DimensionReport, dimension_report, solve_level_dimension, level_equation,
        cover_comparison_witness
    )
    from .measure import (
        MoranMeasure, make_uniform_measure, make_weighted_measure, cylinder_log_mass,
        entropy_average_ratio, check_entropy_conditions, lq_spectrum_symbolic, lq_dimension,
        dim_at_one_sandwich_check
    )
    from .filtration import (
        GeneralFiltration, build_filtration, symbolic_filtration, verify_filtration_axioms,
        local_dim_via_filtration
    )
    from .realization import (
        IntervalRealization, realize_on_interval, uniformly_perfect_example, point_of,
        verify_moran_axioms, sample_points
    )
    from .estimation import (
        ScaleRange, box_count_dimension, local_dimension_slope, sq_packing_sum,
        ball_to_cylinder_cover
    )
    from .errors import MoranLabError

    __all__ = [
        'ConstructionSpec',
        'Level',
        'Word',
        'make_spec',
        'make_spec_from_levels',
        'middle_thirds_spec',
        'two_ratio_spec',
        'doubling_block_spec',
        'geometric_decay_spec',
        'offsprings',
        'symbolic_diameter',
        'rho_distance',
        'spec_from_json',
        'spec_to_json',
        'DimensionReport',
        'dimension_report',
        'solve_level_dimension',
        'level_equation',
        'cover_comparison_witness',
        'MoranMeasure',
        'make_uniform_measure',
        'make_weighted_measure',
        'cylinder_log_mass',
        'entropy_average_ratio',
        'check_entropy_conditions',
        'lq_spectrum_symbolic',
        'lq_dimension',
        'dim_at_one_sandwich_check',
        'GeneralFiltration',
        'build_filtration',
        'symbolic_filtration',
        'verify_filtration_axioms',
        'local_dim_via_filtration',
        'IntervalRealization',
        'realize_on_interval',
        'uniformly_perfect_example',
        'point_of',
        'verify_moran_axioms',
        'sample_points',
        'ScaleRange',
        'box_count_dimension',
        'local_dimension_slope',
        'sq_packing_sum',
        'ball_to_cylinder_cover',
        'MoranLabError',
    ]

except ImportError as e:
    # Handle missing numerical dependencies gracefully
    import logging
    logger = logging.getLogger(__name__)
    logger.warning(f"Some moranlab modules could not be imported: {e}")

    __all__ = []
