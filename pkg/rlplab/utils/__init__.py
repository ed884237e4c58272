"""Utility package initialization"""

from .helpers import (
    is_power_of_two,
    log2_exact,
    grid_shift,
    periodic_distance,
    point_distance,
    coverage_counts,
    conjugate_exponent,
    make_rng,
    trial_seeds,
    sweep_sizes,
    dyadic_blocks,
    parse_number_list,
    loglog_points,
)

__all__ = [
    "is_power_of_two",
    "log2_exact",
    "grid_shift",
    "periodic_distance",
    "point_distance",
    "coverage_counts",
    "conjugate_exponent",
    "make_rng",
    "trial_seeds",
    "sweep_sizes",
    "dyadic_blocks",
    "parse_number_list",
    "loglog_points",
]
