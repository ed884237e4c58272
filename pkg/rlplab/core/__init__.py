"""Core package initialization"""

from .config import settings
from .executor import init_pool, close_pool, get_pool, parallel_map
from .storage import init_output_dir, write_json, write_csv, write_plot, read_json
from .grid_init import init_grids, check_shifted_grids
from .exceptions import (
    RLPLabException,
    ValidationException,
    GridMismatchException,
    PreconditionException,
    UnknownExperimentException,
    ReportIOException,
    ExperimentAssertionException,
    ComputationException,
    to_exit_code,
)

__all__ = [
    "settings",
    "init_pool",
    "close_pool",
    "get_pool",
    "parallel_map",
    "init_output_dir",
    "write_json",
    "write_csv",
    "write_plot",
    "read_json",
    "init_grids",
    "check_shifted_grids",
    "RLPLabException",
    "ValidationException",
    "GridMismatchException",
    "PreconditionException",
    "UnknownExperimentException",
    "ReportIOException",
    "ExperimentAssertionException",
    "ComputationException",
    "to_exit_code",
]
