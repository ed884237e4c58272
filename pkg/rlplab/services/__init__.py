"""Services package initialization"""

from .signal_core import SignalService
from .frequency_families import FrequencyFamilyService
from .square_function import SquareFunctionService
from .dyadic_machinery import DyadicService
from .tiles import TileService
from .tile_sizes import SizeService
from .decompositions import DecompositionService
from .tile_estimates import EstimateService
from .weights_lab import WeightsService
from .opnorm import OpNormService
from .experiments import ExperimentService

__all__ = [
    "SignalService",
    "FrequencyFamilyService",
    "SquareFunctionService",
    "DyadicService",
    "TileService",
    "SizeService",
    "DecompositionService",
    "EstimateService",
    "WeightsService",
    "OpNormService",
    "ExperimentService",
]
