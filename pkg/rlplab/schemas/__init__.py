"""Schemas package initialization"""

from .signal import Signal, GridInterval
from .families import FrequencyInterval, IntervalFamily, VectorSignal
from .dyadic import (
    DyadicInterval,
    SparseMember,
    SparseFamily,
    SparseVerification,
    StoppingNode,
    SparseConstruction,
)
from .tiles import (
    Tile,
    WavePacketParams,
    TileCollection,
    Tree,
    VectorialTree,
    TreeTable,
    TreeSelection,
    DecompositionLevel,
    Decomposition,
    InOutSplit,
)
from .weights import Weight, Characteristics, OpNormEstimate, ExponentFit, CompositionReport
from .experiments import (
    ExperimentConfig,
    ExperimentReport,
    ExperimentResult,
    ExperimentFiles,
    ExperimentInfo,
)

__all__ = [
    "Signal",
    "GridInterval",
    "FrequencyInterval",
    "IntervalFamily",
    "VectorSignal",
    "DyadicInterval",
    "SparseMember",
    "SparseFamily",
    "SparseVerification",
    "StoppingNode",
    "SparseConstruction",
    "Tile",
    "WavePacketParams",
    "TileCollection",
    "Tree",
    "VectorialTree",
    "TreeTable",
    "TreeSelection",
    "DecompositionLevel",
    "Decomposition",
    "InOutSplit",
    "Weight",
    "Characteristics",
    "OpNormEstimate",
    "ExponentFit",
    "CompositionReport",
    "ExperimentConfig",
    "ExperimentReport",
    "ExperimentResult",
    "ExperimentFiles",
    "ExperimentInfo",
]
