"""
Time-frequency data models and schemas
Pydantic models for tiles, tile collections, trees and decompositions
"""

from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator

from ..core.config import settings
from .dyadic import DyadicInterval
from .families import FrequencyInterval
from .signal import GridInterval


class Tile(BaseModel):
    """Area-one rectangle I_P x w_P"""

    model_config = ConfigDict(frozen=True)

    time: DyadicInterval
    freq: FrequencyInterval
    family_index: int = Field(0, ge=0)

    @property
    def area(self) -> Fraction:
        """|I_P| |w_P| in normalized units, exact"""
        return Fraction(self.time.length * self.freq.length, self.time.n)


class WavePacketParams(BaseModel):
    """Constants of the mother wave packet and its envelope"""

    model_config = ConfigDict(frozen=True)

    decay_exponent: int = Field(default_factory=lambda: settings.DECAY_EXPONENT, ge=2)
    derivative_count: int = Field(2, ge=0)
    packet_decay: int = Field(default_factory=lambda: settings.PACKET_DECAY, ge=1)
    taper_width: float = Field(default_factory=lambda: settings.TAPER_WIDTH, gt=0, lt=0.5)


def _readonly(values, dtype=np.int64) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.flags.writeable = False
    return array


class TileCollection(BaseModel):
    """
    Columnar tile collection

    Tiles are stored block-major: block b holds the frequency interval
    [block_a[b], block_a[b] + block_m[b]) of family block_family[b], and its
    block_m[b] tiles have time intervals of n / block_m[b] samples at
    positions 0 .. block_m[b] - 1. mask selects the active sub-collection.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    domain_length: float = 1.0
    block_family: np.ndarray
    block_a: np.ndarray
    block_m: np.ndarray
    block_offset: np.ndarray
    block_ref: np.ndarray
    tile_block: np.ndarray
    tile_position: np.ndarray
    mask: np.ndarray
    nu: Tuple[int, ...] = ()
    L: int = 1
    reference: Optional["TileCollection"] = None

    _cache: dict = PrivateAttr(default_factory=dict)

    @field_validator("block_family", "block_a", "block_m", "block_offset", "block_ref",
                     "tile_block", "tile_position", mode="before")
    @classmethod
    def validate_int_arrays(cls, v):
        return _readonly(v)

    @field_validator("mask", mode="before")
    @classmethod
    def validate_mask(cls, v):
        return _readonly(v, dtype=bool)

    @property
    def size(self) -> int:
        """Total tiles, active or not"""
        return int(self.tile_block.shape[0])

    @property
    def count(self) -> int:
        """Active tiles"""
        return int(self.mask.sum())

    @property
    def is_reference(self) -> bool:
        return self.reference is None

    @property
    def ref(self) -> "TileCollection":
        return self if self.reference is None else self.reference

    @cached_property
    def family_index(self) -> np.ndarray:
        return self.block_family[self.tile_block]

    @cached_property
    def freq_a(self) -> np.ndarray:
        return self.block_a[self.tile_block]

    @cached_property
    def freq_m(self) -> np.ndarray:
        return self.block_m[self.tile_block]

    @cached_property
    def time_length(self) -> np.ndarray:
        return self.n // self.freq_m

    @cached_property
    def time_start(self) -> np.ndarray:
        return self.tile_position * self.time_length

    @cached_property
    def scale(self) -> np.ndarray:
        return np.log2(self.time_length).astype(np.int64)

    @cached_property
    def ref_index(self) -> np.ndarray:
        """Index of the reference tile each tile translates"""
        ref = self.ref
        return ref.block_offset[self.block_ref[self.tile_block]] + self.tile_position

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def subset(self, mask: np.ndarray) -> "TileCollection":
        """Sub-collection keeping tiles active in both masks"""
        return self.model_copy(update={"mask": _readonly(self.mask & np.asarray(mask, dtype=bool), bool)})

    def with_mask(self, mask: np.ndarray) -> "TileCollection":
        return self.model_copy(update={"mask": _readonly(np.asarray(mask, dtype=bool), bool)})

    def time_interval(self, i: int) -> GridInterval:
        return GridInterval(
            start=int(self.time_start[i]),
            length=int(self.time_length[i]),
            n=self.n,
            domain_length=self.domain_length,
        )

    def tile(self, i: int) -> Tile:
        return Tile(
            time=DyadicInterval(
                grid_id=0,
                scale=int(self.scale[i]),
                position=int(self.tile_position[i]),
                n=self.n,
                domain_length=self.domain_length,
            ),
            freq=FrequencyInterval(a=int(self.freq_a[i]), b=int(self.freq_a[i] + self.freq_m[i])),
            family_index=int(self.family_index[i]),
        )

    def tiles(self) -> Tuple[Tile, ...]:
        return tuple(self.tile(int(i)) for i in self.indices())

    def tile_measure(self) -> np.ndarray:
        """|I_P| for every tile"""
        return self.time_length * (self.domain_length / self.n)


class Tree(BaseModel):
    """Tree with top P_T and anchor xi_T"""

    model_config = ConfigDict(frozen=True)

    top: Tile
    xi: int
    members: Tuple[Tile, ...]

    @property
    def top_measure(self) -> float:
        return self.top.time.measure


class VectorialTree(BaseModel):
    """Base tree in the reference collection with its frequency translates"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    base: Tree
    branches: Tuple[Tree, ...]
    top_index: int = Field(..., description="Reference index of the top")
    member_indices: np.ndarray = Field(..., description="Family tile indices in the tree")

    @field_validator("member_indices", mode="before")
    @classmethod
    def validate_members(cls, v):
        return _readonly(v)


class TreeTable(BaseModel):
    """Enumerated candidate vectorial trees of a reference collection"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: Any = Field(..., description="CSR membership, trees x reference tiles")
    top: np.ndarray = Field(..., description="Reference index of each top")
    xi: np.ndarray
    start: np.ndarray
    length: np.ndarray = Field(..., description="|I_T| in samples")

    @field_validator("top", "xi", "start", "length", mode="before")
    @classmethod
    def validate_columns(cls, v):
        return _readonly(v)

    def __len__(self) -> int:
        return int(self.top.shape[0])

    def members(self, row: int) -> np.ndarray:
        """Reference tile indices of one tree"""
        lo, hi = self.matrix.indptr[row], self.matrix.indptr[row + 1]
        return self.matrix.indices[lo:hi]


class TreeSelection(BaseModel):
    """A tree or interval extracted by a stopping-time decomposition"""

    model_config = ConfigDict(frozen=True)

    top_index: int = Field(..., description="Reference tile index, or -1 for interval selections")
    xi: Optional[int] = None
    top_interval: GridInterval
    value: float
    member_count: int


class DecompositionLevel(BaseModel):
    """One level n of a decomposition"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    level: int
    cap: float
    trees: Tuple[TreeSelection, ...] = ()
    tile_indices: np.ndarray
    sum_top_measure: float = 0.0
    packing_ratio: float = 0.0
    size: float = 0.0

    @field_validator("tile_indices", mode="before")
    @classmethod
    def validate_indices(cls, v):
        return _readonly(v)


class Decomposition(BaseModel):
    """Levels plus the tiles left when the size vanished"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: str
    lam: float
    norm: float
    levels: Tuple[DecompositionLevel, ...]
    remainder: np.ndarray

    @field_validator("remainder", mode="before")
    @classmethod
    def validate_remainder(cls, v):
        return _readonly(v)

    def summary_rows(self):
        """(level, tree_count, sum_IT, size_cap) per level"""
        return [
            (lvl.level, len(lvl.trees), lvl.sum_top_measure, lvl.cap)
            for lvl in self.levels
        ]


class InOutSplit(BaseModel):
    """The four localized forms of an interval"""

    model_config = ConfigDict(frozen=True)

    values: Dict[str, float]
    full: float

    @property
    def total(self) -> float:
        return float(sum(self.values.values()))


TileCollection.model_rebuild()
