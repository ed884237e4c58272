"""
Dyadic data models and schemas
Pydantic models for shifted-grid intervals and sparse families
"""

from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..utils.helpers import grid_shift, is_power_of_two, log2_exact
from .signal import GridInterval


class DyadicInterval(BaseModel):
    """
    Interval of one of the three shifted grids

    Realized samples are [s, s + 2^scale) with
    s = origin + position * 2^scale + round(grid_id * 2^scale / 3) (mod n).
    origin is 0 for the lattice grids and the root offset for constructions
    run in a translated frame.
    """

    model_config = ConfigDict(frozen=True)

    grid_id: int = Field(0, ge=0, le=2)
    scale: int = Field(..., ge=0)
    position: int = Field(...)
    n: int = Field(...)
    origin: int = Field(0, ge=0)
    domain_length: float = Field(1.0, gt=0)

    @model_validator(mode="after")
    def validate_scale(self):
        if not is_power_of_two(self.n):
            raise ValueError(f"Grid size must be a power of two, got {self.n}")
        if self.scale > log2_exact(self.n):
            raise ValueError(f"Scale {self.scale} exceeds log2(n) = {log2_exact(self.n)}")
        return self

    @property
    def length(self) -> int:
        return 1 << self.scale

    @property
    def start(self) -> int:
        return (self.origin + self.position * self.length + grid_shift(self.grid_id, self.scale)) % self.n

    @property
    def interval(self) -> GridInterval:
        return GridInterval(start=self.start, length=self.length, n=self.n, domain_length=self.domain_length)

    @property
    def measure(self) -> float:
        return self.length * self.domain_length / self.n

    def key(self) -> tuple:
        return (self.start, self.length)

    def child(self, scale: int, offset: int) -> "DyadicInterval":
        """Dyadic sub-interval at a finer scale, offset counted from this start"""
        return DyadicInterval(
            grid_id=0,
            scale=scale,
            position=offset,
            n=self.n,
            origin=self.start,
            domain_length=self.domain_length,
        )

    @classmethod
    def root(cls, n: int, grid_id: int = 0, domain_length: float = 1.0) -> "DyadicInterval":
        """The full period taken from grid grid_id"""
        return cls(grid_id=grid_id, scale=log2_exact(n), position=0, n=n, domain_length=domain_length)


class SparseMember(BaseModel):
    """One interval of a sparse family with its witness set"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    interval: GridInterval
    witness: np.ndarray = Field(..., description="Sorted sample indices of E_I")

    @field_validator("witness", mode="before")
    @classmethod
    def validate_witness(cls, v):
        array = np.unique(np.asarray(v, dtype=np.int64))
        array.flags.writeable = False
        return array

    @property
    def witness_measure(self) -> float:
        return self.witness.shape[0] * self.interval.domain_length / self.interval.n


class SparseFamily(BaseModel):
    """Intervals with explicit witnesses certifying eta-sparsity"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    members: Tuple[SparseMember, ...] = ()
    eta: float = Field(..., gt=0, le=1)
    n: int
    domain_length: float = Field(1.0, gt=0)

    def __len__(self) -> int:
        return len(self.members)

    def intervals(self) -> List[GridInterval]:
        return [m.interval for m in self.members]


class SparseVerification(BaseModel):
    """Outcome of a sparsity check"""

    valid: bool
    eta: float
    checked: int = 0
    reason: Optional[str] = None
    offending: Optional[Tuple[int, ...]] = None
    min_ratio: Optional[float] = None


class StoppingNode(BaseModel):
    """One node of the stopping-time recursion"""

    model_config = ConfigDict(frozen=True)

    interval: GridInterval
    level: int
    parent: Optional[int] = None
    constant_f: Optional[float] = None
    constant_g: Optional[float] = None
    packing: float = 0.0
    children: int = 0
    inf_bound_f: Optional[float] = None
    inf_bound_g: Optional[float] = None


class SparseConstruction(BaseModel):
    """Full record of one sparse construction"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    family: SparseFamily = Field(..., description="Enlarged 1/6-sparse family {3I}")
    grid_family: SparseFamily = Field(..., description="Grid-level 1/2-sparse family")
    nodes: Tuple[StoppingNode, ...]
    interval_types: Tuple[int, ...] = Field(..., description="Grid j of the enclosing interval per node")
    constants: Dict[str, float] = Field(default_factory=dict)
    grid_id: int = 0

    @property
    def depth(self) -> int:
        return max((node.level for node in self.nodes), default=0)
