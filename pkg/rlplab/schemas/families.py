"""
Frequency family data models and schemas
Pydantic models for frequency intervals, interval families and vector signals
"""

from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..utils.helpers import coverage_counts, is_power_of_two
from .signal import Signal


class FrequencyInterval(BaseModel):
    """Half-open bin interval [a, b)"""

    model_config = ConfigDict(frozen=True)

    a: int = Field(..., ge=0, description="First bin")
    b: int = Field(..., description="One past the last bin")

    @model_validator(mode="after")
    def validate_order(self):
        if self.b <= self.a:
            raise ValueError(f"Empty frequency interval [{self.a}, {self.b})")
        return self

    @property
    def length(self) -> int:
        return self.b - self.a

    def bins(self) -> np.ndarray:
        return np.arange(self.a, self.b)

    def shifted(self, offset: int) -> "FrequencyInterval":
        return FrequencyInterval(a=self.a + offset, b=self.b + offset)

    def dilate(self, factor: int) -> Tuple[int, int]:
        """Concentric integer dilate, unclipped (3w or 7w)"""
        grow = (factor - 1) // 2 * self.length
        return self.a - grow, self.b + grow

    def contains_bin(self, xi: int) -> bool:
        return self.a <= xi < self.b

    def inside(self, other: "FrequencyInterval") -> bool:
        return other.a <= self.a and self.b <= other.b


class IntervalFamily(BaseModel):
    """Finite ordered family of frequency intervals with overlap constant B"""

    model_config = ConfigDict(frozen=True)

    intervals: Tuple[FrequencyInterval, ...] = Field(..., description="Intervals w_k")
    n: int = Field(..., description="Grid size the family lives on")
    overlap_B: int = Field(..., ge=1, description="Covering multiplicity bound")

    @field_validator("intervals")
    @classmethod
    def validate_intervals(cls, v):
        if len(v) == 0:
            raise ValueError("Interval family must be nonempty")
        return tuple(v)

    @model_validator(mode="after")
    def validate_family(self):
        if not is_power_of_two(self.n):
            raise ValueError(f"Grid size must be a power of two, got {self.n}")
        for interval in self.intervals:
            if interval.b > self.n:
                raise ValueError(f"Interval [{interval.a}, {interval.b}) exceeds [0, {self.n})")
        counts = coverage_counts(((w.a, w.b) for w in self.intervals), self.n)
        if int(counts.max()) > self.overlap_B:
            raise ValueError(
                f"Overlap {int(counts.max())} exceeds the declared constant {self.overlap_B}"
            )
        return self

    def __len__(self) -> int:
        return len(self.intervals)

    @property
    def max_length(self) -> int:
        """Reference length L = max |w_k|"""
        return max(w.length for w in self.intervals)

    def pairs(self) -> np.ndarray:
        return np.array([(w.a, w.b) for w in self.intervals], dtype=np.int64)


class VectorSignal(BaseModel):
    """Components g_k, one per interval of a family"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    components: Tuple[Signal, ...]
    family: IntervalFamily

    @model_validator(mode="after")
    def validate_components(self):
        if len(self.components) != len(self.family.intervals):
            raise ValueError(
                f"{len(self.components)} components for {len(self.family.intervals)} intervals"
            )
        first = self.components[0]
        for component in self.components:
            if component.n != self.family.n or component.domain_length != first.domain_length:
                raise ValueError("Vector components must share N and domain_length")
        return self

    @property
    def n(self) -> int:
        return self.family.n

    @property
    def domain_length(self) -> float:
        return self.components[0].domain_length

    def stacked(self) -> np.ndarray:
        """Components as a (K, N) array"""
        return np.stack([c.samples for c in self.components])

    @classmethod
    def from_array(cls, values: np.ndarray, family: IntervalFamily, domain_length: float = 1.0):
        return cls(
            components=tuple(Signal(samples=row, domain_length=domain_length) for row in values),
            family=family,
        )
