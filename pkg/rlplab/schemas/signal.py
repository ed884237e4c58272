"""
Signal data models and schemas
Pydantic models for sampled periodic signals and sample blocks
"""

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.config import settings
from ..utils.helpers import is_power_of_two, log2_exact


def _frozen_array(values: Any, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.flags.writeable = False
    return array


class Signal(BaseModel):
    """Complex samples on the periodic grid Z_N"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    samples: np.ndarray = Field(..., description="N complex samples")
    domain_length: float = Field(1.0, gt=0, description="Physical length of the period")

    @field_validator("samples", mode="before")
    @classmethod
    def validate_samples(cls, v):
        array = np.asarray(v)
        if array.ndim != 1:
            raise ValueError("Signal samples must be one-dimensional")
        if not is_power_of_two(array.shape[0]) or array.shape[0] < settings.MIN_N:
            raise ValueError(
                f"Signal length must be a power of two >= {settings.MIN_N}, got {array.shape[0]}"
            )
        if not np.all(np.isfinite(array)):
            raise ValueError("Signal samples must be finite")
        return _frozen_array(array, np.complex128)

    @property
    def n(self) -> int:
        return int(self.samples.shape[0])

    @property
    def n_log2(self) -> int:
        return log2_exact(self.n)

    @property
    def dx(self) -> float:
        return self.domain_length / self.n

    @property
    def modulus(self) -> np.ndarray:
        return np.abs(self.samples)

    def is_real(self) -> bool:
        return bool(np.all(self.samples.imag == 0))

    def with_samples(self, values) -> "Signal":
        """Signal on the same grid with new samples"""
        return Signal(samples=values, domain_length=self.domain_length)

    def abs(self) -> "Signal":
        return self.with_samples(self.modulus)

    def restricted(self, mask: np.ndarray) -> "Signal":
        """Multiply by the indicator of a sample mask"""
        return self.with_samples(np.where(mask, self.samples, 0))

    @classmethod
    def zeros(cls, n: int, domain_length: float = 1.0) -> "Signal":
        return cls(samples=np.zeros(n, dtype=np.complex128), domain_length=domain_length)

    @classmethod
    def constant(cls, n: int, value: complex, domain_length: float = 1.0) -> "Signal":
        return cls(samples=np.full(n, value, dtype=np.complex128), domain_length=domain_length)

    @classmethod
    def from_array(cls, values, domain_length: float = 1.0) -> "Signal":
        return cls(samples=values, domain_length=domain_length)


class GridInterval(BaseModel):
    """Half-open block of consecutive samples, wrapping allowed"""

    model_config = ConfigDict(frozen=True)

    start: int = Field(..., ge=0, description="First sample index")
    length: int = Field(..., ge=1, description="Number of samples")
    n: int = Field(..., description="Grid size")
    domain_length: float = Field(1.0, gt=0)

    @model_validator(mode="after")
    def validate_bounds(self):
        if not is_power_of_two(self.n):
            raise ValueError(f"Grid size must be a power of two, got {self.n}")
        if self.start >= self.n:
            raise ValueError(f"start {self.start} outside [0, {self.n})")
        if self.length > self.n:
            raise ValueError(f"length {self.length} exceeds the period {self.n}")
        return self

    @property
    def measure(self) -> float:
        return self.length * self.domain_length / self.n

    @property
    def end(self) -> int:
        """One past the last sample, unwrapped"""
        return self.start + self.length

    @property
    def is_full(self) -> bool:
        return self.length == self.n

    def indices(self) -> np.ndarray:
        return (self.start + np.arange(self.length)) % self.n

    def mask(self) -> np.ndarray:
        out = np.zeros(self.n, dtype=bool)
        out[self.indices()] = True
        return out

    def contains(self, other: "GridInterval") -> bool:
        if self.is_full:
            return True
        if other.length > self.length:
            return False
        return (other.start - self.start) % self.n + other.length <= self.length

    def tripled(self) -> "GridInterval":
        """3I, clipped to the full period"""
        if 3 * self.length >= self.n:
            return GridInterval(start=0, length=self.n, n=self.n, domain_length=self.domain_length)
        return GridInterval(
            start=(self.start - self.length) % self.n,
            length=3 * self.length,
            n=self.n,
            domain_length=self.domain_length,
        )

    def dilated(self, factor: int) -> "GridInterval":
        """Concentric dilate by an odd integer factor, clipped to the period"""
        grow = (factor - 1) // 2 * self.length
        if self.length + 2 * grow >= self.n:
            return GridInterval(start=0, length=self.n, n=self.n, domain_length=self.domain_length)
        return GridInterval(
            start=(self.start - grow) % self.n,
            length=self.length + 2 * grow,
            n=self.n,
            domain_length=self.domain_length,
        )

    def key(self) -> tuple:
        return (self.start, self.length)

    @classmethod
    def full(cls, n: int, domain_length: float = 1.0) -> "GridInterval":
        return cls(start=0, length=n, n=n, domain_length=domain_length)
