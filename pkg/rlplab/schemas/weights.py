"""
Weight data models and schemas
Pydantic models for weights, characteristics and norm estimates
"""

from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from .signal import Signal


class Weight(BaseModel):
    """Strictly positive sampled weight with a characteristic cache"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    values: Signal
    _cache: Dict[str, float] = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def validate_positive(self):
        samples = self.values.samples
        if np.any(samples.imag != 0):
            raise ValueError("Weight samples must be real")
        if not np.all(samples.real > 0):
            raise ValueError("Weight samples must be strictly positive")
        return self

    @property
    def n(self) -> int:
        return self.values.n

    @property
    def dx(self) -> float:
        return self.values.dx

    @property
    def array(self) -> np.ndarray:
        return self.values.samples.real

    @property
    def cached_ap(self) -> Dict[str, float]:
        return self._cache

    def total(self) -> float:
        """w(torus)"""
        return float(self.array.sum() * self.dx)

    def scaled(self, factor: float) -> "Weight":
        return Weight(values=self.values.with_samples(self.array * factor))

    @classmethod
    def from_array(cls, values, domain_length: float = 1.0) -> "Weight":
        return cls(values=Signal(samples=np.asarray(values, dtype=float), domain_length=domain_length))


class Characteristics(BaseModel):
    """A_1, A_p and A_infinity constants of one weight"""

    a1: float
    ap: Dict[str, float] = Field(default_factory=dict)
    ainfty: float
    exact: bool = True


class OpNormEstimate(BaseModel):
    """Lower bound for an operator norm with its witness"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    lower_bound: float
    witness: Signal
    witness_kind: str
    mode: str
    p: float
    trials: int
    ratios: Tuple[float, ...] = ()


class ExponentFit(BaseModel):
    """Least-squares log-log slope"""

    slope: float
    intercept: float
    width: float = Field(..., description="Half-width of the 95% slope interval")
    stderr: float
    samples: int
    rvalue: float = 0.0


class CompositionReport(BaseModel):
    """Outcome of the congruent composition check"""

    factorization_error: float
    max_ratio: float
    ratios: List[float]
    a1: float
    trials: int
    pieces: List[int]
    notes: Optional[str] = None
