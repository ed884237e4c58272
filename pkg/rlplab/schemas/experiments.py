"""
Experiment data models and schemas
Pydantic models for experiment configuration and reports
"""

from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator

from ..core.config import settings
from ..utils.helpers import is_power_of_two


class ExperimentConfig(BaseModel):
    """Configuration of one experiment run"""

    name: str = Field(..., min_length=1)
    n: int = Field(1024)
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED)
    family_spec: str = "lacunary:2"
    weight_spec: str = "constant:1"
    p_values: List[float] = Field(default_factory=lambda: [2.0])
    budget: int = Field(50, ge=1)
    output_dir: str = Field(default_factory=lambda: settings.OUTPUT_DIR)
    thresholds: Dict[str, float] = Field(default_factory=dict)

    @field_validator("n")
    @classmethod
    def validate_n(cls, v):
        if not is_power_of_two(v) or not settings.EXPERIMENT_MIN_N <= v <= settings.EXPERIMENT_MAX_N:
            raise ValueError(
                f"n must be a power of two in [{settings.EXPERIMENT_MIN_N}, {settings.EXPERIMENT_MAX_N}], got {v}"
            )
        return v

    @field_validator("p_values")
    @classmethod
    def validate_p_values(cls, v):
        if not v:
            raise ValueError("At least one p value is required")
        if any(p < 1 for p in v):
            raise ValueError("p values must be >= 1")
        return v


class ExperimentReport(BaseModel):
    """Summary scalars written to report.json"""

    experiment: str
    n: int
    seed: int
    passed: bool
    metrics: Dict[str, Any] = Field(default_factory=dict)
    constants_measured: Dict[str, Any] = Field(default_factory=dict)
    thresholds: Dict[str, Any] = Field(default_factory=dict)
    failed_assertions: List[str] = Field(default_factory=list)


class ExperimentResult(BaseModel):
    """Everything an experiment produces before serialization"""

    report: ExperimentReport
    columns: List[str] = Field(default_factory=list)
    rows: List[Tuple[Any, ...]] = Field(default_factory=list)
    plot_columns: List[str] = Field(default_factory=lambda: ["x", "y"])
    plot: List[Tuple[Any, Any]] = Field(default_factory=list)


class ExperimentFiles(BaseModel):
    """Paths of the written report files"""

    report_json: str
    data_csv: str
    plot_dat: str
    passed: bool
    failed_assertions: List[str] = Field(default_factory=list)

    @property
    def paths(self) -> Tuple[str, str, str]:
        return (self.report_json, self.data_csv, self.plot_dat)


class ExperimentInfo(BaseModel):
    """Registry entry shown by --list"""

    name: str
    anchor: str
    defaults: Dict[str, Any] = Field(default_factory=dict)
    description: Optional[str] = None
