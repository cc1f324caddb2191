import math
from enum import Enum
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .constants import ATOL, CANONICAL_STATES, DEFAULT_N_PHOTONS, DEFAULT_SEED, SCHEMA_VERSION


class Analysis(str, Enum):
    PM_BRANCH = "pm_branch"
    HV_OUTPUT = "hv_output"


class SweepVariable(str, Enum):
    PHI = "phi"
    THETA = "theta"


def _check_finite(value):
    if not math.isfinite(value):
        raise ValueError("must be finite")
    return value


def validate_post_select(label):
    """Normalize a post-selection label: H, V, P, M or ``phi:<deg>``."""
    if label is None:
        return None
    text = str(label).strip()
    if text.upper() in CANONICAL_STATES:
        return text.upper()
    if text.lower().startswith("phi:"):
        try:
            angle = float(text[4:])
        except ValueError:
            raise ValueError(f"bad polarizer angle in '{text}'")
        _check_finite(angle)
        return f"phi:{angle!r}"
    raise ValueError(f"must be one of {', '.join(CANONICAL_STATES)} or phi:<deg>, got '{text}'")


class MeasurementSetting(BaseModel):
    """HWP rotation plus the two interference visibilities of the bench."""

    model_config = ConfigDict(frozen=True)

    theta: float  # radians
    v_hv: float = Field(1.0, ge=0.0, le=1.0)
    v_pm: float = Field(1.0, ge=0.0, le=1.0)

    @field_validator("theta")
    @classmethod
    def finite_theta(cls, value):
        return _check_finite(value)

    @classmethod
    def from_degrees(cls, theta_deg, v_hv=1.0, v_pm=1.0):
        return cls(theta=math.radians(theta_deg), v_hv=v_hv, v_pm=v_pm)

    @property
    def theta_deg(self):
        return math.degrees(self.theta)

    @property
    def is_ideal(self):
        return self.v_hv == 1.0 and self.v_pm == 1.0


class ExperimentConfig(BaseModel):
    """
    One bench run: photon budget, seed, setting, input angle and detection.

    Angles are radians. ``post_select`` is a label understood by
    ``polar_core.named_state``; None means no polarizers in the outputs.
    """

    model_config = ConfigDict(frozen=True)

    n_photons: int = Field(DEFAULT_N_PHOTONS, ge=1)
    seed: int = Field(DEFAULT_SEED, ge=0, lt=2**64)
    setting: MeasurementSetting
    input_phi: float
    post_select: Optional[str] = None
    analysis: Analysis = Analysis.PM_BRANCH
    monitor_fraction: float = Field(0.0, ge=0.0, lt=1.0)
    exact: bool = False
    # fixed transition probability for the predicted column; None uses sin^2(2 theta)
    eta: Optional[float] = Field(None, ge=0.0, le=1.0)

    @field_validator("input_phi")
    @classmethod
    def finite_phi(cls, value):
        return _check_finite(value)

    @field_validator("post_select")
    @classmethod
    def known_post_select(cls, value):
        return validate_post_select(value)

    @model_validator(mode="after")
    def post_select_needs_branch_analysis(self):
        if self.post_select is not None and self.analysis is Analysis.HV_OUTPUT:
            raise ValueError("post_select cannot be combined with analysis = hv_output")
        return self

    @property
    def input_phi_deg(self):
        return math.degrees(self.input_phi)


class SweepSpec(BaseModel):
    """A grid of angles swept over one variable of a base configuration."""

    model_config = ConfigDict(frozen=True)

    variable: SweepVariable
    grid: List[float]  # radians
    base: ExperimentConfig
    workers: int = Field(1, ge=1)

    @field_validator("grid")
    @classmethod
    def strictly_monotone(cls, grid):
        if not grid:
            raise ValueError("grid must not be empty")
        for value in grid:
            _check_finite(value)
        steps = [b - a for a, b in zip(grid, grid[1:])]
        if steps and not (all(s > 0 for s in steps) or all(s < 0 for s in steps)):
            raise ValueError("grid must be strictly monotone")
        return grid


class CountRecord(BaseModel):
    """
    Detector clicks per outcome cell.

    Sampled records hold integers. Exact-mode records hold the expected counts
    ``n_photons * p`` as floats and set ``exact``.
    """

    model_config = ConfigDict(frozen=True)

    cells: Dict[str, Union[int, float]]
    n_monitor: Union[int, float] = 0
    n_photons: int = Field(ge=1)
    exact: bool = False

    @model_validator(mode="after")
    def counts_add_up(self):
        if any(v < 0 for v in self.cells.values()) or self.n_monitor < 0:
            raise ValueError("counts must be non-negative")
        total = sum(self.cells.values()) + self.n_monitor
        if abs(total - self.n_photons) > 1e-9 * self.n_photons:
            raise ValueError(f"counts sum to {total}, expected {self.n_photons}")
        return self

    @property
    def detected(self):
        return sum(self.cells.values())

    @property
    def monitor_ratio(self):
        """Monitor counts relative to the counts in the output detectors."""
        detected = self.detected
        return self.n_monitor / detected if detected else math.nan

    def total(self, *labels):
        return sum(self.cells.get(label, 0) for label in labels)


class TradeoffPoint(BaseModel):
    """Resolution and back-action (2 eta_HV) of one measurement strength."""

    model_config = ConfigDict(frozen=True)

    epsilon_pm: float = Field(ge=-1.0 - ATOL, le=1.0 + ATOL)
    back_action: float = Field(ge=-ATOL, le=2.0 + ATOL)
    theta: float


class WeakSweepRow(BaseModel):
    phi_deg: float
    value_est: Optional[float] = None
    std_err: Optional[float] = None
    value_eq9: Optional[float] = None
    weak_value: Optional[float] = None
    n_pass: Union[int, float] = 0
    n_block: Union[int, float] = 0
    note: Optional[str] = Field(None, exclude=True)


class TradeoffRow(BaseModel):
    theta_deg: float
    epsilon_est: float
    epsilon_err: float
    backaction_est: float
    backaction_err: float
    ellipse_residual: Optional[float] = None


class CalibrationRow(BaseModel):
    epsilon_est: float
    epsilon_err: float
    epsilon_model: float


class QuantityRow(BaseModel):
    quantity: str
    value: Optional[float] = None


def columns_of(model):
    """CSV column names of a row model, in declaration order."""
    return [name for name, field in model.model_fields.items() if not field.exclude]


class RunManifest(BaseModel):
    """Everything needed to re-run a command, embedded in its CSV output."""

    command: str
    config_path: str
    config_sha256: Optional[str] = None
    params: Dict[str, str]
    output_path: str = "-"

    @property
    def seed(self):
        return int(self.params["seed"])

    def header_items(self):
        items = [
            ("schema", str(SCHEMA_VERSION)),
            ("command", self.command),
            ("config_path", self.config_path),
        ]
        if self.config_sha256 is not None:
            items.append(("config_sha256", self.config_sha256))
        items.append(("output_path", self.output_path))
        items.extend(self.params.items())
        return items
