import math
from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Free-space propagation speed used for every wavelength computation (m/s).
SPEED_OF_LIGHT = 3.0e8


class Scheme(str, Enum):
    ASW_JE = "asw-je"
    PRMSE_JE = "prmse-je"
    EXHAUSTIVE = "exhaustive"
    TWO_PHASE = "two-phase"
    FAR_FIELD = "far-field"
    PERFECT_CSI = "perfect-csi"


class CodebookKind(str, Enum):
    DFT = "dft"
    POLAR = "polar"


class SweepVariable(str, Enum):
    SNR = "snr"
    RANGE = "range"
    RICIAN = "rician"
    N_ANTENNAS = "n_antennas"


class FieldRegion(str, Enum):
    NEAR = "near"
    FAR = "far"


class RangeMode(str, Enum):
    FIXED = "fixed"
    UNIFORM = "uniform"
    FRESNEL = "fresnel"


class ArrayConfig(BaseModel):
    """Uniform linear array geometry; derived distances are always recomputed."""

    model_config = ConfigDict(frozen=True)

    n_antennas: int = Field(default=256, ge=2, description="Number of antennas N")
    carrier_freq: float = Field(default=30e9, gt=0, allow_inf_nan=False, description="Hz")
    spacing: Optional[float] = Field(
        default=None, gt=0, allow_inf_nan=False,
        description="Element spacing in meters; half a wavelength when omitted"
    )

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_freq

    @property
    def element_spacing(self) -> float:
        return self.spacing if self.spacing is not None else self.wavelength / 2

    @property
    def aperture(self) -> float:
        return (self.n_antennas - 1) * self.element_spacing

    @property
    def rayleigh_dist(self) -> float:
        return 2 * self.aperture ** 2 / self.wavelength

    @property
    def fresnel_dist(self) -> float:
        return 0.5 * math.sqrt(self.aperture ** 3 / self.wavelength)

    def element_offsets(self) -> np.ndarray:
        """Signed distance of each antenna from the array center, delta_n * d."""
        n = np.arange(self.n_antennas)
        return (2 * n - self.n_antennas + 1) / 2 * self.element_spacing


class UserLocation(BaseModel):
    model_config = ConfigDict(frozen=True)

    spatial_angle: float = Field(..., ge=-1.0, le=1.0, allow_inf_nan=False)
    range: float = Field(..., gt=0, allow_inf_nan=False, description="meters")


class NlosPath(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    gain: complex
    spatial_angle: float = Field(..., ge=-1.0, le=1.0)
    range: float = Field(..., gt=0)


class ChannelRealization(BaseModel):
    """Channel row h^H; the noiseless received amplitude for beam w is vector @ w."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    vector: np.ndarray
    los_gain: complex
    location: UserLocation
    rician_factor_db: float
    ref_gain_db: float
    nlos_paths: List[NlosPath] = Field(default_factory=list)

    def scaled(self, factor: float) -> "ChannelRealization":
        """Return the same geometry with every path gain multiplied by factor."""
        return self.model_copy(update={
            "vector": self.vector * factor,
            "los_gain": self.los_gain * factor,
            "nlos_paths": [p.model_copy(update={"gain": p.gain * factor}) for p in self.nlos_paths],
        })


class Codebook(BaseModel):
    """
    Ordered beamformer set. Row m of `vectors` is codeword m, labelled by
    `angles[m]` and `ranges[m]` (NaN for angle-only DFT codewords).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: CodebookKind
    n_antennas: int = Field(..., ge=2)
    n_ranges: int = Field(default=1, ge=1)
    vectors: np.ndarray
    angles: np.ndarray
    ranges: np.ndarray

    @model_validator(mode="after")
    def _check_shapes(self) -> "Codebook":
        size = self.angles.shape[0]
        if self.vectors.shape != (size, self.n_antennas):
            raise ValueError(
                f"vectors must have shape ({size}, {self.n_antennas}), got {self.vectors.shape}"
            )
        if self.ranges.shape != (size,):
            raise ValueError("ranges must align with angles")
        for arr in (self.vectors, self.angles, self.ranges):
            arr.setflags(write=False)
        return self

    @property
    def size(self) -> int:
        return int(self.angles.shape[0])

    def range_label(self, index: int) -> Optional[float]:
        value = float(self.ranges[index])
        return None if math.isnan(value) else value

    def subset(self, indices: List[int]) -> "Codebook":
        idx = np.asarray(indices, dtype=int)
        return Codebook(
            kind=self.kind,
            n_antennas=self.n_antennas,
            n_ranges=self.n_ranges,
            vectors=self.vectors[idx].copy(),
            angles=self.angles[idx].copy(),
            ranges=self.ranges[idx].copy(),
        )


class PolarSamplingParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    beta_delta: float = Field(default=1.4, gt=0, allow_inf_nan=False)
    n_ranges: int = Field(default=5, ge=1, description="Range samples S per angle")

    def alpha_delta(self, cfg: ArrayConfig) -> float:
        """Range scale alpha = N^2 d^2 / (2 lambda beta^2) in meters."""
        d = cfg.element_spacing
        return cfg.n_antennas ** 2 * d ** 2 / (2 * cfg.wavelength * self.beta_delta ** 2)


class MuA(BaseModel):
    model_config = ConfigDict(frozen=True)

    mu: float = Field(..., gt=0, allow_inf_nan=False)
    a: float = Field(..., allow_inf_nan=False)


class AngularSupport(BaseModel):
    """Contiguous spatial-angle interval whose normalized gain exceeds threshold x reference."""

    model_config = ConfigDict(frozen=True)

    left: float
    right: float
    reference_angle: float
    reference_gain: float = Field(..., ge=0)
    threshold: float = Field(..., gt=0, lt=1)

    @property
    def width(self) -> float:
        return self.right - self.left

    def contains(self, angle: float) -> bool:
        return self.left <= angle <= self.right


class SurrogateSupport(AngularSupport):
    """Support referenced to the gain at the user angle rather than the scan peak."""


class SweepResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    powers: np.ndarray
    codebook_kind: CodebookKind
    tx_power: float = Field(..., gt=0)
    noise_power: float = Field(..., ge=0)
    seed: Optional[int] = None

    @field_validator("powers")
    @classmethod
    def _non_negative(cls, value: np.ndarray) -> np.ndarray:
        if value.ndim != 1 or np.any(value < 0):
            raise ValueError("powers must be a non-negative 1-D array")
        return value

    def scaled(self, factor: float) -> "SweepResult":
        return self.model_copy(update={"powers": self.powers * factor})


class SupportIndexSet(BaseModel):
    model_config = ConfigDict(frozen=True)

    indices: List[int] = Field(..., min_length=1)

    @field_validator("indices")
    @classmethod
    def _sorted_unique(cls, value: List[int]) -> List[int]:
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("support indices must be strictly increasing")
        return value

    @property
    def median_index(self) -> int:
        return int(math.ceil(float(np.median(self.indices))))

    @property
    def is_single(self) -> bool:
        return len(self.indices) == 1


class Candidate(BaseModel):
    model_config = ConfigDict(frozen=True)

    spatial_angle: float
    range: Optional[float] = None
    selection_power: Optional[float] = None


class EstimationReport(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    scheme: Scheme
    label: str
    theta_hat: float
    r_hat: Optional[float] = None
    candidates: List[Candidate] = Field(default_factory=list)
    n_training_symbols: int = Field(..., ge=0)
    field_region: FieldRegion = FieldRegion.NEAR
    support: Optional[List[int]] = None
    seed: Optional[int] = None
    beam: np.ndarray = Field(..., exclude=True)

    def to_json_dict(self) -> dict:
        return self.model_dump(mode="json")


class SchemeSpec(BaseModel):
    """A scheme plus its optional candidate count, written "prmse-je" or "prmse-je:3"."""

    model_config = ConfigDict(frozen=True)

    scheme: Scheme
    k: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="before")
    @classmethod
    def _parse_label(cls, data):
        if isinstance(data, str):
            name, _, k = data.partition(":")
            return {"scheme": name.strip(), "k": int(k) if k else None}
        return data

    @property
    def label(self) -> str:
        return self.scheme.value if self.k is None else f"{self.scheme.value}:{self.k}"

    def candidates(self, default_k: int) -> int:
        return self.k if self.k is not None else default_k


class ExperimentSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    array: ArrayConfig = Field(default_factory=ArrayConfig)
    schemes: List[SchemeSpec] = Field(..., min_length=1)
    sweep_variable: SweepVariable
    sweep_values: List[float] = Field(..., min_length=1)
    n_trials: int = Field(..., ge=1)

    user_angle: Optional[float] = Field(
        default=None, ge=-1.0, le=1.0, description="Fixed user angle; uniform on [-1, 1] when None"
    )
    user_angle_max: float = Field(
        default=1.0, gt=0, le=1.0, description="Random user angles are drawn from [-max, max]"
    )
    range_mode: RangeMode = RangeMode.FIXED
    user_range_m: Optional[float] = Field(default=12.0, gt=0)
    user_range_min_m: Optional[float] = Field(default=None, gt=0)
    user_range_max_m: Optional[float] = Field(default=None, gt=0)

    n_candidates: int = Field(default=3, ge=1, description="Middle-K candidate count")
    polar: PolarSamplingParams = Field(default_factory=PolarSamplingParams)
    tx_power_dbm: float = 30.0
    noise_dbm: float = -70.0
    ref_gain_db: float = -62.0
    rician_db: float = Field(default=30.0, allow_inf_nan=False)
    n_nlos: int = Field(default=2, ge=0)
    t_total: int = Field(default=2000, ge=1, description="Symbols per frame")
    power_threshold: float = Field(default=0.5, gt=0, lt=1)
    range_step_m: float = Field(default=0.05, gt=0)
    far_field_shortcut: bool = False
    master_seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _check_range_distribution(self) -> "ExperimentSpec":
        if self.range_mode == RangeMode.FIXED and self.user_range_m is None:
            raise ValueError("range_mode 'fixed' requires user_range_m")
        if self.range_mode == RangeMode.UNIFORM:
            if self.user_range_min_m is None or self.user_range_max_m is None:
                raise ValueError("range_mode 'uniform' requires user_range_min_m and user_range_max_m")
            if self.user_range_min_m > self.user_range_max_m:
                raise ValueError("user_range_min_m must not exceed user_range_max_m")
        if self.sweep_variable == SweepVariable.N_ANTENNAS:
            if any(v < 2 or v != int(v) for v in self.sweep_values):
                raise ValueError("n_antennas sweep values must be integers >= 2")
        return self


class MetricRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    scheme: str
    sweep_variable: SweepVariable
    sweep_value: float
    nmse_angle: float = Field(..., ge=0)
    nmse_range: Optional[float] = Field(default=None, ge=0)
    mean_rate: float
    mean_eff_rate: float
    rate_ci: float = Field(default=0.0, ge=0)
    eff_rate_ci: float = Field(default=0.0, ge=0)
    nmse_angle_ci: float = Field(default=0.0, ge=0)
    nmse_range_ci: Optional[float] = None
    n_training_symbols: int = Field(..., ge=0)
    n_trials_effective: int = Field(..., ge=0)
