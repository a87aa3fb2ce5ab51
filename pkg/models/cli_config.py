"""
Flat JSON experiment configuration. Every physical quantity carries its unit
in the key name; unknown keys are rejected.
"""
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from models.schemas import (
    ArrayConfig, ExperimentSpec, PolarSamplingParams, RangeMode, SchemeSpec, SweepVariable
)

DEFAULT_SCHEMES = ["asw-je", "prmse-je", "exhaustive", "two-phase", "far-field", "perfect-csi"]


class CliConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    # Array and link budget
    n_antennas: int = Field(default=256, ge=2)
    freq_ghz: float = Field(default=30.0, gt=0, allow_inf_nan=False)
    spacing_m: Optional[float] = Field(default=None, gt=0)
    tx_power_dbm: float = Field(default=30.0, allow_inf_nan=False)
    noise_dbm: float = Field(default=-70.0, allow_inf_nan=False)
    ref_gain_db: float = Field(default=-62.0, allow_inf_nan=False)
    rician_db: float = Field(default=30.0, allow_inf_nan=False)
    n_nlos: int = Field(default=2, ge=0)

    # Training
    n_candidates: int = Field(default=3, ge=1)
    n_ranges: int = Field(default=5, ge=1)
    beta_delta: float = Field(default=1.4, gt=0)
    power_threshold: float = Field(default=0.5, gt=0, lt=1)
    range_step_m: float = Field(default=0.05, gt=0)
    far_field_shortcut: bool = False
    t_total: int = Field(default=2000, ge=1)

    # Monte Carlo
    schemes: List[str] = Field(default_factory=lambda: list(DEFAULT_SCHEMES), min_length=1)
    sweep_variable: SweepVariable = SweepVariable.SNR
    sweep_values: List[float] = Field(default_factory=lambda: [15.0, 20.0, 25.0, 30.0, 35.0], min_length=1)
    n_trials: int = Field(default=100, ge=1)
    user_angle: Optional[float] = Field(default=None, ge=-1.0, le=1.0)
    user_angle_max: float = Field(default=1.0, gt=0, le=1.0)
    range_mode: RangeMode = RangeMode.FIXED
    user_range_m: Optional[float] = Field(default=12.0, gt=0)
    user_range_min_m: Optional[float] = Field(default=None, gt=0)
    user_range_max_m: Optional[float] = Field(default=None, gt=0)
    seed: int = Field(default=0, ge=0)
    threads: Optional[int] = Field(default=None, ge=1)

    # Beam-pattern figures
    pattern_angles: List[float] = Field(default_factory=lambda: [0.0, 0.5, -0.5])
    pattern_ranges_m: List[float] = Field(
        default_factory=lambda: [8.0, 10.0, 12.0, 15.0, 20.0, 30.0, 50.0, 100.0]
    )
    pattern_scan_step: float = Field(default=1e-4, gt=0, lt=1)
    pattern_mu_offsets: List[float] = Field(default_factory=lambda: [0.1, 0.2])
    pattern_window_m: float = Field(default=5.0, gt=0)

    # Single-shot estimate
    estimate_scheme: str = "prmse-je"
    estimate_angle: float = Field(default=0.00390625, ge=-1.0, le=1.0)
    estimate_range_m: float = Field(default=12.0, gt=0)
    estimate_snr_db: Optional[float] = None
    estimate_noiseless: bool = False

    # Paths
    out_dir: Optional[str] = None
    codebook_cache_dir: Optional[str] = None

    @field_validator("schemes")
    @classmethod
    def _known_schemes(cls, value: List[str]) -> List[str]:
        for entry in value:
            SchemeSpec.model_validate(entry)
        return value

    @field_validator("estimate_scheme")
    @classmethod
    def _known_estimate_scheme(cls, value: str) -> str:
        SchemeSpec.model_validate(value)
        return value

    def canonical_json(self) -> str:
        return self.model_dump_json(indent=2)

    def array(self) -> ArrayConfig:
        return ArrayConfig(
            n_antennas=self.n_antennas,
            carrier_freq=self.freq_ghz * 1e9,
            spacing=self.spacing_m,
        )

    def polar(self) -> PolarSamplingParams:
        return PolarSamplingParams(beta_delta=self.beta_delta, n_ranges=self.n_ranges)

    def experiment_spec(self, seed: Optional[int] = None) -> ExperimentSpec:
        return ExperimentSpec(
            array=self.array(),
            schemes=[SchemeSpec.model_validate(s) for s in self.schemes],
            sweep_variable=self.sweep_variable,
            sweep_values=self.sweep_values,
            n_trials=self.n_trials,
            user_angle=self.user_angle,
            user_angle_max=self.user_angle_max,
            range_mode=self.range_mode,
            user_range_m=self.user_range_m,
            user_range_min_m=self.user_range_min_m,
            user_range_max_m=self.user_range_max_m,
            n_candidates=self.n_candidates,
            polar=self.polar(),
            tx_power_dbm=self.tx_power_dbm,
            noise_dbm=self.noise_dbm,
            ref_gain_db=self.ref_gain_db,
            rician_db=self.rician_db,
            n_nlos=self.n_nlos,
            t_total=self.t_total,
            power_threshold=self.power_threshold,
            range_step_m=self.range_step_m,
            far_field_shortcut=self.far_field_shortcut,
            master_seed=self.seed if seed is None else seed,
        )
