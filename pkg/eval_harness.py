"""
Monte Carlo evaluation harness for the near-field beam-training schemes.
Runs paired trials over a sweep (SNR, user range, Rician factor or antenna
count) and reports angle/range NMSE, achievable rate and effective rate.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from logging_config import log_performance, log_trial_step, trial_tag
from models.errors import InfeasibleExperimentError
from models.schemas import (
    ArrayConfig, ExperimentSpec, MetricRow, RangeMode, Scheme, SweepVariable, UserLocation
)
from tools.array_model import achievable_rate, dbm_to_watts, noise_power_for_snr, synthesize_channel
from tools.codebooks import training_overhead
from workflows.training_schemes import BeamTrainer

logger = logging.getLogger(__name__)

TRIAL_COLUMNS = [
    "scheme", "sweep_variable", "sweep_value", "trial", "theta_true", "r_true",
    "theta_hat", "r_hat", "rate_bps_hz", "eff_rate_bps_hz", "n_train",
]

# Two-sided 95% normal quantile for confidence half-widths.
Z_95 = 1.959963984540054


@dataclass
class TrialRecord:
    """Outcome of one scheme on one channel realization."""
    sweep_index: int
    scheme_index: int
    scheme: str
    sweep_variable: str
    sweep_value: float
    trial: int
    theta_true: float
    r_true: float
    theta_hat: float
    r_hat: Optional[float]
    rate_bps_hz: float
    eff_rate_bps_hz: float
    n_train: int

    def csv_row(self) -> Dict[str, object]:
        row = asdict(self)
        return {column: row[column] for column in TRIAL_COLUMNS}


def _half_width(values: np.ndarray) -> float:
    if values.size < 2:
        return 0.0
    return float(Z_95 * np.std(values, ddof=1) / math.sqrt(values.size))


class MonteCarloHarness:
    """
    Paired Monte Carlo driver. Trial t at sweep point i draws its channel from
    SeedSequence([seed, i, t]); scheme j draws its noise from
    SeedSequence([seed, i, t, j + 1]). Results are stored per trial and
    aggregated in a fixed order, so the thread count never changes the output.
    """

    def __init__(self, spec: ExperimentSpec, threads: int = 1,
                 progress: Optional[Callable[[int], None]] = None):
        if threads < 1:
            raise ValueError("threads must be >= 1")
        self.spec = spec
        self.threads = threads
        self.progress = progress
        self.tx_power = dbm_to_watts(spec.tx_power_dbm)
        self.records: List[TrialRecord] = []
        self._trainers: Dict[int, BeamTrainer] = {}

    # -- setup -------------------------------------------------------------

    def array_for(self, sweep_index: int) -> ArrayConfig:
        if self.spec.sweep_variable == SweepVariable.N_ANTENNAS:
            n = int(self.spec.sweep_values[sweep_index])
            return self.spec.array.model_copy(update={"n_antennas": n})
        return self.spec.array

    def trainer_for(self, sweep_index: int) -> BeamTrainer:
        cfg = self.array_for(sweep_index)
        key = cfg.n_antennas
        if key not in self._trainers:
            self._trainers[key] = BeamTrainer(
                cfg,
                self.tx_power,
                n_candidates=self.spec.n_candidates,
                polar=self.spec.polar,
                power_threshold=self.spec.power_threshold,
                range_step=self.spec.range_step_m,
                far_field_shortcut=self.spec.far_field_shortcut,
            )
        return self._trainers[key]

    def check_feasible(self) -> None:
        """Every scheme must leave at least one data symbol in the frame."""
        for i in range(len(self.spec.sweep_values)):
            cfg = self.array_for(i)
            for scheme in self.spec.schemes:
                overhead = training_overhead(
                    scheme.scheme, cfg.n_antennas,
                    k=scheme.candidates(self.spec.n_candidates), s=self.spec.polar.n_ranges,
                )
                if overhead >= self.spec.t_total:
                    raise InfeasibleExperimentError(
                        f"{scheme.label} needs {overhead} training symbols at N={cfg.n_antennas}, "
                        f"frame holds {self.spec.t_total}"
                    )

    def draw_location(self, cfg: ArrayConfig, sweep_value: float, rng: np.random.Generator) -> UserLocation:
        spec = self.spec
        if spec.user_angle is not None:
            theta = spec.user_angle
        else:
            theta = float(rng.uniform(-spec.user_angle_max, spec.user_angle_max))
        if spec.sweep_variable == SweepVariable.RANGE:
            r = sweep_value
        elif spec.range_mode == RangeMode.UNIFORM:
            r = float(rng.uniform(spec.user_range_min_m, spec.user_range_max_m))
        elif spec.range_mode == RangeMode.FRESNEL:
            r = cfg.fresnel_dist
        else:
            r = spec.user_range_m
        return UserLocation(spatial_angle=theta, range=r)

    # -- trials ------------------------------------------------------------

    def run_trial(self, sweep_index: int, trial: int) -> List[TrialRecord]:
        spec = self.spec
        value = float(spec.sweep_values[sweep_index])
        cfg = self.array_for(sweep_index)
        trainer = self.trainer_for(sweep_index)

        channel_rng = np.random.default_rng(np.random.SeedSequence([spec.master_seed, sweep_index, trial]))
        loc = self.draw_location(cfg, value, channel_rng)
        rician_db = value if spec.sweep_variable == SweepVariable.RICIAN else spec.rician_db
        channel = synthesize_channel(cfg, loc, rician_db, spec.ref_gain_db, spec.n_nlos, channel_rng)

        if spec.sweep_variable == SweepVariable.SNR:
            noise_power = noise_power_for_snr(cfg, self.tx_power, value, spec.ref_gain_db, loc.range)
        else:
            noise_power = dbm_to_watts(spec.noise_dbm)

        records = []
        for scheme_index, scheme in enumerate(spec.schemes):
            rng = np.random.default_rng(
                np.random.SeedSequence([spec.master_seed, sweep_index, trial, scheme_index + 1])
            )
            report = trainer.run(scheme, channel, noise_power, rng)
            rate = achievable_rate(channel, report.beam, self.tx_power, noise_power)
            eff_rate = (1.0 - report.n_training_symbols / spec.t_total) * rate
            log_trial_step("scheme", trial_tag(sweep_index, trial, scheme.label), {
                "theta": f"{loc.spatial_angle:.4f}->{report.theta_hat:.4f}",
                "range": f"{loc.range:.2f}->{report.r_hat}",
                "rate": f"{rate:.3f}",
            })
            records.append(TrialRecord(
                sweep_index=sweep_index,
                scheme_index=scheme_index,
                scheme=scheme.label,
                sweep_variable=spec.sweep_variable.value,
                sweep_value=value,
                trial=trial,
                theta_true=loc.spatial_angle,
                r_true=loc.range,
                theta_hat=report.theta_hat,
                r_hat=report.r_hat,
                rate_bps_hz=rate,
                eff_rate_bps_hz=eff_rate,
                n_train=report.n_training_symbols,
            ))
        return records

    def run(self) -> List[TrialRecord]:
        self.check_feasible()
        spec = self.spec
        units = [(i, t) for i in range(len(spec.sweep_values)) for t in range(spec.n_trials)]
        for i in range(len(spec.sweep_values)):
            trainer = self.trainer_for(i)
            if any(s.scheme in (Scheme.EXHAUSTIVE, Scheme.TWO_PHASE) for s in spec.schemes):
                _ = trainer.polar_codebook

        logger.info(
            f"🚀 Running {len(units)} trials x {len(spec.schemes)} schemes "
            f"({spec.sweep_variable.value} sweep, {self.threads} threads)"
        )
        start = time.perf_counter()
        records: List[TrialRecord] = []
        if self.threads == 1:
            for done, (i, t) in enumerate(units, start=1):
                records.extend(self.run_trial(i, t))
                if self.progress:
                    self.progress(done)
        else:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                futures = [pool.submit(self.run_trial, i, t) for i, t in units]
                for done, future in enumerate(as_completed(futures), start=1):
                    records.extend(future.result())
                    if self.progress:
                        self.progress(done)

        records.sort(key=lambda r: (r.sweep_index, r.scheme_index, r.trial))
        self.records = records
        log_performance("monte_carlo", (time.perf_counter() - start) * 1000.0,
                        details={"trials": len(units), "records": len(records)})
        return records

    # -- results -----------------------------------------------------------

    def metrics(self) -> List[MetricRow]:
        return aggregate(self.records)

    def trials_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.csv_row() for r in self.records], columns=TRIAL_COLUMNS)

    def save_trials_csv(self, path: Path) -> Path:
        return write_csv(self.trials_frame(), path)

    def save_summary_csv(self, path: Path) -> Path:
        return write_csv(metrics_frame(self.metrics()), path)


def aggregate(records: List[TrialRecord]) -> List[MetricRow]:
    """One MetricRow per (sweep point, scheme), computed over stored per-trial values."""
    groups: Dict[tuple, List[TrialRecord]] = {}
    for record in sorted(records, key=lambda r: (r.sweep_index, r.scheme_index, r.trial)):
        groups.setdefault((record.sweep_index, record.scheme_index), []).append(record)

    rows = []
    for (_, _), group in groups.items():
        theta = np.array([r.theta_true for r in group])
        theta_err = (theta - np.array([r.theta_hat for r in group])) ** 2
        angle_scale = float(np.mean(theta ** 2))
        if angle_scale == 0.0:
            logger.warning(f"{group[0].scheme}: all user angles are zero; reporting unnormalized angle MSE")
            angle_scale = 1.0

        nmse_range = None
        nmse_range_ci = None
        if all(r.r_hat is not None for r in group):
            r_true = np.array([r.r_true for r in group])
            range_err = (r_true - np.array([r.r_hat for r in group])) ** 2
            range_scale = float(np.mean(r_true ** 2))
            nmse_range = float(np.mean(range_err)) / range_scale
            nmse_range_ci = _half_width(range_err) / range_scale

        rates = np.array([r.rate_bps_hz for r in group])
        eff_rates = np.array([r.eff_rate_bps_hz for r in group])
        rows.append(MetricRow(
            scheme=group[0].scheme,
            sweep_variable=group[0].sweep_variable,
            sweep_value=group[0].sweep_value,
            nmse_angle=float(np.mean(theta_err)) / angle_scale,
            nmse_range=nmse_range,
            mean_rate=float(np.mean(rates)),
            mean_eff_rate=float(np.mean(eff_rates)),
            rate_ci=_half_width(rates),
            eff_rate_ci=_half_width(eff_rates),
            nmse_angle_ci=_half_width(theta_err) / angle_scale,
            nmse_range_ci=nmse_range_ci,
            n_training_symbols=group[0].n_train,
            n_trials_effective=int(np.sum(np.isfinite(rates))),
        ))
    return rows


def run_experiment(spec: ExperimentSpec, threads: int = 1,
                   progress: Optional[Callable[[int], None]] = None) -> List[MetricRow]:
    harness = MonteCarloHarness(spec, threads=threads, progress=progress)
    harness.run()
    return harness.metrics()


_SUMMARY_METRICS = {
    "nmse_angle": "nmse_angle_ci",
    "nmse_range": "nmse_range_ci",
    "rate": "rate_ci",
    "eff_rate": "eff_rate_ci",
}


def summarize(rows: List[MetricRow]) -> Dict[str, List[Dict[str, object]]]:
    """
    Regroup metric rows into figure-shaped tables keyed "<metric>_vs_<sweep>",
    each entry carrying its 95% half-width. Metrics a scheme does not report
    (range NMSE of the far-field scheme) are left out of that table.
    """
    report: Dict[str, List[Dict[str, object]]] = {}
    for row in rows:
        values = {
            "nmse_angle": row.nmse_angle,
            "nmse_range": row.nmse_range,
            "rate": row.mean_rate,
            "eff_rate": row.mean_eff_rate,
        }
        for metric, ci_field in _SUMMARY_METRICS.items():
            if values[metric] is None:
                continue
            key = f"{metric}_vs_{row.sweep_variable.value}"
            report.setdefault(key, []).append({
                "scheme": row.scheme,
                "sweep_value": row.sweep_value,
                "value": values[metric],
                "ci_half_width": getattr(row, ci_field),
            })
    return report


def metrics_frame(rows: List[MetricRow]) -> pd.DataFrame:
    columns = list(MetricRow.model_fields)
    return pd.DataFrame([row.model_dump(mode="json") for row in rows], columns=columns)


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n", float_format="%.12g")
    return path


def write_summary_groups(report: Dict[str, List[Dict[str, object]]], out_dir: Path) -> List[Path]:
    paths = []
    for key in sorted(report):
        frame = pd.DataFrame(report[key], columns=["scheme", "sweep_value", "value", "ci_half_width"])
        paths.append(write_csv(frame, Path(out_dir) / f"{key}.csv"))
    return paths
