"""
End-to-end beam-training schemes. Each run consumes one channel realization
and a random stream, and returns an EstimationReport holding the estimate,
the candidates it verified, the data beam and the training overhead.
"""

import logging
from typing import Callable, Dict, Optional

import numpy as np

from models.errors import DegenerateSupportError
from models.schemas import (
    ArrayConfig, Candidate, ChannelRealization, EstimationReport, FieldRegion,
    PolarSamplingParams, Scheme, SchemeSpec
)
from tools.array_model import near_steering, near_steering_matrix, received_powers
from tools.codebooks import build_dft_codebook, build_polar_codebook, polar_index, training_overhead
from tools.fresnel_kernel import mu_search_grid
from workflows.training_steps import (
    asw_je_range, beam_sweep, classify_field_region, estimate_angle, extract_support,
    middle_k_indices, prmse_je_range, range_search_grid
)

logger = logging.getLogger(__name__)


class BeamTrainer:
    """
    Runs every training scheme against a shared array configuration. The
    codebooks and search grids are built once and reused across trials.
    """

    def __init__(
        self,
        cfg: ArrayConfig,
        tx_power: float,
        n_candidates: int = 3,
        polar: Optional[PolarSamplingParams] = None,
        power_threshold: float = 0.5,
        range_step: float = 0.05,
        far_field_shortcut: bool = False
    ):
        if tx_power <= 0:
            raise ValueError("tx_power must be positive")
        if n_candidates < 1:
            raise ValueError("n_candidates must be >= 1")
        self.cfg = cfg
        self.tx_power = tx_power
        self.n_candidates = n_candidates
        self.polar = polar or PolarSamplingParams()
        self.power_threshold = power_threshold
        self.far_field_shortcut = far_field_shortcut

        self.dft_codebook = build_dft_codebook(cfg)
        self._polar_codebook = None
        self.mu_grid = mu_search_grid(cfg, range_step)
        self.r_grid = range_search_grid(cfg, range_step)

    @property
    def polar_codebook(self):
        if self._polar_codebook is None:
            self._polar_codebook = build_polar_codebook(self.cfg, self.polar)
        return self._polar_codebook

    def _clamp(self, r: Optional[float]) -> Optional[float]:
        if r is None:
            return None
        return float(min(max(r, self.cfg.fresnel_dist), self.cfg.rayleigh_dist))

    def _k(self, k: Optional[int]) -> int:
        return self.n_candidates if k is None else k

    def _run_joint(
        self,
        scheme: Scheme,
        channel: ChannelRealization,
        noise_power: float,
        rng: np.random.Generator,
        k: Optional[int],
        estimator: Callable[..., float]
    ) -> EstimationReport:
        k = self._k(k)
        sweep = beam_sweep(channel, self.dft_codebook, self.tx_power, noise_power, rng)
        support = extract_support(sweep, self.power_threshold)
        region = classify_field_region(support)
        indices = middle_k_indices(support, k, self.dft_codebook.size)
        logger.debug(
            f"{scheme.value}: support {support.indices[0]}..{support.indices[-1]}, "
            f"theta_bar={estimate_angle(support, self.dft_codebook):.5f}, region={region.value}"
        )

        estimates = []
        for idx in indices:
            theta_k = float(self.dft_codebook.angles[idx])
            if region == FieldRegion.FAR and self.far_field_shortcut:
                estimates.append(self.cfg.rayleigh_dist)
                continue
            try:
                estimates.append(estimator(sweep, support, theta_k, idx))
            except DegenerateSupportError as exc:
                logger.warning(f"{scheme.value}: candidate {idx} unusable ({exc}); assuming far field")
                estimates.append(self.cfg.rayleigh_dist)

        beams = np.vstack([
            near_steering_matrix(self.cfg, float(self.dft_codebook.angles[idx]), np.array([r]))[0]
            for idx, r in zip(indices, estimates)
        ])
        verification = received_powers(channel, beams, self.tx_power, noise_power, rng)
        best = int(np.argmax(verification))

        candidates = [
            Candidate(
                spatial_angle=float(self.dft_codebook.angles[idx]),
                range=float(r),
                selection_power=float(p),
            )
            for idx, r, p in zip(indices, estimates, verification)
        ]
        if not self.far_field_shortcut:
            # region follows the range estimate
            at_rayleigh = candidates[best].range >= self.cfg.rayleigh_dist
            region = FieldRegion.FAR if at_rayleigh else FieldRegion.NEAR
        return EstimationReport(
            scheme=scheme,
            label=scheme.value,
            theta_hat=candidates[best].spatial_angle,
            r_hat=candidates[best].range,
            candidates=candidates,
            n_training_symbols=training_overhead(scheme, self.cfg.n_antennas, k=k),
            field_region=region,
            support=support.indices,
            beam=beams[best],
        )

    def run_asw(self, channel: ChannelRealization, noise_power: float, rng: np.random.Generator,
                k: Optional[int] = None) -> EstimationReport:
        """DFT sweep, boundary-width range inversion per candidate, K verification symbols."""
        def estimator(sweep, support, theta, idx):
            return asw_je_range(sweep, support, theta, self.cfg, self.mu_grid,
                                ref_index=idx, threshold=self.power_threshold)

        return self._run_joint(Scheme.ASW_JE, channel, noise_power, rng, k, estimator)

    def run_prmse(self, channel: ChannelRealization, noise_power: float, rng: np.random.Generator,
                  k: Optional[int] = None) -> EstimationReport:
        """DFT sweep, power-ratio MSE range search per candidate, K verification symbols."""
        def estimator(sweep, support, theta, idx):
            return prmse_je_range(sweep, support, theta, self.cfg, self.r_grid, ref_index=idx)

        return self._run_joint(Scheme.PRMSE_JE, channel, noise_power, rng, k, estimator)

    def run_exhaustive(self, channel: ChannelRealization, noise_power: float,
                       rng: np.random.Generator, k: Optional[int] = None) -> EstimationReport:
        codebook = self.polar_codebook
        sweep = beam_sweep(channel, codebook, self.tx_power, noise_power, rng)
        best = int(np.argmax(sweep.powers))
        theta = float(codebook.angles[best])
        return EstimationReport(
            scheme=Scheme.EXHAUSTIVE,
            label=Scheme.EXHAUSTIVE.value,
            theta_hat=theta,
            r_hat=self._clamp(codebook.range_label(best)),
            candidates=[Candidate(spatial_angle=theta, range=codebook.range_label(best),
                                  selection_power=float(sweep.powers[best]))],
            n_training_symbols=training_overhead(
                Scheme.EXHAUSTIVE, self.cfg.n_antennas, s=self.polar.n_ranges
            ),
            beam=codebook.vectors[best],
        )

    def run_twophase(self, channel: ChannelRealization, noise_power: float,
                     rng: np.random.Generator, k: Optional[int] = None) -> EstimationReport:
        """Angle candidates from a DFT sweep, then a polar sweep over their S range samples."""
        k = self._k(k)
        s = self.polar.n_ranges
        sweep = beam_sweep(channel, self.dft_codebook, self.tx_power, noise_power, rng)
        support = extract_support(sweep, self.power_threshold)
        angle_indices = middle_k_indices(support, k, self.dft_codebook.size)

        rows = [polar_index(n, j, s) for n in angle_indices for j in range(s)]
        sub = self.polar_codebook.subset(rows)
        second = beam_sweep(channel, sub, self.tx_power, noise_power, rng)
        best = int(np.argmax(second.powers))

        candidates = [
            Candidate(spatial_angle=float(sub.angles[i]), range=sub.range_label(i),
                      selection_power=float(second.powers[i]))
            for i in range(sub.size)
        ]
        return EstimationReport(
            scheme=Scheme.TWO_PHASE,
            label=Scheme.TWO_PHASE.value,
            theta_hat=float(sub.angles[best]),
            r_hat=self._clamp(sub.range_label(best)),
            candidates=candidates,
            n_training_symbols=training_overhead(Scheme.TWO_PHASE, self.cfg.n_antennas, k=k, s=s),
            support=support.indices,
            beam=sub.vectors[best],
        )

    def run_farfield(self, channel: ChannelRealization, noise_power: float,
                     rng: np.random.Generator, k: Optional[int] = None) -> EstimationReport:
        sweep = beam_sweep(channel, self.dft_codebook, self.tx_power, noise_power, rng)
        best = int(np.argmax(sweep.powers))
        theta = float(self.dft_codebook.angles[best])
        return EstimationReport(
            scheme=Scheme.FAR_FIELD,
            label=Scheme.FAR_FIELD.value,
            theta_hat=theta,
            r_hat=None,
            candidates=[Candidate(spatial_angle=theta, selection_power=float(sweep.powers[best]))],
            n_training_symbols=training_overhead(Scheme.FAR_FIELD, self.cfg.n_antennas),
            field_region=FieldRegion.FAR,
            beam=self.dft_codebook.vectors[best],
        )

    def run_perfect_csi(self, channel: ChannelRealization, noise_power: float = 0.0,
                        rng: Optional[np.random.Generator] = None,
                        k: Optional[int] = None) -> EstimationReport:
        """Genie benchmark: beam matched to the true LoS location, no training."""
        loc = channel.location
        return EstimationReport(
            scheme=Scheme.PERFECT_CSI,
            label=Scheme.PERFECT_CSI.value,
            theta_hat=loc.spatial_angle,
            r_hat=loc.range,
            candidates=[Candidate(spatial_angle=loc.spatial_angle, range=loc.range)],
            n_training_symbols=0,
            beam=near_steering(self.cfg, loc),
        )

    def run(self, spec: SchemeSpec, channel: ChannelRealization, noise_power: float,
            rng: np.random.Generator) -> EstimationReport:
        dispatch: Dict[Scheme, Callable[..., EstimationReport]] = {
            Scheme.ASW_JE: self.run_asw,
            Scheme.PRMSE_JE: self.run_prmse,
            Scheme.EXHAUSTIVE: self.run_exhaustive,
            Scheme.TWO_PHASE: self.run_twophase,
            Scheme.FAR_FIELD: self.run_farfield,
            Scheme.PERFECT_CSI: self.run_perfect_csi,
        }
        report = dispatch[spec.scheme](channel, noise_power, rng, k=spec.k)
        return report.model_copy(update={"label": spec.label})


def run_scheme_asw(channel: ChannelRealization, cfg: ArrayConfig, k: int, noise_power: float,
                   rng: np.random.Generator, tx_power: float = 1.0) -> EstimationReport:
    return BeamTrainer(cfg, tx_power, n_candidates=k).run_asw(channel, noise_power, rng)


def run_scheme_prmse(channel: ChannelRealization, cfg: ArrayConfig, k: int, noise_power: float,
                     rng: np.random.Generator, tx_power: float = 1.0) -> EstimationReport:
    return BeamTrainer(cfg, tx_power, n_candidates=k).run_prmse(channel, noise_power, rng)


def run_scheme_exhaustive(channel: ChannelRealization, cfg: ArrayConfig,
                          polar: PolarSamplingParams, noise_power: float,
                          rng: np.random.Generator, tx_power: float = 1.0) -> EstimationReport:
    return BeamTrainer(cfg, tx_power, polar=polar).run_exhaustive(channel, noise_power, rng)


def run_scheme_twophase(channel: ChannelRealization, cfg: ArrayConfig, k: int, s: int,
                        noise_power: float, rng: np.random.Generator,
                        tx_power: float = 1.0) -> EstimationReport:
    polar = PolarSamplingParams(n_ranges=s)
    return BeamTrainer(cfg, tx_power, n_candidates=k, polar=polar).run_twophase(channel, noise_power, rng)


def run_scheme_farfield(channel: ChannelRealization, cfg: ArrayConfig, noise_power: float,
                        rng: np.random.Generator, tx_power: float = 1.0) -> EstimationReport:
    return BeamTrainer(cfg, tx_power).run_farfield(channel, noise_power, rng)


def run_scheme_perfect_csi(channel: ChannelRealization, cfg: ArrayConfig) -> EstimationReport:
    return BeamTrainer(cfg, 1.0).run_perfect_csi(channel)
