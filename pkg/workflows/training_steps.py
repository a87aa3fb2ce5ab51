"""
Building blocks of the beam-training pipelines: noisy sweeps, support
extraction, on-grid angle estimation, middle-K candidate selection and the
two range estimators (boundary-width inversion and power-ratio MSE search).
"""

import logging
import math
from typing import List, Optional

import numpy as np

from models.errors import DegenerateSupportError
from models.schemas import (
    ArrayConfig, ChannelRealization, Codebook, FieldRegion, SupportIndexSet, SweepResult
)
from tools.array_model import near_steering_matrix, received_powers
from tools.beam_pattern import MAIN_LOBE_GAP_BINS, main_lobe_span
from tools.codebooks import build_dft_codebook
from tools.fresnel_kernel import solve_mu0

logger = logging.getLogger(__name__)


def beam_sweep(
    channel: ChannelRealization,
    codebook: Codebook,
    tx_power: float,
    noise_power: float,
    rng: np.random.Generator,
    seed: Optional[int] = None
) -> SweepResult:
    """One training symbol per codeword, in codebook order."""
    powers = received_powers(channel, codebook.vectors, tx_power, noise_power, rng)
    return SweepResult(
        powers=powers,
        codebook_kind=codebook.kind,
        tx_power=tx_power,
        noise_power=noise_power,
        seed=seed,
    )


def extract_support(
    sweep: SweepResult,
    power_threshold: float = 0.5,
    max_gap: int = MAIN_LOBE_GAP_BINS
) -> SupportIndexSet:
    """
    Every codeword from the first to the last one with p > threshold * max p
    in the main lobe around the strongest codeword. Ripple dips inside that
    span are kept; strong codewords past a longer gap are dropped as strays.
    """
    powers = sweep.powers
    peak = int(np.argmax(powers))
    lo, hi = main_lobe_span(powers > power_threshold * powers[peak], peak, max_gap)
    return SupportIndexSet(indices=list(range(lo, hi + 1)))


def estimate_angle(support: SupportIndexSet, codebook: Codebook) -> float:
    return float(codebook.angles[support.median_index])


def classify_field_region(support: SupportIndexSet) -> FieldRegion:
    """A single strong DFT codeword means no energy spread, i.e. a far-field user."""
    return FieldRegion.FAR if support.is_single else FieldRegion.NEAR


def middle_k_indices(support: SupportIndexSet, k: int, n_codewords: int) -> List[int]:
    """
    n_bar, n_bar-1, n_bar+1, n_bar-2, ... skipping indices outside the
    codebook, until k indices are collected.
    """
    if k < 1:
        raise ValueError("K must be >= 1")
    center = support.median_index
    picked = [center]
    offset = 1
    target = min(k, n_codewords)
    while len(picked) < target:
        for idx in (center - offset, center + offset):
            if 0 <= idx < n_codewords and len(picked) < target:
                picked.append(idx)
        offset += 1
    return picked


def middle_k_candidates(support: SupportIndexSet, codebook: Codebook, k: int) -> List[float]:
    return [float(codebook.angles[i]) for i in middle_k_indices(support, k, codebook.size)]


def _power_ratios(sweep: SweepResult, ref_index: int) -> np.ndarray:
    ref = sweep.powers[ref_index]
    if not ref > 0.0:
        raise DegenerateSupportError(f"reference codeword {ref_index} received zero power")
    return sweep.powers / ref


def find_boundary_index(
    sweep: SweepResult,
    ref_index: int,
    threshold: float = 0.5,
    max_gap: int = MAIN_LOBE_GAP_BINS
) -> int:
    """
    Codeword on the surrogate-support boundary whose ratio p_m / p_ref is
    closest to threshold. On each side of ref_index the outermost main-lobe
    codeword above threshold and the first one past it are candidates. The
    right side wins ties.
    """
    eta = _power_ratios(sweep, ref_index)
    size = eta.size
    lo, hi = main_lobe_span(eta > threshold, ref_index, max_gap)
    candidates = []
    if hi + 1 < size:
        candidates.append(hi + 1)
        if hi != ref_index:
            candidates.append(hi)
    if lo > 0:
        candidates.append(lo - 1)
        if lo != ref_index:
            candidates.append(lo)

    if not candidates:
        raise DegenerateSupportError(
            f"no codeword falls below ratio {threshold} on either side of index {ref_index}"
        )
    best = candidates[0]
    for idx in candidates[1:]:
        if abs(eta[idx] - threshold) < abs(eta[best] - threshold):
            best = idx
    return best


def _nearest_neighbour(ref_index: int, size: int) -> int:
    return ref_index + 1 if ref_index + 1 < size else ref_index - 1


def _clamp_range(cfg: ArrayConfig, r: float) -> float:
    return float(min(max(r, cfg.fresnel_dist), cfg.rayleigh_dist))


def asw_je_range(
    sweep: SweepResult,
    support: SupportIndexSet,
    theta_hat: float,
    cfg: ArrayConfig,
    mu_grid: np.ndarray,
    ref_index: Optional[int] = None,
    threshold: float = 0.5
) -> float:
    """
    Range from the surrogate-support boundary: the boundary codeword m fixes
    a = theta_hat - theta_m and the observed ratio eta_m, mu0 solves
    L(mu, a) = eta_m on the grid, and r = mu0^2 d (1 - theta_hat^2).
    """
    ref = support.median_index if ref_index is None else ref_index
    angles = build_dft_codebook(cfg).angles
    try:
        m = find_boundary_index(sweep, ref, threshold)
    except DegenerateSupportError as exc:
        m = _nearest_neighbour(ref, sweep.powers.size)
        logger.warning(f"{exc}; using neighbour codeword {m}")

    eta = float(_power_ratios(sweep, ref)[m])
    eta = min(max(eta, 1e-12), 1.0 - 1e-12)
    a = theta_hat - float(angles[m])
    solution = solve_mu0(a, eta, cfg.n_antennas, mu_grid)
    r_hat = solution.value ** 2 * cfg.element_spacing * (1.0 - theta_hat ** 2)
    logger.debug(
        f"ASW-JE boundary m={m}, eta={eta:.4f}, a={a:.5f}, "
        f"mu0={solution.value:.3f} (residual {solution.residual:.2e}), r={r_hat:.3f} m"
    )
    return _clamp_range(cfg, r_hat)


def range_search_grid(cfg: ArrayConfig, step: float = 0.05) -> np.ndarray:
    """{Z_Fre, Z_Fre + step, ...} closed at Z_Rayl."""
    if step <= 0:
        raise ValueError("range step must be positive")
    grid = np.arange(cfg.fresnel_dist, cfg.rayleigh_dist, step)
    if grid[-1] < cfg.rayleigh_dist:
        grid = np.append(grid, cfg.rayleigh_dist)
    return grid


def _fit_members(support: SupportIndexSet, ref_index: int, size: int) -> List[int]:
    """Support codewords, widened to the DFT neighbours of the strong one when it stands alone."""
    if not support.is_single:
        return list(support.indices)
    center = support.indices[0]
    around = {center - 1, center, center + 1, ref_index}
    return sorted(idx for idx in around if 0 <= idx < size)


def prmse_objective(
    sweep: SweepResult,
    support: SupportIndexSet,
    theta_hat: float,
    cfg: ArrayConfig,
    r_grid: np.ndarray,
    ref_index: Optional[int] = None
) -> np.ndarray:
    """
    Sum over n in the support of (eta_n - g_n(r))^2 for every r in r_grid,
    where g_n(r) = |b^H(theta_hat, r) a_n|^2 / |b^H(theta_hat, r) a_ref|^2. A
    single-codeword support is fitted over that codeword and its neighbours.
    """
    ref = support.median_index if ref_index is None else ref_index
    eta = _power_ratios(sweep, ref)
    members = _fit_members(support, ref, eta.size)
    steering = near_steering_matrix(cfg, theta_hat, np.asarray(r_grid, dtype=float))
    dft = build_dft_codebook(cfg).vectors[members + [ref]]
    gains = np.abs(np.conj(steering) @ dft.T) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        model = gains[:, :-1] / gains[:, -1:]
    residual = (eta[members][np.newaxis, :] - model) ** 2
    objective = residual.sum(axis=1)
    return np.where(np.isfinite(objective), objective, np.inf)


def prmse_je_range(
    sweep: SweepResult,
    support: SupportIndexSet,
    theta_hat: float,
    cfg: ArrayConfig,
    r_grid: np.ndarray,
    ref_index: Optional[int] = None
) -> float:
    """Grid range minimizing the power-ratio MSE; the smallest range wins ties."""
    objective = prmse_objective(sweep, support, theta_hat, cfg, r_grid, ref_index)
    best = int(np.argmin(objective))
    if not math.isfinite(objective[best]):
        raise DegenerateSupportError("power-ratio model is undefined on the whole range grid")
    return _clamp_range(cfg, float(r_grid[best]))
