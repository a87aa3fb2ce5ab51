"""
DFT and polar-domain codebooks, plus the training-symbol budget of each scheme.
"""

import logging
from functools import lru_cache
from typing import Optional

import numpy as np

from models.schemas import ArrayConfig, Codebook, CodebookKind, PolarSamplingParams, Scheme
from tools.array_model import far_steering_matrix, near_steering_matrix

logger = logging.getLogger(__name__)


def dft_angles(n_antennas: int) -> np.ndarray:
    """Grid theta_n = (2n - N + 1) / N for n = 0..N-1, spaced 2/N apart."""
    n = np.arange(n_antennas)
    return (2 * n - n_antennas + 1) / n_antennas


def polar_range_labels(cfg: ArrayConfig, params: PolarSamplingParams, theta: float) -> np.ndarray:
    """Ranges r_s = alpha (1 - theta^2) / s for s = 1..S, descending."""
    s = np.arange(1, params.n_ranges + 1)
    return params.alpha_delta(cfg) * (1.0 - theta ** 2) / s


@lru_cache(maxsize=16)
def build_dft_codebook(cfg: ArrayConfig) -> Codebook:
    angles = dft_angles(cfg.n_antennas)
    return Codebook(
        kind=CodebookKind.DFT,
        n_antennas=cfg.n_antennas,
        n_ranges=1,
        vectors=far_steering_matrix(cfg, angles),
        angles=angles,
        ranges=np.full(cfg.n_antennas, np.nan),
    )


@lru_cache(maxsize=8)
def build_polar_codebook(cfg: ArrayConfig, params: Optional[PolarSamplingParams] = None) -> Codebook:
    """
    N*S near-field codewords grouped by ascending angle; within each angle the
    range labels descend (s = 1..S).
    """
    params = params or PolarSamplingParams()
    thetas = dft_angles(cfg.n_antennas)
    blocks = []
    labels = []
    for theta in thetas:
        ranges = polar_range_labels(cfg, params, float(theta))
        blocks.append(near_steering_matrix(cfg, float(theta), ranges))
        labels.append(ranges)

    logger.debug(
        f"Built polar codebook: N={cfg.n_antennas}, S={params.n_ranges}, "
        f"alpha={params.alpha_delta(cfg):.2f} m"
    )
    return Codebook(
        kind=CodebookKind.POLAR,
        n_antennas=cfg.n_antennas,
        n_ranges=params.n_ranges,
        vectors=np.vstack(blocks),
        angles=np.repeat(thetas, params.n_ranges),
        ranges=np.concatenate(labels),
    )


def polar_index(angle_index: int, range_index: int, n_ranges: int) -> int:
    """Row of codeword (theta_n, r_{s,n}) in a polar codebook; range_index is 0-based."""
    return angle_index * n_ranges + range_index


def training_overhead(scheme: Scheme, n_antennas: int, k: int = 1, s: int = 1) -> int:
    """Training symbols spent by a scheme before data transmission."""
    if n_antennas < 1 or k < 1 or s < 1:
        raise ValueError("N, K and S must all be >= 1")
    scheme = Scheme(scheme)
    budgets = {
        Scheme.EXHAUSTIVE: n_antennas * s,
        Scheme.TWO_PHASE: n_antennas + k * s,
        Scheme.ASW_JE: n_antennas + k,
        Scheme.PRMSE_JE: n_antennas + k,
        Scheme.FAR_FIELD: n_antennas,
        Scheme.PERFECT_CSI: 0,
    }
    return budgets[scheme]
