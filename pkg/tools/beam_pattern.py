"""
Noiseless beam-pattern analysis: angular support and surrogate angular
support of a near-field user under far-field (DFT-style) beams, their
widths, and the width-vs-range characterization.
"""

import logging
import math
from typing import List, Sequence, Tuple

import numpy as np
from scipy import optimize

from models.schemas import AngularSupport, ArrayConfig, SurrogateSupport, UserLocation
from tools.array_model import far_steering_matrix, near_steering

logger = logging.getLogger(__name__)

DEFAULT_SCAN_STEP = 1e-4
ENDPOINT_TOL = 1e-7
# Widest below-threshold ripple, in DFT bins, still counted as inside the main lobe
MAIN_LOBE_GAP_BINS = 16


def beam_gains(cfg: ArrayConfig, loc: UserLocation, omegas: np.ndarray) -> np.ndarray:
    """Normalized power gains |b^H(theta_u, r_u) a(omega)|^2 at arbitrary omegas."""
    b = near_steering(cfg, loc)
    return np.abs(far_steering_matrix(cfg, np.atleast_1d(omegas)) @ np.conj(b)) ** 2


def scan_pattern(cfg: ArrayConfig, loc: UserLocation, scan_step: float = DEFAULT_SCAN_STEP) -> Tuple[np.ndarray, np.ndarray]:
    """
    Power gains on the uniform grid omega_k = -1 + k * step over [-1, 1).

    The far-field phase exp(-j pi n omega) makes the scan a zero-padded DFT of
    conj(b), so the whole grid costs one FFT. The step is rounded so that
    2 / step is an even integer.
    """
    if scan_step <= 0:
        raise ValueError("scan_step must be positive")
    size = int(round(2.0 / scan_step))
    size += size % 2
    b = near_steering(cfg, loc)
    spectrum = np.fft.fftshift(np.fft.fft(np.conj(b), n=size))
    omegas = -1.0 + 2.0 * np.arange(size) / size
    gains = np.abs(spectrum) ** 2 / cfg.n_antennas
    return omegas, gains


def _refine_edge(cfg: ArrayConfig, loc: UserLocation, level: float, inside: float, outside: float) -> float:
    def excess(omega: float) -> float:
        return float(beam_gains(cfg, loc, np.array([omega]))[0]) - level

    if excess(inside) <= 0.0 or excess(outside) > 0.0:
        return inside
    return float(optimize.brentq(excess, min(inside, outside), max(inside, outside), xtol=ENDPOINT_TOL))


def main_lobe_span(above: np.ndarray, anchor: int, max_gap: int) -> Tuple[int, int]:
    """
    First and last above-level samples of the lobe holding anchor. Runs of
    up to max_gap below-level samples between above-level ones stay inside
    the lobe; anything past a longer run is a separate lobe.
    """
    members = np.union1d(np.flatnonzero(above), [anchor])
    breaks = np.flatnonzero(np.diff(members) > max_gap + 1)
    starts = np.concatenate(([0], breaks + 1))
    ends = np.concatenate((breaks, [members.size - 1]))
    position = int(np.searchsorted(members, anchor))
    segment = int(np.searchsorted(starts, position, side="right")) - 1
    return int(members[starts[segment]]), int(members[ends[segment]])


def _component(
    cfg: ArrayConfig,
    loc: UserLocation,
    omegas: np.ndarray,
    gains: np.ndarray,
    ref_index: int,
    level: float
) -> Tuple[float, float]:
    """Refined outer edges of the main lobe above level around ref_index."""
    max_gap = int(round(MAIN_LOBE_GAP_BINS * (2.0 / cfg.n_antennas) / (omegas[1] - omegas[0])))
    lo, hi = main_lobe_span(gains > level, ref_index, max_gap)
    left = -1.0 if lo == 0 else _refine_edge(cfg, loc, level, omegas[lo], omegas[lo - 1])
    right = 1.0 if hi == omegas.size - 1 else _refine_edge(cfg, loc, level, omegas[hi], omegas[hi + 1])
    return left, right


def _check_threshold(threshold: float) -> None:
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie strictly between 0 and 1")


def angular_support_continuous(
    cfg: ArrayConfig,
    loc: UserLocation,
    threshold: float = 0.5,
    scan_step: float = DEFAULT_SCAN_STEP
) -> AngularSupport:
    """Main lobe around the scan peak, from its first to its last angle with gain above threshold x peak."""
    _check_threshold(threshold)
    omegas, gains = scan_pattern(cfg, loc, scan_step)
    peak = int(np.argmax(gains))
    left, right = _component(cfg, loc, omegas, gains, peak, threshold * gains[peak])
    return AngularSupport(
        left=left,
        right=right,
        reference_angle=float(omegas[peak]),
        reference_gain=float(gains[peak]),
        threshold=threshold,
    )


def surrogate_support_continuous(
    cfg: ArrayConfig,
    loc: UserLocation,
    threshold: float = 0.5,
    scan_step: float = DEFAULT_SCAN_STEP
) -> SurrogateSupport:
    """As angular_support_continuous, but referenced to the gain g(theta_u, r_u) at the user angle."""
    _check_threshold(threshold)
    omegas, gains = scan_pattern(cfg, loc, scan_step)
    reference = float(beam_gains(cfg, loc, np.array([loc.spatial_angle]))[0])
    anchor = int(np.argmin(np.abs(omegas - loc.spatial_angle)))
    left, right = _component(cfg, loc, omegas, gains, anchor, threshold * reference)
    return SurrogateSupport(
        left=min(left, loc.spatial_angle),
        right=max(right, loc.spatial_angle),
        reference_angle=loc.spatial_angle,
        reference_gain=reference,
        threshold=threshold,
    )


def support_width_curve(
    cfg: ArrayConfig,
    theta: float,
    r_list: Sequence[float],
    threshold: float = 0.5,
    scan_step: float = DEFAULT_SCAN_STEP
) -> List[Tuple[float, float]]:
    """(r, surrogate width) pairs for a fixed user angle."""
    if len(r_list) == 0:
        raise ValueError("r_list is empty")
    limit = cfg.rayleigh_dist
    for r in r_list:
        if not 0.0 < r <= limit * (1.0 + 1e-12):
            raise ValueError(f"range {r} outside (0, {limit:.3f}] m")
    curve = []
    for r in r_list:
        support = surrogate_support_continuous(
            cfg, UserLocation(spatial_angle=theta, range=float(r)), threshold, scan_step
        )
        curve.append((float(r), support.width))
    logger.debug(f"Width curve at theta={theta}: {len(curve)} ranges")
    return curve


def range_insensitive_window(curve: Sequence[Tuple[float, float]], window_m: float) -> Tuple[float, float, float]:
    """
    Window [r, r + window_m] of the width curve with the smallest absolute
    width change; returns (r_start, r_end, change).
    """
    if len(curve) < 2:
        raise ValueError("need at least two curve points")
    ranges = np.array([r for r, _ in curve])
    widths = np.array([w for _, w in curve])
    best = None
    for i, start in enumerate(ranges):
        end = start + window_m
        if end > ranges[-1] + 1e-9:
            break
        j = int(np.argmin(np.abs(ranges - end)))
        if not math.isclose(ranges[j], end, abs_tol=1e-9):
            continue
        change = abs(widths[i] - widths[j])
        if best is None or change < best[2]:
            best = (float(start), float(ranges[j]), float(change))
    if best is None:
        raise ValueError("window is longer than the sampled range span")
    return best
