"""
Array geometry, near/far-field steering vectors, Rician channel synthesis
and received-signal simulation for a uniform linear array.

All powers are linear (watts); dB conversions happen at the boundaries.
"""

import logging
import math
from typing import Optional

import numpy as np

from models.schemas import ArrayConfig, ChannelRealization, NlosPath, UserLocation

logger = logging.getLogger(__name__)


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def dbm_to_watts(value_dbm: float) -> float:
    return 10.0 ** ((value_dbm - 30.0) / 10.0)


def _check_finite(*values: float) -> None:
    if not all(math.isfinite(v) for v in values):
        raise ValueError(f"non-finite angle/range: {values}")


def _path_differences(cfg: ArrayConfig, theta: float, ranges: np.ndarray) -> np.ndarray:
    """
    r^(n) - r for every (range, antenna) pair, shape (len(ranges), N).

    Uses (delta^2 d^2 - 2 r theta delta d) / (r^(n) + r) so the difference
    keeps full precision at ranges far beyond the aperture.
    """
    offsets = cfg.element_offsets()[np.newaxis, :]
    r = np.asarray(ranges, dtype=float)[:, np.newaxis]
    numer = offsets ** 2 - 2.0 * r * theta * offsets
    dist = np.sqrt(r ** 2 + numer)
    return numer / (dist + r)


def near_steering_matrix(cfg: ArrayConfig, theta: float, ranges: np.ndarray) -> np.ndarray:
    """Rows are near-field beamformers b(theta, r) for each r in ranges."""
    _check_finite(theta)
    if not -1.0 <= theta <= 1.0:
        raise ValueError(f"spatial angle {theta} outside [-1, 1]")
    ranges = np.atleast_1d(np.asarray(ranges, dtype=float))
    if np.any(~np.isfinite(ranges)) or np.any(ranges <= 0):
        raise ValueError("ranges must be finite and positive")
    phase = (2.0 * np.pi / cfg.wavelength) * _path_differences(cfg, theta, ranges)
    # b^H carries exp(-j phase); the beamformer itself is its conjugate
    return np.exp(1j * phase) / math.sqrt(cfg.n_antennas)


def near_steering(cfg: ArrayConfig, loc: UserLocation) -> np.ndarray:
    """
    Near-field beamformer b(theta_u, r_u).

    Its conjugate b^H is the channel steering row whose element n carries
    phase -(2 pi / lambda)(r^(n) - r_u), so np.vdot(b, w) == b^H w.
    """
    _check_finite(loc.spatial_angle, loc.range)
    return near_steering_matrix(cfg, loc.spatial_angle, np.array([loc.range]))[0]


def far_steering_matrix(cfg: ArrayConfig, angles: np.ndarray) -> np.ndarray:
    """Rows are far-field (DFT) beamformers a(angle)."""
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    if np.any(~np.isfinite(angles)) or np.any(np.abs(angles) > 1.0):
        raise ValueError("far-field angles must lie in [-1, 1]")
    n = np.arange(cfg.n_antennas)[np.newaxis, :]
    return np.exp(-1j * np.pi * n * angles[:, np.newaxis]) / math.sqrt(cfg.n_antennas)


def far_steering(cfg: ArrayConfig, angle: float) -> np.ndarray:
    """Far-field beamformer; element n has phase -pi n angle."""
    return far_steering_matrix(cfg, np.array([angle]))[0]


def los_gain(cfg: ArrayConfig, loc: UserLocation, rician_db: float, ref_gain_db: float) -> complex:
    kappa = db_to_linear(rician_db)
    beta = db_to_linear(ref_gain_db)
    magnitude = math.sqrt(kappa / (kappa + 1.0)) * math.sqrt(beta) / loc.range
    return complex(magnitude * np.exp(-2j * np.pi * loc.range / cfg.wavelength))


def synthesize_channel(
    cfg: ArrayConfig,
    loc: UserLocation,
    rician_db: float,
    ref_gain_db: float,
    n_nlos: int,
    rng: np.random.Generator
) -> ChannelRealization:
    """
    Draw one Rician near-field channel: a deterministic LoS path plus n_nlos
    scatterers with angles on [-1, 1] and ranges on [Z_Fre, Z_Rayl].
    """
    if n_nlos < 0:
        raise ValueError("n_nlos must be non-negative")
    if not math.isfinite(rician_db):
        raise ValueError("rician_db must be finite")

    n = cfg.n_antennas
    h_u = los_gain(cfg, loc, rician_db, ref_gain_db)
    vector = math.sqrt(n) * h_u * np.conj(near_steering(cfg, loc))

    paths = []
    if n_nlos > 0:
        kappa = db_to_linear(rician_db)
        sigma2 = db_to_linear(ref_gain_db) / ((kappa + 1.0) * loc.range ** 2)
        gains = np.sqrt(sigma2 / 2.0) * (rng.standard_normal(n_nlos) + 1j * rng.standard_normal(n_nlos))
        angles = rng.uniform(-1.0, 1.0, n_nlos)
        ranges = rng.uniform(cfg.fresnel_dist, cfg.rayleigh_dist, n_nlos)
        scale = math.sqrt(n / n_nlos)
        for gain, theta, r in zip(gains, angles, ranges):
            path = NlosPath(gain=complex(gain), spatial_angle=float(theta), range=float(r))
            vector = vector + scale * path.gain * np.conj(
                near_steering(cfg, UserLocation(spatial_angle=path.spatial_angle, range=path.range))
            )
            paths.append(path)

    return ChannelRealization(
        vector=vector,
        los_gain=h_u,
        location=loc,
        rician_factor_db=rician_db,
        ref_gain_db=ref_gain_db,
        nlos_paths=paths,
    )


def _awgn(noise_power: float, size: int, rng: np.random.Generator) -> np.ndarray:
    draws = rng.standard_normal((size, 2))
    return math.sqrt(noise_power / 2.0) * (draws[:, 0] + 1j * draws[:, 1])


def received_powers(
    channel: ChannelRealization,
    beams: np.ndarray,
    tx_power: float,
    noise_power: float,
    rng: np.random.Generator
) -> np.ndarray:
    """One training symbol per row of beams, each with a fresh noise sample."""
    if tx_power <= 0:
        raise ValueError("tx_power must be positive")
    if noise_power < 0:
        raise ValueError("noise_power must be non-negative")
    beams = np.atleast_2d(beams)
    amplitude = math.sqrt(tx_power) * (beams @ channel.vector)
    noise = _awgn(noise_power, beams.shape[0], rng)
    return np.abs(amplitude + noise) ** 2


def received_power(
    channel: ChannelRealization,
    beam: np.ndarray,
    tx_power: float,
    noise_power: float,
    rng: np.random.Generator
) -> float:
    """p = |sqrt(P) h^H w + z|^2 with z ~ CN(0, noise_power)."""
    return float(received_powers(channel, beam[np.newaxis, :], tx_power, noise_power, rng)[0])


def beamforming_gain(channel: ChannelRealization, beam: np.ndarray) -> float:
    """|h^H v|^2"""
    return float(np.abs(channel.vector @ beam) ** 2)


def achievable_rate(
    channel: ChannelRealization,
    beam: np.ndarray,
    tx_power: float,
    noise_power: float
) -> float:
    """R = log2(1 + P |h^H v|^2 / sigma^2) in bps/Hz."""
    if noise_power <= 0:
        raise ValueError("achievable rate needs a positive noise power")
    return float(np.log2(1.0 + tx_power * beamforming_gain(channel, beam) / noise_power))


def reference_snr(
    cfg: ArrayConfig,
    tx_power: float,
    noise_power: float,
    ref_gain_db: float,
    user_range: float
) -> float:
    """Matched-beam receive SNR P beta N / (r^2 sigma^2), linear."""
    return tx_power * db_to_linear(ref_gain_db) * cfg.n_antennas / (user_range ** 2 * noise_power)


def noise_power_for_snr(
    cfg: ArrayConfig,
    tx_power: float,
    snr_db: float,
    ref_gain_db: float,
    user_range: float
) -> float:
    """Noise power that makes reference_snr equal snr_db."""
    return tx_power * db_to_linear(ref_gain_db) * cfg.n_antennas / (user_range ** 2 * db_to_linear(snr_db))


def is_unit_modulus(beam: np.ndarray, n_antennas: Optional[int] = None, atol: float = 1e-12) -> bool:
    n = n_antennas or beam.shape[-1]
    return bool(np.allclose(np.abs(beam), 1.0 / math.sqrt(n), rtol=0.0, atol=atol))
