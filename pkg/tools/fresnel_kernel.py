"""
Fresnel integrals, the exact beam power ratio G and its closed-form
approximation L(mu, a), plus the root searches used for range inversion.

L(mu, a) = {[C(a mu + N/2mu) - C(a mu - N/2mu)]^2 + [S(...) - S(...)]^2}
           / (4 [C^2(N/2mu) + S^2(N/2mu)])
"""

import logging
import math
from typing import NamedTuple, Tuple, Union

import numpy as np
from scipy import optimize, special

from models.errors import NoCrossingError, NumericalError
from models.schemas import ArrayConfig, MuA, UserLocation
from tools.array_model import far_steering_matrix, near_steering

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Bracketing resolution for the first downward crossing of L in a.
A0_SCAN_STEP = 1e-4
A0_MAX = 2.0


class GridSolution(NamedTuple):
    value: float
    residual: float


def fresnel_cs(x: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """(C(x), S(x)) with the pi t^2 / 2 kernel."""
    s, c = special.fresnel(x)
    return c, s


def fresnel_c(x: ArrayLike) -> ArrayLike:
    return fresnel_cs(x)[0]


def fresnel_s(x: ArrayLike) -> ArrayLike:
    return fresnel_cs(x)[1]


def mu_from_location(cfg: ArrayConfig, loc: UserLocation) -> float:
    """mu = sqrt(r / (d (1 - theta^2)))"""
    denom = cfg.element_spacing * (1.0 - loc.spatial_angle ** 2)
    if denom <= 0:
        raise ValueError("mu is undefined at endfire (|theta| = 1)")
    return math.sqrt(loc.range / denom)


def range_from_mu(cfg: ArrayConfig, mu: ArrayLike, theta: float) -> ArrayLike:
    return np.asarray(mu) ** 2 * cfg.element_spacing * (1.0 - theta ** 2)


def to_mu_a(cfg: ArrayConfig, loc: UserLocation, phi: float) -> MuA:
    return MuA(mu=mu_from_location(cfg, loc), a=loc.spatial_angle - phi)


def beam_power_ratio_exact(cfg: ArrayConfig, loc: UserLocation, phi: ArrayLike) -> ArrayLike:
    """
    G = |b^H(theta_u, r_u) a(phi)|^2 / |b^H(theta_u, r_u) a(theta_u)|^2 by direct
    summation over the antennas. Accepts a scalar or an array of phi.
    """
    phis = np.atleast_1d(np.asarray(phi, dtype=float))
    b = near_steering(cfg, loc)
    gains = np.abs(far_steering_matrix(cfg, phis) @ np.conj(b)) ** 2
    ref = np.abs(np.vdot(b, far_steering_matrix(cfg, np.array([loc.spatial_angle]))[0])) ** 2
    if ref < 1e-30:
        raise NumericalError(f"reference beam gain {ref:.3e} at theta_u is numerically zero")
    ratio = gains / ref
    return float(ratio[0]) if np.ndim(phi) == 0 else ratio


def beam_power_ratio_approx(mu: ArrayLike, a: ArrayLike, n_antennas: int) -> ArrayLike:
    """Closed-form L(mu, a); broadcasts over mu and a."""
    mu = np.asarray(mu, dtype=float)
    a = np.asarray(a, dtype=float)
    if np.any(mu <= 0):
        raise ValueError("mu must be positive")
    half = n_antennas / (2.0 * mu)
    c_hi, s_hi = fresnel_cs(a * mu + half)
    c_lo, s_lo = fresnel_cs(a * mu - half)
    c_0, s_0 = fresnel_cs(half)
    value = ((c_hi - c_lo) ** 2 + (s_hi - s_lo) ** 2) / (4.0 * (c_0 ** 2 + s_0 ** 2))
    return float(value) if value.ndim == 0 else value


def approx_ratio(mu_a: MuA, n_antennas: int) -> float:
    return beam_power_ratio_approx(mu_a.mu, mu_a.a, n_antennas)


def solve_a0(mu: float, threshold: float, n_antennas: int, a_max: float = A0_MAX) -> float:
    """Smallest a0 > 0 where L(mu, a0) falls to threshold."""
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie strictly between 0 and 1")
    grid = np.arange(A0_SCAN_STEP, a_max + A0_SCAN_STEP / 2, A0_SCAN_STEP)
    values = beam_power_ratio_approx(mu, grid, n_antennas) - threshold
    below = np.flatnonzero(values <= 0.0)
    if below.size == 0:
        raise NoCrossingError(mu, threshold, a_max)
    first = int(below[0])
    if values[first] == 0.0:
        return float(grid[first])
    lo = 0.0 if first == 0 else float(grid[first - 1])
    return float(optimize.brentq(
        lambda a: beam_power_ratio_approx(mu, a, n_antennas) - threshold,
        lo, float(grid[first]), xtol=1e-14, rtol=1e-14,
    ))


def mu_search_grid(cfg: ArrayConfig, max_range_step: float = 0.05) -> np.ndarray:
    """
    mu grid on [sqrt(Z_Fre/d), sqrt(Z_Rayl/d)] whose induced range spacing at
    theta = 0 never exceeds max_range_step.
    """
    d = cfg.element_spacing
    mu_min = math.sqrt(cfg.fresnel_dist / d)
    mu_max = math.sqrt(cfg.rayleigh_dist / d)
    step = max_range_step / (2.0 * mu_max * d)
    count = int(math.ceil((mu_max - mu_min) / step)) + 1
    return np.linspace(mu_min, mu_max, count)


def solve_mu0(a: float, threshold: float, n_antennas: int, mu_grid: np.ndarray) -> GridSolution:
    """Grid point minimizing |L(mu, a) - threshold|; the first (smallest) mu wins ties."""
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie strictly between 0 and 1")
    mu_grid = np.asarray(mu_grid, dtype=float)
    if mu_grid.size == 0:
        raise ValueError("mu_grid is empty")
    residual = np.abs(beam_power_ratio_approx(mu_grid, a, n_antennas) - threshold)
    best = int(np.argmin(residual))
    return GridSolution(value=float(mu_grid[best]), residual=float(residual[best]))


def mu_curve(a: float, n_antennas: int, mu_grid: np.ndarray) -> np.ndarray:
    """Rows (mu, L(mu, a)) for plotting the ratio against mu."""
    mu_grid = np.asarray(mu_grid, dtype=float)
    return np.column_stack([mu_grid, beam_power_ratio_approx(mu_grid, a, n_antennas)])


def approximation_curve(cfg: ArrayConfig, loc: UserLocation, phis: np.ndarray) -> np.ndarray:
    """Rows (phi, G exact, L approx) over the given beam angles."""
    phis = np.asarray(phis, dtype=float)
    exact = beam_power_ratio_exact(cfg, loc, phis)
    approx = beam_power_ratio_approx(mu_from_location(cfg, loc), loc.spatial_angle - phis, cfg.n_antennas)
    return np.column_stack([phis, exact, approx])
