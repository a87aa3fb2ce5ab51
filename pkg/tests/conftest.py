"""
Test configuration and fixtures for unit tests.

This module provides common arrays, locations and channels.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

project_root = Path(__file__).parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

from models.schemas import (  # noqa: E402
    ArrayConfig,
    ExperimentSpec,
    PolarSamplingParams,
    SchemeSpec,
    SweepVariable,
    UserLocation,
)
from tools.array_model import synthesize_channel  # noqa: E402
from tools.codebooks import dft_angles  # noqa: E402


class TestConstants:
    """Constants used in testing."""

    N = 256
    FREQ = 30e9

    # Geometry at N=256, 30 GHz, half-wavelength spacing
    RAYLEIGH_MIN = 320.0
    RAYLEIGH_MAX = 330.0
    ALPHA_DELTA = 41.80
    ALPHA_TOL = 0.01

    # Training overheads at K=3, S=5
    OVERHEAD_PROPOSED = 259
    OVERHEAD_TWO_PHASE = 271
    OVERHEAD_EXHAUSTIVE = 1280

    # Pure line of sight: kappa large enough that the NLoS share vanishes
    LOS_ONLY_RICIAN_DB = 300.0
    REF_GAIN_DB = -62.0

    # DFT grid index 128 sits at 1/256, next to broadside
    ON_GRID_INDEX = 128

    ASW_RELATIVE_TOL = 0.15


class TestDataFactory:
    """Factory for creating test data."""

    @staticmethod
    def create_array(**overrides):
        defaults = {"n_antennas": TestConstants.N, "carrier_freq": TestConstants.FREQ}
        defaults.update(overrides)
        return ArrayConfig(**defaults)

    @staticmethod
    def create_location(**overrides):
        defaults = {"spatial_angle": 0.0, "range": 12.0}
        defaults.update(overrides)
        return UserLocation(**defaults)

    @staticmethod
    def on_grid_angle(cfg=None, index=TestConstants.ON_GRID_INDEX):
        cfg = cfg or TestDataFactory.create_array()
        return float(dft_angles(cfg.n_antennas)[index])

    @staticmethod
    def create_los_channel(cfg=None, loc=None):
        """Noise-free geometry with no scatterers."""
        cfg = cfg or TestDataFactory.create_array()
        loc = loc or TestDataFactory.create_location()
        return synthesize_channel(
            cfg, loc,
            rician_db=TestConstants.LOS_ONLY_RICIAN_DB,
            ref_gain_db=TestConstants.REF_GAIN_DB,
            n_nlos=0,
            rng=np.random.default_rng(0),
        )

    @staticmethod
    def create_rician_channel(cfg=None, loc=None, seed=0, **overrides):
        cfg = cfg or TestDataFactory.create_array()
        loc = loc or TestDataFactory.create_location()
        params = {"rician_db": 30.0, "ref_gain_db": TestConstants.REF_GAIN_DB, "n_nlos": 2}
        params.update(overrides)
        return synthesize_channel(cfg, loc, rng=np.random.default_rng(seed), **params)

    @staticmethod
    def create_experiment(**overrides):
        defaults = {
            "array": TestDataFactory.create_array(),
            "schemes": [SchemeSpec.model_validate(s) for s in ("prmse-je", "far-field")],
            "sweep_variable": SweepVariable.SNR,
            "sweep_values": [30.0],
            "n_trials": 2,
            "polar": PolarSamplingParams(),
            "master_seed": 1,
        }
        defaults.update(overrides)
        return ExperimentSpec(**defaults)


@pytest.fixture
def array_config():
    """Fixture providing the N=256, 30 GHz array."""
    return TestDataFactory.create_array()


@pytest.fixture
def small_array():
    """Fixture providing a 32-element array for fast checks."""
    return TestDataFactory.create_array(n_antennas=32)


@pytest.fixture
def near_user():
    """Fixture providing a user 12 m away at broadside."""
    return TestDataFactory.create_location()


@pytest.fixture
def los_channel():
    """Fixture providing a pure line-of-sight channel for the near user."""
    return TestDataFactory.create_los_channel()


@pytest.fixture
def tmp_cache_dir(tmp_path):
    """Fixture providing an empty codebook cache directory."""
    return tmp_path / "codebooks"
