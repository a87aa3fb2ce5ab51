"""
Unit tests for model validation: scheme labels, experiment and CLI configuration.

Tests focus on input validation, derived models, and edge cases.
"""

import json
import unittest

import numpy as np
from pydantic import ValidationError

from models.cli_config import DEFAULT_SCHEMES, CliConfig
from models.schemas import (
    EstimationReport,
    ExperimentSpec,
    FieldRegion,
    RangeMode,
    Scheme,
    SchemeSpec,
    SupportIndexSet,
    SweepResult,
    SweepVariable,
    CodebookKind,
)


class TestSchemeSpec(unittest.TestCase):
    """Scheme labels with an optional candidate count."""

    def test_plain_label(self):
        spec = SchemeSpec.model_validate("asw-je")
        self.assertEqual(spec.scheme, Scheme.ASW_JE)
        self.assertIsNone(spec.k)
        self.assertEqual(spec.label, "asw-je")
        self.assertEqual(spec.candidates(3), 3)

    def test_label_with_candidates(self):
        spec = SchemeSpec.model_validate("prmse-je:5")
        self.assertEqual(spec.scheme, Scheme.PRMSE_JE)
        self.assertEqual(spec.k, 5)
        self.assertEqual(spec.label, "prmse-je:5")
        self.assertEqual(spec.candidates(3), 5)

    def test_dict_form(self):
        spec = SchemeSpec.model_validate({"scheme": "two-phase", "k": 2})
        self.assertEqual(spec.label, "two-phase:2")

    def test_invalid_labels(self):
        for bad in ("beam-sweep", "prmse-je:0", "asw-je:-1"):
            with self.assertRaises(ValidationError, msg=bad):
                SchemeSpec.model_validate(bad)
        with self.assertRaises((ValidationError, ValueError)):
            SchemeSpec.model_validate("prmse-je:x")


class TestExperimentSpec(unittest.TestCase):

    def base(self, **overrides):
        params = {
            "schemes": [SchemeSpec.model_validate("far-field")],
            "sweep_variable": SweepVariable.SNR,
            "sweep_values": [20.0],
            "n_trials": 1,
        }
        params.update(overrides)
        return ExperimentSpec(**params)

    def test_defaults(self):
        spec = self.base()
        self.assertEqual(spec.array.n_antennas, 256)
        self.assertEqual(spec.t_total, 2000)
        self.assertEqual(spec.range_mode, RangeMode.FIXED)
        self.assertEqual(spec.user_angle_max, 1.0)
        self.assertFalse(spec.far_field_shortcut)

    def test_uniform_range_requires_bounds(self):
        with self.assertRaises(ValidationError):
            self.base(range_mode=RangeMode.UNIFORM, user_range_min_m=8.0)
        with self.assertRaises(ValidationError):
            self.base(range_mode=RangeMode.UNIFORM, user_range_min_m=20.0, user_range_max_m=8.0)
        spec = self.base(range_mode=RangeMode.UNIFORM, user_range_min_m=8.0, user_range_max_m=20.0)
        self.assertEqual(spec.user_range_max_m, 20.0)

    def test_fixed_range_requires_value(self):
        with self.assertRaises(ValidationError):
            self.base(user_range_m=None)

    def test_antenna_sweep_values_must_be_integers(self):
        with self.assertRaises(ValidationError):
            self.base(sweep_variable=SweepVariable.N_ANTENNAS, sweep_values=[64.5])
        with self.assertRaises(ValidationError):
            self.base(sweep_variable=SweepVariable.N_ANTENNAS, sweep_values=[1])

    def test_bounds(self):
        for field, value in (("n_trials", 0), ("power_threshold", 1.0), ("user_angle_max", 0.0),
                             ("user_angle", 1.5), ("schemes", []), ("master_seed", -1)):
            with self.assertRaises(ValidationError, msg=field):
                self.base(**{field: value})


class TestCliConfig(unittest.TestCase):
    """Flat JSON configuration with unit-suffixed keys."""

    def test_defaults(self):
        cfg = CliConfig()
        self.assertEqual(cfg.schemes, DEFAULT_SCHEMES)
        self.assertEqual(cfg.array().carrier_freq, 30e9)
        self.assertEqual(cfg.polar().n_ranges, 5)

    def test_unknown_key_rejected(self):
        with self.assertRaises(ValidationError):
            CliConfig.model_validate({"n_antenas": 128})

    def test_unknown_scheme_rejected(self):
        with self.assertRaises(ValidationError):
            CliConfig(schemes=["far-field", "music"])
        with self.assertRaises(ValidationError):
            CliConfig(estimate_scheme="oracle")

    def test_canonical_json_round_trip(self):
        cfg = CliConfig(n_antennas=128, schemes=["prmse-je:3", "far-field"], seed=9)
        again = CliConfig.model_validate_json(cfg.canonical_json())
        self.assertEqual(again, cfg)
        self.assertEqual(json.loads(cfg.canonical_json())["n_antennas"], 128)

    def test_experiment_spec_mapping(self):
        cfg = CliConfig(
            n_antennas=128, freq_ghz=28.0, schemes=["prmse-je:3"], beta_delta=1.2,
            user_angle_max=0.5, seed=4,
        )
        spec = cfg.experiment_spec()
        self.assertEqual(spec.array.n_antennas, 128)
        self.assertAlmostEqual(spec.array.carrier_freq, 28e9)
        self.assertEqual(spec.schemes[0].k, 3)
        self.assertEqual(spec.polar.beta_delta, 1.2)
        self.assertEqual(spec.user_angle_max, 0.5)
        self.assertEqual(spec.master_seed, 4)
        self.assertEqual(cfg.experiment_spec(seed=99).master_seed, 99)


class TestSupportIndexSet(unittest.TestCase):

    def test_median_rounds_up(self):
        self.assertEqual(SupportIndexSet(indices=[3, 4, 5]).median_index, 4)
        self.assertEqual(SupportIndexSet(indices=[3, 4, 5, 6]).median_index, 5)
        self.assertEqual(SupportIndexSet(indices=[7]).median_index, 7)

    def test_single(self):
        self.assertTrue(SupportIndexSet(indices=[7]).is_single)
        self.assertFalse(SupportIndexSet(indices=[7, 8]).is_single)

    def test_invalid(self):
        with self.assertRaises(ValidationError):
            SupportIndexSet(indices=[])
        with self.assertRaises(ValidationError):
            SupportIndexSet(indices=[4, 3])
        with self.assertRaises(ValidationError):
            SupportIndexSet(indices=[2, 2])


class TestResultModels(unittest.TestCase):

    def test_sweep_powers_non_negative(self):
        with self.assertRaises(ValidationError):
            SweepResult(powers=np.array([1.0, -0.1]), codebook_kind=CodebookKind.DFT,
                        tx_power=1.0, noise_power=0.0)
        sweep = SweepResult(powers=np.array([1.0, 2.0]), codebook_kind=CodebookKind.DFT,
                            tx_power=1.0, noise_power=0.0)
        np.testing.assert_array_equal(sweep.scaled(3.0).powers, [3.0, 6.0])

    def test_report_json_excludes_beam(self):
        report = EstimationReport(
            scheme=Scheme.FAR_FIELD, label="far-field", theta_hat=0.1,
            n_training_symbols=256, field_region=FieldRegion.FAR,
            beam=np.ones(4, dtype=complex) / 2,
        )
        payload = report.to_json_dict()
        self.assertNotIn("beam", payload)
        self.assertEqual(payload["field_region"], "far")
        self.assertIsNone(payload["r_hat"])


if __name__ == "__main__":
    unittest.main()
