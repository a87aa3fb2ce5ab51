from .training_steps import (
    beam_sweep, extract_support, estimate_angle, classify_field_region, middle_k_indices,
    middle_k_candidates, find_boundary_index, asw_je_range, range_search_grid,
    prmse_objective, prmse_je_range
)
from .training_schemes import (
    BeamTrainer, run_scheme_asw, run_scheme_prmse, run_scheme_exhaustive,
    run_scheme_twophase, run_scheme_farfield, run_scheme_perfect_csi
)

__all__ = [
    "beam_sweep", "extract_support", "estimate_angle", "classify_field_region",
    "middle_k_indices", "middle_k_candidates", "find_boundary_index", "asw_je_range",
    "range_search_grid", "prmse_objective", "prmse_je_range", "BeamTrainer",
    "run_scheme_asw", "run_scheme_prmse", "run_scheme_exhaustive", "run_scheme_twophase",
    "run_scheme_farfield", "run_scheme_perfect_csi"
]
