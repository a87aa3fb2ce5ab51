from .array_model import (
    near_steering, near_steering_matrix, far_steering, far_steering_matrix,
    synthesize_channel, received_power, received_powers, achievable_rate,
    reference_snr, noise_power_for_snr
)
from .codebooks import build_dft_codebook, build_polar_codebook, training_overhead, dft_angles
from .fresnel_kernel import (
    fresnel_c, fresnel_s, beam_power_ratio_exact, beam_power_ratio_approx,
    solve_a0, solve_mu0, mu_search_grid
)
from .beam_pattern import (
    angular_support_continuous, surrogate_support_continuous, support_width_curve,
    range_insensitive_window
)

__all__ = [
    "near_steering", "near_steering_matrix", "far_steering", "far_steering_matrix",
    "synthesize_channel", "received_power", "received_powers", "achievable_rate",
    "reference_snr", "noise_power_for_snr", "build_dft_codebook", "build_polar_codebook",
    "training_overhead", "dft_angles", "fresnel_c", "fresnel_s", "beam_power_ratio_exact",
    "beam_power_ratio_approx", "solve_a0", "solve_mu0", "mu_search_grid",
    "angular_support_continuous", "surrogate_support_continuous", "support_width_curve",
    "range_insensitive_window"
]
