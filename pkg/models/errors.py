"""
Exception types raised by the beam-training package.

Precondition failures on plain arguments raise ValueError and malformed
models raise pydantic.ValidationError; the classes here cover the
domain-specific failure modes the CLI maps to exit codes.
"""


class BeamTrainingError(Exception):
    """Base class for all package errors."""


class NoCrossingError(BeamTrainingError):
    """The approximated power ratio never drops below the requested threshold."""

    def __init__(self, mu: float, threshold: float, a_max: float):
        self.mu = mu
        self.threshold = threshold
        self.a_max = a_max
        super().__init__(
            f"L(mu={mu:.4f}, a) stays above {threshold} for all a in (0, {a_max}]"
        )


class DegenerateSupportError(BeamTrainingError):
    """No usable support boundary exists around the reference codeword."""


class ConfigError(BeamTrainingError):
    """Configuration file or flag is missing, malformed or inconsistent."""


class InfeasibleExperimentError(BeamTrainingError):
    """Training overhead leaves no room for data transmission."""


class NumericalError(BeamTrainingError):
    """A computation produced non-finite or otherwise unusable numbers."""


class CodebookCacheError(BeamTrainingError):
    """A cached codebook file is corrupt or does not match the request."""
