from .schemas import (
    SPEED_OF_LIGHT, Scheme, CodebookKind, SweepVariable, FieldRegion, RangeMode,
    ArrayConfig, UserLocation, NlosPath, ChannelRealization, Codebook,
    PolarSamplingParams, MuA, AngularSupport, SurrogateSupport, SweepResult,
    SupportIndexSet, Candidate, EstimationReport, SchemeSpec, ExperimentSpec, MetricRow
)
from .errors import (
    BeamTrainingError, NoCrossingError, DegenerateSupportError, ConfigError,
    InfeasibleExperimentError, NumericalError, CodebookCacheError
)
from .cli_config import CliConfig, DEFAULT_SCHEMES

__all__ = [
    "SPEED_OF_LIGHT", "Scheme", "CodebookKind", "SweepVariable", "FieldRegion", "RangeMode",
    "ArrayConfig", "UserLocation", "NlosPath", "ChannelRealization", "Codebook",
    "PolarSamplingParams", "MuA", "AngularSupport", "SurrogateSupport", "SweepResult",
    "SupportIndexSet", "Candidate", "EstimationReport", "SchemeSpec", "ExperimentSpec",
    "MetricRow", "BeamTrainingError", "NoCrossingError", "DegenerateSupportError",
    "ConfigError", "InfeasibleExperimentError", "NumericalError", "CodebookCacheError",
    "CliConfig", "DEFAULT_SCHEMES"
]
