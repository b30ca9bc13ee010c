"""Purity–correlation complementarity toolkit for multipartite quantum states."""

from .complementarity import bound_for, ensemble_report, evaluate, min_single_party_variant
from .errors import InputError, UnsupportedInputError
from .measures import BipartitionSpec, MeasureKind, MeasurementOnQubit
from .states import MultipartiteState, SamplerConfig

__all__ = [
    "BipartitionSpec",
    "InputError",
    "MeasureKind",
    "MeasurementOnQubit",
    "MultipartiteState",
    "SamplerConfig",
    "UnsupportedInputError",
    "bound_for",
    "ensemble_report",
    "evaluate",
    "min_single_party_variant",
]
