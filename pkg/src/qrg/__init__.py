"""Random graphs on circles near criticality: sampling, exploration walks and limit excursions."""
from .errors import DomainError, FixtureError, HorizonError, RejectedRealizationError
from .graph import GraphRealization, decompose, sample_realization
from .params import CutGammaLaw, ModelParams, critical_curve_F, critical_lambda, mean_interval_length, window_params

__all__ = [
    "CutGammaLaw", "DomainError", "FixtureError", "GraphRealization", "HorizonError", "ModelParams",
    "RejectedRealizationError", "critical_curve_F", "critical_lambda", "decompose",
    "mean_interval_length", "sample_realization", "window_params",
]
__version__ = "0.1.0"
