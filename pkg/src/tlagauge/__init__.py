"""Gauge-dependence of spontaneous emission for a two-level atom in free space."""
from .core import (ConfigurationError, DomainError, GaugeChoice, GaugeKind, LineshapeModel,
                   LineshapeVariant, SpectralDensity, TlaParams, ValidationError,
                   derive_gamma0, eval_lineshape, eval_spectral_density,
                   markov_window_integral)

__version__ = "0.1.0"
