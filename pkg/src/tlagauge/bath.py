"""Finite-mode discretization of the free-space photon continuum."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import GaugeChoice, SpectralDensity, TlaParams, ValidationError


class QuadratureRule(enum.Enum):
    UNIFORM = "uniform"
    GAUSS_LEGENDRE = "gauss-legendre"


@dataclass(frozen=True, eq=False)
class ModeBath:
    """Discrete modes with quadrature widths and dipole-gauge couplings.

    ``g_dipole[k]**2 == Gamma(omegas[k]) * weights[k] / (2 pi)``, so that a
    golden-rule sum over modes reproduces Gamma at the atomic frequency.
    """

    omegas: np.ndarray
    weights: np.ndarray
    g_dipole: np.ndarray
    band: tuple[float, float]
    rule: QuadratureRule
    sd: SpectralDensity

    @property
    def n_modes(self) -> int:
        return len(self.omegas)

    def rate_sum(self) -> float:
        return float(np.sum(self.g_dipole**2))


def discretize(sd: SpectralDensity, band, n_modes: int,
               rule: QuadratureRule | str = QuadratureRule.UNIFORM) -> ModeBath:
    rule = QuadratureRule(rule)
    lo, hi = (float(b) for b in band)
    if n_modes < 2:
        raise ValidationError(f"need at least 2 modes, got {n_modes}")
    if not 0 < lo < hi:
        raise ValidationError(f"band must satisfy 0 < omega_min < omega_max, got ({lo}, {hi})")
    width = hi - lo
    if rule is QuadratureRule.UNIFORM:
        dw = width / n_modes
        omegas = lo + dw * (np.arange(n_modes) + 0.5)
        weights = np.full(n_modes, dw)
    else:
        x, wts = np.polynomial.legendre.leggauss(n_modes)
        omegas = lo + 0.5 * width * (x + 1.0)
        weights = 0.5 * width * wts
    gamma = np.asarray(sd(omegas), dtype=float)
    g = np.sqrt(gamma * weights / (2 * np.pi))
    for arr in (omegas, weights, g):
        arr.setflags(write=False)
    return ModeBath(omegas, weights, g, (lo, hi), rule, sd)


def coupling_for_gauge(bath: ModeBath, gauge: GaugeChoice, params: TlaParams) -> np.ndarray:
    """First-order coupling amplitude per mode.

    The vector potential carries an extra 1/omega relative to the electric
    displacement field, so Coulomb-type gauges couple with (omega0/omega_k) g_k.
    """
    if not gauge.is_coulomb:
        return bath.g_dipole.copy()
    return params.omega0 / bath.omegas * bath.g_dipole


def vector_potential_weights(bath: ModeBath) -> np.ndarray:
    """u_k = d * a_k = g_k / omega_k, the per-mode amplitude of d.A(0).

    The gauge phase is Phi = 2 d.A = sum_k 2 u_k (b_k + b_k^dag).
    """
    return bath.g_dipole / bath.omegas
