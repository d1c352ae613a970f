"""Units, atom parameters, analytic lineshapes and spectral densities.

Natural units throughout (hbar = eps0 = c = 1). Frequencies are angular.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ValidationError(ValueError):
    """Malformed input data (tables, matrices, bands)."""


class ConfigurationError(ValueError):
    """Incompatible combination of otherwise valid options."""


def derive_gamma0(omega0: float, d: float) -> float:
    """Free-space spontaneous decay rate d^2 omega0^3 / (3 pi)."""
    if not omega0 > 0:
        raise DomainError(f"omega0 must be positive, got {omega0!r}")
    if d < 0:
        raise DomainError(f"dipole magnitude must be nonnegative, got {d!r}")
    return d * d * omega0**3 / (3.0 * math.pi)


def dipole_for_gamma0(omega0: float, gamma0: float) -> float:
    """Inverse of :func:`derive_gamma0`."""
    if not omega0 > 0:
        raise DomainError(f"omega0 must be positive, got {omega0!r}")
    if gamma0 < 0:
        raise DomainError(f"gamma0 must be nonnegative, got {gamma0!r}")
    return math.sqrt(3.0 * math.pi * gamma0 / omega0**3)


@dataclass(frozen=True)
class TlaParams:
    omega0: float
    d: float

    def __post_init__(self):
        if not self.omega0 > 0:
            raise DomainError(f"omega0 must be positive, got {self.omega0!r}")
        if not self.d > 0:
            raise DomainError(f"d must be positive, got {self.d!r}")

    @property
    def gamma0(self) -> float:
        return derive_gamma0(self.omega0, self.d)

    @classmethod
    def from_gamma0(cls, omega0: float, gamma0: float) -> "TlaParams":
        return cls(omega0=omega0, d=dipole_for_gamma0(omega0, gamma0))


class GaugeKind(enum.Enum):
    DIPOLE = "dipole"
    NAIVE_COULOMB = "naive-coulomb"
    CORRECTED_COULOMB = "corrected-coulomb"
    MILONNI = "milonni"


@dataclass(frozen=True)
class GaugeChoice:
    """Which Hamiltonian assembly rule to use.

    ``expansion_order`` only matters for the corrected Coulomb gauge, where
    cos/sin of the gauge phase are Taylor expanded to that order.
    """

    kind: GaugeKind
    expansion_order: int = 2

    def __post_init__(self):
        if self.kind is GaugeKind.CORRECTED_COULOMB and self.expansion_order not in (1, 2, 3):
            raise ConfigurationError(
                f"expansion_order must be 1, 2 or 3, got {self.expansion_order}")

    @classmethod
    def parse(cls, name: str, expansion_order: int = 2) -> "GaugeChoice":
        try:
            kind = GaugeKind(name)
        except ValueError:
            valid = ", ".join(k.value for k in GaugeKind)
            raise ConfigurationError(f"unknown gauge {name!r} (expected one of {valid})") from None
        return cls(kind, expansion_order)

    @property
    def is_coulomb(self) -> bool:
        return self.kind is not GaugeKind.DIPOLE

    def __str__(self):
        if self.kind is GaugeKind.CORRECTED_COULOMB:
            return f"{self.kind.value}(order={self.expansion_order})"
        return self.kind.value


DIPOLE = GaugeChoice(GaugeKind.DIPOLE)
NAIVE_COULOMB = GaugeChoice(GaugeKind.NAIVE_COULOMB)
CORRECTED_COULOMB = GaugeChoice(GaugeKind.CORRECTED_COULOMB, 2)
MILONNI = GaugeChoice(GaugeKind.MILONNI)


# -- spectral densities -------------------------------------------------------

class SpectralKind(enum.Enum):
    FREE_SPACE_CUBIC = "free-space-cubic"
    POWER_LAW = "power-law"
    TABULATED = "tabulated"


@dataclass(frozen=True)
class SpectralDensity:
    """Reservoir rate Gamma(omega) at zero temperature.

    Use the constructors :meth:`free_space`, :meth:`power_law` and
    :meth:`tabulated` rather than building this directly.
    """

    kind: SpectralKind
    omega_ref: float = 1.0
    rate_ref: float = 0.0
    exponent: float = 3.0
    table: tuple = field(default=(), repr=False)

    @classmethod
    def free_space(cls, gamma0: float, omega0: float) -> "SpectralDensity":
        return cls(SpectralKind.FREE_SPACE_CUBIC, float(omega0), float(gamma0), 3.0)

    @classmethod
    def power_law(cls, exponent: float, gamma0: float, omega0: float) -> "SpectralDensity":
        return cls(SpectralKind.POWER_LAW, float(omega0), float(gamma0), float(exponent))

    @classmethod
    def tabulated(cls, omegas, values) -> "SpectralDensity":
        w = np.asarray(omegas, dtype=float)
        v = np.asarray(values, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValidationError("tabulated spectral density needs a nonempty 1-D table")
        if w.shape != v.shape:
            raise ValidationError("tabulated omegas and values differ in length")
        if np.any(np.diff(w) <= 0):
            raise ValidationError("tabulated omegas must be strictly increasing")
        if np.any(v < 0):
            raise ValidationError("tabulated spectral density must be nonnegative")
        return cls(SpectralKind.TABULATED, table=(tuple(w), tuple(v)))

    def __call__(self, omega):
        return eval_spectral_density(self, omega)


def eval_spectral_density(sd: SpectralDensity, omega):
    """Evaluate Gamma(omega); zero for omega <= 0. Scalar in, scalar out."""
    w = np.asarray(omega, dtype=float)
    pos = w > 0
    out = np.zeros_like(w)
    if sd.kind is SpectralKind.TABULATED:
        tw, tv = (np.asarray(a) for a in sd.table)
        out = np.interp(w, tw, tv, left=0.0, right=0.0)
        out = np.where(pos, out, 0.0)
    else:
        n = 3.0 if sd.kind is SpectralKind.FREE_SPACE_CUBIC else sd.exponent
        x = np.where(pos, w, 1.0) / sd.omega_ref
        out = np.where(pos, sd.rate_ref * x**n, 0.0)
    if out.ndim == 0:
        return float(out)
    return out


# -- analytic lineshapes ------------------------------------------------------

class LineshapeVariant(enum.Enum):
    S_PH = "s_ph"              # dipole gauge, omega^3 weighted
    S_PH_PRIME = "s_ph_prime"  # naive Coulomb gauge, omega weighted
    S0 = "s0"                  # bare Lorentzian kernel


@dataclass(frozen=True)
class LineshapeModel:
    variant: LineshapeVariant
    omega0: float
    gamma0: float
    center: float | None = None  # Lorentzian center; defaults to omega0

    @classmethod
    def from_params(cls, variant, params: TlaParams, center=None) -> "LineshapeModel":
        return cls(LineshapeVariant(variant), params.omega0, params.gamma0, center)

    def __call__(self, omega):
        return eval_lineshape(self, omega)


def eval_lineshape(model: LineshapeModel, omega):
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0):
        raise DomainError("lineshapes are defined for omega > 0 only")
    w0, g0 = model.omega0, model.gamma0
    c = w0 if model.center is None else model.center
    kernel = 1.0 / (0.25 * g0 * g0 + (w - c) ** 2)
    if model.variant is LineshapeVariant.S0:
        out = kernel
    else:
        power = 3 if model.variant is LineshapeVariant.S_PH else 1
        out = g0 / (2 * math.pi) * (w / w0) ** power * kernel
    if out.ndim == 0:
        return float(out)
    return out


def markov_window_integral(gamma0: float, half_width: float) -> float:
    """Closed form of the integral of S_ph over omega0 +- half_width with omega^3/omega0^3 -> 1."""
    return 2.0 / math.pi * math.atan(2.0 * half_width / gamma0)
