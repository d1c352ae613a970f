"""Photon-number spectra from final states, analytic oracles, and comparisons."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import curve_fit

from ..bath import ModeBath
from ..core import (GaugeChoice, LineshapeModel, LineshapeVariant, TlaParams,
                    ValidationError, eval_lineshape)
from .basis import FockBasis

NEGATIVE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Spectrum:
    omegas: np.ndarray
    weights: np.ndarray = field(repr=False)
    density: np.ndarray = field(repr=False)
    density_baseline: np.ndarray = field(repr=False)
    baseline_subtracted: bool = False
    normalized: bool = False
    integral: float = 0.0           # integral of density before normalization
    negative_bins: int = 0          # bins below -NEGATIVE_TOL (not fatal)

    def normalize(self) -> "Spectrum":
        if self.normalized:
            return self
        s = self.integral
        if s <= 0:
            raise ValidationError("cannot normalize a spectrum with nonpositive integral")
        return replace(self, density=self.density / s,
                       density_baseline=self.density_baseline / s, normalized=True)

    def total(self) -> float:
        return float(np.sum(self.density * self.weights))


def mode_populations(psi, basis: FockBasis) -> np.ndarray:
    """<b_k^dag b_k>; two-photon states count once per photon in each mode."""
    pops = np.abs(np.asarray(psi)) ** 2
    field_pops = pops.reshape(2, basis.field_dim).sum(axis=0)
    return basis.occupation().T @ field_pops


def extract_spectrum(psi_final, bath: ModeBath, basis: FockBasis, baseline=None,
                     t_final: float | None = None, gamma0: float | None = None) -> Spectrum:
    if t_final is not None and gamma0 and t_final * gamma0 < 8:
        warnings.warn(f"t_final = {t_final * gamma0:.2f}/Gamma0 < 8/Gamma0; "
                      "residual excitation biases the wings", stacklevel=2)
    n = mode_populations(psi_final, basis)
    nb = mode_populations(baseline, basis) if baseline is not None else np.zeros_like(n)
    density = (n - nb) / bath.weights
    return Spectrum(
        omegas=np.asarray(bath.omegas), weights=np.asarray(bath.weights),
        density=density, density_baseline=nb / bath.weights,
        baseline_subtracted=baseline is not None,
        integral=float(np.sum(n - nb)),
        negative_bins=int(np.sum(density < -NEGATIVE_TOL)))


# -- Wigner-Weisskopf oracle --------------------------------------------------

@dataclass(frozen=True)
class WWOracle:
    params: TlaParams
    variant: LineshapeVariant

    def amplitude(self, t):
        t = np.asarray(t, dtype=float)
        w0, g0 = self.params.omega0, self.params.gamma0
        return np.exp(-1j * w0 * t - 0.5 * g0 * t)

    def survival(self, t):
        return np.abs(self.amplitude(t)) ** 2

    def spectrum(self, omegas):
        return eval_lineshape(LineshapeModel(self.variant, self.params.omega0,
                                             self.params.gamma0), omegas)


def ww_oracle(params: TlaParams, bath: ModeBath | None = None,
              gauge: GaugeChoice | None = None) -> WWOracle:
    """Pole-approximation decay; dipole-type spectrum unless the gauge is naive Coulomb."""
    from ..core import GaugeKind

    if params.gamma0 / params.omega0 > 0.1:
        warnings.warn("Gamma0/omega0 > 0.1: outside the Markov regime", stacklevel=2)
    naive = gauge is not None and gauge.kind is GaugeKind.NAIVE_COULOMB
    return WWOracle(params, LineshapeVariant.S_PH_PRIME if naive else LineshapeVariant.S_PH)


# -- recentering and comparison -----------------------------------------------

def peak_center(omegas, density, numerator=None, half_width=None) -> float:
    """Sub-grid peak of a Lorentzian-like spectrum.

    numerator/density is quadratic in omega for a Lorentzian times a smooth
    numerator, so a parabola through the points near the maximum gives the
    center exactly in that limit.
    """
    w = np.asarray(omegas, dtype=float)
    d = np.asarray(density, dtype=float)
    num = np.ones_like(w) if numerator is None else np.asarray(numerator, dtype=float)
    i = int(np.argmax(d))
    if half_width is None:
        sel = np.arange(max(i - 2, 0), min(i + 3, len(w)))
    else:
        sel = np.nonzero(np.abs(w - w[i]) <= half_width)[0]
        if len(sel) < 3:
            sel = np.arange(max(i - 1, 0), min(i + 2, len(w)))
    sel = sel[d[sel] > 0]
    if len(sel) < 3:
        return float(w[i])
    p = np.polyfit(w[sel], num[sel] / d[sel], 2)
    if p[0] <= 0:
        return float(w[i])
    return float(-p[1] / (2 * p[0]))


@dataclass(frozen=True)
class LorentzFit:
    log_amplitude: float
    exponent: float
    center: float
    width: float


def _log_model(w, log_amp, p, c, gam):
    return log_amp + p * np.log(w) - np.log((w - c) ** 2 + 0.25 * gam * gam)


def fit_lorentz_power(omegas, density, window, omega0: float = 1.0,
                      gamma_guess: float = 0.02) -> LorentzFit:
    """Least-squares fit of log density to A w^p / ((w-c)^2 + gamma^2/4)."""
    w = np.asarray(omegas, dtype=float)
    d = np.asarray(density, dtype=float)
    m = (w >= window[0]) & (w <= window[1]) & (d > 0)
    if m.sum() < 5:
        raise ValidationError("too few positive points to fit a lineshape")
    c0 = float(w[m][np.argmax(d[m])])
    amp0 = math.log(d[m].max() * gamma_guess**2 / 4)
    popt, _ = curve_fit(_log_model, w[m] / omega0, np.log(d[m]),
                        p0=[amp0, 2.0, c0 / omega0, gamma_guess / omega0], maxfev=20000)
    return LorentzFit(float(popt[0]), float(popt[1]), float(popt[2] * omega0),
                      float(abs(popt[3]) * omega0))


def recentered_density(spec: Spectrum, center: float, gamma0: float, omega0: float) -> np.ndarray:
    """Move the Lorentzian core from ``center`` to ``omega0``, keeping the numerator."""
    w = spec.omegas
    core_new = 1.0 / ((w - omega0) ** 2 + 0.25 * gamma0**2)
    core_old = 1.0 / ((w - center) ** 2 + 0.25 * gamma0**2)
    return spec.density * core_new / core_old


def normalize_on(omegas, weights, values) -> np.ndarray:
    return np.asarray(values) / np.sum(np.asarray(values) * np.asarray(weights))


@dataclass(frozen=True)
class LineshapeAgreement:
    center: float
    max_err_core: float     # |omega - center| <= core_halfwidth
    max_err_wide: float     # omega in wide window
    rel_err: np.ndarray = field(repr=False)


def compare_to_lineshape(spec: Spectrum, variant, params: TlaParams,
                         center: float | None = None, core_halfwidth: float | None = None,
                         wide=(0.8, 1.2)) -> LineshapeAgreement:
    """Relative error of the normalized spectrum against an analytic lineshape
    whose Lorentzian is centered on the empirical peak."""
    variant = LineshapeVariant(variant)
    w0, g0 = params.omega0, params.gamma0
    power = 3 if variant is LineshapeVariant.S_PH else 1
    if center is None:
        center = peak_center(spec.omegas, spec.density, (spec.omegas / w0) ** power,
                             half_width=g0)
    ref = eval_lineshape(LineshapeModel(variant, w0, g0, center), spec.omegas)
    ref_n = normalize_on(spec.omegas, spec.weights, ref)
    sim_n = normalize_on(spec.omegas, spec.weights, spec.density)
    err = np.abs(sim_n / ref_n - 1.0)
    hw = 5 * g0 if core_halfwidth is None else core_halfwidth
    core = np.abs(spec.omegas - center) <= hw
    wide_m = (spec.omegas >= wide[0] * w0) & (spec.omegas <= wide[1] * w0)
    return LineshapeAgreement(center, float(err[core].max()), float(err[wide_m].max()), err)


@dataclass(frozen=True)
class GaugeComparison:
    omegas: np.ndarray = field(repr=False)
    ratio: np.ndarray = field(repr=False)
    exponent: float
    fit_band: tuple
    fits: tuple = ()


def _check_grids(a: Spectrum, b: Spectrum):
    if a.omegas.shape != b.omegas.shape or not np.allclose(a.omegas, b.omegas, rtol=1e-12, atol=0):
        raise ValidationError("spectra are sampled on different frequency grids")


def gauge_comparison(spec_a: Spectrum, spec_b: Spectrum, omega0: float = 1.0,
                     fit_band=(0.7, 1.3), recenter: bool = True, fit_window=(0.6, 1.4),
                     gamma_guess: float = 0.02) -> GaugeComparison:
    """Pointwise ratio a/b and its power-law exponent in omega/omega0.

    With ``recenter`` each spectrum is first divided by its own fitted
    Lorentzian core so that differing level shifts do not tilt the ratio.
    """
    _check_grids(spec_a, spec_b)
    w = spec_a.omegas
    da, db = spec_a.density, spec_b.density
    fits = ()
    if recenter:
        win = (fit_window[0] * omega0, fit_window[1] * omega0)
        fa = fit_lorentz_power(w, da, win, omega0, gamma_guess)
        fb = fa if spec_b is spec_a else fit_lorentz_power(w, db, win, omega0, gamma_guess)
        da = da * ((w - fa.center) ** 2 + 0.25 * fa.width**2)
        db = db * ((w - fb.center) ** 2 + 0.25 * fb.width**2)
        fits = (fa, fb)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = da / db
    m = (w >= fit_band[0] * omega0) & (w <= fit_band[1] * omega0) & (ratio > 0) & np.isfinite(ratio)
    slope = np.polyfit(np.log(w[m] / omega0), np.log(ratio[m]), 1)[0]
    return GaugeComparison(w, ratio, float(slope), tuple(fit_band), fits)


_POWER = {LineshapeVariant.S_PH: 3, LineshapeVariant.S_PH_PRIME: 1, LineshapeVariant.S0: 0}


def ratio_to_reference(spec_a: Spectrum, spec_b: Spectrum, variant_a, variant_b,
                       params: TlaParams, window=(0.8, 1.2)) -> tuple[float, np.ndarray]:
    """Max relative deviation of the normalized ratio a/b from its analytic value.

    Each spectrum has its Lorentzian core moved from its own empirical peak to
    omega0 first, so the comparison tests the numerators only. Because both
    spectra are normalized over the band, the analytic ratio is
    (omega/omega0)^(p_a - p_b) times the ratio of the band integrals.
    """
    _check_grids(spec_a, spec_b)
    va, vb = LineshapeVariant(variant_a), LineshapeVariant(variant_b)
    w0, g0 = params.omega0, params.gamma0
    w, wt = spec_a.omegas, spec_a.weights
    moved = []
    for s, v in ((spec_a, va), (spec_b, vb)):
        c = peak_center(w, s.density, (w / w0) ** _POWER[v], half_width=g0)
        moved.append(normalize_on(w, wt, recentered_density(s, c, g0, w0)))
    ref_a = normalize_on(w, wt, eval_lineshape(LineshapeModel(va, w0, g0), w))
    ref_b = normalize_on(w, wt, eval_lineshape(LineshapeModel(vb, w0, g0), w))
    err = np.abs((moved[0] / moved[1]) / (ref_a / ref_b) - 1.0)
    m = (w >= window[0] * w0) & (w <= window[1] * w0)
    return float(err[m].max()), err
