"""Chebyshev expansion of exp(-iHt) applied to a state vector."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.special import jv

log = logging.getLogger(__name__)


class PropagationError(RuntimeError):
    """Norm drift beyond the allowed bound."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray = field(repr=False)   # (len(times), dim)
    norms: np.ndarray
    matvecs: int

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def amplitude(self, index: int) -> np.ndarray:
        return self.states[:, index]


def spectral_bounds(h) -> tuple[float, float]:
    """Gershgorin interval containing the spectrum of a Hermitian matrix."""
    h = sp.csr_matrix(h)
    diag = h.diagonal().real
    radius = np.asarray(abs(h).sum(axis=1)).ravel() - np.abs(diag)
    return float(np.min(diag - radius)), float(np.max(diag + radius))


def _n_terms(x: float, tol: float) -> tuple[int, np.ndarray]:
    kmax = int(x + 12.0 * max(x, 1.0) ** (1 / 3) + 40)
    while True:
        coeffs = jv(np.arange(kmax + 1), x)
        tail = np.abs(coeffs)
        # last index that still matters
        big = np.nonzero(tail > 1e-3 * tol)[0]
        k = int(big[-1]) + 2 if len(big) else 2
        if k < kmax - 4:
            return k, coeffs[:k]
        kmax *= 2


def chebyshev_step(h, psi, dt, lo, hi, tol):
    """exp(-i h dt) psi for Hermitian h with spectrum inside [lo, hi]."""
    center = 0.5 * (hi + lo)
    half = 0.5 * (hi - lo)
    if half <= 0:
        return np.exp(-1j * center * dt) * psi, 0
    x = half * dt
    k, coeffs = _n_terms(x, tol)

    def apply(v):
        return (h @ v - center * v) / half

    t_prev = psi
    t_cur = apply(psi)
    out = coeffs[0] * t_prev + 2 * (-1j) * coeffs[1] * t_cur
    phase = -1j
    for n in range(2, k):
        t_prev, t_cur = t_cur, 2 * apply(t_cur) - t_prev
        phase *= -1j
        out += 2 * phase * coeffs[n] * t_cur
    return np.exp(-1j * center * dt) * out, k - 1


def propagate(h, psi0, t_final: float, tol: float = 1e-10, checkpoints=None,
              bounds=None) -> Trajectory:
    """Propagate ``psi0`` under ``h`` and record the state at each checkpoint.

    ``h`` may be a sparse matrix or anything with a ``matrix`` attribute.
    The expansion is truncated once Bessel coefficients fall below
    1e-3 * tol, and the norm is checked after every segment.
    """
    mat = getattr(h, "matrix", h)
    mat = sp.csr_matrix(mat)
    if tol <= 0:
        raise ValueError("tol must be positive")
    psi = np.asarray(psi0, dtype=complex).copy()
    norm0 = np.linalg.norm(psi)
    if abs(norm0 - 1.0) > 1e-8:
        raise ValueError(f"initial state must be normalized (norm={norm0})")
    if checkpoints is None:
        times = np.array([float(t_final)])
    else:
        times = np.unique(np.append(np.asarray(checkpoints, dtype=float), t_final))
        times = times[(times >= 0) & (times <= t_final)]
    lo, hi = bounds if bounds is not None else spectral_bounds(mat)
    # pad so rounding in the bound does not push eigenvalues outside [-1, 1]
    pad = 1e-6 * max(1.0, hi - lo)
    lo, hi = lo - pad, hi + pad

    states, norms = [], []
    t, matvecs = 0.0, 0
    for tc in times:
        dt = tc - t
        if dt > 0:
            psi, n = chebyshev_step(mat, psi, dt, lo, hi, tol)
            matvecs += n
            t = tc
        nrm = np.linalg.norm(psi)
        drift = abs(nrm - norm0)
        if drift > 100 * tol:
            raise PropagationError(
                f"norm drift {drift:.3e} exceeds {100 * tol:.1e} at t={t}",
                {"t": t, "norm": nrm, "drift": drift, "bounds": (lo, hi), "matvecs": matvecs})
        states.append(psi.copy())
        norms.append(nrm)
    log.debug("propagated to t=%g with %d matvecs", t, matvecs)
    return Trajectory(times, np.array(states), np.array(norms), matvecs)
