"""Density-matrix evolution under H_S plus a Born-Markov dissipator."""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm
from scipy.sparse.linalg import expm_multiply

from ..core import SpectralDensity
from .dissipator import Dissipator, build_dissipator, rate_gap
from .system import SystemModel
from .transitions import TransitionTable, enumerate_transitions

log = logging.getLogger(__name__)

TRACE_FAIL = 1e-8
HERMITIAN_ENFORCE = 1e-10
POSITIVITY_FLOOR = -1e-10
LEAKAGE_WARN = 1e-6
DENSE_LIMIT = 1024   # superoperator size up to which expm is formed densely


class IntegrationError(RuntimeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True, eq=False)
class DensityTrajectory:
    times: np.ndarray
    rhos: np.ndarray = field(repr=False)       # product basis, (len(times), d, d)
    trace_drift: float
    min_eigenvalue: float
    positivity_violations: int                 # checkpoints below the floor
    leakage: dict = field(default_factory=dict)

    def expectation(self, op: np.ndarray) -> np.ndarray:
        return np.einsum("tij,ji->t", self.rhos, op).real


def liouvillian(table: TransitionTable, dissipator: Dissipator) -> sp.csr_matrix:
    """Full generator in the eigenbasis: -i[H, .] + dissipator."""
    e = table.energies
    d = len(e)
    coh = -1j * (e[:, None] - e[None, :]).reshape(-1)
    return (sp.diags(coh, format="csr") + dissipator.superoperator()).tocsr()


def check_density_matrix(rho: np.ndarray, tol: float = 1e-10):
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if np.abs(rho - rho.conj().T).max() > tol:
        raise ValueError("density matrix must be Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise ValueError("density matrix must have unit trace")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -tol:
        raise ValueError("density matrix must be positive semidefinite")


def evolve_density_matrix(model: SystemModel, dissipator: Dissipator, rho0, t_final: float,
                          dt_control: float | None = None, checkpoints=None
                          ) -> DensityTrajectory:
    """Propagate rho0 and record it at ``checkpoints`` (default: 50 evenly spaced times).

    The step is exact for a time-independent generator: the propagator
    exp(L dt) is formed once per distinct step length. ``dt_control`` caps the
    step so that Hermiticity and trace are re-checked at least that often.
    """
    check_density_matrix(rho0)
    table = dissipator.table
    d = table.dim
    if d != model.dim:
        raise ValueError("dissipator and model dimensions differ")
    u = table.vectors
    if checkpoints is None:
        checkpoints = np.linspace(0.0, t_final, 51)
    times = np.unique(np.append(np.asarray(checkpoints, dtype=float), [0.0, t_final]))
    times = times[(times >= 0) & (times <= t_final)]

    gen = liouvillian(table, dissipator)
    dense = d * d <= DENSE_LIMIT
    cache = {}

    def step(vec, dt):
        if not dense:
            return expm_multiply(gen * dt, vec)
        key = round(dt, 15)
        if key not in cache:
            cache[key] = expm(gen.toarray() * dt)
        return cache[key] @ vec

    rho = u.conj().T @ np.asarray(rho0, dtype=complex) @ u
    vec = rho.reshape(-1)
    out, drift_max, min_eig, violations = [], 0.0, np.inf, 0
    t = 0.0
    tops = model.top_level_projectors()
    leak = {j: 0.0 for j in tops}
    for tc in times:
        remaining = tc - t
        if remaining > 0:
            n_sub = 1 if dt_control is None else max(1, int(np.ceil(remaining / dt_control - 1e-12)))
            h = remaining / n_sub
            for _ in range(n_sub):
                vec = step(vec, h)
                r = vec.reshape(d, d)
                drift = abs(np.trace(r) - 1.0)
                drift_max = max(drift_max, float(drift))
                if drift > TRACE_FAIL:
                    raise IntegrationError(f"trace drift {drift:.3e} at t={t + h:.6g}",
                                           {"t": t + h, "drift": float(drift)})
                r = 0.5 * (r + r.conj().T)
                r = r / np.trace(r).real
                vec = r.reshape(-1)
                t += h
            t = tc
        r = vec.reshape(d, d)
        rho_p = u @ r @ u.conj().T
        rho_p = 0.5 * (rho_p + rho_p.conj().T)
        lam = float(np.linalg.eigvalsh(rho_p).min())
        min_eig = min(min_eig, lam)
        if lam < POSITIVITY_FLOOR:
            violations += 1
        for j, p in tops.items():
            leak[j] = max(leak[j], float(np.trace(p @ rho_p).real))
        out.append(rho_p)

    if dissipator.secular and violations:
        warnings.warn(f"secular evolution left the positive cone (min eigenvalue {min_eig:.3e})",
                      stacklevel=2)
    for j, val in leak.items():
        if val > LEAKAGE_WARN:
            warnings.warn(f"oscillator {j}: population {val:.2e} in the top retained level; "
                          "raise its truncation", stacklevel=2)
    return DensityTrajectory(times, np.array(out), drift_max, min_eig, violations, leak)


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    diff = a - b
    return 0.5 * float(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))).sum())


def excited_vacuum(model: SystemModel) -> np.ndarray:
    """|e> x |all aux in their ground level>."""
    psi = np.zeros(model.dim, dtype=complex)
    psi[model.aux_dim] = 1.0
    return np.outer(psi, psi.conj())


@dataclass(frozen=True, eq=False)
class GapReport:
    secular: bool
    max_trace_distance: float
    times: np.ndarray = field(repr=False)
    distances: np.ndarray = field(repr=False)
    gap_max: float = 0.0
    gap_rel: float = 0.0
    max_freq_ratio_dev: float = 0.0
    observables: dict = field(default_factory=dict, repr=False)
    trajectories: tuple = field(default=(), repr=False)


def gauge_gap(model: SystemModel, sd: SpectralDensity, secular: bool = True,
              observables: dict | None = None, rho0=None, t_final: float | None = None,
              n_checkpoints: int = 50, delta_sec: float | None = None,
              table: TransitionTable | None = None) -> GapReport:
    """Evolve the same initial state with dipole and Coulomb dissipators and compare."""
    table = table or enumerate_transitions(model)
    dip = build_dissipator(table, sd, "dipole", secular, delta_sec)
    cou = build_dissipator(table, sd, "coulomb", secular, delta_sec)
    gap = rate_gap(dip, cou)
    rho0 = excited_vacuum(model) if rho0 is None else rho0
    if t_final is None:
        t_final = 10.0 / float(sd(model.tla.omega0))
    ts = np.linspace(0.0, t_final, n_checkpoints + 1)
    with warnings.catch_warnings():
        if not secular:
            warnings.simplefilter("ignore")
        td = evolve_density_matrix(model, dip, rho0, t_final, checkpoints=ts)
        tc = evolve_density_matrix(model, cou, rho0, t_final, checkpoints=ts)
    dist = np.array([trace_distance(a, b) for a, b in zip(td.rhos, tc.rhos)])
    obs = {}
    if observables:
        for name, op in observables.items():
            obs[name] = (td.expectation(op), tc.expectation(op))
    return GapReport(secular, float(dist.max()), td.times, dist, gap["gap_max"], gap["gap_rel"],
                     gap["max_freq_ratio_dev"], obs, (td, tc))
