"""Eigen-transitions of the system Hamiltonian and their reservoir couplings."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .system import SystemModel

DEGENERACY_FLOOR = 1e-9   # in units of omega0


@dataclass(frozen=True, eq=False)
class TransitionTable:
    energies: np.ndarray = field(repr=False)
    vectors: np.ndarray = field(repr=False)     # columns are eigenvectors
    j: np.ndarray = field(repr=False)           # lower state of each transition
    k: np.ndarray = field(repr=False)           # upper state
    omega: np.ndarray = field(repr=False)
    c: np.ndarray = field(repr=False)           # <j|sigma_x|k>
    cp: np.ndarray = field(repr=False)          # <j|S|k>
    omega0: float
    floor: float
    excluded: tuple = ()                        # (j, k, omega) pairs below the floor

    def __len__(self) -> int:
        return len(self.omega)

    @property
    def dim(self) -> int:
        return len(self.energies)


def coulomb_coupling_operator(model: SystemModel) -> np.ndarray:
    """S = sigma_y + (i/omega0)[sigma_x, V]."""
    sx = model.sigma("x")
    comm = sx @ model.v - model.v @ sx
    return model.sigma("y") + 1j / model.tla.omega0 * comm


def enumerate_transitions(model: SystemModel, floor: float | None = None) -> TransitionTable:
    w0 = model.tla.omega0
    floor = DEGENERACY_FLOOR * w0 if floor is None else floor
    energies, vecs = np.linalg.eigh(model.h_s)
    sx_e = vecs.conj().T @ model.sigma("x") @ vecs
    s_e = vecs.conj().T @ coulomb_coupling_operator(model) @ vecs

    jj, kk = np.triu_indices(len(energies), k=1)
    om = energies[kk] - energies[jj]
    keep = om > floor
    excluded = tuple((int(a), int(b), float(o)) for a, b, o in zip(jj[~keep], kk[~keep], om[~keep]))
    jj, kk, om = jj[keep], kk[keep], om[keep]
    order = np.lexsort((kk, jj, om))
    jj, kk, om = jj[order], kk[order], om[order]
    table = TransitionTable(energies, vecs, jj, kk, om, sx_e[jj, kk], s_e[jj, kk], w0, floor,
                            excluded)
    for arr in (energies, vecs, jj, kk, om, table.c, table.cp):
        arr.setflags(write=False)
    return table


@dataclass(frozen=True)
class IdentityReport:
    max_residual: float
    threshold: float
    passed: bool
    residuals: np.ndarray = field(repr=False)


def verify_coupling_identity(table: TransitionTable, rel_tol: float = 1e-9) -> IdentityReport:
    """Residuals |c'_a - i (omega_a/omega0) c_a|; passes below rel_tol * max|c|."""
    res = np.abs(table.cp - 1j * table.omega / table.omega0 * table.c)
    mx = float(res.max()) if len(res) else 0.0
    cmax = float(np.abs(table.c).max()) if len(res) else 0.0
    thr = rel_tol * cmax
    return IdentityReport(mx, thr, mx < thr or mx == 0.0, res)
