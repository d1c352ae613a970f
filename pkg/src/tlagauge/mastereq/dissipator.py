"""Born-Markov dissipators in the eigenbasis of the system Hamiltonian.

Frequency shifts (principal-value parts of the half-range integrals) are
dropped. Only decay rates enter.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..core import GaugeChoice, GaugeKind, SpectralDensity
from .transitions import TransitionTable


class MasterGauge(enum.Enum):
    DIPOLE = "dipole"
    COULOMB = "coulomb"

    @classmethod
    def coerce(cls, g) -> "MasterGauge":
        if isinstance(g, MasterGauge):
            return g
        if isinstance(g, GaugeChoice):
            return cls.DIPOLE if g.kind is GaugeKind.DIPOLE else cls.COULOMB
        s = str(g).lower()
        if s in ("dipole",):
            return cls.DIPOLE
        if s in ("coulomb", "naive-coulomb", "corrected-coulomb", "milonni"):
            return cls.COULOMB
        raise ValueError(f"unknown gauge {g!r}")


@dataclass(frozen=True, eq=False)
class Dissipator:
    gauge: MasterGauge
    secular: bool
    delta_sec: float
    table: TransitionTable = field(repr=False)
    rates: np.ndarray = field(repr=False)   # R[a, b], zero outside the retained pairs

    def terms(self):
        """(a, b, R_ab, (j_a, k_a), (j_b, k_b)) for each nonzero rate."""
        t = self.table
        for a, b in zip(*np.nonzero(self.rates)):
            yield (int(a), int(b), complex(self.rates[a, b]),
                   (int(t.j[a]), int(t.k[a])), (int(t.j[b]), int(t.k[b])))

    def superoperator(self) -> sp.csr_matrix:
        """Row-major vectorized generator acting on eigenbasis density matrices."""
        t = self.table
        d = t.dim
        a, b = np.nonzero(self.rates)
        r = self.rates[a, b]
        ja, ka, jb, kb = t.j[a], t.k[a], t.j[b], t.k[b]
        # sigma_a rho sigma_b^dag and its Hermitian conjugate
        rows = np.concatenate([ja * d + jb, jb * d + ja])
        cols = np.concatenate([ka * d + kb, kb * d + ka])
        vals = 0.5 * np.concatenate([r, r.conj()])
        gain = sp.csr_matrix((vals, (rows, cols)), shape=(d * d, d * d))
        # K = sum_{a,b: j_a = j_b} R_ab |k_b><k_a|, i.e. sigma_b^dag sigma_a summed
        same = ja == jb
        kmat = sp.csr_matrix((r[same], (kb[same], ka[same])), shape=(d, d))
        eye = sp.identity(d, format="csr")
        loss = 0.5 * (sp.kron(kmat, eye) + sp.kron(eye, kmat.conj()))
        out = (gain - loss).tocsr()
        out.sum_duplicates()
        return out

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Dissipator acting on a product-basis density matrix."""
        u = self.table.vectors
        d = self.table.dim
        r_e = u.conj().T @ rho @ u
        out = (self.superoperator() @ r_e.reshape(-1)).reshape(d, d)
        return u @ out @ u.conj().T

    def lindblad_channels(self):
        """Diagonalize the rate matrix: (rate, jump operator in eigenbasis) pairs.

        For secular dissipators the rate matrix is block diagonal over
        degenerate transition frequencies and positive semidefinite when the
        spectral density is nonnegative.
        """
        herm = 0.5 * (self.rates + self.rates.conj().T)
        lam, vec = np.linalg.eigh(herm)
        t = self.table
        out = []
        for i in range(len(lam)):
            op = np.zeros((t.dim, t.dim), dtype=complex)
            np.add.at(op, (t.j, t.k), vec[:, i])
            out.append((float(lam[i]), op))
        return out

    def max_rate(self) -> float:
        return float(np.abs(self.rates).max()) if self.rates.size else 0.0


def secular_mask(table: TransitionTable, delta_sec: float | None = None) -> np.ndarray:
    tol = table.floor if not delta_sec else max(delta_sec, table.floor)
    return np.abs(table.omega[:, None] - table.omega[None, :]) <= tol


def build_dissipator(table: TransitionTable, sd: SpectralDensity, gauge, secular: bool = True,
                     delta_sec: float | None = None) -> Dissipator:
    gauge = MasterGauge.coerce(gauge)
    om = table.omega
    gam = np.asarray(sd(om), dtype=float)
    rates = gam[:, None] * table.c[:, None] * table.c.conj()[None, :]
    if gauge is MasterGauge.COULOMB:
        rates = rates * (om[None, :] / om[:, None])
    if secular:
        rates = np.where(secular_mask(table, delta_sec), rates, 0.0)
    rates = np.ascontiguousarray(rates)
    rates.setflags(write=False)
    return Dissipator(gauge, bool(secular), float(delta_sec or 0.0), table, rates)


def rate_gap(dip: Dissipator, coul: Dissipator) -> dict:
    """Norms of R - R' and the frequency-ratio diagnostic over retained pairs."""
    diff = np.abs(dip.rates - coul.rates).max() if dip.rates.size else 0.0
    ref = dip.max_rate()
    retained = np.abs(dip.rates) > 0
    om = dip.table.omega
    ratio = np.abs(om[None, :] / om[:, None] - 1.0)
    return {
        "gap_max": float(diff),
        "gap_rel": float(diff / ref) if ref > 0 else 0.0,
        "max_freq_ratio_dev": float(ratio[retained].max()) if retained.any() else 0.0,
    }
