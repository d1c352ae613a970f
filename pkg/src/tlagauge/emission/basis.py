"""Truncated Fock space of an atom plus N photon modes."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np
import scipy.sparse as sp

from ..core import ConfigurationError, ValidationError

GROUND, EXCITED = 0, 1


@dataclass(frozen=True, eq=False)
class FockBasis:
    """Basis |atom> x |photon multiset> with at most ``max_photons`` photons.

    Ordering: the whole ground-state block precedes the excited block; inside a
    block, photon number grades ascend and each grade is in lexicographic order
    of the sorted mode tuple. Index = atom * field_dim + field_index.
    """

    n_modes: int
    max_photons: int
    sectors: tuple = field(repr=False)   # sectors[n]: (m_n, n) int array
    offsets: tuple = field(repr=False)

    @property
    def field_dim(self) -> int:
        return self.offsets[-1]

    @property
    def dim(self) -> int:
        return 2 * self.field_dim

    def _codes(self, n):
        return _encode(self.sectors[n], self.n_modes)

    def field_index(self, photons) -> int:
        photons = tuple(sorted(int(k) for k in photons))
        n = len(photons)
        if n > self.max_photons or any(not 0 <= k < self.n_modes for k in photons):
            raise KeyError(photons)
        code = _encode(np.array([photons], dtype=np.int64).reshape(1, n), self.n_modes)[0]
        codes = self._codes(n)
        i = int(np.searchsorted(codes, code))
        if i >= len(codes) or codes[i] != code:
            raise KeyError(photons)
        return self.offsets[n] + i

    def index(self, atom: int, photons=()) -> int:
        if atom not in (GROUND, EXCITED):
            raise KeyError(atom)
        return atom * self.field_dim + self.field_index(photons)

    def label(self, index: int):
        if not 0 <= index < self.dim:
            raise IndexError(index)
        atom, f = divmod(int(index), self.field_dim)
        n = int(np.searchsorted(self.offsets, f, side="right")) - 1
        return atom, tuple(int(k) for k in self.sectors[n][f - self.offsets[n]])

    def photon_numbers(self) -> np.ndarray:
        """Total photon number of each field state."""
        return np.concatenate([np.full(len(s), n) for n, s in enumerate(self.sectors)])

    def field_energies(self, omegas) -> np.ndarray:
        omegas = np.asarray(omegas, dtype=float)
        parts = [omegas[s].sum(axis=1) if s.shape[1] else np.zeros(len(s)) for s in self.sectors]
        return np.concatenate(parts)

    def occupation(self) -> sp.csr_matrix:
        """(field_dim, n_modes) matrix of occupation numbers n_k per field state."""
        rows, cols = [], []
        for n, s in enumerate(self.sectors):
            if n == 0:
                continue
            r = self.offsets[n] + np.repeat(np.arange(len(s)), n)
            rows.append(r)
            cols.append(s.reshape(-1))
        if not rows:
            return sp.csr_matrix((self.field_dim, self.n_modes))
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        return sp.csr_matrix((np.ones(len(r)), (r, c)), shape=(self.field_dim, self.n_modes))

    def raising(self, weights) -> sp.csr_matrix:
        """Truncated sum_k w_k b_k^dag on the field space."""
        weights = np.asarray(weights)
        if weights.shape != (self.n_modes,):
            raise ValidationError("weights must have one entry per mode")
        rows, cols, vals = [], [], []
        for n in range(self.max_photons):
            src = self.sectors[n]
            m = len(src)
            ks = np.tile(np.arange(self.n_modes), m)
            old = np.repeat(src, self.n_modes, axis=0)
            new = np.sort(np.concatenate([old, ks[:, None]], axis=1), axis=1)
            occ = (old == ks[:, None]).sum(axis=1) + 1
            dst = np.searchsorted(self._codes(n + 1), _encode(new, self.n_modes))
            rows.append(self.offsets[n + 1] + dst)
            cols.append(self.offsets[n] + np.repeat(np.arange(m), self.n_modes))
            vals.append(np.sqrt(occ) * weights[ks])
        if not rows:
            return sp.csr_matrix((self.field_dim, self.field_dim), dtype=weights.dtype)
        out = sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.field_dim, self.field_dim))
        out.sum_duplicates()
        return out


def _encode(states: np.ndarray, n_modes: int) -> np.ndarray:
    n = states.shape[1]
    if n == 0:
        return np.zeros(len(states), dtype=np.int64)
    powers = n_modes ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return states.astype(np.int64) @ powers


def expected_dim(n_modes: int, max_photons: int) -> int:
    return 2 * sum(comb(n_modes + n - 1, n) for n in range(max_photons + 1))


def build_basis(n_modes: int, max_photons: int) -> FockBasis:
    if max_photons not in (1, 2):
        raise ConfigurationError(f"max_photons must be 1 or 2, got {max_photons}")
    if n_modes < 1:
        raise ValidationError(f"n_modes must be positive, got {n_modes}")
    sectors = []
    for n in range(max_photons + 1):
        if n == 0:
            s = np.zeros((1, 0), dtype=np.int64)
        elif n == 1:
            s = np.arange(n_modes, dtype=np.int64)[:, None]
        else:
            s = np.array(list(itertools.combinations_with_replacement(range(n_modes), n)),
                         dtype=np.int64).reshape(-1, n)
        s.setflags(write=False)
        sectors.append(s)
    offsets = tuple(int(x) for x in np.concatenate([[0], np.cumsum([len(s) for s in sectors])]))
    return FockBasis(n_modes, max_photons, tuple(sectors), offsets)
