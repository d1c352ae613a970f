"""Sparse Hamiltonians of the atom + discretized field in each gauge."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from ..bath import ModeBath, vector_potential_weights
from ..core import ConfigurationError, GaugeChoice, GaugeKind, TlaParams, ValidationError
from .basis import EXCITED, GROUND, FockBasis

# atom ordering (g, e); sigma_y is the standard Pauli matrix with sigma_z|e> = |e>
SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()
SIGMA_X = SIGMA_PLUS + SIGMA_MINUS
SIGMA_Y = -1j * SIGMA_PLUS + 1j * SIGMA_MINUS
SIGMA_Z = np.diag([-1.0, 1.0]).astype(complex)
PROJ_E = np.diag([0.0, 1.0]).astype(complex)
IDENT2 = np.eye(2, dtype=complex)

# (matrix, change of atomic excitation); used to apply the RWA term by term
_PIECES = {
    "x": [(SIGMA_PLUS, +1), (SIGMA_MINUS, -1)],
    "y": [(-1j * SIGMA_PLUS, +1), (1j * SIGMA_MINUS, -1)],
    "z": [(SIGMA_Z, 0)],
    "1": [(IDENT2, 0)],
}


def derive_xi0(params: TlaParams) -> float:
    """A^2 coefficient from the Thomas-Reiche-Kuhn sum rule saturated by one transition."""
    return params.d**2 * params.omega0


@dataclass(frozen=True)
class HamiltonianOptions:
    rwa: bool = False
    xi0: float | None = None          # naive Coulomb only; None -> TRK value
    include_a2: bool = True           # naive Coulomb only
    shift_compensation: bool = False  # subtract the second-order atomic level shift
    shift_eta: float | None = None    # resolvent broadening; None -> Gamma(omega0)/2


@dataclass(frozen=True, eq=False)
class GaugeHamiltonian:
    gauge: GaugeChoice
    matrix: sp.csr_matrix = field(repr=False)
    basis: FockBasis = field(repr=False)
    bath: ModeBath = field(repr=False)
    params: TlaParams
    rwa: bool
    xi0: float | None
    level_shift: float  # counterterm applied to sigma+sigma- (0 if none)
    phi_weights: np.ndarray = field(repr=False)

    @property
    def expansion_order(self):
        return self.gauge.expansion_order if self.gauge.kind is GaugeKind.CORRECTED_COULOMB else None

    @property
    def dim(self) -> int:
        return self.basis.dim

    def hermiticity_error(self) -> float:
        diff = self.matrix - self.matrix.getH()
        return float(abs(diff).max()) if diff.nnz else 0.0


class FieldPolynomial:
    """Normal-ordered powers of X = sum_k w_k (b_k + b_k^dag) on a truncated basis.

    Normal ordering keeps every intermediate state inside the truncation, so
    the returned matrices are exact projections P X^n P.
    """

    def __init__(self, basis: FockBasis, weights):
        self.raise_ = basis.raising(np.asarray(weights, dtype=float)).astype(complex)
        self.lower = self.raise_.T.tocsr()
        self.s = float(np.sum(np.asarray(weights) ** 2))  # [L, R]
        self.dim = basis.field_dim
        self._cache = {}

    def _word(self, j, k):
        key = (j, k)
        if key not in self._cache:
            out = sp.identity(self.dim, dtype=complex, format="csr")
            for _ in range(k):
                out = self.lower @ out
            for _ in range(j):
                out = self.raise_ @ out
            self._cache[key] = out.tocsr()
        return self._cache[key]

    def power(self, n: int) -> dict:
        """{photon-number change: matrix} with sum equal to P X^n P."""
        terms = {}
        for m in range(n // 2 + 1):
            for j in range(n - 2 * m + 1):
                k = n - 2 * m - j
                coeff = math.factorial(n) / (math.factorial(j) * math.factorial(k)
                                             * math.factorial(m) * 2**m) * self.s**m
                mat = coeff * self._word(j, k)
                delta = j - k
                terms[delta] = terms[delta] + mat if delta in terms else mat
        return terms

    def full_power(self, n: int) -> sp.csr_matrix:
        out = sp.csr_matrix((self.dim, self.dim), dtype=complex)
        for mat in self.power(n).values():
            out = out + mat
        return out.tocsr()


def _couple(atom: str, field_terms: dict, rwa: bool):
    out = None
    for amat, da in _PIECES[atom]:
        for delta, fmat in field_terms.items():
            if rwa and da + delta != 0:
                continue
            term = sp.kron(sp.csr_matrix(amat), fmat, format="csr")
            out = term if out is None else out + term
    return out


def _scaled(terms: dict, c: float) -> dict:
    return {k: c * v for k, v in terms.items()}


def free_hamiltonian(basis: FockBasis, bath: ModeBath, omega0: float) -> sp.csr_matrix:
    ef = basis.field_energies(bath.omegas)
    diag = np.concatenate([ef, ef + omega0])
    return sp.diags(diag.astype(complex), format="csr")


def excitation_number(basis: FockBasis) -> sp.csr_matrix:
    nph = basis.photon_numbers().astype(float)
    return sp.diags(np.concatenate([nph, nph + 1.0]).astype(complex), format="csr")


def assemble_hamiltonian(basis: FockBasis, bath: ModeBath, params: TlaParams,
                         gauge: GaugeChoice, options: HamiltonianOptions | None = None
                         ) -> GaugeHamiltonian:
    opts = options or HamiltonianOptions()
    if basis.n_modes != bath.n_modes:
        raise ValidationError(f"basis has {basis.n_modes} modes but bath has {bath.n_modes}")
    kind = gauge.kind
    if kind is GaugeKind.CORRECTED_COULOMB and gauge.expansion_order >= 2 and basis.max_photons < 2:
        raise ConfigurationError(
            "corrected Coulomb with expansion_order >= 2 needs max_photons=2 "
            "(the Phi^2 terms act on two-photon states)")

    w0 = params.omega0
    u = vector_potential_weights(bath)
    phi_w = 2.0 * u
    h = free_hamiltonian(basis, bath, w0)
    xi0 = None

    if kind is GaugeKind.DIPOLE:
        xe = FieldPolynomial(basis, bath.g_dipole)
        h = h + _couple("x", _scaled(xe.power(1), -1.0), opts.rwa)
    else:
        phi = FieldPolynomial(basis, phi_w)
        h = h + _couple("y", _scaled(phi.power(1), 0.5 * w0), opts.rwa)
        if kind is GaugeKind.NAIVE_COULOMB and opts.include_a2:
            xi0 = derive_xi0(params) if opts.xi0 is None else float(opts.xi0)
            if xi0 != 0.0:
                # xi0 A^2 with A = Phi / (2 d)
                h = h + _couple("1", _scaled(phi.power(2), xi0 / (4 * params.d**2)), opts.rwa)
        elif kind is GaugeKind.MILONNI:
            xi0 = w0 * params.d**2
            # omega0 (d.A)^2 = omega0 Phi^2 / 4
            h = h + _couple("1", _scaled(phi.power(2), 0.25 * w0), opts.rwa)
        elif kind is GaugeKind.CORRECTED_COULOMB:
            order = gauge.expansion_order
            # (w0/2) [ (cos Phi - 1) sigma_z + (sin Phi - Phi) sigma_y ]
            for n in range(2, order + 1):
                if n % 2 == 0:
                    c = 0.5 * w0 * (-1) ** (n // 2) / math.factorial(n)
                    h = h + _couple("z", _scaled(phi.power(n), c), opts.rwa)
                else:
                    c = 0.5 * w0 * (-1) ** ((n - 1) // 2) / math.factorial(n)
                    h = h + _couple("y", _scaled(phi.power(n), c), opts.rwa)

    h = h.tocsr()
    shift = 0.0
    if opts.shift_compensation:
        eta = opts.shift_eta
        if eta is None:
            eta = 0.5 * float(bath.sd(w0))
        shift = level_shift(h, basis, bath, w0, eta)
        if shift != 0.0:
            h = (h - shift * sp.kron(sp.csr_matrix(PROJ_E), sp.identity(basis.field_dim),
                                     format="csr")).tocsr()
    h.sum_duplicates()
    h.eliminate_zeros()
    return GaugeHamiltonian(gauge, h, basis, bath, params, opts.rwa, xi0, shift, phi_w)


def level_shift(h: sp.csr_matrix, basis: FockBasis, bath: ModeBath, omega0: float,
                eta: float) -> float:
    """Second-order shift of |e,vac> relative to |g,vac>.

    Resolvent denominators carry +i*eta so that near-resonant discrete modes
    approximate the continuum principal value.
    """
    h0 = free_hamiltonian(basis, bath, omega0).diagonal()
    v = (h - sp.diags(h0)).tocsc()
    shifts = []
    for atom in (EXCITED, GROUND):
        s = basis.index(atom)
        col = v[:, s].toarray().ravel()
        first = col[s].real
        col[s] = 0.0
        mask = col != 0
        denom = h0[s].real - h0.real[mask] + 1j * eta
        second = np.sum(np.abs(col[mask]) ** 2 / denom).real
        shifts.append(first + second)
    return float(shifts[0] - shifts[1])


# -- initial states -----------------------------------------------------------

class InitialState(enum.Enum):
    BARE = "bare"                  # |e,vac>, baseline |g,vac>
    GAUGE_MAPPED = "gauge-mapped"  # W|e,vac> for the corrected gauge, bare otherwise
    DRESSED_FLIP = "dressed-flip"  # sigma_x applied to the interacting ground state


def basis_state(basis: FockBasis, atom: int, photons=()) -> np.ndarray:
    psi = np.zeros(basis.dim, dtype=complex)
    psi[basis.index(atom, photons)] = 1.0
    return psi


def gauge_unitary(ham: GaugeHamiltonian, order: int | None = None) -> sp.csr_matrix:
    """exp(i Phi sigma_x / 2) Taylor expanded to ``order`` (default: gauge order)."""
    order = ham.expansion_order if order is None else order
    if order is None:
        raise ConfigurationError("gauge unitary needs an expansion order")
    phi = FieldPolynomial(ham.basis, ham.phi_weights)
    out = sp.identity(ham.dim, dtype=complex, format="csr")
    sx = sp.csr_matrix(SIGMA_X)
    for n in range(1, order + 1):
        atom = sx if n % 2 else sp.identity(2, dtype=complex, format="csr")
        out = out + (0.5j) ** n / math.factorial(n) * sp.kron(atom, phi.full_power(n), format="csr")
    return out.tocsr()


def ground_state(ham: GaugeHamiltonian, tol: float = 1e-12) -> np.ndarray:
    if ham.dim <= 400:
        w, v = np.linalg.eigh(ham.matrix.toarray())
        psi = v[:, 0]
    else:
        v0 = basis_state(ham.basis, GROUND)
        w, v = eigsh(ham.matrix, k=1, which="SA", v0=v0, tol=tol)
        psi = v[:, 0]
    # fix global phase on the bare ground component for reproducibility
    ref = psi[ham.basis.index(GROUND)]
    if abs(ref) > 0:
        psi = psi * (abs(ref) / ref)
    return psi / np.linalg.norm(psi)


def initial_states(ham: GaugeHamiltonian, protocol: InitialState | str = InitialState.GAUGE_MAPPED):
    """(psi0, baseline) for an emission run."""
    protocol = InitialState(protocol)
    b = ham.basis
    excited, ground = basis_state(b, EXCITED), basis_state(b, GROUND)
    if protocol is InitialState.BARE or (
            protocol is InitialState.GAUGE_MAPPED
            and ham.gauge.kind is not GaugeKind.CORRECTED_COULOMB):
        return excited, ground
    if protocol is InitialState.GAUGE_MAPPED:
        w = gauge_unitary(ham)
        psi, base = w @ excited, w @ ground
        return psi / np.linalg.norm(psi), base / np.linalg.norm(base)
    g = ground_state(ham)
    flip = sp.kron(sp.csr_matrix(SIGMA_X), sp.identity(b.field_dim), format="csr")
    psi = flip @ g
    return psi / np.linalg.norm(psi), g
