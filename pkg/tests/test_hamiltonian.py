import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given
from hypothesis import strategies as st

from oracles import DenseFock, dense_gauge_hamiltonian, projector
from tlagauge.bath import discretize
from tlagauge.core import (ConfigurationError, GaugeChoice, GaugeKind, SpectralDensity,
                           TlaParams, ValidationError)
from tlagauge.emission.basis import EXCITED, GROUND, build_basis
from tlagauge.emission.hamiltonian import (FieldPolynomial, HamiltonianOptions,
                                           assemble_hamiltonian, basis_state,
                                           excitation_number, gauge_unitary,
                                           ground_state, initial_states, level_shift)

P = TlaParams.from_gamma0(1.0, 0.05)


def _setup(n, m, gamma0=0.05):
    p = TlaParams.from_gamma0(1.0, gamma0)
    bath = discretize(SpectralDensity.free_space(gamma0, 1.0), (0.5, 1.5), n)
    return p, bath, build_basis(n, m)


@pytest.mark.parametrize("n,m,power", [(2, 1, 2), (2, 2, 2), (3, 2, 3), (2, 2, 4)])
def test_field_powers_are_exact_projections(n, m, power):
    b = build_basis(n, m)
    w = np.array([0.7, 1.3, 0.4][:n])
    fock = DenseFock(n, m + power)
    p = projector(fock, n, m)
    x = fock.field(w)
    ref = p.T @ np.linalg.matrix_power(x, power) @ p
    got = FieldPolynomial(b, w).full_power(power).toarray()
    assert np.allclose(got, ref, atol=1e-12)


@pytest.mark.parametrize("kind,order,m", [
    ("dipole", 2, 1), ("dipole", 2, 2), ("naive-coulomb", 2, 1), ("naive-coulomb", 2, 2),
    ("milonni", 2, 2), ("corrected-coulomb", 1, 1), ("corrected-coulomb", 2, 2),
    ("corrected-coulomb", 3, 2)])
def test_hamiltonian_matches_dense_oracle(kind, order, m):
    p, bath, basis = _setup(3, m, gamma0=0.3)
    h = assemble_hamiltonian(basis, bath, p, GaugeChoice.parse(kind, order))
    ref = dense_gauge_hamiltonian(kind, bath.omegas, bath.g_dipole, p.omega0, p.d, m, order)
    assert np.allclose(h.matrix.toarray(), ref, atol=1e-12)
    assert h.hermiticity_error() < 1e-14


def test_corrected_order_one_equals_naive_without_a2():
    p, bath, basis = _setup(5, 1)
    a = assemble_hamiltonian(basis, bath, p, GaugeChoice.parse("corrected-coulomb", 1))
    b = assemble_hamiltonian(basis, bath, p, GaugeChoice.parse("naive-coulomb"),
                             HamiltonianOptions(xi0=0.0))
    assert (a.matrix != b.matrix).nnz == 0


def test_milonni_equals_naive_with_sum_rule():
    p, bath, basis = _setup(4, 2)
    a = assemble_hamiltonian(basis, bath, p, GaugeChoice.parse("milonni"))
    b = assemble_hamiltonian(basis, bath, p, GaugeChoice.parse("naive-coulomb"))
    assert abs(a.matrix - b.matrix).max() < 1e-14


def test_two_photon_conflict():
    p, bath, basis = _setup(4, 1)
    with pytest.raises(ConfigurationError):
        assemble_hamiltonian(basis, bath, p, GaugeChoice.parse("corrected-coulomb", 2))


def test_mode_mismatch():
    p, bath, _ = _setup(4, 1)
    with pytest.raises(ValidationError):
        assemble_hamiltonian(build_basis(5, 1), bath, p, GaugeChoice.parse("dipole"))


@given(st.sampled_from(["dipole", "naive-coulomb", "corrected-coulomb", "milonni"]),
       st.integers(2, 6), st.sampled_from([1, 2]), st.booleans())
def test_hermitian_every_gauge(kind, n, m, rwa):
    p, bath, basis = _setup(n, m)
    order = 1 if m == 1 else 2
    h = assemble_hamiltonian(basis, bath, p, GaugeChoice.parse(kind, order),
                             HamiltonianOptions(rwa=rwa))
    assert h.hermiticity_error() < 1e-14


@given(st.sampled_from(["dipole", "naive-coulomb", "corrected-coulomb"]), st.integers(2, 6))
def test_rwa_conserves_excitations(kind, n):
    p, bath, basis = _setup(n, 2)
    h = assemble_hamiltonian(basis, bath, p, GaugeChoice.parse(kind, 2),
                             HamiltonianOptions(rwa=True)).matrix
    num = excitation_number(basis)
    assert abs(h @ num - num @ h).max() < 1e-13


def test_rwa_dipole_single_excitation_block():
    p, bath, basis = _setup(3, 1)
    h = assemble_hamiltonian(basis, bath, p, GaugeChoice.parse("dipole"),
                             HamiltonianOptions(rwa=True)).matrix
    e = basis.index(EXCITED)
    for k in range(3):
        assert h[e, basis.index(GROUND, (k,))] == pytest.approx(-bath.g_dipole[k])


def test_shift_compensation_moves_excited_level():
    p, bath, basis = _setup(50, 1)
    g = GaugeChoice.parse("dipole")
    plain = assemble_hamiltonian(basis, bath, p, g, HamiltonianOptions(rwa=True))
    comp = assemble_hamiltonian(basis, bath, p, g, HamiltonianOptions(rwa=True,
                                                                       shift_compensation=True))
    e = basis.index(EXCITED)
    assert comp.matrix[e, e].real == pytest.approx(1.0 - comp.level_shift)
    # golden-rule shift from the discrete sum (oracle written out directly)
    eta = 0.5 * 0.05
    ref = np.sum(bath.g_dipole**2 / (1.0 - bath.omegas + 1j * eta)).real
    assert level_shift(plain.matrix, basis, bath, 1.0, eta) == pytest.approx(ref, rel=1e-12)


def test_gauge_unitary_matches_series_of_dense_exponential():
    p, bath, basis = _setup(2, 2, gamma0=0.3)
    h = assemble_hamiltonian(basis, bath, p, GaugeChoice.parse("corrected-coulomb", 2))
    fock = DenseFock(2, 6)
    pr = np.kron(np.eye(2), projector(fock, 2, 2))
    phi = fock.field(2 * bath.g_dipole / bath.omegas)
    sx = np.array([[0, 1], [1, 0]])
    gen = 0.5j * np.kron(sx, phi)
    series = np.eye(gen.shape[0]) + gen + gen @ gen / 2
    assert np.allclose(gauge_unitary(h).toarray(), pr.T @ series @ pr, atol=1e-12)
    # the untruncated exponential is close for small couplings
    exact = pr.T @ sla.expm(gen) @ pr
    assert np.abs(gauge_unitary(h, 3).toarray() - exact).max() < 5e-3


def test_initial_state_protocols():
    p, bath, basis = _setup(4, 2)
    dip = assemble_hamiltonian(basis, bath, p, GaugeChoice.parse("dipole"))
    cor = assemble_hamiltonian(basis, bath, p, GaugeChoice.parse("corrected-coulomb", 2))
    psi, base = initial_states(dip, "gauge-mapped")
    assert np.array_equal(psi, basis_state(basis, EXCITED))
    psi, base = initial_states(cor, "gauge-mapped")
    assert np.linalg.norm(psi) == pytest.approx(1.0)
    assert abs(psi[basis.index(EXCITED)]) > 0.99
    assert abs(psi[basis.index(EXCITED)]) < 1.0
    psi, g = initial_states(cor, "dressed-flip")
    dense = np.linalg.eigh(cor.matrix.toarray())
    assert abs(np.vdot(dense[1][:, 0], g)) == pytest.approx(1.0, abs=1e-10)
    assert np.allclose(ground_state(cor), g)
