"""Conservation properties across randomly drawn inputs."""
import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st

from tlagauge.bath import QuadratureRule, discretize
from tlagauge.core import GaugeChoice, SpectralDensity, TlaParams
from tlagauge.emission.basis import build_basis
from tlagauge.emission.hamiltonian import (HamiltonianOptions, assemble_hamiltonian,
                                           excitation_number, initial_states)
from tlagauge.emission.propagate import propagate
from tlagauge.mastereq import (build_dissipator, enumerate_transitions, evolve_density_matrix,
                               random_system)

pytestmark = pytest.mark.filterwarnings("ignore:oscillator")

gauges = st.sampled_from(["dipole", "naive-coulomb", "corrected-coulomb", "milonni"])
gammas = st.floats(0.005, 0.1)


def emission_hamiltonian(kind, n, m, gamma0, rwa, rule="uniform", order=None):
    p = TlaParams.from_gamma0(1.0, gamma0)
    bath = discretize(SpectralDensity.free_space(gamma0, 1.0), (0.5, 1.5), n,
                      QuadratureRule(rule))
    order = order or (2 if m == 2 else 1)
    return assemble_hamiltonian(build_basis(n, m), bath, p, GaugeChoice.parse(kind, order),
                                HamiltonianOptions(rwa=rwa, shift_compensation=True))


@given(gauges, st.integers(2, 12), st.sampled_from([1, 2]), gammas, st.booleans(),
       st.sampled_from(["uniform", "gauss-legendre"]))
def test_hamiltonians_are_hermitian(kind, n, m, g0, rwa, rule):
    h = emission_hamiltonian(kind, n, m, g0, rwa, rule)
    assert h.hermiticity_error() < 1e-14


@given(gauges, st.integers(2, 10), st.sampled_from([1, 2]), gammas, st.booleans(),
       st.floats(1.0, 200.0))
def test_unitary_norm_conserved(kind, n, m, g0, rwa, t):
    h = emission_hamiltonian(kind, n, m, g0, rwa)
    psi, _ = initial_states(h, "gauge-mapped")
    tol = 1e-10
    traj = propagate(h, psi, t, tol=tol, checkpoints=np.linspace(0, t, 4))
    assert np.all(np.abs(traj.norms - 1.0) <= tol)


@given(st.sampled_from(["dipole", "naive-coulomb", "corrected-coulomb"]), st.integers(2, 8),
       gammas, st.floats(1.0, 100.0))
def test_rwa_conserves_excitation_number_in_time(kind, n, g0, t):
    h = emission_hamiltonian(kind, n, 2, g0, True)
    num = excitation_number(h.basis)
    assert abs(h.matrix @ num - num @ h.matrix).max() < 1e-13
    psi, _ = initial_states(h, "bare")
    out = propagate(h, psi, t).final
    assert abs(np.vdot(out, num @ out).real - 1.0) < 1e-10


@given(st.integers(0, 2**31 - 1), st.sampled_from(["exchange", "full", "aux-only",
                                                   "exchange-like"]),
       st.booleans(), st.sampled_from(["dipole", "coulomb"]))
def test_dissipators_preserve_trace(seed, structure, secular, gauge):
    p = TlaParams.from_gamma0(1.0, 0.02)
    rng = np.random.default_rng(seed)
    m = random_system(rng, p, 24, structure, 0.3)
    d = build_dissipator(enumerate_transitions(m), SpectralDensity.free_space(0.02, 1.0),
                         gauge, secular)
    a = rng.normal(size=(m.dim, m.dim)) + 1j * rng.normal(size=(m.dim, m.dim))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    assert abs(np.trace(d.apply(rho))) < 1e-10 * max(1.0, d.max_rate())
    # the column sums of the vectorized generator vanish on the trace functional
    sup = d.superoperator()
    tr = sp.identity(m.dim, format="csr").reshape(1, m.dim * m.dim)
    assert abs(tr @ sup).max() < 1e-12


@given(st.integers(0, 2**31 - 1), st.sampled_from(["exchange", "full", "exchange-like"]))
def test_secular_maps_are_positive(seed, structure):
    p = TlaParams.from_gamma0(1.0, 0.02)
    rng = np.random.default_rng(seed)
    m = random_system(rng, p, 16, structure, 0.3)
    t = enumerate_transitions(m)
    d = build_dissipator(t, SpectralDensity.free_space(0.02, 1.0), "coulomb", True)
    assert min(c[0] for c in d.lindblad_channels()) > -1e-15
    psi = rng.normal(size=m.dim) + 1j * rng.normal(size=m.dim)
    psi /= np.linalg.norm(psi)
    tr = evolve_density_matrix(m, d, np.outer(psi, psi.conj()), 300.0,
                               checkpoints=np.linspace(0, 300, 7))
    assert tr.min_eigenvalue >= -1e-10
    assert tr.trace_drift < 1e-10
