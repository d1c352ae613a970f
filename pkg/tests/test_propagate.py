import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm
from scipy.sparse.linalg import expm_multiply

from tlagauge.emission.propagate import (PropagationError, chebyshev_step, propagate,
                                         spectral_bounds)


def random_hermitian(n, seed, density=0.3):
    rng = np.random.default_rng(seed)
    a = sp.random(n, n, density=density, random_state=rng, format="csr") * (1 + 1j)
    return ((a + a.getH()) * 0.5).tocsr()


def random_state(n, seed):
    rng = np.random.default_rng(seed + 1)
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


@given(st.integers(2, 60), st.integers(0, 10_000), st.floats(0.01, 30.0))
def test_matches_dense_exponential(n, seed, t):
    h = random_hermitian(n, seed)
    psi = random_state(n, seed)
    ref = expm(-1j * t * h.toarray()) @ psi
    out = propagate(h, psi, t, tol=1e-11).final
    assert np.abs(out - ref).max() < 1e-9


def test_matches_scipy_expm_multiply_with_checkpoints():
    h = random_hermitian(200, 3, 0.05)
    psi = random_state(200, 3)
    traj = propagate(h, psi, 5.0, checkpoints=[1.0, 2.5])
    assert np.allclose(traj.times, [1.0, 2.5, 5.0])
    for t, state in zip(traj.times, traj.states):
        assert np.abs(state - expm_multiply(-1j * t * h, psi)).max() < 1e-9
    assert np.all(np.abs(traj.norms - 1) < 1e-10)


def test_gershgorin_contains_spectrum():
    h = random_hermitian(40, 9)
    lo, hi = spectral_bounds(h)
    ev = np.linalg.eigvalsh(h.toarray())
    assert lo <= ev.min() and ev.max() <= hi


def test_scalar_hamiltonian():
    h = sp.identity(3, format="csr") * 2.0
    psi = np.array([1, 0, 0], dtype=complex)
    assert np.allclose(propagate(h, psi, 0.7).final, np.exp(-1.4j) * psi)


def test_wrong_bounds_trigger_norm_error():
    h = random_hermitian(30, 4)
    psi = random_state(30, 4)
    lo, hi = spectral_bounds(h)
    # bounds far too narrow: Chebyshev series diverges and the norm check fires
    mid = 0.5 * (lo + hi)
    with pytest.raises(PropagationError) as info:
        propagate(h, psi, 50.0, bounds=(mid - 1e-3, mid + 1e-3))
    assert "drift" in info.value.diagnostics


def test_unnormalized_input_rejected():
    with pytest.raises(ValueError):
        propagate(sp.identity(2, format="csr"), np.array([1.0, 1.0]), 1.0)


def test_single_step_counts_terms():
    h = random_hermitian(10, 1)
    lo, hi = spectral_bounds(h)
    _, k_short = chebyshev_step(h, random_state(10, 1), 0.1, lo, hi, 1e-10)
    _, k_long = chebyshev_step(h, random_state(10, 1), 10.0, lo, hi, 1e-10)
    assert k_long > k_short
