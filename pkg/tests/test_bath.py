import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tlagauge.bath import (QuadratureRule, coupling_for_gauge, discretize,
                           vector_potential_weights)
from tlagauge.core import (DIPOLE, NAIVE_COULOMB, SpectralDensity, TlaParams, ValidationError)

SD = SpectralDensity.free_space(0.02, 1.0)


def test_uniform_midpoints_and_couplings():
    b = discretize(SD, (0.5, 1.5), 4)
    assert np.allclose(b.omegas, [0.625, 0.875, 1.125, 1.375])
    assert np.allclose(b.weights, 0.25)
    assert np.allclose(b.g_dipole**2, SD(b.omegas) * 0.25 / (2 * np.pi))
    assert not b.omegas.flags.writeable


@given(st.integers(2, 400), st.sampled_from(list(QuadratureRule)))
def test_rate_sum_integrates_density(n, rule):
    # sum g_k^2 approximates the integral of Gamma / 2 pi over the band
    b = discretize(SD, (0.5, 1.5), n, rule)
    exact = 0.02 * (1.5**4 - 0.5**4) / 4 / (2 * np.pi)
    tol = 1e-12 if rule is QuadratureRule.GAUSS_LEGENDRE else 1.0 / n**2
    assert b.rate_sum() == pytest.approx(exact, rel=tol)


@pytest.mark.parametrize("band,n", [((0.0, 1.0), 10), ((1.0, 0.5), 10), ((0.5, 1.5), 1)])
def test_invalid_inputs(band, n):
    with pytest.raises(ValidationError):
        discretize(SD, band, n)


def test_coulomb_coupling_scales_inverse_frequency():
    b = discretize(SD, (0.5, 1.5), 10)
    p = TlaParams.from_gamma0(1.0, 0.02)
    gd = coupling_for_gauge(b, DIPOLE, p)
    gc = coupling_for_gauge(b, NAIVE_COULOMB, p)
    assert np.allclose(gc / gd, 1.0 / b.omegas)
    assert np.allclose(vector_potential_weights(b) * b.omegas, b.g_dipole)
