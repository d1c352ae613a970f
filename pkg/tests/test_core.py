import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tlagauge.core import (ConfigurationError, DomainError, GaugeChoice, GaugeKind,
                           LineshapeModel, LineshapeVariant, SpectralDensity, TlaParams,
                           ValidationError, derive_gamma0, eval_lineshape,
                           eval_spectral_density, markov_window_integral)

pos = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)


def test_gamma0_formula():
    assert derive_gamma0(1.0, 1.0) == pytest.approx(1 / (3 * math.pi))
    assert derive_gamma0(2.0, 0.5) == pytest.approx(0.25 * 8 / (3 * math.pi))


@pytest.mark.parametrize("w0,d", [(0.0, 1.0), (-1.0, 1.0), (1.0, -0.1)])
def test_gamma0_domain(w0, d):
    with pytest.raises(DomainError):
        derive_gamma0(w0, d)


@given(pos, pos)
def test_gamma0_roundtrip(w0, g0):
    p = TlaParams.from_gamma0(w0, g0)
    assert p.gamma0 == pytest.approx(g0, rel=1e-12)


def test_params_require_positive_dipole():
    with pytest.raises(DomainError):
        TlaParams(1.0, 0.0)


def test_gauge_parse_and_order():
    assert GaugeChoice.parse("naive-coulomb").kind is GaugeKind.NAIVE_COULOMB
    assert GaugeChoice.parse("dipole").is_coulomb is False
    with pytest.raises(ConfigurationError):
        GaugeChoice.parse("velocity")
    with pytest.raises(ConfigurationError):
        GaugeChoice(GaugeKind.CORRECTED_COULOMB, 4)


def test_free_space_density_cubic():
    sd = SpectralDensity.free_space(0.02, 1.0)
    assert sd(1.0) == pytest.approx(0.02)
    assert sd(2.0) == pytest.approx(0.16)
    assert sd(0.0) == 0.0 and sd(-1.0) == 0.0
    out = sd(np.array([0.5, 1.0]))
    assert isinstance(out, np.ndarray)
    assert isinstance(sd(1.0), float)


def test_power_law_and_tabulated():
    flat = SpectralDensity.power_law(0.0, 0.3, 1.0)
    assert np.allclose(flat(np.array([0.2, 1.0, 5.0])), 0.3)
    tab = SpectralDensity.tabulated([1.0, 2.0], [1.0, 3.0])
    assert eval_spectral_density(tab, 1.5) == pytest.approx(2.0)
    assert eval_spectral_density(tab, 2.5) == 0.0
    for bad in (([], []), ([2.0, 1.0], [1, 1]), ([1.0, 2.0], [1.0]), ([1.0, 2.0], [1.0, -1.0])):
        with pytest.raises(ValidationError):
            SpectralDensity.tabulated(*bad)


def test_lineshape_at_resonance():
    g0 = 0.02
    m = LineshapeModel(LineshapeVariant.S_PH, 1.0, g0)
    assert eval_lineshape(m, 1.0) == pytest.approx(2 / (math.pi * g0))
    with pytest.raises(DomainError):
        eval_lineshape(m, 0.0)


@given(st.floats(min_value=0.05, max_value=3.0), st.floats(min_value=1e-4, max_value=0.1))
def test_lineshape_ratio_is_quadratic(w, g0):
    a = eval_lineshape(LineshapeModel(LineshapeVariant.S_PH, 1.0, g0), w)
    b = eval_lineshape(LineshapeModel(LineshapeVariant.S_PH_PRIME, 1.0, g0), w)
    assert a / b == pytest.approx(w * w, rel=1e-13)


def test_markov_window_known_value():
    assert markov_window_integral(0.02, 0.4) == pytest.approx(2 / math.pi * math.atan(40))
    assert markov_window_integral(0.02, 0.4) == pytest.approx(0.9841, abs=1e-4)
    assert markov_window_integral(0.02, 1e9) == pytest.approx(1.0, abs=1e-9)
