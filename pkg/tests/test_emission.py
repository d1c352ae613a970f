"""Small end-to-end emission runs against independent references."""
import numpy as np
import pytest

from oracles import ww_single_excitation
from tlagauge.core import GaugeChoice, TlaParams
from tlagauge.emission import (EXCITED, EmissionSetup, HamiltonianOptions, build_bath,
                               run_emission)

pytestmark = pytest.mark.filterwarnings("ignore:t_final")


def test_rwa_dipole_matches_dense_single_excitation_block():
    p = TlaParams.from_gamma0(1.0, 0.05)
    setup = EmissionSetup(p, GaugeChoice.parse("dipole"), n_modes=120,
                          options=HamiltonianOptions(rwa=True), t_final=4.0,
                          checkpoints=(1.0, 2.0))
    r = run_emission(setup)
    bath = build_bath(setup)
    for t, state in zip(r.trajectory.times, r.trajectory.states):
        ref = ww_single_excitation(bath.omegas, bath.g_dipole, 1.0, t)
        assert abs(state[r.hamiltonian.basis.index(EXCITED)] - ref[0]) < 1e-9


def test_rwa_emission_conserves_single_excitation():
    p = TlaParams.from_gamma0(1.0, 0.05)
    r = run_emission(EmissionSetup(p, GaugeChoice.parse("naive-coulomb"), n_modes=80,
                                   options=HamiltonianOptions(rwa=True), t_final=4.0))
    assert r.spectrum.integral + r.survival[-1] == pytest.approx(1.0, abs=1e-9)


def test_spectrum_peaks_near_resonance_in_every_gauge():
    p = TlaParams.from_gamma0(1.0, 0.05)
    for g in ("dipole", "naive-coulomb", "corrected-coulomb"):
        r = run_emission(EmissionSetup(p, GaugeChoice.parse(g, 1), n_modes=60, max_photons=1,
                                       options=HamiltonianOptions(rwa=False), t_final=6.0))
        peak = r.spectrum.omegas[np.argmax(r.spectrum.density)]
        assert abs(peak - 1.0) < 0.05
