"""One-shot emission experiment: build, propagate, extract."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..bath import ModeBath, QuadratureRule, discretize
from ..core import GaugeChoice, SpectralDensity, TlaParams
from .basis import EXCITED, FockBasis, build_basis
from .hamiltonian import (GaugeHamiltonian, HamiltonianOptions, InitialState,
                          assemble_hamiltonian, initial_states)
from .propagate import Trajectory, propagate
from .spectrum import Spectrum, extract_spectrum


@dataclass(frozen=True)
class EmissionSetup:
    params: TlaParams
    gauge: GaugeChoice
    n_modes: int = 2000
    band: tuple = (0.5, 1.5)           # in units of omega0
    rule: str = "uniform"
    max_photons: int = 1
    options: HamiltonianOptions = field(default_factory=HamiltonianOptions)
    initial_state: str = InitialState.GAUGE_MAPPED.value
    t_final: float = 16.0              # in units of 1/Gamma0
    n_checkpoints: int = 0             # extra evenly spaced survival samples
    checkpoints: tuple = ()            # explicit times in units of 1/Gamma0
    tol: float = 1e-10


@dataclass(frozen=True, eq=False)
class EmissionResult:
    setup: EmissionSetup
    hamiltonian: GaugeHamiltonian = field(repr=False)
    trajectory: Trajectory = field(repr=False)
    survival: np.ndarray = field(repr=False)
    spectrum: Spectrum = field(repr=False)
    timings: dict = field(default_factory=dict)


def build_bath(setup: EmissionSetup) -> ModeBath:
    p = setup.params
    sd = SpectralDensity.free_space(p.gamma0, p.omega0)
    band = (setup.band[0] * p.omega0, setup.band[1] * p.omega0)
    return discretize(sd, band, setup.n_modes, QuadratureRule(setup.rule))


def run_emission(setup: EmissionSetup, basis: FockBasis | None = None,
                 bath: ModeBath | None = None) -> EmissionResult:
    timings = {}
    t0 = time.perf_counter()
    bath = bath or build_bath(setup)
    basis = basis or build_basis(setup.n_modes, setup.max_photons)
    ham = assemble_hamiltonian(basis, bath, setup.params, setup.gauge, setup.options)
    psi0, base0 = initial_states(ham, setup.initial_state)
    timings["build"] = time.perf_counter() - t0

    g0 = setup.params.gamma0
    t_final = setup.t_final / g0
    marks = [c / g0 for c in setup.checkpoints]
    if setup.n_checkpoints:
        marks.extend(np.linspace(0.0, t_final, setup.n_checkpoints + 1))
    t1 = time.perf_counter()
    traj = propagate(ham, psi0, t_final, tol=setup.tol, checkpoints=marks)
    base_final = base0
    if np.linalg.norm(ham.matrix @ base0 - (base0.conj() @ (ham.matrix @ base0)) * base0) > 1e-14:
        # the baseline is not stationary: propagate it over the same interval
        base_final = propagate(ham, base0, t_final, tol=setup.tol).final
    timings["propagate"] = time.perf_counter() - t1

    survival = np.abs(traj.amplitude(basis.index(EXCITED))) ** 2
    spec = extract_spectrum(traj.final, bath, basis, base_final, t_final=t_final, gamma0=g0)
    timings["total"] = time.perf_counter() - t0
    return EmissionResult(setup, ham, traj, survival, spec, timings)
