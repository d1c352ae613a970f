"""Spontaneous emission of a two-level atom into a discretized field."""
from .basis import EXCITED, GROUND, FockBasis, build_basis, expected_dim
from .hamiltonian import (GaugeHamiltonian, HamiltonianOptions, InitialState,
                          assemble_hamiltonian, basis_state, derive_xi0, gauge_unitary,
                          ground_state, initial_states, level_shift)
from .propagate import PropagationError, Trajectory, propagate, spectral_bounds
from .run import EmissionResult, EmissionSetup, build_bath, run_emission
from .spectrum import (GaugeComparison, Spectrum, compare_to_lineshape, extract_spectrum,
                       fit_lorentz_power, gauge_comparison, mode_populations, peak_center,
                       ratio_to_reference,
                       recentered_density, ww_oracle)
