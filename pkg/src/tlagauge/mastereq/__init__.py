"""Born-Markov master equations for an atom with reservoir-free auxiliary couplings."""
from .dissipator import Dissipator, MasterGauge, build_dissipator, rate_gap, secular_mask
from .evolve import (DensityTrajectory, GapReport, IntegrationError, check_density_matrix,
                     evolve_density_matrix, excited_vacuum, gauge_gap, liouvillian,
                     trace_distance)
from .system import (AuxKind, AuxMode, ExchangeCoupling, GeneralHermitian, RandomHermitian,
                     RandomStructure, SystemModel, build_system, random_system)
from .transitions import (IdentityReport, TransitionTable, coulomb_coupling_operator,
                          enumerate_transitions, verify_coupling_identity)
