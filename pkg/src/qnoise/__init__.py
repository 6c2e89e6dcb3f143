"""Entanglement dynamics of four qubits under random telegraph noise."""
from .evolution import EvolvedState, McConfig, analytic_evolve, analytic_series, mc_evolve, mc_series, single_qubit_u
from .linalg import (hermitian_eigvals, kron, partial_trace, partial_transpose, permute_qubits, singular_values,
                     sqrt_psd, trace_distance)
from .measures import (MeasureRecord, bipartitions, lbc, linear_entropy, negativity_bipartition, negativity_n, qjsd,
                       vn_entropy, witness_closed_form, witness_expectation)
from .rtn import NoiseParams, TrajectorySample, beta, sample_phases, sample_trajectory
from .states import (Coupling, Family, SystemConfig, ghz_vector, initial_density, maximally_mixed, w_vector,
                     witness)
from .sweep import SweepSpec, emit, run_sweep

__version__ = "0.1.0"
