"""Exact quench dynamics of interacting bosons behind asymmetric barriers."""

from .basis import (SectorBasis, dimension, enumerate_sector, index_of,
                    occupation_label, reflection_permutation)
from .errors import (CapacityError, ConvergenceError, SectorError,
                     ValidationError)
from .hamiltonian import (ModelParams, SparseSymMatrix, build_hamiltonian,
                          potential_angled, potential_cooling,
                          potential_vertical)
from .linalg import (Spectrum, StateVector, eigh_dense, evolve_krylov,
                     evolve_spectral, expectation_number, ground_state,
                     site_densities)
from .protocol import (CoherentSpec, QuenchSpec, Trajectory,
                       coherent_sector_state, coherent_sector_weights,
                       default_times, n_after, population_imbalance,
                       prepare_initial_state, run_coherent_quench, run_quench)
from .analysis import (OverlapReport, SweepGrid, find_directional_windows,
                       fock_composition, overlap_analysis, sweep_interaction)

__version__ = "0.1.0"
