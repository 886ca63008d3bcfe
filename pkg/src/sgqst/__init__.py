"""Structured Gibbs quantum state tomography.

Simulates finite-shot Pauli measurements of GHZ states and reconstructs
the density matrix by linear inversion with projection, by a Cholesky-form
least-squares fit over all Pauli strings, and by Gibbs models restricted to
local, nearest-neighbour and global observables.
"""
from .kernels import BACKEND
from .pauli import PauliString, enumerate_paulis, expectation, parse_label, to_matrix
from .states import DensityMatrix, fidelity, from_pauli_vector, ghz, trace_distance
from .measurement import Dataset, MeasurementRecord, NoiseModel, apply_noise, generate_dataset
from .operators import OperatorSet, by_tag, full_set, g1, g2, g3, g4, parse_custom
from .estimators import (GibbsModel, OptimizerConfig, ReconstructionResult, fit_gibbs, gibbs_state,
                         linear_inversion, mle_fit, psd_estimate)
from .metrics import mle_agreement, observable_error, residuals, target_fidelity, top_k_residuals

__version__ = "0.1.0"
