"""Quantum tensor product expanders from classical expanders and the Fourier transform."""

from .designs import DesignSpec, design_distance_1norm, iterate_moment, iteration_count, sample_word
from .ensembles import Explicit, Fourier, Perm, PermDistribution, QuantumEnsemble
from .errors import (
    ArgumentError,
    ConvergenceError,
    DegenerateClassError,
    IllConditionedError,
    NoMixingError,
    SizeLimitError,
    TPXError,
    UnsupportedRegimeError,
)
from .fourier import e_matrix_element, i_matrix_element
from .gaps import (
    GapReport,
    classical_gap,
    combine_gap_bound,
    lemma_gap_lambda_A,
    quantum_gap,
    theorem_construction,
)
from .operators import (
    MomentOperator,
    ensemble_moment,
    fourier_layer,
    haar_projector,
    permutation_moment,
    spectral_norm,
    symmetric_projector,
)
from .partitions import SetPartition, enumerate_partitions, mobius_matrix, zeta_matrix
from .states import StateVector, TupleSpace, build_state_E, build_state_I

__version__ = "0.1.0"
