"""n-purity, 2-norm coherence and n-fragility of quantum states under bipartite interactions."""

from __future__ import annotations

from .diagnostics import (
    HermitianObservable,
    QubitDecomposition,
    as_observable,
    coherence_2norm,
    mixedness,
    n_purity,
    purity,
    qubit_variance_decomposition,
    renyi_entropy,
    renyi_entropy_real,
    variance,
    von_neumann_entropy,
)
from .dynamics import (
    OnsetReport,
    ProductInteraction,
    Trajectory,
    evolve,
    fd_derivative,
    onset_identities,
    reduce,
    sample_trajectory,
    uniform_grid,
    vn_derivative_limit_check,
)
from .errors import (
    DimensionError,
    ImaginaryResidueError,
    InvalidStateError,
    MatrixDomainError,
    NearPureDivergenceError,
    NotHermitianError,
    TruncationError,
)
from .fragility import fragility_1, fragility_2, fragility_n, fragility_real
from .linalg import commutator, herm_eig, kron, matrix_fn, partial_trace
from .states import (
    DensityMatrix,
    FockSpace,
    as_density,
    fock,
    pure,
    qubit_atom,
    qubit_pair_pure,
    random_density,
    random_pure,
    thermal_state,
    vacuum,
)

__version__ = "0.1.0"
