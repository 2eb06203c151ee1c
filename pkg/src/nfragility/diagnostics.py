"""Scalar functionals of a single state: purities, entropies, coherence, variance."""

from __future__ import annotations

from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import DimensionError
from .linalg import HERMITIAN_ATOL, HermitianEigen, as_matrix, herm_eig
from .states import as_density

# relative eigenvalue gap below which reference eigenvalues count as degenerate
DEGENERACY_RTOL = 1e-8


class HermitianObservable:
    """Hermitian operator with a cached eigendecomposition."""

    def __init__(self, mat, atol: float = HERMITIAN_ATOL):
        m = as_matrix(mat).copy()
        # validates Hermiticity before we symmetrize
        herm_eig(m, atol)
        m = (m + m.conj().T) / 2
        m.setflags(write=False)
        self.mat = m

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @cached_property
    def eig(self) -> HermitianEigen:
        return herm_eig(self.mat)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.eig.eigenvalues

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.eig.eigenvectors

    def scaled(self, c: float) -> "HermitianObservable":
        return HermitianObservable(c * self.mat)

    def eigen_blocks(self, rtol: float = DEGENERACY_RTOL) -> np.ndarray:
        """Integer label per eigenvector; equal labels share an eigenvalue."""
        w = self.eigenvalues
        tol = rtol * max(1.0, float(np.max(np.abs(w))))
        jumps = np.concatenate([[0], (np.diff(w) > tol).astype(int)])
        return np.cumsum(jumps)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.mat, dtype=dtype)

    def __repr__(self) -> str:
        return f"HermitianObservable(dim={self.dim})"


def as_observable(b) -> HermitianObservable:
    if isinstance(b, HermitianObservable):
        return b
    return HermitianObservable(b)


def _check_dims(rho, b):
    if rho.dim != b.dim:
        raise DimensionError(f"state dimension {rho.dim} != observable dimension {b.dim}")


def n_purity(rho, n: int) -> float:
    """``Tr[rho^n]`` for integer ``n >= 1``."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be an integer >= 1, got {n}")
    m = as_density(rho).mat
    n = int(n)
    if n == 1:
        return float(np.trace(m).real)
    if n == 2:
        return float(np.vdot(m, m).real)
    return float(np.trace(np.linalg.matrix_power(m, n)).real)


def power_sum(rho, x: float) -> float:
    """``sum_i lambda_i^x`` over the (clipped non-negative) spectrum, any real ``x > 0``."""
    lam = np.clip(as_density(rho).eigenvalues, 0.0, None)
    return float(np.sum(lam ** x))


def purity(rho) -> float:
    return n_purity(rho, 2)


def mixedness(rho) -> float:
    return 1.0 - purity(rho)


def von_neumann_entropy(rho) -> float:
    """``-sum lambda log lambda`` in nats, with ``0 log 0 = 0``."""
    lam = as_density(rho).eigenvalues
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log(lam)))


def renyi_entropy(rho, n: int) -> float:
    """Order-``n`` Renyi entropy in nats; ``n == 1`` gives the von Neumann limit."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be an integer >= 1, got {n}")
    if n == 1:
        return von_neumann_entropy(rho)
    return float(np.log(n_purity(rho, n)) / (1 - n))


def renyi_entropy_real(rho, order: float) -> float:
    """Renyi entropy for a real order ``!= 1`` through eigenvalue powers.

    Written as ``log1p(sum lam (lam^eps - 1)) / -eps`` with ``eps = order - 1``
    so that orders close to 1 keep full relative precision.
    """
    eps = float(order) - 1.0
    if eps == 0.0:
        return von_neumann_entropy(rho)
    lam = as_density(rho).eigenvalues
    lam = lam[lam > 0]
    s = np.sum(lam * np.expm1(eps * np.log(lam)))
    return float(-np.log1p(s) / eps)


def coherence_2norm(rho, b) -> float:
    """Squared Hilbert-Schmidt norm of the part of ``rho`` removed by dephasing in b's eigenbasis.

    Dephasing acts per eigenspace, so coherences between degenerate
    eigenvectors of ``b`` count as diagonal.
    """
    rho = as_density(rho)
    b = as_observable(b)
    _check_dims(rho, b)
    v = b.eigenvectors
    rt = v.conj().T @ rho.mat @ v
    labels = b.eigen_blocks()
    off = labels[:, None] != labels[None, :]
    return float(np.sum(np.abs(rt[off]) ** 2))


def variance(rho, b) -> float:
    """``Tr(rho b^2) - Tr(rho b)^2``."""
    rho = as_density(rho)
    b = as_observable(b)
    _check_dims(rho, b)
    rb = rho.mat @ b.mat
    mean = np.trace(rb).real
    second = np.sum(rb * b.mat.T).real  # Tr(rho b b)
    return float(second - mean**2)


class QubitDecomposition(NamedTuple):
    normalized_variance: float
    coherence: float
    mixedness: float


def qubit_variance_decomposition(rho, b) -> QubitDecomposition:
    """Split a qubit's normalized variance into coherent and incoherent parts.

    Returns ``(var / (2 var_max), c_2, mu)`` where ``var_max = gap^2 / 4``;
    the first entry equals the sum of the other two.
    """
    rho = as_density(rho)
    b = as_observable(b)
    _check_dims(rho, b)
    if rho.dim != 2:
        raise DimensionError("qubit decomposition needs a 2x2 state")
    gap = float(b.eigenvalues[1] - b.eigenvalues[0])
    if b.eigen_blocks()[1] == 0:
        raise ValueError("reference observable is degenerate (zero eigenvalue gap)")
    var_max = gap**2 / 4
    return QubitDecomposition(
        variance(rho, b) / (2 * var_max), coherence_2norm(rho, b), mixedness(rho)
    )
