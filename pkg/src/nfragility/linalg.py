"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  All matrix
functions are evaluated through the Hermitian eigendecomposition, so
exponentials of Hermitian generators are unitary up to rounding.
"""

from __future__ import annotations

from typing import Callable, Literal, NamedTuple

import numpy as np

from .errors import DimensionError, MatrixDomainError, NotHermitianError

HERMITIAN_ATOL = 1e-10


class HermitianEigen(NamedTuple):
    """Eigenvalues (ascending) and unitary matrix of column eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a finite square complex matrix.

    Objects exposing a ``mat`` attribute (states, observables) are unwrapped.
    """
    m = getattr(m, "mat", m)
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def is_hermitian(m, atol: float = HERMITIAN_ATOL) -> bool:
    m = as_matrix(m)
    return bool(np.max(np.abs(m - m.conj().T)) <= atol)


def kron(a, b) -> np.ndarray:
    """Kronecker product with ``a`` as the slow (leftmost) factor."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(
    m, dims: tuple[int, int], over: Literal["A", "B"] = "A"
) -> np.ndarray:
    """Trace out one factor of a bipartite operator on ``C^dA (x) C^dB``.

    ``over="A"`` returns the ``dB x dB`` operator on the second factor,
    ``over="B"`` the ``dA x dA`` operator on the first.
    """
    m = as_matrix(m)
    d_a, d_b = (int(d) for d in dims)
    if d_a < 1 or d_b < 1 or m.shape[0] != d_a * d_b:
        raise DimensionError(
            f"matrix of dimension {m.shape[0]} does not factor as {d_a} x {d_b}"
        )
    t = m.reshape(d_a, d_b, d_a, d_b)
    if over == "A":
        return np.einsum("ijik->jk", t)
    if over == "B":
        return np.einsum("ijkj->ik", t)
    raise ValueError(f"over must be 'A' or 'B', got {over!r}")


def commutator(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"cannot commute shapes {a.shape} and {b.shape}")
    return a @ b - b @ a


def herm_eig(h, atol: float = HERMITIAN_ATOL) -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    h = as_matrix(h)
    if not is_hermitian(h, atol):
        raise NotHermitianError(
            f"matrix deviates from Hermitian by {np.max(np.abs(h - h.conj().T)):.3e}"
        )
    w, v = np.linalg.eigh(h)
    return HermitianEigen(w, v)


def matrix_fn(
    h,
    f: Callable[[np.ndarray], np.ndarray],
    eig: HermitianEigen | None = None,
) -> np.ndarray:
    """Apply the scalar function ``f`` to the spectrum of Hermitian ``h``.

    ``f`` receives the real eigenvalue array and must return an array of the
    same length.  Non-finite results raise :class:`MatrixDomainError`.
    """
    if eig is None:
        eig = herm_eig(h)
    with np.errstate(all="ignore"):
        fw = np.asarray(f(eig.eigenvalues))
    if fw.shape != eig.eigenvalues.shape:
        raise ValueError("f must map the eigenvalue array elementwise")
    if not np.all(np.isfinite(fw)):
        bad = eig.eigenvalues[~np.isfinite(fw)]
        raise MatrixDomainError(f"function undefined at eigenvalue(s) {bad.tolist()}")
    v = eig.eigenvectors
    return (v * fw) @ v.conj().T


def expi(h, t: float, eig: HermitianEigen | None = None) -> np.ndarray:
    """The unitary ``exp(i t h)`` for Hermitian ``h``."""
    return matrix_fn(h, lambda w: np.exp(1j * t * w), eig)


def random_hermitian(dim: int, rng: np.random.Generator, scale: float | None = 1.0) -> np.ndarray:
    """Random Hermitian matrix from a GUE-like draw.

    With ``scale`` set, the result is rescaled to that operator norm.
    """
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = (g + g.conj().T) / 2
    if scale is not None:
        norm = np.max(np.abs(np.linalg.eigvalsh(h)))
        if norm > 0:
            h = h * (scale / norm)
    return h


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
