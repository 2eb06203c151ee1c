"""Density matrices and the state constructors used throughout the package.

Basis conventions:

* qubit ancilla/atom: ``(|x+>, |x->)``, the eigenbasis of sigma_x, so that
  sigma_x is represented by ``diag(1, -1)``;
* qubit system: ``(|b_x>, |b_y>)``, the eigenbasis of the reference
  observable B;
* bosonic mode: Fock levels ``0 .. dim-1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from .errors import InvalidStateError
from .linalg import HERMITIAN_ATOL, HermitianEigen, as_matrix, herm_eig

STATE_ATOL = 1e-10


class DensityMatrix:
    """A validated quantum state: Hermitian, unit trace, positive semidefinite.

    The wrapped array is read-only.  ``atol`` applies to all three checks.
    """

    def __init__(self, mat, atol: float = STATE_ATOL):
        m = as_matrix(mat).copy()
        herm_dev = np.max(np.abs(m - m.conj().T))
        if herm_dev > atol:
            raise InvalidStateError(f"not Hermitian (deviation {herm_dev:.3e})")
        tr = np.trace(m)
        if abs(tr - 1) > atol:
            raise InvalidStateError(f"trace is {tr.real:.12g}, expected 1")
        # exact Hermitian symmetrization keeps downstream eigh well posed
        m = (m + m.conj().T) / 2
        m.setflags(write=False)
        self.mat = m
        lam_min = self.eigenvalues[0]
        if lam_min < -atol:
            raise InvalidStateError(f"negative eigenvalue {lam_min:.3e}")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @cached_property
    def eig(self) -> HermitianEigen:
        return herm_eig(self.mat, HERMITIAN_ATOL)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.eig.eigenvalues

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.mat, dtype=dtype)

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"


def as_density(rho, atol: float = STATE_ATOL) -> DensityMatrix:
    if isinstance(rho, DensityMatrix):
        return rho
    return DensityMatrix(rho, atol=atol)


def pure(vec) -> DensityMatrix:
    """Projector onto the normalized vector ``vec``."""
    v = np.asarray(vec, dtype=np.complex128).ravel()
    norm = np.linalg.norm(v)
    if norm == 0:
        raise InvalidStateError("zero vector has no state")
    v = v / norm
    return DensityMatrix(np.outer(v, v.conj()))


def product(*states) -> DensityMatrix:
    """Tensor product of states, first argument as the slow factor."""
    out = np.ones((1, 1), dtype=np.complex128)
    for s in states:
        out = np.kron(out, as_density(s).mat)
    return DensityMatrix(out)


def qubit_pair_pure(r: complex, s: complex) -> DensityMatrix:
    """Normalized ``(|x+> + r|x->) (x) (|b_x> + s|b_y>)`` as a 4x4 projector."""
    anc = np.array([1.0, r], dtype=np.complex128)
    sys = np.array([1.0, s], dtype=np.complex128)
    return pure(np.kron(anc, sys))


def qubit_atom(alpha: complex, delta: float) -> DensityMatrix:
    """``alpha|x+><x-| + h.c. + delta|x+><x+| + (1-delta)|x-><x-|``."""
    alpha = complex(alpha)
    delta = float(delta)
    if not 0.0 <= delta <= 1.0:
        raise InvalidStateError(f"delta must lie in [0, 1], got {delta}")
    if abs(alpha) ** 2 > delta * (1 - delta) + 1e-12:
        raise InvalidStateError(
            f"|alpha|^2 = {abs(alpha) ** 2:.6g} exceeds delta(1-delta) = {delta * (1 - delta):.6g}"
        )
    m = np.array([[delta, alpha], [alpha.conjugate(), 1 - delta]], dtype=np.complex128)
    return DensityMatrix(m)


@dataclass(frozen=True)
class FockSpace:
    """Truncated single bosonic mode.

    ``nu`` is the coupling amplitude (the mode function evaluated at the
    atom's position) and ``omega`` the mode angular frequency.
    """

    dim: int
    omega: float = 1.0
    nu: float = 1.0

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValueError(f"Fock truncation must be an integer >= 2, got {self.dim}")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")

    def annihilation(self) -> np.ndarray:
        return np.diag(np.sqrt(np.arange(1, self.dim, dtype=float)), 1).astype(np.complex128)

    def creation(self) -> np.ndarray:
        return self.annihilation().T.copy()

    def number(self) -> np.ndarray:
        return np.diag(np.arange(self.dim, dtype=float)).astype(np.complex128)

    def quadrature(self) -> np.ndarray:
        """``a + a^dagger`` on the truncation."""
        a = self.annihilation()
        return a + a.T

    def coupling(self) -> np.ndarray:
        """``nu (a + a^dagger)``, the field factor of the interaction."""
        return self.nu * self.quadrature()


def vacuum(fs: FockSpace) -> DensityMatrix:
    m = np.zeros((fs.dim, fs.dim), dtype=np.complex128)
    m[0, 0] = 1.0
    return DensityMatrix(m)


def fock(fs: FockSpace, level: int) -> DensityMatrix:
    return fock_superposition(fs, [(level, 1.0)])


def thermal_state(fs: FockSpace, beta: float) -> DensityMatrix:
    """Boltzmann state ``exp(-beta omega N)/Z`` normalized on the truncation."""
    x = float(beta) * fs.omega
    if not x > 0:
        raise ValueError(f"beta*omega must be positive, got {x}")
    w = np.exp(-x * np.arange(fs.dim))
    return DensityMatrix(np.diag(w / w.sum()).astype(np.complex128))


def fock_superposition(fs: FockSpace, coeffs: Iterable[tuple[int, complex]]) -> DensityMatrix:
    """Pure state ``sum_k c_k |n_k>`` (normalized) from ``(level, amplitude)`` pairs."""
    coeffs = list(coeffs)
    if not coeffs:
        raise ValueError("empty coefficient list")
    v = np.zeros(fs.dim, dtype=np.complex128)
    for level, amp in coeffs:
        if not 0 <= int(level) < fs.dim:
            raise ValueError(f"level {level} outside truncation 0..{fs.dim - 1}")
        v[int(level)] += complex(amp)
    return pure(v)


def random_density(dim: int, seed: int | None = None, rank: int | None = None, *,
                   rng: np.random.Generator | None = None) -> DensityMatrix:
    """``G G^dagger / Tr(G G^dagger)`` with ``G`` seeded standard complex normal.

    ``rank`` sets the number of columns of ``G`` (full rank by default).
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = np.random.default_rng(seed) if rng is None else rng
    k = dim if rank is None else int(rank)
    g = (rng.standard_normal((dim, k)) + 1j * rng.standard_normal((dim, k))) / np.sqrt(2)
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def random_pure(dim: int, seed: int | None = None, *,
                rng: np.random.Generator | None = None) -> DensityMatrix:
    rng = np.random.default_rng(seed) if rng is None else rng
    return pure(rng.standard_normal(dim) + 1j * rng.standard_normal(dim))
