"""n-fragilities of a state with respect to a reference observable.

The n-fragility ``f_n = -(n/2) Tr[rho^(n-1) [B, rho] B]`` sets the leading
(second-order) change of the n-purity when the system starts interacting
through ``A (x) B``.  ``f_2`` also has the basis form
``(1/2) sum_ij (b_i - b_j)^2 |rho_ij|^2``, and ``f_1`` follows from the limit
``n -> 1``.
"""

from __future__ import annotations

import numpy as np

from .diagnostics import _check_dims, as_observable, variance
from .errors import ImaginaryResidueError, NearPureDivergenceError
from .states import as_density

IMAG_TOL = 1e-8
EIGEN_FLOOR = 1e-12


def _real(z: complex, scale: float = 1.0) -> float:
    if abs(z.imag) > IMAG_TOL * max(1.0, abs(z.real), scale):
        raise ImaginaryResidueError(f"trace should be real, imaginary part {z.imag:.3e}")
    return float(z.real)


def fragility_n(rho, b, n: int) -> float:
    """``-(n/2) Tr[rho^(n-1) [B, rho] B]`` for integer ``n >= 2``."""
    if int(n) != n or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n}")
    rho = as_density(rho)
    b = as_observable(b)
    _check_dims(rho, b)
    r, bm = rho.mat, b.mat
    c = bm @ r - r @ bm
    power = np.linalg.matrix_power(r, int(n) - 1)
    tr = np.sum(power @ c * bm.T)  # Tr(power c b)
    return _real(-(n / 2) * complex(tr))


def fragility_2(rho, b) -> float:
    """``-(1/2) Tr([B, rho]^2)``, i.e. half the squared Frobenius norm of the commutator."""
    rho = as_density(rho)
    b = as_observable(b)
    _check_dims(rho, b)
    c = b.mat @ rho.mat - rho.mat @ b.mat
    return float(0.5 * np.sum(np.abs(c) ** 2))


def fragility_2_eigenbasis(rho, b) -> float:
    """``(1/2) sum_ij (b_i - b_j)^2 |rho_ij|^2`` with ``rho`` written in b's eigenbasis."""
    rho = as_density(rho)
    b = as_observable(b)
    _check_dims(rho, b)
    v = b.eigenvectors
    rt = v.conj().T @ rho.mat @ v
    w = b.eigenvalues
    gaps = (w[:, None] - w[None, :]) ** 2
    return float(0.5 * np.sum(gaps * np.abs(rt) ** 2))


def fragility_real(rho, b, order: float) -> float:
    """n-fragility for a real order ``> 1`` through the state's spectrum.

    Uses ``(order/2) sum_ik lam_i^(order-1) (lam_i - lam_k) |B_ik|^2`` with
    ``B`` in the eigenbasis of ``rho``; agrees with :func:`fragility_n` at
    integer orders.
    """
    rho = as_density(rho)
    b = as_observable(b)
    _check_dims(rho, b)
    lam = np.clip(rho.eigenvalues, 0.0, None)
    u = rho.eig.eigenvectors
    bt2 = np.abs(u.conj().T @ b.mat @ u) ** 2
    diff = lam[:, None] - lam[None, :]
    return float(order / 2 * np.sum(lam[:, None] ** (order - 1) * diff * bt2))


def fragility_1(rho, b, eigen_floor: float = EIGEN_FLOOR) -> float:
    """``-Tr[log(rho) [B, rho] B]``, the rate constant of the von Neumann entropy.

    Evaluated in the eigenbasis of ``rho`` as
    ``sum_{i != k} (lam_i - lam_k) log(lam_i) |B_ik|^2``.  Raises
    :class:`NearPureDivergenceError` if an eigenvalue lies below
    ``eigen_floor``; the quantity diverges as the state approaches the
    boundary of state space, so no clamping is done.
    """
    rho = as_density(rho)
    b = as_observable(b)
    _check_dims(rho, b)
    lam = rho.eigenvalues
    if lam[0] < eigen_floor:
        raise NearPureDivergenceError(lam[0], eigen_floor)
    u = rho.eig.eigenvectors
    bt2 = np.abs(u.conj().T @ b.mat @ u) ** 2
    diff = lam[:, None] - lam[None, :]
    return float(np.sum(diff * np.log(lam)[:, None] * bt2))


def fragility(rho, b, n: int, eigen_floor: float = EIGEN_FLOOR) -> float:
    """Dispatch to the 1-, 2- or general n-fragility."""
    if n == 1:
        return fragility_1(rho, b, eigen_floor)
    if n == 2:
        return fragility_2(rho, b)
    return fragility_n(rho, b, n)


def variance_fragility_gap(rho, b) -> float:
    """``(Delta B)^2 - f_2``; non-negative, zero for pure states."""
    return variance(rho, b) - fragility_2(rho, b)
