from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nfragility.errors import DimensionError, MatrixDomainError, NotHermitianError
from nfragility.linalg import (
    as_matrix,
    commutator,
    expi,
    herm_eig,
    is_hermitian,
    kron,
    matrix_fn,
    partial_trace,
    random_hermitian,
    random_unitary,
)
from nfragility.states import random_density

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)


def test_kron_identity_and_scalar():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))
    assert kron([[2.0]], [[3.0]])[0, 0] == 6


def test_kron_block_structure():
    out = kron(SX, SZ)
    zero = np.zeros((2, 2))
    assert np.array_equal(out, np.block([[zero, SZ], [SZ, zero]]))


def test_kron_associative_and_trace(rng):
    a, b, c = (random_hermitian(d, rng) for d in (2, 3, 2))
    assert np.allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-14)
    assert np.isclose(np.trace(kron(a, b)), np.trace(a) * np.trace(b))


def test_partial_trace_product():
    ra, rb = random_density(2, seed=1), random_density(3, seed=2)
    joint = kron(ra.mat, rb.mat)
    assert np.allclose(partial_trace(joint, (2, 3), "A"), rb.mat, atol=1e-12)
    assert np.allclose(partial_trace(joint, (2, 3), "B"), ra.mat, atol=1e-12)


def test_partial_trace_bell_state():
    v = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(partial_trace(np.outer(v, v), (2, 2), "A"), np.eye(2) / 2)


def test_partial_trace_preserves_trace(rng):
    m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    for over in ("A", "B"):
        assert np.isclose(np.trace(partial_trace(m, (2, 3), over)), np.trace(m))


def test_partial_trace_of_kron_scales_by_trace(rng):
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    b = rng.normal(size=(2, 2))
    assert np.allclose(partial_trace(kron(a, b), (3, 2), "A"), np.trace(a) * b, atol=1e-12)


def test_partial_trace_errors():
    with pytest.raises(DimensionError):
        partial_trace(np.eye(5), (2, 3))
    with pytest.raises(ValueError):
        partial_trace(np.eye(4), (2, 2), over="C")


def test_commutator_pauli_and_diagonal(rng):
    assert np.allclose(commutator(SX, SY), 2j * SZ)
    m = random_hermitian(3, rng)
    assert np.array_equal(commutator(m, m), np.zeros((3, 3)))
    d = np.array([0.5, -1.0, 2.0])
    rho = random_density(3, seed=3).mat
    expected = (d[:, None] - d[None, :]) * rho
    assert np.allclose(commutator(np.diag(d), rho), expected, atol=1e-14)
    with pytest.raises(DimensionError):
        commutator(np.eye(2), np.eye(3))


@pytest.mark.parametrize("m", [SZ, SX])
def test_herm_eig_pauli(m):
    eig = herm_eig(m)
    assert np.allclose(eig.eigenvalues, [-1, 1])
    assert np.allclose(eig.reconstruct(), m)


def test_herm_eig_sigma_x_vectors():
    v = herm_eig(SX).eigenvectors
    # columns span |x->, |x+> up to phase
    assert np.isclose(abs(np.vdot(v[:, 0], np.array([1, -1]) / np.sqrt(2))), 1)
    assert np.isclose(abs(np.vdot(v[:, 1], np.array([1, 1]) / np.sqrt(2))), 1)


@given(st.integers(1, 16), st.integers(0, 2**32 - 1))
def test_herm_eig_reconstruction(dim, seed):
    h = random_hermitian(dim, np.random.default_rng(seed), scale=None)
    eig = herm_eig(h)
    v = eig.eigenvectors
    assert np.linalg.norm(eig.reconstruct() - h) <= 1e-10 * max(1.0, np.linalg.norm(h))
    assert np.allclose(v.conj().T @ v, np.eye(dim), atol=1e-10)
    assert np.all(np.diff(eig.eigenvalues) >= 0)


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        herm_eig([[0, 1], [0, 0]])


def test_density_eigenvalues_in_unit_interval():
    for seed in range(20):
        w = herm_eig(random_density(5, seed=seed).mat).eigenvalues
        assert w.min() >= -1e-10 and w.max() <= 1 + 1e-10


def test_matrix_fn_examples(rng):
    t = 0.7
    assert np.allclose(matrix_fn(SZ, lambda w: np.exp(1j * t * w)), np.diag([np.exp(1j * t), np.exp(-1j * t)]))
    rho = random_density(4, seed=9).mat
    assert np.allclose(matrix_fn(rho, lambda w: w), rho, atol=1e-12)
    assert np.allclose(matrix_fn(rho, lambda w: w**2), rho @ rho, atol=1e-12)


def test_matrix_fn_domain_error():
    with pytest.raises(MatrixDomainError):
        matrix_fn(np.diag([1.0, 0.0]), np.log)


@given(st.integers(1, 8), st.floats(-50, 50), st.integers(0, 2**32 - 1))
def test_expi_unitary(dim, t, seed):
    h = random_hermitian(dim, np.random.default_rng(seed))  # operator norm 1, so |t| ||h|| <= 50
    u = expi(h, t)
    assert np.allclose(u.conj().T @ u, np.eye(dim), atol=1e-10)


def test_random_unitary(rng):
    u = random_unitary(4, rng)
    assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-12)


def test_as_matrix_validation():
    assert as_matrix(3.0).shape == (1, 1)
    with pytest.raises(DimensionError):
        as_matrix(np.ones((2, 3)))
    with pytest.raises(ValueError):
        as_matrix([[np.nan, 0], [0, 1]])
    assert is_hermitian(SY) and not is_hermitian([[0, 1], [2, 0]])
