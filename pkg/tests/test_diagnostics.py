from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nfragility import diagnostics as dg
from nfragility.errors import DimensionError
from nfragility.linalg import random_hermitian, random_unitary
from nfragility.states import pure, random_density, random_pure

SZ = np.diag([1.0, -1.0])
PLUS = pure([1, 1])
seeds = st.integers(0, 2**32 - 1)


@pytest.mark.parametrize("dim", [1, 2, 5])
def test_n_purity_trace_and_maximally_mixed(dim):
    rho = np.eye(dim) / dim
    assert math.isclose(dg.n_purity(random_density(dim, seed=dim), 1), 1)
    assert math.isclose(dg.n_purity(rho, 2), 1 / dim)


def test_n_purity_power_sum():
    assert math.isclose(dg.n_purity(np.diag([0.5, 0.3, 0.2]), 3), 0.160, abs_tol=1e-15)


def test_n_purity_rejects_bad_order():
    with pytest.raises(ValueError):
        dg.n_purity(np.eye(2) / 2, 0)
    with pytest.raises(ValueError):
        dg.n_purity(np.eye(2) / 2, 2.5)


@pytest.mark.parametrize("n", [1, 2, 3, 7])
def test_renyi_pure_is_zero(n):
    assert abs(dg.renyi_entropy(random_pure(3, seed=n), n)) < 1e-10


def test_renyi_examples():
    assert math.isclose(dg.renyi_entropy(np.eye(2) / 2, 2), math.log(2))
    vn = -0.75 * math.log(0.75) - 0.25 * math.log(0.25)
    assert math.isclose(dg.renyi_entropy(np.diag([0.75, 0.25]), 1), vn)
    assert math.isclose(vn, 0.562335, abs_tol=1e-6)
    assert dg.von_neumann_entropy(np.diag([1.0, 0.0])) == 0.0


@given(st.integers(2, 6), st.integers(1, 5), seeds)
def test_renyi_bounds(dim, n, seed):
    h = dg.renyi_entropy(random_density(dim, seed=seed), n)
    assert -1e-12 <= h <= math.log(dim) + 1e-12


def test_renyi_real_order_limit_is_linear():
    rho = np.diag([0.5, 0.3, 0.2])
    lam = np.array([0.5, 0.3, 0.2])
    vn = dg.von_neumann_entropy(rho)
    # d H_alpha / d alpha at alpha = 1 is minus half the variance of -log(lambda)
    slope = -0.5 * (np.sum(lam * np.log(lam) ** 2) - np.sum(lam * np.log(lam)) ** 2)
    for eps in (1e-3, 1e-4, 1e-5):
        gap = dg.renyi_entropy_real(rho, 1 + eps) - vn
        assert math.isclose(gap / eps, slope, rel_tol=5 * eps)
    assert math.isclose(dg.renyi_entropy_real(rho, 2.0), dg.renyi_entropy(rho, 2), rel_tol=1e-13)


def test_purity_and_mixedness():
    assert math.isclose(dg.mixedness(PLUS), 0, abs_tol=1e-15)
    assert math.isclose(dg.mixedness(np.eye(2) / 2), 0.5)
    assert math.isclose(dg.mixedness(np.diag([0.7, 0.3])), 0.42)


def test_coherence_examples():
    assert dg.coherence_2norm(np.diag([0.3, 0.7]), SZ) == 0
    rho = np.array([[0.5, 0.2], [0.2, 0.5]])
    assert math.isclose(dg.coherence_2norm(rho, SZ), 0.08)
    rho = np.array([[0.6, 0.1 - 0.2j], [0.1 + 0.2j, 0.4]])
    assert math.isclose(dg.coherence_2norm(rho, np.diag([3.0, -2.0])), 2 * abs(0.1 - 0.2j) ** 2)


def test_coherence_degenerate_observable_uses_blocks():
    rho = random_density(3, seed=11).mat
    b = np.diag([1.0, 1.0, 2.0])
    expected = 2 * (abs(rho[0, 2]) ** 2 + abs(rho[1, 2]) ** 2)
    assert math.isclose(dg.coherence_2norm(rho, b), expected, rel_tol=1e-12)
    # rotating inside the degenerate block must not change the answer
    u = np.eye(3, dtype=complex)
    u[:2, :2] = random_unitary(2, np.random.default_rng(0))
    assert math.isclose(dg.coherence_2norm(rho, u @ b @ u.conj().T), expected, rel_tol=1e-10)


def test_variance_examples():
    assert abs(dg.variance(np.diag([1.0, 0.0]), SZ)) < 1e-15
    assert math.isclose(dg.variance(PLUS, SZ), 1)
    rho = np.array([[0.3, 0.1j], [-0.1j, 0.7]])
    bx, by = 2.5, -0.5
    assert math.isclose(dg.variance(rho, np.diag([bx, by])), (0.3 - 0.09) * (bx - by) ** 2)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        dg.variance(np.eye(2) / 2, np.eye(3))
    with pytest.raises(DimensionError):
        dg.coherence_2norm(np.eye(3) / 3, SZ)


@given(st.integers(2, 6), seeds)
def test_basis_covariance(dim, seed):
    rng = np.random.default_rng(seed)
    rho = random_density(dim, rng=rng).mat
    b = random_hermitian(dim, rng)
    u = random_unitary(dim, rng)
    rho_u, b_u = u @ rho @ u.conj().T, u @ b @ u.conj().T
    assert abs(dg.coherence_2norm(rho_u, b_u) - dg.coherence_2norm(rho, b)) < 1e-10
    assert abs(dg.variance(rho_u, b_u) - dg.variance(rho, b)) < 1e-10


def test_qubit_decomposition_examples():
    assert np.allclose(dg.qubit_variance_decomposition(np.diag([1.0, 0.0]), SZ), (0, 0, 0), atol=1e-15)
    assert np.allclose(dg.qubit_variance_decomposition(np.eye(2) / 2, SZ), (0.5, 0, 0.5))
    assert np.allclose(dg.qubit_variance_decomposition(PLUS, SZ), (0.5, 0.5, 0), atol=1e-15)
    with pytest.raises(ValueError):
        dg.qubit_variance_decomposition(PLUS, np.eye(2))
    with pytest.raises(DimensionError):
        dg.qubit_variance_decomposition(np.eye(3) / 3, np.diag([1.0, 2, 3]))


def test_qubit_decomposition_identity_random_sweep():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(10_000):
        rho = random_density(2, rng=rng, rank=int(rng.integers(1, 3)))
        b = random_hermitian(2, rng, scale=float(rng.uniform(0.1, 5)))
        lhs, c2, mu = dg.qubit_variance_decomposition(rho, b)
        worst = max(worst, abs(lhs - c2 - mu))
    assert worst < 1e-10


@settings(max_examples=100)
@given(seeds)
def test_qubit_decomposition_identity_property(seed):
    rng = np.random.default_rng(seed)
    lhs, c2, mu = dg.qubit_variance_decomposition(random_density(2, rng=rng), random_hermitian(2, rng))
    assert abs(lhs - c2 - mu) < 1e-10


def test_observable_scaling_and_blocks():
    b = dg.HermitianObservable(np.diag([2.0, 2.0 + 1e-12, 5.0]))
    labels = b.eigen_blocks()
    assert labels[0] == labels[1] != labels[2]
    assert np.allclose(b.scaled(3).mat, 3 * b.mat)
