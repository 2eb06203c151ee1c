from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nfragility import diagnostics as dg
from nfragility import scenarios as sc
from nfragility.dynamics import uniform_grid
from nfragility.errors import TruncationError
from nfragility.states import FockSpace

GRID = uniform_grid(1.5, 50)
complexes = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


# --- commuting qubit case -------------------------------------------------------------


@pytest.mark.parametrize("t", [0.0, 0.3, 1.7, 4.0])
def test_case1_mixedness_examples(t):
    assert sc.case1_mixedness(sc.Case1Params(0, 0.8 + 0.3j), t) == pytest.approx(0, abs=1e-15)
    p = sc.Case1Params(1, 1, eps=0.7, b_gap=1.3)
    theta = 2 * p.eps * t * p.b_gap
    assert sc.case1_mixedness(p, t) == pytest.approx(1 - (3 + math.cos(theta)) / 4, abs=1e-15)


def test_case1_maximally_mixed_point():
    p = sc.Case1Params(1, 1)
    assert sc.case1_mixedness(p, math.pi / 2) == pytest.approx(0.5, abs=1e-15)


def test_case1_coherence_examples():
    assert sc.case1_coherence(sc.Case1Params(0.4, 0), 1.2) == 0
    s = 0.6 - 0.2j
    const = 2 * abs(s) ** 2 / (1 + abs(s) ** 2) ** 2
    for t in (0.0, 0.9, 2.2):
        assert sc.case1_coherence(sc.Case1Params(0, s), t) == pytest.approx(const, abs=1e-15)


@settings(max_examples=25)
@given(complexes, complexes, st.floats(0.2, 2), st.floats(0.2, 2))
def test_case1_closed_forms_match_numeric(r, s, eps, gap):
    p = sc.Case1Params(r, s, eps, gap)
    tr = sc.case1_numeric(p, uniform_grid(math.pi / (eps * gap), 50))
    assert np.max(np.abs(tr["mixedness_B"] - tr["mixedness_exact"])) < 1e-10
    assert np.max(np.abs(tr["coherence_B"] - tr["coherence_exact"])) < 1e-10
    total = tr["mixedness_exact"] + tr["coherence_exact"]
    assert np.max(np.abs(total - total[0])) < 1e-12
    assert np.max(np.abs(tr["variance_B"] - sc.case1_variance(p))) < 1e-10


# --- non-commuting qubit case ---------------------------------------------------------


@pytest.mark.parametrize("r,s", [(0, 0.5), (1, 2j), (0.3 + 0.1j, -0.7)])
def test_case2_initial_state(r, s):
    rho = sc.case2_reduced_state(r, s, 1.0, 0.0).mat
    assert rho[0, 1] == pytest.approx(np.conj(s) / (1 + abs(s) ** 2), abs=1e-15)


@pytest.mark.parametrize("t", [0.0, 0.4, 1.9])
def test_case2_free_rotation(t):
    rho = sc.case2_reduced_state(0, 0, 1.3, t).mat
    assert rho[0, 0].real == pytest.approx(math.cos(1.3 * t) ** 2, abs=1e-15)
    assert dg.purity(rho) == pytest.approx(1, abs=1e-14)


@settings(max_examples=20)
@given(complexes, complexes, st.floats(0.2, 2))
def test_case2_closed_form_matches_numeric(r, s, eps):
    tr = sc.case2_numeric(r, s, eps, uniform_grid(2 * math.pi / eps, 50))
    assert np.max(np.abs(tr["purity_B"] - tr["purity_exact"])) < 1e-10
    assert np.max(np.abs(tr["coherence_B"] - tr["coherence_exact"])) < 1e-10


def test_case2_coherence_grows_to_half_without_entanglement():
    tr = sc.case2_numeric(0, 0, 1.0, uniform_grid(math.pi / 4, 20))
    assert tr["coherence_B"][0] == pytest.approx(0, abs=1e-15)
    assert tr["coherence_B"][-1] == pytest.approx(0.5, abs=1e-12)


def test_fock_env_trivial_environment_stays_pure():
    tr = sc.fock_env_scenario(0, 0, 0.5, 1.0, 6, uniform_grid(6, 40))
    assert np.allclose(tr["purity_B"], 1, atol=1e-12)


@settings(max_examples=15)
@given(complexes, complexes, complexes, st.floats(0.2, 2), st.integers(4, 9))
def test_fock_env_variance_identity(r, p, s, eps, dim):
    tr = sc.fock_env_scenario(r, p, s, eps, dim, uniform_grid(2 * math.pi / eps, 50))
    assert np.max(np.abs(tr["identity_residual"])) < 1e-10


def test_fock_env_dim_check():
    with pytest.raises(ValueError):
        sc.fock_env_scenario(0.5, 0.2, 0, 1.0, 3, GRID)


# --- atom and field mode --------------------------------------------------------------


def test_udw_qubit_exact_examples():
    p = sc.UdwParams(0.3, 0.4)
    assert sc.udw_qubit_fragility_exact(p, 0) == pytest.approx(4 * 0.09)
    assert sc.udw_qubit_fragility_exact(sc.UdwParams(0, 0.4), 0.8) == 0
    overlap = sc.vacuum_overlap_matrix(2 * 0.5, 32)
    assert sc.udw_qubit_fragility_exact(p, 0.5) == pytest.approx(4 * 0.09 * abs(overlap) ** 2, abs=1e-8)


@pytest.mark.parametrize("delta", [0.0, 0.1, 0.5, 0.9, 1.0])
def test_udw_field_exact_examples(delta):
    assert sc.udw_field_fragility_exact(delta, 0) == pytest.approx(1, abs=1e-15)
    assert sc.udw_field_fragility_derived(delta, 0) == pytest.approx(1, abs=1e-15)
    assert sc.udw_field_fragility_exact(0.0, 0.7) == pytest.approx(1)
    late = sc.udw_field_fragility_exact(delta, 10)
    assert late == pytest.approx(delta**2 + (1 - delta) ** 2, abs=1e-12)


def test_udw_params_validation():
    with pytest.raises(Exception):
        sc.UdwParams(0.6, 0.5)
    with pytest.raises(ValueError):
        sc.UdwParams(0.1, 0.5, fock_dim=4)
    with pytest.raises(ValueError):
        sc.udw_field_fragility_exact(1.5, 0)


@pytest.mark.parametrize("delta,alpha", [(0.1, 0.2), (0.3, 0.3), (0.5, 0.5)])
def test_udw_numeric_against_closed_forms(delta, alpha):
    p = sc.UdwParams(alpha, delta)
    tr, rep = sc.udw_numeric(p, GRID)
    assert rep.deviations[-1] < 1e-8 and rep.final_dim >= 64
    derived = np.array([sc.udw_field_fragility_derived(delta, t) for t in GRID])
    assert np.max(np.abs(tr["f2_field"] - derived)) < 1e-10
    qubit = np.array([sc.udw_qubit_fragility_exact(p, t) for t in GRID])
    assert np.max(np.abs(tr["f2_qubit"] - qubit)) < 1e-8
    assert tr["f2_field"][0] == pytest.approx(1, abs=1e-12)
    # the fitted t^2 coefficient is 8, so the reference (6 + sqrt 2) form differs
    assert sc.fit_field_coefficient(delta, GRID, tr["f2_field"]) == pytest.approx(8, abs=1e-8)
    reference = np.array([sc.udw_field_fragility_exact(delta, t) for t in GRID])
    assert np.max(np.abs(tr["f2_field"] - reference)) > 1e-3


def test_udw_coupling_strength_rescales_time():
    p = sc.UdwParams(0.2, 0.3, nu=0.6)
    tr, _ = sc.udw_numeric(p, GRID, ["f2_field", "f2_qubit"])
    derived = np.array([sc.udw_field_fragility_derived(0.3, t, 0.6) for t in GRID])
    assert np.max(np.abs(tr["f2_field"] - derived)) < 1e-10
    assert np.max(np.abs(tr["f2_qubit"] - [sc.udw_qubit_fragility_exact(p, t) for t in GRID])) < 1e-8


def test_udw_cross_independence():
    fields = [sc.udw_numeric(sc.UdwParams(a, 0.3), GRID, ["f2_field"])[0]["f2_field"] for a in (0, 0.2, 0.45)]
    qubits = [sc.udw_numeric(sc.UdwParams(0.2, d), GRID, ["f2_qubit"])[0]["f2_qubit"] for d in (0.1, 0.3, 0.5)]
    assert max(np.max(np.abs(f - fields[0])) for f in fields) < 1e-8
    assert max(np.max(np.abs(q - qubits[0])) for q in qubits) < 1e-8


def test_udw_ratio_and_constant_variance():
    tr, _ = sc.udw_numeric(sc.UdwParams(0.3, 0.4), GRID)
    for side in ("field", "qubit"):
        var = tr[f"variance_{side}"]
        assert np.max(np.abs(var - var[0])) < 1e-9
        assert np.all(tr[f"f2_{side}"] / var <= 1 + 1e-10)
    assert tr["variance_field"][0] == pytest.approx(1)
    assert tr["variance_qubit"][0] == pytest.approx(4 * 0.4 * 0.6)


def test_udw_truncation_failure_is_reported():
    with pytest.raises(TruncationError) as info:
        sc.udw_numeric(sc.UdwParams(0.3, 0.4, fock_dim=8), uniform_grid(6, 10), max_dim=16)
    assert info.value.dims == [8, 16]
    assert len(info.value.deviations) == 1


def test_fit_field_coefficient_recovers_synthetic_value():
    values = [sc._field_form(0.3, t, 5.25) for t in GRID]
    assert sc.fit_field_coefficient(0.3, GRID, values) == pytest.approx(5.25, rel=1e-12)
    with pytest.raises(ValueError):
        sc.fit_field_coefficient(0.0, GRID, values)


# --- thermal mode ---------------------------------------------------------------------


def sinh_form(x, nu=1.0):
    return nu**2 * 4 * math.sinh(x / 2) ** 4 / math.sinh(x) ** 2


@pytest.mark.parametrize("x", [0.05, 0.5, 1.0, 3.0, 10.0])
def test_thermal_tanh_matches_sinh_form(x):
    assert sc.thermal_fragility_exact(x) == pytest.approx(sinh_form(x), rel=1e-12)


def test_thermal_limits():
    assert sc.thermal_fragility_exact(50, nu=1.3) == pytest.approx(1.69, abs=1e-10)
    assert sc.thermal_fragility_exact(math.log(2)) == pytest.approx(1 / 9, rel=1e-14)
    small = sc.thermal_fragility_exact(1e-3)
    assert small < 1e-6
    # leading behaviour of tanh^2(x/2) is x^2/4
    assert small == pytest.approx(1e-6 / 4, rel=1e-6)
    with pytest.raises(ValueError):
        sc.thermal_fragility_exact(0.0)


def test_thermal_numeric_convergence():
    assert abs(sc.thermal_fragility_numeric(2.0, fock_dim=64) - sc.thermal_fragility_exact(2.0)) < 1e-10
    assert abs(sc.thermal_fragility_numeric(0.5, fock_dim=128) - sc.thermal_fragility_exact(0.5)) < 1e-8
    assert sc.thermal_fragility_numeric(50.0, fock_dim=16) == pytest.approx(1, abs=1e-12)


def test_thermal_sweep_monotone():
    sweep = sc.thermal_sweep(np.linspace(0.1, 10, 50))
    assert sweep.axis == "beta_omega"
    assert np.all(np.diff(sweep["f2_numeric"]) > 0)
    assert np.max(np.abs(sweep["f2_numeric"] - sweep["f2_exact"])) < 1e-8
    assert sweep["f2_numeric"][-1] > 0.999


# --- normal ordering ------------------------------------------------------------------


@pytest.mark.parametrize("n,expected", [
    (2, {2: 1, 0: 1}),
    (3, {3: 1, 1: 3}),
    (4, {4: 1, 2: 6, 0: 3}),
])
def test_normal_order_examples(n, expected):
    assert dict(sc.normal_order_expand(n)) == expected


def test_normal_order_rejects_small_n():
    with pytest.raises(ValueError):
        sc.normal_order_expand(1)


def integer_ladder(dim):
    """Integer images of a and a^dagger under conjugation by diag(1/sqrt(k!)).

    a maps to ones on the superdiagonal and a^dagger to 1, 2, 3, ... on the
    subdiagonal, so the normal-ordering identity can be checked in exact
    integer arithmetic.
    """
    a = np.zeros((dim, dim), dtype=object)
    ad = np.zeros((dim, dim), dtype=object)
    for k in range(1, dim):
        a[k - 1, k] = 1
        ad[k, k - 1] = k
    return a, ad


def int_power(m, k):
    out = np.identity(m.shape[0], dtype=object)
    for _ in range(k):
        out = out.dot(m)
    return out


@pytest.mark.parametrize("n", range(2, 9))
def test_normal_order_exact_integer_oracle(n):
    dim = n + 6
    a, ad = integer_ladder(dim)
    lhs = int_power(a + ad, n)
    rhs = np.zeros((dim, dim), dtype=object)
    for k, c in sc.normal_order_expand(n):
        omega = sum((math.comb(k, i) * int_power(ad, k - i).dot(int_power(a, i)) for i in range(k + 1)),
                    np.zeros((dim, dim), dtype=object))
        rhs = rhs + c * omega
    block = dim - n
    assert (lhs[:block, :block] == rhs[:block, :block]).all()


@pytest.mark.parametrize("n", range(2, 9))
def test_normal_order_truncated_matrices(n):
    fs = FockSpace(n + 8)
    lhs = np.linalg.matrix_power(fs.quadrature(), n)
    rhs = sum(c * sc.omega_operator(k, fs) for k, c in sc.normal_order_expand(n))
    block = fs.dim - n
    assert np.allclose(lhs[:block, :block], rhs[:block, :block], atol=1e-9)


def test_vacuum_moments():
    assert sc.vacuum_moment(4) == 3
    assert [sc.vacuum_moment(n) for n in range(0, 9)] == [1, 0, 1, 0, 3, 0, 15, 0, 105]
    assert np.linalg.matrix_power(FockSpace(12).quadrature(), 4)[0, 0].real == pytest.approx(3)


def test_expansion_vacuum_overlap():
    assert sc.expansion_vacuum_overlap(0.0) == 1
    assert abs(sc.expansion_vacuum_overlap(1.0, 40) - math.exp(-0.5)) < 1e-12
    for theta in (0.3, 1.1, 2.0):
        assert abs(sc.expansion_vacuum_overlap(theta) - sc.vacuum_overlap_matrix(theta, 64)) < 1e-10
