"""Worked examples: closed forms and the numeric evolutions that check them.

Covers the qubit/qubit interactions (commuting and non-commuting system
generator), a Fock-superposition environment, a two-level atom coupled to
one field mode through ``sigma_x (x) nu (a + a^dagger)``, and a thermal
field mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import diagnostics as dg
from . import fragility as fr
from .diagnostics import HermitianObservable
from .dynamics import ProductInteraction, Trajectory, sample_trajectory
from .errors import TruncationError
from .linalg import expi
from .states import (
    DensityMatrix,
    FockSpace,
    fock_superposition,
    pure,
    qubit_atom,
    thermal_state,
    vacuum,
)

SIGMA_X_XBASIS = np.diag([1.0, -1.0]).astype(np.complex128)  # sigma_x in (|x+>, |x->)
SIGMA_Y = np.array([[0, -1j], [1j, 0]])
REFERENCE_FIELD_COEFFICIENT = 6 + math.sqrt(2)
DERIVED_FIELD_COEFFICIENT = 8.0
ROUNDOFF_FLOOR = 64 * np.finfo(float).eps


def reference_b(gap: float = 1.0) -> np.ndarray:
    """System observable ``diag(b_x, b_y)`` with ``b_x - b_y = gap``, centred on zero."""
    return np.diag([gap / 2, -gap / 2]).astype(np.complex128)


def _system_qubit(s: complex) -> DensityMatrix:
    return pure([1.0, s])


def _ancilla_qubit(r: complex) -> DensityMatrix:
    return pure([1.0, r])


# --- commuting case: U = exp(i eps t sigma_x (x) B) ---------------------------------


@dataclass(frozen=True)
class Case1Params:
    r: complex
    s: complex
    eps: float = 1.0
    b_gap: float = 1.0


def _case1_oscillation(p: Case1Params, t: float) -> float:
    r2 = abs(p.r) ** 2
    return (1 + r2**2 + 2 * r2 * math.cos(2 * p.eps * t * p.b_gap)) / (1 + r2) ** 2


def case1_mixedness(p: Case1Params, t: float) -> float:
    s2 = abs(p.s) ** 2
    return 1 - (1 + s2**2 + 2 * s2 * _case1_oscillation(p, t)) / (1 + s2) ** 2


def case1_coherence(p: Case1Params, t: float) -> float:
    s2 = abs(p.s) ** 2
    return 2 * s2 * _case1_oscillation(p, t) / (1 + s2) ** 2


def case1_variance(p: Case1Params) -> float:
    """Time-independent variance of B: ``(|s| gap / (1 + |s|^2))^2``."""
    return (abs(p.s) * p.b_gap / (1 + abs(p.s) ** 2)) ** 2


def case1_interaction(p: Case1Params) -> ProductInteraction:
    return ProductInteraction(SIGMA_X_XBASIS, reference_b(p.b_gap), p.eps)


def case1_numeric(p: Case1Params, grid: Sequence[float]) -> Trajectory:
    h = case1_interaction(p)
    traj = sample_trajectory(
        _ancilla_qubit(p.r), _system_qubit(p.s), h, grid,
        ["mixedness_B", "coherence_B", "variance_B", "purity_B", "purity_A"],
    )
    traj.series["mixedness_exact"] = np.array([case1_mixedness(p, t) for t in traj.times])
    traj.series["coherence_exact"] = np.array([case1_coherence(p, t) for t in traj.times])
    return traj


# --- non-commuting case: U = exp(i eps t sigma_x (x) H_B) ---------------------------

H_B = SIGMA_Y  # -i(|b_x><b_y| - |b_y><b_x|)


def case2_reduced_state(r: complex, s: complex, eps: float, t: float) -> DensityMatrix:
    """Reduced system state from the chi/xi amplitudes of each ancilla branch."""
    r2 = abs(r) ** 2
    norm = math.sqrt(1 + r2) * math.sqrt(1 + abs(s) ** 2)
    c, sn = math.cos(eps * t), math.sin(eps * t)
    chi_p = (c + s * sn) / norm
    chi_m = (c - s * sn) / norm
    xi_p = (s * c + sn) / norm
    xi_m = (s * c - sn) / norm
    rho_xx = abs(chi_p) ** 2 + r2 * abs(chi_m) ** 2
    rho_xy = chi_p * np.conj(xi_m) + r2 * chi_m * np.conj(xi_p)
    rho_yy = abs(xi_m) ** 2 + r2 * abs(xi_p) ** 2
    return DensityMatrix(np.array([[rho_xx, rho_xy], [np.conj(rho_xy), rho_yy]]))


def case2_interaction(eps: float) -> ProductInteraction:
    return ProductInteraction(SIGMA_X_XBASIS, H_B, eps)


def case2_numeric(r: complex, s: complex, eps: float, grid: Sequence[float],
                  b_gap: float = 1.0) -> Trajectory:
    """Purity, coherence and variance of the system w.r.t. B (not H_B)."""
    b = reference_b(b_gap)
    traj = sample_trajectory(
        _ancilla_qubit(r), _system_qubit(s), case2_interaction(eps), grid,
        ["purity_B", "coherence_B", "variance_B"], reference={"B": b},
    )
    exact = [case2_reduced_state(r, s, eps, t) for t in traj.times]
    traj.series["purity_exact"] = np.array([dg.purity(x) for x in exact])
    traj.series["coherence_exact"] = np.array([dg.coherence_2norm(x, b) for x in exact])
    return traj


def fock_env_scenario(r: complex, p: complex, s: complex, eps: float, fock_dim: int,
                      grid: Sequence[float], b_gap: float = 1.0) -> Trajectory:
    """Qubit system driven by ``exp(i eps t N (x) H_B)`` with ``|1> + r|2> + p|3>`` environment."""
    if fock_dim < 4:
        raise ValueError("fock_dim must be at least 4 to hold levels 1..3")
    fs = FockSpace(fock_dim)
    env = fock_superposition(fs, [(1, 1.0), (2, r), (3, p)])
    h = ProductInteraction(fs.number(), H_B, eps)
    b = reference_b(b_gap)
    traj = sample_trajectory(env, _system_qubit(s), h, grid,
                             ["purity_B", "coherence_B", "variance_B"], reference={"B": b})
    # qubit identity: var = (1 - purity + coherence)/2 * gap^2
    traj.series["identity_residual"] = traj["variance_B"] - (
        1 - traj["purity_B"] + traj["coherence_B"]) / 2 * b_gap**2
    return traj


# --- atom coupled to one field mode --------------------------------------------------


@dataclass(frozen=True)
class UdwParams:
    alpha: complex
    delta: float
    nu: float = 1.0
    fock_dim: int = 32

    def __post_init__(self):
        qubit_atom(self.alpha, self.delta)  # positivity check
        if self.fock_dim < 8:
            raise ValueError("fock_dim must be at least 8")


def udw_qubit_fragility_exact(p: UdwParams, t: float) -> float:
    """``4|alpha|^2 |<0|exp(2 i t nu (a + a^dagger))|0>|^2 = 4|alpha|^2 exp(-4 nu^2 t^2)``."""
    return 4 * abs(p.alpha) ** 2 * math.exp(-4 * (p.nu * t) ** 2)


def udw_field_fragility_exact(delta: float, t: float) -> float:
    """Reference closed form of the field 2-fragility at ``nu = 1``.

    ``d^2 + (1-d)^2 + 2 d (1-d) (1 - (6 + sqrt 2) t^2) exp(-4 t^2)``.  The
    t^2 coefficient does not agree with the truncated-Fock evolution; see
    :func:`udw_field_fragility_derived` and :func:`fit_field_coefficient`.
    """
    return _field_form(delta, t, REFERENCE_FIELD_COEFFICIENT)


def udw_field_fragility_derived(delta: float, t: float, nu: float = 1.0) -> float:
    """Field 2-fragility from coherent-state algebra, ``(1 - 8 nu^2 t^2) exp(-4 nu^2 t^2)`` cross term.

    The reduced field is ``delta |i nu t><i nu t| + (1-delta) |-i nu t><-i nu t|``
    (coherent states); fragility is w.r.t. ``a + a^dagger``.
    """
    return _field_form(delta, nu * t, DERIVED_FIELD_COEFFICIENT)


def _field_form(delta: float, t: float, coefficient: float) -> float:
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    cross = 2 * delta * (1 - delta)
    return delta**2 + (1 - delta) ** 2 + cross * (1 - coefficient * t * t) * math.exp(-4 * t * t)


def fit_field_coefficient(delta: float, times: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares ``c`` in ``d^2+(1-d)^2 + 2d(1-d)(1 - c t^2) e^{-4t^2}`` (``nu = 1``)."""
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    cross = 2 * delta * (1 - delta)
    if cross == 0:
        raise ValueError("coefficient is unidentifiable when delta is 0 or 1")
    # y - base - cross e^{-4t^2} = -c * cross t^2 e^{-4t^2}
    g = -cross * t**2 * np.exp(-4 * t**2)
    resid = y - (delta**2 + (1 - delta) ** 2) - cross * np.exp(-4 * t**2)
    return float(np.dot(g, resid) / np.dot(g, g))


UDW_SERIES = {
    "f2_field": "f2_B",
    "f2_qubit": "f2_A",
    "purity_field": "purity_B",
    "purity_qubit": "purity_A",
    "variance_field": "variance_B",
    "variance_qubit": "variance_A",
}


@dataclass
class ConvergenceReport:
    dims: list[int]
    deviations: list[float]
    tol: float

    @property
    def final_dim(self) -> int:
        return self.dims[-1]

    @property
    def bound(self) -> float:
        """Truncation error estimate: last successive max-deviation, floored at roundoff.

        The floor (``ROUNDOFF_FLOOR``) keeps the bound meaningful when two
        truncations agree to the last bit.
        """
        return max(self.deviations[-1], ROUNDOFF_FLOOR) if self.deviations else math.inf


def udw_numeric_at(p: UdwParams, grid: Sequence[float], fock_dim: int,
                   which: Iterable[str] | None = None) -> Trajectory:
    """One truncated evolution of ``qubit_atom (x) vacuum`` under ``exp(i t nu sigma_x (x) (a + a^dagger))``."""
    which = list(UDW_SERIES if which is None else which)
    unknown = set(which) - set(UDW_SERIES)
    if unknown:
        raise ValueError(f"unknown diagnostic(s) {sorted(unknown)}")
    fs = FockSpace(fock_dim, nu=p.nu)
    h = ProductInteraction(SIGMA_X_XBASIS, fs.quadrature(), p.nu)
    raw = sample_trajectory(
        qubit_atom(p.alpha, p.delta), vacuum(fs), h, grid,
        [UDW_SERIES[w] for w in which],
        reference={"A": SIGMA_X_XBASIS, "B": fs.quadrature()},
    )
    return Trajectory(raw.times, {w: raw[UDW_SERIES[w]] for w in which})


def udw_numeric(p: UdwParams, grid: Sequence[float], which: Iterable[str] | None = None,
                tol: float = 1e-8, max_dim: int = 256) -> tuple[Trajectory, ConvergenceReport]:
    """Truncated-Fock evolution with a doubling sweep until successive runs agree to ``tol``.

    Starts at ``p.fock_dim`` and raises :class:`TruncationError` if no two
    successive truncations up to ``max_dim`` agree.
    """
    dims, devs = [p.fock_dim], []
    prev = udw_numeric_at(p, grid, p.fock_dim, which)
    while True:
        d = dims[-1] * 2
        if d > max_dim:
            raise TruncationError(
                f"field truncation did not converge to {tol:g} by dimension {dims[-1]}", dims, devs)
        cur = udw_numeric_at(p, grid, d, which)
        dev = max(float(np.max(np.abs(cur[k] - prev[k]))) for k in cur.names) if cur.names else 0.0
        dims.append(d)
        devs.append(dev)
        if dev < tol:
            return cur, ConvergenceReport(dims, devs, tol)
        prev = cur


# --- thermal field ------------------------------------------------------------------


def thermal_fragility_exact(beta: float, omega: float = 1.0, nu: float = 1.0) -> float:
    """``nu^2 4 sinh^4(beta omega / 2) / sinh^2(beta omega)``, evaluated as ``nu^2 tanh^2(beta omega/2)``."""
    x = beta * omega
    if not x > 0:
        raise ValueError(f"beta*omega must be positive, got {x}")
    return nu**2 * math.tanh(x / 2) ** 2


def thermal_fragility_numeric(beta: float, omega: float = 1.0, nu: float = 1.0,
                              fock_dim: int = 128) -> float:
    fs = FockSpace(fock_dim, omega=omega, nu=nu)
    return fr.fragility_2(thermal_state(fs, beta), HermitianObservable(fs.coupling()))


def thermal_dim_needed(beta_omega: float, floor: float = 1e-17, cap: int = 4096) -> int:
    """Truncation at which the last Boltzmann weight drops below ``floor``."""
    return min(cap, max(16, int(math.ceil(-math.log(floor) / beta_omega)) + 2))


def thermal_sweep(beta_omega: Sequence[float], omega: float = 1.0, nu: float = 1.0,
                  fock_dim: int | None = None) -> Trajectory:
    """Numeric and closed-form thermal 2-fragility over a grid of ``beta * omega``."""
    xs = np.asarray(beta_omega, dtype=float)
    num, exact, dims = [], [], []
    for x in xs:
        d = fock_dim or thermal_dim_needed(x)
        num.append(thermal_fragility_numeric(x / omega, omega, nu, d))
        exact.append(thermal_fragility_exact(x / omega, omega, nu))
        dims.append(d)
    return Trajectory(xs, {"f2_numeric": num, "f2_exact": exact, "fock_dim": dims}, axis="beta_omega")


# --- normal ordering of (a + a^dagger)^n ----------------------------------------------


def double_factorial_odd(i: int) -> int:
    """``prod_{k<i} (2k+1) = (2i-1)!!``."""
    out = 1
    for k in range(i):
        out *= 2 * k + 1
    return out


def normal_order_expand(n: int) -> list[tuple[int, int]]:
    """Coefficients ``(k, c_k)`` with ``(a + a^dagger)^n = sum_k c_k Omega_k``, k descending.

    ``Omega_k = sum_i C(k, i) a^dagger^(k-i) a^i`` and ``Omega_0`` is the identity.
    """
    if int(n) != n or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n}")
    n = int(n)
    return [(n - 2 * i, double_factorial_odd(i) * math.comb(n, 2 * i)) for i in range(n // 2 + 1)]


def omega_operator(k: int, fs: FockSpace) -> np.ndarray:
    """Normally ordered ``Omega_k`` on the truncation (exact there, no edge effects)."""
    a = fs.annihilation()
    ad = a.T.copy()
    out = np.zeros((fs.dim, fs.dim), dtype=np.complex128)
    for i in range(k + 1):
        out += math.comb(k, i) * np.linalg.matrix_power(ad, k - i) @ np.linalg.matrix_power(a, i)
    return out


def vacuum_moment(n: int) -> int:
    """``<0|(a + a^dagger)^n|0>`` from the ``Omega_0`` coefficient of the expansion."""
    if n == 0:
        return 1
    if n == 1:
        return 0
    return dict(normal_order_expand(n)).get(0, 0)


def expansion_vacuum_overlap(theta: float, max_n: int = 60) -> complex:
    """``|0>``-component of ``exp(i theta (a + a^dagger))|0>`` summed through order ``max_n``."""
    total = 0.0 + 0.0j
    for n in range(max_n + 1):
        m = vacuum_moment(n)
        if m:
            total += float(Fraction(m, math.factorial(n))) * (1j * theta) ** n
    return complex(total)


def vacuum_overlap_matrix(theta: float, fock_dim: int = 64) -> complex:
    """``<0|exp(i theta (a + a^dagger))|0>`` from the truncated matrix exponential."""
    fs = FockSpace(fock_dim)
    return complex(expi(fs.quadrature(), theta)[0, 0])
