"""Bipartite evolution under ``exp(i eps t A (x) B)`` and onset checks.

Free Hamiltonians are omitted: the interaction is assumed to dominate.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import diagnostics as dg
from . import fragility as fr
from .diagnostics import HermitianObservable, as_observable
from .errors import DimensionError, NearPureDivergenceError
from .linalg import HermitianEigen, partial_trace
from .states import DensityMatrix, as_density

DEFAULT_STEP = 1e-3


def _trusted_state(m: np.ndarray) -> DensityMatrix:
    """Wrap a matrix known to be a valid state (unitary image, partial trace)."""
    return DensityMatrix(m, atol=1e-8)


@dataclass(frozen=True)
class ProductInteraction:
    """``H_int = coupling * A (x) B`` with ``A`` on the ancilla, ``B`` on the system."""

    a: HermitianObservable
    b: HermitianObservable
    coupling: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "a", as_observable(self.a))
        object.__setattr__(self, "b", as_observable(self.b))
        object.__setattr__(self, "coupling", float(self.coupling))

    @property
    def dims(self) -> tuple[int, int]:
        return (self.a.dim, self.b.dim)

    @property
    def dim(self) -> int:
        return self.a.dim * self.b.dim

    def generator(self) -> np.ndarray:
        return self.coupling * np.kron(self.a.mat, self.b.mat)

    @cached_property
    def eig(self) -> HermitianEigen:
        # eigenpairs of A (x) B are products of the factors' eigenpairs
        w = self.coupling * np.kron(self.a.eigenvalues, self.b.eigenvalues)
        v = np.kron(self.a.eigenvectors, self.b.eigenvectors)
        order = np.argsort(w, kind="stable")
        return HermitianEigen(w[order], v[:, order])

    def unitary(self, t: float) -> np.ndarray:
        w, v = self.eig
        return (v * np.exp(1j * t * w)) @ v.conj().T

    def swapped(self) -> "ProductInteraction":
        return ProductInteraction(self.b, self.a, self.coupling)


def evolve(rho0, h: ProductInteraction, t: float) -> DensityMatrix:
    """``U rho0 U^dagger`` with ``U = exp(i coupling t A (x) B)``."""
    rho0 = as_density(rho0)
    if rho0.dim != h.dim:
        raise DimensionError(f"state dimension {rho0.dim} != interaction dimension {h.dim}")
    if t == 0:
        return rho0
    u = h.unitary(t)
    return _trusted_state(u @ rho0.mat @ u.conj().T)


def reduce(rho, dims: tuple[int, int], keep: str) -> DensityMatrix:
    """Reduced state on side ``keep`` (``"A"`` or ``"B"``)."""
    if keep not in ("A", "B"):
        raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")
    over = "B" if keep == "A" else "A"
    return _trusted_state(partial_trace(as_density(rho).mat, dims, over=over))


@dataclass
class Trajectory:
    """Time grid plus named scalar series sampled on it."""

    times: np.ndarray
    series: dict[str, np.ndarray] = field(default_factory=dict)
    axis: str = "t"

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.ndim != 1 or np.any(np.diff(self.times) <= 0):
            raise ValueError("time grid must be one-dimensional and strictly ascending")
        self.series = {k: np.asarray(v, dtype=float) for k, v in self.series.items()}
        for name, values in self.series.items():
            if values.shape != self.times.shape:
                raise ValueError(f"series {name!r} has {values.size} values for {self.times.size} times")
            if not np.all(np.isfinite(values)):
                raise ValueError(f"series {name!r} contains non-finite values")

    def __getitem__(self, name: str) -> np.ndarray:
        return self.series[name]

    def __contains__(self, name: str) -> bool:
        return name in self.series

    @property
    def names(self) -> list[str]:
        return list(self.series)

    def to_csv(self, fh=None) -> str | None:
        """Write ``axis,<names...>`` rows with 17 significant digits and LF endings.

        Returns the text when ``fh`` is None.
        """
        out = io.StringIO() if fh is None else fh
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow([self.axis, *self.series])
        cols = [self.times, *self.series.values()]
        for row in zip(*cols):
            writer.writerow([f"{x + 0.0:.17g}" for x in row])
        return out.getvalue() if fh is None else None

    @classmethod
    def from_csv(cls, text: str) -> "Trajectory":
        rows = list(csv.reader(io.StringIO(text)))
        header, body = rows[0], rows[1:]
        data = np.array([[float(x) for x in r] for r in body], dtype=float).reshape(len(body), len(header))
        return cls(data[:, 0], {n: data[:, i] for i, n in enumerate(header[1:], 1)}, axis=header[0])


def uniform_grid(t_max: float, points: int = 50, t_min: float = 0.0) -> np.ndarray:
    return np.linspace(t_min, t_max, int(points))


_NAME = re.compile(r"^(purity|mixedness|coherence|variance|entropy|gamma(\d+)|renyi(\d+)|f(\d+))_(A|B|AB)$")
_NEEDS_OBSERVABLE = ("coherence", "variance", "f")


def _diagnostic(name: str) -> Callable:
    m = _NAME.match(name)
    if not m:
        raise ValueError(f"unknown diagnostic {name!r}")
    kind, gamma_n, renyi_n, frag_n, side = m.groups()
    if side == "AB" and kind.startswith(_NEEDS_OBSERVABLE):
        raise ValueError(f"diagnostic {name!r} needs a single side (A or B)")
    if kind == "purity":
        return lambda rho, obs: dg.purity(rho)
    if kind == "mixedness":
        return lambda rho, obs: dg.mixedness(rho)
    if kind == "entropy":
        return lambda rho, obs: dg.von_neumann_entropy(rho)
    if kind == "coherence":
        return dg.coherence_2norm
    if kind == "variance":
        return dg.variance
    if gamma_n is not None:
        k = int(gamma_n)
        if k < 1:
            raise ValueError(f"unknown diagnostic {name!r}")
        return lambda rho, obs: dg.n_purity(rho, k)
    if renyi_n is not None:
        k = int(renyi_n)
        if k < 1:
            raise ValueError(f"unknown diagnostic {name!r}")
        return lambda rho, obs: dg.renyi_entropy(rho, k)
    k = int(frag_n)
    if k < 1:
        raise ValueError(f"unknown diagnostic {name!r}")
    return lambda rho, obs: fr.fragility(rho, obs, k)


def sample_trajectory(
    rho_a,
    rho_b,
    h: ProductInteraction,
    grid: Sequence[float],
    which: Iterable[str] = (),
    reference: Mapping[str, object] | None = None,
) -> Trajectory:
    """Evolve ``rho_a (x) rho_b`` over ``grid`` and record diagnostics.

    Diagnostic names look like ``purity_B``, ``coherence_A``, ``f3_B``,
    ``gamma4_A``, ``renyi2_B``, ``entropy_AB``.  Observable-dependent
    diagnostics (coherence, variance, fragilities) use ``reference[side]``,
    defaulting to the interaction factor on that side.
    """
    which = list(which)
    funcs = {name: _diagnostic(name) for name in which}
    refs = {"A": h.a, "B": h.b}
    if reference:
        refs.update({k: as_observable(v) for k, v in reference.items()})
    rho0 = np.kron(as_density(rho_a).mat, as_density(rho_b).mat)
    rho0 = _trusted_state(rho0)
    times = np.asarray(grid, dtype=float)
    values = {name: np.empty(times.size) for name in which}
    for i, t in enumerate(times):
        if not which:
            break
        rho_t = evolve(rho0, h, t)
        sides = {"AB": rho_t}
        for name in which:
            side = name.rsplit("_", 1)[1]
            if side not in sides:
                sides[side] = reduce(rho_t, h.dims, side)
            values[name][i] = funcs[name](sides[side], refs.get(side))
    return Trajectory(times, values)


def fd_derivative(f: Callable[[float], float], t0: float, order: int = 1, step: float = DEFAULT_STEP) -> float:
    """Five-point central difference of ``f`` at ``t0``; truncation error O(step^4)."""
    if not step > 0:
        raise ValueError("step must be positive")
    h = float(step)
    samples = np.array([f(t0 + k * h) for k in (-2, -1, 0, 1, 2)], dtype=float)
    if not np.all(np.isfinite(samples)):
        raise ValueError(f"non-finite samples {samples.tolist()}")
    fm2, fm1, f0, fp1, fp2 = samples
    if order == 1:
        return float((fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h))
    if order == 2:
        return float((-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h))
    raise ValueError("order must be 1 or 2")


def relative_error(value: float, target: float, floor: float = 1e-300) -> float:
    return abs(value - target) / max(abs(target), floor)


def unipartite_gamma_ddot(rho, hamiltonian, n: int) -> float:
    """Closed-form second derivative of ``Tr rho^n`` under ``exp(i t H)`` at t = 0.

    ``n Tr[sum_i -rho^i [H,rho] rho^(n-2-i) [H,rho] + 2 rho^(n-1) H rho H - 2 rho^n H^2]``,
    which vanishes identically for a closed system.
    """
    r = as_density(rho).mat
    hm = as_observable(hamiltonian).mat
    c = hm @ r - r @ hm
    powers = [np.linalg.matrix_power(r, k) for k in range(n + 1)]
    total = 0.0 + 0.0j
    for i in range(n - 1):
        total -= np.trace(powers[i] @ c @ powers[n - 2 - i] @ c)
    total += 2 * np.trace(powers[n - 1] @ hm @ r @ hm) - 2 * np.trace(powers[n] @ hm @ hm)
    return float((n * total).real)


@dataclass
class OnsetReport:
    """Finite-difference checks of the onset identities for one configuration."""

    n: int
    gamma_dot: float
    gamma_ddot: float
    predicted_ddot: float
    fragility: float
    variance_a: float
    unipartite_ddot: float
    pure_ddot: float | None = None
    pure_predicted: float | None = None
    entropy_ddot: float | None = None
    entropy_predicted: float | None = None

    @property
    def rel_error(self) -> float:
        return relative_error(self.gamma_ddot, self.predicted_ddot)

    @property
    def pure_rel_error(self) -> float | None:
        if self.pure_ddot is None:
            return None
        return relative_error(self.pure_ddot, self.pure_predicted)

    @property
    def entropy_rel_error(self) -> float | None:
        if self.entropy_ddot is None:
            return None
        return relative_error(self.entropy_ddot, self.entropy_predicted)


def onset_identities(
    rho_a,
    rho_b,
    h: ProductInteraction,
    n: int = 2,
    step: float = DEFAULT_STEP,
    entropy: bool = False,
    eigen_floor: float = fr.EIGEN_FLOOR,
    pure_tol: float = 1e-12,
) -> OnsetReport:
    """Check the second-order onset of the n-purity of the system side.

    Compares the finite-difference ``d^2/dt^2 Tr[rho_B(t)^n]`` at ``t = 0``
    with ``-4 eps^2 (Delta A)^2 f_n(rho_B, B)``.  For pure ``rho_B`` also
    compares the purity curvature with ``-4 eps^2 (Delta A)^2 (Delta B)^2``;
    with ``entropy=True`` compares the von Neumann curvature with
    ``2 eps^2 (Delta A)^2 f_1``.
    """
    rho_a = as_density(rho_a)
    rho_b = as_density(rho_b)
    if (rho_a.dim, rho_b.dim) != h.dims:
        raise DimensionError(f"state dims {(rho_a.dim, rho_b.dim)} != interaction dims {h.dims}")
    if entropy and rho_b.eigenvalues[0] < eigen_floor:
        raise NearPureDivergenceError(rho_b.eigenvalues[0], eigen_floor)

    rho0 = _trusted_state(np.kron(rho_a.mat, rho_b.mat))

    def reduced(t):
        return reduce(evolve(rho0, h, t), h.dims, "B")

    def gamma(k):
        return lambda t: dg.n_purity(reduced(t), k)

    eps2 = h.coupling**2
    var_a = dg.variance(rho_a, h.a)
    f_n = fr.fragility(rho_b, h.b, n)
    report = OnsetReport(
        n=n,
        gamma_dot=fd_derivative(gamma(n), 0.0, 1, step),
        gamma_ddot=fd_derivative(gamma(n), 0.0, 2, step),
        predicted_ddot=-4 * eps2 * var_a * f_n,
        fragility=f_n,
        variance_a=var_a,
        unipartite_ddot=_closed_system_ddot(rho_b, h.b.scaled(h.coupling), n, step),
    )
    if dg.purity(rho_b) > 1 - pure_tol:
        report.pure_ddot = report.gamma_ddot if n == 2 else fd_derivative(gamma(2), 0.0, 2, step)
        report.pure_predicted = -4 * eps2 * var_a * dg.variance(rho_b, h.b)
    if entropy:
        report.entropy_ddot = fd_derivative(
            lambda t: dg.von_neumann_entropy(reduced(t)), 0.0, 2, step
        )
        report.entropy_predicted = 2 * eps2 * var_a * fr.fragility_1(rho_b, h.b, eigen_floor)
    return report


def _closed_system_ddot(rho, hamiltonian: HermitianObservable, n: int, step: float) -> float:
    eig = hamiltonian.eig
    r = as_density(rho).mat

    def gamma(t):
        u = (eig.eigenvectors * np.exp(1j * t * eig.eigenvalues)) @ eig.eigenvectors.conj().T
        return dg.n_purity(_trusted_state(u @ r @ u.conj().T), n)

    return fd_derivative(gamma, 0.0, 2, step)


@dataclass
class VnLimitReport:
    """Finite-difference entropy derivative vs the ``eps -> 0`` purity route."""

    t0: float
    order: int
    entropy_derivative: float
    eps: list[float]
    estimates: list[float]

    @property
    def discrepancies(self) -> list[float]:
        return [e - self.entropy_derivative for e in self.estimates]


def vn_derivative_limit_check(
    rho_path: Callable[[float], object],
    t0: float,
    eps_list: Sequence[float] = (1e-3, 1e-4, 1e-5),
    step: float = DEFAULT_STEP,
    order: int = 1,
) -> VnLimitReport:
    """Compare ``d^k S/dt^k`` with ``-d^k/dt^k gamma_(1+eps) / eps`` for each ``eps``.

    ``(gamma_(1+eps) - 1)/eps`` is evaluated as ``sum lam expm1(eps log lam)/eps``
    to avoid cancellation.  The discrepancy is linear in ``eps``.
    """

    def spectrum(t):
        lam = as_density(rho_path(t)).eigenvalues
        if lam[0] <= 0:
            raise NearPureDivergenceError(lam[0], 0.0)
        return lam

    def entropy(t):
        lam = spectrum(t)
        return float(-np.sum(lam * np.log(lam)))

    def scaled_gamma(eps):
        def g(t):
            lam = spectrum(t)
            return float(np.sum(lam * np.expm1(eps * np.log(lam))) / eps)

        return g

    s_der = fd_derivative(entropy, t0, order, step)
    estimates = [-fd_derivative(scaled_gamma(e), t0, order, step) for e in eps_list]
    return VnLimitReport(t0, order, s_der, list(map(float, eps_list)), estimates)
