"""Randomized invariant suites behind ``nfragility verify``.

Each suite returns a list of :class:`Check` records holding the worst
residual seen and the tolerance it is held to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import diagnostics as dg
from . import fragility as fr
from . import scenarios as sc
from .dynamics import ProductInteraction, onset_identities, uniform_grid
from .linalg import random_hermitian
from .states import FockSpace, random_density, random_pure

# default tolerances, all overridable through ``tolerances=``
TOLERANCES = {
    "onset_rel": 1e-4,
    "onset_first": 1e-8,
    "pure_rel": 1e-6,
    "entropy_rel": 1e-4,
    "unipartite": 1e-8,
    "bound": 1e-10,
    "pure_equality": 1e-8,
    "form_equivalence": 1e-10,
    "fn_nonneg": 1e-10,
    "case1": 1e-10,
    "case1_sum": 1e-12,
    "case2": 1e-10,
    "fock_identity": 1e-10,
    "udw_field": 1e-6,
    "udw_qubit": 1e-8,
    "thermal": 1e-8,
    "overlap_series": 1e-12,
}


@dataclass
class Check:
    name: str
    worst: float
    tol: float
    status: str  # "pass" | "fail" | "warn"
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def line(self) -> str:
        extra = f"  ({self.note})" if self.note else ""
        return f"{self.status.upper():4s}  {self.name:<34s} worst={self.worst:.3e}  tol={self.tol:.1e}{extra}"


def _check(name: str, worst: float, tol: float, note: str = "") -> Check:
    return Check(name, float(worst), tol, "pass" if worst <= tol else "fail", note)


def onset_suite(seed: int = 0, trials: int = 200, step: float = 1e-3,
                pure_step: float = 5e-3, tolerances: dict | None = None) -> list[Check]:
    tol = {**TOLERANCES, **(tolerances or {})}
    rng = np.random.default_rng(seed)
    worst = {"rel": 0.0, "first": 0.0, "pure": 0.0, "entropy": 0.0, "uni": 0.0}
    for _ in range(trials):
        da, db = (int(x) for x in rng.integers(2, 7, size=2))
        h = ProductInteraction(random_hermitian(da, rng), random_hermitian(db, rng), 1.0)
        rho_a = random_density(da, rng=rng)
        rho_b = random_density(db, rng=rng)
        for n in (2, 3, 4):
            rep = onset_identities(rho_a, rho_b, h, n, step, entropy=(n == 2))
            worst["rel"] = max(worst["rel"], rep.rel_error)
            worst["first"] = max(worst["first"], abs(rep.gamma_dot))
            worst["uni"] = max(worst["uni"], abs(rep.unipartite_ddot))
            if n == 2:
                worst["entropy"] = max(worst["entropy"], rep.entropy_rel_error)
        rep = onset_identities(rho_a, random_pure(db, rng=rng), h, 2, pure_step)
        worst["pure"] = max(worst["pure"], rep.pure_rel_error)
    return [
        _check("onset: ddot gamma_n = -4 var_A f_n", worst["rel"], tol["onset_rel"], "relative, n=2,3,4"),
        _check("onset: |dot gamma_n(0)|", worst["first"], tol["onset_first"]),
        _check("onset: pure ddot gamma_2", worst["pure"], tol["pure_rel"], "relative"),
        _check("onset: ddot S = 2 var_A f_1", worst["entropy"], tol["entropy_rel"], "relative"),
        _check("onset: unipartite ddot gamma_n", worst["uni"], tol["unipartite"]),
    ]


def bounds_suite(seed: int = 0, trials: int = 10_000, tolerances: dict | None = None) -> list[Check]:
    tol = {**TOLERANCES, **(tolerances or {})}
    rng = np.random.default_rng(seed)
    max_excess = -math.inf  # max(f2 - var)
    max_form = 0.0
    min_fn = math.inf
    for _ in range(trials):
        d = int(rng.integers(2, 9))
        rho = random_density(d, rng=rng, rank=int(rng.integers(1, d + 1)))
        b = dg.HermitianObservable(random_hermitian(d, rng, scale=None))
        f2 = fr.fragility_2(rho, b)
        max_excess = max(max_excess, f2 - dg.variance(rho, b))
        max_form = max(max_form, abs(f2 - fr.fragility_2_eigenbasis(rho, b)))
        for n in (3, 4, 5):
            min_fn = min(min_fn, fr.fragility_n(rho, b, n))
    max_pure = 0.0
    for _ in range(max(1, trials // 10)):
        d = int(rng.integers(2, 9))
        rho = random_pure(d, rng=rng)
        b = random_hermitian(d, rng, scale=None)
        max_pure = max(max_pure, abs(fr.variance_fragility_gap(rho, b)))
    return [
        _check("bounds: f2 - variance <= 0", max_excess, tol["bound"], f"{trials} states, dims 2-8"),
        _check("bounds: pure-state equality", max_pure, tol["pure_equality"]),
        _check("bounds: f2 commutator == eigenbasis", max_form, tol["form_equivalence"]),
        _check("bounds: f_n >= 0 (n=3,4,5)", max(0.0, -min_fn), tol["fn_nonneg"]),
    ]


def scenarios_suite(seed: int = 0, trials: int = 100, tolerances: dict | None = None) -> list[Check]:
    tol = {**TOLERANCES, **(tolerances or {})}
    rng = np.random.default_rng(seed)

    def rc():
        return complex(rng.normal(), rng.normal())

    # commuting qubit case
    w_match = w_sum = w_var = 0.0
    for _ in range(trials):
        p = sc.Case1Params(rc(), rc(), float(rng.uniform(0.2, 2)), float(rng.uniform(0.2, 2)))
        grid = uniform_grid(math.pi / (p.eps * p.b_gap), 50)
        tr = sc.case1_numeric(p, grid)
        w_match = max(w_match, np.max(np.abs(tr["mixedness_B"] - tr["mixedness_exact"])),
                      np.max(np.abs(tr["coherence_B"] - tr["coherence_exact"])))
        total = tr["mixedness_exact"] + tr["coherence_exact"]
        w_sum = max(w_sum, np.max(np.abs(total - total[0])))
        w_var = max(w_var, np.max(np.abs(tr["variance_B"] - sc.case1_variance(p))))
    checks = [
        _check("case1: closed forms vs numeric", w_match, tol["case1"]),
        _check("case1: mixedness + coherence const", w_sum, tol["case1_sum"]),
        _check("case1: variance const", w_var, tol["case1"]),
    ]

    # non-commuting qubit case and Fock environment
    w2 = wf = 0.0
    n2 = max(1, trials // 5)
    for _ in range(n2):
        r, s, eps = rc(), rc(), float(rng.uniform(0.2, 2))
        h = sc.case2_interaction(eps)
        rho0 = np.kron(sc._ancilla_qubit(r).mat, sc._system_qubit(s).mat)
        for t in uniform_grid(2 * math.pi / eps, 50):
            u = h.unitary(t)
            red = np.einsum("ijik->jk", (u @ rho0 @ u.conj().T).reshape(2, 2, 2, 2))
            w2 = max(w2, np.max(np.abs(red - sc.case2_reduced_state(r, s, eps, t).mat)))
        tr = sc.fock_env_scenario(rc(), rc(), rc(), eps, 6, uniform_grid(2 * math.pi / eps, 50))
        wf = max(wf, np.max(np.abs(tr["identity_residual"])))
    checks += [
        _check("case2: closed-form reduced state", w2, tol["case2"]),
        _check("fock-env: variance identity", wf, tol["fock_identity"]),
    ]

    # atom-field model
    grid = uniform_grid(1.5, 50)
    w_field = w_qubit = 0.0
    coefficients = []
    for delta, alpha in ((0.1, 0.2), (0.3, 0.3), (0.5, 0.5)):
        p = sc.UdwParams(alpha, delta)
        tr, _ = sc.udw_numeric(p, grid)
        derived = np.array([sc.udw_field_fragility_derived(delta, t) for t in grid])
        w_field = max(w_field, np.max(np.abs(tr["f2_field"] - derived)))
        exact_q = np.array([sc.udw_qubit_fragility_exact(p, t) for t in grid])
        w_qubit = max(w_qubit, np.max(np.abs(tr["f2_qubit"] - exact_q)))
        coefficients.append(sc.fit_field_coefficient(delta, grid, tr["f2_field"]))
    reference_gap = max(abs(c - sc.REFERENCE_FIELD_COEFFICIENT) for c in coefficients)
    checks += [
        _check("udw: field f2 numeric vs derived", w_field, tol["udw_field"]),
        _check("udw: qubit f2 numeric vs exact", w_qubit, tol["udw_qubit"]),
        Check("udw: reference (6+sqrt2) coefficient", reference_gap, tol["udw_field"],
              "pass" if reference_gap <= tol["udw_field"] else "warn",
              f"fitted t^2 coefficient {np.mean(coefficients):.10f}"),
    ]

    # thermal mode
    w_th = max(abs(sc.thermal_fragility_numeric(x, 1.0, 1.0, 128) - sc.thermal_fragility_exact(x))
               for x in np.linspace(0.5, 10, 20))
    w_ov = max(abs(sc.expansion_vacuum_overlap(th) - math.exp(-th * th / 2))
               for th in np.linspace(0, 2, 21))
    fs = FockSpace(16)
    checks += [
        _check("thermal: numeric vs closed form", w_th, tol["thermal"], "dim 128"),
        _check("normal order: vacuum series", w_ov, tol["overlap_series"]),
        _check("normal order: <0|(a+a^+)^4|0> = 3", abs(sc.vacuum_moment(4) - 3), 0.0),
        _check("normal order: truncated Omega_0 check",
               abs(np.linalg.matrix_power(fs.quadrature(), 4)[0, 0] - 3), 1e-12),
    ]
    return checks


SUITES: dict[str, Callable[..., list[Check]]] = {
    "onset": onset_suite,
    "bounds": bounds_suite,
    "scenarios": scenarios_suite,
}
