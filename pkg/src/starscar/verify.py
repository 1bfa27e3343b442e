"""Invariant suites, one per module, run by ``starscar verify``.

Each suite takes a ``numpy`` generator and returns named checks.  A single
seed fans out to independent per-suite streams through a counter-based
bit generator, so suites can run alone and still see the same numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.stats import unitary_group

from . import entropy as ent
from . import graphcore as gc
from . import landscape as ls
from . import scars as sc
from . import spectral as sp
from .errors import AdmissibilityError
from .numkernel import (
    characteristic_coefficients,
    eig_dense,
    null_space,
    poly_roots,
    unitarity_error,
)

SUITES = ("numkernel", "graphcore", "spectral", "scars", "entropy", "landscape")


@dataclass
class Check:
    name: str
    passed: bool
    value: float | None = None
    threshold: float | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "value": self.value,
            "threshold": self.threshold,
            "detail": self.detail,
        }


def suite_rng(seed: int, suite: str) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed, SUITES.index(suite) + 1]))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(n, random_state=rng)


def _below(name: str, value: float, threshold: float, detail: str = "") -> Check:
    return Check(name, bool(value < threshold), float(value), threshold, detail)


def multiset_distance(a, b) -> float:
    """Largest gap under the best one-to-one matching of two equal-size sets."""
    a, b = np.asarray(a), np.asarray(b)
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())


def check_explicit_unitary(M) -> Check:
    err = unitarity_error(M)
    return _below("graphcore.explicit_unitarity", err, gc.UNITARY_TOL, "max |MM^+ - I| of the supplied central matrix")


# -- suites ---------------------------------------------------------------


def suite_numkernel(rng) -> list[Check]:
    res = mod = 0.0
    for n in range(2, 17):
        e = eig_dense(random_unitary(n, rng))
        res = max(res, e.max_residual)
        mod = max(mod, float(np.abs(np.abs(e.values) - 1).max()))
    gap = 0.0
    for n in range(1, 9):
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        gap = max(gap, multiset_distance(poly_roots(characteristic_coefficients(A)).roots, eig_dense(A).values))
    ns = 0.0
    for n in (3, 5, 8):
        U = random_unitary(n, rng)
        tol = 1e-7
        A = U - eig_dense(U).values[0] * np.eye(n)
        basis = null_space(A, tol)
        if basis.shape[1] == 0:
            ns = math.inf
        else:
            ns = max(ns, float(np.linalg.norm(A @ basis, axis=0).max() / tol))
    return [
        _below("numkernel.unitary_eig_residual", res, 1e-9),
        _below("numkernel.unitary_eig_modulus", mod, 1e-9),
        _below("numkernel.charpoly_roots_vs_eig", gap, 1e-8),
        _below("numkernel.null_space_residual_over_tol", ns, 10.0),
    ]


def suite_graphcore(rng) -> list[Check]:
    errs = []
    f4 = 0.0
    for B in range(1, 65):
        F = gc.fourier_matrix(B)
        errs.append(unitarity_error(F))
        f4 = max(f4, float(np.abs(np.linalg.matrix_power(F, 4) - np.eye(B)).max()))
    struct = 0.0
    for B in gc.admissible_paley_sizes(40):
        E = gc.paley_equitransmitting(B)
        errs.append(unitarity_error(E))
        off = np.abs(E)[~np.eye(B, dtype=bool)]
        struct = max(
            struct,
            float(np.abs(E - E.T).max()),
            float(np.abs(np.diag(E)).max()),
            float(np.abs(off - 1 / math.sqrt(B - 1)).max()),
        )
    for d in range(1, 20):
        errs.append(unitarity_error(gc.kirchhoff_matrix(d)))
    for central in ("fourier", "kirchhoff"):
        g = gc.StarGraph.with_sqrt_primes(5, gc.CentralScattering(central))
        errs.append(unitarity_error(g.S))
        errs.append(unitarity_error(gc.evolution_operator(g, float(rng.uniform(0, 50)))))
    e6 = eig_dense(gc.paley_equitransmitting(6)).values
    e6_gap = float(np.min(np.abs(e6[:, None] - np.array([1, -1])[None, :]), axis=1).max())
    # lifted vectors for +/- sqrt(nu) are independent
    B = 6
    Sig, Pi = random_unitary(B, rng), random_unitary(B, rng)
    d = eig_dense(Sig @ Pi)
    worst = math.inf
    for i in range(B):
        plus, minus = gc.lift_pair(Sig, Pi, d.vectors[:, i], d.values[i])
        worst = min(worst, float(np.linalg.svd(np.stack([plus, minus], axis=1), compute_uv=False)[-1]))
    return [
        _below("graphcore.scattering_unitarity", max(errs), gc.UNITARY_TOL),
        _below("graphcore.fourier_fourth_power", f4, 1e-10),
        _below("graphcore.paley_structure", struct, 1e-12),
        _below("graphcore.paley6_spectrum_pm1", e6_gap, 1e-10),
        Check("graphcore.lift_independence", worst > 1e-8, worst, 1e-8, "smallest singular value of [plus, minus]"),
    ]


def suite_spectral(rng) -> list[Check]:
    g1 = gc.StarGraph(np.array([1.0]), gc.CentralScattering.fourier())
    roots = sp.secular_roots(g1, 0.0, 100.0)
    expected = math.pi * np.arange(0, int(100 / math.pi) + 1)
    ks = np.array([r.k for r in roots])
    b1 = float(np.abs(ks - expected).max()) if len(ks) == len(expected) else math.inf

    g = gc.StarGraph.with_sqrt_primes(3, scale=float(rng.uniform(0.8, 1.2)))
    r_a = sp.secular_roots(g, 0.0, 30.0)
    r_b = sp.secular_roots(g, 0.0, 30.0, step=sp.default_step(g) / 2)
    halving = (
        float(np.abs(np.array([r.k for r in r_a]) - np.array([r.k for r in r_b])).max())
        if len(r_a) == len(r_b)
        else math.inf
    )
    resid = max(r.residual for r in r_a)
    det = max(abs(np.linalg.det(np.eye(2 * g.B) - gc.evolution_operator(g, r.k))) for r in r_a)

    scar, _ = sc.fourier_halfscar(3, 0.7, 1, 1)
    trace = sp.scar_convergence_scan(g, scar, 40.0)
    series = trace.running_min_series()
    monotone = bool(np.all(np.diff(series) <= 0))
    return [
        _below("spectral.b1_roots_exact", b1, 1e-9),
        _below("spectral.step_halving_invariance", halving, 1e-8),
        _below("spectral.root_eigenvector_residual", resid, 1e-7),
        _below("spectral.root_determinant", det, 1e-6),
        Check("spectral.running_min_nonincreasing", monotone),
    ]


def suite_scars(rng) -> list[Check]:
    resid = 0.0
    mult_bad: list[tuple] = []
    ratio = 0.0
    lift = 0.0
    for B in range(4, 33):
        for kappa in np.round(np.arange(0.1, 1.51, 0.1), 10):
            for eps2 in (1, -1):
                try:
                    scar, core = sc.fourier_halfscar(B, float(kappa), 1, eps2)
                except AdmissibilityError:
                    mult_bad.append((B, float(kappa), eps2))
                    continue
                resid = max(resid, scar.residual)
                r = abs(core.x[0]) ** 2 / abs(core.x[1]) ** 2
                ratio = max(ratio, abs(r - (math.cos(kappa) + eps2 * core.D) ** 2) / r)
                top, bottom = scar.vec[:B], scar.vec[B:]
                lift = max(lift, float(np.abs(bottom - scar.bond_phases * top / scar.eigenvalue).max()))
    for B in (6, 14):
        for kappa in (0.5, 1.0, 2.0):
            s = sc.equitransmitting_halfscar(B, kappa, 1, 1)
            resid = max(resid, s.residual)
    norm_gap = 0.0
    for B, j in ((16, 2), (25, 3), (40, 7)):
        basis = sc.fourier_general_j(B, j, float(rng.uniform(0.05, 1.5)))
        for r in range(4):
            closed = basis.component_moduli_closed(r)
            norm_gap = max(norm_gap, abs(closed.sum() - basis.norm_sq_closed[r]) / basis.norm_sq_closed[r])
    return [
        _below("scars.eigen_residual", resid, 1e-9),
        Check("scars.simplicity_grid", not mult_bad, float(len(mult_bad)), detail=f"non-simple at {mult_bad[:5]}"),
        _below("scars.first_component_ratio", ratio, 1e-12),
        _below("scars.general_j_component_sum_vs_norm", norm_gap, 1e-9),
        _below("scars.lift_structure", lift, 1e-12),
    ]


def suite_entropy(rng) -> list[Check]:
    bound_gap = -math.inf
    pair_gap = -math.inf
    for B, kind in ((6, "fourier"), (16, "fourier"), (6, "et"), (14, "et")):
        Sig = gc.fourier_matrix(B) if kind == "fourier" else gc.paley_equitransmitting(B)
        target = math.log(B) if kind == "fourier" else math.log(B - 1)
        for _ in range(20):
            ph = np.exp(1j * rng.uniform(0, 2 * math.pi, B))
            vecs = eig_dense(ph[:, None] * Sig * ph[None, :]).vectors
            for v in vecs.T:
                bound_gap = max(bound_gap, 0.5 * target - ent.shannon(v))
                for sigma in (0.1, 0.5, 0.9):
                    pair_gap = max(pair_gap, target - ent.renyi_pair(v, sigma))
    closed = 0.0
    for B in (4, 8, 16, 32):
        for kappa in (0.3, 0.7, 1.2):
            for eps2 in (1, -1):
                x = sc.halfscar_core(B, kappa, eps2).x
                closed = max(
                    closed,
                    abs(ent.shannon(x) - ent.halfscar_entropy_closed_form(B, kappa, eps2)),
                    abs(ent.renyi_pair(x, 1) - ent.halfscar_renyi_pair_closed_form(B, kappa, eps2)),
                )
    et = 0.0
    for B in (6, 14, 18):
        s = sc.equitransmitting_halfscar(B, 1.0, 1, 1)
        et = max(et, abs(ent.shannon(s.vec) - ent.et_scar_shannon(B)), abs(ent.renyi_pair(s.vec, 1) - ent.et_scar_renyi_pair(B)))
    devs = [
        abs(ent.shannon(sc.fourier_general_j(B, 2, 0.3).f[0]) - ent.asymptotic_reference("GeneralJ-s", B))
        for B in (25, 100, 400)
    ]
    quad = 0.0
    for _ in range(20):
        a = float(rng.uniform(0.5, 3))
        b = float(rng.uniform(-0.95, 0.95)) * a
        al, be = (float(t) for t in rng.uniform(-2, 2, 2))
        quad = max(quad, abs(ent.appD_integral(al, be, a, b) - ent.appD_quadrature(al, be, a, b)))
    return [
        Check("entropy.shannon_uncertainty_bound", bound_gap <= 1e-10, bound_gap, 1e-10),
        Check("entropy.renyi_pair_uncertainty_bound", pair_gap <= 1e-8, pair_gap, 1e-8),
        _below("entropy.fourier_closed_forms", closed, 1e-12),
        _below("entropy.et_exact_values", et, 1e-12),
        Check("entropy.general_j_trend", devs[0] > devs[1] > devs[2], devs[-1], detail=f"deviations {devs}"),
        _below("entropy.appD_quadrature", quad, 1e-9),
    ]


def suite_landscape(rng) -> list[Check]:
    res = 60
    grid = ls.scan(res)
    low = math.log(3) - float(grid.values.min())
    sym = 0.0
    for m in range(res):
        for n in range(res):
            mm, nn = grid.nearest_node(*ls.cyclic_image(grid.axis[m], grid.axis[n]))
            sym = max(sym, abs(grid.values[m, n] - grid.values[mm, nn]))
            sym = max(sym, abs(grid.values[m, n] - grid.values[n, m]))
    exact = math.log(3) + 2 * math.log(2) - 2 / math.sqrt(3) * math.log(math.sqrt(3) + 1)
    return [
        Check("landscape.values_above_bound", low <= 1e-9, low, 1e-9),
        _below("landscape.symmetry", sym, 1e-9),
        _below("landscape.origin_value", abs(float(grid.values[0, 0]) - exact), 1e-12),
    ]


SUITE_FUNCS: dict[str, Callable[[np.random.Generator], list[Check]]] = {
    "numkernel": suite_numkernel,
    "graphcore": suite_graphcore,
    "spectral": suite_spectral,
    "scars": suite_scars,
    "entropy": suite_entropy,
    "landscape": suite_landscape,
}


def run(seed: int = 0, only: list[str] | None = None, explicit=None) -> list[Check]:
    """Run the requested suites (all by default); ``explicit`` adds a unitarity check."""
    names = list(only) if only else list(SUITES)
    for n in names:
        if n not in SUITE_FUNCS:
            raise ValueError(f"unknown suite {n!r}; choose from {SUITES}")
    checks: list[Check] = []
    if explicit is not None:
        checks.append(check_explicit_unitary(explicit))
    for n in names:
        try:
            checks.extend(SUITE_FUNCS[n](suite_rng(seed, n)))
        except Exception as exc:  # a crashing suite is a failed suite, not a crashed run
            checks.append(Check(f"{n}.suite_error", False, detail=f"{type(exc).__name__}: {exc}"))
    return checks
