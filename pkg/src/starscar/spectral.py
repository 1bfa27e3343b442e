"""Secular roots, quantum-graph eigenvectors and scar convergence scans.

Eigenphases of ``U(k)`` all move anticlockwise: ``d theta/dk = <v|L|v>``
with ``L`` the diagonal of directed lengths, so each phase travels at a
speed between ``min L`` and ``max L``.  Root finding counts how many
phases have wrapped through ``0 mod 2 pi`` using the exact identity
``sum(theta_j) = 2 k sum(L) + arg det S (mod 2 pi)`` and bisects on that
count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graphcore import StarGraph, evolution_operator
from .numkernel import as_square, null_space

MERGE_TOL = 1e-6
NULL_TOL = 1e-7
ROOT_XTOL = 1e-13


@dataclass(frozen=True, eq=False)
class SecularRoot:
    k: float
    residual: float
    eigenvector: np.ndarray
    multiplicity: int = 1
    # spanning set of the eigenvalue-1 eigenspace, one vector per column
    basis: np.ndarray | None = field(default=None, repr=False)


@dataclass(eq=False)
class ConvergenceTrace:
    target: np.ndarray
    records: list[tuple[float, float]] = field(default_factory=list)
    checkpoints: list[tuple[float, float]] = field(default_factory=list)

    @property
    def running_min(self) -> float:
        return min((d for _, d in self.records), default=math.inf)

    def running_min_series(self) -> np.ndarray:
        if not self.records:
            return np.empty(0)
        return np.minimum.accumulate(np.array([d for _, d in self.records]))

    def running_min_at(self, k: float) -> float:
        return min((d for kk, d in self.records if kk <= k), default=math.inf)


def default_step(g: StarGraph) -> float:
    return math.pi / (8.0 * g.lengths.max())


def _phase_sum(g: StarGraph, k: float) -> float:
    """Sum of eigenphases of ``U(k)``, each taken in ``(0, 2 pi]``."""
    theta = np.angle(np.linalg.eigvals(evolution_operator(g, k)))
    theta = np.where(theta <= 0, theta + 2 * math.pi, theta)
    return float(theta.sum())


class _WrapCounter:
    """Cumulative number of eigenphase wraps since a reference momentum."""

    def __init__(self, g: StarGraph, k_ref: float):
        self.g = g
        self.k_ref = k_ref
        self.total_len = float(g.lengths.sum())
        self.ref = _phase_sum(g, k_ref)

    def __call__(self, k: float) -> int:
        drift = 2.0 * (k - self.k_ref) * self.total_len
        wraps = (drift - (_phase_sum(self.g, k) - self.ref)) / (2 * math.pi)
        n = round(wraps)
        if abs(wraps - n) > 1e-6:
            raise ArithmeticError(f"wrap count {wraps} is not integral at k={k}")
        return n


def _locate(count: _WrapCounter, a: float, b: float, na: int, nb: int, merge_tol: float, out: list):
    """Append ``(k, multiplicity)`` for every wrap inside ``(a, b]``."""
    c = nb - na
    if c <= 0:
        return
    if c == 1 or b - a < merge_tol:
        # tighten the bracket while it still holds all c crossings
        while b - a > ROOT_XTOL * max(1.0, abs(a)):
            m = 0.5 * (a + b)
            if m <= a or m >= b:
                break
            nm = count(m)
            if nm == na:
                a = m
            elif nm == nb:
                b = m
            else:
                if b - a >= merge_tol:
                    _locate(count, a, m, na, nm, merge_tol, out)
                    _locate(count, m, b, nm, nb, merge_tol, out)
                    return
                # split below the merge tolerance: one cluster
                break
        out.append((0.5 * (a + b), c))
        return
    m = 0.5 * (a + b)
    nm = count(m)
    _locate(count, a, m, na, nm, merge_tol, out)
    _locate(count, m, b, nm, nb, merge_tol, out)


def eigenvector_at(g: StarGraph, k: float, tol: float = NULL_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the eigenvalue-1 eigenspace of ``U(k)``."""
    U = evolution_operator(g, k)
    return null_space(np.eye(len(U)) - U, tol)


def secular_roots(
    g: StarGraph,
    kmin: float,
    kmax: float,
    step: float | None = None,
    merge_tol: float = MERGE_TOL,
) -> list[SecularRoot]:
    """All ``k`` in ``[kmin, kmax]`` where ``U(k)`` has eigenvalue 1."""
    if kmin < 0:
        raise ValueError("kmin must be >= 0")
    if kmax <= kmin:
        return []
    maxL = float(g.lengths.max())
    if step is None:
        step = default_step(g)
    if step <= 0 or step * 2 * maxL >= math.pi:
        raise ValueError(
            f"step {step} too coarse: eigenphases move at most 2*max(L)={2 * maxL:.4g} "
            f"per unit k, so step*2*max(L) must stay below pi"
        )
    pad = 1e-9 * max(1.0, kmax)
    lo, hi = kmin - pad, kmax + pad
    count = _WrapCounter(g, lo)
    n_steps = max(1, math.ceil((hi - lo) / step))
    grid = np.linspace(lo, hi, n_steps + 1)
    found: list[tuple[float, int]] = []
    prev = 0
    for a, b in zip(grid[:-1], grid[1:]):
        nb = count(b)
        if nb != prev:
            _locate(count, a, b, prev, nb, merge_tol, found)
        prev = nb

    roots = []
    eye = np.eye(2 * g.B)
    for k, mult in found:
        if k < kmin - 1e-12 or k > kmax + 1e-12:
            continue
        k = min(max(k, kmin), kmax)
        basis = eigenvector_at(g, k, tol=max(NULL_TOL, 10 * merge_tol) if mult > 1 else NULL_TOL)
        if basis.shape[1] == 0:
            U = evolution_operator(g, k)
            _, _, vh = np.linalg.svd(eye - U)
            basis = vh[-1:].conj().T
        v = basis[:, 0]
        residual = float(np.linalg.norm((eye - evolution_operator(g, k)) @ v))
        roots.append(SecularRoot(float(k), residual, v, mult, basis))
    roots.sort(key=lambda r: r.k)
    return roots


def multiplicity_estimate(A, lam: complex, tol: float) -> int:
    A = as_square(A)
    return int(np.sum(np.abs(np.linalg.eigvals(A) - lam) < tol))


def phase_aligned_distance(a, target) -> float:
    """``min_alpha ||a - e^{i alpha} target||`` for unit vectors."""
    a = np.asarray(a, dtype=complex)
    t = np.asarray(target, dtype=complex)
    a = a / np.linalg.norm(a)
    t = t / np.linalg.norm(t)
    o = np.vdot(t, a)
    phase = o / abs(o) if abs(o) > 0 else 1.0
    # evaluate the norm directly; sqrt(2 - 2|o|) loses half the digits near 0
    return float(np.linalg.norm(a - phase * t))


def subspace_distance(basis, target) -> float:
    """Phase-aligned distance from ``target`` to the nearest unit vector in span(basis)."""
    t = np.asarray(target, dtype=complex)
    t = t / np.linalg.norm(t)
    proj = basis @ (basis.conj().T @ t)
    n = np.linalg.norm(proj)
    if n == 0:
        return math.sqrt(2.0)
    return float(np.linalg.norm(proj / n - t))


def scar_convergence_scan(
    g: StarGraph,
    target,
    kmax: float,
    report_every: float | None = None,
    kmin: float = 0.0,
    step: float | None = None,
) -> ConvergenceTrace:
    """Distance from each eigenvector up to ``kmax`` to a scar target.

    ``target`` is a ``2B`` vector or anything with a ``vec`` attribute.
    ``report_every`` adds ``(k, running_min)`` checkpoints at that spacing.
    """
    vec = np.asarray(getattr(target, "vec", target), dtype=complex)
    if vec.shape != (2 * g.B,):
        raise ValueError(f"target has shape {vec.shape}, expected ({2 * g.B},)")
    trace = ConvergenceTrace(vec)
    for root in secular_roots(g, kmin, kmax, step=step):
        trace.records.append((root.k, subspace_distance(root.basis, vec)))
    if report_every:
        k = report_every
        while k <= kmax + 1e-12:
            trace.checkpoints.append((k, trace.running_min_at(k)))
            k += report_every
    return trace
