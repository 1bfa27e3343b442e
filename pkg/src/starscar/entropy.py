"""Shannon and Renyi entropies of amplitude vectors, uncertainty bounds and
the closed forms they are compared against.

All logarithms are natural.  Weights are ``|v_b|^2 / ||v||^2`` so inputs
never need to be normalised, and ``0 log 0`` is taken as ``0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .graphcore import principal_sqrt
from .numkernel import adaptive_quadrature, as_square, as_vector, unitarity_error

RHO_SHANNON_GUARD = 1e-6


def weights(v) -> np.ndarray:
    v = as_vector(v, "v")
    p = np.abs(v) ** 2
    total = p.sum()
    if total == 0:
        raise ValueError("entropy of the zero vector is undefined")
    return p / total


def shannon(v) -> float:
    p = weights(v)
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def renyi_inf(v) -> float:
    return float(-math.log(weights(v).max()))


def renyi(v, rho: float) -> float:
    """``-(1/rho) log sum p^{1+rho}`` for ``rho > -1``; ``rho = inf`` gives the min-entropy."""
    if rho == math.inf:
        return renyi_inf(v)
    if rho <= -1:
        raise ValueError(f"Renyi order rho={rho} must exceed -1")
    if rho == 0:
        raise ValueError("rho=0 is the Shannon limit; call shannon() instead")
    if abs(rho) < RHO_SHANNON_GUARD:
        return shannon(v)
    p = weights(v)
    p = p[p > 0]
    # factor out the largest weight so large rho does not underflow
    pmax = p.max()
    s = np.sum((p / pmax) ** (1 + rho))
    return float(-((1 + rho) * math.log(pmax) + math.log(s)) / rho)


def conjugate_orders(sigma: float) -> tuple[float, float]:
    """``(sigma/(1-sigma), -sigma/(1+sigma))``; ``sigma = 1`` gives ``(inf, -1/2)``."""
    if not 0 <= sigma <= 1:
        raise ValueError("sigma must lie in [0, 1]")
    first = math.inf if sigma == 1 else sigma / (1 - sigma)
    return first, -sigma / (1 + sigma)


def renyi_pair(v, sigma: float) -> float:
    """``R_{sigma/(1-sigma)} + R_{-sigma/(1+sigma)}``; twice the Shannon entropy at ``sigma = 0``."""
    if sigma == 0:
        return 2 * shannon(v)
    r1, r2 = conjugate_orders(sigma)
    return renyi(v, r1) + renyi(v, r2)


def uncertainty_bounds(U, sigma: float = 1.0) -> tuple[float, float]:
    """Lower bounds ``(-1/2 log c, -log c)`` with ``c = max |U_ij|^2``.

    The first bounds the Shannon entropy of any eigenvector of ``U``, the
    second the Renyi pair at every ``sigma`` in ``[0, 1]``.
    """
    U = as_square(U, "U")
    if not 0 <= sigma <= 1:
        raise ValueError("sigma must lie in [0, 1]")
    err = unitarity_error(U)
    if err > 1e-8:
        raise ValueError(f"U is not unitary (max |UU^+ - I| = {err:.3e})")
    c = float(np.abs(U).max() ** 2)
    return -0.5 * math.log(c), -math.log(c)


@dataclass
class EntropyReport:
    shannon: float
    renyi: dict[float, float]
    renyi_inf: float
    lower_bound_shannon: float | None = None
    lower_bound_renyi_pair: float | None = None
    renyi_pair: dict[float, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        def key(x):
            return "inf" if x == math.inf else repr(float(x))

        return {
            "shannon": self.shannon,
            "renyi": {key(r): val for r, val in self.renyi.items()},
            "renyi_inf": self.renyi_inf,
            "renyi_pair": {key(s): val for s, val in self.renyi_pair.items()},
            "lower_bound_shannon": self.lower_bound_shannon,
            "lower_bound_renyi_pair": self.lower_bound_renyi_pair,
        }


def entropy_report(
    v,
    rhos: Iterable[float] = (-0.5, 0.5, 1.0, 2.0),
    sigmas: Iterable[float] = (),
    reduced=None,
    lifted: bool = False,
) -> EntropyReport:
    """Entropies of ``v`` plus the uncertainty bounds from ``reduced``.

    ``lifted`` means ``v`` is a ``2B`` lift of an eigenvector of the
    ``B x B`` matrix ``reduced``, which shifts the Shannon bound by ``log 2``
    and the pair bound by ``2 log 2``.
    """
    lo_s = lo_r = None
    if reduced is not None:
        lo_s, lo_r = uncertainty_bounds(reduced)
        if lifted:
            lo_s += math.log(2)
            lo_r += 2 * math.log(2)
    return EntropyReport(
        shannon=shannon(v),
        renyi={float(r): renyi(v, r) for r in rhos},
        renyi_inf=renyi_inf(v),
        lower_bound_shannon=lo_s,
        lower_bound_renyi_pair=lo_r,
        renyi_pair={float(s): renyi_pair(v, s) for s in sigmas},
    )


# -- closed forms --------------------------------------------------------


def _ND(B: int, kappa: float, eps2: int) -> tuple[float, float]:
    D = math.sqrt(B - math.sin(kappa) ** 2)
    return D + eps2 * math.cos(kappa), D


def halfscar_entropy_closed_form(B: int, kappa: float, eps2: int = 1) -> float:
    """Shannon entropy of the reduced first-bond eigenvector ``x``."""
    if B < 2:
        raise ValueError("B must be >= 2")
    N, D = _ND(B, kappa, eps2)
    q = B - 1
    return math.log(2 * D) - (N * N - q) / (N * N + q) * math.log(N)


def halfscar_renyi_pair_closed_form(B: int, kappa: float, eps2: int = 1) -> float:
    """``r_inf + r_{-1/2}`` of the reduced first-bond eigenvector.

    Takes the first component as the largest, which holds when ``N >= 1``
    (every ``B >= 4``; fails only for ``B = 3``, ``eps2 = -1``).
    """
    N, _ = _ND(B, kappa, eps2)
    return -math.log(N) + 2 * math.log(math.sqrt(N) + (B - 1) / math.sqrt(N))


def et_reduced_shannon(B: int) -> float:
    return 0.5 * math.log(B - 1) + math.log(2)


def et_reduced_renyi_pair(B: int) -> float:
    return math.log(B - 1) + 2 * math.log(1 + 1 / math.sqrt(B - 1))


def et_scar_shannon(B: int) -> float:
    return 0.5 * math.log(B - 1) + 2 * math.log(2)


def et_scar_renyi_pair(B: int) -> float:
    return et_reduced_renyi_pair(B) + 2 * math.log(2)


ASYMPTOTIC_FAMILIES = (
    "FourierFirstBond-S",
    "FourierFirstBond-Rpair",
    "ET-S",
    "ET-Rpair",
    "GeneralJ-s",
    "GeneralJ-S",
    "Kirchhoff-S",
)


def asymptotic_reference(family: str, B: int) -> float:
    """Leading large-``B`` value of an entropy; exact for ``ET-S`` and ``Kirchhoff-S``."""
    log2 = math.log(2)
    if family == "FourierFirstBond-S":
        return 0.5 * math.log(B) + 2 * log2
    if family == "FourierFirstBond-Rpair":
        return math.log(B) + 2 * log2
    if family == "ET-S":
        return et_scar_shannon(B)
    if family == "ET-Rpair":
        return math.log(B - 1) + 2 * log2
    if family == "GeneralJ-s":
        return 0.5 * math.log(B) + 2 * log2 - 0.5
    if family == "GeneralJ-S":
        return 0.5 * math.log(B) + 3 * log2 - 0.5
    if family == "Kirchhoff-S":
        return 2 * log2
    raise ValueError(f"unknown family {family!r}; expected one of {ASYMPTOTIC_FAMILIES}")


@dataclass
class RelationsReport:
    shannon_lifted: float
    shannon_reduced: float
    renyi_lifted: dict[float, float]
    renyi_reduced: dict[float, float]

    @property
    def max_error(self) -> float:
        errs = [abs(self.shannon_lifted - self.shannon_reduced - math.log(2))]
        errs += [abs(self.renyi_lifted[r] - self.renyi_reduced[r] - math.log(2)) for r in self.renyi_lifted]
        return max(errs)

    def ok(self, tol: float = 1e-12) -> bool:
        return self.max_error < tol


def entropy_relations_check(
    x, kappa: float, lam: complex | None = None, rhos: Iterable[float] = (-0.5, 1.0, 5.0)
) -> RelationsReport:
    """Lift ``x`` to ``(lam^{1/2} x, P(kappa) x)`` and compare lifted and reduced entropies."""
    x = as_vector(x, "x")
    P = np.ones(len(x), dtype=complex)
    P[0] = np.exp(1j * kappa)
    xh = x / np.linalg.norm(x)
    a = np.concatenate([principal_sqrt(1.0 if lam is None else lam) * xh, P * xh])
    rhos = [float(r) for r in rhos]
    return RelationsReport(
        shannon(a),
        shannon(x),
        {r: renyi(a, r) for r in rhos},
        {r: renyi(x, r) for r in rhos},
    )


# -- the integral of (alpha + beta cos x) log(a + b cos x) over a period --


def _check_appd(a: float, b: float, boundary: bool) -> None:
    if a <= 0:
        raise ValueError("a must be positive")
    if abs(b) > a or (abs(b) == a and not boundary):
        raise ValueError("need |b| < a (or the boundary case alpha=a, beta=b=a)")


def appD_integrand(alpha: float, beta: float, a: float, b: float):
    def f(x: float) -> float:
        arg = a + b * math.cos(x)
        return 0.0 if arg <= 0 else (alpha + beta * math.cos(x)) * math.log(arg)

    return f


def appD_integral(alpha: float, beta: float, a: float, b: float) -> float:
    """Closed form of ``int_0^{2 pi} (alpha + beta cos x) log(a + b cos x) dx``."""
    boundary = alpha == a and beta == b and b == a
    _check_appd(a, b, boundary)
    if boundary:
        return 2 * math.pi * a * (1 + math.log(a / 2))
    if b == 0:
        return 2 * math.pi * alpha * math.log(a)
    r = math.sqrt(a * a - b * b)
    # a - r written as b^2/(a + r) to avoid cancellation for small b
    return 2 * math.pi * alpha * math.log((a + r) / 2) + 2 * math.pi * beta * b / (a + r)


def appD_quadrature(alpha: float, beta: float, a: float, b: float, tol: float = 1e-11) -> float:
    """The same integral by adaptive quadrature."""
    boundary = alpha == a and beta == b and b == a
    _check_appd(a, b, boundary)
    # for b < 0 the singular point sits at the endpoints, which QUADPACK never samples
    pts = [math.pi] if b > 0 else None
    return adaptive_quadrature(appD_integrand(alpha, beta, a, b), 0.0, 2 * math.pi, tol=tol, points=pts)
