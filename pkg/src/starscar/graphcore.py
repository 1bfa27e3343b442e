"""Scattering matrices and the star-graph evolution operator.

Directed bonds are ordered inward first: bonds ``1..B`` point to the
central vertex and bond ``j + B`` is the reversal of bond ``j``.  Every
``2B`` vector in the package uses this ordering.  Bond indices in the
public functions are 1-based to match that convention.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from sympy import isprime, prime

from .errors import AdmissibilityError
from .numkernel import as_square, as_vector, unitarity_error

UNITARY_TOL = 1e-10


def fourier_matrix(B: int) -> np.ndarray:
    """``B x B`` discrete Fourier matrix, entry ``(j,k) = B^{-1/2} w^{(j-1)(k-1)}``."""
    if B < 1:
        raise ValueError("B must be >= 1")
    idx = np.arange(B)
    # reduce the exponent mod B first; keeps phases exact for large B
    return np.exp(2j * np.pi * (np.outer(idx, idx) % B) / B) / math.sqrt(B)


def paley_admissible(B: int) -> bool:
    return B >= 2 and isprime(B - 1) and (B - 1) % 4 == 1


def admissible_paley_sizes(limit: int) -> list[int]:
    return [B for B in range(2, limit + 1) if paley_admissible(B)]


def quadratic_character(q: int) -> np.ndarray:
    """Legendre symbol ``chi(a)`` for ``a = 0..q-1`` (``chi(0) = 0``)."""
    chi = -np.ones(q, dtype=int)
    chi[0] = 0
    chi[[(a * a) % q for a in range(1, q)]] = 1
    return chi


def paley_equitransmitting(B: int) -> np.ndarray:
    """Symmetric equi-transmitting matrix from quadratic residues mod ``B - 1``.

    Needs ``B - 1`` prime with ``B - 1 = 1 (mod 4)``; then the character is
    even and the result is a real symmetric conference matrix scaled to be
    orthogonal.
    """
    if not paley_admissible(B):
        raise AdmissibilityError(
            f"B={B} is not admissible: the Paley construction needs B-1 prime "
            f"and B-1 = 1 mod 4 (admissible B <= 40: {admissible_paley_sizes(40)})"
        )
    q = B - 1
    chi = quadratic_character(q)
    idx = np.arange(q)
    E = np.zeros((B, B))
    E[0, 1:] = 1.0
    E[1:, 0] = 1.0
    E[1:, 1:] = chi[(idx[:, None] - idx[None, :]) % q]
    return (E / math.sqrt(q)).astype(complex)


def skew_equitransmitting(B: int) -> np.ndarray:
    """Real antisymmetric equi-transmitting matrix of size ``(q + 1) 2^m``.

    Starts from the skew conference matrix built on quadratic residues mod a
    prime ``q = 3 (mod 4)`` and doubles it with ``[[C, C + I], [C - I, -C]]``,
    which keeps ``C`` skew with ``C C^T = (B - 1) I``.
    """
    base = B
    while base % 2 == 0 and not _skew_base(base):
        base //= 2
    if not _skew_base(base):
        raise AdmissibilityError(
            f"B={B} is not (q+1)*2^m with q a prime = 3 mod 4; no skew construction available"
        )
    q = base - 1
    chi = quadratic_character(q)
    idx = np.arange(q)
    C = np.zeros((base, base))
    C[0, 1:] = 1.0
    C[1:, 0] = -1.0
    C[1:, 1:] = chi[(idx[:, None] - idx[None, :]) % q]
    eye = np.eye(base)
    while len(C) < B:
        C = np.block([[C, C + eye], [C - eye, -C]])
        eye = np.eye(len(C))
    return (C / math.sqrt(B - 1)).astype(complex)


def _skew_base(n: int) -> bool:
    return n >= 4 and isprime(n - 1) and (n - 1) % 4 == 3


def kirchhoff_matrix(d: int) -> np.ndarray:
    """Neumann-Kirchhoff vertex scattering, ``2/d - delta``."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    return (np.full((d, d), 2.0 / d) - np.eye(d)).astype(complex)


@dataclass(frozen=True, eq=False)
class CentralScattering:
    """Which unitary sits at the central vertex.

    ``kind`` is one of ``fourier``, ``et-paley``, ``kirchhoff`` or
    ``explicit``; only ``explicit`` carries a matrix.
    """

    kind: str
    explicit: np.ndarray | None = None

    KINDS = ("fourier", "et-paley", "kirchhoff", "explicit")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown central scattering {self.kind!r}; expected one of {self.KINDS}")
        if self.kind == "explicit":
            if self.explicit is None:
                raise ValueError("explicit central scattering needs a matrix")
            M = as_square(self.explicit, "explicit scattering matrix")
            err = unitarity_error(M)
            if err >= UNITARY_TOL:
                raise AdmissibilityError(
                    f"explicit scattering matrix is not unitary (max |MM^+ - I| = {err:.3e})"
                )
            object.__setattr__(self, "explicit", M)

    @classmethod
    def fourier(cls) -> "CentralScattering":
        return cls("fourier")

    @classmethod
    def et_paley(cls) -> "CentralScattering":
        return cls("et-paley")

    @classmethod
    def kirchhoff(cls) -> "CentralScattering":
        return cls("kirchhoff")

    @classmethod
    def from_matrix(cls, M) -> "CentralScattering":
        return cls("explicit", np.asarray(M, dtype=complex))

    def matrix(self, B: int) -> np.ndarray:
        if self.kind == "fourier":
            return fourier_matrix(B)
        if self.kind == "et-paley":
            return paley_equitransmitting(B)
        if self.kind == "kirchhoff":
            return kirchhoff_matrix(B)
        if len(self.explicit) != B:
            raise ValueError(f"explicit matrix is {len(self.explicit)}x{len(self.explicit)}, graph has B={B}")
        return self.explicit


def sqrt_prime_lengths(B: int, scale: float = 1.0) -> np.ndarray:
    """Lengths ``sqrt(p_b / p_1)``: pairwise rationally independent."""
    p = np.array([prime(b) for b in range(1, B + 1)], dtype=float)
    return scale * np.sqrt(p / p[0])


@dataclass(frozen=True, eq=False)
class StarGraph:
    lengths: np.ndarray
    central: CentralScattering = field(default_factory=CentralScattering.fourier)

    def __post_init__(self):
        L = np.atleast_1d(np.asarray(self.lengths, dtype=float))
        if L.ndim != 1 or L.size == 0:
            raise ValueError("lengths must be a non-empty sequence")
        if not np.all(np.isfinite(L)) or np.any(L <= 0):
            raise ValueError("all bond lengths must be positive and finite")
        L.setflags(write=False)
        object.__setattr__(self, "lengths", L)
        if self.central.kind == "explicit":
            self.central.matrix(len(L))  # size check

    @classmethod
    def with_sqrt_primes(cls, B: int, central: CentralScattering | None = None, scale: float = 1.0):
        return cls(sqrt_prime_lengths(B, scale), central or CentralScattering.fourier())

    @property
    def B(self) -> int:
        return len(self.lengths)

    @property
    def directed_lengths(self) -> np.ndarray:
        return np.concatenate([self.lengths, self.lengths])

    @cached_property
    def sigma(self) -> np.ndarray:
        return self.central.matrix(self.B)

    @cached_property
    def S(self) -> np.ndarray:
        return bond_scattering_matrix(self)


def block_operator(Sigma, Pi) -> np.ndarray:
    """``[[0, Sigma], [Pi, 0]]``."""
    Sigma = as_square(Sigma, "Sigma")
    Pi = as_square(Pi, "Pi")
    B = len(Sigma)
    T = np.zeros((2 * B, 2 * B), dtype=complex)
    T[:B, B:] = Sigma
    T[B:, :B] = Pi
    return T


def bond_scattering_matrix(g: StarGraph) -> np.ndarray:
    return block_operator(g.sigma, np.eye(g.B))


def phase_matrix(g: StarGraph, k: float) -> np.ndarray:
    return np.diag(np.exp(1j * k * g.directed_lengths))


def evolution_operator(g: StarGraph, k: float) -> np.ndarray:
    """``U(k) = D(k) S``; row-scaling avoids forming the diagonal matrix."""
    return np.exp(1j * k * g.directed_lengths)[:, None] * g.S


def _check_bond(B: int, j: int) -> None:
    if not 1 <= j <= B:
        raise ValueError(f"bond index j={j} outside 1..{B}")


def phase_point(B: int, j: int, kappa: float) -> np.ndarray:
    """Diagonal matrix with ``e^{i kappa}`` on bond ``j`` and 1 elsewhere."""
    _check_bond(B, j)
    d = np.ones(B, dtype=complex)
    d[j - 1] = cmath.exp(1j * kappa)
    return np.diag(d)


def fourier_permuter(B: int, j: int) -> np.ndarray:
    """Diagonal ``R_j`` such that ``R_j F R_j`` is ``F`` cyclically shifted to bond ``j``."""
    _check_bond(B, j)
    m = np.arange(B)
    s = j - 1
    # integer exponents reduced mod 2B keep the phases exact
    expo = (-2 * s * m + s * s) % (2 * B)
    return np.diag(np.exp(1j * np.pi * expo / B))


def hadamard_family_member(x1: float, x2: float) -> np.ndarray:
    """``diag(1, e^{i x1}, e^{i x2}) F_3``."""
    ups = np.array([1.0, cmath.exp(1j * x1), cmath.exp(1j * x2)])
    return ups[:, None] * fourier_matrix(3)


def principal_sqrt(nu: complex) -> complex:
    """Square root with argument in ``(-pi/2, pi/2]``."""
    r = cmath.sqrt(nu)
    # cmath gives arg in [-pi/2, pi/2]; move the -pi/2 edge to +pi/2
    if r.real == 0 and r.imag < 0:
        r = -r
    return r


def lift_pair(Sigma, Pi, u, nu: complex, tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Lift an eigenpair of ``Sigma Pi`` to ``[[0, Sigma], [Pi, 0]]``.

    Returns ``(+sqrt(nu) u, Pi u)`` and ``(-sqrt(nu) u, Pi u)``, with
    eigenvalues ``+sqrt(nu)`` and ``-sqrt(nu)`` (principal root).
    """
    Sigma = as_square(Sigma, "Sigma")
    Pi = as_square(Pi, "Pi")
    u = as_vector(u, "u")
    if nu == 0:
        raise ValueError("nu must be nonzero")
    resid = np.linalg.norm(Sigma @ (Pi @ u) - nu * u) / np.linalg.norm(u)
    if resid > tol:
        raise ValueError(f"(u, nu) is not an eigenpair of Sigma Pi: residual {resid:.3e}")
    root = principal_sqrt(nu)
    bottom = Pi @ u
    return np.concatenate([root * u, bottom]), np.concatenate([-root * u, bottom])
