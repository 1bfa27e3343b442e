"""Dense complex linear algebra, polynomial roots and quadrature.

Every other module goes through these helpers rather than calling LAPACK
directly, so residuals and shape checks live in one place.  Matrices and
vectors are plain ``numpy`` complex arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import integrate

from .errors import ConvergenceError

MAX_DIM = 2048


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Eigenpairs of a square matrix.

    ``vectors[:, i]`` has unit norm and pairs with ``values[i]``;
    ``residuals[i]`` is ``||A v - lambda v||``.
    """

    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    @property
    def max_residual(self) -> float:
        return float(self.residuals.max()) if len(self.residuals) else 0.0


class PolyRoots(NamedTuple):
    roots: np.ndarray
    residuals: np.ndarray


def as_square(A, name: str = "matrix") -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


def as_vector(v, name: str = "vector") -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-d array, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    return v


def unitarity_error(M) -> float:
    """Max-norm of ``M M^dagger - I``."""
    M = as_square(M)
    return float(np.abs(M @ M.conj().T - np.eye(len(M))).max())


def is_unitary(M, tol: float = 1e-10) -> bool:
    return unitarity_error(M) < tol


def eig_dense(A) -> EigenDecomposition:
    """All eigenpairs of a dense complex matrix (LAPACK ``zgeev``).

    Eigenvalues are reported raw; use :func:`snap_to_circle` when the
    matrix is known to be unitary and only phases matter.
    """
    A = as_square(A)
    n = len(A)
    if n > MAX_DIM:
        raise ValueError(f"dimension {n} exceeds the supported maximum {MAX_DIM}")
    try:
        values, vectors = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(
            "QR iteration did not converge", {"dim": n, "lapack": str(exc)}
        ) from exc
    vectors = vectors / np.linalg.norm(vectors, axis=0)
    residuals = np.linalg.norm(A @ vectors - vectors * values, axis=0)
    return EigenDecomposition(values, vectors, residuals)


def eig_batched(stack) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs for a stack of small matrices, shape ``(..., n, n)``.

    Vectors are column-normalised, as in :func:`eig_dense`.
    """
    stack = np.asarray(stack, dtype=complex)
    values, vectors = np.linalg.eig(stack)
    vectors = vectors / np.linalg.norm(vectors, axis=-2, keepdims=True)
    return values, vectors


def eigvals_unitary(U) -> np.ndarray:
    """Eigenvalues only; cheaper when vectors are not needed."""
    return np.linalg.eigvals(as_square(U))


def snap_to_circle(values) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    return np.exp(1j * np.angle(values))


def null_space(A, tol: float) -> np.ndarray:
    """Orthonormal basis (as columns) for singular directions below ``tol``.

    Returns an ``(n, 0)`` array when ``A`` is well conditioned.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = as_square(A)
    _, s, vh = np.linalg.svd(A)
    return vh[s < tol].conj().T


def characteristic_coefficients(A) -> np.ndarray:
    """Coefficients of ``det(lambda I - A)``, highest degree first.

    Uses the Faddeev-LeVerrier recursion so the result does not depend on
    any eigensolver.
    """
    A = as_square(A)
    n = len(A)
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    M = np.zeros_like(A)
    eye = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        M = A @ M + coeffs[k - 1] * eye
        coeffs[k] = -np.trace(A @ M) / k
    return coeffs


def polyval(coeffs, x):
    coeffs = np.asarray(coeffs, dtype=complex)
    result = np.zeros_like(np.asarray(x, dtype=complex))
    for c in coeffs:
        result = result * x + c
    return result


def poly_roots(coeffs: Sequence[complex]) -> PolyRoots:
    """Roots of a polynomial given highest-degree-first coefficients.

    Companion-matrix eigenvalues followed by one Newton step per root.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.ndim != 1 or len(coeffs) < 2:
        raise ValueError("need a polynomial of degree >= 1")
    if coeffs[0] == 0:
        raise ValueError("leading coefficient must be nonzero")
    monic = coeffs / coeffs[0]
    n = len(monic) - 1
    companion = np.zeros((n, n), dtype=complex)
    companion[0, :] = -monic[1:]
    companion[np.arange(1, n), np.arange(n - 1)] = 1.0
    roots = eig_dense(companion).values
    deriv = np.polyder(monic)
    for i, r in enumerate(roots):
        dp = polyval(deriv, r)
        if dp != 0:
            step = polyval(monic, r) / dp
            # keep the polish only if it actually helps
            cand = r - step
            if abs(polyval(monic, cand)) <= abs(polyval(monic, r)):
                roots[i] = cand
    residuals = np.abs(polyval(monic, roots))
    return PolyRoots(roots, residuals)


def adaptive_quadrature(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    limit: int = 200,
    points: Sequence[float] | None = None,
) -> float:
    """Integral of ``f`` over ``[a, b]`` by adaptive Gauss-Kronrod (QUADPACK).

    ``points`` marks interior locations of integrable singularities.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    value, abserr, info = integrate.quad(
        f, a, b, epsabs=tol, epsrel=0.0, limit=limit, points=points, full_output=True
    )[:3]
    if abserr >= tol:
        raise ConvergenceError(
            "quadrature did not reach the requested tolerance",
            {"estimate": value, "abserr": abserr, "intervals": info.get("last")},
        )
    return float(value)
