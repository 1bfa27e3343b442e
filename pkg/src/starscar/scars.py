"""Analytic half-scarred eigenvectors of Fourier and equi-transmitting stars.

Each constructor returns the ``2B`` limiting vector together with the data
needed to certify it: the eigenvalue, the reduced ``B x B`` matrix whose
simple eigenvector it lifts, and the bond phases ``Pi`` such that
``[[0, Pi Sigma], [Pi, 0]]`` is an evolution operator hosting the scar.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AdmissibilityError
from .graphcore import (
    CentralScattering,
    StarGraph,
    fourier_matrix,
    fourier_permuter,
    lift_pair,
    paley_equitransmitting,
    phase_point,
    principal_sqrt,
)
from .numkernel import as_square, eig_dense, poly_roots
from .spectral import multiplicity_estimate

SIMPLICITY_TOL = 1e-6
FAMILIES = ("FourierFirstBond", "FourierGeneralJ", "FourierPermuted", "EquiTransmitting")


@dataclass(frozen=True, eq=False)
class ScarVector:
    vec: np.ndarray
    family: str
    kappa: float
    eps1: int
    eps2: int
    j: int
    eigenvalue: complex
    B: int
    sigma: np.ndarray = field(repr=False)
    bond_phases: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown scar family {self.family!r}")
        if abs(np.linalg.norm(self.vec) - 1) > 1e-12:
            raise ValueError("scar vector must have unit norm")
        if abs(abs(self.eigenvalue) - 1) > 1e-12:
            raise ValueError("scar eigenvalue must have unit modulus")

    @property
    def operator(self) -> np.ndarray:
        """``[[0, Pi Sigma], [Pi, 0]]``, which has ``vec`` as eigenvector."""
        B = self.B
        T = np.zeros((2 * B, 2 * B), dtype=complex)
        T[:B, B:] = self.bond_phases[:, None] * self.sigma
        T[B:, :B] = np.diag(self.bond_phases)
        return T

    @property
    def residual(self) -> float:
        return float(np.linalg.norm(self.operator @ self.vec - self.eigenvalue * self.vec))

    def host_graph(self, k0: float = 1.0) -> StarGraph:
        """Star graph whose ``U(k0)`` has ``vec`` as an eigenvector with eigenvalue 1.

        Scales the bond phases by ``conj(eigenvalue)`` and reads off lengths
        in ``(0, 2 pi / k0]``.
        """
        phases = self.bond_phases * np.conj(self.eigenvalue)
        L = np.mod(np.angle(phases), 2 * math.pi) / k0
        L[L <= 1e-14] = 2 * math.pi / k0
        return StarGraph(L, CentralScattering.from_matrix(self.sigma))


@dataclass(frozen=True, eq=False)
class HalfScarCore:
    """Reduced eigenpair behind the first-bond Fourier scar.

    ``x`` is the unnormalised vector with ``x_2 = 1``.  ``N`` and ``D`` are
    ``sqrt(B - sin^2 k) + eps2 cos k`` and ``sqrt(B - sin^2 k)``.
    """

    x: np.ndarray
    lam: complex
    N: float
    D: float
    Phi: float


@dataclass(frozen=True, eq=False)
class PerturbedEigenBasis:
    """The four eigenpairs of ``P_j(k)^2 F_B`` that move off ``{1, -1, i, -i}``.

    Arrays are indexed by root, roots sorted by phase in ``[0, 2 pi)``.
    ``f[r]`` is normalised with ``f_j`` real positive; ``Z[r]`` is the
    matching free constant and ``norm_sq_closed[r]`` the closed-form
    ``||f||^2`` evaluated at that ``Z``.
    """

    B: int
    j: int
    kappa: float
    roots: np.ndarray
    root_residuals: np.ndarray
    betas: np.ndarray
    f: np.ndarray
    Z: np.ndarray
    norm_sq: np.ndarray
    norm_sq_closed: np.ndarray
    W: np.ndarray
    multiplicities: np.ndarray
    z_overlaps: np.ndarray

    @property
    def phis(self) -> np.ndarray:
        return np.angle(self.roots)

    @property
    def matrix(self) -> np.ndarray:
        return general_j_matrix(self.B, self.j, self.kappa)

    def component_moduli_closed(self, r: int) -> np.ndarray:
        return general_j_component_moduli(self.B, self.j, float(self.phis[r]), self.Z[r])


def _check_signs(eps1: int, eps2: int) -> None:
    if eps1 not in (1, -1) or eps2 not in (1, -1):
        raise ValueError("eps1 and eps2 must each be +1 or -1")


def _check_kappa_first_bond(kappa: float) -> None:
    if not 0 < kappa < math.pi / 2:
        raise AdmissibilityError(
            f"kappa={kappa} outside (0, pi/2): simplicity of the perturbed eigenvalue is only certified there"
        )


def _lift(Sigma, Pi_diag, u, nu, eps1: int) -> tuple[np.ndarray, complex]:
    plus, minus = lift_pair(Sigma, np.diag(Pi_diag), u, nu)
    a = plus if eps1 == 1 else minus
    return a / np.linalg.norm(a), eps1 * principal_sqrt(nu)


def first_bond_quadratic(B: int, kappa: float) -> np.ndarray:
    """Coefficients of ``lambda^2 - B^{-1/2}(e^{2ik} - 1) lambda - e^{2ik}``."""
    e2 = cmath.exp(2j * kappa)
    return np.array([1.0, -(e2 - 1) / math.sqrt(B), -e2])


def first_bond_eigenvalue(B: int, kappa: float, eps2: int) -> complex:
    """Closed-form ``(eps2 sqrt(B - sin^2 k) + i sin k) e^{ik} / sqrt(B)``."""
    D = math.sqrt(B - math.sin(kappa) ** 2)
    return (eps2 * D + 1j * math.sin(kappa)) * cmath.exp(1j * kappa) / math.sqrt(B)


def first_bond_phi(B: int, kappa: float) -> float:
    """The angle with ``sqrt(B - sin^2 k) + i sin k = sqrt(B) e^{i(pi/2 + Phi)}``."""
    return math.atan2(math.sin(kappa), math.sqrt(B - math.sin(kappa) ** 2)) - math.pi / 2


def halfscar_core(B: int, kappa: float, eps2: int) -> HalfScarCore:
    """Reduced eigenpair only; no ``B x B`` diagonalisation, so cheap at large ``B``."""
    if B < 2:
        raise ValueError("B must be >= 2")
    _check_kappa_first_bond(kappa)
    if eps2 not in (1, -1):
        raise ValueError("eps2 must be +1 or -1")
    s, c = math.sin(kappa), math.cos(kappa)
    D = math.sqrt(B - s * s)
    N = D + eps2 * c

    x = np.ones(B, dtype=complex)
    x[0] = c + eps2 * D

    # pick the quadratic root whose eigenvector has first entry c + eps2 D
    roots = poly_roots(first_bond_quadratic(B, kappa)).roots
    ratio = [(lam * math.sqrt(B) + 1) * cmath.exp(-1j * kappa) for lam in roots]
    lam = complex(roots[int(np.argmin([abs(r - x[0]) for r in ratio]))])

    Phi = first_bond_phi(B, kappa)
    # tan(Phi) = -D/sin k, cross-multiplied so it stays well conditioned as k -> 0
    if abs(s * math.sin(Phi) + D * math.cos(Phi)) > 1e-9 * math.sqrt(B):
        raise ArithmeticError("Phi does not satisfy tan(Phi) = -sqrt(B - sin^2 k)/sin k")
    return HalfScarCore(x, lam, N, D, Phi)


def fourier_halfscar(B: int, kappa: float, eps1: int, eps2: int) -> tuple[ScarVector, HalfScarCore]:
    """First-bond half-scar of the Fourier star, certified simple."""
    _check_signs(eps1, eps2)
    core = halfscar_core(B, kappa, eps2)
    F = fourier_matrix(B)
    P = np.ones(B, dtype=complex)
    P[0] = cmath.exp(1j * kappa)
    reduced = P[:, None] * F * P[None, :]
    if multiplicity_estimate(reduced, core.lam, SIMPLICITY_TOL) != 1:
        raise AdmissibilityError(f"eigenvalue {core.lam} of P F P is not simple (B={B}, kappa={kappa})")
    xhat = core.x / np.linalg.norm(core.x)
    vec, mu = _lift(P[:, None] * F, P, xhat, core.lam, eps1)
    scar = ScarVector(vec, "FourierFirstBond", kappa, eps1, eps2, 1, mu, B, F, P)
    return scar, core


def fourier_halfscar_closed_form(B: int, kappa: float, eps1: int, eps2: int) -> np.ndarray:
    """The limiting vector written out component by component.

    First half uses ``e^{i(pi/4 + k/2 + eps2 Phi/2)}`` as the square root of
    the eigenvalue, which may differ in sign from the principal branch.
    """
    s, c = math.sin(kappa), math.cos(kappa)
    D = math.sqrt(B - s * s)
    N = D + eps2 * c
    Phi = first_bond_phi(B, kappa)
    half = cmath.exp(1j * (math.pi / 4 + kappa / 2 + eps2 * Phi / 2))
    a = np.empty(2 * B, dtype=complex)
    a[0] = eps1 * eps2 * half * math.sqrt(N)
    a[1:B] = eps1 * half / math.sqrt(N)
    a[B] = eps2 * cmath.exp(1j * kappa) * math.sqrt(N)
    a[B + 1:] = 1 / math.sqrt(N)
    return a / (2 * math.sqrt(D))


def permuted_halfscar(B: int, j: int, kappa: float, eps1: int, eps2: int) -> ScarVector:
    """Half-scar enhanced on bond ``j``, built by conjugating with ``R_j``."""
    if B < 2:
        raise ValueError("B must be >= 2")
    if not 1 <= j <= B:
        raise ValueError(f"bond index j={j} outside 1..{B}")
    _check_kappa_first_bond(kappa)
    _check_signs(eps1, eps2)
    core = halfscar_core(B, kappa, eps2)
    # R_j F R_j moves row/column 1 to position j cyclically
    xt = np.roll(core.x, j - 1)
    xt = xt / np.linalg.norm(xt)
    F = fourier_matrix(B)
    Pi = np.diag(phase_point(B, j, kappa)) * np.diag(fourier_permuter(B, j))
    reduced = Pi[:, None] * F * Pi[None, :]
    if multiplicity_estimate(reduced, core.lam, SIMPLICITY_TOL) != 1:
        raise AdmissibilityError(f"permuted eigenvalue not simple (B={B}, j={j}, kappa={kappa})")
    vec, mu = _lift(Pi[:, None] * F, Pi, xt, core.lam, eps1)
    return ScarVector(vec, "FourierPermuted", kappa, eps1, eps2, j, mu, B, F, Pi)


def equitransmitting_halfscar(
    B: int, kappa: float, eps1: int, eps2: int, E=None
) -> ScarVector:
    """First-bond half-scar of an equi-transmitting star.

    ``E`` defaults to the Paley matrix; an explicit matrix must have zero
    diagonal and first row and column all ``(B-1)^{-1/2}``.
    """
    _check_signs(eps1, eps2)
    if E is None:
        E = paley_equitransmitting(B)
    else:
        E = as_square(E, "E")
        if len(E) != B:
            raise ValueError("E has the wrong size")
        first = np.full(B - 1, 1 / math.sqrt(B - 1))
        if (
            np.abs(np.diag(E)).max() > 1e-12
            or np.abs(E[0, 1:] - first).max() > 1e-12
            or np.abs(E[1:, 0] - first).max() > 1e-12
        ):
            raise ValueError("E must have zero diagonal and a constant first row and column")
    if not 0 < kappa <= math.pi:
        raise AdmissibilityError(f"kappa={kappa} outside (0, pi]")
    mu = eps2 * cmath.exp(1j * kappa)
    spectrum = eig_dense(E).values
    if np.min(np.abs(spectrum - mu)) < 1e-8:
        raise AdmissibilityError(
            f"eps2*e^(i kappa) = {mu:.6g} is an eigenvalue of E_B; the scar would not be simple"
        )
    y = np.ones(B, dtype=complex)
    y[0] = eps2 * math.sqrt(B - 1)
    y /= math.sqrt(2 * (B - 1))
    P = np.ones(B, dtype=complex)
    P[0] = cmath.exp(1j * kappa)
    reduced = P[:, None] * E * P[None, :]
    if multiplicity_estimate(reduced, mu, SIMPLICITY_TOL) != 1:
        raise AdmissibilityError(f"eigenvalue {mu} of P E P is not simple")
    vec, root = _lift(P[:, None] * E, P, y, mu, eps1)
    return ScarVector(vec, "EquiTransmitting", kappa, eps1, eps2, 1, root, B, E, P)


# -- general bond j: rank-one perturbation of the Fourier matrix ----------


def general_j_matrix(B: int, j: int, kappa: float) -> np.ndarray:
    """``P_j(k)^2 F_B``."""
    d = np.ones(B, dtype=complex)
    d[j - 1] = cmath.exp(2j * kappa)
    return d[:, None] * fourier_matrix(B)


def general_j_quartic(B: int, j: int, kappa: float) -> np.ndarray:
    """Coefficients of the quartic whose roots are the moving eigenvalues."""
    K = cmath.exp(2j * kappa) - 1
    t = 2 * math.pi * ((j - 1) ** 2 % B) / B
    c = K / math.sqrt(B)
    return np.array([1.0, -c * cmath.exp(1j * t), 0.0, -c * cmath.exp(-1j * t), -cmath.exp(2j * kappa)])


def _uv(B: int, j: int) -> tuple[np.ndarray, np.ndarray]:
    u = np.zeros(B)
    v = np.zeros(B)
    mirror = (B + 2 - j) - 1
    u[j - 1] = u[mirror] = 1
    v[j - 1], v[mirror] = 1, -1
    return u.astype(complex), v.astype(complex)


def general_j_norm_sq(B: int, j: int, phi: float, Z: complex) -> float:
    t = 2 * math.pi * ((j - 1) ** 2 % B) / B
    s, c = math.sin(phi), math.cos(phi)
    return abs(Z) ** 2 / s**2 * (4 + 8 / math.sqrt(B) * (c**3 * math.cos(t) + s**3 * math.sin(t)))


def general_j_component_moduli(B: int, j: int, phi: float, Z: complex) -> np.ndarray:
    """``|f_n|^2`` from the closed forms (generic bonds, bond ``j``, bond ``B+2-j``)."""
    n = np.arange(1, B + 1)
    theta = 2 * math.pi * (((n - 1) * (j - 1)) % B) / B
    csc2 = abs(Z) ** 2 / math.sin(phi) ** 2
    out = 4 * csc2 / B * np.cos(phi + theta) ** 2
    t = 2 * math.pi * ((j - 1) ** 2 % B) / B
    out[j - 1] = csc2 * (
        4 / B * math.cos(phi + t) ** 2 + 4 / math.sqrt(B) * math.cos(2 * phi) * math.cos(phi + t) + 1
    )
    out[B + 1 - j] = csc2 * (4 / B * math.cos(phi - t) ** 2 + 4 / math.sqrt(B) * math.cos(phi - t) + 1)
    return out


def _check_general_j(B: int, j: int, kappa: float) -> None:
    if B < 5:
        raise AdmissibilityError("general-j construction needs B >= 5")
    if not 2 <= j <= B:
        raise AdmissibilityError(f"j={j} outside 2..{B}")
    if B % 2 == 0 and j == B // 2 + 1:
        raise AdmissibilityError(f"j=B/2+1={j} behaves like the first bond; use fourier_halfscar")
    if not 0 < kappa < math.pi / 2:
        raise AdmissibilityError(f"kappa={kappa} outside (0, pi/2)")


def fourier_general_j(B: int, j: int, kappa: float) -> PerturbedEigenBasis:
    """Eigenvectors of ``P_j(k)^2 F_B`` spanned by ``F u_j, i F v_j, u_j, v_j``."""
    _check_general_j(B, j, kappa)
    F = fourier_matrix(B)
    u, v = _uv(B, j)
    Fu, Fv = F @ u, F @ v
    w = [Fu + u, Fu - u, 1j * Fv - v, 1j * Fv + v]
    nw = [float(np.vdot(x, x).real) for x in w]
    W = np.array([nw[0] + nw[1], nw[2] + nw[3], nw[0] - nw[1], nw[2] - nw[3]])

    pr = poly_roots(general_j_quartic(B, j, kappa))
    order = np.argsort(np.mod(np.angle(pr.roots), 2 * math.pi))
    roots, residuals = pr.roots[order], pr.residuals[order]

    Fj = general_j_matrix(B, j, kappa)
    betas, fs, Zs, nsq, nsq_closed, mults, overlaps = [], [], [], [], [], [], []
    for lam in roots:
        phi = float(np.angle(lam))
        if abs(math.sin(phi)) < 1e-12:
            raise ArithmeticError(f"quartic root {lam} has sin(phi)=0; cot(phi) is singular")
        cot = math.cos(phi) / math.sin(phi)
        z1 = cmath.exp(-1j * phi) * Fu + u
        z2 = cmath.exp(-1j * phi) * Fv + v
        f1 = cot * z1 + 1j * z2
        # Z makes ||f|| = 1 with f_j real positive
        Z = np.conj(f1[j - 1]) / abs(f1[j - 1]) / np.linalg.norm(f1)
        f = Z * f1
        betas.append(Z * np.array([cmath.exp(-1j * phi) * cot, cmath.exp(-1j * phi), cot, 1j]))
        fs.append(f)
        Zs.append(Z)
        nsq.append(float(np.vdot(f, f).real))
        nsq_closed.append(general_j_norm_sq(B, j, phi, Z))
        mults.append(multiplicity_estimate(Fj, lam, SIMPLICITY_TOL))
        overlaps.append(abs(np.vdot(z1, z2)))
    return PerturbedEigenBasis(
        B, j, kappa, roots, residuals, np.array(betas), np.array(fs), np.array(Zs),
        np.array(nsq), np.array(nsq_closed), W, np.array(mults), np.array(overlaps),
    )


def general_j_scar(basis: PerturbedEigenBasis, r: int, eps1: int = 1) -> ScarVector:
    """Lift ``f`` of root ``r`` to ``(+-sqrt(lambda) P_j(-k) f, f)``."""
    B, j, kappa = basis.B, basis.j, basis.kappa
    lam = complex(basis.roots[r])
    Pj = np.diag(phase_point(B, j, kappa))
    x = basis.f[r] / Pj  # eigenvector of P_j F P_j
    F = fourier_matrix(B)
    vec, mu = _lift(Pj[:, None] * F, Pj, x, lam, eps1)
    return ScarVector(vec, "FourierGeneralJ", kappa, eps1, 1, j, mu, B, F, Pj)
