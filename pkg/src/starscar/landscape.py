"""Minimum eigenvector entropy across the family ``diag(1, e^{i x1}, e^{i x2}) F_3``.

Every node of a periodic ``res x res`` grid on the torus is diagonalised in
one batched call; the reported value is twice the smallest Shannon entropy
among the three eigenvectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .graphcore import fourier_matrix
from .numkernel import eig_batched

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class LandscapePoint:
    x1: float
    x2: float
    min_doubled_entropy: float
    arg_eigenvector_index: int
    degenerate: bool = False


@dataclass(frozen=True, eq=False)
class LandscapeGrid:
    """Values on nodes ``(2 pi m / res, 2 pi n / res)``; axis 0 is ``x1``."""

    resolution: int
    values: np.ndarray
    arg_index: np.ndarray
    min_gap: np.ndarray
    degenerate: np.ndarray
    degeneracy_tol: float

    @property
    def axis(self) -> np.ndarray:
        return TWO_PI * np.arange(self.resolution) / self.resolution

    def point(self, m: int, n: int) -> LandscapePoint:
        return LandscapePoint(
            float(self.axis[m]),
            float(self.axis[n]),
            float(self.values[m, n]),
            int(self.arg_index[m, n]),
            bool(self.degenerate[m, n]),
        )

    def points(self) -> Iterator[LandscapePoint]:
        for m in range(self.resolution):
            for n in range(self.resolution):
                yield self.point(m, n)

    def nearest_node(self, x1: float, x2: float) -> tuple[int, int]:
        r = self.resolution
        return round(x1 / TWO_PI * r) % r, round(x2 / TWO_PI * r) % r


def doubled_min_entropy(vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """For a stack ``(..., n, n)`` of column eigenvectors: ``2 min_j S(v_j)`` and its argmin."""
    p = np.abs(vectors) ** 2
    p = p / p.sum(axis=-2, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(p > 0, p * np.log(p), 0.0)
    ent = -plogp.sum(axis=-2)
    return 2 * ent.min(axis=-1), ent.argmin(axis=-1)


def scan(resolution: int = 200, degeneracy_tol: float | None = None) -> LandscapeGrid:
    """Evaluate the landscape on the full periodic grid.

    A node is flagged degenerate when two eigenvalues are closer than
    ``degeneracy_tol``; the default ``2 pi / resolution`` is one grid
    spacing, since eigenphases move at most at unit rate in each angle.
    """
    if resolution < 8:
        raise ValueError("resolution must be >= 8")
    if degeneracy_tol is None:
        degeneracy_tol = TWO_PI / resolution
    ax = TWO_PI * np.arange(resolution) / resolution
    X1, X2 = np.meshgrid(ax, ax, indexing="ij")
    ups = np.stack([np.ones_like(X1), np.exp(1j * X1), np.exp(1j * X2)], axis=-1)
    stack = ups[..., :, None] * fourier_matrix(3)
    vals, vecs = eig_batched(stack)
    values, arg = doubled_min_entropy(vecs)
    gaps = np.abs(vals[..., :, None] - vals[..., None, :])
    gaps = gaps + np.where(np.eye(3, dtype=bool), np.inf, 0.0)
    min_gap = gaps.min(axis=(-2, -1))
    return LandscapeGrid(resolution, values, arg, min_gap, min_gap < degeneracy_tol, degeneracy_tol)


def find_minima(grid: LandscapeGrid) -> list[tuple[float, float, float]]:
    """Nodes no larger than any of their 8 periodic neighbours, ascending by value."""
    v = grid.values
    is_min = np.ones_like(v, dtype=bool)
    for dm in (-1, 0, 1):
        for dn in (-1, 0, 1):
            if dm or dn:
                is_min &= v <= np.roll(v, (dm, dn), axis=(0, 1))
    ax = grid.axis
    out = [(float(ax[m]), float(ax[n]), float(v[m, n])) for m, n in zip(*np.nonzero(is_min))]
    out.sort(key=lambda t: (t[2], t[0], t[1]))
    return out


def cyclic_image(x1: float, x2: float) -> tuple[float, float]:
    """Parameters of the matrix obtained by cyclically relabelling ``F_3``'s indices.

    The map has order three and carries ``(0, 0)`` to ``(2 pi/3, 4 pi/3)``
    and then to ``(4 pi/3, 2 pi/3)``; the landscape value is invariant.
    """
    return (2 * math.pi / 3 - x2) % TWO_PI, (x1 - x2 + 4 * math.pi / 3) % TWO_PI
