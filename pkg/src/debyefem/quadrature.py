"""Tensor-product Gauss-Legendre rules on axis-aligned rectangles."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_POINTS = 16
DEFAULT_ORDER = 5


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """n-point Gauss-Legendre nodes and weights on [-1, 1]."""
    if int(n) != n or not 1 <= n <= MAX_POINTS:
        raise ValueError(f"points per direction must be in [1, {MAX_POINTS}], got {n}")
    x, w = np.polynomial.legendre.leggauss(int(n))
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def unit_interval_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss rule mapped to [0, 1]; weights sum to 1."""
    x, w = gauss_legendre(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def unit_square_rule(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tensor rule on [0, 1]^2 as flat arrays ``(s, r, w)``.

    The point ordering is s-fastest; weights sum to 1.
    """
    t, w = unit_interval_rule(n)
    r, s = np.meshgrid(t, t, indexing="ij")
    wr, ws = np.meshgrid(w, w, indexing="ij")
    out = (s.ravel(), r.ravel(), (wr * ws).ravel())
    for a in out:
        a.setflags(write=False)
    return out


@dataclass(frozen=True)
class QuadRule:
    points: np.ndarray  # (nq, 2) physical coordinates
    weights: np.ndarray  # (nq,)

    def integrate(self, func) -> float:
        vals = np.asarray(func(self.points[:, 0], self.points[:, 1]), dtype=float)
        return float(np.sum(vals * self.weights))


def gauss_rule(points_per_dir: int, cell) -> QuadRule:
    """Tensor Gauss rule on the rectangle ``cell = (x0, y0, x1, y1)``."""
    x0, y0, x1, y1 = map(float, cell)
    s, r, w = unit_square_rule(points_per_dir)
    pts = np.column_stack([x0 + (x1 - x0) * s, y0 + (y1 - y0) * r])
    return QuadRule(points=pts, weights=w * (x1 - x0) * (y1 - y0))


def integrate_over_mesh(mesh, func, points_per_dir: int = DEFAULT_ORDER) -> float:
    """Integrate a scalar ``func(x, y)`` over the active cells of ``mesh``."""
    x, y, w = cell_points(mesh, points_per_dir)
    vals = np.asarray(func(x, y), dtype=float)
    return float(np.sum(vals * w))


def cell_points(mesh, points_per_dir: int = DEFAULT_ORDER):
    """Physical quadrature points of every cell.

    Returns ``x, y`` of shape (ncell, nq) and weights of shape (nq,) scaled by
    the cell area.
    """
    s, r, w = unit_square_rule(points_per_dir)
    origins = mesh.cell_origins
    h = mesh.h
    x = origins[:, :1] + h * s[None, :]
    y = origins[:, 1:] + h * r[None, :]
    return x, y, w * mesh.cell_area
