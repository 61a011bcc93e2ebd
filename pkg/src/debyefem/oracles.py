"""Dense brute-force reference computations for small meshes.

These evaluate every global basis function directly from edge geometry
(hat profiles across the edge) instead of going through the cell-to-edge
tables, and integrate cell by cell with their own Gauss rule.  They are
O(n_edges^2) and only meant for meshes with a handful of cells.
"""

from __future__ import annotations

import numpy as np

from .linalg import dense_solve
from .mesh import HORIZONTAL, QuadMesh

ORACLE_POINTS = 7


def _cell_rule(mesh: QuadMesh, cell: int, n: int = ORACLE_POINTS):
    t, w = np.polynomial.legendre.leggauss(n)
    t = 0.5 * (t + 1.0)
    w = 0.5 * w
    h = mesh.h
    x0 = mesh.cells[cell, 0] * h
    y0 = mesh.cells[cell, 1] * h
    X, Y = np.meshgrid(x0 + h * t, y0 + h * t, indexing="ij")
    W = np.outer(w, w) * h * h
    return X.ravel(), Y.ravel(), W.ravel()


def global_basis(mesh: QuadMesh, edge: int, x, y):
    """Value and curl of the global edge basis function at interior points."""
    h = mesh.h
    xe, ye = mesh.edge_ij[edge] * h
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    val = np.zeros(x.shape + (2,))
    if mesh.edge_dir[edge] == HORIZONTAL:
        inside = (x >= xe) & (x <= xe + h) & (np.abs(y - ye) < h)
        hat = np.where(inside, 1.0 - np.abs(y - ye) / h, 0.0)
        val[..., 0] = hat
        curl = np.where(inside, np.sign(y - ye) / h, 0.0)
    else:
        inside = (y >= ye) & (y <= ye + h) & (np.abs(x - xe) < h)
        hat = np.where(inside, 1.0 - np.abs(x - xe) / h, 0.0)
        val[..., 1] = hat
        curl = np.where(inside, -np.sign(x - xe) / h, 0.0)
    return val, curl


def _all_basis(mesh: QuadMesh, x, y):
    vals, curls = zip(*(global_basis(mesh, e, x, y) for e in range(mesh.n_edges)))
    return np.array(vals), np.array(curls)  # (nedge, npts, 2), (nedge, npts)


def w_field_values(mesh: QuadMesh, coeffs, cell: int, x, y):
    """W_h field on one cell, evaluated from its moment coefficients."""
    h = mesh.h
    a0, a1, b0, b1 = np.asarray(coeffs, dtype=float).reshape(mesh.n_cells, 4)[cell]
    xi = 2.0 * (x - mesh.cells[cell, 0] * h) / h - 1.0
    eta = 2.0 * (y - mesh.cells[cell, 1] * h) / h - 1.0
    return np.stack([a0 + a1 * xi, b0 + b1 * eta], axis=-1)


def dense_gram(mesh: QuadMesh, kind: str = "mass", weight=None) -> np.ndarray:
    """Dense Gram matrix over all edges.

    ``kind`` is ``"mass"`` or ``"curl"``; ``weight(cell, x, y) -> (npts, 2)``
    gives a diagonal weight for the mass form.
    """
    n = mesh.n_edges
    G = np.zeros((n, n))
    for c in range(mesh.n_cells):
        x, y, w = _cell_rule(mesh, c)
        vals, curls = _all_basis(mesh, x, y)
        if kind == "curl":
            G += np.einsum("ap,bp,p->ab", curls, curls, w)
            continue
        wt = np.ones(x.shape + (2,)) if weight is None else weight(c, x, y)
        for a in range(n):
            for b in range(n):
                G[a, b] += np.sum(w * np.sum(vals[a] * vals[b] * wt, axis=-1))
    return G


def dense_load(mesh: QuadMesh, g) -> np.ndarray:
    out = np.zeros(mesh.n_edges)
    for c in range(mesh.n_cells):
        x, y, w = _cell_rule(mesh, c)
        g1, g2 = g(x, y)
        gv = np.stack([np.broadcast_to(g1, x.shape), np.broadcast_to(g2, x.shape)], axis=-1)
        vals, _ = _all_basis(mesh, x, y)
        out += np.einsum("apk,pk,p->a", vals, gv, w)
    return out


def dense_weighted_load(mesh: QuadMesh, fn) -> np.ndarray:
    """Load against ``fn(cell, x, y) -> (npts, 2)`` defined cell by cell."""
    out = np.zeros(mesh.n_edges)
    for c in range(mesh.n_cells):
        x, y, w = _cell_rule(mesh, c)
        vals, _ = _all_basis(mesh, x, y)
        out += np.einsum("apk,pk,p->a", vals, fn(c, x, y), w)
    return out


def dense_E_step(mesh: QuadMesh, params, law, dt, E_curr, E_prev, P_curr, g=None) -> np.ndarray:
    """One E-step assembled densely and solved by LU on the interior DOFs."""
    M = dense_gram(mesh, "mass")
    K = dense_gram(mesh, "curl")

    def fprime(c, x, y):
        return law.df(w_field_values(mesh, P_curr, c, x, y))

    def nonlinear_term(c, x, y):
        P = w_field_values(mesh, P_curr, c, x, y)
        return law.df(P) * law.f(P)

    Mw = dense_gram(mesh, "mass", fprime)
    c2 = params.eps0 * params.mu0 / dt**2
    c1 = params.A1 / dt
    A = (c2 + c1) * M + K - params.A2 * Mw
    e1 = np.asarray(E_curr, dtype=float)
    e2 = np.asarray(E_prev, dtype=float)
    b = M @ (c2 * (2 * e1 - e2) + c1 * e1)
    b -= params.mu0 / params.tau**2 * dense_weighted_load(mesh, nonlinear_term)
    if g is not None:
        b -= params.mu0 * dense_load(mesh, g)
    interior = ~np.asarray(mesh.edge_boundary, dtype=bool)
    x = np.zeros(mesh.n_edges)
    x[interior] = dense_solve(A[np.ix_(interior, interior)], b[interior])
    return x


def bisection(fn, lo: float, hi: float, tol: float = 1e-14, max_iter: int = 200) -> float:
    """Root of an increasing scalar function on ``[lo, hi]``."""
    flo = fn(lo)
    if flo > 0 or fn(hi) < 0:
        raise ValueError("root not bracketed")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if fn(mid) > 0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= tol * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)
