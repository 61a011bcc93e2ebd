"""Lowest-order edge space N_h and discontinuous polarization space W_h.

On a cell with reference coordinates ``(s, r)`` in ``[0, 1]^2`` the four edge
basis functions (slot order bottom, top, left, right) are::

    (1 - r, 0),  (r, 0),  (0, 1 - s),  (0, s)

so E1 is in Q_{0,1} and E2 in Q_{1,0}.  A DOF is the mean tangential
component along its edge, which makes constant fields have unit
coefficients.

W_h holds ``P1 = a0 + a1 xi`` and ``P2 = b0 + b1 eta`` per cell with
``xi = 2s - 1``, ``eta = 2r - 1``; the coefficient layout per cell is
``[a0, a1, b0, b1]``.  The natural interpolant is the cellwise L2
projection.

Vector functions are callables ``func(x, y) -> (u1, u2)`` operating on
numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .mesh import QuadMesh
from .quadrature import DEFAULT_ORDER, unit_interval_rule, unit_square_rule


def edge_basis_ref(s, r) -> np.ndarray:
    """Edge basis values at reference points, shape (npts, 4, 2)."""
    s = np.asarray(s, dtype=float)
    r = np.asarray(r, dtype=float)
    out = np.zeros(s.shape + (4, 2))
    out[..., 0, 0] = 1.0 - r
    out[..., 1, 0] = r
    out[..., 2, 1] = 1.0 - s
    out[..., 3, 1] = s
    return out


def w_basis_ref(s, r) -> np.ndarray:
    """W_h basis values at reference points, shape (npts, 4, 2)."""
    s = np.asarray(s, dtype=float)
    r = np.asarray(r, dtype=float)
    out = np.zeros(s.shape + (4, 2))
    out[..., 0, 0] = 1.0
    out[..., 1, 0] = 2.0 * s - 1.0
    out[..., 2, 1] = 1.0
    out[..., 3, 1] = 2.0 * r - 1.0
    return out


# diagonal of the reference W_h mass matrix (divided by the cell area)
W_MASS_REF = np.array([1.0, 1.0 / 3.0, 1.0, 1.0 / 3.0])


def _contractions(basis: np.ndarray, weights: np.ndarray):
    """Matrices turning cell-batched contractions into matmuls.

    ``expand``: (4, nq*2) so ``coeffs @ expand`` gives point values;
    ``test``: (nq*2, 4) so ``values @ test`` gives weighted moments;
    ``gram``: (nq*2, 16) so ``weight @ gram`` gives weighted 4x4 Gram blocks.
    """
    nq = basis.shape[0]
    expand = basis.transpose(1, 0, 2).reshape(4, nq * 2)
    test = (basis * weights[:, None, None]).transpose(0, 2, 1).reshape(nq * 2, 4)
    gram = np.einsum("qak,qbk,q->qkab", basis, basis, weights).reshape(nq * 2, 16)
    return expand, test, gram


@dataclass(frozen=True, eq=False)
class CellQuadrature:
    """Quadrature data shared by all cells of a uniform mesh."""

    x: np.ndarray  # (ncell, nq)
    y: np.ndarray  # (ncell, nq)
    weights: np.ndarray  # (nq,), scaled by the cell area
    edge_basis: np.ndarray  # (nq, 4, 2)
    w_basis: np.ndarray  # (nq, 4, 2)
    order: int

    def __post_init__(self):
        object.__setattr__(self, "_edge", _contractions(self.edge_basis, self.weights))
        object.__setattr__(self, "_w", _contractions(self.w_basis, self.weights))

    def _ops(self, space: str):
        return self._edge if space == "edge" else self._w

    def eval_vector(self, func) -> np.ndarray:
        u1, u2 = func(self.x, self.y)
        out = np.empty(self.x.shape + (2,))
        out[..., 0] = u1
        out[..., 1] = u2
        return out

    def expand(self, coeffs: np.ndarray, space: str) -> np.ndarray:
        """Point values (ncell, nq, 2) from local coefficients (ncell, 4)."""
        c = coeffs.shape[0]
        return (coeffs @ self._ops(space)[0]).reshape(c, -1, 2)

    def moments(self, values: np.ndarray, space: str) -> np.ndarray:
        """``int_K v . basis_a`` for values (ncell, nq, 2); shape (ncell, 4)."""
        c = values.shape[0]
        return values.reshape(c, -1) @ self._ops(space)[1]

    def gram(self, weight: np.ndarray, space: str) -> np.ndarray:
        """``int_K diag(weight) basis_a . basis_b``; shape (ncell, 4, 4)."""
        c = weight.shape[0]
        return (weight.reshape(c, -1) @ self._ops(space)[2]).reshape(c, 4, 4)


@lru_cache(maxsize=64)
def cell_quadrature(mesh: QuadMesh, order: int = DEFAULT_ORDER) -> CellQuadrature:
    s, r, w = unit_square_rule(order)
    origins = mesh.cell_origins
    h = mesh.h
    x = origins[:, :1] + h * s[None, :]
    y = origins[:, 1:] + h * r[None, :]
    for a in (x, y):
        a.setflags(write=False)
    return CellQuadrature(x=x, y=y, weights=w * mesh.cell_area,
                          edge_basis=edge_basis_ref(s, r), w_basis=w_basis_ref(s, r),
                          order=order)


@dataclass
class EdgeField:
    mesh: QuadMesh
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.mesh.n_edges,):
            raise ValueError(f"expected {self.mesh.n_edges} edge coefficients, got {self.coeffs.shape}")

    def copy(self) -> "EdgeField":
        return EdgeField(self.mesh, self.coeffs.copy())


@dataclass
class CellField:
    mesh: QuadMesh
    coeffs: np.ndarray  # (ncell, 4)

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float).reshape(self.mesh.n_cells, 4)

    @property
    def flat(self) -> np.ndarray:
        return self.coeffs.ravel()

    def copy(self) -> "CellField":
        return CellField(self.mesh, self.coeffs.copy())


def _coeffs(field) -> np.ndarray:
    return field.coeffs if hasattr(field, "coeffs") else np.asarray(field, dtype=float)


def local_edge_coeffs(mesh: QuadMesh, field) -> np.ndarray:
    """Gather edge coefficients per cell, shape (ncell, 4)."""
    return _coeffs(field)[mesh.cell_edges]


def cell_curl(mesh: QuadMesh, field) -> np.ndarray:
    """Curl of an edge field; constant on each cell for the lowest order."""
    loc = local_edge_coeffs(mesh, field)
    return (loc * mesh.cell_edge_signs).sum(axis=1) / mesh.h


def edge_field_at_quad(mesh: QuadMesh, field, quad: CellQuadrature) -> np.ndarray:
    """Edge field values at every cell quadrature point, shape (ncell, nq, 2)."""
    return quad.expand(local_edge_coeffs(mesh, field), "edge")


def cell_field_at_quad(mesh: QuadMesh, field, quad: CellQuadrature) -> np.ndarray:
    coeffs = _coeffs(field).reshape(mesh.n_cells, 4)
    return quad.expand(coeffs, "w")


def _reference_coords(mesh: QuadMesh, points):
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    cid = mesh.locate(pts)
    local = (pts - mesh.cell_origins[cid]) / mesh.h
    return cid, local[:, 0], local[:, 1]


def eval_edge_field(mesh: QuadMesh, field, points) -> np.ndarray:
    cid, s, r = _reference_coords(mesh, points)
    basis = edge_basis_ref(s, r)
    return np.einsum("pa,pak->pk", local_edge_coeffs(mesh, field)[cid], basis)


def eval_curl(mesh: QuadMesh, field, points) -> np.ndarray:
    cid, _, _ = _reference_coords(mesh, points)
    return cell_curl(mesh, field)[cid]


def eval_cell_field(mesh: QuadMesh, field, points) -> np.ndarray:
    cid, s, r = _reference_coords(mesh, points)
    coeffs = _coeffs(field).reshape(mesh.n_cells, 4)
    return np.einsum("pa,pak->pk", coeffs[cid], w_basis_ref(s, r))


def interp_edge(mesh: QuadMesh, func, order: int = DEFAULT_ORDER) -> EdgeField:
    """Edge interpolant: each DOF is the mean tangential component on its edge."""
    t, w = unit_interval_rule(order)
    start = mesh.edge_start
    tangent = mesh.edge_tangent
    x = start[:, :1] + mesh.h * tangent[:, :1] * t[None, :]
    y = start[:, 1:] + mesh.h * tangent[:, 1:] * t[None, :]
    u1, u2 = func(x, y)
    u1 = np.broadcast_to(u1, x.shape)
    u2 = np.broadcast_to(u2, x.shape)
    ut = tangent[:, :1] * u1 + tangent[:, 1:] * u2
    return EdgeField(mesh, ut @ w)


def project_W(mesh: QuadMesh, func, order: int = DEFAULT_ORDER) -> CellField:
    """Cellwise L2 projection onto W_h."""
    quad = cell_quadrature(mesh, order)
    vals = quad.eval_vector(func)
    moments = load_W_from_values(quad, vals)
    return CellField(mesh, moments / (W_MASS_REF * mesh.cell_area))


def load_W_from_values(quad: CellQuadrature, vals: np.ndarray) -> np.ndarray:
    """Moments ``int_K v . psi_a`` from values at quadrature points, (ncell, 4)."""
    return quad.moments(vals, "w")


def zero_boundary(mesh: QuadMesh, field) -> EdgeField:
    c = _coeffs(field).copy()
    c[mesh.edge_boundary] = 0.0
    return EdgeField(mesh, c)


def l2_norm_edge(mesh: QuadMesh, field, order: int = DEFAULT_ORDER) -> float:
    quad = cell_quadrature(mesh, order)
    vals = edge_field_at_quad(mesh, field, quad)
    return float(np.sqrt(np.einsum("cqk,cqk,q->", vals, vals, quad.weights)))


def l2_norm_cell(mesh: QuadMesh, field, order: int = DEFAULT_ORDER) -> float:
    quad = cell_quadrature(mesh, order)
    vals = cell_field_at_quad(mesh, field, quad)
    return float(np.sqrt(np.einsum("cqk,cqk,q->", vals, vals, quad.weights)))


def curl_norm(mesh: QuadMesh, field) -> float:
    c = cell_curl(mesh, field)
    return float(np.sqrt(np.sum(c * c) * mesh.cell_area))
