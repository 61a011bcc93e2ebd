"""Sparse bilinear forms and load vectors of the fully discrete scheme.

All edge-space operators are returned as ``scipy.sparse.csr_matrix``.  The
W_h mass matrix is diagonal per cell with the chosen basis, so it is never
assembled globally.
"""

from __future__ import annotations

import logging

import numpy as np
import scipy.sparse as sp

from .mesh import QuadMesh
from .nonlinearity import NonlinearLaw
from .quadrature import DEFAULT_ORDER
from .spaces import (
    W_MASS_REF,
    CellQuadrature,
    cell_field_at_quad,
    cell_quadrature,
    load_W_from_values,
)

log = logging.getLogger(__name__)


def _scatter(mesh: QuadMesh, local: np.ndarray) -> sp.csr_matrix:
    """Assemble per-cell 4x4 blocks (ncell, 4, 4) into a global CSR matrix."""
    dofs = mesh.cell_edges
    rows = np.repeat(dofs, 4, axis=1).ravel()
    cols = np.tile(dofs, (1, 4)).ravel()
    n = mesh.n_edges
    A = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    A.sum_duplicates()
    return A


def local_mass(quad: CellQuadrature, weight: np.ndarray | None = None) -> np.ndarray:
    """Per-cell edge mass blocks, optionally with a diagonal weight.

    ``weight`` has shape (ncell, nq, 2) and multiplies each vector component.
    """
    phi = quad.edge_basis
    if weight is None:
        ref = np.einsum("qak,qbk,q->ab", phi, phi, quad.weights)
        return np.broadcast_to(ref, (quad.x.shape[0], 4, 4))
    return quad.gram(weight, "edge")


def assemble_mass(mesh: QuadMesh, order: int = DEFAULT_ORDER) -> sp.csr_matrix:
    return _scatter(mesh, local_mass(cell_quadrature(mesh, order)))


def assemble_stiffness(mesh: QuadMesh, order: int = DEFAULT_ORDER) -> sp.csr_matrix:
    quad = cell_quadrature(mesh, order)
    # curl of each basis function is sign / h, constant on the cell
    curls = mesh.cell_edge_signs / mesh.h  # (ncell, 4)
    vol = quad.weights.sum()
    local = np.einsum("ca,cb->cab", curls, curls) * vol
    return _scatter(mesh, local)


def range_check(law: NonlinearLaw, values: np.ndarray, events: list | None = None) -> float:
    """Record when polarization values leave the law's stated range."""
    peak = float(np.max(np.abs(values))) if values.size else 0.0
    if peak > law.valid_range:
        msg = f"|P| = {peak:.3g} exceeds the {law.kind.value} law range {law.valid_range:g}"
        log.warning(msg)
        if events is not None:
            events.append(msg)
    return peak


def assemble_weighted_mass(mesh: QuadMesh, P_prev, law: NonlinearLaw,
                           order: int = DEFAULT_ORDER, events: list | None = None,
                           quad: CellQuadrature | None = None) -> sp.csr_matrix:
    """Edge mass weighted by ``diag(f'(P1), f'(P2))`` of a W_h field."""
    quad = quad or cell_quadrature(mesh, order)
    P = cell_field_at_quad(mesh, P_prev, quad)
    range_check(law, P, events)
    return _scatter(mesh, local_mass(quad, law.df(P)))


def load_from_values(mesh: QuadMesh, quad: CellQuadrature, vals: np.ndarray) -> np.ndarray:
    """Edge load ``int g . phi_a`` from values (ncell, nq, 2) at quadrature points."""
    local = quad.moments(vals, "edge")
    return np.bincount(mesh.cell_edges.ravel(), weights=local.ravel(), minlength=mesh.n_edges)


def assemble_load(mesh: QuadMesh, g, order: int = DEFAULT_ORDER) -> np.ndarray:
    quad = cell_quadrature(mesh, order)
    return load_from_values(mesh, quad, quad.eval_vector(g))


def assemble_load_W(mesh: QuadMesh, g, order: int = DEFAULT_ORDER) -> np.ndarray:
    """W_h load ``int_K g . psi_a`` per cell, shape (ncell, 4)."""
    quad = cell_quadrature(mesh, order)
    return load_W_from_values(quad, quad.eval_vector(g))


def w_mass_blocks(mesh: QuadMesh) -> np.ndarray:
    """Per-cell W_h mass matrices (ncell, 4, 4); diagonal for the moment basis."""
    block = np.diag(W_MASS_REF * mesh.cell_area)
    return np.broadcast_to(block, (mesh.n_cells, 4, 4))


def apply_dirichlet(A: sp.csr_matrix, b: np.ndarray | None, boundary: np.ndarray):
    """Eliminate boundary rows/columns, leaving a unit diagonal and zero rhs."""
    keep = (~boundary).astype(float)
    D = sp.diags(keep)
    A_bc = (D @ A @ D + sp.diags(boundary.astype(float))).tocsr()
    if b is None:
        return A_bc, None
    b_bc = np.where(boundary, 0.0, b)
    return A_bc, b_bc
