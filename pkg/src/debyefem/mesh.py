"""Uniform quadrilateral meshes on the unit square and the L-shaped domain.

Cells are axis-aligned squares of side ``h = 1/N`` taken from the ``N x N``
lattice of ``[0, 1]^2``.  The L-shape is obtained by masking out the cells
whose centers lie in ``[0.5, 1] x [0, 0.5]``.

Edges carry a global orientation (+x for horizontal, +y for vertical).  The
counter-clockwise orientation of an edge relative to a cell is stored in
``cell_edge_signs``; the curl of an edge basis function on a cell is that
sign divided by ``h``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

# local edge slots within a cell
BOTTOM, TOP, LEFT, RIGHT = 0, 1, 2, 3
CCW_SIGNS = np.array([1.0, -1.0, -1.0, 1.0])

HORIZONTAL, VERTICAL = 0, 1


class DomainKind(str, enum.Enum):
    UNIT_SQUARE = "unit_square"
    LSHAPE = "lshape"

    @classmethod
    def parse(cls, value) -> "DomainKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {"unitsquare": cls.UNIT_SQUARE, "square": cls.UNIT_SQUARE,
                   "l_shape": cls.LSHAPE, "l": cls.LSHAPE}
        if key in aliases:
            return aliases[key]
        return cls(key)


class MeshError(ValueError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class QuadMesh:
    """Immutable uniform quadrilateral mesh.

    Attributes
    ----------
    n_per_side : cells per unit length (``N``)
    domain_kind : :class:`DomainKind`
    cells : (ncell, 2) int array of lattice indices ``(i, j)`` (column, row)
    cell_index : (N, N) int array mapping ``[i, j]`` to the active cell id or -1
    edge_dir : (nedge,) 0 for horizontal, 1 for vertical
    edge_ij : (nedge, 2) lattice index of the edge start point
    edge_boundary : (nedge,) bool
    cell_edges : (ncell, 4) edge ids in slot order bottom, top, left, right
    cell_edge_signs : (ncell, 4) counter-clockwise orientation signs
    """

    n_per_side: int
    domain_kind: DomainKind
    cells: np.ndarray
    cell_index: np.ndarray
    edge_dir: np.ndarray
    edge_ij: np.ndarray
    edge_boundary: np.ndarray
    cell_edges: np.ndarray
    cell_edge_signs: np.ndarray

    @property
    def h(self) -> float:
        return 1.0 / self.n_per_side

    @property
    def n_cells(self) -> int:
        return self.cells.shape[0]

    @property
    def n_edges(self) -> int:
        return self.edge_dir.shape[0]

    @property
    def cell_area(self) -> float:
        return self.h * self.h

    @property
    def area(self) -> float:
        return self.n_cells * self.cell_area

    @property
    def cell_origins(self) -> np.ndarray:
        """Lower-left corners of the cells, shape (ncell, 2)."""
        return self.cells * self.h

    @property
    def cell_centers(self) -> np.ndarray:
        return (self.cells + 0.5) * self.h

    @property
    def edge_start(self) -> np.ndarray:
        return self.edge_ij * self.h

    @property
    def edge_end(self) -> np.ndarray:
        step = np.where(self.edge_dir[:, None] == HORIZONTAL, [1, 0], [0, 1])
        return (self.edge_ij + step) * self.h

    @property
    def edge_tangent(self) -> np.ndarray:
        return np.where(self.edge_dir[:, None] == HORIZONTAL, [1.0, 0.0], [0.0, 1.0])

    @property
    def edges(self) -> list[tuple]:
        """Edges as ``(start, end, direction, is_boundary)`` tuples."""
        names = ("horizontal", "vertical")
        return [
            (tuple(s), tuple(e), names[d], bool(b))
            for s, e, d, b in zip(self.edge_start, self.edge_end, self.edge_dir, self.edge_boundary)
        ]

    def locate(self, points) -> np.ndarray:
        """Return the active cell containing each point (upper/right cell on ties).

        Raises :class:`MeshError` for points outside the domain.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        N = self.n_per_side
        tol = 1e-12
        if np.any(pts < -tol) or np.any(pts > 1.0 + tol):
            raise MeshError("point outside the unit square")
        ij = np.clip(np.floor(pts * N).astype(int), 0, N - 1)
        cid = self.cell_index[ij[:, 0], ij[:, 1]]
        if np.any(cid < 0):
            # points on the re-entrant edges of the L-shape belong to a neighbour
            for k in np.flatnonzero(cid < 0):
                cid[k] = self._locate_fallback(pts[k])
        return cid

    def _locate_fallback(self, p) -> int:
        N = self.n_per_side
        tol = 1e-9
        cand_i = {int(np.floor(p[0] * N + tol)), int(np.floor(p[0] * N - tol))}
        cand_j = {int(np.floor(p[1] * N + tol)), int(np.floor(p[1] * N - tol))}
        for i in sorted(cand_i):
            for j in sorted(cand_j):
                if 0 <= i < N and 0 <= j < N and self.cell_index[i, j] >= 0:
                    return int(self.cell_index[i, j])
        raise MeshError(f"point {tuple(p)} outside the {self.domain_kind.value} domain")

    def boundary_edges(self) -> set[int]:
        return set(np.flatnonzero(self.edge_boundary).tolist())


def _active_mask(kind: DomainKind, N: int) -> np.ndarray:
    mask = np.ones((N, N), dtype=bool)
    if kind is DomainKind.LSHAPE:
        centers = (np.arange(N) + 0.5) / N
        cx, cy = np.meshgrid(centers, centers, indexing="ij")
        mask &= ~((cx > 0.5) & (cy < 0.5))
    return mask


def build_mesh(domain_kind, N: int) -> QuadMesh:
    """Build the uniform mesh with ``N`` cells per unit length."""
    kind = DomainKind.parse(domain_kind)
    if int(N) != N or N < 2:
        raise MeshError(f"N must be an integer >= 2, got {N}")
    N = int(N)
    if kind is DomainKind.LSHAPE and N % 2:
        raise MeshError(f"the L-shaped domain needs an even N, got {N}")

    active = _active_mask(kind, N)
    # cells ordered by (row, column)
    jj, ii = np.nonzero(active.T)
    cells = np.column_stack([ii, jj]).astype(np.int64)
    cell_index = np.full((N, N), -1, dtype=np.int64)
    cell_index[cells[:, 0], cells[:, 1]] = np.arange(len(cells))

    # horizontal edge (i, j): y = j h, x in [i h, (i+1) h]; cells (i, j) above, (i, j-1) below
    padded = np.zeros((N, N + 2), dtype=bool)
    padded[:, 1:-1] = active
    h_count = padded[:, 1:].astype(int) + padded[:, :-1].astype(int)  # shape (N, N+1)
    # vertical edge (i, j): x = i h, y in [j h, (j+1) h]; cells (i, j) right, (i-1, j) left
    padded = np.zeros((N + 2, N), dtype=bool)
    padded[1:-1, :] = active
    v_count = padded[1:, :].astype(int) + padded[:-1, :].astype(int)  # shape (N+1, N)

    hj, hi = np.nonzero(h_count.T > 0)
    vj, vi = np.nonzero(v_count.T > 0)
    n_h = len(hi)
    edge_ij = np.concatenate([np.column_stack([hi, hj]), np.column_stack([vi, vj])]).astype(np.int64)
    edge_dir = np.concatenate([np.full(n_h, HORIZONTAL), np.full(len(vi), VERTICAL)]).astype(np.int8)
    edge_boundary = np.concatenate([h_count[hi, hj] == 1, v_count[vi, vj] == 1])

    h_id = np.full((N, N + 1), -1, dtype=np.int64)
    h_id[hi, hj] = np.arange(n_h)
    v_id = np.full((N + 1, N), -1, dtype=np.int64)
    v_id[vi, vj] = n_h + np.arange(len(vi))

    ci, cj = cells[:, 0], cells[:, 1]
    cell_edges = np.column_stack([h_id[ci, cj], h_id[ci, cj + 1], v_id[ci, cj], v_id[ci + 1, cj]])
    assert np.all(cell_edges >= 0)
    cell_edge_signs = np.tile(CCW_SIGNS, (len(cells), 1))

    return QuadMesh(
        n_per_side=N,
        domain_kind=kind,
        cells=_frozen(cells),
        cell_index=_frozen(cell_index),
        edge_dir=_frozen(edge_dir),
        edge_ij=_frozen(edge_ij),
        edge_boundary=_frozen(edge_boundary),
        cell_edges=_frozen(cell_edges),
        cell_edge_signs=_frozen(cell_edge_signs),
    )


def boundary_edges(mesh: QuadMesh) -> set[int]:
    return mesh.boundary_edges()


@dataclass(frozen=True, eq=False)
class MacroPairing:
    """2x2 groups of fine cells.

    ``macro_cells[m]`` lists the fine cells bottom-left, bottom-right,
    top-left, top-right; ``macro_ij[m]`` is the lattice index of the
    bottom-left cell.
    """

    macro_cells: np.ndarray
    macro_ij: np.ndarray
    fine_to_macro: np.ndarray
    h: float

    @property
    def n_macro(self) -> int:
        return self.macro_cells.shape[0]

    @property
    def macro_origins(self) -> np.ndarray:
        return self.macro_ij * self.h


def macro_pairing(mesh: QuadMesh) -> MacroPairing:
    N = mesh.n_per_side
    if N % 2:
        raise MeshError(f"macroelements need an even N, got {N}")
    idx = mesh.cell_index
    bl = idx[0::2, 0::2]
    br = idx[1::2, 0::2]
    tl = idx[0::2, 1::2]
    tr = idx[1::2, 1::2]
    groups = np.stack([bl, br, tl, tr], axis=-1)  # (N/2, N/2, 4), indexed [I, J]
    any_active = (groups >= 0).any(axis=-1)
    all_active = (groups >= 0).all(axis=-1)
    assert np.array_equal(any_active, all_active), "macroelement straddles the removed quadrant"
    # order by (row, column) of the macro lattice
    MJ, MI = np.nonzero(all_active.T)
    macro_cells = groups[MI, MJ]
    fine_to_macro = np.full(mesh.n_cells, -1, dtype=np.int64)
    for m, group in enumerate(macro_cells):
        fine_to_macro[group] = m
    assert np.all(fine_to_macro >= 0)
    macro_ij = np.column_stack([2 * MI, 2 * MJ]).astype(np.int64)
    return MacroPairing(
        macro_cells=_frozen(macro_cells.astype(np.int64)),
        macro_ij=_frozen(macro_ij),
        fine_to_macro=_frozen(fine_to_macro),
        h=mesh.h,
    )
