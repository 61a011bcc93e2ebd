"""Macroelement post-processing onto bilinear fields.

On each 2x2 macroelement both components are recovered in Q_{1,1} with the
basis ``{1, xi, eta, xi*eta}`` over macro coordinates in ``[-1, 1]^2``.

* Edge fields: component 1 matches the mean tangential values on the four
  fine edges lying on the bottom and top lines of the macroelement;
  component 2 matches those on the left and right lines.
* W_h fields: each component matches the four fine-cell averages.

Both sets of conditions only see DOFs, so applying the operator to a
function or to its interpolant gives the same result.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import BOTTOM, LEFT, RIGHT, TOP, MacroPairing, QuadMesh, macro_pairing
from .quadrature import DEFAULT_ORDER, unit_square_rule

# sub-cell position (di, dj) of the fine cells bl, br, tl, tr inside a macroelement
SUBCELL_OFFSETS = np.array([[0, 0], [1, 0], [0, 1], [1, 1]])


def _rows(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    return np.column_stack([np.ones(len(pts)), pts[:, 0], pts[:, 1], pts[:, 0] * pts[:, 1]])


def _checked_inverse(mat: np.ndarray) -> np.ndarray:
    cond = np.linalg.cond(mat)
    assert np.isfinite(cond) and cond < 1e8, "moment conditions are not unisolvent for Q11"
    return np.linalg.inv(mat)


# midpoints of the moment segments, in macro coordinates
_E1_SEGMENTS = [(-0.5, -1.0), (0.5, -1.0), (-0.5, 1.0), (0.5, 1.0)]
_E2_SEGMENTS = [(-1.0, -0.5), (-1.0, 0.5), (1.0, -0.5), (1.0, 0.5)]
_CELL_CENTERS = [(-0.5, -0.5), (0.5, -0.5), (-0.5, 0.5), (0.5, 0.5)]

# a Q11 function's mean over a segment or square is its value at the midpoint
E1_INV = _checked_inverse(_rows(_E1_SEGMENTS))
E2_INV = _checked_inverse(_rows(_E2_SEGMENTS))
CELL_INV = _checked_inverse(_rows(_CELL_CENTERS))


@dataclass
class MacroField:
    pairing: MacroPairing
    coeffs: np.ndarray  # (nmacro, 2, 4)

    def eval_local(self, m: np.ndarray, xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
        """Values at macro-local coordinates; broadcasting over ``m``."""
        basis = np.stack([np.ones_like(xi), xi, eta, xi * eta], axis=-1)
        return np.einsum("...ka,...a->...k", self.coeffs[m], basis)

    def eval(self, mesh: QuadMesh, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        cid = mesh.locate(pts)
        m = self.pairing.fine_to_macro[cid]
        local = (pts - self.pairing.macro_origins[m]) / mesh.h - 1.0
        return self.eval_local(m, local[:, 0], local[:, 1])

    def at_fine_quad(self, mesh: QuadMesh, order: int = DEFAULT_ORDER) -> np.ndarray:
        """Values at the fine-cell quadrature points, shape (ncell, nq, 2)."""
        s, r, _ = unit_square_rule(order)
        pair = self.pairing
        m = pair.fine_to_macro
        offset = mesh.cells - pair.macro_ij[m]  # (ncell, 2) in {0, 1}
        xi = offset[:, :1] + s[None, :] - 1.0
        eta = offset[:, 1:] + r[None, :] - 1.0
        return self.eval_local(m[:, None], xi, eta)


def _pairing(mesh, pairing):
    return pairing if pairing is not None else macro_pairing(mesh)


def postprocess_E(mesh: QuadMesh, pairing: MacroPairing | None, field) -> MacroField:
    pairing = _pairing(mesh, pairing)
    c = field.coeffs if hasattr(field, "coeffs") else np.asarray(field, dtype=float)
    edges = mesh.cell_edges[pairing.macro_cells]  # (nmacro, 4 cells, 4 slots)
    bl, br, tl, tr = (edges[:, k] for k in range(4))
    m1 = np.column_stack([c[bl[:, BOTTOM]], c[br[:, BOTTOM]], c[tl[:, TOP]], c[tr[:, TOP]]])
    m2 = np.column_stack([c[bl[:, LEFT]], c[tl[:, LEFT]], c[br[:, RIGHT]], c[tr[:, RIGHT]]])
    coeffs = np.stack([m1 @ E1_INV.T, m2 @ E2_INV.T], axis=1)
    return MacroField(pairing, coeffs)


def postprocess_P(mesh: QuadMesh, pairing: MacroPairing | None, field) -> MacroField:
    pairing = _pairing(mesh, pairing)
    c = field.coeffs if hasattr(field, "coeffs") else np.asarray(field, dtype=float)
    c = c.reshape(mesh.n_cells, 4)
    cells = pairing.macro_cells  # (nmacro, 4)
    avg1 = c[cells, 0]
    avg2 = c[cells, 2]
    coeffs = np.stack([avg1 @ CELL_INV.T, avg2 @ CELL_INV.T], axis=1)
    return MacroField(pairing, coeffs)


def l2_norm_macro(mesh: QuadMesh, mf: MacroField, order: int = DEFAULT_ORDER) -> float:
    vals = mf.at_fine_quad(mesh, order)
    _, _, w = unit_square_rule(order)
    return float(np.sqrt(np.einsum("cqk,cqk,q->", vals, vals, w) * mesh.cell_area))
