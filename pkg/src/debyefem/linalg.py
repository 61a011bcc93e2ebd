"""Preconditioned conjugate gradients and a dense LU fallback."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp


class SolverError(RuntimeError):
    pass


class IndefiniteSystemError(SolverError):
    """Raised when CG meets a direction with non-positive curvature.

    For the E-system this means the time step violates the coercivity bound
    ``dt < tau (d + sqrt(d^2 + 4 B d)) / (2 B d)``, ``d = eps_s - eps_inf``.
    """


@dataclass
class SolveReport:
    iterations: int
    final_residual: float
    converged: bool


def cg_solve(A, b, tol: float = 1e-10, max_iter: int = 1000, preconditioner: str = "jacobi",
             x0=None, history: list | None = None):
    """Solve ``A x = b`` for symmetric positive definite ``A``.

    Convergence is declared when ``||b - A x||_2 <= tol ||b||_2``.  Returns
    ``(x, SolveReport)``; non-convergence is reported, not raised.  If
    ``history`` is given the iterates are appended to it.
    """
    b = np.asarray(b, dtype=float)
    n = b.shape[0]
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    if preconditioner == "jacobi":
        diag = A.diagonal() if sp.issparse(A) else np.diag(A)
        if np.any(diag <= 0):
            raise IndefiniteSystemError("non-positive diagonal entry; system is not SPD")
        inv_diag = 1.0 / diag
    elif preconditioner in (None, "none"):
        inv_diag = None
    else:
        raise ValueError(f"unknown preconditioner {preconditioner!r}")

    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros(n), SolveReport(0, 0.0, True)
    r = b - A @ x
    res = np.linalg.norm(r) / bnorm
    if res <= tol:
        return x, SolveReport(0, float(res), True)
    z = r * inv_diag if inv_diag is not None else r.copy()
    p = z.copy()
    rz = r @ z
    it = 0
    while it < max_iter:
        it += 1
        Ap = A @ p
        pAp = p @ Ap
        if pAp <= 0.0:
            raise IndefiniteSystemError(
                f"p^T A p = {pAp:.3e} <= 0 at iteration {it}; the time step likely "
                "violates the coercivity bound")
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        if history is not None:
            history.append(x.copy())
        res = np.linalg.norm(r) / bnorm
        if res <= tol:
            break
        z = r * inv_diag if inv_diag is not None else r.copy()
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    # guard against drift of the recursive residual
    res = np.linalg.norm(b - A @ x) / bnorm
    return x, SolveReport(it, float(res), bool(res <= tol))


def dense_solve(A, b) -> np.ndarray:
    """LU with partial pivoting; raises :class:`SolverError` on a singular matrix."""
    A = A.toarray() if sp.issparse(A) else np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("dense_solve needs a square matrix")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
    if np.any(np.abs(np.diag(lu)) <= np.finfo(float).eps * max(1.0, np.abs(A).max()) * A.shape[0]):
        raise SolverError("singular matrix (zero pivot)")
    return scipy.linalg.lu_solve((lu, piv), b)
