"""Self-checks run by ``debyefem check``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracles
from .assembly import assemble_mass, assemble_stiffness, assemble_weighted_mass
from .mesh import build_mesh, macro_pairing
from .nonlinearity import NonlinearLaw, PhysParams
from .postprocess import l2_norm_macro, postprocess_E, postprocess_P
from .spaces import CellField, EdgeField, interp_edge, l2_norm_edge, project_W
from .timestepper import Stepper, StepperConfig, StepperState


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def __post_init__(self):
        self.passed = bool(self.passed)


def _smooth_field(rng):
    k = rng.uniform(-3, 3, size=(2, 2))
    ph = rng.uniform(0, 2 * np.pi, size=2)
    amp = rng.uniform(0.5, 2.0, size=2)

    def v(x, y):
        return (amp[0] * np.sin(k[0, 0] * x + k[0, 1] * y + ph[0]),
                amp[1] * np.cos(k[1, 0] * x + k[1, 1] * y + ph[1]))
    return v


def _bilinear_field(rng):
    c = rng.normal(size=(2, 4))

    def v(x, y):
        return (c[0, 0] + c[0, 1] * x + c[0, 2] * y + c[0, 3] * x * y,
                c[1, 0] + c[1, 1] * x + c[1, 2] * y + c[1, 3] * x * y)
    return v


def check_assembly(corrupt_stiffness: bool = False) -> list[CheckResult]:
    mesh = build_mesh("unit_square", 2)
    law = NonlinearLaw.cubic(1.0, 1.0)
    P = project_W(mesh, lambda x, y: (np.sin(2 * x + y), x * y - 0.3))
    M = assemble_mass(mesh).toarray()
    K = assemble_stiffness(mesh).toarray()
    if corrupt_stiffness:
        K[0, 1] += 1e-3
    Mw = assemble_weighted_mass(mesh, P, law).toarray()
    Mw_ref = oracles.dense_gram(
        mesh, "mass", lambda c, x, y: law.df(oracles.w_field_values(mesh, P.coeffs, c, x, y)))
    err = max(np.abs(M - oracles.dense_gram(mesh, "mass")).max(),
              np.abs(K - oracles.dense_gram(mesh, "curl")).max(),
              np.abs(Mw - Mw_ref).max())
    asym = max(np.abs(A - A.T).max() for A in (M, K, Mw))
    return [
        CheckResult("assembly matches dense oracle (N=2)", err <= 1e-11, f"max diff {err:.2e}"),
        CheckResult("M, K, M_w symmetric", asym <= 1e-12, f"max asymmetry {asym:.2e}"),
    ]


def check_projection(n_fields: int = 20, seed: int = 0) -> CheckResult:
    mesh = build_mesh("unit_square", 4)
    rng = np.random.default_rng(seed)
    order = 10
    t, w = np.polynomial.legendre.leggauss(order)
    worst = 0.0
    for _ in range(n_fields):
        v = _smooth_field(rng)
        Pv = project_W(mesh, v, order)
        field_worst = 0.0
        vnorm2 = 0.0
        for c in range(mesh.n_cells):
            x0, y0 = mesh.cells[c] * mesh.h
            X, Y = np.meshgrid(x0 + mesh.h * (t + 1) / 2, y0 + mesh.h * (t + 1) / 2, indexing="ij")
            W = np.outer(w, w) * mesh.h**2 / 4
            vx, vy = v(X, Y)
            ph = oracles.w_field_values(mesh, Pv.coeffs, c, X, Y)
            xi = 2 * (X - x0) / mesh.h - 1
            eta = 2 * (Y - y0) / mesh.h - 1
            d1, d2 = ph[..., 0] - vx, ph[..., 1] - vy
            moments = [np.sum(W * d1), np.sum(W * d1 * xi), np.sum(W * d2), np.sum(W * d2 * eta)]
            field_worst = max(field_worst, max(abs(m) for m in moments))
            vnorm2 += np.sum(W * (vx**2 + vy**2))
        worst = max(worst, field_worst / np.sqrt(vnorm2))
    return CheckResult("projection orthogonality (pi_h v - v, psi) = 0", worst <= 1e-10,
                       f"max |moment| / ||v|| = {worst:.2e}")


def check_postprocess(seed: int = 1) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    mesh = build_mesh("unit_square", 8)
    pairing = macro_pairing(mesh)
    pts = rng.uniform(0.01, 0.99, size=(200, 2))

    worst = 0.0
    for _ in range(5):
        v = _bilinear_field(rng)
        exact = np.column_stack(v(pts[:, 0], pts[:, 1]))
        pe = postprocess_E(mesh, pairing, interp_edge(mesh, v)).eval(mesh, pts)
        pp = postprocess_P(mesh, pairing, project_W(mesh, v)).eval(mesh, pts)
        worst = max(worst, np.abs(pe - exact).max(), np.abs(pp - exact).max())
    results = [CheckResult("post-processing reproduces Q11 fields", worst <= 1e-12,
                           f"max error {worst:.2e}")]

    # the output only sees DOFs: an EdgeField and its raw DOF vector agree bitwise
    same = True
    for _ in range(20):
        v = _smooth_field(rng)
        w_h = interp_edge(mesh, v)
        same &= np.array_equal(postprocess_E(mesh, pairing, w_h).coeffs,
                               postprocess_E(mesh, pairing, w_h.coeffs.copy()).coeffs)
        p_h = project_W(mesh, v)
        same &= np.array_equal(postprocess_P(mesh, pairing, p_h).coeffs,
                               postprocess_P(mesh, pairing, p_h.coeffs.copy()).coeffs)
    results.append(CheckResult("post-processing depends only on DOFs", bool(same),
                               "bitwise comparison"))

    ratio = 0.0
    for _ in range(100):
        w_h = EdgeField(mesh, rng.normal(size=mesh.n_edges))
        ratio = max(ratio, l2_norm_macro(mesh, postprocess_E(mesh, pairing, w_h)) / l2_norm_edge(mesh, w_h))
    results.append(CheckResult("post-processing bounded in L2", ratio <= 10.0,
                               f"empirical constant {ratio:.3f}"))
    return results


def check_newton() -> CheckResult:
    mesh = build_mesh("unit_square", 2)
    params = PhysParams()
    law = NonlinearLaw.cubic(1.0, 1.0)
    dt = 1e-2
    stepper = Stepper(mesh, params, law, StepperConfig(dt=dt))
    p0, e_val, g_val = 0.3, 1.7, 0.4
    P_prev = CellField(mesh, np.tile([p0, 0.0, p0, 0.0], (mesh.n_cells, 1)))
    E_new = interp_edge(mesh, lambda x, y: (np.full_like(x, e_val), np.full_like(x, e_val)))
    state = StepperState(E_curr=E_new, E_prev=E_new, P_curr=P_prev, step_index=0, dt=dt,
                         params=params, law=law)
    P_new = stepper.step_P(state, E_new, lambda x, y: (np.full_like(x, g_val), np.full_like(x, g_val)))
    r = params.coupling * e_val + g_val
    root = oracles.bisection(lambda p: params.tau * (p - p0) / dt + law.f(p) - r, -10.0, 10.0)
    err = np.abs(P_new.coeffs[:, [0, 2]] - root).max()
    return CheckResult("Newton matches scalar bisection", err <= 1e-12, f"max diff {err:.2e}")


def check_cg_vs_dense() -> CheckResult:
    mesh = build_mesh("unit_square", 2)
    params = PhysParams()
    law = NonlinearLaw.linear(1.0)
    dt = 1e-3
    stepper = Stepper(mesh, params, law, StepperConfig(dt=dt))
    state = stepper.init_state(lambda x, y: (y * (1 - y), x * (1 - x)),
                               lambda x, y: (x * y * (1 - y), 0 * x),
                               lambda x, y: (np.sin(x + y), x - y))
    g = lambda x, y: (np.cos(3 * x) * y, x * x)  # noqa: E731
    cg = stepper.step_E(state, g).coeffs
    ref = oracles.dense_E_step(mesh, params, law, dt, state.E_curr.coeffs, state.E_prev.coeffs,
                               state.P_curr.coeffs, g)
    err = np.abs(cg - ref).max()
    return CheckResult("CG E-step matches dense LU (N=2)", err <= 1e-10, f"max diff {err:.2e}")


def run_checks(corrupt_stiffness: bool = False) -> list[CheckResult]:
    results = check_assembly(corrupt_stiffness)
    results.append(check_projection())
    results += check_postprocess()
    results.append(check_newton())
    results.append(check_cg_vs_dense())
    return results
