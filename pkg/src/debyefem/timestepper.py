"""Decoupled backward-Euler stepping of the E/P system.

Each step first solves the linear E-system using the previous polarization,
then solves the polarization cell by cell with Newton's method using the
new E.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import manufactured
from .assembly import (
    apply_dirichlet,
    assemble_mass,
    assemble_stiffness,
    assemble_weighted_mass,
    load_from_values,
    range_check,
)
from .linalg import SolveReport, SolverError, cg_solve, dense_solve
from .mesh import QuadMesh
from .nonlinearity import NonlinearLaw, PhysParams, max_admissible_dt
from .quadrature import DEFAULT_ORDER
from .spaces import (
    W_MASS_REF,
    CellField,
    EdgeField,
    cell_field_at_quad,
    cell_quadrature,
    edge_field_at_quad,
    interp_edge,
    load_W_from_values,
    project_W,
)

log = logging.getLogger(__name__)


class InadmissibleTimeStep(ValueError):
    pass


class NewtonError(RuntimeError):
    pass


@dataclass
class StepperConfig:
    dt: float = 1e-5
    newton_tol: float = 1e-12
    newton_max_iter: int = 25
    linear_tol: float = 1e-10
    linear_max_iter: int = 2000
    precond: str = "jacobi"
    quad_order: int = DEFAULT_ORDER
    solver: str = "cg"


@dataclass
class StepperState:
    E_curr: EdgeField
    E_prev: EdgeField
    P_curr: CellField
    step_index: int
    dt: float
    params: PhysParams
    law: NonlinearLaw

    @property
    def t(self) -> float:
        return self.step_index * self.dt


@dataclass
class NewtonReport:
    iterations: int  # max over cells
    max_residual: float
    monotone: bool  # residual decreased strictly in every cell


@dataclass
class Diagnostics:
    linear: list[SolveReport] = field(default_factory=list)
    newton: list[NewtonReport] = field(default_factory=list)
    max_abs_P: list[float] = field(default_factory=list)
    range_events: list[str] = field(default_factory=list)

    @property
    def linear_iterations(self) -> list[int]:
        return [r.iterations for r in self.linear]

    @property
    def newton_iterations(self) -> list[int]:
        return [r.iterations for r in self.newton]


def check_time_step(params: PhysParams, law: NonlinearLaw, dt: float) -> float:
    """Reject ``dt`` outside the coercivity bound; returns the bound."""
    bound = max_admissible_dt(params, law.deriv_bound)
    if not 0.0 < dt < bound:
        raise InadmissibleTimeStep(
            f"dt = {dt:g} is not admissible: the E-system is only guaranteed coercive "
            f"for 0 < dt < {bound:.6g} (B = {law.deriv_bound:g})")
    return bound


class Stepper:
    """Operators and solvers for one mesh / parameter set."""

    def __init__(self, mesh: QuadMesh, params: PhysParams, law: NonlinearLaw,
                 config: StepperConfig | None = None):
        self.mesh = mesh
        self.params = params
        self.law = law
        self.config = config or StepperConfig()
        self.quad = cell_quadrature(mesh, self.config.quad_order)
        self.M = assemble_mass(mesh, self.config.quad_order)
        self.K = assemble_stiffness(mesh, self.config.quad_order)
        self.boundary = np.asarray(mesh.edge_boundary, dtype=bool)
        self.w_mass = W_MASS_REF * mesh.cell_area  # diagonal of each cell block
        self.diagnostics = Diagnostics()

    # -- initial data -------------------------------------------------------

    def init_state(self, E0, E0_prime, P0) -> StepperState:
        dt = self.config.dt
        check_time_step(self.params, self.law, dt)
        order = self.config.quad_order
        e0 = interp_edge(self.mesh, E0, order).coeffs
        e0p = interp_edge(self.mesh, E0_prime, order).coeffs
        e0[self.boundary] = 0.0
        e0p[self.boundary] = 0.0
        return StepperState(
            E_curr=EdgeField(self.mesh, e0),
            E_prev=EdgeField(self.mesh, e0 - dt * e0p),
            P_curr=project_W(self.mesh, P0, order),
            step_index=0,
            dt=dt,
            params=self.params,
            law=self.law,
        )

    # -- E step -------------------------------------------------------------

    def system(self, state: StepperState):
        """Matrix and right-hand side of the E-system before boundary elimination.

        ``g_vals`` enters through :meth:`rhs`; this returns the matrix only.
        """
        p, dt = self.params, state.dt
        c2 = p.eps0 * p.mu0 / dt**2
        c1 = p.A1 / dt
        Mw = assemble_weighted_mass(self.mesh, state.P_curr, self.law, quad=self.quad,
                                    events=self.diagnostics.range_events)
        return ((c2 + c1) * self.M + self.K - p.A2 * Mw).tocsr()

    def rhs(self, state: StepperState, g_vals: np.ndarray | None) -> np.ndarray:
        p, dt = self.params, state.dt
        c2 = p.eps0 * p.mu0 / dt**2
        c1 = p.A1 / dt
        e1 = state.E_curr.coeffs
        e2 = state.E_prev.coeffs
        b = self.M @ (c2 * (2.0 * e1 - e2) + c1 * e1)
        P = cell_field_at_quad(self.mesh, state.P_curr, self.quad)
        b -= (p.mu0 / p.tau**2) * load_from_values(self.mesh, self.quad, self.law.df(P) * self.law.f(P))
        if g_vals is not None:
            b -= p.mu0 * load_from_values(self.mesh, self.quad, g_vals)
        return b

    def step_E(self, state: StepperState, g_E=None) -> EdgeField:
        """Solve for ``E_i`` given ``E_{i-1}, E_{i-2}, P_{i-1}``.

        ``g_E`` is a vector function ``(x, y) -> (g1, g2)`` evaluated at
        ``t_i``, or None for no source.
        """
        g_vals = self.quad.eval_vector(g_E) if g_E is not None else None
        A, b = apply_dirichlet(self.system(state), self.rhs(state, g_vals), self.boundary)
        cfg = self.config
        if cfg.solver == "dense":
            x = dense_solve(A, b)
            res = np.linalg.norm(b - A @ x) / max(np.linalg.norm(b), 1e-300)
            report = SolveReport(1, float(res), True)
        else:
            # solve for the correction to the second-order extrapolation
            x0 = 2.0 * state.E_curr.coeffs - state.E_prev.coeffs
            x0[self.boundary] = 0.0
            r0 = b - A @ x0
            if np.linalg.norm(r0) >= np.linalg.norm(b):
                x0 = np.zeros_like(b)
                r0 = b
            d, inner = cg_solve(A, r0, tol=cfg.linear_tol, max_iter=cfg.linear_max_iter,
                                preconditioner=cfg.precond)
            x = x0 + d
            bnorm = np.linalg.norm(b)
            res = np.linalg.norm(b - A @ x) / bnorm if bnorm > 0 else 0.0
            report = SolveReport(inner.iterations, float(res), inner.converged)
            if not inner.converged:
                raise SolverError(
                    f"CG did not converge in {inner.iterations} iterations "
                    f"(relative residual {inner.final_residual:.3e})")
        self.diagnostics.linear.append(report)
        return EdgeField(self.mesh, x)

    # -- P step -------------------------------------------------------------

    def p_rhs(self, state: StepperState, E_new, g_P=None) -> np.ndarray:
        """Right side of the per-cell polarization systems, (ncell, 4)."""
        p = self.params
        Eq = edge_field_at_quad(self.mesh, E_new, self.quad)
        vals = p.coupling * Eq
        if g_P is not None:
            vals = vals + self.quad.eval_vector(g_P)
        mass = (p.tau / state.dt) * self.w_mass
        return mass * state.P_curr.coeffs + load_W_from_values(self.quad, vals)

    def step_P(self, state: StepperState, E_new, g_P=None, initial_guess=None) -> CellField:
        """Newton solve of the cellwise nonlinear systems for ``P_i``."""
        cfg = self.config
        rhs = self.p_rhs(state, E_new, g_P)
        mass = (self.params.tau / state.dt) * self.w_mass
        quad = self.quad
        guess = state.P_curr.coeffs if initial_guess is None else _coeffs(initial_guess)
        x = np.array(guess, dtype=float).reshape(self.mesh.n_cells, 4)
        scale = np.max(np.abs(rhs), axis=1)
        tol = cfg.newton_tol * np.maximum(scale, np.finfo(float).tiny)

        def residual(xc):
            P = quad.expand(xc, "w")
            F = quad.moments(self.law.f(P), "w")
            return mass * xc + F - rhs[active], P

        active = np.arange(self.mesh.n_cells)
        iterations = np.zeros(self.mesh.n_cells, dtype=int)
        monotone = True
        R, P = residual(x[active])
        rnorm = np.max(np.abs(R), axis=1)
        for it in range(1, cfg.newton_max_iter + 1):
            done = rnorm <= tol[active]
            active, R, P, rnorm = active[~done], R[~done], P[~done], rnorm[~done]
            if active.size == 0:
                break
            J = quad.gram(self.law.df(P), "w")
            J[:, range(4), range(4)] += mass
            x[active] -= np.linalg.solve(J, R[..., None])[..., 0]
            iterations[active] = it
            R, P = residual(x[active])
            new_norm = np.max(np.abs(R), axis=1)
            # at the round-off floor the residual may stagnate; only count real increases
            floor = 16 * np.finfo(float).eps * np.maximum(scale[active], 1.0)
            if np.any((new_norm >= rnorm) & (rnorm > floor)):
                monotone = False
            rnorm = new_norm
        else:
            done = rnorm <= tol[active]
            if not np.all(done):
                bad = active[~done][0]
                raise NewtonError(
                    f"Newton did not converge in {cfg.newton_max_iter} iterations on cell "
                    f"{bad} (residual {rnorm[~done][0]:.3e})")
        full_R = mass * x + quad.moments(self.law.f(quad.expand(x, "w")), "w") - rhs
        report = NewtonReport(int(iterations.max(initial=0)), float(np.max(np.abs(full_R), initial=0.0)),
                              monotone)
        self.diagnostics.newton.append(report)
        return CellField(self.mesh, x)

    def advance(self, state: StepperState, g_E=None, g_P=None) -> StepperState:
        E_new = self.step_E(state, g_E)
        P_new = self.step_P(state, E_new, g_P)
        Pq = cell_field_at_quad(self.mesh, P_new, self.quad)
        self.diagnostics.max_abs_P.append(range_check(self.law, Pq, self.diagnostics.range_events))
        return StepperState(E_curr=E_new, E_prev=state.E_curr, P_curr=P_new,
                            step_index=state.step_index + 1, dt=state.dt,
                            params=state.params, law=state.law)


def _coeffs(field):
    return field.coeffs if hasattr(field, "coeffs") else np.asarray(field, dtype=float)


def init_state(mesh, params, law, dt, E0, E0_prime, P0, config: StepperConfig | None = None):
    cfg = config or StepperConfig()
    cfg = StepperConfig(**{**cfg.__dict__, "dt": dt})
    return Stepper(mesh, params, law, cfg).init_state(E0, E0_prime, P0)


@dataclass
class RunResult:
    E: EdgeField
    P: CellField
    t: float
    diagnostics: Diagnostics
    state: StepperState


def run(mesh: QuadMesh, case, n_steps: int, params: PhysParams | None = None,
        law: NonlinearLaw | None = None, config: StepperConfig | None = None,
        sources: bool = True, source_P: bool = True) -> RunResult:
    """Integrate a case from its exact initial data for ``n_steps`` steps.

    ``sources=False`` drops both manufactured sources (free evolution of the
    initial data); ``source_P=False`` drops only the polarization source.
    """
    if isinstance(case, str):
        case = manufactured.get_case(case)
    params = params or PhysParams()
    law = law or NonlinearLaw.cubic(1.0, 1.0)
    stepper = Stepper(mesh, params, law, config)
    state = stepper.init_state(case.at(case.E, 0.0), case.at(case.E_t, 0.0), case.at(case.P, 0.0))
    trivial = case.name == "zero"
    for i in range(1, n_steps + 1):
        t = i * state.dt
        g_E = g_P = None
        if sources and not trivial:
            g_E = manufactured.source_E(case, params, law, t)
            if source_P:
                g_P = manufactured.source_P(case, params, law, t)
        state = stepper.advance(state, g_E, g_P)
    return RunResult(E=state.E_curr, P=state.P_curr, t=state.t,
                     diagnostics=stepper.diagnostics, state=state)
