"""Closed-form exact solutions and the sources that make them exact.

Both examples share the structure::

    E(x, y, t) = exp(t) * (S(x, y), S(y, x)),   S(x, y) = u(x, y) v(y) |2x - 1|^alpha

with ``P = E``.  Derivatives are written out by hand; the finite-difference
checks in the test suite guard them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .mesh import DomainKind
from .nonlinearity import NonlinearLaw, PhysParams

Vec = tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True)
class _Factors:
    """``u(x, y)`` with its partials and ``v(y)`` with two derivatives."""

    u: Callable
    u_x: Callable
    u_y: Callable
    u_xy: Callable
    u_yy: Callable
    v: Callable
    v_1: Callable
    v_2: Callable


class _ProductProfile:
    """Spatial profile ``S(x, y) = u(x, y) v(y) w(x)``, ``w = |2x - 1|^alpha``."""

    def __init__(self, factors: _Factors, alpha: float):
        self.fa = factors
        self.alpha = alpha

    def w(self, x):
        return np.abs(2.0 * x - 1.0) ** self.alpha

    def w_1(self, x):
        z = 2.0 * x - 1.0
        return 2.0 * self.alpha * np.sign(z) * np.abs(z) ** (self.alpha - 1.0)

    def S(self, x, y):
        fa = self.fa
        return fa.u(x, y) * fa.v(y) * self.w(x)

    def S_y(self, x, y):
        fa = self.fa
        return self.w(x) * (fa.u_y(x, y) * fa.v(y) + fa.u(x, y) * fa.v_1(y))

    def S_yy(self, x, y):
        fa = self.fa
        return self.w(x) * (fa.u_yy(x, y) * fa.v(y) + 2.0 * fa.u_y(x, y) * fa.v_1(y)
                            + fa.u(x, y) * fa.v_2(y))

    def S_xy(self, x, y):
        fa = self.fa
        return (self.w_1(x) * (fa.u_y(x, y) * fa.v(y) + fa.u(x, y) * fa.v_1(y))
                + self.w(x) * (fa.u_xy(x, y) * fa.v(y) + fa.u_x(x, y) * fa.v_1(y)))

    # fields with the symmetric second component S2(x, y) = S(y, x)
    def field(self, x, y) -> Vec:
        return self.S(x, y), self.S(y, x)

    def curl(self, x, y):
        # d/dx S(y, x) - d/dy S(x, y)
        return self.S_y(y, x) - self.S_y(x, y)

    def curlcurl(self, x, y) -> Vec:
        # (d_y c, -d_x c) with c the scalar curl
        c_y = self.S_xy(y, x) - self.S_yy(x, y)
        c_x = self.S_yy(y, x) - self.S_xy(x, y)
        return c_y, -c_x


@dataclass(frozen=True)
class ExactCase:
    """Exact fields as functions of ``(x, y, t)``."""

    name: str
    domain_kind: DomainKind
    alpha: float
    E: Callable[..., Vec]
    E_t: Callable[..., Vec]
    E_tt: Callable[..., Vec]
    curl_E: Callable[..., np.ndarray]
    curlcurl_E: Callable[..., Vec]
    P: Callable[..., Vec]
    P_t: Callable[..., Vec]

    def at(self, fn: Callable, t: float) -> Callable:
        """Freeze time: ``case.at(case.E, t)`` is a function of ``(x, y)``."""
        return lambda x, y: fn(x, y, t)


def _exp_scaled(profile_fn):
    def fn(x, y, t):
        a, b = profile_fn(x, y)
        e = np.exp(t)
        return e * a, e * b
    return fn


def _case_from_profile(name: str, domain: DomainKind, profile: _ProductProfile) -> ExactCase:
    E = _exp_scaled(profile.field)
    return ExactCase(
        name=name,
        domain_kind=domain,
        alpha=profile.alpha,
        E=E,
        E_t=E,
        E_tt=E,
        curl_E=lambda x, y, t: np.exp(t) * profile.curl(x, y),
        curlcurl_E=_exp_scaled(profile.curlcurl),
        P=E,
        P_t=E,
    )


def example1(alpha: float = 2.1) -> ExactCase:
    """Unit square, ``S(x, y) = sin((1+x) y) (y - 1) |2x - 1|^alpha``."""
    fa = _Factors(
        u=lambda x, y: np.sin((1.0 + x) * y),
        u_x=lambda x, y: y * np.cos((1.0 + x) * y),
        u_y=lambda x, y: (1.0 + x) * np.cos((1.0 + x) * y),
        u_xy=lambda x, y: np.cos((1.0 + x) * y) - (1.0 + x) * y * np.sin((1.0 + x) * y),
        u_yy=lambda x, y: -((1.0 + x) ** 2) * np.sin((1.0 + x) * y),
        v=lambda y: y - 1.0,
        v_1=lambda y: np.ones_like(y),
        v_2=lambda y: np.zeros_like(y),
    )
    return _case_from_profile("example1", DomainKind.UNIT_SQUARE, _ProductProfile(fa, alpha))


def example2(alpha: float = 2.1) -> ExactCase:
    """L-shaped domain, ``S(x, y) = sin(xy) y (y - 0.5)(y - 1) |2x - 1|^alpha``."""
    fa = _Factors(
        u=lambda x, y: np.sin(x * y),
        u_x=lambda x, y: y * np.cos(x * y),
        u_y=lambda x, y: x * np.cos(x * y),
        u_xy=lambda x, y: np.cos(x * y) - x * y * np.sin(x * y),
        u_yy=lambda x, y: -(x**2) * np.sin(x * y),
        v=lambda y: y * (y - 0.5) * (y - 1.0),
        v_1=lambda y: 3.0 * y**2 - 3.0 * y + 0.5,
        v_2=lambda y: 6.0 * y - 3.0,
    )
    return _case_from_profile("example2", DomainKind.LSHAPE, _ProductProfile(fa, alpha))


def zero_case(domain_kind=DomainKind.UNIT_SQUARE) -> ExactCase:
    def zero_vec(x, y, t):
        z = np.zeros(np.shape(x))
        return z, z.copy()

    return ExactCase(
        name="zero",
        domain_kind=DomainKind.parse(domain_kind),
        alpha=0.0,
        E=zero_vec, E_t=zero_vec, E_tt=zero_vec,
        curl_E=lambda x, y, t: np.zeros(np.shape(x)),
        curlcurl_E=zero_vec, P=zero_vec, P_t=zero_vec,
    )


CASES = {"example1": example1, "example2": example2, "zero": zero_case}


def get_case(name: str) -> ExactCase:
    try:
        return CASES[name.strip().lower()]()
    except KeyError:
        raise ValueError(f"unknown case {name!r}; choose from {sorted(CASES)}") from None


def source_E(case: ExactCase, params: PhysParams, law: NonlinearLaw, t: float):
    """Source ``g`` of the E-equation; the right side of the scheme is ``-mu0 (g, phi)``."""

    def g(x, y):
        Ett = case.E_tt(x, y, t)
        Et = case.E_t(x, y, t)
        E = case.E(x, y, t)
        cc = case.curlcurl_E(x, y, t)
        P = case.P(x, y, t)
        out = []
        for k in range(2):
            dfp = law.df(P[k])
            lhs = (params.mu0 * params.eps0 * Ett[k] + params.A1 * Et[k] + cc[k]
                   - params.A2 * dfp * E[k] + params.mu0 / params.tau**2 * dfp * law.f(P[k]))
            out.append(-lhs / params.mu0)
        return out[0], out[1]

    return g


def source_P(case: ExactCase, params: PhysParams, law: NonlinearLaw, t: float):
    """Residual of the polarization equation, added to its right side."""

    def g(x, y):
        Pt = case.P_t(x, y, t)
        P = case.P(x, y, t)
        E = case.E(x, y, t)
        return tuple(params.tau * Pt[k] + law.f(P[k]) - params.coupling * E[k] for k in range(2))

    return g
