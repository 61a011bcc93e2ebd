"""Scalar nonlinear laws for the polarization and the physical parameters.

A law ``f`` acts componentwise on the polarization vector.  Each law
carries the constants used by the theory:

* ``omega_f`` -- strong monotonicity, ``(f(x)-f(y))(x-y) >= omega_f (x-y)^2``
* ``lipschitz`` -- ``|f(x)-f(y)| <= C_L |x-y|``
* ``growth`` -- ``|f(x)| <= M |x|``
* ``deriv_bound`` -- ``f'(x) <= B``

For the cubic law these only hold on a bounded range ``[-R, R]``; ``R`` is
stored in ``valid_range`` (``inf`` for the globally valid laws).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class LawKind(str, enum.Enum):
    LINEAR = "linear"
    CUBIC = "cubic"
    SATURATING = "saturating"


@dataclass(frozen=True)
class NonlinearLaw:
    kind: LawKind
    delta1: float
    delta2: float = 0.0
    valid_range: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, "kind", LawKind(self.kind))
        if self.kind is LawKind.CUBIC and self.delta2 < 0:
            raise ValueError("cubic law needs delta2 >= 0")
        if self.kind is LawKind.SATURATING and self.delta2 < 0:
            raise ValueError("saturating law needs delta2 >= 0")

    @classmethod
    def linear(cls, delta1: float) -> "NonlinearLaw":
        return cls(LawKind.LINEAR, float(delta1))

    @classmethod
    def cubic(cls, delta1: float, delta2: float, valid_range: float = 16.0) -> "NonlinearLaw":
        return cls(LawKind.CUBIC, float(delta1), float(delta2), float(valid_range))

    @classmethod
    def saturating(cls, delta1: float, delta2: float) -> "NonlinearLaw":
        return cls(LawKind.SATURATING, float(delta1), float(delta2))

    def f(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind is LawKind.LINEAR:
            return self.delta1 * x
        if self.kind is LawKind.CUBIC:
            return self.delta1 * x + self.delta2 * (x * x * x)
        return self.delta1 * x + self.delta2 * x / (1.0 + x * x)

    def df(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind is LawKind.LINEAR:
            return np.full_like(x, self.delta1)
        if self.kind is LawKind.CUBIC:
            return self.delta1 + 3.0 * self.delta2 * x * x
        x2 = x * x
        return self.delta1 + self.delta2 * (1.0 - x2) / (1.0 + x2) ** 2

    @property
    def omega_f(self) -> float:
        if self.kind is LawKind.SATURATING:
            # min of (1 - x^2)/(1 + x^2)^2 is -1/8, attained at x^2 = 3
            return self.delta1 - self.delta2 / 8.0
        return self.delta1

    @property
    def deriv_bound(self) -> float:
        if self.kind is LawKind.LINEAR:
            return self.delta1
        if self.kind is LawKind.CUBIC:
            return self.delta1 + 3.0 * self.delta2 * self.valid_range**2
        return self.delta1 + self.delta2

    @property
    def lipschitz(self) -> float:
        return self.deriv_bound

    @property
    def growth(self) -> float:
        if self.kind is LawKind.CUBIC:
            return self.delta1 + self.delta2 * self.valid_range**2
        return self.delta1 + self.delta2

    def in_range(self, x) -> bool:
        return bool(np.all(np.abs(x) <= self.valid_range))


def f_eval(law: NonlinearLaw, x):
    return law.f(x)


def f_deriv(law: NonlinearLaw, x):
    return law.df(x)


def make_law(name: str, delta1: float = 1.0, delta2: float = 1.0,
             valid_range: float = 16.0) -> NonlinearLaw:
    kind = LawKind(str(name).strip().lower())
    if kind is LawKind.LINEAR:
        return NonlinearLaw.linear(delta1)
    if kind is LawKind.CUBIC:
        return NonlinearLaw.cubic(delta1, delta2, valid_range)
    return NonlinearLaw.saturating(delta1, delta2)


@dataclass(frozen=True)
class PhysParams:
    eps0: float = 1.0
    mu0: float = 1.0
    tau: float = 1.0
    eps_s: float = 2.0
    eps_inf: float = 1.0

    def __post_init__(self):
        if not (self.eps_s > self.eps_inf > 0):
            raise ValueError("need eps_s > eps_inf > 0")
        if min(self.eps0, self.mu0, self.tau) <= 0:
            raise ValueError("eps0, mu0 and tau must be positive")

    @property
    def deps(self) -> float:
        return self.eps_s - self.eps_inf

    @property
    def A1(self) -> float:
        return self.eps0 * self.mu0 * self.deps / self.tau

    @property
    def A2(self) -> float:
        return self.eps0 * self.mu0 * self.deps / self.tau**2

    @property
    def coupling(self) -> float:
        """Coefficient of E on the right of the polarization equation."""
        return self.eps0 * self.deps


def max_admissible_dt(params: PhysParams, B: float) -> float:
    """Upper bound on the time step that keeps the E-system coercive.

    Coercivity needs ``eps0 mu0/dt^2 + A1/dt - A2 B > 0``; the positive root
    of the corresponding quadratic in ``dt`` is returned (``inf`` when
    ``B <= 0``).
    """
    if B <= 0:
        return math.inf
    d = params.deps
    tau = params.tau
    return (tau * d + tau * math.sqrt(d * d + 4.0 * B * d)) / (2.0 * B * d)


def coercivity_constant(params: PhysParams, B: float, dt: float) -> float:
    em = params.eps0 * params.mu0
    return em / dt**2 + params.A1 / dt - params.A2 * B
