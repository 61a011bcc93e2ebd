import math

import numpy as np
import pytest

from debyefem.nonlinearity import (
    NonlinearLaw,
    PhysParams,
    f_deriv,
    f_eval,
    make_law,
    max_admissible_dt,
)

LAWS = [NonlinearLaw.linear(1.5), NonlinearLaw.cubic(1.0, 1.0, valid_range=5.0),
        NonlinearLaw.saturating(1.0, 0.5)]


def test_cubic_values():
    law = NonlinearLaw.cubic(1, 1)
    assert f_eval(law, 0.0) == 0.0
    assert f_eval(law, 2.0) == 10.0
    assert f_deriv(law, 2.0) == 13.0


def test_saturating_min_derivative():
    law = NonlinearLaw.saturating(1.0, 0.5)
    x = np.linspace(-10, 10, 200001)
    assert law.df(x).min() >= 0.9375 - 1e-12
    assert law.df(x).min() == pytest.approx(0.9375, abs=1e-8)
    assert law.omega_f == 0.9375


@pytest.mark.parametrize("law", LAWS)
def test_fd_derivative(law):
    x = np.linspace(-5, 5, 1001)
    eps = 1e-5
    fd = (law.f(x + eps) - law.f(x - eps)) / (2 * eps)
    assert np.max(np.abs(law.df(x) - fd)) <= 1e-6


@pytest.mark.parametrize("law", LAWS)
def test_constants_on_range(law):
    R = min(law.valid_range, 10.0)
    rng = np.random.default_rng(0)
    x, y = rng.uniform(-R, R, size=(2, 10_000))
    d = x - y
    assert np.all((law.f(x) - law.f(y)) * d >= law.omega_f * d * d - 1e-9)
    assert np.all(np.abs(law.f(x) - law.f(y)) <= law.lipschitz * np.abs(d) + 1e-9)
    assert np.all(np.abs(law.f(x)) <= law.growth * np.abs(x) + 1e-9)
    assert np.all(law.df(x) > 0)
    assert np.all(law.df(x) <= law.deriv_bound + 1e-9)
    assert law.f(0.0) == 0.0


def test_make_law():
    assert make_law("Cubic", 1, 2, 3) == NonlinearLaw.cubic(1, 2, 3)
    assert make_law("linear", 2).f(3.0) == 6.0
    with pytest.raises(ValueError):
        make_law("quintic")


def test_params_and_time_step_bound():
    p = PhysParams()
    assert p.A1 == 1.0 and p.A2 == 1.0 and p.coupling == 1.0
    B = NonlinearLaw.cubic(1, 1).deriv_bound
    assert B == 769.0
    bound = max_admissible_dt(p, B)
    assert bound == pytest.approx((1 + math.sqrt(1 + 4 * B)) / (2 * B), rel=1e-14)
    assert 1e-5 < bound
    # the bound is the root where the coercivity constant vanishes
    assert 1 / bound**2 + 1 / bound - B == pytest.approx(0.0, abs=1e-8)
    with pytest.raises(ValueError):
        PhysParams(eps_s=1.0, eps_inf=2.0)
