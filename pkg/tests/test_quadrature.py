import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from debyefem.mesh import build_mesh
from debyefem.quadrature import gauss_legendre, gauss_rule, integrate_over_mesh


def test_area_of_cell():
    rule = gauss_rule(3, (0.25, 0.5, 0.5, 0.75))
    assert rule.integrate(lambda x, y: np.ones_like(x)) == pytest.approx(1 / 16, abs=1e-15)
    assert rule.weights.sum() == pytest.approx(1 / 16, abs=1e-15)
    assert np.all(rule.weights > 0)


def test_xy_over_mesh():
    mesh = build_mesh("unit_square", 4)
    assert integrate_over_mesh(mesh, lambda x, y: x * y, 2) == pytest.approx(0.25, abs=1e-14)


def test_reduced_regularity_factor():
    mesh = build_mesh("unit_square", 4)
    exact = 1 / 3.1
    vals = [integrate_over_mesh(mesh, lambda x, y: np.abs(2 * x - 1) ** 2.1, n) for n in (2, 4, 8, 16)]
    errs = [abs(v - exact) for v in vals]
    assert np.all(np.diff(errs) < 0)
    assert errs[-1] < 1e-8


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_exact_on_tensor_polynomials(n):
    rule = gauss_rule(n, (0.0, 0.0, 1.0, 1.0))
    for p in range(2 * n):
        for q in range(2 * n):
            got = rule.integrate(lambda x, y: x**p * y**q)
            assert got == pytest.approx(1.0 / ((p + 1) * (q + 1)), rel=1e-13, abs=1e-14)


def test_order_range():
    with pytest.raises(ValueError):
        gauss_legendre(0)
    with pytest.raises(ValueError):
        gauss_legendre(17)


@settings(max_examples=30, deadline=None)
@given(st.integers(5, 12), st.floats(-3, 3), st.floats(-3, 3))
def test_refinement_consistency(n, a, b):
    mesh = build_mesh("unit_square", 4)

    def f(x, y):
        return np.exp(a * x) * np.cos(b * y)
    assert abs(integrate_over_mesh(mesh, f, n) - integrate_over_mesh(mesh, f, n + 2)) <= 1e-10
