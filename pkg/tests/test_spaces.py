import numpy as np
import pytest

from debyefem import manufactured
from debyefem.checks import check_projection
from debyefem.mesh import build_mesh
from debyefem.spaces import (
    EdgeField,
    cell_curl,
    edge_field_at_quad,
    cell_quadrature,
    eval_cell_field,
    eval_curl,
    eval_edge_field,
    interp_edge,
    l2_norm_edge,
    project_W,
    zero_boundary,
)


def test_constant_interpolant():
    mesh = build_mesh("unit_square", 2)
    u = interp_edge(mesh, lambda x, y: (np.ones_like(x), np.zeros_like(x)))
    assert np.all(u.coeffs[mesh.edge_dir == 0] == 1.0)
    assert np.all(u.coeffs[mesh.edge_dir == 1] == 0.0)
    pts = np.random.default_rng(0).uniform(0, 1, size=(50, 2))
    assert np.allclose(eval_edge_field(mesh, u, pts), [1.0, 0.0], atol=1e-15)
    assert np.allclose(eval_curl(mesh, u, pts), 0.0, atol=1e-14)


def field_error(mesh, field, func):
    quad = cell_quadrature(mesh, 5)
    diff = edge_field_at_quad(mesh, field, quad) - quad.eval_vector(func)
    return np.sqrt(np.einsum("cqk,cqk,q->", diff, diff, quad.weights))


@pytest.mark.parametrize("kind", ["unit_square", "lshape"])
def test_reproduces_local_space(kind):
    mesh = build_mesh(kind, 4)
    for func in (lambda x, y: (y, x), lambda x, y: (-y, x),
                 lambda x, y: (2 - 3 * y, 0.5 + x)):
        assert field_error(mesh, interp_edge(mesh, func), func) <= 1e-12


def test_rotation_curl():
    mesh = build_mesh("unit_square", 4)
    u = interp_edge(mesh, lambda x, y: (-y, x))
    assert np.allclose(cell_curl(mesh, u), 2.0, atol=1e-12)
    assert np.allclose(eval_curl(mesh, u, mesh.cell_centers), 2.0, atol=1e-12)


def test_eval_matches_shape_table():
    mesh = build_mesh("unit_square", 2)
    rng = np.random.default_rng(3)
    coeffs = rng.normal(size=mesh.n_edges)
    pts = rng.uniform(0, 1, size=(40, 2))
    got = eval_edge_field(mesh, coeffs, pts)
    h = mesh.h
    for p, val in zip(pts, got):
        i, j = np.minimum((p // h).astype(int), 1)
        c = mesh.cell_index[i, j]
        s, r = p / h - [i, j]
        b, t, l, rt = coeffs[mesh.cell_edges[c]]
        expected = [b * (1 - r) + t * r, l * (1 - s) + rt * s]
        assert np.allclose(val, expected, atol=1e-14)


def test_interpolation_order_example1():
    case = manufactured.example1()
    E0 = case.at(case.E, 0.0)
    errs = []
    for N in (4, 8, 16, 32):
        mesh = build_mesh("unit_square", N)
        errs.append(field_error(mesh, interp_edge(mesh, E0), E0))
    orders = np.log2(np.array(errs[:-1]) / errs[1:])
    assert np.all(np.diff(errs) < 0)
    assert 0.85 <= orders[-1] <= 1.15


def test_projection_examples():
    mesh = build_mesh("unit_square", 4)
    p = project_W(mesh, lambda x, y: (np.ones_like(x), np.ones_like(x)))
    assert np.allclose(p.coeffs, [1, 0, 1, 0], atol=1e-14)
    p = project_W(mesh, lambda x, y: (x, y))
    pts = np.random.default_rng(1).uniform(0, 1, size=(30, 2))
    assert np.allclose(eval_cell_field(mesh, p, pts), pts, atol=1e-14)
    # the Q10 projection of y is its cell mean, i.e. the center value
    p = project_W(mesh, lambda x, y: (y, np.zeros_like(y)))
    assert np.allclose(p.coeffs[:, 0], mesh.cell_centers[:, 1], atol=1e-14)
    assert np.allclose(p.coeffs[:, 1:], 0.0, atol=1e-14)


def test_projection_orthogonality():
    assert check_projection().passed


@pytest.mark.parametrize("case", [manufactured.example1(), manufactured.example2()])
def test_zeroing_boundary_commutes(case):
    mesh = build_mesh(case.domain_kind, 8)
    u = interp_edge(mesh, case.at(case.E, 0.3))
    assert np.max(np.abs(u.coeffs[mesh.edge_boundary])) <= 1e-12
    assert np.allclose(zero_boundary(mesh, u).coeffs, u.coeffs, atol=1e-12)


def test_field_validation():
    mesh = build_mesh("unit_square", 2)
    with pytest.raises(ValueError):
        EdgeField(mesh, np.zeros(5))
    assert l2_norm_edge(mesh, np.zeros(mesh.n_edges)) == 0.0
