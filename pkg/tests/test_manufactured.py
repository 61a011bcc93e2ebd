import numpy as np
import pytest

from debyefem.manufactured import example1, example2, get_case, source_E, source_P, zero_case
from debyefem.nonlinearity import NonlinearLaw, PhysParams

PARAMS = PhysParams()
CUBIC = NonlinearLaw.cubic(1.0, 1.0)


def test_center_value():
    E1, _ = example1().E(np.array(0.5), np.array(0.5), 0.0)
    assert E1 == 0.0


def test_boundary_rows():
    case = example1()
    x = np.array([0.0, 0.25, 0.7, 1.0])
    for y in (0.0, 1.0):
        for t in (0.0, 0.4):
            assert np.all(case.E(x, np.full_like(x, y), t)[0] == 0.0)


def boundary_samples(case, n=100, seed=0):
    """Points on the boundary segments with their unit tangents."""
    rng = np.random.default_rng(seed)
    if case.domain_kind.value == "unit_square":
        segs = [((0, 0), (1, 0)), ((1, 0), (1, 1)), ((1, 1), (0, 1)), ((0, 1), (0, 0))]
    else:
        segs = [((0, 0), (0.5, 0)), ((0.5, 0), (0.5, 0.5)), ((0.5, 0.5), (1, 0.5)),
                ((1, 0.5), (1, 1)), ((1, 1), (0, 1)), ((0, 1), (0, 0))]
    a, b = np.array(segs, dtype=float).transpose(1, 0, 2)
    k = rng.integers(0, len(segs), n)
    s = rng.uniform(0, 1, n)[:, None]
    pts = a[k] + s * (b[k] - a[k])
    tan = (b[k] - a[k]) / np.linalg.norm(b[k] - a[k], axis=1, keepdims=True)
    return pts, tan


@pytest.mark.parametrize("case", [example1(), example2()])
def test_tangential_trace(case):
    pts, tan = boundary_samples(case)
    for t in (0.0, 0.7):
        E = np.column_stack(case.E(pts[:, 0], pts[:, 1], t))
        assert np.max(np.abs(np.sum(E * tan, axis=1))) <= 1e-12


def fd_check(case, h=1e-6, seed=1):
    rng = np.random.default_rng(seed)
    x, y = rng.uniform(0.02, 0.98, size=(2, 100))
    if case.domain_kind.value == "lshape":
        keep = ~((x > 0.5) & (y < 0.5))
        x, y = x[keep], y[keep]
    # stay away from the kinks at 1/2
    keep = (np.abs(x - 0.5) > 0.01) & (np.abs(y - 0.5) > 0.01)
    x, y = x[keep], y[keep]
    t = 1e-3
    E = lambda x, y, t: np.array(case.E(x, y, t))  # noqa: E731

    def rel(a, b):
        return np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-12)

    Et = (E(x, y, t + h) - E(x, y, t - h)) / (2 * h)
    assert rel(np.array(case.E_t(x, y, t)), Et) <= 1e-6
    hh = 1e-4
    Ett = (E(x, y, t + hh) - 2 * E(x, y, t) + E(x, y, t - hh)) / hh**2
    assert rel(np.array(case.E_tt(x, y, t)), Ett) <= 1e-6
    dE2dx = (E(x + h, y, t)[1] - E(x - h, y, t)[1]) / (2 * h)
    dE1dy = (E(x, y + h, t)[0] - E(x, y - h, t)[0]) / (2 * h)
    assert rel(case.curl_E(x, y, t), dE2dx - dE1dy) <= 1e-6
    c = case.curl_E
    cc = np.array([(c(x, y + h, t) - c(x, y - h, t)) / (2 * h),
                   -(c(x + h, y, t) - c(x - h, y, t)) / (2 * h)])
    assert rel(np.array(case.curlcurl_E(x, y, t)), cc) <= 1e-6


@pytest.mark.parametrize("case", [example1(), example2()])
def test_derivatives_against_finite_differences(case):
    fd_check(case)


def test_zero_case_sources():
    case = zero_case()
    x = np.linspace(0, 1, 7)
    for g in (source_E(case, PARAMS, CUBIC, 0.3), source_P(case, PARAMS, CUBIC, 0.3)):
        assert np.all(np.array(g(x, x)) == 0.0)


def test_p_source_cancellation():
    case = example1()
    rng = np.random.default_rng(2)
    x, y = rng.uniform(0, 1, size=(2, 200))
    gp = np.array(source_P(case, PARAMS, NonlinearLaw.linear(0.0), 0.0)(x, y))
    assert np.max(np.abs(gp)) <= 1e-14
    for tt in (0.0, 0.5):
        gp = np.array(source_P(case, PARAMS, CUBIC, tt)(x, y))
        P = np.array(case.P(x, y, tt))
        assert np.allclose(gp, P + P**3, atol=1e-14)


@pytest.mark.parametrize("case", [example1(), example2()])
def test_residual_closes(case):
    rng = np.random.default_rng(4)
    law, p = CUBIC, PARAMS
    for t in rng.uniform(0, 1, 20):
        x, y = rng.uniform(0, 1, size=(2, 10))
        gE = np.array(source_E(case, p, law, t)(x, y))
        E = np.array(case.E(x, y, t))
        P = np.array(case.P(x, y, t))
        lhs = (p.mu0 * p.eps0 * np.array(case.E_tt(x, y, t)) + p.A1 * np.array(case.E_t(x, y, t))
               + np.array(case.curlcurl_E(x, y, t)) - p.A2 * law.df(P) * E
               + p.mu0 / p.tau**2 * law.df(P) * law.f(P))
        assert np.max(np.abs(lhs + p.mu0 * gE)) <= 1e-9
        gP = np.array(source_P(case, p, law, t)(x, y))
        lhsP = p.tau * np.array(case.P_t(x, y, t)) + law.f(P)
        assert np.max(np.abs(lhsP - p.coupling * E - gP)) <= 1e-9


def test_get_case():
    assert get_case("Example1").name == "example1"
    assert get_case("example2").domain_kind.value == "lshape"
    with pytest.raises(ValueError):
        get_case("example3")
