"""Tests for the geodesics module."""
import math

import pytest

from ou_kernels.geodesics import (
    FAMILY,
    NO_SOLUTION,
    UNIQUE,
    family_eval,
    geodesic,
    geodesic_eval,
    resonance_index,
)
from ou_kernels.hamiltonian import flow
from ou_kernels.kernel import log_kernel
from ou_kernels.operator_core import OUOperator, classify
from ou_kernels.verify import geodesic_ode_residual

from .conftest import REGIMES


def _resonant(k: int, a: float = 0.7, b: float = 0.4, theta: float = 1.3) -> OUOperator:
    return OUOperator(theta, a, b, -((k * math.pi) ** 2 + a * a) / (4.0 * theta))


@pytest.mark.parametrize("kind", REGIMES)
def test_endpoints_are_exact(rng, make_operator, kind):
    for _ in range(70):
        op = make_operator(rng, kind)
        x0, x1 = (float(v) for v in rng.uniform(-2.0, 2.0, size=2))
        result = geodesic(op, x0, x1)
        assert result.kind == UNIQUE
        assert abs(geodesic_eval(result.path, 0.0) - x0) <= 1e-12 * (1.0 + abs(x0))
        assert abs(geodesic_eval(result.path, 1.0) - x1) <= 1e-12 * (1.0 + abs(x1))


@pytest.mark.parametrize("kind", REGIMES)
def test_geodesic_solves_second_order_ode(rng, make_operator, kind):
    for _ in range(70):
        op = make_operator(rng, kind)
        x0, x1 = (float(v) for v in rng.uniform(-2.0, 2.0, size=2))
        path = geodesic(op, x0, x1).path
        for s in (0.1, 0.3, 0.5, 0.7, 0.9):
            assert geodesic_ode_residual(op, path.position, s) <= 1e-5


@pytest.mark.parametrize("kind", REGIMES)
def test_initial_momentum_reproduces_path(rng, make_operator, kind):
    for _ in range(20):
        op = make_operator(rng, kind)
        x0, x1 = (float(v) for v in rng.uniform(-2.0, 2.0, size=2))
        path = geodesic(op, x0, x1).path
        start = path.initial_state()
        scale = 1.0 + abs(x0) + abs(x1) + abs(path.shift)
        for s in (0.25, 0.5, 1.0):
            state = flow(op, start, s)
            assert abs(state.x - path.position(s)) <= 1e-9 * scale
            assert abs(state.xi - path.momentum(s)) <= 1e-8 * scale


def test_l_minus_is_unique_below_pi(l_minus):
    result = geodesic(l_minus, 1.0, 1.0)
    assert result.kind == UNIQUE
    assert result.path.position(0.5) == pytest.approx(
        math.sin(math.sqrt(3.0) * 0.5) * 2.0 / math.sin(math.sqrt(3.0)))


def test_critical_parabola(critical_op):
    path = geodesic(critical_op, 0.0, 2.0).path
    # x'' = ab = 2
    assert path.position(0.5) == pytest.approx(0.25 + 1.0 * 0.5)
    assert path.velocity(0.0) == pytest.approx(1.0)


def test_hyperbolic_large_lambda_does_not_overflow():
    op = OUOperator(1.0, 0.0, 0.0, 400.0 ** 2 / 4.0)
    path = geodesic(op, 1.0, 1.0).path
    assert path.position(0.5) == pytest.approx(2.0 * math.exp(-200.0), rel=1e-9)
    assert path.position(0.0) == pytest.approx(1.0)


@pytest.mark.parametrize("k", [1, 2])
def test_resonance_family_and_no_solution(k):
    op = _resonant(k)
    assert resonance_index(classify(op)) == k
    family_result = geodesic(op, 0.8, 0.0)
    required = family_result.required_endpoint
    if family_result.kind != FAMILY:
        assert family_result.kind == NO_SOLUTION
        family_result = geodesic(op, 0.8, required)
    assert family_result.kind == FAMILY
    assert family_result.k == k

    missed = geodesic(op, 0.8, required + 0.5)
    assert missed.kind == NO_SOLUTION
    assert missed.path is None and missed.family is None
    assert missed.required_endpoint == pytest.approx(required)


@pytest.mark.parametrize("k", [1, 2])
def test_forced_endpoint_formula(k):
    op = _resonant(k)
    shift = op.a * op.b / (k * math.pi) ** 2
    expected = shift + (-1) ** k * (0.8 - shift)
    assert geodesic(op, 0.8, 0.0).required_endpoint == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("k", [1, 2])
def test_family_endpoints_do_not_depend_on_c2(k):
    op = _resonant(k)
    result = geodesic(op, 0.8, geodesic(op, 0.8, 0.0).required_endpoint)
    family = result.family
    ends = [family_eval(family, c2, 1.0) for c2 in (-10.0, 0.0, 10.0)]
    starts = [family_eval(family, c2, 0.0) for c2 in (-10.0, 0.0, 10.0)]
    assert max(ends) - min(ends) <= 1e-12
    assert all(abs(x - 0.8) <= 1e-12 for x in starts)
    assert family_eval(family, 10.0, 0.5) != family_eval(family, -10.0, 0.5)


def test_family_members_solve_ode():
    op = _resonant(1)
    family = geodesic(op, 0.8, geodesic(op, 0.8, 0.0).required_endpoint).family
    for c2 in (-10.0, 0.0, 10.0):
        for s in (0.2, 0.5, 0.8):
            assert geodesic_ode_residual(op, lambda u: family.position(c2, u), s) <= 1e-5


def test_no_resonance_away_from_k_pi(l_minus):
    assert resonance_index(classify(l_minus)) is None


def test_critical_b0_operators_share_geodesics():
    up = OUOperator(1.0, 2.0, 0.0, -1.0)
    down = OUOperator(1.0, -2.0, 0.0, -1.0)
    p = geodesic(up, 0.3, -1.1).path
    q = geodesic(down, 0.3, -1.1).path
    assert max(abs(p.position(j / 100) - q.position(j / 100)) for j in range(101)) <= 1e-15
    # same paths, different kernels: the drift sign still enters P
    assert abs(log_kernel(up, 1.0, 1.0, 0.0) - log_kernel(down, 1.0, 1.0, 0.0)) > 0.1


def test_eval_outside_unit_interval(l_plus):
    path = geodesic(l_plus, 1.0, 0.0).path
    with pytest.raises(ValueError):
        geodesic_eval(path, 1.5)
    family = geodesic(_resonant(1), 0.8, geodesic(_resonant(1), 0.8, 0.0).required_endpoint).family
    with pytest.raises(ValueError):
        family_eval(family, 0.0, -0.1)


def test_non_finite_endpoint(l_plus):
    with pytest.raises(ValueError):
        geodesic(l_plus, float("nan"), 0.0)


def test_result_to_dict(l_plus):
    d = geodesic(l_plus, 1.0, 0.0).to_dict()
    assert d["result"] == "unique"
    assert d["path"]["regime"] == "hyperbolic"
    missed = geodesic(_resonant(1), 0.8, 5.0).to_dict()
    assert missed["result"] == "no_solution"
    assert missed["k"] == 1
