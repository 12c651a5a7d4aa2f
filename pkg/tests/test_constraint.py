"""Constraint-polynomial layer: recurrence, exceptional points, series coefficients."""

import math
import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose

from rabipt import (
    Branch,
    DegenerateAtomicLimitWarning,
    MAX_DEGREE,
    ModelParams,
    constraint_poly_coefficients,
    constraint_poly_eval,
    q_sequence,
    qes_energy,
    qes_points,
    qp_proportionality_residual,
)

P0 = ModelParams(delta=1.2, epsilon=0.3, omega=1.0)


def test_degree_one_closed_form():
    # P_1(x, y) = x + y - w^2 - 2*eps*w, root x = w^2 + 2*eps*w - y
    y = P0.delta ** 2
    x_root = 1.0 + 2 * 0.3 - y
    assert constraint_poly_eval(1, x_root, y, 0.3) == pytest.approx(0.0, abs=1e-14)
    assert constraint_poly_eval(1, 0.0, y, 0.3) == pytest.approx(y - 1.6)


def test_leading_coefficient_is_factorial():
    for n in range(1, 7):
        c = constraint_poly_coefficients(n, P0.delta ** 2, 0.3)
        assert c[-1] == pytest.approx(math.factorial(n), rel=1e-12)


def test_coefficients_match_pointwise_evaluation():
    rng = np.random.default_rng(7)
    for n in (2, 3, 5):
        c = constraint_poly_coefficients(n, 1.44, 0.3)
        for x in rng.uniform(0.0, 4.0, size=5):
            direct = constraint_poly_eval(n, x, 1.44, 0.3)
            assert_allclose(np.polyval(c[::-1], x), direct,
                            rtol=1e-12, atol=1e-9)


def test_point_counts_follow_degree():
    for n in range(1, 6):
        assert len(qes_points(P0, n, Branch.PLUS)) == n
        assert len(qes_points(P0, n, Branch.MINUS)) == n - 1


def test_points_are_roots_and_sorted():
    for branch in (Branch.PLUS, Branch.MINUS):
        pts = qes_points(P0, 3, branch)
        gs = [pt.g for pt in pts]
        assert gs == sorted(gs)
        for pt in pts:
            assert pt.constraint_residual < 1e-9
            assert pt.energy == pytest.approx(
                qes_energy(P0.replace(g=pt.g), 3, branch))


def test_first_crossing_is_exact():
    # linear constraint => the root is computed in closed form
    assert qes_points(P0, 1, Branch.PLUS)[0].g == 0.2


def test_degenerate_atomic_limit_warns_and_returns_empty():
    p = ModelParams(delta=0.0, epsilon=0.3, omega=1.0)
    with pytest.warns(DegenerateAtomicLimitWarning):
        assert qes_points(p, 3, Branch.PLUS) == []


def test_degree_bounds():
    with pytest.raises(ValueError):
        qes_points(P0, 0, Branch.PLUS)
    with pytest.raises(ValueError):
        qes_points(P0, MAX_DEGREE + 1, Branch.PLUS)


def test_q_sequence_first_crossing_values():
    p = P0.replace(g=0.2)
    q = q_sequence(p, 1, Branch.PLUS, last=1)
    v = q.values / q.values[0]
    assert_allclose(v, [1.0, -0.9], atol=1e-14)


def test_q_sequence_last_truncates():
    p = P0.replace(g=0.2)
    full = q_sequence(p, 3, Branch.PLUS)
    head = q_sequence(p, 3, Branch.PLUS, last=1)
    assert len(head.values) == 2
    assert_allclose(head.values, full.values[:2], rtol=1e-14)


def test_qp_proportionality_random_draws():
    """Q_{n+1} is proportional to the degree-n constraint polynomial."""
    rng = np.random.default_rng(42)
    for _ in range(25):
        n = int(rng.integers(1, 9))
        while True:
            delta = rng.uniform(0.2, 2.0)
            eps = rng.uniform(-0.9, 0.9)
            w = rng.uniform(0.5, 1.5)
            g = rng.uniform(0.05, 1.2)
            # stay away from the recurrence resonances (2*eps/w near integer)
            if abs(2 * eps / w - round(2 * eps / w)) > 0.05:
                break
        p = ModelParams(delta=delta, epsilon=eps, omega=w, g=g)
        for branch in (Branch.PLUS, Branch.MINUS):
            assert qp_proportionality_residual(p, n, branch) < 1e-10
