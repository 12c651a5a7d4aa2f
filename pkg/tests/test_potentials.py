"""Hyperbolic potential families, their coefficients, and companion identities."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from rabipt import (
    Branch,
    EvaluationRangeError,
    ModelParams,
    PotentialForm,
    PotentialKind,
    PotentialSpec,
    SingularPointError,
    canonical_qes_form,
    evaluate_potential,
    full_coefficients,
    full_energy,
    full_potential,
    gaudin_potential,
    gaudin_wavefunction,
    kk_constants,
    partner_component,
    qes_energy,
    qes_points,
    qes_potential,
    qes_wavefunction,
    solve_bethe,
    to_gaudin,
)

P0 = ModelParams(delta=1.2, epsilon=0.3, omega=1.0)
P1 = P0.replace(g=0.2)  # first exceptional coupling, branch +
X = np.linspace(0.4, 5.0, 23)


def test_partial_fraction_and_hyperbolic_forms_agree():
    for branch in (Branch.PLUS, Branch.MINUS):
        a = qes_potential(P1, 2, branch, X, form=PotentialForm.PARTIAL_FRACTION)
        b = qes_potential(P1, 2, branch, X, form=PotentialForm.HYPERBOLIC)
        assert_allclose(a, b, rtol=1e-12)
        E = qes_energy(P1, 2, branch)
        c = full_potential(P1, E, branch, X, form=PotentialForm.HYPERBOLIC)
        assert_allclose(a, c, rtol=1e-12)


def test_form_parse_accepts_hyphen():
    assert PotentialForm.parse("partial-fraction") is PotentialForm.PARTIAL_FRACTION
    assert PotentialForm.parse("hyperbolic") is PotentialForm.HYPERBOLIC


def test_frozen_value_at_unit_abscissa():
    assert qes_potential(P1, 1, Branch.PLUS, 1.0) == pytest.approx(
        5.9776466147574405, abs=1e-13)


def test_qes_is_full_at_the_exceptional_energy():
    for branch in (Branch.PLUS, Branch.MINUS):
        E = qes_energy(P1, 3, branch)
        assert_allclose(qes_potential(P1, 3, branch, X),
                        full_potential(P1, E, branch, X), rtol=1e-13)


def test_origin_is_singular():
    with pytest.raises(SingularPointError):
        qes_potential(P1, 1, Branch.PLUS, 0.0)
    with pytest.raises(SingularPointError):
        full_potential(P1, 0.8, Branch.MINUS, np.array([0.5, 0.0, 1.0]))


def test_overflow_guard():
    with pytest.raises(EvaluationRangeError):
        full_potential(P1, 0.8, Branch.PLUS, 400.0)


def test_coefficient_mirror_under_bias_reversal():
    # V_+(x; eps) = V_-(x; -eps)|cosh -> -cosh: const and sinh^2 invariant,
    # the cosh coefficient flips, the two pole strengths anti-swap
    E = 0.77
    cp = full_coefficients(P1, E, Branch.PLUS)
    cm = full_coefficients(P1.replace(epsilon=-P1.epsilon), E, Branch.MINUS)
    assert cp.const == pytest.approx(cm.const, abs=1e-14)
    assert cp.cosh == pytest.approx(-cm.cosh, abs=1e-14)
    assert cp.sinh2 == pytest.approx(cm.sinh2, abs=1e-14)
    assert cp.pole_minus == pytest.approx(-cm.pole_plus, abs=1e-13)
    assert cp.pole_plus == pytest.approx(-cm.pole_minus, abs=1e-13)


def test_transformed_energy_closed_form():
    # calE = -2*E*g^2/w^3 - 2*g^4/w^4 - delta^2/w^2 + 2*s*g^2*eps/w^3
    E = qes_energy(P1, 1, Branch.PLUS)
    assert full_energy(P1, E, Branch.PLUS) == pytest.approx(-1.52, abs=1e-14)
    gap = full_energy(P1, 0.9, Branch.PLUS) - full_energy(P1, 0.9, Branch.MINUS)
    assert gap == pytest.approx(4 * P1.g ** 2 * P1.epsilon, abs=1e-14)


def test_gaudin_family_reproduces_qes_family_at_solved_points():
    sol = solve_bethe(P1, 1, Branch.PLUS)
    gp = to_gaudin(sol)
    assert_allclose(gaudin_potential(gp, X),
                    qes_potential(P1, 1, Branch.PLUS, X), atol=1e-12)
    assert_allclose(gaudin_wavefunction(gp, X),
                    qes_wavefunction(P1, 1, Branch.PLUS, gp.v, X), rtol=1e-12)


def test_qes_wavefunction_closed_form_first_crossing():
    k, e = 0.04, 0.3
    ch = np.cosh(X)
    hand = (np.exp(-k * ch) * (ch - 1) ** (-(2 + 1 + 4 * e) / 4)
            * (ch + 1) ** (-(2 - 1) / 4) * (0.2 * ch + 3.8))
    got = qes_wavefunction(P1, 1, Branch.PLUS, np.array([3.8]), X)
    assert_allclose(got, hand, rtol=1e-12)


def test_spec_field_discipline():
    PotentialSpec(kind=PotentialKind.QES, params=P1, branch=Branch.PLUS, n=1)
    with pytest.raises(ValueError, match="requires"):
        PotentialSpec(kind=PotentialKind.QES, params=P1, branch=Branch.PLUS)
    with pytest.raises(ValueError, match="forbids"):
        PotentialSpec(kind=PotentialKind.QES, params=P1, branch=Branch.PLUS,
                      n=1, energy=0.5)
    with pytest.raises(ValueError, match="requires"):
        PotentialSpec(kind=PotentialKind.GAUDIN)


def test_evaluate_potential_dispatch():
    spec = PotentialSpec(kind=PotentialKind.QES, params=P1,
                         branch=Branch.PLUS, n=1)
    assert_allclose(evaluate_potential(spec, X),
                    qes_potential(P1, 1, Branch.PLUS, X), rtol=1e-14)
    spec = PotentialSpec(kind=PotentialKind.FULL, params=P1,
                         branch=Branch.MINUS, energy=0.66)
    assert_allclose(evaluate_potential(spec, X),
                    full_potential(P1, 0.66, Branch.MINUS, X), rtol=1e-14)
    gp = to_gaudin(solve_bethe(P1, 1, Branch.PLUS))
    spec = PotentialSpec(kind=PotentialKind.GAUDIN, gaudin=gp)
    assert_allclose(evaluate_potential(spec, X),
                    gaudin_potential(gp, X), rtol=1e-14)


def test_canonical_first_order_data():
    g2 = qes_points(P0, 2, Branch.PLUS)[0].g
    p = P0.replace(g=g2)
    cf = canonical_qes_form(p, 2, Branch.PLUS)
    assert_allclose(cf.p_coeffs, (-p.g ** 2, 0.0, 1.0), rtol=1e-14)
    assert cf.q_coeffs[1] == pytest.approx(-(2 + 2 * 0.3))
    assert cf.q_coeffs[2] == pytest.approx(-2 * p.g)
    r_expect = 4 / 3 + 2 / 6 + 2 * 0.3 - 4 * p.g ** 2 - 1.44
    assert cf.r == pytest.approx(r_expect, abs=1e-12)
    with pytest.raises(ValueError, match="inconsistent"):
        canonical_qes_form(p, 2, Branch.PLUS,
                           energy=qes_energy(p, 2, Branch.PLUS) + 1e-3)


def test_confluent_reduction_constants():
    kk = kk_constants(P1, 0.9)
    assert kk.q == pytest.approx(-4 * P1.g ** 2, abs=1e-14)  # A = 1
    assert kk.L == pytest.approx(-kk.two_j - 0.5, abs=1e-14)
    assert kk.two_j == pytest.approx(0.9 + 0.04 - 0.3, abs=1e-14)
    assert kk.B == pytest.approx(-1 - 0.16 + 0.6, abs=1e-14)
    lam_expect = 0.81 - 2 * 0.9 * 0.04 + 4 * 0.04 * 0.3 - 3 * 0.0016 - 1.44 - 0.09
    assert kk.lam == pytest.approx(lam_expect, abs=1e-13)
    half = kk_constants(P1, 0.9, A=2.0)
    assert half.q == pytest.approx(kk.q / 4.0, abs=1e-14)


def test_partner_component_derivative_paths_agree():
    sol = solve_bethe(P1, 1, Branch.PLUS)
    poly = np.polynomial.Polynomial.fromroots(sol.roots.real)
    z = np.linspace(-1.0, 1.0, 11)
    via_poly = partner_component(P1, 1.26, Branch.PLUS, poly, z)
    via_step = partner_component(P1, 1.26, Branch.PLUS,
                                 lambda t: poly(t), z)
    assert_allclose(via_poly, via_step, rtol=1e-9)
    with pytest.raises(ValueError, match="Delta"):
        partner_component(P1.replace(delta=0.0), 1.26, Branch.PLUS, poly, z)
