"""Parametrix symbol calculus: recursion, homogeneity, contour integrals."""

import math
from fractions import Fraction

import pytest
import sympy as sp

from detglue.errors import DomainError
from detglue.symbols import (J0_closed_form, J_k_value, OperatorSymbolData,
                             check_homogeneity, circle_operator_symbols,
                             constant_coefficient_closure, lam,
                             parametrix_terms, pi0_symbolic,
                             rotated_control_symbols, x, xi)

TAUS = (2, Fraction(3, 2), 5)


def test_leading_parametrix_term():
    op = circle_operator_symbols(1.0)
    rs = parametrix_terms(op, 0)
    assert rs[0].terms == {1: sp.Integer(1)}


def test_r_minus3_vanishes_without_subleading_symbol():
    # p_1 = 0 forces the grading-1 term to vanish identically
    op = circle_operator_symbols(1.0)
    rs = parametrix_terms(op, 1)
    assert rs[1].is_zero()


def test_grading2_term_of_constant_potential():
    # p_0 = q constant: r_{-4} = -q (mu - p_2)^{-2}
    q = sp.Symbol("q")
    op = OperatorSymbolData(2, 2, 1, {2: xi ** 2 + lam, 0: sp.Rational(1)})
    rs = parametrix_terms(op, 2)
    assert sp.expand(rs[2].terms[2] - (-1)) == 0


def test_homogeneity_exact_all_gradings():
    for op in (circle_operator_symbols(1.0), rotated_control_symbols(1.3),
               OperatorSymbolData(2, 2, 1, {2: xi ** 2 + lam,
                                            0: 1 + sp.cos(x)})):
        rs = parametrix_terms(op, 4)
        for r in rs:
            for tau in TAUS:
                assert check_homogeneity(r, tau)


def test_constant_coefficient_closure_exact():
    assert constant_coefficient_closure(circle_operator_symbols(1.0), 4)
    assert constant_coefficient_closure(rotated_control_symbols(1.0), 4)


def test_closure_rejects_x_dependence():
    op = OperatorSymbolData(2, 2, 1, {2: xi ** 2 + lam, 0: 1 + sp.cos(x)})
    with pytest.raises(DomainError):
        constant_coefficient_closure(op, 2)


def test_pole_order_structure():
    # every term of r_{-m-k} has pole order >= 2 for k >= 1; with a single
    # order-drop (only p_{m-1} present) the stronger bound l >= k+1 holds
    op = rotated_control_symbols(1.0)
    for k, r in enumerate(parametrix_terms(op, 4)):
        if not r.is_zero():
            assert r.min_pole_order() >= k + 1
    pot = circle_operator_symbols(1.0)
    for k, r in enumerate(parametrix_terms(pot, 4)):
        if not r.is_zero() and k >= 1:
            assert r.min_pole_order() >= 2


def test_complexity_guard():
    with pytest.raises(DomainError):
        parametrix_terms(circle_operator_symbols(1.0), 7)


def test_J_k_vanishes_at_zero_for_k_above_dimension():
    op = circle_operator_symbols(1.0)
    for k in (2, 3, 4):
        v, err = J_k_value(op, k, 0.0)
        assert abs(v) <= max(err, 1e-6)


def test_J_k_convergence_region_guard():
    op = circle_operator_symbols(1.0)
    with pytest.raises(DomainError):
        J_k_value(op, 0, 0.2)  # needs Re s > 1/2


def test_J0_closed_form_values_and_poles():
    op = circle_operator_symbols(1.0)
    assert J0_closed_form(op, 2.0).value == pytest.approx(math.pi / 2)
    assert J0_closed_form(op, 1.0).value == pytest.approx(math.pi)
    pole = J0_closed_form(op, 0.5)
    assert pole.is_pole and pole.value is None
    # quadrature route agrees where both converge
    v, err = J_k_value(op, 0, 2.0)
    assert v.real == pytest.approx(math.pi / 2, abs=1e-10)


def test_pi0_model_operator_vanishes():
    rep = pi0_symbolic(circle_operator_symbols(1.0), volume=2.0)
    assert abs(rep.value) <= rep.error_estimate


def test_pi0_negative_control_dual_route():
    # symbol route for logDet(A + lambda + b sqrt(lambda)): pi_0 = Vol b / 2
    L, b = 2.0, 1.5
    rep = pi0_symbolic(rotated_control_symbols(b), volume=L)
    assert rep.value == pytest.approx(L * b / 2, abs=1e-8)
