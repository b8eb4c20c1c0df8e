from fractions import Fraction
from math import pi

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equiforms.coeff import DomainError, ScalarExpr
from equiforms.equivariant import d_rel, equivariant_d
from equiforms.exterior import BiForm, XPoly, exterior_d
from equiforms.numeval import eval_form, fd_exterior_derivative_check, integrate_numeric, numeric_contract_vx
from equiforms.thom import (
    beta_explicit,
    beta_wedge,
    build_thom,
    euler_form,
    restrict_to_origin,
    thom_retarded_transgression,
)


def antisym(rng, d):
    A = rng.normal(size=(d, d))
    return A - A.T


def test_gaussian_thom_form_in_dimension_two():
    # Berezin(exp(-r^2 + dx1 e1 + dx2 e2 + a/2 e1 e2)) = e^{-r^2}(a/2 - dx1 dx2), divided by -pi
    a = 0.8
    X = np.array([[0, a], [-a, 0]])
    th = build_thom(2, "mq").payload
    at0 = eval_form(th, np.zeros((1, 2)), X)[0]
    assert np.allclose(at0, [-a / (2 * pi), 0, 0, 1 / pi], atol=1e-15)
    x = np.array([[0.3, -0.4]])
    g = np.exp(-0.25)
    assert np.allclose(eval_form(th, x, X)[0], g * at0, atol=1e-15)


def test_transgression_form_in_dimension_two():
    # eta^t = t e^{-t^2 r^2}(x1 dx2 - x2 dx1), so beta = (x1 dx2 - x2 dx1)/(2 r^2)
    d = 2
    x1, x2, r = ScalarExpr.x(d, 1), ScalarExpr.x(d, 2), ScalarExpr.r(d, -2)
    expected = (BiForm.dx(d, 2, coeff=x1) - BiForm.dx(d, 1, coeff=x2)) * (r * Fraction(1, 2))
    assert beta_wedge(d) == expected
    assert np.allclose(eval_form(beta_wedge(d), np.array([[1.0, 0.0]]))[0], [0, 0, 0.5, 0])


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_closed_formula_for_beta(d):
    assert beta_explicit(d) == beta_wedge(d)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_D_beta_is_euler_form(d):
    assert equivariant_d(beta_wedge(d)) == BiForm.scalar(d, euler_form(d))


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("flavor", ["mq", "c"])
def test_thom_forms_are_closed(d, flavor):
    assert equivariant_d(build_thom(d, flavor).payload).is_zero()


@pytest.mark.parametrize("d", [1, 2, 3])
def test_relative_thom_is_closed(d):
    assert d_rel(build_thom(d, "rel").payload).is_zero()


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_numeric_closedness_of_gaussian_thom(seed):
    # symbolic d against the numeric contraction with VX at a random point
    rng = np.random.default_rng(seed)
    d = 3
    X = antisym(rng, d)
    x = rng.normal(size=d)
    th = build_thom(d, "mq").payload
    dth = eval_form(exterior_d(th), x[None], X)[0]
    ith = numeric_contract_vx(d, eval_form(th, x[None], X)[0], x, X)
    assert np.abs(dth - ith).max() < 1e-12


@pytest.mark.parametrize("d", [2, 3])
def test_exterior_d_matches_finite_differences(d):
    rng = np.random.default_rng(d)
    X = antisym(rng, d)
    for _ in range(3):
        x = rng.normal(size=d)
        assert fd_exterior_derivative_check(build_thom(d, "mq").payload, x, X) < 1e-8
        assert fd_exterior_derivative_check(beta_wedge(d), x, X) < 1e-7


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_integral_is_one(d):
    rng = np.random.default_rng(10 + d)
    X = antisym(rng, d) * 0.5
    assert integrate_numeric(build_thom(d, "mq").payload, X=X) == pytest.approx(1.0, abs=1e-10)


def test_restriction_to_origin():
    # Th_mq(0) = Pf(X/2)/eps_2 = -X12/(2 pi) in dimension two
    r = restrict_to_origin(build_thom(2, "mq").payload)
    assert np.isclose(complex(r.terms[(1,)].constant_value()), -1 / (2 * pi))
    r = restrict_to_origin(build_thom(2, "c").payload)
    assert np.isclose(complex(r.terms[(1,)].constant_value()), -1 / (2 * pi))
    assert restrict_to_origin(build_thom(3, "c").payload).is_zero()
    with pytest.raises(DomainError):
        restrict_to_origin(BiForm.scalar(2, ScalarExpr.r(2, -2)))


@pytest.mark.parametrize("d", [1, 2, 3])
def test_retarded_transgressions(d):
    for row in thom_retarded_transgression(d, Fraction(3, 2)):
        assert row["zero"], row["check"]
    with pytest.raises(DomainError):
        thom_retarded_transgression(d, 0)


def test_bad_arguments():
    with pytest.raises(DomainError):
        build_thom(0, "mq")
    with pytest.raises(DomainError):
        build_thom(2, "gauss")


def test_euler_form_values():
    assert euler_form(2) == XPoly.var(2, 1, 2) * Fraction(1, 2)
    assert euler_form(3).is_zero()


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_thom_forms_have_pure_degree(d):
    assert build_thom(d, "mq").payload.homogeneous_degree() == d
    rel = build_thom(d, "rel").payload
    assert rel.degree() == d
    assert beta_wedge(d).homogeneous_degree() == d - 1


@pytest.mark.parametrize("d", [2, 4])
@pytest.mark.parametrize("flavor", ["mq", "c"])
def test_restriction_is_euler_over_epsilon(d, flavor):
    th = build_thom(d, flavor)
    assert restrict_to_origin(th.payload) == euler_form(d) * th.epsilon.inverse()
