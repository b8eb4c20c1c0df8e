from fractions import Fraction
from math import gamma, pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equiforms.coeff import ConstantScalar, DomainError, IntegrationError, ScalarExpr, gamma_half, rational_sqrt
from equiforms.numeval import eval_scalar
from equiforms.thom import epsilon_d

DIM = 3

small = st.integers(-3, 3)


@st.composite
def scalars(draw, dim=DIM):
    """Random exact scalars built from x, r^{+-k}, t, theta and a Gaussian."""
    out = ScalarExpr.zero(dim)
    for _ in range(draw(st.integers(0, 3))):
        c = ConstantScalar.of(Fraction(draw(small), draw(st.integers(1, 3))))
        if draw(st.booleans()):
            c = c + ConstantScalar.i() * draw(small)
        x = tuple(draw(st.integers(0, 2)) for _ in range(dim))
        term = ScalarExpr.mono(dim, c, x=x, r=draw(st.integers(-3, 3)), t=draw(st.integers(0, 2)))
        if draw(st.booleans()):
            term = term * ScalarExpr.gaussian(dim, (1,))
        if draw(st.booleans()):
            term = term * ScalarExpr.etheta(dim, draw(st.integers(0, 2)))
        out = out + term
    return out


@settings(max_examples=60, deadline=None)
@given(scalars(), scalars(), scalars())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == ScalarExpr.zero(DIM)


@settings(max_examples=40, deadline=None)
@given(scalars(), scalars())
def test_evaluation_is_a_ring_homomorphism(a, b):
    rng = np.random.default_rng(0)
    x = rng.normal(size=(4, DIM))
    kw = dict(t=0.7, theta=0.3)
    assert np.allclose(eval_scalar(a * b, x, **kw), eval_scalar(a, x, **kw) * eval_scalar(b, x, **kw))
    assert np.allclose(eval_scalar(a + b, x, **kw), eval_scalar(a, x, **kw) + eval_scalar(b, x, **kw))


@settings(max_examples=40, deadline=None)
@given(scalars(), st.integers(1, DIM))
def test_partial_matches_finite_differences(a, i):
    x = np.array([[0.8, -0.6, 0.5]])
    h = 1e-6
    e = np.zeros(DIM)
    e[i - 1] = h
    kw = dict(t=0.7, theta=0.3)
    fd = (eval_scalar(a, x + e, **kw) - eval_scalar(a, x - e, **kw)) / (2 * h)
    assert np.allclose(eval_scalar(a.partial(i), x, **kw), fd, atol=1e-5 * (1 + abs(fd).max()))


def test_canonical_form_is_unique():
    d = 2
    x1, x2 = ScalarExpr.x(d, 1), ScalarExpr.x(d, 2)
    assert x1 * x1 + x2 * x2 == ScalarExpr.r(d, 2)
    assert (x1 * x1 + x2 * x2) * ScalarExpr.r(d, -2) == ScalarExpr.const(d, 1)
    # 1 + x1^2 r^-2 has one representation whichever way it is built
    a = 1 + x1 * x1 * ScalarExpr.r(d, -2)
    b = 2 - x2 * x2 * ScalarExpr.r(d, -2)
    assert a == b
    assert ScalarExpr.r(d, 3) == (x1 * x1 + x2 * x2) * ScalarExpr.r(d, 1)


def test_epsilon_values():
    assert epsilon_d(1) == ConstantScalar.pi_half(1)
    assert epsilon_d(2) == ConstantScalar.pi_half(2) * -1
    assert epsilon_d(3) == ConstantScalar.pi_half(3) * -1
    assert epsilon_d(4) == ConstantScalar.pi_half(4)
    for d in range(1, 7):
        assert complex(epsilon_d(d)) == pytest.approx((-1) ** (d * (d - 1) // 2) * pi ** (d / 2))


@pytest.mark.parametrize("m", range(1, 12))
def test_gamma_half(m):
    assert complex(gamma_half(m)).real == pytest.approx(gamma(m / 2), rel=1e-14)


def test_rational_sqrt():
    assert rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert rational_sqrt(Fraction(2)) is None


def test_constants():
    i = ConstantScalar.i()
    assert i * i == ConstantScalar.of(-1)
    assert ConstantScalar.pi_half(1) * ConstantScalar.pi_half(1) == ConstantScalar.pi_half(2)
    c = i * ConstantScalar.pi_half(-3) * Fraction(2, 5)
    assert c * c.inverse() == ConstantScalar.of(1)
    with pytest.raises(DomainError):
        (ConstantScalar.of(3) + i).inverse()
    assert complex(ConstantScalar.pi_half(3)) == pytest.approx(pi * sqrt(pi))


def test_t_integral_of_gaussian_moments():
    d = 2
    g = ScalarExpr.gaussian(d, (0, 0, 1))
    # int_0^inf t e^{-t^2 r^2} dt = 1/(2 r^2)
    assert (ScalarExpr.t(d) * g).t_integrate() == ScalarExpr.r(d, -2) * Fraction(1, 2)
    # int_0^inf e^{-t^2 r^2} dt = sqrt(pi)/(2 r)
    assert g.t_integrate() == ScalarExpr.r(d, -1) * (ConstantScalar.pi_half(1) * Fraction(1, 2))


def test_t_integral_requires_decay():
    with pytest.raises(IntegrationError):
        ScalarExpr.t(2).t_integrate()


def test_subs_and_derivative_in_t():
    d = 1
    s = ScalarExpr.t(d, 2) * ScalarExpr.gaussian(d, (0, 0, 1))
    assert s.subs_t(0) == ScalarExpr.zero(d)
    assert s.subs_t(1) == ScalarExpr.gaussian(d, (1,))
    x = np.array([[0.7]])
    h = 1e-6
    fd = (eval_scalar(s, x, t=0.5 + h) - eval_scalar(s, x, t=0.5 - h)) / (2 * h)
    assert np.allclose(eval_scalar(s.partial_t(), x, t=0.5), fd, atol=1e-8)


@settings(max_examples=60, deadline=None)
@given(scalars())
def test_normalization_is_idempotent(a):
    again = ScalarExpr(DIM, dict(a.terms))
    assert again == a and again.terms == a.terms


@settings(max_examples=100, deadline=None)
@given(scalars(), st.integers(1, DIM), st.integers(1, DIM))
def test_partials_commute(a, i, j):
    assert a.partial(i).partial(j) == a.partial(j).partial(i)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_t_integral_of_derivative_telescopes(k):
    d = 2
    profile = ScalarExpr.t(d, k) * ScalarExpr.gaussian(d, (0, 0, 1))
    # int_0^inf d/dt[profile] dt = -profile(0)
    assert profile.partial_t().t_integrate() == -profile.subs_t(0)
