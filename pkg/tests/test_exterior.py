from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equiforms.coeff import DomainError, ScalarExpr
from equiforms.exterior import (
    BiForm,
    XPoly,
    berezin,
    contract_dx,
    contract_e,
    epsilon_sign,
    exterior_d,
    indices,
    mask,
    pfaffian,
    so_generator,
    super_exp_nilpotent,
)
from equiforms.numeval import eval_xpoly
from equiforms.verify import det_oracle, pfaffian_minor_oracle

DIM = 3


def perm_parity(seq) -> int:
    """Sign of the permutation sorting ``seq``, by counting inversions."""
    inv = sum(1 for a, b in combinations(seq, 2) if a > b)
    return -1 if inv % 2 else 1


def oracle_product(dim, a: dict, b: dict) -> dict:
    """Product in one exterior algebra with generators dx_k -> k, e_k -> dim + k.

    Forms are dicts {(I, J): int}; the sign comes from sorting the concatenated word."""
    out: dict = {}
    for (I1, J1), c1 in a.items():
        for (I2, J2), c2 in b.items():
            w = list(indices(I1)) + [dim + j for j in indices(J1)] + list(indices(I2)) + [dim + j for j in indices(J2)]
            if len(set(w)) < len(w):
                continue
            key = (I1 | I2, J1 | J2)
            out[key] = out.get(key, 0) + perm_parity(w) * c1 * c2
    return {k: v for k, v in out.items() if v}


def to_biform(dim, d: dict) -> BiForm:
    return BiForm(dim, {k: XPoly.scalar(dim, v) for k, v in d.items()})


def from_biform(a: BiForm) -> dict:
    out = {}
    for (I, J), p in a.terms.items():
        s = p.scalar_part()
        out[(I, J)] = int(s.constant_value().rational())
    return out


masks = st.integers(0, (1 << DIM) - 1)
int_forms = st.dictionaries(st.tuples(masks, masks), st.integers(-3, 3), max_size=5)


@settings(max_examples=150, deadline=None)
@given(int_forms, int_forms)
def test_product_matches_permutation_oracle(a, b):
    a = {k: v for k, v in a.items() if v}
    b = {k: v for k, v in b.items() if v}
    assert from_biform(to_biform(DIM, a) * to_biform(DIM, b)) == oracle_product(DIM, a, b)


@settings(max_examples=80, deadline=None)
@given(int_forms, int_forms, int_forms)
def test_product_is_associative(a, b, c):
    A, B, C = (to_biform(DIM, f) for f in (a, b, c))
    assert (A * B) * C == A * (B * C)


@settings(max_examples=80, deadline=None)
@given(masks, masks, masks, masks)
def test_graded_commutativity(I1, J1, I2, J2):
    a = BiForm(DIM, {(I1, J1): XPoly.scalar(DIM, 1)})
    b = BiForm(DIM, {(I2, J2): XPoly.scalar(DIM, 1)})
    p = bin(I1).count("1") + bin(J1).count("1")
    q = bin(I2).count("1") + bin(J2).count("1")
    assert a * b == b * a * (-1) ** (p * q)


def test_epsilon_sign_against_permutations():
    n = 5
    for size_a in range(n + 1):
        for A in combinations(range(1, n + 1), size_a):
            rest = [k for k in range(1, n + 1) if k not in A]
            for size_b in range(len(rest) + 1):
                for B in combinations(rest, size_b):
                    assert epsilon_sign(A, B) == perm_parity(list(A) + list(B))
                    assert epsilon_sign(mask(A), mask(B)) == epsilon_sign(A, B)
    with pytest.raises(DomainError):
        epsilon_sign((1, 2), (2,))


def test_generators_in_given_order():
    d = 3
    assert BiForm.dx(d, 2, 1) == -BiForm.dx(d, 1, 2)
    assert BiForm.e(d, 3, 1, 2) == BiForm.e(d, 1, 2, 3)
    # dx is to the left of e in the stored monomial
    assert BiForm.e(d, 1) * BiForm.dx(d, 2) == -BiForm.monomial(d, (2,), (1,))


@st.composite
def poly_forms(draw, dim=2):
    """Random forms with polynomial-in-x coefficients (x-degree at most 2)."""
    out = BiForm(dim)
    for _ in range(draw(st.integers(1, 3))):
        I = draw(st.integers(0, (1 << dim) - 1))
        J = draw(st.integers(0, (1 << dim) - 1))
        xe = tuple(draw(st.integers(0, 2)) for _ in range(dim))
        c = ScalarExpr.mono(dim, draw(st.integers(-3, 3)), x=xe)
        out = out + BiForm(dim, {(I, J): XPoly.scalar(dim, c)})
    return out


@settings(max_examples=60, deadline=None)
@given(poly_forms(), poly_forms())
def test_d_squared_zero_and_leibniz(a, b):
    assert exterior_d(exterior_d(a)) == BiForm(2)
    # d is an odd derivation for the total degree
    lhs = exterior_d(a * b)
    rhs = exterior_d(a) * b + a.graded_parity() * exterior_d(b)
    assert lhs == rhs


@settings(max_examples=60, deadline=None)
@given(poly_forms(), poly_forms(), st.integers(1, 2))
def test_contractions_are_odd_derivations(a, b, k):
    v = [0, 0]
    v[k - 1] = 1
    for iota in (contract_e, contract_dx):
        assert iota(v, a * b) == iota(v, a) * b + a.graded_parity() * iota(v, b)
        assert iota(v, iota(v, a)) == BiForm(2)


def test_berezin_picks_top_e_component():
    d = 2
    a = BiForm.monomial(d, (1,), (1, 2), 5) + BiForm.monomial(d, (), (1,), 7)
    assert berezin(a) == BiForm.dx(d, 1, coeff=5)


@pytest.mark.parametrize("d", [2, 4, 6])
def test_pfaffian_squared_is_det_numerically(d):
    rng = np.random.default_rng(d)
    A = rng.normal(size=(d, d))
    X = A - A.T
    pf = complex(eval_xpoly(pfaffian(d), np.zeros((1, d)), X)[0])
    assert pf.real ** 2 == pytest.approx(np.linalg.det(X), rel=1e-12)
    assert abs(pf.imag) < 1e-14


@pytest.mark.parametrize("d", [2, 4])
def test_pfaffian_symbolic_oracles(d):
    pf = pfaffian(d)
    assert pf == pfaffian_minor_oracle(d, tuple(range(1, d + 1)))
    assert pf * pf == det_oracle(d)


def test_pfaffian_small_values():
    assert pfaffian(2) == XPoly.var(2, 1, 2)
    x = lambda k, l: XPoly.var(4, k, l)
    assert pfaffian(4) == x(1, 2) * x(3, 4) - x(1, 3) * x(2, 4) + x(1, 4) * x(2, 3)
    assert pfaffian(3) == XPoly(3)


def test_super_exp_of_nilpotent_generator():
    d = 2
    gen = so_generator(d)
    # (X12 e1 e2)^2 = 0 so the exponential truncates after the linear term
    assert super_exp_nilpotent(gen) == BiForm.scalar(d, 1) + gen
    # a Gaussian scalar part factors out
    a = gen + BiForm.scalar(d, ScalarExpr.r(d, 2) * -1)
    assert super_exp_nilpotent(a) == (BiForm.scalar(d, 1) + gen) * ScalarExpr.gaussian(d, (1,))
    with pytest.raises(DomainError):
        super_exp_nilpotent(BiForm.scalar(d, ScalarExpr.x(d, 1)))


def test_xpoly_antisymmetry():
    assert XPoly.var(3, 2, 1) == -XPoly.var(3, 1, 2)
    assert XPoly.var(3, 2, 2).is_zero()
    assert XPoly.var(3, 1, 2) * Fraction(1, 2) * 2 == XPoly.var(3, 1, 2)


def test_sign_cocycle_is_exhaustively_associative():
    # eps(I, J) eps(I u J, K) = eps(J, K) eps(I, J u K) for disjoint I, J, K in {1..6}
    n = 6
    # label each index: 0 -> I, 1 -> J, 2 -> K, 3 -> unused
    for labels in range(4**n):
        I = J = K = 0
        code = labels
        for k in range(n):
            code, part = divmod(code, 4)
            bit = 1 << k
            if part == 0:
                I |= bit
            elif part == 1:
                J |= bit
            elif part == 2:
                K |= bit
        assert epsilon_sign(I, J) * epsilon_sign(I | J, K) == epsilon_sign(J, K) * epsilon_sign(I, J | K)
