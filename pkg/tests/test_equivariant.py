from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equiforms.coeff import ConstantScalar, DomainError, IntegrationError, ScalarExpr
from equiforms.equivariant import (
    PartitionData,
    RelativePair,
    TriplePartition,
    contract_vx,
    d_rel,
    equivariant_d,
    excision,
    integrate_over_V,
    invariant_generators,
    lie_derivative,
    p_chi,
    rel_product,
    triple_product,
    vector_field,
)
from equiforms.exterior import BiForm, XPoly
from equiforms.verify import sample_pairs


@st.composite
def forms(draw, dim):
    out = BiForm(dim)
    for _ in range(draw(st.integers(1, 3))):
        I = draw(st.integers(0, (1 << dim) - 1))
        J = draw(st.integers(0, (1 << dim) - 1))
        xe = tuple(draw(st.integers(0, 2)) for _ in range(dim))
        c = ScalarExpr.mono(dim, draw(st.integers(-3, 3)), x=xe, r=draw(st.sampled_from([0, 2, -2])))
        out = out + BiForm(dim, {(I, J): XPoly.scalar(dim, c)})
    return out


@settings(max_examples=40, deadline=None)
@given(st.data(), st.sampled_from([2, 3]))
def test_D_squared_is_minus_lie_derivative(data, dim):
    a = data.draw(forms(dim))
    assert equivariant_d(equivariant_d(a)) == -lie_derivative(a)


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_invariant_generators_are_killed_by_L(dim):
    for name, g in invariant_generators(dim).items():
        assert lie_derivative(g).is_zero(), name
    assert not lie_derivative(BiForm.scalar(dim, ScalarExpr.x(dim, 1))).is_zero()


def test_vector_field_in_dimension_two():
    X12 = XPoly.var(2, 1, 2)
    v = vector_field(2)
    assert v[0] == X12 * ScalarExpr.x(2, 2)
    assert v[1] == -X12 * ScalarExpr.x(2, 1)
    # iota(VX) of sum x dx vanishes: the flow preserves r
    w = invariant_generators(2)["w"]
    assert contract_vx(w).is_zero()


def test_D_of_position_one_form():
    d = 2
    w = invariant_generators(d)["w"]
    # D(sum x dx) = -iota(VX)(sum x dx) + d(sum x dx) = 0
    assert equivariant_d(w).is_zero()
    # D(r^2) = 2 w
    assert equivariant_d(BiForm.scalar(d, ScalarExpr.r(d, 2))) == w * 2


@pytest.mark.parametrize("name", ["thom", "odd", "even"])
def test_sample_pairs_are_closed(name):
    p = sample_pairs(2)[name]
    assert d_rel(p).is_zero()


def test_d_rel_squared_on_generic_pair():
    p = sample_pairs(2)["generic"]
    q = d_rel(d_rel(p))
    assert q.alpha == -lie_derivative(p.alpha)
    assert q.beta == -lie_derivative(p.beta)


@pytest.mark.parametrize("first,second", [("generic", "odd"), ("odd", "generic"), ("generic", "generic"), ("thom", "generic")])
def test_relative_product_leibniz(first, second):
    P = sample_pairs(2)
    phi = PartitionData.formal(2)
    a, b = P[first], P[second]
    lhs = d_rel(rel_product(a, b, phi))
    rhs = rel_product(d_rel(a), b, phi) + rel_product(a.parity(), d_rel(b), phi)
    assert (lhs - rhs).is_zero()


def test_relative_product_unit():
    d = 2
    one = RelativePair(BiForm.scalar(d, 1), BiForm(d))
    phi = PartitionData.formal(d)
    p = sample_pairs(d)["generic"]
    assert rel_product(one, p, phi) == RelativePair(p.alpha, p.beta * phi.phi2)
    assert rel_product(p, one, phi) == RelativePair(p.alpha, p.beta * phi.phi1)


def test_triple_partition_validation():
    d = 2
    data = TriplePartition.nested(PartitionData.formal(d, "phi"), PartitionData.formal(d, "psi"))
    data.validate()
    bad = TriplePartition(data.phi, (data.lam[1], data.lam[0], data.lam[2]), data.theta)
    with pytest.raises(DomainError):
        bad.validate()
    P = sample_pairs(d)
    out = triple_product(P["odd"], P["thom"], P["even"], data)
    assert d_rel(out).is_zero()


def test_p_chi_requires_cutoff_to_cancel_singularity():
    d = 2
    f = ScalarExpr.radial(d, "f", 0)
    p = RelativePair(BiForm(d), BiForm.scalar(d, ScalarExpr.r(d, -2)))
    # the only surviving r^-2 term carries f', which vanishes near the origin
    out = p_chi(p, f)
    assert not out.is_zero()
    singular = RelativePair(BiForm.scalar(d, ScalarExpr.r(d, -2)), BiForm(d))
    with pytest.raises(DomainError):
        p_chi(singular, ScalarExpr.const(d, 1))


def test_excision_commutes_with_d_rel():
    d = 2
    chi = ScalarExpr.radial(d, "f", 0)
    p = sample_pairs(d)["generic"]
    assert excision(d_rel(p), chi) == d_rel(excision(p, chi))


def test_integrate_over_V_gaussian_moments():
    d = 2
    g = ScalarExpr.gaussian(d, (1,))
    top = BiForm.dx(d, 1, 2, coeff=g)
    pi = XPoly.scalar(d, ScalarExpr.const(d, ConstantScalar.pi_half(2)))
    assert integrate_over_V(top) == pi
    second = BiForm.dx(d, 1, 2, coeff=g * ScalarExpr.x(d, 1) ** 2)
    assert integrate_over_V(second) == pi * Fraction(1, 2)
    odd = BiForm.dx(d, 1, 2, coeff=g * ScalarExpr.x(d, 1))
    assert integrate_over_V(odd).is_zero()
    with pytest.raises(IntegrationError):
        integrate_over_V(BiForm.dx(d, 1, 2, coeff=ScalarExpr.r(d, -2)))


@settings(max_examples=60, deadline=None)
@given(st.data(), st.sampled_from([2, 3, 4]))
def test_contraction_squares_to_zero(data, dim):
    a = data.draw(forms(dim))
    assert contract_vx(contract_vx(a)).is_zero()


@st.composite
def pairs(draw, dim=2, degree=None):
    """Random pairs; with ``degree`` set, alpha and beta are homogeneous of degree p and p - 1."""
    out = []
    for shift in (0, 1):
        f = BiForm(dim)
        for _ in range(draw(st.integers(0, 2))):
            I = draw(st.integers(0, (1 << dim) - 1))
            J = draw(st.integers(0, (1 << dim) - 1))
            if degree is not None and bin(I).count("1") + bin(J).count("1") != degree - shift:
                continue
            xe = tuple(draw(st.integers(0, 2)) for _ in range(dim))
            # alpha must be smooth; beta may be singular at the origin
            r = draw(st.sampled_from([0, 2] if shift == 0 else [0, -2, -1]))
            c = ScalarExpr.mono(dim, draw(st.integers(-3, 3)), x=xe, r=r)
            f = f + BiForm(dim, {(I, J): XPoly.scalar(dim, c)})
        out.append(f)
    return RelativePair(*out)


@settings(max_examples=200, deadline=None)
@given(pairs())
def test_p_chi_intertwines_differentials(p):
    chi = ScalarExpr.radial(2, "f", 0)
    assert p_chi(d_rel(p), chi) == equivariant_d(p_chi(p, chi))


@settings(max_examples=60, deadline=None)
@given(st.data(), st.integers(1, 3), st.integers(1, 3))
def test_relative_product_graded_commutativity(data, p, q):
    d = 3
    a = data.draw(pairs(d, p))
    b = data.draw(pairs(d, q))
    phi = PartitionData.formal(d)
    sign = -1 if p * q % 2 else 1
    assert rel_product(a, b, phi) == rel_product(b, a, phi.swapped()).scale(sign)
