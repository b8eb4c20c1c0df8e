"""Gaussian, relative and compactly supported Thom forms of an oriented Euclidean space."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Any

from .coeff import ConstantScalar, DomainError, ScalarExpr, gamma_half
from .equivariant import RelativePair, d_rel, d_scalar, equivariant_d, p_chi
from .exterior import (
    BiForm,
    XPoly,
    berezin,
    contract_e,
    d_dt,
    epsilon_sign,
    half_matrix,
    pfaffian,
    subs_t,
    super_exp_nilpotent,
    t_integrate_form,
)

FLAVORS = ("rel", "c", "mq")


def _check_dim(d: int) -> None:
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")


def epsilon_d(d: int) -> ConstantScalar:
    """(-1)^{d(d-1)/2} pi^{d/2}."""
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return ConstantScalar.pi_half(d) * sign


def position_e(d: int) -> BiForm:
    """sum_k x_k e_k."""
    out = BiForm(d)
    for k in range(1, d + 1):
        out = out + BiForm.e(d, k, coeff=ScalarExpr.x(d, k))
    return out


@lru_cache(maxsize=None)
def build_f_t(d: int) -> BiForm:
    """-t^2 r^2 + t sum dx_k e_k + 1/2 sum_{k<l} X_kl e_k e_l."""
    _check_dim(d)
    t = ScalarExpr.t(d)
    out = BiForm.scalar(d, ScalarExpr.r(d, 2) * ScalarExpr.t(d, 2) * -1)
    for k in range(1, d + 1):
        out = out + BiForm.monomial(d, (k,), (k,), t)
    for k, l in combinations(range(1, d + 1), 2):
        out = out + BiForm.e(d, k, l, coeff=XPoly.var(d, k, l) * Fraction(1, 2))
    return out


def iota_wedge_x(a: BiForm) -> BiForm:
    """The odd derivation sum_k x_k iota(e_k) of the e-algebra."""
    return contract_e([ScalarExpr.x(a.dim, k) for k in range(1, a.dim + 1)], a)


@lru_cache(maxsize=None)
def exp_f_t(d: int) -> BiForm:
    return super_exp_nilpotent(build_f_t(d))


@lru_cache(maxsize=None)
def thom_C_t(d: int) -> BiForm:
    return berezin(exp_f_t(d))


@lru_cache(maxsize=None)
def thom_eta_t(d: int) -> BiForm:
    return -berezin(position_e(d) * exp_f_t(d))


@lru_cache(maxsize=None)
def beta_wedge(d: int) -> BiForm:
    """int_0^infty eta^t dt, an equivariant form on V minus the origin."""
    return t_integrate_form(thom_eta_t(d))


@lru_cache(maxsize=None)
def beta_explicit(d: int) -> BiForm:
    """Closed formula: sum over {k} + I + J = {1..d}, |I| even, of
    gamma Pf(X_I/2) x_k dx_J r^{-(|J|+1)}."""
    _check_dim(d)
    half = half_matrix(d)
    out = BiForm(d)
    full = set(range(1, d + 1))
    for k in range(1, d + 1):
        rest = sorted(full - {k})
        for size in range(0, len(rest) + 1, 2):
            for I in combinations(rest, size):
                J = tuple(sorted(set(rest) - set(I)))
                j = len(J)
                sign = -1 if (j * (j + 1) // 2) % 2 else 1
                sign *= epsilon_sign(I, J) * epsilon_sign((k,), tuple(sorted(I + J)))
                gamma = gamma_half(j + 1) * Fraction(-sign, 2)
                pf = pfaffian(d, I, matrix=half) if I else XPoly.scalar(d, 1)
                coeff = pf * (ScalarExpr.x(d, k) * ScalarExpr.r(d, -(j + 1)) * gamma)
                out = out + BiForm.dx(d, *J, coeff=coeff)
    return out


@lru_cache(maxsize=None)
def euler_form(d: int) -> XPoly:
    """Pf(X/2)."""
    return pfaffian(d, matrix=half_matrix(d)) if d % 2 == 0 else XPoly(d)


@dataclass(frozen=True)
class ThomFamily:
    dim: int
    flavor: str
    payload: Any
    epsilon: ConstantScalar
    meta: dict = field(default_factory=dict, compare=False)

    def form(self) -> BiForm:
        return self.payload.alpha if isinstance(self.payload, RelativePair) else self.payload


def cutoff(d: int) -> ScalarExpr:
    """chi = f(r^2) with f the formal cutoff (f = 1 near 0, compact support)."""
    return ScalarExpr.radial(d, "f", 0)


def build_thom(d: int, flavor: str) -> ThomFamily:
    _check_dim(d)
    if flavor not in FLAVORS:
        raise DomainError(f"unknown flavor {flavor!r}; expected one of {FLAVORS}")
    eps = epsilon_d(d)
    inv = eps.inverse()
    if flavor == "mq":
        return ThomFamily(d, flavor, subs_t(thom_C_t(d), 1) * inv, eps)
    rel = RelativePair(BiForm.scalar(d, euler_form(d)), beta_wedge(d)).scale(inv)
    if flavor == "rel":
        return ThomFamily(d, flavor, rel, eps)
    return ThomFamily(d, flavor, p_chi(rel, cutoff(d)), eps)


def restrict_to_origin(a: BiForm, f0: int = 1) -> XPoly:
    """Set x = 0 and dx = 0; the cutoff f and its Gaussian factors evaluate at r = 0."""
    p = a.terms.get((0, 0), XPoly(a.dim))
    out = XPoly(a.dim)
    for k, s in p.terms.items():
        total = ConstantScalar()
        for m, c in s.terms.items():
            if any(m.x) or m.r < 0:
                if m.r < 0 and not any(m.x):
                    raise DomainError("form is singular at the origin")
                continue
            if m.r > 0 or m.t or m.phi or m.th or m.eth:
                if m.r > 0:
                    continue
                raise DomainError("cannot restrict a form with t, phi or theta atoms")
            if any(n > 0 for n in m.f):
                continue
            total = total + c * (f0 ** len(m.f))
        if not total.is_zero():
            out = out + XPoly(a.dim, {k: ScalarExpr.const(a.dim, total)})
    return out


@dataclass(frozen=True)
class FormalAntiderivative:
    """A_t = int_0^t integrand ds, known through dA/dt = integrand and A_0 = 0."""

    integrand: BiForm

    def derivative(self) -> BiForm:
        return self.integrand


def retarded_identity_checks(C: BiForm, eta: BiForm, beta: BiForm, chi: ScalarExpr, D=equivariant_d) -> list[dict]:
    """Exact checks of the two retarded transgressions of a family C^t with
    dC/dt = -D eta and beta = int_0^infty eta (so D beta = C^0 off the origin):

        C^chi - C^{chi,t}  = D(chi A_t)            with A_t = int_0^t eta
        C^{chi,t} - C^t   = D((chi - 1) beta^t)   with beta^t = beta - A_t

    where C^chi = chi C^0 + dchi beta and C^{chi,t} = chi C^t + dchi beta^t.
    A_t is only known through dA/dt = eta and A_0 = 0, so each identity is checked
    at t = 0 and after d/dt (D commutes with d/dt).
    """
    dim = C.dim
    dchi = d_scalar(chi)
    A = FormalAntiderivative(eta)
    C0 = subs_t(C, 0)
    report = []

    def rec(name, residual: BiForm):
        report.append({"check": name, "zero": residual.is_zero(), "residual": residual})

    rec("dC/dt = -D eta", d_dt(C) + D(eta))
    rec("D beta = C^0", D(beta) - C0)
    # identity 1: both sides vanish at t = 0 since A_0 = 0 and C^{chi,0} = C^chi
    lhs1 = -(d_dt(C) * chi) + dchi * A.derivative()
    rec("d/dt [C^chi - C^{chi,t} - D(chi A_t)]", lhs1 - D(BiForm.scalar(dim, chi) * A.derivative()))
    # identity 2 at t = 0
    lhs2_0 = (C0 * chi + dchi * beta) - C0
    rec("C^{chi,0} - C^0 = D((chi-1) beta)", lhs2_0 - D(beta * (chi - 1)))
    # identity 2, differentiated: (chi - 1) dC/dt - dchi eta = -D((chi - 1) eta)
    lhs2 = d_dt(C) * (chi - 1) - dchi * A.derivative()
    rec("d/dt [C^{chi,t} - C^t - D((chi-1) beta^t)]", lhs2 + D(A.derivative() * (chi - 1)))
    return report


def thom_retarded_transgression(d: int, t: Fraction | int = 1) -> list[dict]:
    """Retarded transgressions of the Thom family, plus the transgression at the given t."""
    _check_dim(d)
    t = Fraction(t)
    if t <= 0:
        raise DomainError("t must be positive")
    C = thom_C_t(d)
    eta = thom_eta_t(d)
    report = retarded_identity_checks(C, eta, beta_wedge(d), cutoff(d))
    pf = BiForm.scalar(d, euler_form(d))
    residual = subs_t(C, 0) - pf
    report.append({"check": "C^0 = Pf(X/2)", "zero": residual.is_zero(), "residual": residual})
    residual = subs_t(d_dt(C) + equivariant_d(eta), t)
    report.append({"check": f"transgression at t={t}", "zero": residual.is_zero(), "residual": residual})
    return report


def d_rel_thom(d: int) -> RelativePair:
    return d_rel(build_thom(d, "rel").payload)
