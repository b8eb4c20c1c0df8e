"""Cartan model on V = R^d: D = d - iota(VX), relative pairs and their operations.

Partition functions and cutoffs are formal radial atoms phi(r^2), so they are
SO(d)-invariant and every identity of the relative calculus can be checked exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .coeff import ConstantScalar, DomainError, IntegrationError, ScalarExpr, gamma_half, rational_sqrt
from .exterior import BiForm, XPoly, contract_dx, exterior_d, popcount

EquivariantForm = BiForm

# (VX)_i = VECTOR_FIELD_SIGN * sum_j X_ij x_j.  The sign +1 is the one for which
# D(beta) = Pf(X/2) holds in dimension 2; it is a module constant so that the
# verification suite can be shown to catch a flipped convention.
VECTOR_FIELD_SIGN = 1


def _entry(dim: int, matrix, i: int, j: int):
    if matrix is None:
        return XPoly.var(dim, i, j)
    if (i, j) in matrix:
        return matrix[(i, j)]
    if (j, i) in matrix:
        return -matrix[(j, i)]
    return 0


def vector_field(dim: int, matrix=None) -> list:
    """Components of VX; ``matrix`` maps pairs (k, l) to values of X_kl (default: symbolic X)."""
    out = []
    for i in range(1, dim + 1):
        v = XPoly(dim)
        for j in range(1, dim + 1):
            if j != i:
                v = v + XPoly.scalar(dim, ScalarExpr.x(dim, j)) * _entry(dim, matrix, i, j)
        out.append(v * VECTOR_FIELD_SIGN)
    return out


def contract_vx(a: BiForm, matrix=None) -> BiForm:
    return contract_dx(vector_field(a.dim, matrix), a)


def equivariant_d(a: BiForm, matrix=None) -> BiForm:
    return exterior_d(a) - contract_vx(a, matrix)


def lie_derivative(a: BiForm, matrix=None) -> BiForm:
    """L(VX) = d iota + iota d, so that D^2 = -L."""
    return exterior_d(contract_vx(a, matrix)) + contract_vx(exterior_d(a), matrix)


def is_singular(a: BiForm) -> bool:
    """True if some coefficient has a negative power of r (form lives on V minus 0)."""
    return any(s.has_negative_r() for _, _, _, s in a.items())


@dataclass(frozen=True)
class RelativePair:
    alpha: BiForm
    beta: BiForm

    @property
    def dim(self) -> int:
        return self.alpha.dim

    @classmethod
    def zero(cls, dim: int) -> "RelativePair":
        return cls(BiForm(dim), BiForm(dim))

    def degree(self) -> int | None:
        d = self.alpha.homogeneous_degree()
        if d is not None:
            return d
        b = self.beta.homogeneous_degree()
        return None if b is None else b + 1

    def __add__(self, other: "RelativePair") -> "RelativePair":
        return RelativePair(self.alpha + other.alpha, self.beta + other.beta)

    def __sub__(self, other: "RelativePair") -> "RelativePair":
        return RelativePair(self.alpha - other.alpha, self.beta - other.beta)

    def __neg__(self) -> "RelativePair":
        return RelativePair(-self.alpha, -self.beta)

    def scale(self, c) -> "RelativePair":
        return RelativePair(self.alpha * c, self.beta * c)

    def parity(self) -> "RelativePair":
        """(-1)^{|a|} a, resolved termwise: alpha has degree |a|, beta has |a| - 1."""
        return RelativePair(self.alpha.graded_parity(), self.beta.graded_parity(1))

    def is_zero(self) -> bool:
        return self.alpha.is_zero() and self.beta.is_zero()

    def check(self) -> None:
        if is_singular(self.alpha):
            raise DomainError("alpha must be smooth on V")


def d_rel(p: RelativePair) -> RelativePair:
    return RelativePair(equivariant_d(p.alpha), p.alpha - equivariant_d(p.beta))


def contract_rel(v: list, p: RelativePair) -> RelativePair:
    return RelativePair(contract_dx(v, p.alpha), -contract_dx(v, p.beta))


def radial_function(dim: int, name: str) -> ScalarExpr:
    return ScalarExpr.radial(dim, name, 0)


def d_scalar(s: ScalarExpr | BiForm) -> BiForm:
    if isinstance(s, ScalarExpr):
        s = BiForm.scalar(s.dim, s)
    return exterior_d(s)


@dataclass(frozen=True)
class PartitionData:
    """Invariant partition of unity Phi1 + Phi2 = 1; Phi2 is stored as 1 - Phi1."""

    phi1: ScalarExpr

    @classmethod
    def formal(cls, dim: int, name: str = "phi") -> "PartitionData":
        return cls(radial_function(dim, name))

    @property
    def dim(self) -> int:
        return self.phi1.dim

    @property
    def phi2(self) -> ScalarExpr:
        return 1 - self.phi1

    def swapped(self) -> "PartitionData":
        return PartitionData(self.phi2)

    def dphi1(self) -> BiForm:
        return d_scalar(self.phi1)


def rel_product(p1: RelativePair, p2: RelativePair, phi: PartitionData) -> RelativePair:
    a1, b1, a2, b2 = p1.alpha, p1.beta, p2.alpha, p2.beta
    beta = (
        b1 * a2 * phi.phi1
        + a1.graded_parity() * b2 * phi.phi2
        + phi.dphi1() * b1.graded_parity() * b2
    )
    return RelativePair(a1 * a2, beta)


@dataclass(frozen=True)
class TriplePartition:
    """Data (Phi_i, Lambda_i, Theta) for the three-factor product."""

    phi: tuple[ScalarExpr, ScalarExpr, ScalarExpr]
    lam: tuple[BiForm, BiForm, BiForm]
    theta: BiForm

    @classmethod
    def nested(cls, inner: PartitionData, outer: PartitionData) -> "TriplePartition":
        """Phi = (p12 p1, p12 p2, p3) built from phi1 + phi2 = 1 and p12 + p3 = 1."""
        p1, p2 = inner.phi1, inner.phi2
        p12, p3 = outer.phi1, outer.phi2
        dp12 = d_scalar(p12)
        dp1 = d_scalar(p1)
        lam = (-(dp12 * p2), dp12 * p1, -(dp1 * p12))
        return cls((p12 * p1, p12 * p2, p3), lam, equivariant_d(lam[0]))

    def validate(self) -> None:
        d = [d_scalar(p) for p in self.phi]
        l1, l2, l3 = self.lam
        if d[0] != l2 - l3 or d[1] != l3 - l1 or d[2] != l1 - l2:
            raise DomainError("partition data violates dPhi_i = Lambda_j - Lambda_k")
        if any(equivariant_d(l) != self.theta for l in self.lam):
            raise DomainError("partition data violates D Lambda_i = Theta")


def triple_product(p1: RelativePair, p2: RelativePair, p3: RelativePair, data: TriplePartition) -> RelativePair:
    data.validate()
    a1, b1 = p1.alpha, p1.beta
    a2, b2 = p2.alpha, p2.beta
    a3, b3 = p3.alpha, p3.beta
    P = lambda f: f.graded_parity()  # noqa: E731
    F1, F2, F3 = data.phi
    L1, L2, L3 = data.lam
    beta = (
        b1 * a2 * a3 * F1
        + P(a1) * b2 * a3 * F2
        + P(a1) * P(a2) * b3 * F3
        - L1 * a1 * P(b2) * b3
        + L2 * P(b1) * P(a2) * b3
        - L3 * P(b1) * b2 * a3
        + data.theta * b1 * P(b2) * b3
    )
    return RelativePair(a1 * a2 * a3, beta)


def _has_cutoff_derivative(m) -> bool:
    return any(n > 0 for n in m.f) or any(n > 0 for _, n in m.phi)


def p_chi(p: RelativePair, chi: ScalarExpr) -> BiForm:
    """chi*alpha + d(chi) beta, a form on all of V when chi = 1 near the origin."""
    out = p.alpha * chi + d_scalar(chi) * p.beta
    for _, _, _, s in out.items():
        for m in s.terms:
            if m.r < 0 and not _has_cutoff_derivative(m):
                raise DomainError("singularity not cancelled by the cutoff")
    return out


def excision(p: RelativePair, chi: ScalarExpr) -> RelativePair:
    return RelativePair(p.alpha * chi + d_scalar(chi) * p.beta, p.beta * chi)


excision_Ichi = excision


def integrate_over_V(a: BiForm) -> XPoly:
    """Integral of the top dx-component, for coefficients x^k exp(-c r^2) with c a positive constant."""
    dim = a.dim
    top = a.terms.get(((1 << dim) - 1, 0), XPoly(dim))
    out = XPoly(dim)
    for k, s in top.terms.items():
        total = ConstantScalar()
        for m, c in s.terms.items():
            if m.f or m.phi or m.t or m.th or m.eth:
                raise IntegrationError("coefficient is not a pure Gaussian moment; use numeval")
            if m.r != 0 or len(m.gauss) != 1 or m.gauss[0] <= 0:
                raise IntegrationError("coefficient is not Gaussian-decaying; use numeval")
            if any(e % 2 for e in m.x):
                continue
            cg = m.gauss[0]
            value = c
            for e in m.x:
                # int_R x^e exp(-c x^2) dx = Gamma((e+1)/2) c^{-(e+1)/2}
                value = value * gamma_half(e + 1)
                root = rational_sqrt(cg)
                if root is None:
                    raise IntegrationError(f"sqrt({cg}) is not rational")
                value = value * root ** (-(e + 1))
            total = total + value
        if not total.is_zero():
            out = out + XPoly(dim, {k: ScalarExpr.const(dim, total)})
    return out


def homogeneous_parts(a: BiForm) -> dict[int, BiForm]:
    out: dict[int, dict] = {}
    for (I, J), p in a.terms.items():
        for k, s in p.terms.items():
            deg = popcount(I) + popcount(J) + 2 * sum(k)
            out.setdefault(deg, {}).setdefault((I, J), {})[k] = s
    return {deg: BiForm(a.dim, {key: XPoly(a.dim, v) for key, v in d.items()}) for deg, d in out.items()}


def invariant_generators(dim: int) -> dict[str, BiForm]:
    """SO(d)-invariant building blocks: r^2, sum x dx, <Xx, dx>, sum X_ij dx_i dx_j, sum dx_i e_i."""
    x = [ScalarExpr.x(dim, i) for i in range(1, dim + 1)]
    r2 = BiForm.scalar(dim, ScalarExpr.r(dim, 2))
    w = BiForm(dim)
    xi = BiForm(dim)
    omega = BiForm(dim)
    for i in range(1, dim + 1):
        w = w + BiForm.dx(dim, i, coeff=x[i - 1])
        for j in range(1, dim + 1):
            if i != j:
                xi = xi + BiForm.dx(dim, j, coeff=XPoly.var(dim, i, j) * x[i - 1])
                if i < j:
                    omega = omega + BiForm.dx(dim, i, j, coeff=XPoly.var(dim, i, j))
    return {"r2": r2, "w": w, "xi": xi, "omega": omega}


HALF = Fraction(1, 2)
