"""Bigraded exterior algebra in dx_1..dx_d and e_1..e_d over X-polynomials.

Monomials are stored as ``dx_I e_J`` with the dx-part to the left; I and J are
bitmasks (bit k-1 stands for index k).  All generators are odd, so the algebra is
supercommutative in the total degree |I| + |J|.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Callable, Iterable, Iterator

from .coeff import ConstantScalar, DomainError, ScalarExpr


def mask(indices: Iterable[int]) -> int:
    m = 0
    for k in indices:
        m |= 1 << (k - 1)
    return m


def indices(m: int) -> tuple[int, ...]:
    out = []
    k = 1
    while m:
        if m & 1:
            out.append(k)
        m >>= 1
        k += 1
    return tuple(out)


def popcount(m: int) -> int:
    return bin(m).count("1")


@lru_cache(maxsize=None)
def _eps_masks(a: int, b: int) -> int:
    n = 0
    bb = b
    k = 0
    while bb:
        if bb & 1:
            n += popcount(a >> (k + 1))
        bb >>= 1
        k += 1
    return -1 if n % 2 else 1


def epsilon_sign(I, J) -> int:
    """Sign with e_I ^ e_J = eps(I, J) e_{I u J}; I and J are index sets or bitmasks."""
    a = I if isinstance(I, int) else mask(I)
    b = J if isinstance(J, int) else mask(J)
    if a & b:
        raise DomainError(f"index sets overlap: {indices(a)} and {indices(b)}")
    return _eps_masks(a, b)


@lru_cache(maxsize=None)
def so_pairs(dim: int) -> tuple[tuple[int, int], ...]:
    return tuple(combinations(range(1, dim + 1), 2))


@lru_cache(maxsize=None)
def _pair_index(dim: int) -> dict[tuple[int, int], int]:
    return {p: n for n, p in enumerate(so_pairs(dim))}


class XPoly:
    """Polynomial in the antisymmetric indeterminates X_kl (k < l) with ScalarExpr coefficients."""

    __slots__ = ("dim", "terms", "_hash")

    def __init__(self, dim: int, terms: dict[tuple[int, ...], ScalarExpr] | None = None):
        self.dim = dim
        self.terms = {k: v for k, v in (terms or {}).items() if not v.is_zero()}
        self._hash = None

    @property
    def npairs(self) -> int:
        return len(so_pairs(self.dim))

    @classmethod
    def zero(cls, dim: int) -> "XPoly":
        return cls(dim)

    @classmethod
    def scalar(cls, dim: int, s) -> "XPoly":
        if not isinstance(s, ScalarExpr):
            s = ScalarExpr.const(dim, s)
        return cls(dim, {(0,) * len(so_pairs(dim)): s})

    @classmethod
    def var(cls, dim: int, k: int, l: int) -> "XPoly":
        """X_kl with X_lk = -X_kl and X_kk = 0."""
        if k == l:
            return cls(dim)
        sign = 1
        if k > l:
            k, l, sign = l, k, -1
        e = [0] * len(so_pairs(dim))
        e[_pair_index(dim)[(k, l)]] = 1
        return cls(dim, {tuple(e): ScalarExpr.const(dim, sign)})

    def _coerce(self, other) -> "XPoly":
        if isinstance(other, XPoly):
            if other.dim != self.dim:
                raise DomainError("dimension mismatch")
            return other
        if isinstance(other, (int, Fraction, ConstantScalar, ScalarExpr)):
            return XPoly.scalar(self.dim, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return XPoly(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return XPoly(self.dim, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, ConstantScalar, ScalarExpr)):
            if not isinstance(other, ScalarExpr):
                return XPoly(self.dim, {k: v * other for k, v in self.terms.items()})
            other = XPoly.scalar(self.dim, other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[tuple[int, ...], ScalarExpr] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                p = v1 * v2
                out[k] = out[k] + p if k in out else p
        return XPoly(self.dim, out)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, ConstantScalar, ScalarExpr)):
            other = XPoly.scalar(self.dim, other)
        if not isinstance(other, XPoly):
            return False
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self.terms.items())))
        return self._hash

    def map(self, fn: Callable[[ScalarExpr], ScalarExpr]) -> "XPoly":
        return XPoly(self.dim, {k: fn(v) for k, v in self.terms.items()})

    def scalar_part(self) -> ScalarExpr | None:
        """The coefficient if no X appears, else None."""
        if not self.terms:
            return ScalarExpr.zero(self.dim)
        zero = (0,) * self.npairs
        if set(self.terms) == {zero}:
            return self.terms[zero]
        return None

    def subs(self, values: dict[tuple[int, int], "XPoly"]) -> "XPoly":
        """Substitute X_kl -> values[(k, l)] (k < l); missing pairs stay symbolic."""
        out = XPoly(self.dim)
        pairs = so_pairs(self.dim)
        for k, v in self.terms.items():
            term = XPoly.scalar(self.dim, v)
            for (p, e) in zip(pairs, k):
                if e:
                    base = values.get(p, XPoly.var(self.dim, *p))
                    for _ in range(e):
                        term = term * base
            out = out + term
        return out

    def x_degrees(self) -> set[int]:
        return {sum(k) for k in self.terms}

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: tuple(-e for e in kv[0]))

    def render(self) -> str:
        if not self.terms:
            return "0"
        pairs = so_pairs(self.dim)
        chunks = []
        for k, v in self.sorted_terms():
            xs = []
            for (a, b), e in zip(pairs, k):
                if e == 1:
                    xs.append(f"X{a}{b}")
                elif e:
                    xs.append(f"X{a}{b}^{e}")
            s = v.render()
            if xs:
                xtext = "*".join(xs)
                if s == "1":
                    s = xtext
                elif s == "-1":
                    s = "-" + xtext
                elif len(v.terms) > 1:
                    s = f"({s})*{xtext}"
                else:
                    s = f"{s}*{xtext}"
            elif len(v.terms) > 1 and len(self.terms) > 1:
                s = f"({s})"
            chunks.append(s)
        out = chunks[0]
        for c in chunks[1:]:
            out += " - " + c[1:] if c.startswith("-") else " + " + c
        return out

    def __repr__(self):
        return f"XPoly[{self.dim}]({self.render()})"


def _coeff(dim: int, c) -> XPoly:
    if isinstance(c, XPoly):
        return c
    return XPoly.scalar(dim, c)


class BiForm:
    """Element of the exterior algebra on dx_1..dx_d, e_1..e_d with XPoly coefficients."""

    __slots__ = ("dim", "terms", "_hash")

    def __init__(self, dim: int, terms: dict[tuple[int, int], XPoly] | None = None):
        self.dim = dim
        self.terms = {k: v for k, v in (terms or {}).items() if not v.is_zero()}
        self._hash = None

    @classmethod
    def zero(cls, dim: int) -> "BiForm":
        return cls(dim)

    @classmethod
    def scalar(cls, dim: int, c) -> "BiForm":
        return cls(dim, {(0, 0): _coeff(dim, c)})

    @classmethod
    def dx(cls, dim: int, *idx: int, coeff=1) -> "BiForm":
        """coeff * dx_{i1} ^ dx_{i2} ^ ... in the given order."""
        out = cls.scalar(dim, coeff)
        for i in idx:
            out = out * cls(dim, {(mask([i]), 0): XPoly.scalar(dim, 1)})
        return out

    @classmethod
    def e(cls, dim: int, *idx: int, coeff=1) -> "BiForm":
        out = cls.scalar(dim, coeff)
        for i in idx:
            out = out * cls(dim, {(0, mask([i])): XPoly.scalar(dim, 1)})
        return out

    @classmethod
    def monomial(cls, dim: int, I: Iterable[int], J: Iterable[int], coeff=1) -> "BiForm":
        """coeff * dx_I e_J with I, J taken in increasing order."""
        return cls(dim, {(mask(I), mask(J)): _coeff(dim, coeff)})

    def _coerce(self, other) -> "BiForm":
        if isinstance(other, BiForm):
            if other.dim != self.dim:
                raise DomainError("dimension mismatch")
            return other
        if isinstance(other, (int, Fraction, ConstantScalar, ScalarExpr, XPoly)):
            return BiForm.scalar(self.dim, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return BiForm(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return BiForm(self.dim, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        """Wedge product (scalars act by multiplication)."""
        if isinstance(other, (int, Fraction, ConstantScalar, ScalarExpr, XPoly)):
            return BiForm(self.dim, {k: v * other for k, v in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[tuple[int, int], XPoly] = {}
        for (I1, J1), c1 in self.terms.items():
            nJ1 = popcount(J1)
            for (I2, J2), c2 in other.terms.items():
                if I1 & I2 or J1 & J2:
                    continue
                sign = _eps_masks(I1, I2) * _eps_masks(J1, J2)
                if nJ1 % 2 and popcount(I2) % 2:
                    sign = -sign
                k = (I1 | I2, J1 | J2)
                p = c1 * c2
                if sign < 0:
                    p = -p
                out[k] = out[k] + p if k in out else p
        return BiForm(self.dim, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, ConstantScalar, ScalarExpr, XPoly)):
            return self * other
        return NotImplemented

    def wedge(self, other) -> "BiForm":
        return self * other

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, ConstantScalar, ScalarExpr, XPoly)):
            other = BiForm.scalar(self.dim, other)
        if not isinstance(other, BiForm):
            return False
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self.terms.items())))
        return self._hash

    def coeff(self, I: Iterable[int] = (), J: Iterable[int] = ()) -> XPoly:
        return self.terms.get((mask(I), mask(J)), XPoly(self.dim))

    def map_coeffs(self, fn: Callable[[XPoly], XPoly]) -> "BiForm":
        return BiForm(self.dim, {k: fn(v) for k, v in self.terms.items()})

    def map_scalars(self, fn: Callable[[ScalarExpr], ScalarExpr]) -> "BiForm":
        return self.map_coeffs(lambda p: p.map(fn))

    def items(self) -> Iterator[tuple[int, int, tuple[int, ...], ScalarExpr]]:
        """Flat iteration over (I, J, X-exponent, scalar)."""
        for (I, J), p in self.terms.items():
            for k, s in p.terms.items():
                yield I, J, k, s

    def graded_parity(self, shift: int = 0) -> "BiForm":
        """Multiply each term by (-1)^(degree + shift), degree counting X_kl as 2."""
        out = {}
        for (I, J), p in self.terms.items():
            sign = (-1) ** ((popcount(I) + popcount(J) + shift) % 2)
            out[(I, J)] = p if sign > 0 else -p
        return BiForm(self.dim, out)

    def degrees(self) -> set[int]:
        out = set()
        for (I, J), p in self.terms.items():
            for k in p.terms:
                out.add(popcount(I) + popcount(J) + 2 * sum(k))
        return out

    def homogeneous_degree(self) -> int | None:
        d = self.degrees()
        return d.pop() if len(d) == 1 else None

    def e_free(self) -> bool:
        return all(J == 0 for (_, J) in self.terms)

    def sorted_items(self):
        return sorted(self.terms.items(), key=lambda kv: (popcount(kv[0][0]) + popcount(kv[0][1]), indices(kv[0][1]), indices(kv[0][0])))

    def render(self) -> str:
        if not self.terms:
            return "0"
        chunks = []
        for (I, J), p in self.sorted_items():
            gens = [f"dx{i}" for i in indices(I)] + [f"e{j}" for j in indices(J)]
            c = p.render()
            if not gens:
                chunks.append(c if len(p.terms) == 1 or len(self.terms) == 1 else f"({c})")
                continue
            g = "^".join(gens)
            if c == "1":
                chunks.append(g)
            elif c == "-1":
                chunks.append("-" + g)
            elif len(p.terms) > 1 or len(next(iter(p.terms.values())).terms) > 1:
                chunks.append(f"({c})*{g}")
            else:
                chunks.append(f"{c}*{g}")
        out = chunks[0]
        for c in chunks[1:]:
            out += " - " + c[1:] if c.startswith("-") else " + " + c
        return out

    def __repr__(self):
        return f"BiForm[{self.dim}]({self.render()})"


def wedge(a: BiForm, b: BiForm) -> BiForm:
    return a * b


def berezin(a: BiForm) -> BiForm:
    """Berezin integral: keep the coefficient of e_1...e_d, with the dx-part left in place."""
    full = (1 << a.dim) - 1
    return BiForm(a.dim, {(I, 0): c for (I, J), c in a.terms.items() if J == full})


def berezin_partial(a: BiForm, sub: Iterable[int]) -> BiForm:
    """Berezin integral over the e-generators in ``sub`` only; other e-generators must be absent."""
    m = mask(sub)
    out = {}
    for (I, J), c in a.terms.items():
        if J & ~m:
            raise DomainError("e-generators outside the integration block")
        if J == m:
            out[(I, 0)] = c
    return BiForm(a.dim, out)


def contract_e(v: list, a: BiForm) -> BiForm:
    """Odd derivation iota(v) on the e-part, iota(e_k) e_l = delta_kl; v[k-1] is the e_k component."""
    out = BiForm(a.dim)
    for k in range(1, a.dim + 1):
        vk = v[k - 1]
        if isinstance(vk, (int, Fraction)) and vk == 0:
            continue
        bit = 1 << (k - 1)
        part = {}
        for (I, J), c in a.terms.items():
            if not J & bit:
                continue
            # move iota past dx_I, then past the e_j with j < k
            n = popcount(I) + popcount(J & (bit - 1))
            part[(I, J & ~bit)] = c if n % 2 == 0 else -c
        out = out + BiForm(a.dim, part) * _coeff(a.dim, vk)
    return out


def contract_dx(v: list, a: BiForm) -> BiForm:
    """Odd derivation iota(v) on the dx-part, iota(d/dx_k) dx_l = delta_kl."""
    out = BiForm(a.dim)
    for k in range(1, a.dim + 1):
        vk = v[k - 1]
        if isinstance(vk, (int, Fraction)) and vk == 0:
            continue
        bit = 1 << (k - 1)
        part = {}
        for (I, J), c in a.terms.items():
            if not I & bit:
                continue
            n = popcount(I & (bit - 1))
            part[(I & ~bit, J)] = c if n % 2 == 0 else -c
        out = out + BiForm(a.dim, part) * _coeff(a.dim, vk)
    return out


def exterior_d(a: BiForm) -> BiForm:
    """de Rham differential in x (acts on the dx-part; e-generators are constants)."""
    out: dict[tuple[int, int], XPoly] = {}
    for (I, J), p in a.terms.items():
        for i in range(1, a.dim + 1):
            bit = 1 << (i - 1)
            if I & bit:
                continue
            dp = p.map(lambda s, i=i: s.partial(i))
            if dp.is_zero():
                continue
            if _eps_masks(bit, I) < 0:
                dp = -dp
            k = (I | bit, J)
            out[k] = out[k] + dp if k in out else dp
    return BiForm(a.dim, out)


def d_dt(a: BiForm) -> BiForm:
    return a.map_scalars(lambda s: s.partial_t())


def subs_t(a: BiForm, value) -> BiForm:
    return a.map_scalars(lambda s: s.subs_t(value))


def t_integrate_form(a: BiForm) -> BiForm:
    return a.map_scalars(lambda s: s.t_integrate())


def gaussian_exponent(s: ScalarExpr) -> tuple[tuple[Fraction, ...], int] | None:
    """Write s = -g(t) r^2 + i q theta; return (g, q) or None if s has another shape."""
    dim = s.dim
    q = 0
    rest = s
    for m, c in s.terms.items():
        if m.x == (0,) * dim and m.r == 0 and not (m.gauss or m.f or m.phi or m.t or m.eth) and m.th == 1:
            if len(c.terms) != 1 or (1, 0) not in c.terms or c.terms[(1, 0)].denominator != 1:
                return None
            q = int(c.terms[(1, 0)])
            rest = rest - ScalarExpr.theta(dim) * c
    coeffs: dict[int, Fraction] = {}
    e1 = (2,) + (0,) * (dim - 1)
    for m, c in rest.terms.items():
        if m.x == e1 and m.r == 0 and not (m.gauss or m.f or m.phi or m.th or m.eth) and c.is_rational():
            coeffs[m.t] = -c.rational()
    g = tuple(coeffs.get(k, Fraction(0)) for k in range(max(coeffs, default=-1) + 1))
    while g and g[-1] == 0:
        g = g[:-1]
    rebuilt = ScalarExpr.zero(dim)
    for k, gk in enumerate(g):
        rebuilt = rebuilt + ScalarExpr.t(dim, k) * ScalarExpr.r(dim, 2) * (-gk)
    if rebuilt != rest:
        return None
    return g, q


def super_exp_nilpotent(a: BiForm) -> BiForm:
    """exp(a) for a = s + N with s a Gaussian/phase scalar atom and N of positive degree."""
    dim = a.dim
    zero = (0,) * len(so_pairs(dim))
    s_poly = a.terms.get((0, 0), XPoly(dim))
    if any(k != zero for k in s_poly.terms):
        raise DomainError("degree-0 part depends on X; it is not nilpotent")
    s = s_poly.terms.get(zero, ScalarExpr.zero(dim))
    shape = gaussian_exponent(s)
    if shape is None:
        raise DomainError(f"scalar part {s.render()} is not a Gaussian or phase atom")
    g, q = shape
    scale = ScalarExpr.mono(dim, gauss=g, eth=q)
    N = BiForm(dim, {k: v for k, v in a.terms.items() if k != (0, 0)})
    total = BiForm.scalar(dim, 1)
    power = BiForm.scalar(dim, 1)
    for k in range(1, 2 * dim + 1):
        power = power * N * Fraction(1, k)
        if power.is_zero():
            break
        total = total + power
    return total * scale


def so_generator(dim: int, matrix=None) -> BiForm:
    """sum_{k<l} X_kl e_k e_l, with X symbolic or taken from ``matrix`` (dict or nested list of XPoly)."""
    out = BiForm(dim)
    for (k, l) in so_pairs(dim):
        entry = XPoly.var(dim, k, l) if matrix is None else _matrix_entry(dim, matrix, k, l)
        out = out + BiForm.monomial(dim, (), (k, l), entry)
    return out


def _matrix_entry(dim: int, matrix, k: int, l: int) -> XPoly:
    if isinstance(matrix, dict):
        v = matrix.get((k, l))
        if v is None and (l, k) in matrix:
            v = -_coeff(dim, matrix[(l, k)])
        return _coeff(dim, 0 if v is None else v)
    return _coeff(dim, matrix[k - 1][l - 1])


def pfaffian(dim: int, I: Iterable[int] | None = None, matrix=None) -> XPoly:
    """Pf(X_I) as the Berezin integral of exp(sum_{k<l in I} X_kl e_k e_l) over e_I."""
    sub = tuple(range(1, dim + 1)) if I is None else tuple(sorted(I))
    if len(sub) % 2:
        return XPoly(dim)
    gen = BiForm(dim)
    for k, l in combinations(sub, 2):
        entry = XPoly.var(dim, k, l) if matrix is None else _matrix_entry(dim, matrix, k, l)
        gen = gen + BiForm.monomial(dim, (), (k, l), entry)
    return berezin_partial(super_exp_nilpotent(gen), sub).coeff()


def half_matrix(dim: int) -> dict[tuple[int, int], XPoly]:
    """Entries of X/2."""
    return {p: XPoly.var(dim, *p) * Fraction(1, 2) for p in so_pairs(dim)}


