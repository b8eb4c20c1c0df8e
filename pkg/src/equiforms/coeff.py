"""Exact scalars: constants in Q[i][pi^(1/2), pi^(-1/2)] and radial expressions on R^d.

A ``ScalarExpr`` is a finite sum of monomials

    c * x^a * r^e * exp(-g(t) r^2) * f^(n1)(r^2)... * phi^(m)(r^2)... * t^k * theta^p * e^(i q theta)

with ``c`` a ``ConstantScalar``.  The canonical form keeps every r-exponent at most 1
and cancels common factors of r^2 = sum x_i^2 between numerator and r^(-2m).
"""

from __future__ import annotations

import math
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Iterable, NamedTuple, Union

Rational = Union[int, Fraction]


class DomainError(ValueError):
    pass


class IntegrationError(ValueError):
    pass


def _frac(q) -> Fraction:
    if isinstance(q, Fraction):
        return q
    if isinstance(q, int):
        return Fraction(q)
    raise TypeError(f"expected an exact rational, got {type(q).__name__}")


class ConstantScalar:
    """Q-linear combination of i^a * pi^(b/2) with a in {0, 1} and b any integer."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: dict[tuple[int, int], Fraction] | None = None):
        clean = {}
        if terms:
            for (a, b), q in terms.items():
                q = _frac(q)
                if q != 0:
                    clean[(a, b)] = q
        self.terms = clean
        self._hash = None

    @classmethod
    def of(cls, value) -> "ConstantScalar":
        if isinstance(value, ConstantScalar):
            return value
        q = _frac(value)
        return cls({(0, 0): q}) if q else ZERO

    @staticmethod
    def i() -> "ConstantScalar":
        return I_UNIT

    @staticmethod
    def pi_half(b: int = 1) -> "ConstantScalar":
        """pi^(b/2)."""
        return ConstantScalar({(0, b): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return all(k == (0, 0) for k in self.terms)

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise DomainError(f"{self} is not rational")
        return self.terms.get((0, 0), Fraction(0))

    def __add__(self, other):
        other = _as_const(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, q in other.terms.items():
            out[k] = out.get(k, 0) + q
        return ConstantScalar(out)

    __radd__ = __add__

    def __neg__(self):
        return ConstantScalar({k: -q for k, q in self.terms.items()})

    def __sub__(self, other):
        other = _as_const(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_const(other)
        if other is NotImplemented:
            return other
        out: dict[tuple[int, int], Fraction] = {}
        for (a1, b1), q1 in self.terms.items():
            for (a2, b2), q2 in other.terms.items():
                a = a1 + a2
                q = q1 * q2
                if a == 2:
                    a, q = 0, -q
                key = (a, b1 + b2)
                out[key] = out.get(key, 0) + q
        return ConstantScalar(out)

    __rmul__ = __mul__

    def inverse(self) -> "ConstantScalar":
        if len(self.terms) != 1:
            raise DomainError(f"only monomial constants are invertible here, got {self}")
        ((a, b), q), = self.terms.items()
        # (i q pi^(b/2))^-1 = -i q^-1 pi^(-b/2)
        return ConstantScalar({(a, -b): (-1 if a else 1) / q})

    def __truediv__(self, other):
        other = _as_const(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        other = _as_const(other)
        if other is NotImplemented:
            return False
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __complex__(self):
        return sum(
            (complex(0, 1) if a else 1) * float(q) * math.pi ** (b / 2)
            for (a, b), q in self.terms.items()
        ) + 0j

    def sort_key(self):
        return tuple(sorted(self.terms.items()))

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (a, b), q in sorted(self.terms.items()):
            sign = "-" if q < 0 else "+"
            mag = abs(q)
            factors = []
            if mag != 1 or (a == 0 and b == 0):
                factors.append(str(mag) if mag.denominator == 1 else f"({mag})")
            if a:
                factors.append("i")
            if b == 2:
                factors.append("pi")
            elif b:
                factors.append(f"pi^({Fraction(b, 2)})")
            parts.append((sign, "*".join(factors)))
        text = "".join(f" {s} {f}" for s, f in parts).strip()
        if text.startswith("+ "):
            text = text[2:]
        elif text.startswith("- "):
            text = "-" + text[2:]
        return text

    def __repr__(self):
        return f"ConstantScalar({self.render()})"


def _as_const(value):
    if isinstance(value, ConstantScalar):
        return value
    if isinstance(value, (int, Fraction)):
        return ConstantScalar.of(value)
    return NotImplemented


ZERO = ConstantScalar()
ONE = ConstantScalar({(0, 0): Fraction(1)})
I_UNIT = ConstantScalar({(1, 0): Fraction(1)})
SQRT_PI = ConstantScalar({(0, 1): Fraction(1)})
PI = ConstantScalar({(0, 2): Fraction(1)})


def const_mul(a: ConstantScalar, b: ConstantScalar) -> ConstantScalar:
    return a * b


def gamma_half(m: int) -> ConstantScalar:
    """Gamma(m/2) for a positive integer m."""
    if m <= 0:
        raise DomainError(f"Gamma(m/2) has a pole at m={m}")
    if m % 2 == 0:
        return ConstantScalar.of(math.factorial(m // 2 - 1))
    k = (m - 1) // 2
    return ConstantScalar({(0, 1): Fraction(math.factorial(2 * k), 4**k * math.factorial(k))})


def rational_sqrt(q: Fraction) -> Fraction | None:
    q = _frac(q)
    if q < 0:
        return None
    n, d = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return None


class Mono(NamedTuple):
    x: tuple[int, ...]
    r: int = 0
    gauss: tuple[Fraction, ...] = ()
    f: tuple[int, ...] = ()
    phi: tuple[tuple[str, int], ...] = ()
    t: int = 0
    th: int = 0
    eth: int = 0

    def atom_key(self):
        return (self.gauss, self.f, self.phi, self.t, self.th, self.eth)


def _trim(poly: Iterable[Fraction]) -> tuple[Fraction, ...]:
    p = list(poly)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def _poly_add(p: tuple, q: tuple) -> tuple[Fraction, ...]:
    n = max(len(p), len(q))
    return _trim(
        (p[k] if k < len(p) else 0) + (q[k] if k < len(q) else 0) for k in range(n)
    )


def _mono_mul(m1: Mono, m2: Mono) -> Mono:
    return Mono(
        tuple(a + b for a, b in zip(m1.x, m2.x)),
        m1.r + m2.r,
        _poly_add(m1.gauss, m2.gauss) if (m1.gauss and m2.gauss) else (m1.gauss or m2.gauss),
        tuple(sorted(m1.f + m2.f)) if m1.f and m2.f else (m1.f or m2.f),
        tuple(sorted(m1.phi + m2.phi)) if m1.phi and m2.phi else (m1.phi or m2.phi),
        m1.t + m2.t,
        m1.th + m2.th,
        m1.eth + m2.eth,
    )


@lru_cache(maxsize=None)
def _s_power(dim: int, k: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Expansion of (x_1^2 + ... + x_d^2)^k as (exponent, integer coefficient) pairs."""
    out: dict[tuple[int, ...], int] = defaultdict(int)
    for combo in combinations_with_replacement(range(dim), k):
        counts = [0] * dim
        for i in combo:
            counts[i] += 1
        mult = math.factorial(k)
        for c in counts:
            mult //= math.factorial(c)
        out[tuple(2 * c for c in counts)] += mult
    return tuple(out.items())


def _divmod_s(dim: int, poly: dict) -> tuple[dict, dict]:
    """Division by s = sum x_i^2 eliminating x_d^2; the remainder has x_d-degree < 2."""
    rest = dict(poly)
    quot: dict = {}
    last = dim - 1
    while True:
        cands = [a for a in rest if a[last] >= 2]
        if not cands:
            break
        a = max(cands, key=lambda e: (e[last], e))
        c = rest.pop(a)
        b = a[:last] + (a[last] - 2,)
        quot[b] = quot.get(b, ZERO) + c
        for i in range(last):
            nb = list(b)
            nb[i] += 2
            nb = tuple(nb)
            v = rest.get(nb, ZERO) - c
            if v.is_zero():
                rest.pop(nb, None)
            else:
                rest[nb] = v
    return {a: c for a, c in quot.items() if not c.is_zero()}, rest


def _canonical(dim: int, raw: dict[Mono, ConstantScalar]) -> dict[Mono, ConstantScalar]:
    """Unique form: per atom group, P r^0 + sum_k R_k r^{-2k} (+ the same times r),
    with each digit R_k reduced modulo s = r^2."""
    groups: dict[tuple, list[tuple[Mono, ConstantScalar]]] = defaultdict(list)
    for m, c in raw.items():
        if not c.is_zero():
            groups[m.atom_key()].append((m, c))
    out: dict[Mono, ConstantScalar] = {}

    def put(m: Mono, c: ConstantScalar) -> None:
        v = out.get(m, ZERO) + c
        if v.is_zero():
            out.pop(m, None)
        else:
            out[m] = v

    for key, items in groups.items():
        if all(m.r in (0, 1) for m, _ in items):
            for m, c in items:
                put(m, c)
            continue
        emin = min(m.r for m, _ in items)
        shift = (1 - emin) // 2 if emin < 0 else 0
        halves = ({}, {})
        for m, c in items:
            k, par = divmod(m.r + 2 * shift, 2)
            target = halves[par]
            for a, mult in _s_power(dim, k):
                e = tuple(u + v for u, v in zip(m.x, a))
                target[e] = target.get(e, ZERO) + c * mult
        g, f, phi, t, th, eth = key
        for par, h in enumerate(halves):
            poly = {a: c for a, c in h.items() if not c.is_zero()}
            for k in range(shift, 0, -1):
                poly, rem = _divmod_s(dim, poly)
                for a, c in rem.items():
                    put(Mono(a, par - 2 * k, g, f, phi, t, th, eth), c)
            for a, c in poly.items():
                put(Mono(a, par, g, f, phi, t, th, eth), c)
    return out


class ScalarExpr:
    """Exact radial expression on R^dim (see module docstring)."""

    __slots__ = ("dim", "terms", "_hash")

    def __init__(self, dim: int, terms: dict[Mono, ConstantScalar] | None = None, canonical: bool = False):
        self.dim = dim
        if terms is None:
            terms = {}
        self.terms = terms if canonical else _canonical(dim, terms)
        self._hash = None

    # constructors
    @classmethod
    def zero(cls, dim: int) -> "ScalarExpr":
        return cls(dim, {}, canonical=True)

    @classmethod
    def const(cls, dim: int, c) -> "ScalarExpr":
        c = ConstantScalar.of(c)
        if c.is_zero():
            return cls.zero(dim)
        return cls(dim, {Mono((0,) * dim): c}, canonical=True)

    @classmethod
    def mono(cls, dim: int, coeff=1, **fields) -> "ScalarExpr":
        fields.setdefault("x", (0,) * dim)
        if "gauss" in fields:
            fields["gauss"] = _trim(Fraction(g) for g in fields["gauss"])
        if "f" in fields:
            fields["f"] = tuple(sorted(fields["f"]))
        if "phi" in fields:
            fields["phi"] = tuple(sorted(fields["phi"]))
        return cls(dim, {Mono(**fields): ConstantScalar.of(coeff)})

    @classmethod
    def x(cls, dim: int, i: int) -> "ScalarExpr":
        """Coordinate x_i, 1-based."""
        e = [0] * dim
        e[i - 1] = 1
        return cls(dim, {Mono(tuple(e)): ONE}, canonical=True)

    @classmethod
    def r(cls, dim: int, e: int = 1) -> "ScalarExpr":
        return cls(dim, {Mono((0,) * dim, e): ONE})

    @classmethod
    def t(cls, dim: int, k: int = 1) -> "ScalarExpr":
        return cls(dim, {Mono((0,) * dim, t=k): ONE}, canonical=True)

    @classmethod
    def gaussian(cls, dim: int, poly) -> "ScalarExpr":
        """exp(-g(t) r^2) with g given by its coefficients in increasing powers of t."""
        return cls.mono(dim, gauss=poly)

    @classmethod
    def radial(cls, dim: int, name: str = "f", order: int = 0) -> "ScalarExpr":
        """A formal radial function name^(order)(r^2); 'f' is the distinguished cutoff."""
        if name == "f":
            return cls.mono(dim, f=(order,))
        return cls.mono(dim, phi=((name, order),))

    @classmethod
    def theta(cls, dim: int, p: int = 1) -> "ScalarExpr":
        return cls(dim, {Mono((0,) * dim, th=p): ONE}, canonical=True)

    @classmethod
    def etheta(cls, dim: int, q: int = 1) -> "ScalarExpr":
        """exp(i q theta)."""
        return cls(dim, {Mono((0,) * dim, eth=q): ONE}, canonical=True)

    # ring structure
    def _coerce(self, other) -> "ScalarExpr":
        if isinstance(other, ScalarExpr):
            if other.dim != self.dim:
                raise DomainError("dimension mismatch")
            return other
        if isinstance(other, (int, Fraction, ConstantScalar)):
            return ScalarExpr.const(self.dim, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, ZERO) + c
            if v.is_zero():
                out.pop(m, None)
            else:
                out[m] = v
        return ScalarExpr(self.dim, out, canonical=True)

    __radd__ = __add__

    def __neg__(self):
        return ScalarExpr(self.dim, {m: -c for m, c in self.terms.items()}, canonical=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, ConstantScalar)):
            c = ConstantScalar.of(other)
            if c.is_zero():
                return ScalarExpr.zero(self.dim)
            return ScalarExpr(self.dim, {m: v * c for m, v in self.terms.items()}, canonical=True)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        raw: dict[Mono, ConstantScalar] = {}
        needs = False
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                if m.r not in (0, 1):
                    needs = True
                raw[m] = raw.get(m, ZERO) + c1 * c2
        if not needs:
            return ScalarExpr(self.dim, {m: c for m, c in raw.items() if not c.is_zero()}, canonical=True)
        return ScalarExpr(self.dim, raw)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = ScalarExpr.const(self.dim, 1)
        for _ in range(n):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, ConstantScalar)):
            other = ScalarExpr.const(self.dim, other)
        if not isinstance(other, ScalarExpr):
            return False
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self.terms.items())))
        return self._hash

    def constant_value(self) -> ConstantScalar | None:
        """The value if this is a constant, else None."""
        if not self.terms:
            return ZERO
        if len(self.terms) == 1:
            (m, c), = self.terms.items()
            if m == Mono((0,) * self.dim):
                return c
        return None

    # calculus
    def partial(self, i: int) -> "ScalarExpr":
        """Derivative in x_i (1-based)."""
        if not 1 <= i <= self.dim:
            raise DomainError(f"axis {i} outside 1..{self.dim}")
        k = i - 1
        raw: dict[Mono, ConstantScalar] = defaultdict(lambda: ZERO)

        def bump(m: Mono, **kw) -> Mono:
            x = list(kw.pop("x", m.x))
            x[k] += 1
            return m._replace(x=tuple(x), **kw)

        for m, c in self.terms.items():
            if m.x[k]:
                x = list(m.x)
                x[k] -= 1
                raw[m._replace(x=tuple(x))] += c * m.x[k]
            if m.r:
                raw[bump(m, r=m.r - 2)] += c * m.r
            for p, g in enumerate(m.gauss):
                if g:
                    raw[bump(m, t=m.t + p)] += c * (-2 * g)
            for j, n in enumerate(m.f):
                f = tuple(sorted(m.f[:j] + (n + 1,) + m.f[j + 1:]))
                raw[bump(m, f=f)] += c * 2
            for j, (name, n) in enumerate(m.phi):
                phi = tuple(sorted(m.phi[:j] + ((name, n + 1),) + m.phi[j + 1:]))
                raw[bump(m, phi=phi)] += c * 2
        return ScalarExpr(self.dim, dict(raw))

    def partial_t(self) -> "ScalarExpr":
        raw: dict[Mono, ConstantScalar] = defaultdict(lambda: ZERO)
        for m, c in self.terms.items():
            if m.t:
                raw[m._replace(t=m.t - 1)] += c * m.t
            for p, g in enumerate(m.gauss):
                if p and g:
                    raw[m._replace(t=m.t + p - 1, r=m.r + 2)] += c * (-p * g)
        return ScalarExpr(self.dim, dict(raw))

    def subs_t(self, value) -> "ScalarExpr":
        value = _frac(value)
        raw: dict[Mono, ConstantScalar] = defaultdict(lambda: ZERO)
        for m, c in self.terms.items():
            if m.t and value == 0:
                continue
            g = _trim([sum(gk * value**p for p, gk in enumerate(m.gauss))]) if m.gauss else ()
            raw[m._replace(t=0, gauss=g)] += c * value**m.t
        return ScalarExpr(self.dim, dict(raw))

    def t_integrate(self) -> "ScalarExpr":
        """Termwise integral over t in [0, inf) of t^a exp(-(g0 + g2 t^2) r^2)."""
        raw: dict[Mono, ConstantScalar] = defaultdict(lambda: ZERO)
        for m, c in self.terms.items():
            g = m.gauss + (Fraction(0),) * (3 - len(m.gauss))
            if len(m.gauss) > 3 or g[1] != 0 or g[2] <= 0:
                raise IntegrationError(f"no Gaussian decay in t for term {self._render_term(m, c)}")
            a = m.t
            # int_0^inf t^a e^{-g2 t^2 r^2} dt = 1/2 Gamma((a+1)/2) g2^{-(a+1)/2} r^{-(a+1)}
            if a % 2:
                scale = g[2] ** (-(a + 1) // 2)
            else:
                root = rational_sqrt(g[2])
                if root is None:
                    raise IntegrationError(f"sqrt({g[2]}) is not rational")
                scale = root ** (-(a + 1))
            value = c * gamma_half(a + 1) * Fraction(1, 2) * scale
            raw[m._replace(t=0, r=m.r - a - 1, gauss=_trim([g[0]]))] += value
        return ScalarExpr(self.dim, dict(raw))

    def max_t_degree(self) -> int:
        return max((m.t for m in self.terms), default=0)

    def has_negative_r(self) -> bool:
        return any(m.r < 0 for m in self.terms)

    # output
    def sorted_terms(self) -> list[tuple[Mono, ConstantScalar]]:
        return sorted(self.terms.items(), key=lambda mc: _mono_sort_key(mc[0]))

    def _render_term(self, m: Mono, c: ConstantScalar) -> str:
        factors = []
        for i, e in enumerate(m.x, 1):
            if e == 1:
                factors.append(f"x{i}")
            elif e:
                factors.append(f"x{i}^{e}")
        if m.r == 1:
            factors.append("r")
        elif m.r:
            factors.append(f"r^{m.r}")
        if m.gauss:
            factors.append(f"exp(-({_render_tpoly(m.gauss)})r^2)")
        for n in m.f:
            factors.append("f" + ("'" * n if n <= 3 else f"^({n})") + "(r^2)")
        for name, n in m.phi:
            factors.append(name + ("'" * n if n <= 3 else f"^({n})") + "(r^2)")
        if m.t == 1:
            factors.append("t")
        elif m.t:
            factors.append(f"t^{m.t}")
        if m.th == 1:
            factors.append("theta")
        elif m.th:
            factors.append(f"theta^{m.th}")
        if m.eth:
            factors.append("exp(i theta)" if m.eth == 1 else f"exp({m.eth} i theta)")
        ctext = c.render()
        if len(c.terms) > 1:
            ctext = f"({ctext})"
        if not factors:
            return ctext
        if ctext == "1":
            return "*".join(factors)
        if ctext == "-1":
            return "-" + "*".join(factors)
        return ctext + "*" + "*".join(factors)

    def render(self) -> str:
        if not self.terms:
            return "0"
        out = ""
        for m, c in self.sorted_terms():
            s = self._render_term(m, c)
            if not out:
                out = s
            elif s.startswith("-"):
                out += " - " + s[1:]
            else:
                out += " + " + s
        return out

    def __repr__(self):
        return f"ScalarExpr[{self.dim}]({self.render()})"


def _mono_sort_key(m: Mono):
    return (m.x, m.r, m.gauss, m.f, m.phi, m.t, m.th, m.eth)


def _render_tpoly(p: tuple[Fraction, ...]) -> str:
    parts = []
    for k, c in enumerate(p):
        if not c:
            continue
        mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
        if mono and c == 1:
            parts.append(mono)
        elif mono:
            parts.append(f"{c}{mono}" if c.denominator == 1 else f"({c}){mono}")
        else:
            parts.append(str(c))
    return " + ".join(parts) if parts else "0"


def scalar_normalize(s: ScalarExpr) -> ScalarExpr:
    return ScalarExpr(s.dim, dict(s.terms))


def scalar_partial(i: int, s: ScalarExpr) -> ScalarExpr:
    return s.partial(i)


def t_integrate(s: ScalarExpr) -> ScalarExpr:
    return s.t_integrate()
