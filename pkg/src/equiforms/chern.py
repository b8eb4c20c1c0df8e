"""Quillen Chern characters of equivariant symbols on R^d.

A symbol is stored through its odd Hermitian endomorphism v(x) = sum_a V_a x^a on a
Z/2-graded space, together with its moment.  With the trivial connection the
curvature of A + i t v is

    F(t) = -t^2 v^2 + i t dv + mu,

and Ch = Str e^{F}, eta = -Str(i v e^{F}), beta = int_0^infty eta dt.

Two routes are provided: an exact one for symbols with v^2 = r^2 and a diagonal
U(1) moment (the Bott symbol and its products), where e^{F} is a finite Volterra
sum with divided differences of exp at the points i theta n_j; and a numeric one
through ``superconn.super_exp_numeric`` for everything else.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial

import numpy as np

from .coeff import ConstantScalar, DomainError, ScalarExpr
from .equivariant import RelativePair, equivariant_d, p_chi
from .exterior import BiForm, XPoly, so_pairs, subs_t, t_integrate_form
from .numeval import DEFAULT_CUTOFF, CutoffSpec, _gl, eval_form, integrate_numeric, numeric_wedge, sphere_rule
from .superconn import (
    SuperMatrixForm,
    clifford_generators,
    j_half,
    super_exp_numeric,
    supertrace,
    y_tau_matrix,
)
from .thom import build_thom, cutoff, retarded_identity_checks

I_UNIT = ConstantScalar.i()


@dataclass(frozen=True, eq=False)
class SymbolMorphism:
    """v(x) = sum_a V_a x^a (odd, Hermitian) on C^N with grading ``grading``.

    The moment is i theta diag(theta_weights) + c(Y) (spin symbols) + i theta
    (spin^c).  ``planes`` lists the coordinate planes rotated by theta, giving the
    so(V) element X_kl = theta for (k, l) in planes.
    """

    name: str
    dim: int
    grading: tuple[int, ...]
    v_coeffs: tuple[tuple[tuple[int, ...], np.ndarray], ...]
    theta_weights: tuple[int, ...] | None = None
    spin_n: int = 0
    spinc: bool = False
    planes: tuple[tuple[int, int], ...] = ()
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def size(self) -> int:
        return len(self.grading)

    def v(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.zeros((len(x), self.size, self.size), dtype=complex)
        for a, V in self.v_coeffs:
            out += np.prod(x**np.array(a), axis=1)[:, None, None] * V
        return out

    def dv(self, x) -> np.ndarray:
        """(npts, dim, N, N): partial derivatives of v."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.zeros((len(x), self.dim, self.size, self.size), dtype=complex)
        for a, V in self.v_coeffs:
            for i, e in enumerate(a):
                if e:
                    b = list(a)
                    b[i] -= 1
                    out[:, i] += e * np.prod(x ** np.array(b), axis=1)[:, None, None] * V
        return out

    def mu(self, params: dict) -> np.ndarray:
        N = self.size
        out = np.zeros((N, N), dtype=complex)
        theta = params.get("theta", 0.0)
        if self.theta_weights is not None:
            out += np.diag(1j * theta * np.array(self.theta_weights, dtype=float))
        if self.spin_n:
            mod = clifford_generators(self.spin_n)
            for k, lam in enumerate(params.get("lam", [0.0] * self.spin_n)):
                out += lam * mod.gens[2 * k] @ mod.gens[2 * k + 1]
        if self.spinc:
            out += 1j * theta * np.eye(N)
        return out

    def x_matrix(self, params: dict) -> np.ndarray:
        """The so(V) element acting on V."""
        if self.spin_n:
            return y_tau_matrix(params.get("lam", [0.0] * self.spin_n))
        X = np.zeros((self.dim, self.dim))
        theta = params.get("theta", 0.0)
        for k, l in self.planes:
            X[k - 1, l - 1] = theta
            X[l - 1, k - 1] = -theta
        return X

    def h(self, x) -> np.ndarray:
        """Smallest eigenvalue of v(x)^2; the support is where it vanishes."""
        v = self.v(x)
        return np.linalg.eigvalsh(v @ v)[:, 0]


def v_sigma(s: SymbolMorphism, x) -> np.ndarray:
    return s.v(x)


def _mono(dim: int, i: int) -> tuple[int, ...]:
    a = [0] * dim
    a[i] = 1
    return tuple(a)


@lru_cache(maxsize=None)
def bott_symbol() -> SymbolMorphism:
    """sigma(z) = z on C = R^2; v = [[0, conj z], [z, 0]], moment diag(0, i theta)."""
    A = np.array([[0, 1], [1, 0]], dtype=complex)
    B = np.array([[0, -1j], [1j, 0]], dtype=complex)
    return SymbolMorphism("bott", 2, (1, -1), ((_mono(2, 0), A), (_mono(2, 1), B)), (0, 1), planes=((1, 2),))


def constant_symbol(value: complex = 1.0) -> SymbolMorphism:
    """sigma = value on C over R^2; invertible everywhere when value != 0."""
    V = np.array([[0, np.conj(value)], [value, 0]], dtype=complex)
    return SymbolMorphism("const", 2, (1, -1), (((0, 0), V),), (0, 0), planes=((1, 2),))


@lru_cache(maxsize=None)
def spin_symbol(n: int, spinc: bool = False) -> SymbolMorphism:
    """sigma_V = -i c(x) on the spinor module of R^{2n}."""
    mod = clifford_generators(n)
    d = 2 * n
    coeffs = tuple((_mono(d, k), -1j * mod.gens[k]) for k in range(d))
    grading = tuple(int(g) for g in mod.grading)
    return SymbolMorphism("spinc" if spinc else "spin", d, grading, coeffs, None, n, spinc)


def odot_product(s1: SymbolMorphism, s2: SymbolMorphism) -> SymbolMorphism:
    """Graded tensor product: v = v1 (x) 1 + G1 (x) v2 on E1 (x) E2 over R^{d1 + d2}."""
    if s1.spin_n or s2.spin_n:
        raise DomainError("products of spin symbols are not catalogued")
    d1, d2 = s1.dim, s2.dim
    G1 = np.diag(np.array(s1.grading, dtype=complex))
    I2 = np.eye(s2.size)
    coeffs = []
    for a, V in s1.v_coeffs:
        coeffs.append((tuple(a) + (0,) * d2, np.kron(V, I2)))
    for a, V in s2.v_coeffs:
        coeffs.append(((0,) * d1 + tuple(a), np.kron(G1, V)))
    grading = tuple(int(g) for g in np.kron(np.array(s1.grading), np.array(s2.grading)))
    weights = None
    if s1.theta_weights is not None and s2.theta_weights is not None:
        weights = tuple(a + b for a, b in product(s1.theta_weights, s2.theta_weights))
    planes = tuple(s1.planes) + tuple((k + d1, l + d1) for k, l in s2.planes)
    return SymbolMorphism(f"{s1.name}*{s2.name}", d1 + d2, grading, tuple(coeffs), weights, planes=planes)


@lru_cache(maxsize=None)
def symbol_catalogue(name: str) -> SymbolMorphism:
    """'bott', 'complex:1', 'complex:2', 'spin:n', 'spinc:n', 'bott*bott'."""
    if name in ("bott", "complex:1"):
        return bott_symbol()
    if name in ("bott*bott", "complex:2"):
        return odot_product(bott_symbol(), bott_symbol())
    kind, _, n = name.partition(":")
    if kind in ("spin", "spinc") and n.isdigit():
        return spin_symbol(int(n), kind == "spinc")
    raise DomainError(f"unknown symbol {name!r}")


# numeric route


def curvature_numeric(s: SymbolMorphism, t: float, params: dict, x) -> SuperMatrixForm:
    x = np.atleast_2d(np.asarray(x, dtype=float))
    v = s.v(x)
    dv = s.dv(x)
    F = SuperMatrixForm.zeros(s.dim, s.grading, (len(x),))
    F.data[:, 0] = -(t**2) * v @ v + s.mu(params)
    for i in range(s.dim):
        F.data[:, 1 << i] = 1j * t * dv[:, i]
    return F


curvature_sigma = curvature_numeric


def ch_numeric(s: SymbolMorphism, t: float, params: dict, x) -> tuple[np.ndarray, np.ndarray]:
    """(Str e^{F(t)}, -Str(i v e^{F(t)})) at the points x, arrays (npts, 2^dim)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    E = super_exp_numeric(curvature_numeric(s, t, params, x))
    iv = SuperMatrixForm.zeros(s.dim, s.grading, (len(x),))
    iv.data[:, 0] = 1j * s.v(x)
    return supertrace(E), -supertrace(iv @ E)


def beta_numeric(s: SymbolMorphism, params: dict, x, T: float | None = None, nodes: int = 48) -> np.ndarray:
    """int_0^infty eta dt by Gauss-Legendre on [0, T]; T defaults to 9 / sqrt(min h)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    hmin = float(s.h(x).min())
    if hmin <= 1e-12:
        raise DomainError("beta is only defined off the support of the symbol")
    T = T or 9.0 / np.sqrt(hmin)
    tn, tw = _gl(nodes, 0.0, T)
    out = np.zeros((len(x), 1 << s.dim), dtype=complex)
    for t, w in zip(tn, tw):
        out += w * ch_numeric(s, t, params, x)[1]
    return out


# exact route


def _const(z: complex) -> ConstantScalar:
    re = Fraction(z.real).limit_denominator(10**6)
    im = Fraction(z.imag).limit_denominator(10**6)
    if abs(float(re) - z.real) > 1e-12 or abs(float(im) - z.imag) > 1e-12:
        raise DomainError(f"coefficient {z} is not a small Gaussian rational")
    return ConstantScalar.of(re) + I_UNIT * im


@dataclass(frozen=True)
class ExactSuperMatrix:
    dim: int
    grading: tuple[int, ...]
    entries: dict  # (a, b) -> BiForm

    def get(self, a: int, b: int) -> BiForm:
        return self.entries.get((a, b), BiForm(self.dim))

    def odd(self, a: int, b: int) -> bool:
        return self.grading[a] != self.grading[b]

    def __matmul__(self, other: "ExactSuperMatrix") -> "ExactSuperMatrix":
        N = len(self.grading)
        out = {}
        for a in range(N):
            for b in range(N):
                acc = BiForm(self.dim)
                for c in range(N):
                    x, y = self.entries.get((a, c)), other.entries.get((c, b))
                    if x is None or y is None:
                        continue
                    acc = acc + x * (y.graded_parity() if self.odd(a, c) else y)
                if not acc.is_zero():
                    out[(a, b)] = acc
        return ExactSuperMatrix(self.dim, self.grading, out)

    def supertrace(self) -> BiForm:
        out = BiForm(self.dim)
        for a, g in enumerate(self.grading):
            if (a, a) in self.entries:
                out = out + self.entries[(a, a)] * g
        return out


def exact_v(s: SymbolMorphism) -> ExactSuperMatrix:
    d, N = s.dim, s.size
    out = {}
    for a in range(N):
        for b in range(N):
            acc = ScalarExpr.zero(d)
            for mono, V in s.v_coeffs:
                if V[a, b] != 0:
                    acc = acc + ScalarExpr.mono(d, _const(complex(V[a, b])), x=tuple(mono))
            if not acc.is_zero():
                out[(a, b)] = BiForm.scalar(d, acc)
    return ExactSuperMatrix(d, s.grading, out)


@lru_cache(maxsize=None)
def _dd_exp_theta(dim: int, ns: tuple[int, ...]) -> ScalarExpr:
    """Divided difference of exp at the points i theta n (sorted tuple)."""
    k = len(ns) - 1
    if ns[0] == ns[-1]:
        return ScalarExpr.etheta(dim, ns[0]) * Fraction(1, factorial(k))
    lo, hi = ns[0], ns[-1]
    num = _dd_exp_theta(dim, ns[1:]) - _dd_exp_theta(dim, ns[:-1])
    # 1 / (i theta (hi - lo)) = -i theta^{-1} / (hi - lo)
    return num * ScalarExpr.theta(dim, -1) * (I_UNIT * Fraction(-1, hi - lo))


def dd_exp_theta(dim: int, ns) -> ScalarExpr:
    return _dd_exp_theta(dim, tuple(sorted(ns)))


def _require_exact(s: SymbolMorphism) -> None:
    if s.theta_weights is None or s.spin_n or s.spinc:
        raise DomainError("exact route needs a diagonal U(1) moment (Bott-type symbol)")


@lru_cache(maxsize=None)
def exact_exp_curvature(s: SymbolMorphism) -> ExactSuperMatrix:
    """e^{F(t)} with t symbolic, for v^2 = r^2 Id and moment i theta diag(n)."""
    _require_exact(s)
    d, N = s.dim, s.size
    v = exact_v(s)
    v2 = v @ v
    r2 = BiForm.scalar(d, ScalarExpr.r(d, 2))
    for a in range(N):
        for b in range(N):
            if v2.get(a, b) != (r2 if a == b else BiForm(d)):
                raise DomainError("exact route needs v^2 = r^2 Id")
    it = ScalarExpr.t(d) * I_UNIT
    S = {}
    for (a, b), e in v.entries.items():
        s_ab = e.terms[(0, 0)].scalar_part()
        acc = BiForm(d)
        for i in range(1, d + 1):
            acc = acc + BiForm.dx(d, i, coeff=s_ab.partial(i) * it)
        if not acc.is_zero():
            S[(a, b)] = acc
    n = s.theta_weights
    out: dict = {}

    def add(key, val):
        out[key] = out[key] + val if key in out else val

    for a in range(N):
        add((a, a), BiForm.scalar(d, ScalarExpr.etheta(d, n[a])))
    for k in range(1, d + 1):
        for path in product(range(N), repeat=k + 1):
            acc = S.get((path[0], path[1]))
            if acc is None:
                continue
            odd = s.grading[path[0]] != s.grading[path[1]]
            for j in range(1, k):
                nxt = S.get((path[j], path[j + 1]))
                if nxt is None:
                    acc = None
                    break
                acc = acc * (nxt.graded_parity() if odd else nxt)
                odd = s.grading[path[0]] != s.grading[path[j + 1]]
                if acc.is_zero():
                    break
            if acc is None or acc.is_zero():
                continue
            add((path[0], path[-1]), acc * dd_exp_theta(d, [n[p] for p in path]))
    gauss = ScalarExpr.gaussian(d, (0, 0, 1))
    return ExactSuperMatrix(d, s.grading, {key: val * gauss for key, val in out.items() if not val.is_zero()})


def theta_matrix(s: SymbolMorphism) -> dict:
    th = ScalarExpr.theta(s.dim)
    return {p: th for p in s.planes}


def theta_d(s: SymbolMorphism):
    """The equivariant differential for the U(1) action of the symbol."""
    m = theta_matrix(s)
    return lambda a: equivariant_d(a, m)


def ch_quillen_exact(s: SymbolMorphism) -> BiForm:
    """Str e^{F(t)}, t symbolic."""
    return exact_exp_curvature(s).supertrace()


def transgression_eta_exact(s: SymbolMorphism) -> BiForm:
    iv = exact_v(s)
    iv = ExactSuperMatrix(iv.dim, iv.grading, {k: e * I_UNIT for k, e in iv.entries.items()})
    return -(iv @ exact_exp_curvature(s)).supertrace()


def beta_sigma_exact(s: SymbolMorphism) -> BiForm:
    return t_integrate_form(transgression_eta_exact(s))


def g_theta(dim: int) -> ScalarExpr:
    """g(i theta) = (e^{i theta} - 1)/(i theta)."""
    return (ScalarExpr.etheta(dim, 1) - 1) * ScalarExpr.theta(dim, -1) * (-I_UNIT)


def g_numeric(theta: float) -> complex:
    if abs(theta) < 1e-8:
        return 1 + 0.5j * theta
    return (np.exp(1j * theta) - 1) / (1j * theta)


@dataclass(frozen=True)
class ChernTriple:
    ch_rel: RelativePair
    ch_sup: BiForm
    ch_q: BiForm
    ch_t: BiForm
    eta_t: BiForm


def ch_triple(s: SymbolMorphism) -> ChernTriple:
    C = ch_quillen_exact(s)
    eta = transgression_eta_exact(s)
    beta = t_integrate_form(eta)
    rel = RelativePair(subs_t(C, 0), beta)
    chi = cutoff(s.dim)
    return ChernTriple(rel, p_chi(rel, chi), subs_t(C, 1), C, eta)


def ch_triple_checks(s: SymbolMorphism) -> list[dict]:
    """Closedness and the retarded transgression identities, exactly."""
    D = theta_d(s)
    tr = ch_triple(s)
    report = []
    for name, form in (("D Ch(t) = 0", tr.ch_t), ("D Ch_sup = 0", tr.ch_sup), ("D Ch_Q = 0", tr.ch_q)):
        res = D(form)
        report.append({"check": name, "zero": res.is_zero(), "residual": res})
    report += retarded_identity_checks(tr.ch_t, tr.eta_t, tr.ch_rel.beta, cutoff(s.dim), D)
    return report


def specialize_theta(a, s: SymbolMorphism):
    """Substitute X_kl -> theta on the rotated planes and 0 elsewhere."""
    th = XPoly.scalar(s.dim, ScalarExpr.theta(s.dim))
    values = {p: (th if p in s.planes else XPoly(s.dim)) for p in so_pairs(s.dim)}
    if isinstance(a, RelativePair):
        return RelativePair(specialize_theta(a.alpha, s), specialize_theta(a.beta, s))
    return a.map_coeffs(lambda p: p.subs(values))


def bott_thom_comparison(s: SymbolMorphism | None = None) -> list[dict]:
    """Ch(sigma) = (2 i pi)^n g(i theta)^n Th(V)(theta) for the three representatives."""
    s = s or bott_symbol()
    n = s.dim // 2
    factor = g_theta(s.dim) ** n * (I_UNIT * ConstantScalar.pi_half(2) * 2) ** n
    tr = ch_triple(s)
    report = []
    for flavor, mine in (("rel", tr.ch_rel), ("c", tr.ch_sup), ("mq", tr.ch_q)):
        th = specialize_theta(build_thom(s.dim, flavor).payload, s)
        if isinstance(th, RelativePair):
            diff = (mine.alpha - th.alpha * factor) + (mine.beta - th.beta * factor)
        else:
            diff = mine - th * factor
        report.append({"check": f"Ch_{flavor} = (2 i pi g)^n Th_{flavor}", "zero": diff.is_zero(), "residual": diff})
    return report


# Riemann-Roch at sample points


def riemann_roch_check(case: str, n: int, samples: int = 10, seed: int = 0, t: float = 1.0) -> dict:
    """Ch_Q(sigma) against (2 i pi)^n factor Th_MQ at random (x, parameters)."""
    rng = np.random.default_rng(seed)
    if case in ("spin", "spinc"):
        s = spin_symbol(n, case == "spinc")
    elif case == "complex":
        if n not in (1, 2):
            raise DomainError("complex case is catalogued for n = 1, 2")
        s = symbol_catalogue(f"complex:{n}")
    else:
        raise DomainError(f"unknown case {case!r}")
    d = s.dim
    mq = build_thom(d, "mq").payload
    worst = 0.0
    rows = []
    for _ in range(samples):
        params = {"lam": list(rng.uniform(-2, 2, n)), "theta": float(rng.uniform(-3, 3))}
        x = rng.normal(size=(1, d))
        ch, _ = ch_numeric(s, t, params, x)
        X = s.x_matrix(params)
        if case == "complex":
            factor = g_numeric(params["theta"]) ** n
        else:
            factor = j_half(X)
            if case == "spinc":
                factor *= np.exp(1j * params["theta"])
        ref = (2j * np.pi) ** n * factor * eval_form(mq, x, X=X)
        dev = float(np.abs(ch - ref).max())
        worst = max(worst, dev)
        rows.append({"params": params, "x": x[0].tolist(), "deviation": dev})
    return {"case": case, "n": n, "samples": samples, "seed": seed, "max_deviation": worst, "rows": rows}


# multiplicativity at the integral level


def _shell_rule(dim: int, R: float, nr: int, m: int, angles: int | None = None):
    """Product rule on the shell R/2 <= |x| <= R where dchi is supported."""
    pts_s, w_s = sphere_rule(dim, m, angles)
    rho, wr = _gl(nr, R / 2, R)
    pts = (rho[:, None, None] * pts_s[None]).reshape(-1, dim)
    w = (wr[:, None] * rho[:, None] ** (dim - 1) * w_s[None]).ravel()
    return pts, w


def integral_ch_c_numeric(
    s: SymbolMorphism,
    theta: float,
    cut: CutoffSpec = DEFAULT_CUTOFF,
    nr: int = 16,
    m: int = 8,
    t_nodes: int = 40,
    angles: int | None = None,
    batch: int = 1024,
) -> complex:
    """int_{R^d} (chi Ch(A) + dchi beta): only dchi beta reaches top degree,
    and it lives on the shell where h > 0.  beta is computed numerically."""
    d = s.dim
    params = {"theta": theta}
    pts, w = _shell_rule(d, cut.R, nr, m, angles)
    top = (1 << d) - 1
    total = 0j
    # chi Ch(A) contributes only if Ch(A) has a top-degree part (it does not: F(0) = mu)
    for start in range(0, len(pts), batch):
        x = pts[start : start + batch]
        beta = beta_numeric(s, params, x, T=9.0 / (cut.R / 2), nodes=t_nodes)
        r2 = (x**2).sum(axis=1)
        dchi = np.zeros((len(x), 1 << d), dtype=complex)
        fp = cut(r2, 1)
        for i in range(d):
            dchi[:, 1 << i] = 2 * fp * x[:, i]
        total += np.dot(w[start : start + batch], numeric_wedge(d, dchi, beta)[:, top])
    return complex(total)


def multiplicativity_integral_check(thetas, nr: int = 12, m: int = 4, t_nodes: int = 30, angles: int = 2) -> dict:
    """int_{R^4} Ch_c(bott * bott) against (int_{R^2} Ch_c(bott))^2 and (2 i pi g)^2.

    The integrand is invariant under the rotations of both planes, so the circle
    rules of the Hopf parametrization need only ``angles`` nodes."""
    b = bott_symbol()
    bb = odot_product(b, b)
    rows = []
    worst = 0.0
    for th in thetas:
        th = float(th)
        single = integral_ch_c_numeric(b, th, nr=nr, m=m, t_nodes=t_nodes)
        double = integral_ch_c_numeric(bb, th, nr=nr, m=m, t_nodes=t_nodes, angles=angles)
        ref = (2j * np.pi * g_numeric(th)) ** 2
        dev = max(abs(double - ref), abs(double - single**2))
        worst = max(worst, dev)
        rows.append({"theta": th, "single": single, "product": double, "reference": ref, "deviation": dev})
    return {"max_deviation": worst, "rows": rows}


def ch_sup_numeric_integral(theta: float, s: SymbolMorphism | None = None) -> complex:
    """Second route: integrate the exact compactly supported form with the concrete cutoff."""
    s = s or bott_symbol()
    return integrate_numeric(ch_triple(s).ch_sup, theta=theta)


__all__ = [
    "SymbolMorphism",
    "ChernTriple",
    "ExactSuperMatrix",
    "bott_symbol",
    "spin_symbol",
    "constant_symbol",
    "odot_product",
    "symbol_catalogue",
    "v_sigma",
    "curvature_numeric",
    "curvature_sigma",
    "ch_numeric",
    "beta_numeric",
    "exact_exp_curvature",
    "ch_quillen_exact",
    "transgression_eta_exact",
    "beta_sigma_exact",
    "g_theta",
    "g_numeric",
    "ch_triple",
    "ch_triple_checks",
    "specialize_theta",
    "bott_thom_comparison",
    "riemann_roch_check",
    "integral_ch_c_numeric",
    "multiplicativity_integral_check",
    "ch_sup_numeric_integral",
]
