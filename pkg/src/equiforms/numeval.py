"""Numeric evaluation of symbolic forms, quadrature over R^d and in t, and
finite-difference checks of the symbolic differential."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Callable

import numpy as np
from scipy.integrate import quad_vec
from scipy.special import roots_legendre

from .coeff import DomainError, IntegrationError, ScalarExpr
from .exterior import BiForm, XPoly, exterior_d, so_pairs


@dataclass(frozen=True)
class CutoffSpec:
    """f = 1 on [0, R^2/4], f = 0 on [R^2, inf), 1 - S((u - a)/(b - a)) in between with
    S the quintic smoothstep (C^2 at both ends)."""

    R: float = 2.0

    @property
    def inner(self) -> float:
        return self.R**2 / 4

    @property
    def outer(self) -> float:
        return self.R**2

    def __call__(self, u, order: int = 0) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        a, b = self.inner, self.outer
        w = b - a
        s = np.clip((u - a) / w, 0.0, 1.0)
        inside = (u > a) & (u < b)
        if order == 0:
            val = 1 - (10 * s**3 - 15 * s**4 + 6 * s**5)
            return np.where(u >= b, 0.0, val)
        if order == 1:
            ds = 30 * s**2 - 60 * s**3 + 30 * s**4
        elif order == 2:
            ds = 60 * s - 180 * s**2 + 120 * s**3
        elif order == 3:
            ds = 60 - 360 * s + 360 * s**2
        else:
            raise DomainError(f"cutoff derivative of order {order} not available")
        return np.where(inside, -ds / w**order, 0.0)


DEFAULT_CUTOFF = CutoffSpec()


def _x_values(dim: int, X) -> dict[tuple[int, int], complex]:
    """Numeric values of X_kl from a matrix, a dict, or None (all zero)."""
    if X is None:
        return {p: 0.0 for p in so_pairs(dim)}
    if isinstance(X, dict):
        out = {}
        for k, l in so_pairs(dim):
            if (k, l) in X:
                out[(k, l)] = X[(k, l)]
            elif (l, k) in X:
                out[(k, l)] = -X[(l, k)]
            else:
                out[(k, l)] = 0.0
        return out
    M = np.asarray(X)
    return {(k, l): M[k - 1, l - 1] for k, l in so_pairs(dim)}


def eval_scalar(
    s: ScalarExpr,
    x: np.ndarray,
    t: float | None = None,
    theta: float | None = None,
    cutoff: CutoffSpec | None = None,
    radial: dict[str, Callable] | None = None,
) -> np.ndarray:
    """Values of s at the points x (shape (npts, dim))."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    r2 = (x**2).sum(axis=1)
    r = np.sqrt(r2)
    out = np.zeros(len(x), dtype=complex)
    for m, c in s.terms.items():
        val = np.full(len(x), complex(c))
        for i, e in enumerate(m.x):
            if e:
                val = val * x[:, i] ** e
        if m.r:
            val = val * r**m.r
        if m.gauss:
            if t is None and len(m.gauss) > 1:
                raise DomainError("t is needed to evaluate a t-dependent Gaussian")
            g = sum(float(q) * (t or 0.0) ** k for k, q in enumerate(m.gauss))
            val = val * np.exp(-g * r2)
        for n in m.f:
            if cutoff is None:
                raise DomainError("a concrete cutoff is needed to evaluate f atoms")
            val = val * cutoff(r2, n)
        for name, n in m.phi:
            if radial is None or name not in radial:
                raise DomainError(f"formal atom {name!r} cannot be instantiated")
            val = val * radial[name](r2, n)
        if m.t:
            if t is None:
                raise DomainError("t is needed")
            val = val * t**m.t
        if m.th or m.eth:
            if theta is None:
                raise DomainError("theta is needed")
            if theta == 0 and m.th:
                # removable singularity at theta = 0: keep the theta^0 Taylor coefficient
                val = val * ((1j * m.eth) ** -m.th / factorial(-m.th) if m.th < 0 else 0.0)
            else:
                val = val * theta**m.th * np.exp(1j * m.eth * theta)
        out += val
    return out


def eval_xpoly(p: XPoly, x, X=None, **kw) -> np.ndarray:
    vals = _x_values(p.dim, X)
    pairs = so_pairs(p.dim)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    out = np.zeros(len(x), dtype=complex)
    for k, s in p.terms.items():
        w = 1.0 + 0j
        for pair, e in zip(pairs, k):
            if e:
                w *= vals[pair] ** e
        if w != 0:
            out += w * eval_scalar(s, x, **kw)
    return out


def eval_form(a: BiForm, x, X=None, **kw) -> np.ndarray:
    """NumericForm values: array (npts, 2^dim), column I is the dx_I coefficient."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    out = np.zeros((len(x), 1 << a.dim), dtype=complex)
    for (I, J), p in a.terms.items():
        if J:
            raise DomainError("e-generators must be integrated out before evaluation")
        out[:, I] += eval_xpoly(p, x, X, **kw)
    return out


def numeric_wedge(dim: int, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Grassmann product of NumericForms (arrays (..., 2^dim))."""
    from .superconn import product_table

    out = np.zeros(np.broadcast_shapes(u.shape, v.shape), dtype=complex)
    for I, J, K, s in product_table(dim):
        out[..., K] += s * u[..., I] * v[..., J]
    return out


# quadrature rules


@lru_cache(maxsize=None)
def _gl(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    z, w = roots_legendre(n)
    return 0.5 * (b - a) * z + 0.5 * (b + a), 0.5 * (b - a) * w


@lru_cache(maxsize=None)
def sphere_rule(dim: int, m: int, angles: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Points and weights on S^{dim-1}, exact for polynomials of degree < m.

    ``angles`` overrides the number of trapezoid nodes per circle (default 2m);
    integrands invariant under the circle rotations need only one."""
    if dim == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    na = angles or 2 * m
    phi = 2 * np.pi * np.arange(na) / na
    wphi = np.full(na, 2 * np.pi / na)
    if dim == 2:
        return np.stack([np.cos(phi), np.sin(phi)], axis=1), wphi
    if dim == 3:
        u, wu = _gl(m, -1.0, 1.0)
        U, P = np.meshgrid(u, phi, indexing="ij")
        s = np.sqrt(1 - U**2)
        pts = np.stack([s * np.cos(P), s * np.sin(P), U], axis=-1).reshape(-1, 3)
        return pts, np.outer(wu, wphi).ravel()
    if dim == 4:
        # x = (sqrt(1-u) cos a, sqrt(1-u) sin a, sqrt(u) cos b, sqrt(u) sin b), dS = du da db / 2
        u, wu = _gl(m, 0.0, 1.0)
        U, A, B = np.meshgrid(u, phi, phi, indexing="ij")
        c, s = np.sqrt(1 - U), np.sqrt(U)
        pts = np.stack([c * np.cos(A), c * np.sin(A), s * np.cos(B), s * np.sin(B)], axis=-1).reshape(-1, 4)
        w = 0.5 * (wu[:, None, None] * wphi[None, :, None] * wphi[None, None, :]).ravel()
        return pts, w
    raise DomainError("numeric integration is limited to dim <= 4")


def ball_rule(dim: int, R: float, nr: int = 24, m: int = 24, panels: tuple[float, ...] = (0.0, 0.5, 1.0)):
    """Spherical-radial product rule on the ball of radius R, composite in the radius."""
    pts_s, w_s = sphere_rule(dim, m)
    pts, wts = [], []
    for a, b in zip(panels[:-1], panels[1:]):
        rho, wr = _gl(nr, a * R, b * R)
        pts.append((rho[:, None, None] * pts_s[None]).reshape(-1, dim))
        wts.append((wr[:, None] * rho[:, None] ** (dim - 1) * w_s[None]).ravel())
    return np.concatenate(pts), np.concatenate(wts)


def _hermite_rule(dim: int, n: int, c: float):
    from numpy.polynomial.hermite import hermgauss

    z, w = hermgauss(n)
    z = z / np.sqrt(c)
    w = w / np.sqrt(c)
    grids = np.meshgrid(*([z] * dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    W = np.ones(1)
    for _ in range(dim):
        W = np.outer(W, w).ravel()
    return pts, W


def integrate_numeric(
    a: BiForm,
    X=None,
    cutoff: CutoffSpec | None = None,
    t: float | None = None,
    theta: float | None = None,
    nodes: int = 24,
) -> complex:
    """Integral over R^dim of the dx_1...dx_dim coefficient of a."""
    dim = a.dim
    if dim > 4:
        raise DomainError("numeric integration is limited to dim <= 4")
    cutoff = cutoff or DEFAULT_CUTOFF
    top = a.terms.get(((1 << dim) - 1, 0))
    if top is None:
        return 0j
    gauss_part: dict[tuple, XPoly] = {}
    cut_part = XPoly(dim)
    for k, s in top.terms.items():
        for m, c in s.terms.items():
            term = XPoly(dim, {k: ScalarExpr(dim, {m: c}, canonical=True)})
            if m.f:
                cut_part = cut_part + term
            elif m.gauss and m.r >= 0 and m.r % 2 == 0:
                g = sum(float(q) * (t or 0.0) ** j for j, q in enumerate(m.gauss))
                if g <= 0:
                    raise IntegrationError("Gaussian atom is not decaying")
                gauss_part[round(g, 14)] = gauss_part.get(round(g, 14), XPoly(dim)) + term
            elif m.gauss:
                raise IntegrationError("odd or negative r-power with a Gaussian; not supported")
            else:
                raise IntegrationError("integrand is neither Gaussian-decaying nor cut off")
    kw = {"t": t, "theta": theta, "cutoff": cutoff}
    total = 0j
    for c, poly in gauss_part.items():
        pts, w = _hermite_rule(dim, nodes, c)
        # the Hermite weight carries exp(-c r^2); evaluate the remaining factor
        vals = eval_xpoly(poly, pts, X, **kw) * np.exp(c * (pts**2).sum(axis=1))
        total += np.dot(w, vals)
    if not cut_part.is_zero():
        pts, w = ball_rule(dim, cutoff.R, nodes, nodes)
        total += np.dot(w, eval_xpoly(cut_part, pts, X, **kw))
    return complex(total)


def quadrature_t(profile: Callable[[float], np.ndarray], tol: float = 1e-10, probe: float = 60.0) -> np.ndarray:
    """int_0^infty profile(t) dt for an exponentially decaying vector-valued profile."""
    far = np.abs(np.asarray(profile(probe)))
    near = np.abs(np.asarray(profile(1.0)))
    if far.max(initial=0.0) > 1e-12 * max(near.max(initial=0.0), 1.0):
        raise IntegrationError("profile does not decay in t")
    val, err = quad_vec(profile, 0.0, np.inf, epsabs=tol * 1e-2, epsrel=tol)
    if err > tol * max(1.0, float(np.abs(val).max(initial=0.0))):
        raise IntegrationError(f"t-quadrature did not converge (error estimate {err:.2e})")
    return val


def fd_exterior_derivative_check(a: BiForm, x, X=None, h: float = 1e-5, **kw) -> float:
    """Max deviation between central finite differences and the symbolic d, at one point."""
    dim = a.dim
    x = np.asarray(x, dtype=float)
    sym = eval_form(exterior_d(a), x[None], X, **kw)[0]
    fd = np.zeros(1 << dim, dtype=complex)
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = h
        der = (eval_form(a, (x + e)[None], X, **kw)[0] - eval_form(a, (x - e)[None], X, **kw)[0]) / (2 * h)
        dxi = np.zeros(1 << dim, dtype=complex)
        dxi[1 << i] = 1.0
        fd += numeric_wedge(dim, dxi, der)
    return float(np.abs(fd - sym).max())


def numeric_contract_vx(dim: int, u: np.ndarray, x: np.ndarray, X) -> np.ndarray:
    """iota(VX) of a NumericForm at the point x, with (VX)_i = sign * sum_j X_ij x_j."""
    from .equivariant import VECTOR_FIELD_SIGN

    M = np.asarray(X, dtype=float)
    V = VECTOR_FIELD_SIGN * (M @ np.asarray(x, dtype=float))
    out = np.zeros_like(u)
    for I in range(1 << dim):
        for k in range(dim):
            bit = 1 << k
            if I & bit:
                n = bin(I & (bit - 1)).count("1")
                out[..., I & ~bit] += (-1) ** n * V[k] * u[..., I]
    return out
