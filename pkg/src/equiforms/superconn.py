"""Numeric End(E)-valued forms on R^d: super products, Clifford modules, exponentials.

Elements are arrays of shape (..., 2^d, N, N): one N x N complex matrix per
dx-monomial (bit mask), with leading axes for sample points.  The product is the
graded tensor product with forms written first:

    (w (x) A)(w' (x) B) = (-1)^{|A||w'|} w w' (x) AB,

so an odd matrix passing an odd form picks up a sign, i.e. A is replaced by
G A G where G is the grading operator.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .coeff import DomainError
from .exterior import _eps_masks, popcount


@lru_cache(maxsize=None)
def product_table(dim: int) -> tuple[tuple[int, int, int, int], ...]:
    """(I, J, I|J, sign) for every disjoint pair of dx-masks."""
    out = []
    n = 1 << dim
    for I in range(n):
        for J in range(n):
            if I & J == 0:
                out.append((I, J, I | J, _eps_masks(I, J)))
    return tuple(out)


@lru_cache(maxsize=None)
def _product_index(dim: int):
    """Index arrays for the product: left masks, right masks, signed scatter matrix, odd masks."""
    table = product_table(dim)
    n = 1 << dim
    scatter = np.zeros((n, len(table)))
    for p, (_, _, K, s) in enumerate(table):
        scatter[K, p] = s
    Is = np.array([I for I, _, _, _ in table])
    Js = np.array([J for _, J, _, _ in table])
    return Is, Js, scatter, np.array([popcount(J) % 2 == 1 for J in range(n)])


@dataclass(frozen=True)
class SuperMatrixForm:
    """An End(E)-valued form with numeric entries; ``grading`` is the diagonal of G."""

    dim: int
    grading: np.ndarray
    data: np.ndarray  # (..., 2^dim, N, N)

    @property
    def size(self) -> int:
        return len(self.grading)

    @classmethod
    def zeros(cls, dim: int, grading, batch: tuple = ()) -> "SuperMatrixForm":
        g = np.asarray(grading, dtype=float)
        n = len(g)
        return cls(dim, g, np.zeros(batch + (1 << dim, n, n), dtype=complex))

    @classmethod
    def identity(cls, dim: int, grading, batch: tuple = ()) -> "SuperMatrixForm":
        out = cls.zeros(dim, grading, batch)
        out.data[..., 0, :, :] = np.eye(out.size)
        return out

    @classmethod
    def from_components(cls, dim: int, grading, comps: dict[int, np.ndarray], batch: tuple = ()) -> "SuperMatrixForm":
        out = cls.zeros(dim, grading, batch)
        for I, m in comps.items():
            out.data[..., I, :, :] = m
        return out

    def _like(self, data: np.ndarray) -> "SuperMatrixForm":
        return SuperMatrixForm(self.dim, self.grading, data)

    def __add__(self, other: "SuperMatrixForm") -> "SuperMatrixForm":
        return self._like(self.data + other.data)

    def __sub__(self, other: "SuperMatrixForm") -> "SuperMatrixForm":
        return self._like(self.data - other.data)

    def __neg__(self) -> "SuperMatrixForm":
        return self._like(-self.data)

    def scale(self, c) -> "SuperMatrixForm":
        c = np.asarray(c)
        if c.ndim:
            c = c.reshape(c.shape + (1, 1, 1))
        return self._like(self.data * c)

    def conj_grading(self) -> "SuperMatrixForm":
        g = self.grading
        return self._like(self.data * np.outer(g, g))

    def __matmul__(self, other: "SuperMatrixForm") -> "SuperMatrixForm":
        if self.dim != other.dim:
            raise DomainError("dimension mismatch")
        # G a G b = G (a (G b)) for the odd-degree components of b
        Is, Js, scatter, odd = _product_index(self.dim)
        g = self.grading[:, None]
        b = np.where(odd[:, None, None], g * other.data, other.data)
        pairs = self.data[..., Is, :, :] @ b[..., Js, :, :]
        pairs = np.where(odd[Js][:, None, None], g * pairs, pairs)
        n, N = scatter.shape[0], self.size
        flat = pairs.reshape(pairs.shape[:-3] + (len(Is), N * N))
        return self._like((scatter @ flat).reshape(pairs.shape[:-3] + (n, N, N)))

    def degree0(self) -> np.ndarray:
        return self.data[..., 0, :, :]

    def positive_part(self) -> "SuperMatrixForm":
        d = self.data.copy()
        d[..., 0, :, :] = 0
        return self._like(d)

    def parts(self) -> tuple["SuperMatrixForm", "SuperMatrixForm"]:
        """(even, odd) matrix parts."""
        g = self.grading
        mask = np.outer(g, g) > 0
        return self._like(self.data * mask), self._like(self.data * ~mask)


def supertrace(m: SuperMatrixForm) -> np.ndarray:
    """tr(G A) per dx-component; shape (..., 2^dim)."""
    return np.einsum("i,...ii->...", m.grading, m.data)


def supercommutator(a: SuperMatrixForm, b: SuperMatrixForm) -> SuperMatrixForm:
    """[a, b] for homogeneous total parity, extended bilinearly over the parity split."""
    out = SuperMatrixForm.zeros(a.dim, a.grading, np.broadcast_shapes(a.data.shape, b.data.shape)[:-3])
    for pa, x in enumerate(_total_parity_split(a)):
        for pb, y in enumerate(_total_parity_split(b)):
            sign = -1 if pa and pb else 1
            out = out + (x @ y) - (y @ x).scale(sign)
    return out


def _total_parity_split(a: SuperMatrixForm) -> tuple[SuperMatrixForm, SuperMatrixForm]:
    """Split by total parity = form degree + matrix parity."""
    even_m, odd_m = a.parts()
    deg_par = np.array([popcount(I) % 2 for I in range(1 << a.dim)])
    sel = deg_par.reshape((-1, 1, 1))
    ev = even_m.data * (sel == 0) + odd_m.data * (sel == 1)
    od = even_m.data * (sel == 1) + odd_m.data * (sel == 0)
    return a._like(ev), a._like(od)


def super_exp_numeric(m: SuperMatrixForm, taylor_terms: int = 18) -> SuperMatrixForm:
    """exp(m) by scaling and squaring with a truncated Taylor series in the full algebra."""
    if not np.iscomplexobj(m.data) and not np.isrealobj(m.data):
        raise DomainError("non-numeric entries")
    # the mean of the degree-0 diagonal is central: split it off as a scalar exponential
    n = m.size
    shift = np.trace(m.data[..., 0, :, :], axis1=-2, axis2=-1) / n
    centred = m.data.copy()
    centred[..., 0, :, :] -= shift[..., None, None] * np.eye(n)
    m = m._like(centred)
    norm = np.abs(m.data).sum(axis=(-1, -3)).max(initial=0.0) if m.data.size else 0.0
    s = int(np.ceil(np.log2(norm / 0.25))) if norm > 0.25 else 0
    a = m.scale(2.0 ** -s)
    out = SuperMatrixForm.identity(m.dim, m.grading, m.data.shape[:-3])
    term = out
    for k in range(1, taylor_terms + 1):
        term = (term @ a).scale(1.0 / k)
        out = out + term
    for _ in range(s):
        out = out @ out
    return out.scale(np.exp(shift))


def divided_difference_exp(points) -> complex:
    """exp[z_0, ..., z_k] via the exponential of the bidiagonal matrix (Opitz)."""
    z = np.asarray(points, dtype=complex)
    k = len(z)
    M = np.diag(z) + np.diag(np.ones(k - 1), 1)
    return expm(M)[0, -1]


@lru_cache(maxsize=None)
def _ordered_partitions(dim: int, k: int) -> tuple[tuple[int, ...], ...]:
    """Ordered k-tuples of nonempty, pairwise disjoint dx-masks."""
    masks = range(1, 1 << dim)

    def rec(used, depth):
        if depth == 0:
            yield ()
            return
        for m in masks:
            if m & used == 0:
                for rest in rec(used | m, depth - 1):
                    yield (m,) + rest

    return tuple(rec(0, k))


def volterra_exp(R: np.ndarray, S: SuperMatrixForm) -> SuperMatrixForm:
    """exp(R + S) for an even matrix R (degree 0) and S of positive form degree,
    as sum_k int_{simplex} e^{s_0 R} S e^{s_1 R} ... S e^{s_k R}, evaluated on the
    eigenbasis of R with divided differences of exp.  Single point only."""
    if S.data.ndim != 3:
        raise DomainError("volterra_exp works on a single sample point")
    if np.abs(S.data[0]).max(initial=0.0) > 0:
        raise DomainError("S must have positive form degree")
    g = S.grading
    gg = np.outer(g, g)
    if np.abs(R[gg < 0]).max(initial=0.0) > 0:
        raise DomainError("R must be an even matrix")
    dim, n = S.dim, S.size
    lam, V = np.linalg.eig(R)
    Vinv = np.linalg.inv(V)
    out = np.zeros((1 << dim, n, n), dtype=complex)
    out[0] = expm(R)
    for k in range(1, dim + 1):
        # dd[a_0, ..., a_k] for all index paths
        dd = np.empty((n,) * (k + 1), dtype=complex)
        for idx in np.ndindex(*dd.shape):
            dd[idx] = divided_difference_exp(lam[list(idx)])
        for seq in _ordered_partitions(dim, k):
            sign = 1
            used = 0
            for m in seq:
                sign *= _eps_masks(used, m)
                used |= m
            mats = []
            for i, m in enumerate(seq):
                later = sum(popcount(x) for x in seq[i + 1:])
                A = S.data[m] * gg if later % 2 else S.data[m]
                mats.append(Vinv @ A @ V)
            # contract the path: sum over a_1..a_{k-1} of dd * prod of entries
            letters = "abcdefgh"[: k + 1]
            spec = ",".join(letters[i] + letters[i + 1] for i in range(k)) + "," + letters + "->" + letters[0] + letters[-1]
            T = np.einsum(spec, *mats, dd)
            out[used] += sign * (V @ T @ Vinv)
    return S._like(out)


@dataclass(frozen=True)
class CliffordModule:
    n: int
    gens: tuple[np.ndarray, ...]
    grading: np.ndarray

    @property
    def size(self) -> int:
        return 1 << self.n

    def c(self, v) -> np.ndarray:
        """c(v) = sum v_k c_k; v may carry leading batch axes."""
        v = np.asarray(v)
        return np.tensordot(v, np.stack(self.gens), axes=([-1], [0]))

    def supertrace(self, A: np.ndarray) -> complex:
        return np.einsum("i,...ii->...", self.grading, A)


@lru_cache(maxsize=None)
def clifford_generators(n: int) -> CliffordModule:
    """Jordan-Wigner generators on (C^2)^{(x) n}: c_{2k-1} = Z..Z (i sx) 1..1, c_{2k} = Z..Z (i sy) 1..1."""
    if not 1 <= n <= 4:
        raise DomainError("n must be in 1..4")
    I2 = np.eye(2, dtype=complex)
    Z = np.diag([1.0, -1.0]).astype(complex)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)

    def kron(ops):
        out = np.ones((1, 1), dtype=complex)
        for o in ops:
            out = np.kron(out, o)
        return out

    gens = []
    for k in range(n):
        for s in (sx, sy):
            gens.append(kron([Z] * k + [1j * s] + [I2] * (n - k - 1)))
    grading = np.real(np.diag(kron([Z] * n)))
    mod = CliffordModule(n, tuple(gens), grading)
    _validate_clifford(mod)
    return mod


def _validate_clifford(mod: CliffordModule) -> None:
    N = mod.size
    G = np.diag(mod.grading)
    for j, cj in enumerate(mod.gens):
        if not np.allclose(cj.conj().T, -cj) or not np.allclose(G @ cj @ G, -cj):
            raise DomainError("generator is not odd skew-adjoint")
        for k, ck in enumerate(mod.gens):
            target = -2 * np.eye(N) if j == k else np.zeros((N, N))
            if not np.allclose(cj @ ck + ck @ cj, target):
                raise DomainError("Clifford relations fail")
    top = np.eye(N, dtype=complex)
    for c in mod.gens:
        top = top @ c
    if not np.isclose(mod.supertrace(top), (-2j) ** mod.n):
        raise DomainError("supertrace calibration fails")


def clifford_product_supertrace(n: int, idx) -> complex:
    mod = clifford_generators(n)
    out = np.eye(mod.size, dtype=complex)
    for i in idx:
        out = out @ mod.gens[i - 1]
    return complex(mod.supertrace(out))


def curvature_spin(n: int, t: float, lam, x) -> SuperMatrixForm:
    """F_t = -t^2 |x|^2 + t sum dx_k c_k + sum_k lam_k c_{2k-1} c_{2k}; x has shape (..., 2n)."""
    mod = clifford_generators(n)
    d = 2 * n
    x = np.asarray(x, dtype=float)
    batch = x.shape[:-1]
    F = SuperMatrixForm.zeros(d, mod.grading, batch)
    r2 = (x**2).sum(axis=-1)
    F.data[..., 0, :, :] = -(t**2) * r2[..., None, None] * np.eye(mod.size)
    for k in range(n):
        F.data[..., 0, :, :] += lam[k] * mod.gens[2 * k] @ mod.gens[2 * k + 1]
    for k in range(d):
        F.data[..., 1 << k, :, :] += t * mod.gens[k]
    return F


def spin_B(n: int, k: int, lam_k: float, t: float) -> SuperMatrixForm:
    """B_k = t(dx_{2k-1} c_{2k-1} + dx_{2k} c_{2k}) + lam_k c_{2k-1} c_{2k}, k 1-based."""
    mod = clifford_generators(n)
    a, b = mod.gens[2 * k - 2], mod.gens[2 * k - 1]
    return SuperMatrixForm.from_components(
        2 * n, mod.grading, {0: lam_k * a @ b, 1 << (2 * k - 2): t * a, 1 << (2 * k - 1): t * b}
    )


def _sinc_terms(lam: float) -> tuple[float, float]:
    """(sin l / l, (sin l - l cos l) / l^2) with series near 0."""
    if abs(lam) < 1e-4:
        l2 = lam * lam
        return 1 - l2 / 6 + l2 * l2 / 120, lam / 3 - lam * l2 / 30
    return np.sin(lam) / lam, (np.sin(lam) - lam * np.cos(lam)) / lam**2


def exp_Bk_closed(n: int, k: int, lam_k: float, t: float) -> SuperMatrixForm:
    """cos l + t^2 (sin l - l cos l)/l^2 dx dx + (sin l / l)(l - t^2 dx dx) c c + t (sin l / l)(dx c + dx c)."""
    mod = clifford_generators(n)
    a, b = mod.gens[2 * k - 2], mod.gens[2 * k - 1]
    s, w = _sinc_terms(lam_k)
    I = np.eye(mod.size)
    i1, i2 = 1 << (2 * k - 2), 1 << (2 * k - 1)
    comps = {
        0: np.cos(lam_k) * I + s * lam_k * a @ b,
        i1 | i2: t**2 * w * I - t**2 * s * a @ b,
        i1: t * s * a,
        i2: t * s * b,
    }
    return SuperMatrixForm.from_components(2 * n, mod.grading, comps)


def j_half(X: np.ndarray) -> float:
    """det^{1/2}(sinh(X/2)/(X/2)) for a real antisymmetric X, via its eigenvalue pairs."""
    mu = np.linalg.eigvals(np.asarray(X, dtype=float))
    out = 1.0 + 0j
    for m in mu:
        if m.imag > 1e-14:
            h = m / 2
            out *= np.sinh(h) / h
    return float(out.real)


def y_tau_matrix(lam) -> np.ndarray:
    """The so(V) matrix X_kl = <X e_k, e_l> of Y^tau for Y = sum lam_k e_{2k-1} e_{2k}: X_{2k-1,2k} = 2 lam_k."""
    n = len(lam)
    X = np.zeros((2 * n, 2 * n))
    for k, l in enumerate(lam):
        X[2 * k, 2 * k + 1] = 2 * l
        X[2 * k + 1, 2 * k] = -2 * l
    return X


def ch_spin(n: int, t: float, lam, x) -> tuple[np.ndarray, np.ndarray]:
    """(Str e^{F_t}, -Str(c(x) e^{F_t})) as arrays (..., 2^{2n})."""
    mod = clifford_generators(n)
    x = np.asarray(x, dtype=float)
    E = super_exp_numeric(curvature_spin(n, t, lam, x))
    cx = SuperMatrixForm.zeros(2 * n, mod.grading, x.shape[:-1])
    cx.data[..., 0, :, :] = mod.c(x)
    return supertrace(E), -supertrace(cx @ E)


def check_ch_wedge(n: int, t: float, lam, x) -> dict:
    """Compare Str e^{F_t(Y)} and the eta counterpart with (-2i)^n j^{1/2}(Y^tau) times the
    Berezin-side forms C^t and eta^t at X = Y^tau."""
    from .numeval import eval_form
    from .thom import thom_C_t, thom_eta_t

    x = np.atleast_2d(np.asarray(x, dtype=float))
    d = 2 * n
    ch, eta = ch_spin(n, t, lam, x)
    X = y_tau_matrix(lam)
    factor = (-2j) ** n * j_half(X)
    C = eval_form(thom_C_t(d), x, X=X, t=t)
    H = eval_form(thom_eta_t(d), x, X=X, t=t)
    dev_c = float(np.abs(ch - factor * C).max())
    dev_e = float(np.abs(eta - factor * H).max())
    return {"n": n, "t": t, "lam": list(map(float, lam)), "dev_ch": dev_c, "dev_eta": dev_e, "deviation": max(dev_c, dev_e)}


def random_superform(rng: np.random.Generator, dim: int, grading, positive: bool = False, scale: float = 1.0) -> SuperMatrixForm:
    g = np.asarray(grading, dtype=float)
    n = len(g)
    data = scale * (rng.standard_normal((1 << dim, n, n)) + 1j * rng.standard_normal((1 << dim, n, n)))
    if positive:
        data[0] = 0
    return SuperMatrixForm(dim, g, data)


def random_even_matrix(rng: np.random.Generator, grading, scale: float = 1.0) -> np.ndarray:
    g = np.asarray(grading, dtype=float)
    n = len(g)
    A = scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return A * (np.outer(g, g) > 0)
