"""Deterministic JSON and text serialization of forms, pairs and super matrices.

FormJson layout::

    {"dim": d, "kind": "form" | "pair" | "supermatrix", "meta": {...},
     "terms": [{"dx": [...], "e": [...], "xmono": [[k, l, exp], ...],
                "scalar": {"xpow": [...], "rexp": n, "gauss": [[num, den], ...],
                           "forders": [...], "phi": [[name, n], ...], "tpow": n,
                           "thpow": n, "ethpow": n,
                           "const": [{"ipow": a, "halfpi": b, "num": p, "den": q}, ...]},
                "slot": "alpha" | "beta"        (pairs only)
                "entry": [row, col]             (super matrices only)}]}

Each term carries one monomial of the exact scalar; ``thpow``/``ethpow`` are the
powers of theta and e^{i theta}, ``phi`` lists formal partition atoms.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .coeff import ConstantScalar, DomainError, Mono, ScalarExpr
from .equivariant import RelativePair
from .exterior import BiForm, XPoly, indices, mask, so_pairs


def _const_json(c: ConstantScalar) -> list[dict]:
    return [
        {"ipow": a, "halfpi": b, "num": q.numerator, "den": q.denominator}
        for (a, b), q in sorted(c.terms.items())
    ]


def _scalar_json(m: Mono, c: ConstantScalar) -> dict:
    return {
        "xpow": list(m.x),
        "rexp": m.r,
        "gauss": [[g.numerator, g.denominator] for g in m.gauss],
        "forders": list(m.f),
        "phi": [[name, n] for name, n in m.phi],
        "tpow": m.t,
        "thpow": m.th,
        "ethpow": m.eth,
        "const": _const_json(c),
    }


def _form_terms(a: BiForm) -> list[dict]:
    pairs = so_pairs(a.dim)
    out = []
    for (I, J), p in a.terms.items():
        for k, s in p.terms.items():
            xmono = [[kl[0], kl[1], e] for kl, e in zip(pairs, k) if e]
            for m, c in s.terms.items():
                out.append({"dx": list(indices(I)), "e": list(indices(J)), "xmono": xmono, "scalar": _scalar_json(m, c)})
    return out


def _sort(terms: list[dict]) -> list[dict]:
    return sorted(terms, key=lambda t: json.dumps(t, sort_keys=True))


def to_json_obj(obj, meta: dict | None = None) -> dict:
    meta = dict(meta or {})
    if isinstance(obj, BiForm):
        return {"dim": obj.dim, "kind": "form", "terms": _sort(_form_terms(obj)), "meta": meta}
    if isinstance(obj, RelativePair):
        terms = [dict(t, slot="alpha") for t in _form_terms(obj.alpha)]
        terms += [dict(t, slot="beta") for t in _form_terms(obj.beta)]
        return {"dim": obj.dim, "kind": "pair", "terms": _sort(terms), "meta": meta}
    from .chern import ExactSuperMatrix

    if isinstance(obj, ExactSuperMatrix):
        terms = []
        for (a, b), e in obj.entries.items():
            terms += [dict(t, entry=[a, b]) for t in _form_terms(e)]
        meta.setdefault("grading", list(obj.grading))
        return {"dim": obj.dim, "kind": "supermatrix", "terms": _sort(terms), "meta": meta}
    raise DomainError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, meta: dict | None = None) -> str:
    return json.dumps(to_json_obj(obj, meta), sort_keys=True, indent=1)


def _const_from(items: list[dict]) -> ConstantScalar:
    return ConstantScalar({(c["ipow"], c["halfpi"]): Fraction(c["num"], c["den"]) for c in items})


def _mono_from(s: dict) -> Mono:
    return Mono(
        tuple(s["xpow"]),
        s["rexp"],
        tuple(Fraction(n, d) for n, d in s["gauss"]),
        tuple(s["forders"]),
        tuple((name, n) for name, n in s.get("phi", [])),
        s["tpow"],
        s.get("thpow", 0),
        s.get("ethpow", 0),
    )


def _form_from(dim: int, terms: list[dict]) -> BiForm:
    pairs = so_pairs(dim)
    pos = {p: n for n, p in enumerate(pairs)}
    acc: dict = {}
    for t in terms:
        key = (mask(t["dx"]), mask(t["e"]))
        k = [0] * len(pairs)
        for a, b, e in t["xmono"]:
            k[pos[(a, b)]] = e
        monos = acc.setdefault(key, {}).setdefault(tuple(k), {})
        m = _mono_from(t["scalar"])
        monos[m] = monos.get(m, ConstantScalar()) + _const_from(t["scalar"]["const"])
    return BiForm(
        dim,
        {key: XPoly(dim, {k: ScalarExpr(dim, ms) for k, ms in xs.items()}) for key, xs in acc.items()},
    )


def from_json_obj(data: dict):
    dim, kind, terms = data["dim"], data["kind"], data["terms"]
    if kind == "form":
        return _form_from(dim, terms)
    if kind == "pair":
        return RelativePair(
            _form_from(dim, [t for t in terms if t["slot"] == "alpha"]),
            _form_from(dim, [t for t in terms if t["slot"] == "beta"]),
        )
    if kind == "supermatrix":
        from .chern import ExactSuperMatrix

        entries: dict = {}
        for t in terms:
            entries.setdefault(tuple(t["entry"]), []).append(t)
        grading = tuple(data["meta"]["grading"])
        return ExactSuperMatrix(dim, grading, {k: _form_from(dim, v) for k, v in entries.items()})
    raise DomainError(f"unknown kind {kind!r}")


def loads(text: str):
    return from_json_obj(json.loads(text))


def render_text(obj) -> str:
    if isinstance(obj, RelativePair):
        return f"({obj.alpha.render()}, {obj.beta.render()})"
    if isinstance(obj, BiForm):
        return obj.render()
    from .chern import ExactSuperMatrix

    if isinstance(obj, ExactSuperMatrix):
        return "\n".join(f"[{a},{b}] {e.render()}" for (a, b), e in sorted(obj.entries.items()))
    raise DomainError(f"cannot render {type(obj).__name__}")
