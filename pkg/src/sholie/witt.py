"""Vector fields sum f_j D_j in W(n,n;t): action, super-bracket, divergence."""

from __future__ import annotations

from typing import Mapping, Union

from .context import AlgebraContext
from .lambda_alg import MIXED, SuperPoly, _derive_key, _mul_keys, _popcount
from .ffield import signed


class VectorField:
    """Sparse map (monomial key, direction j) -> residue; immutable."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: AlgebraContext, terms: Mapping[tuple[int, int], int] | None = None):
        self.ctx = ctx
        p = ctx.p
        clean = {}
        if terms:
            for (k, j), c in terms.items():
                ctx.check_direction(j)
                c %= p
                if c:
                    clean[k, j] = c
        self.terms: dict[tuple[int, int], int] = clean

    @classmethod
    def _raw(cls, ctx, terms):
        obj = cls.__new__(cls)
        obj.ctx = ctx
        obj.terms = terms
        return obj

    @classmethod
    def zero(cls, ctx: AlgebraContext) -> "VectorField":
        return cls._raw(ctx, {})

    @classmethod
    def d(cls, ctx: AlgebraContext, j: int) -> "VectorField":
        """The constant field D_j."""
        return cls(ctx, {(0, j): 1})

    @classmethod
    def from_poly(cls, f: SuperPoly, j: int) -> "VectorField":
        """f D_j."""
        return cls(f.ctx, {(k, j): c for k, c in f.terms.items()})

    @classmethod
    def from_coords(cls, ctx: AlgebraContext, coords: Mapping[int, int]) -> "VectorField":
        terms = {}
        for coord, c in coords.items():
            terms[ctx.w_term(coord)] = c
        return cls(ctx, terms)

    def coords(self) -> dict[int, int]:
        """Sparse vector in W-coordinates (monomial position * 2n + j - 1)."""
        w = self.ctx.w_coord
        return {w(k, j): c for (k, j), c in self.terms.items()}

    def coefficient(self, j: int) -> SuperPoly:
        return SuperPoly._raw(self.ctx, {k: c for (k, jj), c in self.terms.items() if jj == j})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "VectorField") -> "VectorField":
        self.ctx.check_same(other.ctx)
        out = dict(self.terms)
        _accumulate(out, other.terms, 1, self.ctx.p)
        return VectorField._raw(self.ctx, out)

    def __neg__(self):
        p = self.ctx.p
        return VectorField._raw(self.ctx, {k: p - c for k, c in self.terms.items()})

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + (-other)

    def scale(self, c: int) -> "VectorField":
        return VectorField(self.ctx, {k: v * c for k, v in self.terms.items()})

    def __rmul__(self, c: int) -> "VectorField":
        return self.scale(int(c))

    def homogeneous_parts(self) -> dict[int, "VectorField"]:
        mask = (1 << self.ctx.n) - 1
        n = self.ctx.n
        parts: dict[int, dict] = {}
        for (k, j), c in self.terms.items():
            d = (_popcount(k & mask) + (j > n)) & 1
            parts.setdefault(d, {})[k, j] = c
        return {d: VectorField._raw(self.ctx, t) for d, t in parts.items()}

    @property
    def parity(self) -> Union[int, str]:
        return vf_grading(self)[0]

    def render(self) -> str:
        if not self.terms:
            return "0"
        ctx = self.ctx
        order = sorted(self.terms, key=lambda kj: ctx.w_coord(*kj))
        return " + ".join(
            f"{signed(self.terms[k, j], ctx.p)} * {ctx.monomial(k).render()} * D{j}" for k, j in order
        )

    def __repr__(self):
        return f"VectorField({self.render()})"


def _accumulate(out: dict, terms: Mapping, scale: int, p: int) -> None:
    for k, c in terms.items():
        v = (out.get(k, 0) + scale * c) % p
        if v:
            out[k] = v
        else:
            out.pop(k, None)


def apply(vf: VectorField, g: SuperPoly) -> SuperPoly:
    """(sum f_j D_j)(g) = sum f_j * D_j(g)."""
    vf.ctx.check_same(g.ctx)
    ctx = vf.ctx
    p = ctx.p
    out: dict[int, int] = {}
    for (kf, j), cf in vf.terms.items():
        for kg, cg in g.terms.items():
            r = _derive_key(ctx, j, kg)
            if r is None:
                continue
            s = _mul_keys(ctx, kf, r[1])
            if s is None:
                continue
            k = s[1]
            v = (out.get(k, 0) + cf * cg * r[0] * s[0]) % p
            if v:
                out[k] = v
            else:
                del out[k]
    return SuperPoly._raw(ctx, out)


def _term_bracket(ctx: AlgebraContext, kf: int, i: int, kg: int, j: int) -> list[tuple[int, tuple[int, int]]]:
    """[f D_i, g D_j] on monomial terms, cached on the context."""
    table = ctx._tables.setdefault("bracket", {})
    key = (kf, i, kg, j)
    try:
        return table[key]
    except KeyError:
        pass
    n = ctx.n
    mask = (1 << n) - 1
    p = ctx.p
    da = (_popcount(kf & mask) + (i > n)) & 1
    db = (_popcount(kg & mask) + (j > n)) & 1
    out: dict[tuple[int, int], int] = {}
    r = _derive_key(ctx, i, kg)
    if r is not None:
        s = _mul_keys(ctx, kf, r[1])
        if s is not None:
            out[s[1], j] = r[0] * s[0] % p
    r = _derive_key(ctx, j, kf)
    if r is not None:
        s = _mul_keys(ctx, kg, r[1])
        if s is not None:
            c = -r[0] * s[0] if not (da and db) else r[0] * s[0]
            k = (s[1], i)
            v = (out.get(k, 0) + c) % p
            if v:
                out[k] = v
            else:
                out.pop(k, None)
    res = list((c, k) for k, c in out.items())
    table[key] = res
    return res


def bracket(a: VectorField, b: VectorField) -> VectorField:
    """Super-bracket, bilinear over monomial terms (each term is homogeneous)."""
    a.ctx.check_same(b.ctx)
    ctx = a.ctx
    p = ctx.p
    out: dict[tuple[int, int], int] = {}
    for (kf, i), cf in a.terms.items():
        for (kg, j), cg in b.terms.items():
            for c, k in _term_bracket(ctx, kf, i, kg, j):
                v = (out.get(k, 0) + cf * cg * c) % p
                if v:
                    out[k] = v
                else:
                    del out[k]
    return VectorField._raw(ctx, out)


def divergence(vf: VectorField) -> SuperPoly:
    """sum over terms of (-1)**(tau(j) d(f)) D_j(f)."""
    ctx = vf.ctx
    n = ctx.n
    mask = (1 << n) - 1
    p = ctx.p
    out: dict[int, int] = {}
    for (k, j), c in vf.terms.items():
        r = _derive_key(ctx, j, k)
        if r is None:
            continue
        sign = -1 if j > n and _popcount(k & mask) & 1 else 1
        v = (out.get(r[1], 0) + sign * c * r[0]) % p
        if v:
            out[r[1]] = v
        else:
            del out[r[1]]
    return SuperPoly._raw(ctx, out)


def vf_grading(vf: VectorField) -> tuple[Union[int, str], frozenset[int]]:
    """(parity or "mixed", Z-degrees |alpha|+|u|-1 over the terms)."""
    ctx = vf.ctx
    parities, degrees = set(), set()
    for k, j in vf.terms:
        m = ctx.monomial(k)
        parities.add((m.parity + (j > ctx.n)) & 1)
        degrees.add(m.zdegree - 1)
    if len(parities) > 1:
        return MIXED, frozenset(degrees)
    return (parities.pop() if parities else 0), frozenset(degrees)


def basis_fields(ctx: AlgebraContext) -> list[VectorField]:
    """W basis x^(alpha) x^u D_j in W-coordinate order."""
    return [VectorField._raw(ctx, {ctx.w_term(c): 1}) for c in range(ctx.dim_w)]


# Two readings of the mixed bracket appearing in div([D,E]) = [div D, E] + [D, div E].
# Both use [D, g] := D(g); they differ in how [g, E] is turned into an action of E.
DIV_CONVENTIONS = ("skew", "symmetric")


def div_identity_rhs(a: VectorField, b: VectorField, convention: str = "skew") -> SuperPoly:
    """Right-hand side [div a, b] + [a, div b] for homogeneous a, b.

    ``skew``:      [g, E] := -(-1)**(d(g) d(E)) E(g)
    ``symmetric``: [g, E] := +(-1)**(d(g) d(E)) E(g)
    """
    da, db = a.parity, b.parity
    if MIXED in (da, db):
        raise ValueError("divergence identity needs homogeneous arguments")
    # div is even, so d(div a) = d(a)
    sign = -1 if da * db % 2 else 1
    if convention == "skew":
        sign = -sign
    elif convention != "symmetric":
        raise ValueError(f"unknown convention {convention!r}")
    return apply(b, divergence(a)).scale(sign) + apply(a, divergence(b))
