"""The truncated superalgebra Lambda(n,n;t) = U(n) (x) Lambda(n).

Elements are :class:`SuperPoly` objects: sparse maps from packed monomial
keys (see :class:`~sholie.context.AlgebraContext`) to residues mod p.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Optional, Union

from .context import AlgebraContext, Monomial, ParameterError
from .ffield import binom_mod_p, mi_add_bounded, signed

MIXED = "mixed"


def _popcount(x: int) -> int:
    return bin(x).count("1")


def odd_sign(u1: int, u2: int) -> int:
    """(-1)**#{(a, b): a in u1, b in u2, a > b} for disjoint odd masks."""
    inv = 0
    while u2:
        low = u2 & -u2
        inv += _popcount(u1 & ~(2 * low - 1))
        u2 ^= low
    return -1 if inv & 1 else 1


def monomial_mul(ctx: AlgebraContext, m1: Monomial, m2: Monomial) -> Optional[tuple[int, Monomial]]:
    """Product of two basis monomials as (coefficient, monomial), or None if it vanishes."""
    r = _mul_keys(ctx, ctx.key(m1), ctx.key(m2))
    if r is None:
        return None
    return r[0], ctx.monomial(r[1])


def _mul_keys(ctx: AlgebraContext, k1: int, k2: int) -> Optional[tuple[int, int]]:
    table = ctx._tables.setdefault("mul", {})
    try:
        return table[k1, k2]
    except KeyError:
        pass
    m1, m2 = ctx.monomial(k1), ctx.monomial(k2)
    out = None
    if not m1.u & m2.u:
        alpha = mi_add_bounded(m1.alpha, m2.alpha, ctx.pi)
        if alpha is not None:
            c = binom_mod_p(alpha, m1.alpha, ctx.p)
            if c:
                c = c * odd_sign(m1.u, m2.u) % ctx.p
                out = (c, ctx.key(Monomial(alpha, m1.u | m2.u)))
    table[k1, k2] = out
    return out


def _derive_key(ctx: AlgebraContext, i: int, key: int) -> Optional[tuple[int, int]]:
    table = ctx._tables.setdefault("deriv", {})
    try:
        return table[i, key]
    except KeyError:
        pass
    ctx.check_direction(i)
    m = ctx.monomial(key)
    out = None
    if i <= ctx.n:
        if m.alpha[i - 1]:
            alpha = list(m.alpha)
            alpha[i - 1] -= 1
            out = (1, ctx.key(Monomial(tuple(alpha), m.u)))
    else:
        bit = 1 << (i - ctx.n - 1)
        if m.u & bit:
            pos = _popcount(m.u & (bit - 1))
            out = ((-1) ** pos % ctx.p, ctx.key(Monomial(m.alpha, m.u ^ bit)))
    table[i, key] = out
    return out


class SuperPoly:
    """Sparse element of Lambda(n,n;t); immutable, no stored zeros."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: AlgebraContext, terms: Mapping[int, int] | None = None):
        self.ctx = ctx
        p = ctx.p
        clean = {}
        if terms:
            for k, c in terms.items():
                c %= p
                if c:
                    clean[k] = c
        self.terms: dict[int, int] = clean

    @classmethod
    def _raw(cls, ctx: AlgebraContext, terms: dict[int, int]) -> "SuperPoly":
        obj = cls.__new__(cls)
        obj.ctx = ctx
        obj.terms = terms
        return obj

    @classmethod
    def one(cls, ctx: AlgebraContext) -> "SuperPoly":
        return cls._raw(ctx, {0: 1})

    @classmethod
    def zero(cls, ctx: AlgebraContext) -> "SuperPoly":
        return cls._raw(ctx, {})

    @classmethod
    def mono(cls, ctx: AlgebraContext, m: Monomial, coeff: int = 1) -> "SuperPoly":
        return cls(ctx, {ctx.key(m): coeff})

    @classmethod
    def var(cls, ctx: AlgebraContext, i: int) -> "SuperPoly":
        """x_i: x^(eps_i) for i <= n, the Grassmann generator for i > n."""
        ctx.check_direction(i)
        if i <= ctx.n:
            alpha = tuple(1 if k == i - 1 else 0 for k in range(ctx.n))
            return cls.mono(ctx, Monomial(alpha, 0))
        return cls.mono(ctx, ctx.monomial_from(odd=[i]))

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, SuperPoly):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def _check(self, other: "SuperPoly") -> None:
        self.ctx.check_same(other.ctx)

    def __add__(self, other: "SuperPoly") -> "SuperPoly":
        self._check(other)
        out = dict(self.terms)
        p = self.ctx.p
        for k, c in other.terms.items():
            v = (out.get(k, 0) + c) % p
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return SuperPoly._raw(self.ctx, out)

    def __neg__(self) -> "SuperPoly":
        p = self.ctx.p
        return SuperPoly._raw(self.ctx, {k: p - c for k, c in self.terms.items()})

    def __sub__(self, other: "SuperPoly") -> "SuperPoly":
        return self + (-other)

    def scale(self, c: int) -> "SuperPoly":
        return SuperPoly(self.ctx, {k: v * c for k, v in self.terms.items()})

    def __rmul__(self, c: int) -> "SuperPoly":
        return self.scale(int(c))

    def __mul__(self, other: Union["SuperPoly", int]) -> "SuperPoly":
        if isinstance(other, SuperPoly):
            return superpoly_mul(self, other)
        return self.scale(int(other))

    def homogeneous_parts(self) -> dict[int, "SuperPoly"]:
        parts: dict[int, dict[int, int]] = {}
        for k, c in self.terms.items():
            parts.setdefault(_popcount(k & ((1 << self.ctx.n) - 1)) & 1, {})[k] = c
        return {d: SuperPoly._raw(self.ctx, t) for d, t in parts.items()}

    @property
    def parity(self) -> Union[int, str]:
        return grading(self)[0]

    def render(self) -> str:
        if not self.terms:
            return "0"
        ctx = self.ctx
        pos = ctx.position
        out = []
        for k in sorted(self.terms, key=pos.__getitem__):
            out.append(f"{signed(self.terms[k], ctx.p)} * {ctx.monomial(k).render()}")
        return " + ".join(out)

    def __repr__(self):
        return f"SuperPoly({self.render()})"


def superpoly_mul(f: SuperPoly, g: SuperPoly) -> SuperPoly:
    f.ctx.check_same(g.ctx)
    ctx = f.ctx
    p = ctx.p
    out: dict[int, int] = {}
    for k1, c1 in f.terms.items():
        for k2, c2 in g.terms.items():
            r = _mul_keys(ctx, k1, k2)
            if r is None:
                continue
            k = r[1]
            v = (out.get(k, 0) + c1 * c2 * r[0]) % p
            if v:
                out[k] = v
            else:
                del out[k]
    return SuperPoly._raw(ctx, out)


def derive(i: int, f: SuperPoly) -> SuperPoly:
    """D_i(f): lowers alpha_i for even i, left Grassmann derivative for odd i."""
    ctx = f.ctx
    ctx.check_direction(i)
    p = ctx.p
    out: dict[int, int] = {}
    for k, c in f.terms.items():
        r = _derive_key(ctx, i, k)
        if r is None:
            continue
        v = (out.get(r[1], 0) + c * r[0]) % p
        if v:
            out[r[1]] = v
        else:
            del out[r[1]]
    return SuperPoly._raw(ctx, out)


def grading(f: SuperPoly) -> tuple[Union[int, str], frozenset[int]]:
    """(parity or "mixed", set of Z-degrees |alpha|+|u| over the terms)."""
    ctx = f.ctx
    parities = set()
    degrees = set()
    for k in f.terms:
        m = ctx.monomial(k)
        parities.add(m.parity)
        degrees.add(m.zdegree)
    if len(parities) > 1:
        parity: Union[int, str] = MIXED
    else:
        parity = parities.pop() if parities else 0
    return parity, frozenset(degrees)


def basis_polys(ctx: AlgebraContext) -> list[SuperPoly]:
    return [SuperPoly._raw(ctx, {k: 1}) for k in ctx.basis_keys]


def from_terms(ctx: AlgebraContext, terms: Iterable[tuple[int, Monomial]]) -> SuperPoly:
    out: dict[int, int] = {}
    for c, m in terms:
        k = ctx.key(m)
        out[k] = out.get(k, 0) + c
    return SuperPoly(ctx, out)


__all__ = [
    "MIXED",
    "ParameterError",
    "SuperPoly",
    "basis_polys",
    "derive",
    "from_terms",
    "grading",
    "monomial_mul",
    "odd_sign",
    "superpoly_mul",
]
