"""The odd Hamiltonian map T_H and the chain HO, S', SHO', SHO-bar, SHO.

All subspaces live in W-coordinates (see :meth:`AlgebraContext.w_coord`).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .context import AlgebraContext, ParameterError  # noqa: F401  (re-exported)
from .lambda_alg import SuperPoly, _derive_key, _popcount, basis_polys
from .linalg import Eliminator, Subspace, echelonize, intersection, nullspace
from .witt import VectorField, basis_fields, bracket, divergence

log = logging.getLogger(__name__)

__all__ = [
    "AlgebraChain",
    "AlgebraContext",
    "NotSubalgebraError",
    "build_chain",
    "build_ho",
    "build_sprime",
    "derived_subalgebra",
    "graded_component",
    "t_h",
]


class NotSubalgebraError(ValueError):
    pass


def t_h(f: SuperPoly) -> VectorField:
    """T_H(f) = sum_i (-1)**(tau(i) d(f)) D_i(f) D_{i'}, extended linearly over terms."""
    ctx = f.ctx
    n, p = ctx.n, ctx.p
    mask = (1 << n) - 1
    out: dict[tuple[int, int], int] = {}
    for k, c in f.terms.items():
        odd_f = _popcount(k & mask) & 1
        for i in range(1, 2 * n + 1):
            r = _derive_key(ctx, i, k)
            if r is None:
                continue
            coeff = c * r[0]
            if i > n and odd_f:
                coeff = -coeff
            key = (r[1], ctx.prime(i))
            v = (out.get(key, 0) + coeff) % p
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return VectorField._raw(ctx, out)


def _vf(ctx: AlgebraContext, sub: Subspace) -> list[VectorField]:
    return [VectorField.from_coords(ctx, v.to_dict()) for v in sub.basis]


def build_ho(ctx: AlgebraContext) -> Subspace:
    return echelonize((t_h(f).coords() for f in basis_polys(ctx)), ctx.dim_w, ctx.p)


def th_kernel(ctx: AlgebraContext) -> Subspace:
    """Kernel of T_H in Lambda-coordinates, from the stacked D_i matrices.

    T_H(f) = 0 iff D_i(f) = 0 for all i, so this is independent of T_H itself.
    """
    N = ctx.dim_lambda
    pos = ctx.position
    rows = []
    for i in range(1, 2 * ctx.n + 1):
        block: dict[int, dict[int, int]] = {}
        for col, k in enumerate(ctx.basis_keys):
            r = _derive_key(ctx, i, k)
            if r is not None:
                block.setdefault(pos[r[1]], {})[col] = r[0]
        rows.extend(block.values())
    return nullspace(rows, N, ctx.p)


def build_sprime(ctx: AlgebraContext) -> Subspace:
    """Kernel of div: W -> Lambda."""
    rows: dict[int, dict[int, int]] = {}
    pos = ctx.position
    for coord, e in enumerate(basis_fields(ctx)):
        for k, c in divergence(e).terms.items():
            rows.setdefault(pos[k], {})[coord] = c
    return nullspace(rows.values(), ctx.dim_w, ctx.p)


def derived_subalgebra(ctx: AlgebraContext, sub: Subspace, check_closure: bool = True) -> Subspace:
    """Span of [b_i, b_j] over all ordered basis pairs."""
    vfs = _vf(ctx, sub)
    e = Eliminator(ctx.dim_w, ctx.p)
    for a in vfs:
        for b in vfs:
            c = bracket(a, b).coords()
            if not c:
                continue
            if check_closure and not sub.contains(c):
                raise NotSubalgebraError("not a subalgebra: bracket leaves the subspace")
            e.add(c)
    return e.row_space()


def zdegree_of_coord(ctx: AlgebraContext, coord: int) -> int:
    k, _ = ctx.w_term(coord)
    return ctx.monomial(k).zdegree - 1


def graded_component(chain: "AlgebraChain", r: int) -> Subspace:
    """SHO cap (W-coordinates of Z-degree r)."""
    ctx = chain.ctx
    if not -1 <= r <= ctx.xi - 5:
        log.warning("degree %d outside -1..%d; returning the zero subspace", r, ctx.xi - 5)
        return Subspace.zero(ctx.dim_w, ctx.p)
    return chain.components()[r]


@dataclass
class AlgebraChain:
    ctx: AlgebraContext
    HO: Subspace
    Sprime: Subspace
    SHOprime: Subspace
    SHObar: Subspace
    SHO: Subspace
    basis_vf: list[VectorField]
    _components: Optional[dict[int, Subspace]] = field(default=None, repr=False)

    @property
    def W(self) -> Subspace:
        return Subspace.full(self.ctx.dim_w, self.ctx.p)

    @property
    def dims(self) -> dict[str, int]:
        return {
            "W": self.ctx.dim_w,
            "HO": self.HO.rank,
            "Sprime": self.Sprime.rank,
            "SHOprime": self.SHOprime.rank,
            "SHObar": self.SHObar.rank,
            "SHO": self.SHO.rank,
        }

    @property
    def dim(self) -> int:
        return self.SHO.rank

    @property
    def degenerate(self) -> bool:
        return self.SHO.rank == 0

    def parities(self) -> list[int]:
        return [v.parity for v in self.basis_vf]

    def zdegrees(self) -> list[int]:
        out = []
        for v in self.basis_vf:
            (deg,) = _single(zdegree_of_coord(self.ctx, c) for c in v.coords())
            out.append(deg)
        return out

    def components(self) -> dict[int, Subspace]:
        """Z-graded pieces SHO_r, r = -1..xi-5.

        The echelon basis is graded because W-coordinates are ordered by
        degree and every SHO basis vector is homogeneous (checked).
        """
        if self._components is None:
            ctx = self.ctx
            groups: dict[int, list] = {r: [] for r in range(-1, ctx.xi - 4)}
            for v in self.SHO.basis:
                (deg,) = _single(zdegree_of_coord(ctx, c) for c, _ in v.entries)
                groups.setdefault(deg, []).append(v)
            self._components = {
                r: Subspace(ctx.dim_w, ctx.p, vs, _trusted=True) for r, vs in sorted(groups.items())
            }
        return self._components


def _single(values: Iterable[int]) -> tuple[int]:
    s = set(values)
    if len(s) != 1:
        raise ValueError(f"expected a Z-homogeneous vector, got degrees {sorted(s)}")
    return (s.pop(),)


def build_chain(ctx: AlgebraContext) -> AlgebraChain:
    ho = build_ho(ctx)
    sprime = build_sprime(ctx)
    shoprime = intersection(sprime, ho)
    log.info("%s: HO=%d S'=%d SHO'=%d", ctx.label, ho.rank, sprime.rank, shoprime.rank)
    shobar = derived_subalgebra(ctx, shoprime)
    sho = derived_subalgebra(ctx, shobar)
    log.info("%s: SHO-bar=%d SHO=%d", ctx.label, shobar.rank, sho.rank)
    return AlgebraChain(ctx, ho, sprime, shoprime, shobar, sho, _vf(ctx, sho))
