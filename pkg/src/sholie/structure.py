"""Structure constants of SHO, the torus T_SHO, weight spaces and centralizers."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .cartan import AlgebraChain, t_h
from .context import AlgebraContext
from .lambda_alg import SuperPoly
from .linalg import Eliminator, Subspace, echelonize, nullspace
from .witt import VectorField, bracket

Weight = tuple[int, ...]


class StructureError(ValueError):
    pass


class WeightDecompositionError(StructureError):
    pass


@dataclass
class StructureTensor:
    """[e_a, e_b] = sum_k c[a, b][k] e_k on a fixed basis with given parities."""

    dim: int
    p: int
    parities: list[int]
    table: dict[tuple[int, int], dict[int, int]] = field(default_factory=dict)
    # optional gradings of the basis; used to split linear systems into blocks
    weights: Optional[list[Weight]] = None
    degrees: Optional[list[int]] = None

    @classmethod
    def from_entries(
        cls, dim: int, p: int, parities: Sequence[int], entries: Mapping[tuple[int, int, int], int], **kw
    ) -> "StructureTensor":
        st = cls(dim, p, list(parities), **kw)
        for (a, b, k), c in entries.items():
            if c % p:
                st.table.setdefault((a, b), {})[k] = c % p
        return st

    def gradings(self) -> tuple[list[Weight], list[int]]:
        """(weights, degrees) if both are additive on the bracket, else trivial ones."""
        d = self.dim
        w = self.weights if self.weights is not None else [()] * d
        g = self.degrees if self.degrees is not None else [0] * d
        p = self.p
        for (a, b), row in self.table.items():
            want = tuple((x + y) % p for x, y in zip(w[a], w[b]))
            for k in row:
                if tuple(x % p for x in w[k]) != want or g[k] != g[a] + g[b]:
                    return [()] * d, [0] * d
        return [tuple(x % p for x in wi) for wi in w], list(g)

    def dense(self):
        """c as an int64 array of shape (d, d, d)."""
        import numpy as np

        C = np.zeros((self.dim,) * 3, dtype=np.int64)
        for (a, b), row in self.table.items():
            for k, c in row.items():
                C[a, b, k] = c
        return C

    @property
    def entries(self) -> dict[tuple[int, int, int], int]:
        return {(a, b, k): c for (a, b), row in self.table.items() for k, c in row.items()}

    def get(self, a: int, b: int) -> dict[int, int]:
        return self.table.get((a, b), {})

    def bracket(self, x: Mapping[int, int], y: Mapping[int, int]) -> dict[int, int]:
        """Bracket of two elements given by sparse basis coordinates."""
        p = self.p
        out: dict[int, int] = {}
        table = self.table
        for a, xa in x.items():
            for b, yb in y.items():
                row = table.get((a, b))
                if not row:
                    continue
                s = xa * yb
                for k, c in row.items():
                    v = (out.get(k, 0) + s * c) % p
                    if v:
                        out[k] = v
                    else:
                        del out[k]
        return out

    def parity_of(self, x: Mapping[int, int]) -> int:
        ps = {self.parities[a] for a, c in x.items() if c % self.p}
        if len(ps) > 1:
            raise StructureError("element is not Z2-homogeneous")
        return ps.pop() if ps else 0

    def sign(self, da: int, db: int) -> int:
        return -1 if da & db else 1

    def skew_violations(self) -> int:
        bad = 0
        for a in range(self.dim):
            for b in range(self.dim):
                s = -self.sign(self.parities[a], self.parities[b])
                ab = self.get(a, b)
                ba = self.get(b, a)
                if any((ab.get(k, 0) - s * ba.get(k, 0)) % self.p for k in set(ab) | set(ba)):
                    bad += 1
        return bad

    def jacobi_violations(self, triples: Optional[Iterable[tuple[int, int, int]]] = None) -> int:
        """Count triples breaking [a,[b,c]] = [[a,b],c] + (-1)^{ab}[b,[a,c]]."""
        d = self.dim
        if triples is None:
            triples = ((a, b, c) for a in range(d) for b in range(d) for c in range(d))
        par = self.parities
        p = self.p
        bad = 0
        for a, b, c in triples:
            ea, eb, ec = {a: 1}, {b: 1}, {c: 1}
            lhs = self.bracket(ea, self.get(b, c))
            rhs = self.bracket(self.get(a, b), ec)
            extra = self.bracket(eb, self.get(a, c))
            s = self.sign(par[a], par[b])
            for k, v in extra.items():
                rhs[k] = (rhs.get(k, 0) + s * v) % p
            if any((lhs.get(k, 0) - rhs.get(k, 0)) % p for k in set(lhs) | set(rhs)):
                bad += 1
        return bad

    def random_triples(self, count: int, seed: int = 0) -> list[tuple[int, int, int]]:
        rnd = random.Random(seed)
        d = self.dim
        return [(rnd.randrange(d), rnd.randrange(d), rnd.randrange(d)) for _ in range(count)]

    def ad_rows(self, x: Mapping[int, int]) -> dict[int, dict[int, int]]:
        """Matrix of ad x as {output k: {input b: coeff}}."""
        out: dict[int, dict[int, int]] = {}
        for b in range(self.dim):
            for k, c in self.bracket(x, {b: 1}).items():
                out.setdefault(k, {})[b] = c
        return out


def structure_constants(chain: AlgebraChain) -> StructureTensor:
    """Coordinates of [e_a, e_b] in the echelon basis of SHO."""
    ctx = chain.ctx
    basis = chain.basis_vf
    d = len(basis)
    sho = chain.SHO
    st = StructureTensor(d, ctx.p, [v.parity for v in basis])
    if d:
        st.weights = basis_weights(chain)
        st.degrees = chain.zdegrees()
    for a in range(d):
        for b in range(d):
            br = bracket(basis[a], basis[b])
            if not br:
                continue
            coords = sho.coordinates_sparse(br.coords())
            if coords is None:
                raise StructureError(f"[e_{a}, e_{b}] does not lie in SHO")
            if coords:
                st.table[a, b] = coords
    return st


def toral_basis(ctx: AlgebraContext) -> list[VectorField]:
    """h_i = T_H(x_i x_{i'} - x_{i+1} x_{(i+1)'}), i = 1..n-1."""
    out = []
    for i in range(1, ctx.n):
        j = i + 1
        f = SuperPoly.var(ctx, i) * SuperPoly.var(ctx, ctx.prime(i)) - SuperPoly.var(
            ctx, j
        ) * SuperPoly.var(ctx, ctx.prime(j))
        out.append(t_h(f))
    return out


def toral_pair(ctx: AlgebraContext, i: int, j: int) -> VectorField:
    """T_H(x_i x_{i'} - x_j x_{j'}) for even indices i != j."""
    f = SuperPoly.var(ctx, i) * SuperPoly.var(ctx, ctx.prime(i)) - SuperPoly.var(ctx, j) * SuperPoly.var(
        ctx, ctx.prime(j)
    )
    return t_h(f)


def closed_form_weight(ctx: AlgebraContext, key: int) -> Weight:
    """delta(i' in u) - alpha_i + alpha_{i+1} - delta((i+1)' in u) for each toral h_i."""
    m = ctx.monomial(key)
    odd = set(m.odd_vars)
    out = []
    for i in range(1, ctx.n):
        j = i + 1
        w = (ctx.prime(i) in odd) - m.alpha[i - 1] + m.alpha[j - 1] - (ctx.prime(j) in odd)
        out.append(w % ctx.p)
    return tuple(out)


def coord_weight(ctx: AlgebraContext, coord: int) -> Weight:
    """Toral weight of the W-coordinate x^(alpha) x^u D_j (each is an eigenvector)."""
    table = ctx._tables.setdefault("coord_weight", {})
    w = table.get(coord)
    if w is None:
        k, j = ctx.w_term(coord)
        e = VectorField._raw(ctx, {(k, j): 1})
        vals = []
        for h in toral_basis_cached(ctx):
            br = bracket(h, e)
            if not br:
                vals.append(0)
                continue
            if set(br.terms) != {(k, j)}:
                raise WeightDecompositionError(f"coordinate {coord} is not a toral eigenvector")
            vals.append(br.terms[k, j])
        w = table[coord] = tuple(vals)
    return w


def toral_basis_cached(ctx: AlgebraContext) -> list[VectorField]:
    hs = ctx._tables.get("torals")
    if hs is None:
        hs = ctx._tables["torals"] = toral_basis(ctx)
    return hs


def vector_weight(ctx: AlgebraContext, coords: Mapping[int, int]) -> Optional[Weight]:
    ws = {coord_weight(ctx, c) for c in coords}
    return ws.pop() if len(ws) == 1 else None


def basis_weights(chain: AlgebraChain) -> list[Weight]:
    out = []
    for v in chain.basis_vf:
        w = vector_weight(chain.ctx, v.coords())
        if w is None:
            raise WeightDecompositionError("SHO basis vector is not a weight vector")
        out.append(w)
    return out


def _ad_coords(space: Subspace, h: VectorField, vfs: Sequence[VectorField]) -> list[dict[int, int]]:
    cols = []
    for v in vfs:
        c = space.coordinates_sparse(bracket(h, v).coords())
        if c is None:
            raise WeightDecompositionError("toral element does not preserve the subspace")
        cols.append(c)
    return cols


def weight_decompose(
    ctx: AlgebraContext, space: Subspace, torals: Sequence[VectorField]
) -> dict[Weight, Subspace]:
    """Simultaneous eigenspaces of ad(torals) on ``space``, split one toral at a time.

    Eigenvalues are found by scanning F_p.  Raises if some toral does not act
    semisimply (eigenspaces fail to fill the part being split).
    """
    p = ctx.p
    parts: list[tuple[Weight, Subspace]] = [((), space)]
    for h in torals:
        new_parts = []
        for w, part in parts:
            if not part.rank:
                continue
            vfs = [VectorField.from_coords(ctx, v.to_dict()) for v in part.basis]
            cols = _ad_coords(part, h, vfs)
            r = part.rank
            found = 0
            for lam in range(p):
                # kernel of (ad h - lam) in part-coordinates: rows indexed by output
                rows: dict[int, dict[int, int]] = {}
                for i, col in enumerate(cols):
                    for k, c in col.items():
                        rows.setdefault(k, {})[i] = c
                    rows.setdefault(i, {})
                    rows[i][i] = (rows[i].get(i, 0) - lam) % p
                ker = nullspace(rows.values(), r, p)
                if ker.rank:
                    vecs = [part.combine(v.to_dict()) for v in ker.basis]
                    new_parts.append((w + (lam,), echelonize(vecs, space.dim, p)))
                    found += ker.rank
            if found != r:
                raise WeightDecompositionError(
                    f"weight decomposition failed: toral acts non-semisimply ({found} of {r})"
                )
        parts = new_parts
    return dict(sorted(parts))


def weight_spaces_of_sho(chain: AlgebraChain, ho_spaces: Mapping[Weight, Subspace]) -> dict[Weight, Subspace]:
    """SHO_(mu) := HO_(mu) cap SHO."""
    out = {}
    for w, s in ho_spaces.items():
        inter = s & chain.SHO
        if inter.rank:
            out[w] = inter
    return out


def centralizer(st: StructureTensor, U: Iterable[Mapping[int, int]]) -> Subspace:
    """{x : [x, u] = 0 for every u in U}, in SHO-basis coordinates."""
    rows = []
    for u in U:
        # [x, u] = sum_a x_a [e_a, u]
        by_out: dict[int, dict[int, int]] = {}
        for a in range(st.dim):
            for k, c in st.bracket({a: 1}, u).items():
                by_out.setdefault(k, {})[a] = c
        rows.extend(by_out.values())
    return nullspace(rows, st.dim, st.p)


def center(st: StructureTensor) -> Subspace:
    return centralizer(st, ({b: 1} for b in range(st.dim)))


def ideal_generated(st: StructureTensor, seed: Mapping[int, int]) -> Subspace:
    """Smallest ideal containing ``seed``: bracket with every e_a to a fixed point."""
    e = Eliminator(st.dim, st.p)
    queue = []
    if e.add(dict(seed)):
        queue.append(dict(seed))
    while queue:
        v = queue.pop()
        for a in range(st.dim):
            w = st.bracket({a: 1}, v)
            if w and e.add(w):
                queue.append(w)
        if e.rank == st.dim:
            break
    return e.row_space()


def simplicity_check(st: StructureTensor) -> dict:
    """Zero center and every basis vector generating the whole algebra."""
    z = center(st)
    failures = [b for b in range(st.dim) if ideal_generated(st, {b: 1}).rank != st.dim]
    return {
        "dim": st.dim,
        "center_dim": z.rank,
        "non_generating_basis_vectors": failures,
        "simple": st.dim > 0 and z.rank == 0 and not failures,
    }


def basis_coords_of(chain: AlgebraChain, vf: VectorField) -> Optional[dict[int, int]]:
    """SHO-basis coordinates of a vector field, or None if it is not in SHO."""
    return chain.SHO.coordinates_sparse(vf.coords())


def component_coords(chain: AlgebraChain, r: int) -> list[dict[int, int]]:
    """Basis coordinates of SHO_r (the graded echelon basis is a union of component bases)."""
    degs = chain.zdegrees()
    return [{i: 1} for i, dg in enumerate(degs) if dg == r]
