"""Exact sparse linear algebra over F_p.

Rows are dicts ``{coordinate: residue}`` internally.  :class:`Eliminator`
keeps a reduced row-echelon pivot table that rows are streamed into one at a
time, so a constraint system is never materialized as a matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

import numpy as np

from .ffield import inv_mod

DENSE_LIMIT = 2000

Row = dict[int, int]


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class SparseVec:
    """Sorted (index, value) pairs with no zeros, plus the ambient dimension."""

    entries: tuple[tuple[int, int], ...]
    dim: int

    @classmethod
    def from_dict(cls, d: Mapping[int, int], dim: int, p: int) -> "SparseVec":
        items = []
        for i, c in sorted(d.items()):
            c %= p
            if not c:
                continue
            if not 0 <= i < dim:
                raise DimensionError(f"coordinate {i} outside 0..{dim - 1}")
            items.append((i, c))
        return cls(tuple(items), dim)

    @classmethod
    def from_dense(cls, values: Sequence[int], p: int) -> "SparseVec":
        return cls.from_dict(dict(enumerate(int(v) for v in values)), len(values), p)

    def to_dict(self) -> Row:
        return dict(self.entries)

    def to_dense(self) -> list[int]:
        out = [0] * self.dim
        for i, c in self.entries:
            out[i] = c
        return out

    def __len__(self):
        return len(self.entries)

    @property
    def pivot(self) -> Optional[int]:
        return self.entries[0][0] if self.entries else None


class Eliminator:
    """Streaming Gauss-Jordan elimination with a pivot table.

    Invariant: every stored row has pivot entry 1 at its lowest coordinate and
    no entries in any other row's pivot column.
    """

    def __init__(self, dim: int, p: int):
        self.dim = dim
        self.p = p
        self.rows: dict[int, Row] = {}
        # non-pivot column -> pivots of the rows that touch it
        self.occurs: dict[int, set[int]] = {}
        self.consumed = 0

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, row: Mapping[int, int]) -> Row:
        """Remainder of ``row`` modulo the current row space."""
        p = self.p
        out = {}
        for i, c in row.items():
            c %= p
            if c:
                out[i] = c
        rows = self.rows
        for col in [c for c in out if c in rows]:
            c = out.pop(col, 0)
            if not c:
                continue
            for j, v in rows[col].items():
                if j == col:
                    continue
                w = (out.get(j, 0) - c * v) % p
                if w:
                    out[j] = w
                else:
                    del out[j]
        return out

    def add(self, row: Mapping[int, int]) -> bool:
        """Insert a row; returns True if it increased the rank."""
        self.consumed += 1
        for i in row:
            if not 0 <= i < self.dim:
                raise DimensionError(f"coordinate {i} outside 0..{self.dim - 1}")
        r = self.reduce(row)
        if not r:
            return False
        self._insert(r)
        return True

    def _insert(self, r: Row) -> None:
        p = self.p
        piv = min(r)
        inv = inv_mod(r[piv], p)
        if inv != 1:
            r = {j: v * inv % p for j, v in r.items()}
        rows, occurs = self.rows, self.occurs
        # clear the new pivot column from every existing row
        for other in occurs.pop(piv, ()):
            orow = rows[other]
            c = orow.pop(piv)
            for j, v in r.items():
                if j == piv:
                    continue
                w = (orow.get(j, 0) - c * v) % p
                if w:
                    if j not in orow:
                        occurs.setdefault(j, set()).add(other)
                    orow[j] = w
                else:
                    if j in orow:
                        del orow[j]
                        s = occurs[j]
                        s.discard(other)
                        if not s:
                            del occurs[j]
        rows[piv] = r
        for j in r:
            if j != piv:
                occurs.setdefault(j, set()).add(piv)

    def feed(self, stream: Iterable[Mapping[int, int]]) -> "Eliminator":
        for row in stream:
            self.add(row)
        return self

    def row_space(self) -> "Subspace":
        pivots = sorted(self.rows)
        basis = [SparseVec(tuple(sorted(self.rows[c].items())), self.dim) for c in pivots]
        return Subspace(self.dim, self.p, basis, _trusted=True)

    def kernel_vectors(self) -> list[Row]:
        """Basis of {x : R x = 0}, one vector per free column (ascending)."""
        p = self.p
        out = []
        for f in range(self.dim):
            if f in self.rows:
                continue
            v = {f: 1}
            for piv in self.occurs.get(f, ()):
                v[piv] = -self.rows[piv][f] % p
            out.append(v)
        return out


class Subspace:
    """Subspace of F_p^dim held as a reduced row-echelon basis."""

    def __init__(self, dim: int, p: int, basis: Sequence[SparseVec] = (), _trusted: bool = False):
        self.dim = dim
        self.p = p
        if _trusted:
            self.basis = list(basis)
        else:
            self.basis = echelonize(basis, dim, p).basis
        self.pivots = [v.pivot for v in self.basis]
        self._pivot_pos = {c: i for i, c in enumerate(self.pivots)}
        self._elim: Optional[Eliminator] = None

    @classmethod
    def zero(cls, dim: int, p: int) -> "Subspace":
        return cls(dim, p, [], _trusted=True)

    @classmethod
    def full(cls, dim: int, p: int) -> "Subspace":
        return cls(dim, p, [SparseVec(((i, 1),), dim) for i in range(dim)], _trusted=True)

    @classmethod
    def span(cls, vectors: Iterable[Union[Mapping[int, int], SparseVec]], dim: int, p: int) -> "Subspace":
        return echelonize(vectors, dim, p)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __len__(self):
        return len(self.basis)

    def _eliminator(self) -> Eliminator:
        if self._elim is None:
            e = Eliminator(self.dim, self.p)
            for v in self.basis:
                row = v.to_dict()
                e.rows[v.pivot] = row
                for j in row:
                    if j != v.pivot:
                        e.occurs.setdefault(j, set()).add(v.pivot)
            self._elim = e
        return self._elim

    def reduce(self, v: Union[Mapping[int, int], SparseVec]) -> Row:
        return self._eliminator().reduce(_as_dict(v))

    def contains(self, v: Union[Mapping[int, int], SparseVec]) -> bool:
        _check_dim(v, self.dim)
        return not self.reduce(v)

    __contains__ = contains

    def coordinates(self, v: Union[Mapping[int, int], SparseVec]) -> Optional[list[int]]:
        """Coefficients of v in ``self.basis``, or None if v is not in the span."""
        d = _as_dict(v)
        if self.reduce(d):
            return None
        p = self.p
        return [d.get(c, 0) % p for c in self.pivots]

    def coordinates_sparse(self, v: Mapping[int, int]) -> Optional[Row]:
        """Like :meth:`coordinates` but as {basis position: coefficient}."""
        if self.reduce(v):
            return None
        pos = self._pivot_pos
        p = self.p
        out = {}
        for c, val in v.items():
            i = pos.get(c)
            if i is not None and val % p:
                out[i] = val % p
        return out

    def combine(self, coeffs: Mapping[int, int]) -> Row:
        """sum_i coeffs[i] * basis[i] as a sparse dict."""
        p = self.p
        out: Row = {}
        for i, a in coeffs.items():
            if not a % p:
                continue
            for j, v in self.basis[i].entries:
                w = (out.get(j, 0) + a * v) % p
                if w:
                    out[j] = w
                else:
                    del out[j]
        return out

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(other.contains(v) for v in self.basis)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.dim == other.dim and self.p == other.p and [
            v.entries for v in self.basis
        ] == [v.entries for v in other.basis]

    def __add__(self, other: "Subspace") -> "Subspace":
        return subspace_sum(self, other)

    def __and__(self, other: "Subspace") -> "Subspace":
        return intersection(self, other)

    def __repr__(self):
        return f"Subspace(rank={self.rank}, dim={self.dim}, p={self.p})"


def _as_dict(v) -> Row:
    return v.to_dict() if isinstance(v, SparseVec) else dict(v)


def _check_dim(v, dim: int) -> None:
    if isinstance(v, SparseVec):
        if v.dim != dim:
            raise DimensionError(f"vector of dimension {v.dim} in ambient {dim}")
    else:
        for i in v:
            if not 0 <= i < dim:
                raise DimensionError(f"coordinate {i} outside 0..{dim - 1}")


def echelonize(rows: Iterable[Union[Mapping[int, int], SparseVec]], dim: int, p: int) -> Subspace:
    """Reduced row-echelon basis of the span of ``rows``."""
    e = Eliminator(dim, p)
    for r in rows:
        if isinstance(r, SparseVec) and r.dim != dim:
            raise DimensionError(f"row of dimension {r.dim} in ambient {dim}")
        e.add(_as_dict(r))
    return e.row_space()


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _same_ambient(a, b)
    return echelonize(list(a.basis) + list(b.basis), a.dim, a.p)


def intersection(a: Subspace, b: Subspace) -> Subspace:
    """A cap B from the kernel of [A; -B] (Zassenhaus-free, kernel form)."""
    _same_ambient(a, b)
    if not a.rank or not b.rank:
        return Subspace.zero(a.dim, a.p)
    p = a.p
    ra, rb = a.rank, b.rank
    # unknowns (y_1..y_ra, z_1..z_rb) with sum y_i a_i - sum z_j b_j = 0; one row per coordinate
    cols: dict[int, Row] = {}
    for i, v in enumerate(a.basis):
        for c, val in v.entries:
            cols.setdefault(c, {})[i] = val
    for j, v in enumerate(b.basis):
        for c, val in v.entries:
            cols.setdefault(c, {})[ra + j] = -val % p
    e = Eliminator(ra + rb, p)
    for c in sorted(cols):
        e.add(cols[c])
    vecs = []
    for k in e.kernel_vectors():
        y = {i: c for i, c in k.items() if i < ra}
        vecs.append(a.combine(y))
    return echelonize(vecs, a.dim, p)


def _same_ambient(a: Subspace, b: Subspace) -> None:
    if a.dim != b.dim or a.p != b.p:
        raise DimensionError(f"ambient mismatch: F_{a.p}^{a.dim} vs F_{b.p}^{b.dim}")


def nullspace(stream: Iterable[Mapping[int, int]], unknowns: int, p: int) -> Subspace:
    """Kernel of the streamed row system, as an echelonized subspace."""
    e = Eliminator(unknowns, p).feed(stream)
    return echelonize(e.kernel_vectors(), unknowns, p)


def nullspace_with_stats(stream: Iterable[Mapping[int, int]], unknowns: int, p: int) -> tuple[Subspace, int, int]:
    """Kernel plus (rows consumed, rank)."""
    e = Eliminator(unknowns, p).feed(stream)
    return echelonize(e.kernel_vectors(), unknowns, p), e.consumed, e.rank


# dense path: cross-check oracle for small ambient dimension


def dense_rref(mat: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form of an integer matrix mod p (numpy, int64)."""
    m = np.array(mat, dtype=np.int64) % p
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            m[[r, k]] = m[[k, r]]
        m[r] = m[r] * inv_mod(int(m[r, c]), p) % p
        f = m[:, c].copy()
        f[r] = 0
        nzr = np.nonzero(f)[0]
        if nzr.size:
            m[nzr] = (m[nzr] - np.outer(f[nzr], m[r])) % p
        pivots.append(c)
        r += 1
    return m[:r], pivots


def dense_nullspace(mat: np.ndarray, p: int) -> np.ndarray:
    """Kernel basis (as rows) of a dense matrix mod p."""
    mat = np.asarray(mat, dtype=np.int64)
    cols = mat.shape[1]
    if cols > DENSE_LIMIT:
        raise DimensionError(f"dense path limited to {DENSE_LIMIT} columns, got {cols}")
    if mat.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    r, piv = dense_rref(mat, p)
    free = [c for c in range(cols) if c not in set(piv)]
    out = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        out[k, f] = 1
        for i, c in enumerate(piv):
            out[k, c] = -r[i, f] % p
    return out


def dense_rank(mat: np.ndarray, p: int) -> int:
    mat = np.asarray(mat, dtype=np.int64)
    if mat.size == 0:
        return 0
    return len(dense_rref(mat, p)[1])


def to_dense(rows: Iterable[Mapping[int, int]], dim: int) -> np.ndarray:
    rows = list(rows)
    m = np.zeros((len(rows), dim), dtype=np.int64)
    for i, r in enumerate(rows):
        for j, c in r.items():
            m[i, j] = c
    return m


def iter_rows(sub: Subspace) -> Iterator[Row]:
    for v in sub.basis:
        yield v.to_dict()


def _exact_float_ok(p: int, width: int) -> bool:
    return (p - 1) ** 2 * max(width, 1) < 2**52


class DenseEliminator:
    """Chunked Gauss-Jordan over F_p for a modest number of columns.

    Rows arrive in batches; each batch is reduced against the current RREF by
    one matrix product and then echelonized.  Products run in float64, which
    is exact while (p-1)^2 * columns < 2^52.
    """

    def __init__(self, cols: int, p: int):
        if not _exact_float_ok(p, cols):
            raise DimensionError(f"{cols} columns too wide for exact float path at p={p}")
        self.cols = cols
        self.p = p
        self.R = np.zeros((0, cols), dtype=np.float64)
        self.pivots: list[int] = []
        self.consumed = 0

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def add_batch(self, M: np.ndarray) -> None:
        p = self.p
        M = np.mod(np.asarray(M, dtype=np.float64), p)
        self.consumed += M.shape[0]
        if self.rank == self.cols or M.size == 0:
            return
        if self.pivots:
            M = np.mod(M - M[:, self.pivots] @ self.R, p)
        M = M[np.any(M != 0, axis=1)]
        if not M.shape[0]:
            return
        new, piv = dense_rref(M.astype(np.int64), p)
        if not piv:
            return
        new = new.astype(np.float64)
        if self.pivots:
            self.R = np.mod(self.R - self.R[:, piv] @ new, p)
        R = np.vstack([self.R, new])
        pivots = self.pivots + piv
        order = np.argsort(pivots)
        self.R = R[order]
        self.pivots = [pivots[i] for i in order]

    def kernel(self) -> np.ndarray:
        """Kernel basis as int64 rows, one per free column (ascending)."""
        p = self.p
        piv = self.pivots
        pset = set(piv)
        free = [c for c in range(self.cols) if c not in pset]
        out = np.zeros((len(free), self.cols), dtype=np.int64)
        if not free:
            return out
        R = self.R.astype(np.int64)
        for t, f in enumerate(free):
            out[t, f] = 1
            if piv:
                out[t, piv] = (-R[:, f]) % p
        return out


def block_nullspace(rows: Sequence[Mapping[int, int]], unknowns: Sequence[int], p: int, batch: int = 4096) -> list[Row]:
    """Kernel of rows restricted to the listed global unknowns; returns global sparse vectors.

    Every row must only touch coordinates in ``unknowns``.
    """
    local = {u: i for i, u in enumerate(unknowns)}
    n = len(unknowns)
    if n == 0:
        return []
    if not _exact_float_ok(p, n) or n > 4 * DENSE_LIMIT:
        e = Eliminator(n, p)
        for r in rows:
            e.add({local[u]: c for u, c in r.items()})
        kers = e.kernel_vectors()
        return [{unknowns[i]: c for i, c in k.items()} for k in kers]
    de = DenseEliminator(n, p)
    buf = np.zeros((batch, n), dtype=np.float64)
    fill = 0
    for r in rows:
        for u, c in r.items():
            buf[fill, local[u]] = c
        fill += 1
        if fill == batch:
            de.add_batch(buf)
            buf[:] = 0
            fill = 0
    if fill:
        de.add_batch(buf[:fill])
    out = []
    for k in de.kernel():
        nz = np.nonzero(k)[0]
        out.append({unknowns[i]: int(k[i]) for i in nz})
    return out
