"""Prime-field arithmetic and bounded multi-index combinatorics.

Hot paths elsewhere in the package work on plain ``int`` residues; the
:class:`GF` / :class:`FieldElem` pair is the checked public surface.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Optional, Sequence

MultiIndex = tuple[int, ...]


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_characteristic(p: int) -> int:
    if not isinstance(p, int) or p <= 2 or not is_prime(p):
        raise FieldError(f"unsupported characteristic: {p!r} (need an odd prime)")
    return p


class GF:
    """The prime field F_p for an odd prime p."""

    def __init__(self, p: int):
        self.p = check_characteristic(p)

    def __call__(self, value: int) -> "FieldElem":
        return FieldElem(value % self.p, self.p)

    def __eq__(self, other):
        return isinstance(other, GF) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return f"GF({self.p})"

    def elements(self):
        return [FieldElem(v, self.p) for v in range(self.p)]


@dataclass(frozen=True)
class FieldElem:
    value: int
    p: int

    def __post_init__(self):
        if not 0 <= self.value < self.p:
            raise FieldError(f"residue {self.value} out of range for p={self.p}")

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.p != self.p:
                raise FieldError(f"mixing F_{self.p} and F_{other.p}")
            return other.value
        if isinstance(other, int):
            return other % self.p
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        return FieldElem((self.value + v) % self.p, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        return FieldElem((self.value - v) % self.p, self.p)

    def __rsub__(self, other):
        v = self._coerce(other)
        return FieldElem((v - self.value) % self.p, self.p)

    def __mul__(self, other):
        v = self._coerce(other)
        return FieldElem(self.value * v % self.p, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElem(-self.value % self.p, self.p)

    def inv(self) -> "FieldElem":
        return FieldElem(inv_mod(self.value, self.p), self.p)

    def __truediv__(self, other):
        v = self._coerce(other)
        return self * FieldElem(v, self.p).inv()

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} (mod {self.p})"


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"inverse of 0 in F_{p}")
    return pow(a, p - 2, p)


def signed(c: int, p: int) -> int:
    """Symmetric representative of ``c`` in (-p/2, p/2]."""
    c %= p
    return c - p if c > p // 2 else c


@lru_cache(maxsize=None)
def _small_binom_table(p: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(comb(a, b) % p for b in range(p)) for a in range(p))


def binom_int_mod_p(top: int, bottom: int, p: int) -> int:
    """C(top, bottom) mod p by Lucas' theorem, digit by digit."""
    if bottom < 0 or bottom > top:
        raise FieldError(f"invalid binomial C({top}, {bottom})")
    table = _small_binom_table(p)
    result = 1
    while bottom:
        a, b = top % p, bottom % p
        if b > a:
            return 0
        result = result * table[a][b] % p
        top //= p
        bottom //= p
    return result


def binom_mod_p(top: Sequence[int], bottom: Sequence[int], p: int) -> int:
    """Multi-index binomial prod_i C(top_i, bottom_i) mod p."""
    if len(top) != len(bottom):
        raise FieldError("invalid binomial: length mismatch")
    result = 1
    for a, b in zip(top, bottom):
        if b < 0 or b > a:
            raise FieldError(f"invalid binomial: {tuple(bottom)} is not <= {tuple(top)}")
        result = result * binom_int_mod_p(a, b, p) % p
        if not result:
            return 0
    return result


def mi_add_bounded(a: Sequence[int], b: Sequence[int], bounds: Sequence[int]) -> Optional[MultiIndex]:
    """Componentwise a+b, or None when some entry exceeds its bound."""
    if not len(a) == len(b) == len(bounds):
        raise FieldError("multi-index length mismatch")
    out = []
    for x, y, m in zip(a, b, bounds):
        s = x + y
        if s > m:
            return None
        out.append(s)
    return tuple(out)


def unit_index(i: int, n: int) -> MultiIndex:
    """epsilon_i with 1-based i."""
    return tuple(1 if k == i - 1 else 0 for k in range(n))
