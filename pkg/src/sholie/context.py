"""Parameters (n, p, t) of a truncated superalgebra and its monomial basis."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Sequence

from .ffield import FieldError, MultiIndex, check_characteristic


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class Monomial:
    """x^(alpha) x^u with u stored as a bit mask: bit k <-> odd variable n+1+k."""

    alpha: MultiIndex
    u: int

    @property
    def n(self) -> int:
        return len(self.alpha)

    @property
    def odd_vars(self) -> tuple[int, ...]:
        n = self.n
        return tuple(n + 1 + k for k in range(n) if self.u >> k & 1)

    @property
    def parity(self) -> int:
        return bin(self.u).count("1") & 1

    @property
    def zdegree(self) -> int:
        return sum(self.alpha) + bin(self.u).count("1")

    def render(self) -> str:
        parts = [f"x{i + 1}^({a})" for i, a in enumerate(self.alpha) if a]
        parts += [f"x{j}" for j in self.odd_vars]
        return " ".join(parts) if parts else "1"


@dataclass(frozen=True)
class AlgebraContext:
    """Fixed (n, p, t) together with derived bounds pi and xi.

    Monomial keys pack (alpha, u) as ``u + 2**n * sum_i alpha_i * R_i`` where
    ``R_i = prod_{j<i} p**t_j`` is a mixed radix, so every key is a distinct
    non-negative integer below ``2**n * p**|t|``.
    """

    n: int
    p: int
    t: tuple[int, ...]
    _tables: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        try:
            check_characteristic(self.p)
        except FieldError as exc:
            raise ParameterError(str(exc)) from None
        if not isinstance(self.n, int) or self.n < 2:
            raise ParameterError(f"n must be an integer >= 2, got {self.n!r}")
        t = tuple(int(x) for x in self.t)
        if len(t) != self.n or any(x < 1 for x in t):
            raise ParameterError(f"t must be {self.n} positive integers, got {self.t!r}")
        object.__setattr__(self, "t", t)

    @classmethod
    def create(cls, n: int, p: int, t: Sequence[int] | None = None) -> "AlgebraContext":
        return cls(n, p, tuple(t) if t is not None else (1,) * n)

    def __reduce__(self):
        return (AlgebraContext, (self.n, self.p, self.t))

    @property
    def pi(self) -> MultiIndex:
        return tuple(self.p**ti - 1 for ti in self.t)

    @property
    def xi(self) -> int:
        return sum(self.pi) + self.n

    @cached_property
    def radix(self) -> tuple[int, ...]:
        out, r = [], 1
        for ti in self.t:
            out.append(r)
            r *= self.p**ti
        return tuple(out)

    @property
    def dim_lambda(self) -> int:
        return self.p ** sum(self.t) * 2**self.n

    @property
    def dim_w(self) -> int:
        return 2 * self.n * self.dim_lambda

    @property
    def label(self) -> str:
        return f"({self.n},{self.p},({','.join(map(str, self.t))}))"

    # index conventions: directions 1..2n, even 1..n, odd n+1..2n
    def tau(self, i: int) -> int:
        self.check_direction(i)
        return 0 if i <= self.n else 1

    def prime(self, i: int) -> int:
        self.check_direction(i)
        return i + self.n if i <= self.n else i - self.n

    def check_direction(self, i: int) -> None:
        if not 1 <= i <= 2 * self.n:
            raise ParameterError(f"direction index {i} outside 1..{2 * self.n}")

    def key(self, m: Monomial) -> int:
        if len(m.alpha) != self.n or any(a < 0 or a > b for a, b in zip(m.alpha, self.pi)):
            raise ParameterError(f"exponent {m.alpha} violates bounds {self.pi}")
        if m.u >> self.n:
            raise ParameterError(f"odd mask {m.u:b} has variables beyond 2n")
        return m.u + (sum(a * r for a, r in zip(m.alpha, self.radix)) << self.n)

    def monomial(self, key: int) -> Monomial:
        return self._decoded[key]

    def monomial_from(self, alpha: Sequence[int] = (), odd: Sequence[int] = ()) -> Monomial:
        """Build x^(alpha) x_{odd...}; odd variables given as indices in n+1..2n."""
        alpha = tuple(alpha) if alpha else (0,) * self.n
        mask = 0
        for j in odd:
            if not self.n < j <= 2 * self.n:
                raise ParameterError(f"{j} is not an odd variable index")
            mask |= 1 << (j - self.n - 1)
        m = Monomial(alpha, mask)
        self.key(m)
        return m

    @cached_property
    def basis(self) -> tuple[Monomial, ...]:
        """All monomials sorted by (|alpha|+|u|, key)."""
        monos = [
            Monomial(alpha, u)
            for alpha in product(*(range(b + 1) for b in self.pi))
            for u in range(2**self.n)
        ]
        monos.sort(key=lambda m: (m.zdegree, self.key(m)))
        return tuple(monos)

    @cached_property
    def basis_keys(self) -> tuple[int, ...]:
        return tuple(self.key(m) for m in self.basis)

    @cached_property
    def _decoded(self) -> dict[int, Monomial]:
        return {self.key(m): m for m in self.basis}

    @cached_property
    def position(self) -> dict[int, int]:
        """Monomial key -> position in the graded basis order."""
        return {k: i for i, k in enumerate(self.basis_keys)}

    def w_coord(self, key: int, j: int) -> int:
        return self.position[key] * 2 * self.n + (j - 1)

    def w_term(self, coord: int) -> tuple[int, int]:
        pos, j = divmod(coord, 2 * self.n)
        return self.basis_keys[pos], j + 1

    def check_same(self, other: "AlgebraContext") -> None:
        if other is not self and (other.n, other.p, other.t) != (self.n, self.p, self.t):
            raise ParameterError(f"context mismatch: {self.label} vs {other.label}")
