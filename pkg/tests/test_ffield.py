from __future__ import annotations

from itertools import product
from math import comb, factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sholie.ffield import (
    GF,
    FieldElem,
    FieldError,
    binom_int_mod_p,
    binom_mod_p,
    check_characteristic,
    inv_mod,
    mi_add_bounded,
    signed,
    unit_index,
)


def test_product_wraps():
    F = GF(3)
    assert F(2) * F(2) == F(1)


def test_inverse_mod_5():
    F = GF(5)
    assert F(2).inv() == F(3)
    assert inv_mod(2, 5) == 3


def test_negation_mod_3():
    assert -GF(3)(1) == GF(3)(2)


def test_division_and_zero_inverse():
    F = GF(7)
    assert F(3) / F(3) == F(1)
    with pytest.raises(ZeroDivisionError):
        F(0).inv()


@pytest.mark.parametrize("p", [2, 4, 9, 1, 0, -3])
def test_rejects_bad_characteristic(p):
    with pytest.raises(FieldError, match="unsupported characteristic"):
        GF(p)


def test_accepts_odd_primes():
    for p in (3, 5, 7, 11, 13):
        assert check_characteristic(p) == p


def test_residue_range_enforced():
    with pytest.raises(FieldError):
        FieldElem(3, 3)


def test_mixing_fields_is_an_error():
    with pytest.raises(FieldError):
        GF(3)(1) + GF(5)(1)


def test_signed_representative():
    assert [signed(c, 5) for c in range(5)] == [0, 1, 2, -2, -1]
    assert [signed(c, 3) for c in range(3)] == [0, 1, -1]


def test_binomial_p_divides():
    assert binom_int_mod_p(3, 1, 3) == 0


def test_binomial_multi_index():
    # C(2,1) * C(1,1) = 2
    assert binom_mod_p((2, 1), (1, 1), 3) == 2


def test_binomial_empty_choice():
    for p in (3, 5, 7):
        for alpha in [(0, 0), (2, 1), (4, 4)]:
            assert binom_mod_p(alpha, (0,) * len(alpha), p) == 1


def test_binomial_invalid():
    with pytest.raises(FieldError, match="invalid binomial"):
        binom_mod_p((1, 0), (2, 0), 3)
    with pytest.raises(FieldError, match="invalid binomial"):
        binom_mod_p((1,), (0, 0), 3)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_lucas_matches_factorials(p):
    # exhaustive over small pairs, oracle = exact factorial formula
    for top in range(13):
        for bottom in range(top + 1):
            exact = factorial(top) // (factorial(bottom) * factorial(top - bottom))
            assert binom_int_mod_p(top, bottom, p) == exact % p


@pytest.mark.parametrize("p", [3, 5])
def test_multi_index_binomial_exhaustive(p):
    # all alpha, beta in two coordinates with |alpha + beta| <= 12
    for a1, a2, b1, b2 in product(range(7), repeat=4):
        if a1 + a2 + b1 + b2 > 12:
            continue
        top, bottom = (a1 + b1, a2 + b2), (a1, a2)
        assert binom_mod_p(top, bottom, p) == comb(a1 + b1, a1) * comb(a2 + b2, a2) % p


def test_bounded_addition():
    assert mi_add_bounded((1, 0), (1, 0), (2, 2)) == (2, 0)
    assert mi_add_bounded((2, 0), (1, 0), (2, 2)) is None
    alpha = (2, 1, 0)
    assert mi_add_bounded((0, 0, 0), alpha, (2, 2, 2)) == alpha
    with pytest.raises(FieldError):
        mi_add_bounded((1,), (1, 0), (2, 2))


def test_unit_index():
    assert unit_index(1, 3) == (1, 0, 0)
    assert unit_index(3, 3) == (0, 0, 1)


primes = st.sampled_from([3, 5, 7])


@settings(max_examples=1000, deadline=None)
@given(primes, st.integers(0, 10**6), st.integers(0, 10**6), st.integers(0, 10**6))
def test_field_axioms(p, a, b, c):
    F = GF(p)
    x, y, z = F(a), F(b), F(c)
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == F(0)
    if x:
        assert x * x.inv() == F(1)
