from __future__ import annotations

import random

import pytest

from sholie.cartan import t_h
from sholie.lambda_alg import SuperPoly, basis_polys
from sholie.linalg import Subspace
from sholie.structure import (
    StructureError,
    StructureTensor,
    WeightDecompositionError,
    center,
    centralizer,
    closed_form_weight,
    component_coords,
    ideal_generated,
    simplicity_check,
    toral_basis,
    toral_pair,
    weight_decompose,
    weight_spaces_of_sho,
)
from sholie.witt import VectorField, bracket


def x(ctx, i):
    return SuperPoly.var(ctx, i)


def test_parities_match_fields(chain23, st23):
    assert st23.parities == [v.parity for v in chain23.basis_vf]


def test_even_self_bracket_vanishes(st333):
    for a in range(st333.dim):
        if st333.parities[a] == 0:
            assert not st333.get(a, a)


def test_tensor_reproduces_bracket(chain333, st333):
    basis = chain333.basis_vf
    rnd = random.Random(0)
    for _ in range(200):
        a, b = rnd.randrange(st333.dim), rnd.randrange(st333.dim)
        expected = VectorField.zero(chain333.ctx)
        for k, c in st333.get(a, b).items():
            expected = expected + basis[k].scale(c)
        assert bracket(basis[a], basis[b]) == expected


@pytest.mark.parametrize("fixture", ["st23", "st25"])
def test_skew_and_full_jacobi(fixture, request):
    st = request.getfixturevalue(fixture)
    assert st.skew_violations() == 0
    if st.dim <= 20:
        assert st.jacobi_violations() == 0
    else:
        assert st.jacobi_violations(st.random_triples(2000)) == 0


def test_jacobi_sampled_large(st333):
    assert st333.skew_violations() == 0
    assert st333.jacobi_violations(st333.random_triples(2000, seed=1)) == 0


def test_broken_tensor_detected():
    # sl2-like table with a deliberately wrong sign
    st = StructureTensor.from_entries(2, 3, [0, 0], {(0, 1, 1): 1, (1, 0, 1): 1})
    assert st.skew_violations() == 2


def test_homogeneity_check(st23):
    odd = st23.parities.index(1)
    even = st23.parities.index(0)
    with pytest.raises(StructureError):
        st23.parity_of({odd: 1, even: 1})


def test_torus_abelian_and_in_sho(chain333):
    ctx = chain333.ctx
    hs = toral_basis(ctx)
    assert len(hs) == ctx.n - 1
    for a in hs:
        assert chain333.SHO.contains(a.coords())
        for b in hs:
            assert not bracket(a, b)


def test_single_toral_for_n2(ctx23, chain23):
    hs = toral_basis(ctx23)
    assert len(hs) == 1
    assert chain23.SHO.contains(hs[0].coords())


def test_all_pairs_in_span_of_consecutive(ctx333):
    # h_13 = h_12 + h_23
    hs = toral_basis(ctx333)
    assert toral_pair(ctx333, 1, 3) == hs[0] + hs[1]


@pytest.mark.parametrize("fixture", ["ctx23", "ctx333"])
def test_specific_weights(fixture, request):
    ctx = request.getfixturevalue(fixture)
    p = ctx.p
    for i in range(1, ctx.n + 1):
        for j in range(1, ctx.n + 1):
            if i == j:
                continue
            h = toral_pair(ctx, i, j)
            xi, xip, xjp = x(ctx, i), x(ctx, ctx.prime(i)), x(ctx, ctx.prime(j))
            assert bracket(h, t_h(xip)) == t_h(xip)
            assert bracket(h, t_h(xi)) == t_h(xi).scale(-1)
            assert bracket(h, t_h(xi * xjp)) == t_h(xi * xjp).scale(-2 % p)


@pytest.mark.parametrize("fixture", ["ctx23", "ctx25", "ctx333"])
def test_closed_form_weights_exhaustive(fixture, request):
    ctx = request.getfixturevalue(fixture)
    hs = toral_basis(ctx)
    for f in basis_polys(ctx):
        v = t_h(f)
        if not v:
            continue
        w = closed_form_weight(ctx, next(iter(f.terms)))
        for h, lam in zip(hs, w):
            assert bracket(h, v) == v.scale(lam)


@pytest.mark.parametrize("fixture", ["chain23", "chain333"])
def test_weight_decomposition_of_ho(fixture, request):
    ch = request.getfixturevalue(fixture)
    ctx = ch.ctx
    hs = toral_basis(ctx)
    spaces = weight_decompose(ctx, ch.HO, hs)
    assert sum(s.rank for s in spaces.values()) == ch.HO.rank
    total = Subspace.zero(ctx.dim_w, ctx.p)
    for w, s in spaces.items():
        assert all(0 <= lam < ctx.p for lam in w)
        total = total + s
        for v in s.basis:
            vf = VectorField.from_coords(ctx, v.to_dict())
            for h, lam in zip(hs, w):
                assert bracket(h, vf) == vf.scale(lam)
    assert total == ch.HO
    sho = weight_spaces_of_sho(ch, spaces)
    assert sum(s.rank for s in sho.values()) == ch.dim


def test_weight_decomposition_detects_non_semisimple(ctx23, chain23):
    # ad(x1 D2) is nilpotent and nonzero on W: no eigenbasis
    nil = VectorField.from_poly(x(ctx23, 1), 2)
    with pytest.raises(WeightDecompositionError, match="weight decomposition failed"):
        weight_decompose(ctx23, Subspace.full(ctx23.dim_w, 3), [nil])


def test_basis_weights_recorded(st333):
    assert st333.weights is not None and len(st333.weights) == st333.dim
    W, degs = st333.gradings()
    assert W == st333.weights and degs == st333.degrees


def test_center_and_centralizers(chain333, st333):
    assert center(st333).rank == 0
    minus = component_coords(chain333, -1)
    assert len(minus) == 6
    assert centralizer(st333, minus) == Subspace.span(minus, st333.dim, st333.p)
    assert centralizer(st333, []) == Subspace.full(st333.dim, st333.p)


def test_simplicity(st23, st333):
    assert simplicity_check(st333)["simple"]
    res = simplicity_check(st23)
    assert res["center_dim"] == 0
    assert not res["simple"] and len(res["non_generating_basis_vectors"]) == 7
    b = res["non_generating_basis_vectors"][0]
    ideal = ideal_generated(st23, {b: 1})
    assert 0 < ideal.rank < st23.dim
    for a in range(st23.dim):
        for v in ideal.basis:
            assert ideal.contains(st23.bracket({a: 1}, v.to_dict()))


def test_simplicity_n2_p5(st25):
    res = simplicity_check(st25)
    assert not res["simple"] and len(res["non_generating_basis_vectors"]) == 23
