"""Verification suites behind ``sholie verify``.

Every check returns a plain dict with ``name``, ``passed``, ``checked`` and
``violations`` plus optional detail; suites collect them.  Random sampling
is driven by one seeded :class:`random.Random` per check so that a given
configuration always produces the same report.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Optional

from . import bider
from .cartan import AlgebraChain, build_chain, derived_subalgebra, t_h, th_kernel
from .context import AlgebraContext
from .io import AlgebraFile
from .lambda_alg import SuperPoly, basis_polys, derive, superpoly_mul
from .linalg import Subspace, nullspace
from .structure import (
    StructureTensor,
    center,
    centralizer,
    closed_form_weight,
    component_coords,
    simplicity_check,
    structure_constants,
    toral_basis,
    toral_pair,
    weight_decompose,
    weight_spaces_of_sho,
)
from .witt import DIV_CONVENTIONS, VectorField, apply, basis_fields, bracket, divergence, div_identity_rhs

log = logging.getLogger(__name__)

SUITES = ("identities", "chain", "weights", "lemmas", "theorem")
W_EXHAUSTIVE = 400
SAMPLED_PAIRS = 20_000


def check(name: str, violations: int, checked: int, **detail) -> dict:
    out = {"name": name, "passed": violations == 0, "checked": checked, "violations": violations}
    out.update(detail)
    return out


@dataclass
class Session:
    ctx: AlgebraContext
    seed: int = 0
    mode: str = "dense"
    algebra: Optional[AlgebraFile] = None
    timings: bool = False
    _solves: dict = field(default_factory=dict)

    def rng(self, tag: str) -> random.Random:
        return random.Random(f"{self.seed}:{tag}")

    @cached_property
    def chain(self) -> AlgebraChain:
        return build_chain(self.ctx)

    @cached_property
    def st(self) -> StructureTensor:
        if self.algebra is not None:
            return self.algebra.st
        return structure_constants(self.chain)

    @cached_property
    def simplicity(self) -> dict:
        if self.algebra is not None and self.algebra.simplicity:
            return self.algebra.simplicity
        return simplicity_check(self.st)

    @property
    def degenerate(self) -> bool:
        return not self.simplicity["simple"]

    @cached_property
    def torals(self) -> list[VectorField]:
        return toral_basis(self.ctx)

    def solve(self, parity: int, mode: str):
        key = (parity, mode)
        if key not in self._solves:
            self._solves[key] = bider.solve(self.st, parity, mode)
        return self._solves[key]


def _poly_eq(f: SuperPoly, g: SuperPoly) -> bool:
    return f.terms == g.terms


def _sign(bit: int) -> int:
    return -1 if bit & 1 else 1


# identities


def identities(s: Session) -> list[dict]:
    ctx = s.ctx
    polys = basis_polys(ctx)
    N = len(polys)
    out = []

    keys = [next(iter(f.terms)) for f in polys]
    out.append(
        check(
            "lambda_dimension",
            int(N != ctx.dim_lambda or len(set(keys)) != N),
            1,
            dim=N,
            expected=ctx.p ** sum(ctx.t) * 2**ctx.n,
        )
    )

    bad = 0
    for f in polys:
        for g in polys:
            s_ = _sign(f.parity * g.parity)
            if not _poly_eq(superpoly_mul(f, g), superpoly_mul(g, f).scale(s_)):
                bad += 1
    out.append(check("supercommutativity", bad, N * N, exhaustive=True))

    rnd = s.rng("assoc")
    bad = 0
    for _ in range(500):
        f, g, h = (rnd.choice(polys) for _ in range(3))
        if not _poly_eq(superpoly_mul(superpoly_mul(f, g), h), superpoly_mul(f, superpoly_mul(g, h))):
            bad += 1
    out.append(check("associativity", bad, 500, exhaustive=False))

    bad = 0
    for i in range(1, 2 * ctx.n + 1):
        tau = ctx.tau(i)
        for f in polys:
            df = derive(i, f)
            sg = _sign(tau * f.parity)
            for g in polys:
                lhs = derive(i, superpoly_mul(f, g))
                rhs = superpoly_mul(df, g) + superpoly_mul(f, derive(i, g)).scale(sg)
                if not _poly_eq(lhs, rhs):
                    bad += 1
    out.append(check("superderivation_rule", bad, 2 * ctx.n * N * N, exhaustive=True))

    W = basis_fields(ctx)
    pairs, exhaustive = _pairs(len(W), s.rng("w-pairs"))
    bad_skew = 0
    div_bad = {c: 0 for c in DIV_CONVENTIONS}
    for i, j in pairs:
        a, b = W[i], W[j]
        ab, ba = bracket(a, b), bracket(b, a)
        if ab != ba.scale(-_sign(a.parity * b.parity)):
            bad_skew += 1
        lhs = divergence(ab)
        for conv in DIV_CONVENTIONS:
            if not _poly_eq(lhs, div_identity_rhs(a, b, conv)):
                div_bad[conv] += 1
    out.append(check("bracket_super_skew", bad_skew, len(pairs), exhaustive=exhaustive))
    holding = [c for c in DIV_CONVENTIONS if div_bad[c] == 0]
    out.append(
        check(
            "divergence_identity",
            int(len(holding) != 1),
            len(pairs),
            exhaustive=exhaustive,
            convention=holding[0] if len(holding) == 1 else None,
            failures_per_convention=div_bad,
        )
    )

    rnd = s.rng("jacobi")
    trials = 1000 if ctx.n == 2 else 200
    bad = 0
    for _ in range(trials):
        a, b, c = (rnd.choice(W) for _ in range(3))
        lhs = bracket(a, bracket(b, c))
        rhs = bracket(bracket(a, b), c) + bracket(b, bracket(a, c)).scale(_sign(a.parity * b.parity))
        if lhs != rhs:
            bad += 1
    out.append(check("graded_jacobi", bad, trials, exhaustive=False))

    rnd = s.rng("rep")
    bad = 0
    for _ in range(trials):
        a, b = rnd.choice(W), rnd.choice(W)
        g = rnd.choice(polys)
        lhs = apply(bracket(a, b), g)
        rhs = apply(a, apply(b, g)) - apply(b, apply(a, g)).scale(_sign(a.parity * b.parity))
        if not _poly_eq(lhs, rhs):
            bad += 1
    out.append(check("action_is_representation", bad, trials, exhaustive=False))

    th = [t_h(f) for f in polys]
    bad = 0
    for f, v in zip(polys, th):
        if v and v.parity != (f.parity + 1) & 1:
            bad += 1
    out.append(check("th_parity_shift", bad, N, exhaustive=True))

    if N <= 64:
        idx_pairs = list(product(range(N), repeat=2))
        exhaustive = True
    else:
        rnd = s.rng("th")
        idx_pairs = [(rnd.randrange(N), rnd.randrange(N)) for _ in range(2000)]
        exhaustive = False
    bad = 0
    for i, j in idx_pairs:
        lhs = bracket(th[i], th[j])
        rhs = t_h(apply(th[i], polys[j]))
        if lhs != rhs:
            bad += 1
    out.append(check("th_homomorphism", bad, len(idx_pairs), exhaustive=exhaustive))

    out.append(check("w_dimension", int(len(W) != 2 * ctx.n * N), 1, dim=len(W)))
    ho = s.chain.HO.rank
    kernel = th_kernel(ctx).rank
    out.append(
        check(
            "ho_dimension",
            int(ho != N - 1 or ho != N - kernel),
            1,
            dim=ho,
            expected=N - 1,
            derivation_kernel_oracle=N - kernel,
        )
    )
    return out


def _pairs(m: int, rnd: random.Random) -> tuple[list[tuple[int, int]], bool]:
    if m <= W_EXHAUSTIVE:
        return list(product(range(m), repeat=2)), True
    return [(rnd.randrange(m), rnd.randrange(m)) for _ in range(SAMPLED_PAIRS)], False


# chain


def _closure_violations(ctx: AlgebraContext, sub: Subspace, rnd: random.Random, limit: int = 60) -> tuple[int, int, bool]:
    vfs = [VectorField.from_coords(ctx, v.to_dict()) for v in sub.basis]
    m = len(vfs)
    if m <= limit:
        pairs = list(product(range(m), repeat=2))
        exhaustive = True
    else:
        pairs = [(rnd.randrange(m), rnd.randrange(m)) for _ in range(2000)]
        exhaustive = False
    bad = sum(1 for i, j in pairs if not sub.contains(bracket(vfs[i], vfs[j]).coords()))
    return bad, len(pairs), exhaustive


def chain_checks(s: Session) -> list[dict]:
    ctx = s.ctx
    ch = s.chain
    out = [check("chain_dimensions", 0, 1, dims=ch.dims)]
    incl = [
        ("SHO<=SHObar", ch.SHO, ch.SHObar),
        ("SHObar<=SHOprime", ch.SHObar, ch.SHOprime),
        ("SHOprime<=Sprime", ch.SHOprime, ch.Sprime),
        ("SHOprime<=HO", ch.SHOprime, ch.HO),
    ]
    bad = sum(sum(1 for v in a.basis if not b.contains(v)) for _, a, b in incl)
    out.append(check("chain_inclusions", bad, sum(a.rank for _, a, _ in incl), relations=[r for r, _, _ in incl]))
    inter = ch.Sprime & ch.HO
    out.append(check("SHOprime_is_Sprime_cap_HO", int(inter != ch.SHOprime), 1))
    bad = sum(1 for v in ch.basis_vf if divergence(v))
    out.append(check("sho_divergence_free", bad, len(ch.basis_vf)))

    for label, sub in (("HO", ch.HO), ("Sprime", ch.Sprime), ("SHOprime", ch.SHOprime), ("SHObar", ch.SHObar)):
        bad, n, ex = _closure_violations(ctx, sub, s.rng(f"closure-{label}"))
        out.append(check(f"closure_{label}", bad, n, exhaustive=ex))

    st = s.st  # raises if some SHO bracket leaves SHO
    out.append(check("closure_SHO", 0, st.dim**2, exhaustive=True))
    if ch.SHO.rank:
        derived = derived_subalgebra(ctx, ch.SHO)
        out.append(check("sho_perfect", int(derived != ch.SHO), 1, derived_dim=derived.rank))
    out.append(check("structure_skew", st.skew_violations(), st.dim**2))
    if st.dim <= 40:
        jac, n, ex = st.jacobi_violations(), st.dim**3, True
    else:
        triples = st.random_triples(2000, s.seed)
        jac, n, ex = st.jacobi_violations(triples), 2000, False
    out.append(check("structure_jacobi", jac, n, exhaustive=ex))

    comps = ch.components()
    total = sum(c.rank for c in comps.values())
    out.append(
        check(
            "graded_components",
            int(total != ch.SHO.rank or any(r < -1 or r > ctx.xi - 5 for r, c in comps.items() if c.rank)),
            len(comps),
            dims={str(r): c.rank for r, c in comps.items()},
            top_degree=ctx.xi - 5,
        )
    )
    degs = ch.zdegrees()
    if degs:
        top = max(degs)
        out.append(check("top_degree_is_xi_minus_5", int(top != ctx.xi - 5), 1, top=top))
    bad = sum(1 for (a, b), row in st.table.items() for k in row if degs[k] != degs[a] + degs[b])
    out.append(check("bracket_respects_degree", bad, len(st.table)))

    simp = s.simplicity
    out.append(
        check(
            "simplicity",
            0,
            st.dim,
            simple=simp["simple"],
            center_dim=simp["center_dim"],
            non_generating=len(simp["non_generating_basis_vectors"]),
            note="reported, not required" if not simp["simple"] else "",
        )
    )
    if not s.degenerate:
        z = center(st)
        out.append(check("center_zero", z.rank, 1, center_dim=z.rank))
        minus = component_coords(ch, -1)
        zc = centralizer(st, minus)
        expected = Subspace.span(minus, st.dim, st.p)
        out.append(
            check(
                "centralizer_of_degree_minus_one",
                int(zc != expected),
                1,
                centralizer_dim=zc.rank,
                degree_minus_one_dim=len(minus),
            )
        )
    else:
        out.append(check("center_zero", 0, 0, skipped="degenerate parameters"))
    return out


# weights


def weight_checks(s: Session) -> tuple[list[dict], dict]:
    ctx = s.ctx
    ch = s.chain
    p = ctx.p
    hs = s.torals
    out = []
    bad = sum(1 for a in hs for b in hs if bracket(a, b))
    out.append(check("torus_abelian", bad, len(hs) ** 2))
    bad = sum(1 for h in hs if not ch.SHO.contains(h.coords()))
    out.append(check("torus_in_sho", bad, len(hs)))

    spaces = weight_decompose(ctx, ch.HO, hs)
    total = sum(v.rank for v in spaces.values())
    out.append(check("ho_weight_direct_sum", int(total != ch.HO.rank), 1, parts=len(spaces)))
    bad = 0
    for w, sub in spaces.items():
        for v in sub.basis:
            vf = VectorField.from_coords(ctx, v.to_dict())
            for h, lam in zip(hs, w):
                if bracket(h, vf) != vf.scale(lam):
                    bad += 1
    out.append(check("ho_weight_spaces_stable", bad, total * len(hs)))

    bad = checked = 0
    for f in basis_polys(ctx):
        v = t_h(f)
        if not v:
            continue
        checked += 1
        w = closed_form_weight(ctx, next(iter(f.terms)))
        if any(bracket(h, v) != v.scale(lam) for h, lam in zip(hs, w)):
            bad += 1
    out.append(check("closed_form_weights", bad, checked, exhaustive=True))

    specific = []
    for i in range(1, ctx.n + 1):
        for j in range(1, ctx.n + 1):
            if i == j:
                continue
            h = toral_pair(ctx, i, j)
            x = lambda k: SuperPoly.var(ctx, k)
            for label, f, want in (
                ("T_H(x_i')", x(ctx.prime(i)), 1),
                ("T_H(x_i)", x(i), -1),
                ("T_H(x_i x_j')", x(i) * x(ctx.prime(j)), -2),
            ):
                v = t_h(f)
                specific.append((label, i, j, bracket(h, v) == v.scale(want % p)))
    bad = sum(1 for *_, ok in specific if not ok)
    out.append(
        check(
            "specific_weights",
            bad,
            len(specific),
            expected={"T_H(x_i')": 1, "T_H(x_i)": -1, "T_H(x_i x_j')": -2},
        )
    )

    sho_spaces = weight_spaces_of_sho(ch, spaces)
    total = sum(v.rank for v in sho_spaces.values())
    out.append(check("sho_weight_direct_sum", int(total != ch.SHO.rank), 1))
    table = {
        "ho": {_wkey(w): v.rank for w, v in spaces.items()},
        "sho": {_wkey(w): v.rank for w, v in sho_spaces.items()},
        "named_sho_weight_spaces": _named_weights(ctx, sho_spaces),
    }
    return out, table


def _wkey(w) -> str:
    return ",".join(str(x) for x in w)


def _named_weights(ctx: AlgebraContext, spaces) -> dict:
    """dim SHO_(eps_i), SHO_(<i'>), SHO_(eps_i + <j'>) for the weights of x_i, x_i', x_i x_j'."""
    out = {}
    x = lambda k: SuperPoly.var(ctx, k)
    for i in range(1, ctx.n + 1):
        for label, f in ((f"eps_{i}", x(i)), (f"<{ctx.prime(i)}>", x(ctx.prime(i)))):
            w = closed_form_weight(ctx, next(iter(f.terms)))
            out[label] = spaces[w].rank if w in spaces else 0
        for j in range(1, ctx.n + 1):
            if j != i:
                f = x(i) * x(ctx.prime(j))
                w = closed_form_weight(ctx, next(iter(f.terms)))
                out[f"eps_{i}+<{ctx.prime(j)}>"] = spaces[w].rank if w in spaces else 0
    return out


# biderivations


def _toral_coords(s: Session) -> list[dict[int, int]]:
    out = []
    for h in s.torals:
        c = s.chain.SHO.coordinates_sparse(h.coords())
        if c is not None:
            out.append(c)
    return out


def consequence_checks(s: Session) -> tuple[list[dict], list[dict]]:
    st = s.st
    out, solver = [], []
    torals = _toral_coords(s) if s.algebra is None or st.weights else None
    inner = bider.BiderTensor.inner(st)
    res = bider.consequence_residuals(inner, st, seed=s.seed, torals=torals)
    out.append(check("inner_residuals", res["total"], 1, residuals=_flat(res)))
    for parity in (0, 1):
        sols, rep = s.solve(parity, s.mode)
        solver.append(rep.as_dict(s.timings))
        for idx, phi in enumerate(sols):
            res = bider.consequence_residuals(phi, st, seed=s.seed, torals=torals)
            if s.degenerate:
                # the commuting-pair and toral consequences presuppose simplicity
                res = {k: v for k, v in res.items() if k not in ("commuting", "toral", "total")}
                res["total"] = sum(v["violations"] for v in res.values())
            out.append(check(f"solution_residuals_parity{parity}_{idx}", res["total"], 1, residuals=_flat(res)))
    if st.dim**3 <= 20**3:
        # the right-law system must have the same solutions as the left-law one
        for parity in (0, 1):
            dims = {law: nullspace(bider.assemble(st, parity, law=law), st.dim**3, st.p).rank for law in bider.LAWS}
            out.append(
                check(f"cross_assembly_parity{parity}", int(dims["left"] != dims["right"]), 1, dims=dims)
            )
    return out, solver


def _flat(res: dict) -> dict:
    return {k: v["violations"] for k, v in res.items() if isinstance(v, dict)}


def inner_only_checks(s: Session, modes: tuple[str, ...] = ("dense", "blocked")) -> tuple[list[dict], list[dict], dict]:
    st = s.st
    out, solver = [], []
    results = {}
    for mode in modes:
        for parity in (0, 1):
            sols, rep = s.solve(parity, mode)
            results[mode, parity] = sols
            solver.append(rep.as_dict(s.timings))
    primary = modes[0]
    even, odd = results[primary, 0], results[primary, 1]
    lambdas = [bider.classify_inner(phi, st) for phi in even]
    summary = {
        "even_dim": len(even),
        "odd_dim": len(odd),
        "lambdas": ["not inner" if x is None else x for x in lambdas],
    }
    ok = len(even) == 1 and lambdas[0] is not None and len(odd) == 0
    if s.degenerate:
        out.append(check("all_biderivations_inner", 0, 0, skipped="degenerate parameters (SHO not simple)", diagnostic=summary))
    else:
        out.append(check("all_biderivations_inner", int(not ok), 1, **summary))
    if len(modes) > 1:
        bad = 0
        for parity in (0, 1):
            a = [t.vector() for t in results[modes[0], parity]]
            b = [t.vector() for t in results[modes[1], parity]]
            sa = Subspace.span(a, st.dim**3, st.p)
            sb = Subspace.span(b, st.dim**3, st.p)
            bad += int(not (sa.rank == sb.rank and sa.is_subspace_of(sb) and sb.is_subspace_of(sa)))
        out.append(check("dense_equals_blocked", bad, 2))
    return out, solver, summary


def run(s: Session, suites: tuple[str, ...]) -> dict:
    report: dict = {"suites": {}}
    solver_stats: list[dict] = []
    for name in suites:
        log.info("running suite %s", name)
        if name == "identities":
            checks = identities(s)
        elif name == "chain":
            checks = chain_checks(s)
        elif name == "weights":
            checks, table = weight_checks(s)
            report["weight_table"] = table
        elif name == "lemmas":
            checks, stats = consequence_checks(s)
            solver_stats.extend(stats)
        elif name == "theorem":
            checks, stats, summary = inner_only_checks(s)
            solver_stats.extend(stats)
            report["biderivations"] = summary
        else:
            raise ValueError(f"unknown suite {name!r}")
        report["suites"][name] = {
            "passed": all(c["passed"] for c in checks),
            "violations": sum(c["violations"] for c in checks),
            "checks": checks,
        }
    if solver_stats:
        report["solver"] = _dedupe(solver_stats)
    report["dims"] = s.chain.dims if s.algebra is None else s.algebra.dims
    report["degenerate"] = s.degenerate
    report["violations"] = sum(v["violations"] for v in report["suites"].values())
    return report


def _dedupe(stats: list[dict]) -> list[dict]:
    seen, out = set(), []
    for st in stats:
        key = (st["parity"], st["mode"], st["engine"])
        if key not in seen:
            seen.add(key)
            out.append(st)
    return out
