"""Command-line interface: ``sholie {build,verify,bider,weights,dump-sc}``.

Exit codes: 0 success, 1 a check found a violation, 2 usage or input error,
3 the requested solve is too large for the chosen engine.

Monomials are rendered as space-separated factors: ``x<i>^(<a>)`` for an
even variable with divided-power exponent a >= 1 (1 <= i <= n), then ``x<j>``
for each odd variable present (n+1 <= j <= 2n) in increasing order; the
constant monomial is ``1``.  Vector fields are ``c * <monomial> * D<j>``
summands joined by `` + ``, with c a signed residue in (-p/2, p/2].

Reports are canonical JSON.  Timings are left out unless ``--timings`` is
given, so the same configuration always yields byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import bider, suites
from .bider import InfeasibleError
from .cartan import build_chain
from .context import AlgebraContext, ParameterError
from .ffield import FieldError
from .io import FormatError, dumps, load_algebra, save_algebra
from .structure import simplicity_check, structure_constants

log = logging.getLogger("sholie")

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2, 3
PARITIES = {"even": (0,), "odd": (1,), "both": (0, 1), "0": (0,), "1": (1,)}


class UsageError(Exception):
    pass


def parse_t(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"--t expects comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="number of even (and of odd) variables, n >= 2")
    common.add_argument("--p", type=int, help="odd prime characteristic")
    common.add_argument("--t", type=parse_t, help="comma-separated heights t_1,...,t_n (default all 1)")
    common.add_argument("--algebra", type=Path, help="algebra file written by `build` (instead of --n/--p/--t)")
    common.add_argument("--out", type=Path, help="output file")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks (default 0)")
    common.add_argument("--threads", type=int, default=1, help="worker cap (computation is single-threaded)")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings in reports")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="sholie", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("build", parents=[common], help="construct SHO and write an algebra file")

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("--suite", default="all", choices=suites.SUITES + ("all",))
    v.add_argument("--mode", default="dense", choices=bider.MODES)

    b = sub.add_parser("bider", parents=[common], help="solve for super-biderivations")
    b.add_argument("--parity", default="both", choices=sorted(PARITIES))
    b.add_argument("--mode", default="dense", choices=bider.MODES)
    b.add_argument("--engine", default="factored", choices=bider.ENGINES)

    sub.add_parser("weights", parents=[common], help="toral weight table of HO and SHO")
    sub.add_parser("dump-sc", parents=[common], help="print structure constants as `a b k c` lines")
    return parser


def _config(args: argparse.Namespace) -> dict:
    cfg = {"command": args.command, "seed": args.seed}
    for key in ("suite", "mode", "engine", "parity"):
        if hasattr(args, key):
            cfg[key] = getattr(args, key)
    return cfg


def _context(args: argparse.Namespace) -> AlgebraContext:
    if args.n is None or args.p is None:
        raise UsageError("either --algebra or both --n and --p are required")
    return AlgebraContext.create(args.n, args.p, args.t)


def _session(args: argparse.Namespace) -> suites.Session:
    mode = getattr(args, "mode", "dense")
    if args.algebra is not None:
        alg = load_algebra(args.algebra)
        if args.n is not None or args.p is not None:
            given = AlgebraContext.create(args.n or alg.ctx.n, args.p or alg.ctx.p, args.t)
            if given != alg.ctx:
                raise UsageError(f"--n/--p/--t disagree with {args.algebra} ({alg.ctx.label})")
        return suites.Session(alg.ctx, args.seed, mode, alg, timings=args.timings)
    return suites.Session(_context(args), args.seed, mode, timings=args.timings)


def _emit(args: argparse.Namespace, doc: dict) -> None:
    text = dumps(doc)
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _header(s: suites.Session, args: argparse.Namespace) -> dict:
    ctx = s.ctx
    return {"config": {"n": ctx.n, "p": ctx.p, "t": list(ctx.t), **_config(args)}}


def cmd_build(args: argparse.Namespace) -> int:
    ctx = _context(args)
    chain = build_chain(ctx)
    st = structure_constants(chain)
    simp = simplicity_check(st)
    out = args.out or Path(f"sho_n{ctx.n}_p{ctx.p}_t{'-'.join(map(str, ctx.t))}.json")
    doc = save_algebra(out, chain, st, simp)
    print(f"{ctx.label}: wrote {out}")
    for name, d in chain.dims.items():
        print(f"  dim {name} = {d}")
    print(f"  degree components: {_component_dims(chain.zdegrees())}")
    if doc["degenerate"]:
        print(
            f"  degenerate: SHO is not simple (center dim {simp['center_dim']}, "
            f"{len(simp['non_generating_basis_vectors'])} basis vectors generate proper ideals)"
        )
    return EXIT_OK


def _component_dims(degs: Sequence[int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for d in degs:
        out[d] = out.get(d, 0) + 1
    return dict(sorted(out.items()))


def cmd_verify(args: argparse.Namespace) -> int:
    s = _session(args)
    names = suites.SUITES if args.suite == "all" else (args.suite,)
    report = _header(s, args)
    report.update(suites.run(s, names))
    _emit(args, report)
    for name, res in report["suites"].items():
        log.info("%s: %s (%d violations)", name, "pass" if res["passed"] else "FAIL", res["violations"])
    return EXIT_OK if report["violations"] == 0 else EXIT_VIOLATION


def cmd_bider(args: argparse.Namespace) -> int:
    s = _session(args)
    st = s.st
    report = _header(s, args)
    report["dim"] = st.dim
    report["degenerate"] = s.degenerate
    results = []
    bad = 0
    for parity in PARITIES[args.parity]:
        sols, rep = bider.solve(st, parity, args.mode, args.engine)
        entry = rep.as_dict(timings=args.timings)
        entry["solutions"] = [
            {"inner_lambda": "not inner" if lam is None else lam, "nonzero_entries": len(phi.entries)}
            for phi, lam in zip(sols, rep.lambdas)
        ]
        if args.mode == "blocked":
            entry["verified against full stream"] = rep.verified_full_stream
        bad += int(not rep.verified_full_stream)
        results.append(entry)
    report["results"] = results
    _emit(args, report)
    return EXIT_OK if bad == 0 else EXIT_VIOLATION


def cmd_weights(args: argparse.Namespace) -> int:
    s = _session(args)
    checks, table = suites.weight_checks(s)
    report = _header(s, args)
    report["weight_table"] = table
    report["checks"] = checks
    _emit(args, report)
    return EXIT_OK if all(c["passed"] for c in checks) else EXIT_VIOLATION


def cmd_dump_sc(args: argparse.Namespace) -> int:
    s = _session(args)
    st = s.st
    lines = [f"# {s.ctx.label} dim {st.dim}: [e_a, e_b] = sum_k c e_k, listed as a b k c"]
    lines += [f"{a} {b} {k} {c}" for (a, b, k), c in sorted(st.entries.items())]
    text = "\n".join(lines) + "\n"
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    "build": cmd_build,
    "verify": cmd_verify,
    "bider": cmd_bider,
    "weights": cmd_weights,
    "dump-sc": cmd_dump_sc,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except InfeasibleError as exc:
        print(f"error: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ParameterError, FieldError, UsageError, FormatError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: missing input: {exc.filename}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
