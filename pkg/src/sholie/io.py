"""Algebra and report files: canonical JSON, UTF-8, integers only.

Algebra file (``format_version`` 1)::

    {
      "format_version": 1,
      "n": 3, "p": 3, "t": [1, 1, 1],
      "monomial_key": "u + 2**n * sum_i alpha_i * prod_{j<i} p**t_j",
      "dims": {"W": ..., "HO": ..., "Sprime": ..., "SHOprime": ..., "SHObar": ..., "SHO": ...},
      "degenerate": false,
      "simplicity": {...},
      "basis": [[[monomial_key, direction, coeff], ...], ...],
      "parities": [...], "zdegrees": [...], "weights": [[...], ...],
      "structure_constants": [[a, b, k, c], ...]
    }

``u`` is the odd-variable bit mask (bit k <-> x_{n+1+k}); directions are
1-based (1..n even, n+1..2n odd); coefficients are residues in [0, p).
Basis vectors are listed in SHO echelon order and their terms in
W-coordinate order.  Keys are sorted and separators fixed, so identical
inputs give byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Union

from .cartan import AlgebraChain
from .context import AlgebraContext
from .structure import StructureTensor
from .witt import VectorField

FORMAT_VERSION = 1
KEY_DOC = "u + 2**n * sum_i alpha_i * prod_{j<i} p**t_j"


class FormatError(ValueError):
    pass


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def write_json(path: Union[str, Path], obj: Any) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def _vf_terms(ctx: AlgebraContext, vf: VectorField) -> list[list[int]]:
    items = sorted(vf.terms.items(), key=lambda kv: ctx.w_coord(*kv[0]))
    return [[k, j, c] for (k, j), c in items]


def algebra_document(chain: AlgebraChain, st: StructureTensor, simplicity: Optional[dict] = None) -> dict:
    ctx = chain.ctx
    return {
        "format_version": FORMAT_VERSION,
        "n": ctx.n,
        "p": ctx.p,
        "t": list(ctx.t),
        "monomial_key": KEY_DOC,
        "dims": chain.dims,
        "degenerate": chain.degenerate or (simplicity is not None and not simplicity["simple"]),
        "simplicity": simplicity,
        "basis": [_vf_terms(ctx, v) for v in chain.basis_vf],
        "parities": list(st.parities),
        "zdegrees": list(st.degrees or []),
        "weights": [list(w) for w in (st.weights or [])],
        "structure_constants": [[a, b, k, c] for (a, b, k), c in sorted(st.entries.items())],
    }


def save_algebra(path: Union[str, Path], chain: AlgebraChain, st: StructureTensor, simplicity: Optional[dict] = None) -> dict:
    doc = algebra_document(chain, st, simplicity)
    write_json(path, doc)
    return doc


@dataclass
class AlgebraFile:
    ctx: AlgebraContext
    dims: dict
    degenerate: bool
    simplicity: Optional[dict]
    basis_vf: list[VectorField]
    st: StructureTensor
    raw: dict


def parse_algebra(doc: dict) -> AlgebraFile:
    if doc.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {doc.get('format_version')!r}")
    try:
        ctx = AlgebraContext(int(doc["n"]), int(doc["p"]), tuple(doc["t"]))
        basis = [VectorField(ctx, {(k, j): c for k, j, c in terms}) for terms in doc["basis"]]
        d = len(basis)
        st = StructureTensor.from_entries(
            d,
            ctx.p,
            doc["parities"],
            {(a, b, k): c for a, b, k, c in doc["structure_constants"]},
            weights=[tuple(w) for w in doc["weights"]] if doc.get("weights") else None,
            degrees=list(doc["zdegrees"]) if doc.get("zdegrees") else None,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed algebra file: {exc}") from exc
    return AlgebraFile(ctx, doc["dims"], bool(doc.get("degenerate")), doc.get("simplicity"), basis, st, doc)


def load_algebra(path: Union[str, Path]) -> AlgebraFile:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from exc
    return parse_algebra(doc)
