"""The special odd Hamiltonian Lie superalgebra SHO(n,n;t) over F_p and its biderivations."""

from __future__ import annotations

from .context import AlgebraContext, Monomial, ParameterError
from .ffield import FieldError, GF
from .lambda_alg import SuperPoly, derive, superpoly_mul
from .witt import VectorField, apply, bracket, divergence
from .cartan import AlgebraChain, build_chain, t_h
from .structure import StructureTensor, structure_constants
from .bider import BiderTensor, InfeasibleError, classify_inner, solve

__all__ = [
    "AlgebraChain",
    "AlgebraContext",
    "BiderTensor",
    "FieldError",
    "GF",
    "InfeasibleError",
    "Monomial",
    "ParameterError",
    "StructureTensor",
    "SuperPoly",
    "VectorField",
    "apply",
    "bracket",
    "build_chain",
    "classify_inner",
    "derive",
    "divergence",
    "solve",
    "structure_constants",
    "superpoly_mul",
    "t_h",
]

__version__ = "0.1.0"
