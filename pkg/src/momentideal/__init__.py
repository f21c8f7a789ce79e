"""Border bases of the recurrence ideal of truncated moment sequences,
quotient-algebra structure, and downstream point/weight decompositions."""

from .fields import FieldSpec, DEFAULT_PRIME
from .polys import MonomialOrder, Polynomial, ScaledMonomial
from .moments import MomentSequence, SupportError, hankel, moments_of_decomposition
from .border import (
    BorderBasisResult,
    MultTables,
    EmptySupport,
    NotCertified,
    border_basis,
    certify,
    minimal_groebner,
    mult_matrices,
    next_monomials,
    normal_form,
    proj,
)
from .decomp import Decomposition, common_roots, decompose, rational_eigen, solve_weights

__all__ = [
    "FieldSpec",
    "DEFAULT_PRIME",
    "MonomialOrder",
    "Polynomial",
    "ScaledMonomial",
    "MomentSequence",
    "SupportError",
    "hankel",
    "moments_of_decomposition",
    "BorderBasisResult",
    "MultTables",
    "EmptySupport",
    "NotCertified",
    "border_basis",
    "certify",
    "minimal_groebner",
    "mult_matrices",
    "next_monomials",
    "normal_form",
    "proj",
    "Decomposition",
    "common_roots",
    "decompose",
    "rational_eigen",
    "solve_weights",
]
