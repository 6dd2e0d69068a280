"""Projective Leavitt complexes of quivers without sources: construction and exact checks.

Modules:
    quiver      quivers, paths, associated pairs, the index sets Lambda^l_i
    lpa         the Leavitt path algebra L_k(Q^op) in normal form
    complex     windowed complexes P, K, C, C_n, M and their certificates
    bimodule    the right L_k(Q^op)-action on P
    homology    End_A(P)^opp, the map rho and the cocycle normalization
    linalg      exact scalars and sparse linear algebra
"""
from .linalg import QQ_FIELD, Field, field_from_string
from .quiver import (Arrow, Path, Quiver, QuiverError, QuiverValidationError, enumerate_lambda,
                     enumerate_paths, is_associated_pair, opposite, parse_quiver, random_quiver,
                     t_set, truncations, validate)
from .lpa import LeavittAlgebra, LpaElement, NormalTerm
from .complex import BasisVector, ComplexWindow, build_window, differential
from .bimodule import Bimodule

__all__ = [
    "QQ_FIELD", "Field", "field_from_string",
    "Arrow", "Path", "Quiver", "QuiverError", "QuiverValidationError", "enumerate_lambda",
    "enumerate_paths", "is_associated_pair", "opposite", "parse_quiver", "random_quiver",
    "t_set", "truncations", "validate",
    "LeavittAlgebra", "LpaElement", "NormalTerm",
    "BasisVector", "ComplexWindow", "build_window", "differential",
    "Bimodule",
]
