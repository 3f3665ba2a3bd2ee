"""Proof kernel, translator and finite model checker for a nonclassical
theory of sets and functions and for set matrix theory."""

from .syntax import (
    LanguageId, Sort, alpha_equivalent, free_variables, substitute, unfold, well_formed,
)
from .parser import ParseError, parse_formula, pretty_print

__all__ = [
    "LanguageId", "Sort", "alpha_equivalent", "free_variables", "substitute", "unfold",
    "well_formed", "ParseError", "parse_formula", "pretty_print",
]
__version__ = "0.1.0"
