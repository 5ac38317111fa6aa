"""A checker and finite-model workbench for directed first-order logic.

The kernel checks derivation trees built from the primitive entailment
rules; tactics elaborate derived rules into such trees; the preorder model
interprets theories in finite preorders so sequents can be model-checked
and countermodels searched for.
"""

from ._accel import BACKEND
from .errors import Diagnostic, DfolError, KernelError, ParseError
from .kernel import Derivation, check_derivation
from .parser import parse_formula, parse_judgement, parse_polctx, parse_term, parse_type
from .printer import show_formula, show_judgement, show_term, show_type
from .syntax import Judgement, PolCtx, Theory

__all__ = [
    "BACKEND", "Diagnostic", "DfolError", "KernelError", "ParseError", "Derivation",
    "check_derivation", "parse_formula", "parse_judgement", "parse_polctx", "parse_term",
    "parse_type", "show_formula", "show_judgement", "show_term", "show_type", "Judgement",
    "PolCtx", "Theory",
]
