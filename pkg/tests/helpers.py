"""Shared fixtures for the semantic and substitution checks."""

from __future__ import annotations

import itertools

from dfol.formulas import Morphism
from dfol.parser import parse_term
from dfol.syntax import Base, PolCtx, Prod, Theory, Var

A = Base("A")
ONE_PRED = Theory("one", ("A",), {}, {}, {"P": (A, A)})
SRC = PolCtx((("a", A),), (("d", A),), (("b", A),))
MID = PolCtx((("p", Prod(A, A)),), (("x", A),), (("q", A),))
TGT = PolCtx((("u", A),), (("y", A),), (("w", A),))


def src_morphisms() -> list[Morphism]:
    """Reindexings SRC -> MID covering projections, zone crossing and identity."""
    etas = [parse_term(s) for s in ("(pi1 p)", "(pi2 p)", "x")]
    rhos = [parse_term(s) for s in ("q", "x")]
    return [Morphism(SRC, MID, {"a": e}, {"d": Var("x")}, {"b": r}) for e, r in itertools.product(etas, rhos)]


def mid_morphisms() -> list[Morphism]:
    """Reindexings MID -> TGT."""
    ps = [parse_term(s) for s in ("(pair u y)", "(pair y u)")]
    qs = [parse_term(s) for s in ("w", "y")]
    return [Morphism(MID, TGT, {"p": p}, {"x": Var("y")}, {"q": q}) for p, q in itertools.product(ps, qs)]
