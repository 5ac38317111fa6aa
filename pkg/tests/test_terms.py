import pytest
from hypothesis import given, settings, strategies as st

from dfol.errors import TypeCheckError
from dfol.generators import RandomGen, sample_theory
from dfol.parser import parse_term, parse_type
from dfol.syntax import Base, Var
from dfol.terms import decide_term_eq, normalize, subst_term, typecheck_term

TH = sample_theory()
A, B = Base("A"), Base("B")


def ctx(**kw):
    return tuple((k, parse_type(v)) for k, v in kw.items())


def test_typecheck_basic():
    c = ctx(a="A", g="(-> A A)")
    assert typecheck_term(TH, c, parse_term("(f a)")) == B
    assert typecheck_term(TH, c, parse_term("(pair a (@ g a))")) == parse_type("(* A A)")
    assert typecheck_term(TH, c, parse_term("(lam x A (h (pair x a)))")) == parse_type("(-> A A)")


def test_unbound_variable_rejected():
    with pytest.raises(TypeCheckError):
        typecheck_term(TH, ctx(a="A"), parse_term("(f b)"))


def test_ill_typed_application_rejected():
    with pytest.raises(TypeCheckError):
        typecheck_term(TH, ctx(b="B"), parse_term("(f b)"))


def test_beta():
    c = ctx(a="A")
    assert decide_term_eq(TH, c, parse_term("(@ (lam x A (h (pair x x))) a)"), parse_term("(h (pair a a))"), A)


def test_eta():
    c = ctx(g="(-> A A)")
    assert decide_term_eq(TH, c, parse_term("(lam y A (@ g y))"), Var("g"), parse_type("(-> A A)"))


def test_projection_of_pair():
    c = ctx(a="A", b="A")
    assert decide_term_eq(TH, c, parse_term("(pi1 (pair a b))"), Var("a"), A)
    assert not decide_term_eq(TH, c, parse_term("(pi2 (pair a b))"), Var("a"), A)


def test_surjective_pairing_and_unit():
    c = ctx(p="(* A A)", u="unit")
    assert decide_term_eq(TH, c, parse_term("(pair (pi1 p) (pi2 p))"), Var("p"), parse_type("(* A A)"))
    assert decide_term_eq(TH, c, Var("u"), parse_term("!"), parse_type("unit"))


def test_subst_avoids_capture():
    t = parse_term("(lam x A (h (pair x y)))")
    out = subst_term(t, {"y": Var("x")})
    c = ctx(x="A")
    assert decide_term_eq(TH, c, out, parse_term("(lam z A (h (pair z x)))"), parse_type("(-> A A)"))


def test_normalize_is_idempotent():
    c = ctx(a="A")
    t = parse_term("(@ (lam x A (pi1 (pair x a))) a)")
    n = normalize(TH, c, t, A)
    assert n == normalize(TH, c, n, A) == Var("a")


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_random_terms_typecheck_and_normalize(seed):
    g = RandomGen(TH, seed)
    pc = g.polctx(3, 1)
    ty = g.type_(1)
    t = g.term(pc.all(), ty, 3)
    if t is None:
        return
    assert typecheck_term(TH, pc.all(), t) == ty
    n = normalize(TH, pc.all(), t, ty)
    assert typecheck_term(TH, pc.all(), n) == ty
    assert decide_term_eq(TH, pc.all(), t, n, ty)
