import pytest
from hypothesis import given, settings, strategies as st

from dfol.errors import ParseError
from dfol.generators import RandomGen, sample_theory
from dfol.parser import parse_formula, parse_judgement, parse_polctx, parse_term, parse_type
from dfol.printer import show_formula, show_judgement, show_judgement_unicode, show_polctx, show_term, show_type
from dfol.syntax import (
    And, App, Arrow, Base, Exists, FnApp, Lam, Le, Pair, Pol, PolCtx, Prod, TOP, UNIT, Var, conj,
    formula_depth,
)

A, B = Base("A"), Base("B")


def test_le_formula_parses():
    phi = parse_formula("(le a b : A)")
    assert phi == Le(Var("a"), Var("b"), A)


def test_types_and_terms():
    assert parse_type("(-> (* A B) unit)") == Arrow(Prod(A, B), UNIT)
    t = parse_term("(@ (lam x A (f x)) (pair a !))")
    assert isinstance(t, App) and isinstance(t.fun, Lam)
    assert t.fun.body == FnApp("f", Var("x"))
    assert show_term(t) == "(@ (lam x A (f x)) (pair a !))"


def test_polctx_with_empty_zones():
    pc = parse_polctx("[ | a : A, b : A | ]")
    assert pc == PolCtx((), (("a", A), ("b", A)), ())
    assert parse_polctx(show_polctx(pc)) == pc


def test_quantifier_keywords():
    phi = parse_formula("(existsd x : A (forall- y : B top))")
    assert isinstance(phi, Exists) and phi.pol is Pol.DIN
    assert phi.body.pol is Pol.NEG


def test_malformed_zone_separator_has_position():
    with pytest.raises(ParseError) as err:
        parse_judgement("[a : A | b : A ; c : A] |- top")
    assert err.value.line == 1
    assert err.value.column > 1


def test_error_reports_expected_token():
    with pytest.raises(ParseError) as err:
        parse_formula("(le a b A)")
    assert "':'" in err.value.expected


def test_reserved_words_are_not_variables():
    with pytest.raises(ParseError):
        parse_term("pair")


def test_conj_nests_right():
    p, q, r = (parse_formula(f"(le {x} {x} : A)") for x in "pqr")
    assert conj([]) == TOP
    assert conj([p, q, r]) == And(p, And(q, r))
    assert formula_depth(conj([p, q, r])) == 3


def test_unicode_mode_overlines_negative_dinatural_occurrences():
    j = parse_judgement("[ | a : A, b : A | ] (le a b : A) |- (le b a : A)")
    text = show_judgement_unicode(j)
    assert "a̅ ≤ b" in text and "b̅ ≤ a" in text
    assert text.startswith("[· | a:A, b:A | ·]")


def test_pair_printing():
    assert show_term(Pair(Var("x"), Var("y"))) == "(pair x y)"
    assert show_type(Prod(A, Arrow(A, B))) == "(* A (-> A B))"


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_random_judgements_round_trip(seed):
    g = RandomGen(sample_theory(), seed)
    j = g.judgement(g.polctx(3, 1))
    text = show_judgement(j)
    assert parse_judgement(text) == j
    assert show_judgement(parse_judgement(text)) == text


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_random_formulas_round_trip(seed):
    g = RandomGen(sample_theory(), seed)
    pc = g.polctx(4, 1)
    phi = g.formula(pc, 3)
    assert parse_formula(show_formula(phi)) == phi
