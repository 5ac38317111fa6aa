import pytest
from hypothesis import given, settings, strategies as st

from dfol.errors import ModelError
from dfol.generators import RandomGen, grid_formulas, sample_theory
from dfol.parser import parse_formula, parse_judgement, parse_polctx, parse_term, parse_type
from dfol.search import SearchBounds, enumerate_models
from dfol.semantics import (
    TWO, FinPreorder, Model, check_entailment_semantics, check_model, eval_formula, formula_table,
    interpret_term, interpret_type, is_model, product, reindexed_table,
)
from dfol.surface import load_model, parse_model, parse_theory

import oracle
from helpers import MID, ONE_PRED, SRC, src_morphisms

CHAIN2 = FinPreorder.chain(2)


def test_product_and_opposite():
    p = product(CHAIN2, CHAIN2)
    assert p.size == 4
    assert p.le(0, 3) and not p.le(1, 2) and not p.le(3, 0)
    assert CHAIN2.op().le(1, 0) and not CHAIN2.op().le(0, 1)


def test_from_pairs_does_not_close():
    p = FinPreorder.from_pairs(3, [(0, 1), (1, 2)])
    assert not p.is_valid()
    assert FinPreorder.from_pairs(3, [(0, 1), (1, 2), (0, 2)]).is_valid()


def test_function_space_of_two_chain_has_three_elements(corpus_theory):
    m = Model(corpus_theory, {"A": CHAIN2, "B": CHAIN2})
    fs = interpret_type(m, parse_type("(-> B B)"))
    assert fs.size == 3
    assert fs.is_valid()
    assert interpret_type(m, parse_type("(-> A unit)")).size == 1
    assert interpret_type(m, parse_type("(* A (-> B B))")).size == 6


def test_interpret_lambda_term(corpus_theory):
    m = Model(corpus_theory, {"A": CHAIN2, "B": CHAIN2}, {"f": (1, 1)})
    ctx = (("a", parse_type("A")),)
    assert interpret_term(m, ctx, parse_term("(f a)")).table == (1, 1)
    assert interpret_term(m, ctx, parse_term("(@ (lam x A x) a)")).table == (0, 1)
    assert interpret_term(m, ctx, parse_term("(pi2 (pair a a))")).table == (0, 1)


def test_model_file(corpus_theory, data_dir):
    m = load_model(data_dir / "models" / "chain2.mdl", corpus_theory)
    check_model(corpus_theory, m)
    assert m.preds["P"] == (0, 1)


def test_bad_models(corpus_theory, data_dir):
    with pytest.raises(ModelError) as err:
        check_model(corpus_theory, load_model(data_dir / "models" / "not_transitive.mdl", corpus_theory))
    assert err.value.diag.reason == "not-a-preorder"
    text = "base A 2 : 0<=1\nbase B 2 : 0<=1\nfun f : 1 0\npred P : 0 1\n"
    with pytest.raises(ModelError) as err:
        check_model(corpus_theory, parse_model(text, corpus_theory))
    assert err.value.diag.reason == "not-monotone"
    text = "base A 2 : 0<=1\nbase B 2 : 0<=1\nfun f : 0 1\npred P : 1 0\n"
    assert not is_model(corpus_theory, parse_model(text, corpus_theory))


def test_predicate_contravariant_in_negative_argument():
    th = parse_theory("base A\npred R : A, unit\n")
    m = Model(th, {"A": CHAIN2}, preds={"R": (1, 0)})
    check_model(th, m)
    with pytest.raises(ModelError):
        check_model(th, Model(th, {"A": CHAIN2}, preds={"R": (0, 1)}))


def test_dinatural_reflexivity_is_constant_true(corpus_theory):
    phi = parse_formula("(foralld x : A (le x x : A))")
    for m in enumerate_models(corpus_theory, SearchBounds(max_size=3)):
        assert set(formula_table(m, parse_polctx("[ | | ]"), phi).values()) == {True}


def test_natural_universal_over_chain_is_false(corpus_theory):
    m = Model(corpus_theory, {"A": CHAIN2, "B": CHAIN2}, {"f": (0, 1)}, {"P": (0, 1)})
    assert not eval_formula(m, parse_polctx("[ | | ]"), parse_formula("(forall- x : A (forall+ y : A (le x y : A)))"), {})
    assert eval_formula(m, parse_polctx("[ | | ]"), parse_formula("(exists- x : A (forall+ y : A (le x y : A)))"), {})


def test_off_diagonal_evaluation():
    th = parse_theory("base A\n")
    m = Model(th, {"A": CHAIN2})
    pc = parse_polctx("[ | d : A | ]")
    phi = parse_formula("(le d d : A)")
    assert eval_formula(m, pc, phi, {"d": (0, 1)})
    assert not eval_formula(m, pc, phi, {"d": (1, 0)})


def test_lambda_theory_one_point_model(lambda_theory):
    one = FinPreorder((1,))
    m = Model(lambda_theory, {"T": one}, {"abs": (0,), "app": (0,)})
    check_model(lambda_theory, m)


def test_beta_violation_has_witness():
    th = parse_theory(
        "base T\nfun abs : (-> T T) -> T\nfun app : (* T T) -> T\n"
        "axiom beta [ | s : (-> T T), t : T | ] |- (le (app (pair (abs s) t)) (@ s t) : T)\n")
    disc = FinPreorder.discrete(2)
    m = Model(th, {"T": disc}, {"abs": (0, 0, 0, 0), "app": (0, 0, 0, 0)})
    with pytest.raises(ModelError) as err:
        check_model(th, m)
    assert err.value.diag.reason == "axiom-fails"
    w = err.value.diag.witness
    assert w["s"][w["t"]] == 1


def test_entailment_witness_for_symmetry(corpus_theory):
    m = Model(corpus_theory, {"A": CHAIN2, "B": CHAIN2}, {"f": (0, 1)}, {"P": (0, 1)})
    w = check_entailment_semantics(m, parse_judgement("[ | a : A, b : A | ] (le a b : A) |- (le b a : A)"))
    assert w == {"a": 0, "b": 1}


def test_two_is_a_chain():
    assert TWO.pairs() == [(0, 1)]
    assert TWO.le(0, 0) and TWO.le(1, 1) and not TWO.le(1, 0)


def test_tables_match_direct_evaluator_on_grid():
    for m in enumerate_models(ONE_PRED, SearchBounds(max_size=2)):
        for phi in grid_formulas(ONE_PRED, SRC):
            assert formula_table(m, SRC, phi) == oracle.table(m, SRC, phi)


def test_substitution_lemma_sample():
    """Reindexing then interpreting equals interpreting then precomposing."""
    models = list(enumerate_models(ONE_PRED, SearchBounds(max_size=2)))[::5]
    forms = list(grid_formulas(ONE_PRED, SRC))[::7]
    for m in models:
        for f in src_morphisms():
            for phi in forms:
                assert formula_table(m, MID, f.apply(phi)) == reindexed_table(m, f, phi)


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=100_000), st.integers(min_value=0, max_value=10_000))
def test_random_formulas_match_direct_evaluator(seed, pick):
    th = sample_theory()
    g = RandomGen(th, seed)
    pc = g.polctx(3, 0)
    phi = g.formula(pc, 3)
    models = list(enumerate_models(th, SearchBounds(max_size=2, max_models=30, seed=pick)))
    m = models[pick % len(models)]
    assert formula_table(m, pc, phi) == oracle.table(m, pc, phi)
