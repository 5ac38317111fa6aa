import itertools
import time

import pytest
from hypothesis import given, settings, strategies as st

from dfol.errors import BudgetExhausted, KernelError, SizeGuardError
from dfol.kernel import Derivation
from dfol.parser import parse_judgement as J
from dfol.search import (
    SearchBounds, count_models, count_preorders, enumerate_models, enumerate_monotone_maps,
    enumerate_preorders, find_countermodel, relevant_symbols, search_order, soundness_sweep,
)
from dfol.semantics import FinPreorder, is_monotone, is_model
from dfol.surface import parse_theory
from dfol.tactics import run_script


def brute_preorders(n):
    """Filter every relation on n points; independent of the enumerator."""
    cells = [(i, j) for i in range(n) for j in range(n)]
    out = set()
    for bits in itertools.product((False, True), repeat=len(cells)):
        rel = dict(zip(cells, bits))
        if all(rel[i, i] for i in range(n)) and all(
                not (rel[i, j] and rel[j, k]) or rel[i, k] for i in range(n) for j in range(n) for k in range(n)):
            out.add(FinPreorder.from_matrix([[rel[i, j] for j in range(n)] for i in range(n)]).rows)
    return out


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_preorders_match_brute_force(n):
    got = [p.rows for p in enumerate_preorders(n)]
    assert len(got) == len(set(got))
    assert set(got) == brute_preorders(n)


def test_preorder_counts():
    assert [count_preorders(n) for n in range(5)] == [1, 1, 4, 29, 355]


def test_enumeration_cap():
    with pytest.raises(SizeGuardError):
        list(enumerate_preorders(9))


def test_search_order_densest_first():
    ps = search_order(2)
    assert ps[0].rows == (3, 3)
    assert ps[-1].rows == (1, 2)


@pytest.mark.parametrize("dom, cod, count", [
    (FinPreorder.chain(2), FinPreorder.chain(2), 3),
    (FinPreorder.discrete(2), FinPreorder.chain(2), 4),
    (FinPreorder.chain(2), FinPreorder.discrete(2), 2),
    (FinPreorder.chain(3), FinPreorder.chain(2), 4),
])
def test_monotone_map_counts(dom, cod, count):
    maps = list(enumerate_monotone_maps(dom, cod))
    assert len(maps) == count
    brute = [t for t in itertools.product(range(cod.size), repeat=dom.size) if is_monotone(dom, cod, t)]
    assert [m.table for m in maps] == brute


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=3), st.integers(min_value=0, max_value=3), st.data())
def test_monotone_maps_are_exactly_the_monotone_tables(n, k, data):
    ps_n, ps_k = list(enumerate_preorders(n)), list(enumerate_preorders(k))
    a = data.draw(st.sampled_from(ps_n))
    b = data.draw(st.sampled_from(ps_k)) if ps_k else FinPreorder(())
    got = [m.table for m in enumerate_monotone_maps(a, b)]
    assert got == [t for t in itertools.product(range(b.size), repeat=a.size) if is_monotone(a, b, t)]


def test_model_count_of_corpus_theory(corpus_theory):
    # A, B of size 1..2 (1 + 4 choices each); f monotone; P on unit x A
    total = 0
    for pa, pb in itertools.product(search_order(1) + search_order(2), repeat=2):
        f = len(list(enumerate_monotone_maps(pa, pb)))
        p = len(list(enumerate_monotone_maps(pa, FinPreorder.chain(2))))
        total += f * p
    assert count_models(corpus_theory, 2) == total
    assert len(list(enumerate_models(corpus_theory, SearchBounds(max_size=2)))) == total


def test_models_are_valid_and_distinct(corpus_theory):
    seen = set()
    for m in enumerate_models(corpus_theory, SearchBounds(max_size=2)):
        assert is_model(corpus_theory, m)
        key = (tuple(p.rows for p in m.bases.values()), tuple(m.funcs.items()), tuple(m.preds.items()))
        assert key not in seen
        seen.add(key)


def test_sampling_is_seeded(corpus_theory):
    b = SearchBounds(max_size=3, max_models=50, seed=4)
    one = [m.describe() for m in enumerate_models(corpus_theory, b)]
    two = [m.describe() for m in enumerate_models(corpus_theory, b)]
    assert one == two and len(one) == 50


def test_relevance_ignores_unused_symbols(corpus_theory):
    bases, funcs, preds = relevant_symbols(corpus_theory, J("[ | a : A, b : A | ] (le a b : A) |- (le b a : A)"))
    assert bases == {"A"} and funcs == set() and preds == set()


def test_symmetry_countermodel_is_two_chain(corpus_theory):
    j = J("[ | a : A, b : A | ] (le a b : A) |- (le b a : A)")
    c = find_countermodel(corpus_theory, j, SearchBounds(max_size=2))
    assert c.model.bases["A"].rows == FinPreorder.chain(2).rows
    assert c.assignment == {"a": 0, "b": 1}


def test_natural_symmetry_countermodel(corpus_theory):
    c = find_countermodel(corpus_theory, J("[x : A | | y : A] |- (le x y : A)"), SearchBounds(max_size=2))
    assert c.model.bases["A"].rows == FinPreorder.chain(2).rows
    assert c.assignment == {"x": 1, "y": 0}


def test_valid_sequent_has_no_countermodel(corpus_theory):
    j = J("[a : A | b : A | c : A] (le a b : A), (le b c : A) |- (le a c : A)")
    assert find_countermodel(corpus_theory, j, SearchBounds(max_size=3)) is None
    assert find_countermodel(corpus_theory, j, SearchBounds(max_size=0)) is None


def test_countermodel_respects_axioms():
    th = parse_theory("base A\naxiom sym [ | a : A, b : A | ] (le a b : A) |- (le b a : A)\n")
    j = J("[ | a : A, b : A | ] (le a b : A) |- (le b a : A)")
    assert find_countermodel(th, j, SearchBounds(max_size=3)) is None
    j = J("[x : A | | y : A] |- (le x y : A)")
    c = find_countermodel(th, j, SearchBounds(max_size=2))
    assert c.model.bases["A"].rows == FinPreorder.discrete(2).rows


def test_budget_exhaustion(corpus_theory):
    j = J("[a : A, b : B | | c : A] (le a c : A) |- (le a c : A)")
    with pytest.raises(BudgetExhausted) as err:
        find_countermodel(corpus_theory, j, SearchBounds(max_size=4, budget_ms=1))
    assert "models_tried" in err.value.progress


def test_sweep_corpus_is_clean(corpus_theory, corpus_proofs):
    corpus = [run_script(corpus_theory, e.goal, e.steps) for e in corpus_proofs.values()]
    t0 = time.perf_counter()
    report = soundness_sweep(corpus_theory, corpus, SearchBounds(max_size=2))
    assert report.clean
    assert report.models == count_models(corpus_theory, 2)
    assert report.checks == report.models * report.judgements
    assert time.perf_counter() - t0 < 60


def test_sweep_empty_corpus(corpus_theory):
    report = soundness_sweep(corpus_theory, [], SearchBounds(max_size=1))
    assert report.clean and report.judgements == 0 and report.checks == 0


def test_sweep_refuses_rejected_derivations(corpus_theory):
    bad = Derivation("hyp", J("[ | a : A, b : A | ] (le a b : A) |- (le b a : A)"), params={"index": 0})
    with pytest.raises(KernelError):
        soundness_sweep(corpus_theory, [bad], SearchBounds(max_size=2))


def test_sweep_axioms_filter_models():
    th = parse_theory("base A\naxiom sym [ | a : A, b : A | ] (le a b : A) |- (le b a : A)\n")
    d = Derivation("axiom", th.axioms["sym"], params={"name": "sym"})
    report = soundness_sweep(th, [d], SearchBounds(max_size=2))
    assert report.clean
    assert report.models == 3  # the symmetric preorders: one point, two discrete, two indiscrete


def test_sweep_reports_violations(monkeypatch, corpus_theory):
    """If the kernel let a bad node through, the sweep would name it."""
    import dfol.search as search

    monkeypatch.setattr(search, "check_derivation", lambda th, d: None)
    bad = Derivation("hyp", J("[ | a : A, b : A | ] (le a b : A) |- (le b a : A)"), params={"index": 0})
    report = soundness_sweep(corpus_theory, [bad], SearchBounds(max_size=2))
    assert not report.clean
    v = report.violations[0]
    assert v.derivation == 0 and v.path == ()
    assert v.assignment == {"a": 0, "b": 1}
    assert report.to_json()["violations"][0]["path"] == []
