import dataclasses

from hypothesis import given, settings, strategies as st

from dfol.kernel import RULES, Derivation, check_derivation, check_node
from dfol.parser import parse_judgement as J
from dfol.printer import show_formula, show_polctx
from dfol.surface import parse_theory
from dfol.tactics import node, run_script

TH = parse_theory("""
base A B
fun f : A -> B
pred P : unit, A
pred Q : A, A
axiom ax [ | | b : A] |- (pred P ! b)
""")


def ok(d):
    diag = check_derivation(TH, d)
    assert diag is None, str(diag)


def reason(d):
    diag = check_derivation(TH, d)
    assert diag is not None
    return diag.reason


def test_hyp_and_top():
    ok(node("hyp", J("[a : A | | b : A] (le a b : A) |- (le a b : A)"), index=0))
    ok(node("top", J("[ | | ] |- top")))
    assert reason(node("hyp", J("[a : A | | b : A] (le a b : A) |- top"), index=0)) == "conclusion-mismatch"
    assert reason(node("top", J("[ | | b : A] |- (pred P ! b)"))) == "not-top"


def test_axiom_instance_up_to_renaming():
    ok(node("axiom", J("[ | | c : A] |- (pred P ! c)"), name="ax"))
    assert reason(node("axiom", J("[ | c : A | ] |- (pred P ! c)"), name="ax")) == "axiom-mismatch"
    assert reason(node("axiom", J("[ | | ] |- top"), name="nope")) == "unknown-axiom"


def test_and_rules():
    h = "[ | | b : A] (pred P ! b) |- "
    pb = node("hyp", J(h + "(pred P ! b)"), index=0)
    both = node("and-intro", J(h + "(and (pred P ! b) top)"), pb, node("top", J(h + "top")))
    ok(both)
    ok(node("and-elim-left", J(h + "(pred P ! b)"), both))
    assert reason(node("and-elim-right", J(h + "(pred P ! b)"), both)) == "conclusion-mismatch"


def test_struct_duplicates_and_drops():
    d = node("hyp", J("[ | | b : A] (pred P ! b), (pred P ! b) |- (pred P ! b)"), index=1)
    ok(node("struct", J("[ | | b : A] (pred P ! b), top |- (pred P ! b)"), d, sigma=(0, 0)))
    assert reason(node("struct", J("[ | | b : A] top, (pred P ! b) |- (pred P ! b)"), d, sigma=(0, 0))) \
        == "hypotheses-mismatch"


def test_cut():
    left = node("axiom", J("[ | | b : A] |- (pred P ! b)"), name="ax")
    right = node("hyp", J("[ | | b : A] (pred P ! b) |- (pred P ! b)"), index=0)
    ok(node("cut", J("[ | | b : A] |- (pred P ! b)"), left, right, index=0))
    bad = node("hyp", J("[ | | b : A] top |- top"), index=0)
    assert reason(node("cut", J("[ | | b : A] |- top"), left, bad, index=0)) == "cut-formula-mismatch"


def test_le_down_needs_negative_and_positive_sides():
    prem = node("hyp", J("[ | z : A | ] (le z z : A) |- (le z z : A)"), index=0)
    good = J("[a : A | | b : A] (le z z : A) |- (le a b : A)")
    assert reason(node("le-down", good, prem, z="z")) == "ill-formed-judgement"
    refl = node("top", J("[ | z : A | ] |- top"))
    ok(node("le-down", J("[a : A | | b : A] (le a b : A) |- top"), refl, z="z"))
    sym = J("[ | a : A, b : A | ] (le a b : A) |- top")
    assert reason(node("le-down", sym, refl, z="z")) == "naturality"


def test_le_down_rejects_dependent_remaining_hypotheses():
    prem = node("hyp", J("[ | z : A | ] (le z z : A) |- (le z z : A)"), index=0)
    concl = J("[a : A | | b : A] (le a b : A), (le a b : A) |- (le a b : A)")
    assert reason(node("le-down", concl, prem, z="z")) == "naturality"


def test_le_up_inverts_le_down():
    prem = node("hyp", J("[a : A | | b : A] (le a b : A) |- (le a b : A)"), index=0)
    ok(node("le-up", J("[ | z : A | ] |- (le z z : A)"), prem, z="z"))


def test_quantifier_rules_open_and_close():
    body = node("axiom", J("[ | | b : A] |- (pred P ! b)"), name="ax")
    closed = node("forall-down", J("[ | | ] |- (forall+ b : A (pred P ! b))"), body, var="b")
    ok(closed)
    ok(node("forall-up", J("[ | | b : A] |- (pred P ! b)"), closed, var="b"))
    wrong_zone = node("forall-down", J("[ | | ] |- (foralld b : A (pred P ! b))"), body, var="b")
    assert reason(wrong_zone) == "polarity-mismatch"


def test_formulas_compared_up_to_conversion():
    prem = node("hyp", J("[a : A | | b : A] (le a b : A) |- (le a b : A)"), index=0)
    ok(node("struct", J("[a : A | | b : A] (le (@ (lam x A x) a) b : A) |- (le a b : A)"), prem, sigma=(0,)))


def test_unknown_rule_and_arity():
    j = J("[ | | ] |- top")
    assert check_node(TH, Derivation("magic", j)).reason == "unknown-rule"
    assert check_node(TH, Derivation("cut", j)).reason == "arity"


def test_corpus_uses_primitive_rules_only(corpus_theory, corpus_proofs):
    for e in corpus_proofs.values():
        d = run_script(corpus_theory, e.goal, e.steps)
        assert d.rules_used() <= set(RULES)


def test_check_is_local(corpus_theory, corpus_proofs):
    """A node is judged by its own claim and its premises' claims only."""
    e = corpus_proofs["transitivity"]
    d = run_script(corpus_theory, e.goal, e.steps)
    for path, n in d.nodes():
        stub = dataclasses.replace(n, premises=tuple(Derivation("axiom", p.claimed) for p in n.premises))
        assert check_node(corpus_theory, stub, path) is None


def _mutants(d: Derivation):
    """Replace each node's claimed conclusion by an unrelated formula."""
    for path, _ in d.nodes():
        yield path, _replace(d, path)


def _replace(d: Derivation, path):
    if not path:
        bogus = J(_bogus(d))
        return dataclasses.replace(d, claimed=bogus)
    i = path[0]
    ps = list(d.premises)
    ps[i] = _replace(ps[i], path[1:])
    return dataclasses.replace(d, premises=tuple(ps))


def _bogus(d: Derivation) -> str:
    hyps = ", ".join(show_formula(h) for h in d.claimed.hyps)
    return f"{show_polctx(d.claimed.pc)} {hyps} |- (forall+ q : A (forall- r : A (le r q : A)))"


def test_mutated_conclusions_are_rejected(corpus_theory, corpus_proofs):
    for name in ("congruence", "transitivity", "singletons", "pair_of_rewrites", "higher_order"):
        e = corpus_proofs[name]
        d = run_script(corpus_theory, e.goal, e.steps)
        for path, bad in _mutants(d):
            assert check_derivation(corpus_theory, bad) is not None, (name, path)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["congruence", "transport", "transitivity", "singletons", "higher_order"]),
       st.integers(min_value=0, max_value=50))
def test_swapped_premises_are_rejected(corpus_theory, corpus_proofs, name, k):
    e = corpus_proofs[name]
    d = run_script(corpus_theory, e.goal, e.steps)
    nodes = [n for _, n in d.nodes() if n.premises]
    n = nodes[k % len(nodes)]
    other = Derivation("axiom", J("[ | | ] |- top"), params={"name": "nowhere"})
    assert check_node(corpus_theory, dataclasses.replace(n, premises=(other,) * len(n.premises))) is not None


