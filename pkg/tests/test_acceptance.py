"""The ten acceptance criteria, one test each.

Each test records a PASS/FAIL line with its timing; the lines are printed
in the terminal summary (see conftest.py) and when run as a script.
"""

from __future__ import annotations

import contextlib
import io
import itertools
import json
import random
import time
import zlib

from dfol.cli import main as cli_main
from dfol.formulas import formula_eq, subst_formula, wf_judgement
from dfol.generators import RandomGen, derived_instance, grid_formulas, sample_theory
from dfol.kernel import check_derivation
from dfol.parser import parse_judgement
from dfol.printer import show_judgement
from dfol.search import SearchBounds, enumerate_models, enumerate_monotone_maps, enumerate_preorders, soundness_sweep
from dfol.semantics import TWO, FinPreorder, Model, check_entailment_semantics, formula_table, product, reindexed_table
from dfol.surface import load_proofs, load_theory
from dfol.syntax import Base, Exists, Forall, Judgement, Le, Pol, PolCtx, Theory, Var
from dfol.tactics import DERIVED_RULES, elaborate, run_script

from conftest import DATA
from helpers import MID, ONE_PRED, SRC, TGT, mid_morphisms, src_morphisms
from test_search import brute_preorders

RESULTS: list[str] = []
THY = str(DATA / "theories" / "corpus.thy")


@contextlib.contextmanager
def criterion(n: int, title: str, limit: float | None = None):
    t0 = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        secs = time.perf_counter() - t0
        if ok and limit is not None and secs >= limit:
            ok = False
            title += f" (over the {limit:g}s limit)"
        RESULTS.append(f"{'PASS' if ok else 'FAIL'} {n:2d} {title} [{secs:.2f}s]")
        print(RESULTS[-1])
    if limit is not None:
        assert secs < limit, f"took {secs:.2f}s"


def cli_json(*argv: str) -> tuple[int, dict]:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli_main([*argv, "--json"])
    return code, json.loads(buf.getvalue())


# shared semantic sample for the two adjunction criteria
A = Base("A")
ADJ_THEORY = Theory("one", ("A",), {}, {}, {"P": (A, A)})
ADJ_BASE = PolCtx((("t", A),), (("d", A),), (("g", A),))


def adjunction_models() -> list[Model]:
    """Every preorder of size 1..3, each with up to three sampled predicate tables."""
    rng = random.Random(0)
    out = []
    for n in (1, 2, 3):
        for p in enumerate_preorders(n):
            tables = [m.table for m in enumerate_monotone_maps(product(p.op(), p), TWO)]
            for tab in rng.sample(tables, min(3, len(tables))):
                out.append(Model(ADJ_THEORY, {"A": p}, {}, {"P": tab}))
    return out


def holds(m: Model, pc: PolCtx, hyps, concl) -> bool:
    return check_entailment_semantics(m, Judgement(pc, tuple(hyps), concl)) is None


def test_01_corpus_checks():
    with criterion(1, "corpus derivations check with exit 0", 1.0):
        code, rec = cli_json("check", THY, str(DATA / "proofs" / "corpus.prf"))
        assert code == 0
        assert {p["name"] for p in rec["proofs"] if p["status"] == "accepted"} == {
            "congruence", "transport", "transitivity", "singletons", "pair_of_rewrites", "higher_order"}


def test_02_derived_rules_elaborate():
    th = sample_theory()
    with criterion(2, f"{len(DERIVED_RULES)} derived rules x 50 random instances kernel-accepted", 10.0):
        for rule in DERIVED_RULES:
            g = RandomGen(th, zlib.crc32(rule.encode()))
            for _ in range(50):
                goal, args = derived_instance(g, rule)
                wf_judgement(th, goal)
                d, local = elaborate(th, rule, goal, *args)
                assert check_derivation(local, d) is None, rule
                assert d.claimed == goal


def test_03_symmetry_not_derivable():
    with criterion(3, "symmetry rejected at le-down (naturality); 2-chain countermodel a=0 b=1", 1.0):
        code, rec = cli_json("check", THY, str(DATA / "proofs" / "symmetry.prf"))
        assert code == 1
        (diag,) = rec["diagnostics"]
        assert (diag["rule"], diag["reason"]) == ("le-down", "naturality")
        code, rec = cli_json("countermodel", THY, "[ | a : A, b : A | ] (le a b : A) |- (le b a : A)",
                             "--max-size", "2")
        assert code == 0
        assert rec["model"]["bases"]["A"] == {"size": 2, "le": [[0, 1]]}
        assert rec["witness"] == {"a": 0, "b": 1}


def test_04_soundness_sweep():
    with criterion(4, "soundness sweep over models of size <= 2 has no violations", 60.0):
        for thy, prf in (("corpus.thy", "corpus.prf"), ("lambda.thy", "lambda.prf")):
            th = load_theory(DATA / "theories" / thy)
            corpus = [run_script(th, e.goal, e.steps) for e in load_proofs(DATA / "proofs" / prf)]
            report = soundness_sweep(th, corpus, SearchBounds(max_size=2, max_models=10_000, seed=0))
            assert report.models > 0 and report.judgements > 0
            assert report.clean, report.violations[:1]


def test_05_relative_adjunction():
    models = adjunction_models()
    up = ADJ_BASE.extend(Pol.NEG, "a", A).extend(Pol.POS, "b", A)
    down = ADJ_BASE.extend(Pol.DIN, "z", A)
    g = RandomGen(ADJ_THEORY, 7)
    pairs = [(g.formula(ADJ_BASE, 2), g.formula(up, 2)) for _ in range(200)]
    contract = {"neg": {"a": Var("z")}, "pos": {"b": Var("z")}}
    with criterion(5, f"equality adjunction on {len(pairs)} pairs x {len(models)} models (sizes <= 3)", 30.0):
        assert len({p.bases["A"].rows for p in models}) == 34
        for big_phi, phi in pairs:
            for m in models:
                lhs = holds(m, up, (Le(Var("a"), Var("b"), A), big_phi), phi)
                rhs = holds(m, down, (big_phi,), subst_formula(phi, **contract))
                assert lhs == rhs


def test_06_quantifier_adjunctions():
    models = adjunction_models()
    with criterion(6, "exists -| weakening -| forall for all three polarities", 30.0):
        for pol in (Pol.NEG, Pol.DIN, Pol.POS):
            ext = ADJ_BASE.extend(pol, "x", A)
            g = RandomGen(ADJ_THEORY, 11 + len(pol.value))
            pairs = [(g.formula(ext, 2), g.formula(ADJ_BASE, 2)) for _ in range(200)]
            for psi, phi in pairs:
                ex, fa = Exists(pol, "x", A, psi), Forall(pol, "x", A, psi)
                for m in models:
                    assert holds(m, ADJ_BASE, (ex,), phi) == holds(m, ext, (psi,), phi)
                    assert holds(m, ADJ_BASE, (phi,), fa) == holds(m, ext, (phi,), psi)


def test_07_enumeration_oracles():
    with criterion(7, "preorder counts 1, 4, 29 and 3 monotone maps on the 2-chain"):
        counts = []
        for n in (1, 2, 3):
            got = {p.rows for p in enumerate_preorders(n)}
            assert got == brute_preorders(n)
            counts.append(len(got))
        assert counts == [1, 4, 29]
        chain = FinPreorder.chain(2)
        assert len(list(enumerate_monotone_maps(chain, chain))) == 3


def test_08_no_dinatural_variance():
    small = [p for n in (1, 2) for p in enumerate_preorders(n)]
    with criterion(8, "objects over [T x D | 1 | G x D] and [T | D | G] coincide (sizes <= 2)"):
        for th, de, ga in itertools.product(small, repeat=3):
            # natural side: (T x D)^op x (G x D), points ((t, d1), (g, d2))
            natural = product(product(th, de).op(), product(ga, de))
            # dinatural side: T^op x (D^op x D) x G, points (t, d1, d2, g)
            dinat = product(product(product(th.op(), de.op()), de), ga)

            def rekey(table):
                out = {}
                for (t, d1), (g, d2) in itertools.product(
                        itertools.product(range(th.size), range(de.size)),
                        itertools.product(range(ga.size), range(de.size))):
                    i = (t * de.size + d1) * (ga.size * de.size) + g * de.size + d2
                    j = ((t * de.size + d1) * de.size + d2) * ga.size + g
                    out[j] = table[i]
                return tuple(out[k] for k in range(len(table)))

            left = {rekey(m.table) for m in enumerate_monotone_maps(natural, TWO)}
            right = {m.table for m in enumerate_monotone_maps(dinat, TWO)}
            assert left == right


def test_09_substitution_lemma():
    models = list(enumerate_models(ONE_PRED, SearchBounds(max_size=2)))
    forms = list(grid_formulas(ONE_PRED, SRC))
    morphs = src_morphisms()
    with criterion(9, f"substitution lemma on {len(forms)} formulas x {len(morphs)} reindexings "
                      f"x {len(models)} models", 60.0):
        for m in models:
            for f in morphs:
                for phi in forms:
                    assert formula_table(m, MID, f.apply(phi)) == reindexed_table(m, f, phi)


def test_10_round_trips():
    th = sample_theory()
    with criterion(10, "parse/print round trip on 1000 ASTs; composite reindexing law on the grid"):
        for seed in range(1000):
            g = RandomGen(th, seed)
            j = g.judgement(g.polctx(3, 1))
            assert parse_judgement(show_judgement(j)) == j
        forms = list(grid_formulas(ONE_PRED, SRC))
        for f, g in itertools.product(src_morphisms(), mid_morphisms()):
            fg = f.then(g)
            for phi in forms:
                assert formula_eq(ONE_PRED, TGT, fg.apply(phi), g.apply(f.apply(phi)))


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                pass
