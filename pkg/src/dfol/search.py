"""Enumeration of finite preorders and models; countermodel search and soundness sweeps."""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Sequence

from . import _accel
from .errors import BudgetExhausted, DfolError, KernelError, SizeGuardError
from .formulas import wf_judgement
from .kernel import Derivation, check_derivation
from .printer import show_judgement
from .semantics import (
    TWO, FinPreorder, Model, MonotoneMap, check_entailment_semantics, check_model, product,
)
from .syntax import (
    Exists, FnApp, Forall, Judgement, Lam, Le, Pred, Theory, iter_formula_terms, iter_subformulas,
    iter_subterms, type_bases,
)

MAX_ENUM_SIZE = 8


@dataclass(frozen=True)
class SearchBounds:
    max_size: int = 2
    max_models: int = 10_000
    budget_ms: int = 60_000
    seed: int = 0

    def __post_init__(self):
        if self.max_size < 0 or self.max_models <= 0 or self.budget_ms <= 0:
            raise ValueError("search bounds must be positive")


def enumerate_preorders(n: int) -> Iterator[FinPreorder]:
    """Every preorder on n labelled points, exactly once, in a fixed order."""
    if n < 0:
        raise ValueError("size must be non-negative")
    if n > MAX_ENUM_SIZE:
        raise SizeGuardError(f"preorder enumeration is capped at {MAX_ENUM_SIZE} points")
    for rows in _accel.enumerate_preorders(n):
        yield FinPreorder(tuple(rows))


def count_preorders(n: int) -> int:
    return sum(1 for _ in _accel.enumerate_preorders(n))


def enumerate_monotone_maps(a: FinPreorder, b: FinPreorder) -> Iterator[MonotoneMap]:
    for table in _accel.monotone_maps(a.rows, b.rows, -1):
        yield MonotoneMap(a, b, tuple(table))


def search_order(n: int) -> list[FinPreorder]:
    """Preorders on n points, densest first.

    Denser relations satisfy more directed-equality hypotheses, so failing
    sequents tend to show up early; ties keep enumeration order.
    """
    ps = list(enumerate_preorders(n))
    return sorted(ps, key=lambda p: -sum(bin(r).count("1") for r in p.rows))


# ---------------------------------------------------------------- models


def relevant_symbols(theory: Theory, j: Judgement) -> tuple[set[str], set[str], set[str]]:
    """Bases, functions and predicates a judgement's truth can depend on.

    With equations or axioms present every symbol counts, since they
    constrain which assignments are models.
    """
    if theory.eqs or theory.axioms:
        return set(theory.bases), set(theory.funcs), set(theory.preds)
    funcs: set[str] = set()
    preds: set[str] = set()
    bases: set[str] = set()
    for _, ty in j.pc.all():
        bases |= type_bases(ty)
    for phi in j.hyps + (j.concl,):
        for sub in iter_subformulas(phi):
            if isinstance(sub, Pred):
                preds.add(sub.name)
            elif isinstance(sub, Le):
                bases |= type_bases(sub.ty)
            elif isinstance(sub, (Exists, Forall)):
                bases |= type_bases(sub.ty)
        for t in iter_formula_terms(phi):
            for u in iter_subterms(t):
                if isinstance(u, FnApp):
                    funcs.add(u.fn)
                elif isinstance(u, Lam):
                    bases |= type_bases(u.ty)
    for f in funcs:
        dom, cod = theory.funcs[f]
        bases |= type_bases(dom) | type_bases(cod)
    for p in preds:
        neg, pos = theory.preds[p]
        bases |= type_bases(neg) | type_bases(pos)
    return bases, funcs, preds


@dataclass
class _Block:
    """All models sharing one base assignment: a mixed-radix table space."""

    bases: dict[str, FinPreorder]
    names: list[tuple[str, str]]          # ("fun" | "pred", symbol)
    options: list[list[tuple[int, ...]]]

    @property
    def count(self) -> int:
        return math.prod(len(o) for o in self.options)

    def model(self, theory: Theory, k: int) -> Model:
        funcs, preds = {}, {}
        for (kind, name), opts in zip(reversed(self.names), reversed(self.options)):
            k, r = divmod(k, len(opts))
            (funcs if kind == "fun" else preds)[name] = opts[r]
        return Model(theory, self.bases, funcs, preds)


def _blocks(theory: Theory, max_size: int, bases_rel: set[str], funcs_rel: set[str],
            preds_rel: set[str]) -> Iterator[_Block]:
    names = list(theory.bases)
    free = [b for b in names if b in bases_rel]
    per_size = {n: search_order(n) for n in range(1, max_size + 1)}
    one = FinPreorder((1,))
    # base assignments ordered by largest size, then size vector, then density
    vectors = sorted(itertools.product(range(1, max_size + 1), repeat=len(free)),
                     key=lambda v: (max(v, default=0), v))
    for sizes in vectors:
        for combo in itertools.product(*(per_size[s] for s in sizes)):
            bases = {b: one for b in names}
            bases.update(zip(free, combo))
            probe = Model(theory, bases)
            syms: list[tuple[str, str]] = []
            opts: list[list[tuple[int, ...]]] = []
            for f, (dom, cod) in theory.funcs.items():
                maps = _accel.monotone_maps(probe.carrier(dom).order.rows, probe.carrier(cod).order.rows, -1)
                syms.append(("fun", f))
                opts.append([tuple(m) for m in maps] if f in funcs_rel else [tuple(maps[0])])
            for p, (neg, pos) in theory.preds.items():
                dom = product(probe.carrier(neg).order.op(), probe.carrier(pos).order)
                maps = _accel.monotone_maps(dom.rows, TWO.rows, -1)
                syms.append(("pred", p))
                opts.append([tuple(m) for m in maps] if p in preds_rel else [tuple(maps[0])])
            yield _Block(bases, syms, opts)


def enumerate_models(theory: Theory, bounds: SearchBounds, relevant: tuple | None = None,
                     validate: bool = True) -> Iterator[Model]:
    """Models with every base of size 1..max_size, in a deterministic order.

    When the candidate space exceeds ``bounds.max_models`` a seeded uniform
    sample of that many candidates is drawn instead (still in order).
    Candidates failing ``check_model`` are skipped when ``validate`` is set.
    """
    if bounds.max_size < 1:
        return
    rel = relevant or (set(theory.bases), set(theory.funcs), set(theory.preds))
    blocks = list(_blocks(theory, bounds.max_size, *rel))
    total = sum(b.count for b in blocks)
    if total <= bounds.max_models:
        picks = None
    else:
        rng = random.Random(bounds.seed)
        picks = sorted(rng.sample(range(total), bounds.max_models))
    skip = _ModelFilter(theory) if validate else None
    offset = 0
    pi = 0
    for blk in blocks:
        n = blk.count
        if picks is None:
            idx: Iterable[int] = range(n)
        else:
            start = pi
            while pi < len(picks) and picks[pi] < offset + n:
                pi += 1
            idx = [k - offset for k in picks[start:pi]]
        for k in idx:
            m = blk.model(theory, k)
            if skip is None or skip(m):
                yield m
        offset += n


class _ModelFilter:
    def __init__(self, theory: Theory):
        self.theory = theory
        self.trivial = not theory.eqs and not theory.axioms

    def __call__(self, m: Model) -> bool:
        # tables come from the monotone-map enumerator, so only equations and axioms can fail
        if self.trivial:
            return True
        try:
            check_model(self.theory, m)
            return True
        except (DfolError, SizeGuardError):
            return False


def count_models(theory: Theory, max_size: int) -> int:
    rel = (set(theory.bases), set(theory.funcs), set(theory.preds))
    return sum(b.count for b in _blocks(theory, max_size, *rel))


# ---------------------------------------------------------------- countermodels


@dataclass
class Countermodel:
    model: Model
    assignment: dict[str, Any]
    models_tried: int


class _Clock:
    def __init__(self, budget_ms: int):
        self.deadline = time.monotonic() + budget_ms / 1000.0

    def check(self, what: str, progress: dict) -> None:
        if time.monotonic() > self.deadline:
            raise BudgetExhausted(f"time budget exhausted during {what}", progress)


def find_countermodel(theory: Theory, j: Judgement, bounds: SearchBounds) -> Countermodel | None:
    """The first model (in enumeration order) where ``j`` fails, or None."""
    wf_judgement(theory, j)
    if bounds.max_size < 1:
        return None
    clock = _Clock(bounds.budget_ms)
    tried = 0
    for m in enumerate_models(theory, bounds, relevant_symbols(theory, j)):
        tried += 1
        if tried % 64 == 0:
            clock.check("countermodel search", {"models_tried": tried})
        w = check_entailment_semantics(m, j)
        if w is not None:
            return Countermodel(m, w, tried)
    return None


# ---------------------------------------------------------------- soundness sweep


@dataclass
class Violation:
    derivation: int
    path: tuple[int, ...]
    judgement: str
    model: dict[str, Any]
    assignment: dict[str, Any]


@dataclass
class SweepReport:
    models: int = 0
    derivations: int = 0
    judgements: int = 0
    checks: int = 0
    sampled: bool = False
    violations: list[Violation] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def clean(self) -> bool:
        return not self.violations

    def to_json(self) -> dict[str, Any]:
        return {
            "models": self.models, "derivations": self.derivations, "judgements": self.judgements,
            "checks": self.checks, "sampled": self.sampled, "seconds": round(self.seconds, 3),
            "violations": [v.__dict__ | {"path": list(v.path)} for v in self.violations],
        }


def soundness_sweep(theory: Theory, corpus: Sequence[Derivation], bounds: SearchBounds,
                    max_violations: int = 20) -> SweepReport:
    """Check every judgement in every derivation against every enumerated model."""
    for i, d in enumerate(corpus):
        diag = check_derivation(theory, d)
        if diag is not None:
            diag.message = f"derivation {i}: {diag.message}"
            raise KernelError(diag)
    t0 = time.monotonic()
    clock = _Clock(bounds.budget_ms)
    report = SweepReport(derivations=len(corpus))
    report.sampled = count_models(theory, bounds.max_size) > bounds.max_models if bounds.max_size else False
    seen: dict[Judgement, tuple[int, tuple[int, ...]]] = {}
    for i, d in enumerate(corpus):
        for path, n in d.nodes():
            seen.setdefault(n.claimed, (i, path))
    report.judgements = len(seen)
    for m in enumerate_models(theory, bounds):
        report.models += 1
        clock.check("soundness sweep", {"models": report.models, "checks": report.checks})
        for jd, (i, path) in seen.items():
            report.checks += 1
            w = check_entailment_semantics(m, jd)
            if w is not None and len(report.violations) < max_violations:
                report.violations.append(Violation(i, path, show_judgement(jd), m.describe(), w))
    report.seconds = time.monotonic() - t0
    return report


__all__ = [
    "SearchBounds", "enumerate_preorders", "count_preorders", "enumerate_monotone_maps",
    "search_order", "enumerate_models", "count_models", "relevant_symbols", "Countermodel",
    "find_countermodel", "SweepReport", "Violation", "soundness_sweep",
]
