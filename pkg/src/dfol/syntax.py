"""Abstract syntax for types, terms, formulas, contexts and theories.

Every node is an immutable dataclass, so ASTs can be hashed, shared and
compared structurally.  Variables are named; alpha-equivalence is decided
by canonical renaming (see ``formulas.canonical_formula``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping, Union


# ---------------------------------------------------------------- types


@dataclass(frozen=True, slots=True)
class Base:
    name: str


@dataclass(frozen=True, slots=True)
class Unit:
    pass


@dataclass(frozen=True, slots=True)
class Prod:
    left: "Type"
    right: "Type"


@dataclass(frozen=True, slots=True)
class Arrow:
    dom: "Type"
    cod: "Type"


Type = Union[Base, Unit, Prod, Arrow]

UNIT = Unit()


def type_bases(ty: Type) -> set[str]:
    if isinstance(ty, Base):
        return {ty.name}
    if isinstance(ty, Prod):
        return type_bases(ty.left) | type_bases(ty.right)
    if isinstance(ty, Arrow):
        return type_bases(ty.dom) | type_bases(ty.cod)
    return set()


# ---------------------------------------------------------------- terms


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class FnApp:
    fn: str
    arg: "Term"


@dataclass(frozen=True, slots=True)
class Bang:
    pass


@dataclass(frozen=True, slots=True)
class Pair:
    left: "Term"
    right: "Term"


@dataclass(frozen=True, slots=True)
class Proj1:
    arg: "Term"


@dataclass(frozen=True, slots=True)
class Proj2:
    arg: "Term"


@dataclass(frozen=True, slots=True)
class App:
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True, slots=True)
class Lam:
    var: str
    ty: Type
    body: "Term"


Term = Union[Var, FnApp, Bang, Pair, Proj1, Proj2, App, Lam]

BANG = Bang()


def term_children(t: Term) -> tuple[Term, ...]:
    if isinstance(t, (FnApp, Proj1, Proj2)):
        return (t.arg,)
    if isinstance(t, Pair):
        return (t.left, t.right)
    if isinstance(t, App):
        return (t.fun, t.arg)
    if isinstance(t, Lam):
        return (t.body,)
    return ()


def term_free_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Lam):
        return term_free_vars(t.body) - {t.var}
    out: frozenset[str] = frozenset()
    for c in term_children(t):
        out |= term_free_vars(c)
    return out


def term_size(t: Term) -> int:
    return 1 + sum(term_size(c) for c in term_children(t))


# ---------------------------------------------------------------- formulas


class Pol(str, Enum):
    """Polarity of a quantifier or a context zone."""

    NEG = "-"
    DIN = "d"
    POS = "+"

    @property
    def symbol(self) -> str:
        return {"-": "-", "d": "Δ", "+": "+"}[self.value]


@dataclass(frozen=True, slots=True)
class Top:
    pass


@dataclass(frozen=True, slots=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Impl:
    ante: "Formula"
    cons: "Formula"


@dataclass(frozen=True, slots=True)
class Le:
    lhs: Term
    rhs: Term
    ty: Type


@dataclass(frozen=True, slots=True)
class Pred:
    name: str
    neg: Term
    pos: Term


@dataclass(frozen=True, slots=True)
class Exists:
    pol: Pol
    var: str
    ty: Type
    body: "Formula"


@dataclass(frozen=True, slots=True)
class Forall:
    pol: Pol
    var: str
    ty: Type
    body: "Formula"


Formula = Union[Top, And, Impl, Le, Pred, Exists, Forall]
Quant = (Exists, Forall)

TOP = Top()


def formula_depth(phi: Formula) -> int:
    if isinstance(phi, (Top, Le, Pred)):
        return 1
    if isinstance(phi, And):
        return 1 + max(formula_depth(phi.left), formula_depth(phi.right))
    if isinstance(phi, Impl):
        return 1 + max(formula_depth(phi.ante), formula_depth(phi.cons))
    return 1 + formula_depth(phi.body)


def conj(fs: Iterable[Formula]) -> Formula:
    """Right-nested conjunction; the empty conjunction is top."""
    fs = list(fs)
    if not fs:
        return TOP
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = And(f, out)
    return out


# ---------------------------------------------------------------- contexts

Ctx = tuple[tuple[str, Type], ...]


def ctx_names(ctx: Ctx) -> tuple[str, ...]:
    return tuple(n for n, _ in ctx)


def ctx_lookup(ctx: Ctx, name: str) -> Type | None:
    for n, ty in reversed(ctx):
        if n == name:
            return ty
    return None


def ctx_without(ctx: Ctx, names: Iterable[str]) -> Ctx:
    drop = set(names)
    return tuple((n, t) for n, t in ctx if n not in drop)


ZONES = (Pol.NEG, Pol.DIN, Pol.POS)


@dataclass(frozen=True, slots=True)
class PolCtx:
    """A polarized context [theta | delta | gamma]."""

    theta: Ctx = ()
    delta: Ctx = ()
    gamma: Ctx = ()

    def zone(self, pol: Pol) -> Ctx:
        return {Pol.NEG: self.theta, Pol.DIN: self.delta, Pol.POS: self.gamma}[pol]

    def names(self) -> tuple[str, ...]:
        return ctx_names(self.theta) + ctx_names(self.delta) + ctx_names(self.gamma)

    def all(self) -> Ctx:
        return self.theta + self.delta + self.gamma

    def neg_ctx(self) -> Ctx:
        """Variables usable in negative positions: theta, delta."""
        return self.theta + self.delta

    def pos_ctx(self) -> Ctx:
        """Variables usable in positive positions: gamma, delta."""
        return self.gamma + self.delta

    def swapped(self) -> "PolCtx":
        return PolCtx(self.gamma, self.delta, self.theta)

    def zone_of(self, name: str) -> Pol | None:
        for pol in ZONES:
            if ctx_lookup(self.zone(pol), name) is not None:
                return pol
        return None

    def type_of(self, name: str) -> Type | None:
        return ctx_lookup(self.all(), name)

    def extend(self, pol: Pol, name: str, ty: Type) -> "PolCtx":
        """Append ``name`` to a zone; an existing binding of the name is shadowed."""
        th, de, ga = (ctx_without(z, (name,)) for z in (self.theta, self.delta, self.gamma))
        if pol is Pol.NEG:
            th = th + ((name, ty),)
        elif pol is Pol.DIN:
            de = de + ((name, ty),)
        else:
            ga = ga + ((name, ty),)
        return PolCtx(th, de, ga)

    def remove(self, *names: str) -> "PolCtx":
        return PolCtx(*(ctx_without(z, names) for z in (self.theta, self.delta, self.gamma)))

    def replace_zone(self, pol: Pol, ctx: Ctx) -> "PolCtx":
        zs = [self.theta, self.delta, self.gamma]
        zs[ZONES.index(pol)] = ctx
        return PolCtx(*zs)

    def duplicate_names(self) -> list[str]:
        seen: set[str] = set()
        dup = []
        for n in self.names():
            if n in seen:
                dup.append(n)
            seen.add(n)
        return dup

    def same_zones(self, other: "PolCtx") -> bool:
        """Zone-wise equality ignoring the order of variables inside a zone."""
        return all(dict(self.zone(p)) == dict(other.zone(p)) and
                   len(self.zone(p)) == len(other.zone(p)) for p in ZONES)


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    if base not in avoid:
        return base
    stem = base.rstrip("0123456789") or base
    for i in itertools.count(1):
        cand = f"{stem}{i}"
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


# ---------------------------------------------------------------- judgements and theories


@dataclass(frozen=True, slots=True)
class Judgement:
    """[theta | delta | gamma] hyps |- concl"""

    pc: PolCtx
    hyps: tuple[Formula, ...]
    concl: Formula


@dataclass(frozen=True, slots=True)
class Equation:
    ctx: Ctx
    ty: Type
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Theory:
    """A signature (base types, functions, equations, predicates, axioms)."""

    name: str = "anonymous"
    bases: tuple[str, ...] = ()
    funcs: Mapping[str, tuple[Type, Type]] = field(default_factory=dict)
    eqs: Mapping[str, Equation] = field(default_factory=dict)
    preds: Mapping[str, tuple[Type, Type]] = field(default_factory=dict)
    axioms: Mapping[str, Judgement] = field(default_factory=dict)

    def with_axioms(self, extra: Mapping[str, Judgement]) -> "Theory":
        ax = dict(self.axioms)
        ax.update(extra)
        return Theory(self.name, self.bases, dict(self.funcs), dict(self.eqs), dict(self.preds), ax)

    def key(self) -> tuple:
        """Hashable summary of the symbol part used by the term normalizer."""
        return (self.bases, tuple(sorted(self.funcs.items(), key=lambda kv: kv[0])))


def iter_formula_terms(phi: Formula) -> Iterator[Term]:
    if isinstance(phi, Le):
        yield phi.lhs
        yield phi.rhs
    elif isinstance(phi, Pred):
        yield phi.neg
        yield phi.pos
    elif isinstance(phi, And):
        yield from iter_formula_terms(phi.left)
        yield from iter_formula_terms(phi.right)
    elif isinstance(phi, Impl):
        yield from iter_formula_terms(phi.ante)
        yield from iter_formula_terms(phi.cons)
    elif isinstance(phi, (Exists, Forall)):
        yield from iter_formula_terms(phi.body)


def iter_subformulas(phi: Formula) -> Iterator[Formula]:
    yield phi
    if isinstance(phi, And):
        yield from iter_subformulas(phi.left)
        yield from iter_subformulas(phi.right)
    elif isinstance(phi, Impl):
        yield from iter_subformulas(phi.ante)
        yield from iter_subformulas(phi.cons)
    elif isinstance(phi, (Exists, Forall)):
        yield from iter_subformulas(phi.body)


def iter_subterms(t: Term) -> Iterator[Term]:
    yield t
    for c in term_children(t):
        yield from iter_subterms(c)
