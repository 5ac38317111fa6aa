"""The preorder model: types as finite preorders, formulas as monotone maps into 0 ≤ 1."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Iterable, Mapping

from . import _accel
from .errors import Diagnostic, ModelError, SizeGuardError
from .printer import show_judgement
from .syntax import (
    And, App, Arrow, Bang, Base, Ctx, Exists, FnApp, Formula, Impl, Judgement, Lam, Le,
    Pair, Pol, PolCtx, Pred, Prod, Proj1, Proj2, Term, Theory, Top, Type, Unit, Var,
)

SIZE_GUARD = 100_000


@dataclass(frozen=True)
class FinPreorder:
    """A preorder on {0..size-1}; ``rows[i]`` has bit j set iff i <= j."""

    rows: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.rows)

    def le(self, i: int, j: int) -> bool:
        return bool((self.rows[i] >> j) & 1)

    @cached_property
    def rel(self) -> tuple[tuple[bool, ...], ...]:
        return tuple(tuple(self.le(i, j) for j in range(self.size)) for i in range(self.size))

    def is_valid(self) -> bool:
        return _accel.is_preorder(self.rows)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "FinPreorder":
        """Reflexive relation generated by ``pairs`` (not closed transitively)."""
        rows = [1 << i for i in range(n)]
        for i, j in pairs:
            rows[i] |= 1 << j
        return cls(tuple(rows))

    @classmethod
    def from_matrix(cls, rel: Iterable[Iterable[bool]]) -> "FinPreorder":
        return cls(tuple(sum(1 << j for j, b in enumerate(row) if b) for row in rel))

    @classmethod
    def chain(cls, n: int) -> "FinPreorder":
        return cls(tuple(((1 << n) - 1) & ~((1 << i) - 1) for i in range(n)))

    @classmethod
    def discrete(cls, n: int) -> "FinPreorder":
        return cls(tuple(1 << i for i in range(n)))

    def op(self) -> "FinPreorder":
        return FinPreorder.from_matrix(zip(*self.rel)) if self.size else self

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.size) for j in range(self.size) if i != j and self.le(i, j)]


TWO = FinPreorder.chain(2)


def product(a: FinPreorder, b: FinPreorder) -> FinPreorder:
    """Componentwise order; element (i, j) has index i * |b| + j."""
    nb = b.size
    rows = []
    for i in range(a.size):
        for j in range(b.size):
            r = 0
            for k in range(a.size):
                if a.le(i, k):
                    r |= b.rows[j] << (k * nb)
            rows.append(r)
    return FinPreorder(tuple(rows))


def monotone_maps(dom: FinPreorder, cod: FinPreorder, limit: int = -1) -> list[tuple[int, ...]]:
    return _accel.monotone_maps(dom.rows, cod.rows, limit)


def is_monotone(dom: FinPreorder, cod: FinPreorder, table: tuple[int, ...]) -> bool:
    return all(cod.le(table[i], table[j]) for i in range(dom.size) for j in range(dom.size) if dom.le(i, j))


@dataclass(frozen=True)
class MonotoneMap:
    dom: FinPreorder
    cod: FinPreorder
    table: tuple[int, ...]

    def __call__(self, i: int) -> int:
        return self.table[i]

    def is_monotone(self) -> bool:
        return is_monotone(self.dom, self.cod, self.table)


class Carrier:
    """The interpretation of a type, with decoding of its elements."""

    def __init__(self, ty: Type, order: FinPreorder, parts: tuple["Carrier", ...] = (),
                 maps: tuple[tuple[int, ...], ...] = ()):
        self.ty = ty
        self.order = order
        self.parts = parts
        self.maps = maps
        self.index = {m: k for k, m in enumerate(maps)} if maps else {}

    @property
    def size(self) -> int:
        return self.order.size

    def value(self, i: int) -> Any:
        """A JSON-friendly description of element ``i``."""
        if isinstance(self.ty, Prod):
            nb = self.parts[1].size
            return [self.parts[0].value(i // nb), self.parts[1].value(i % nb)]
        if isinstance(self.ty, Arrow):
            return [self.parts[1].value(v) for v in self.maps[i]]
        if isinstance(self.ty, Unit):
            return "*"
        return i


@dataclass
class Model:
    """Assignments for the symbols of a theory."""

    theory: Theory
    bases: Mapping[str, FinPreorder]
    funcs: Mapping[str, tuple[int, ...]] = field(default_factory=dict)
    preds: Mapping[str, tuple[int, ...]] = field(default_factory=dict)
    guard: int = SIZE_GUARD
    _carriers: dict = field(default_factory=dict, repr=False)

    def carrier(self, ty: Type) -> Carrier:
        c = self._carriers.get(ty)
        if c is not None:
            return c
        if isinstance(ty, Base):
            if ty.name not in self.bases:
                raise ModelError(Diagnostic("model", "unassigned-base", f"no preorder for base type {ty.name}"))
            c = Carrier(ty, self.bases[ty.name])
        elif isinstance(ty, Unit):
            c = Carrier(ty, FinPreorder((1,)))
        elif isinstance(ty, Prod):
            l, r = self.carrier(ty.left), self.carrier(ty.right)
            if l.size * r.size > self.guard:
                raise SizeGuardError(f"product of size {l.size * r.size} exceeds the guard")
            c = Carrier(ty, product(l.order, r.order), (l, r))
        elif isinstance(ty, Arrow):
            d, k = self.carrier(ty.dom), self.carrier(ty.cod)
            maps = monotone_maps(d.order, k.order, self.guard)
            if len(maps) > self.guard:
                raise SizeGuardError(f"function space exceeds {self.guard} elements")
            rows = []
            for f in maps:
                r = 0
                for gi, g in enumerate(maps):
                    if all(k.order.le(a, b) for a, b in zip(f, g)):
                        r |= 1 << gi
                rows.append(r)
            c = Carrier(ty, FinPreorder(tuple(rows)), (d, k), tuple(maps))
        else:
            raise TypeError(f"not a type: {ty!r}")
        self._carriers[ty] = c
        return c

    def describe(self) -> dict[str, Any]:
        return {
            "bases": {n: {"size": p.size, "le": [list(x) for x in p.pairs()]} for n, p in self.bases.items()},
            "funcs": {n: list(t) for n, t in self.funcs.items()},
            "preds": {n: list(t) for n, t in self.preds.items()},
        }


def interpret_type(m: Model, ty: Type) -> FinPreorder:
    return m.carrier(ty).order


# ---------------------------------------------------------------- terms


class Slots(dict):
    """Variable name to environment slot, remembering variable types."""

    def __init__(self, *args, types: Mapping[str, Type] | None = None, **kw):
        super().__init__(*args, **kw)
        self.types = dict(types or {})

    def bind(self, name: str, slot: int, ty: Type) -> "Slots":
        s = Slots(self, types=self.types)
        s[name] = slot
        s.types[name] = ty
        return s

    def without(self, name: str) -> "Slots":
        s = Slots({k: v for k, v in self.items() if k != name},
                  types={k: v for k, v in self.types.items() if k != name})
        return s


def compile_term(m: Model, t: Term, slots: Slots) -> Callable[[list], int]:
    """Closure from an environment (list of element indices) to an element index."""
    from .terms import typecheck_term

    def ty_of(u: Term) -> Type:
        return typecheck_term(m.theory, tuple(slots.types.items()), u)

    if isinstance(t, Var):
        k = slots[t.name]
        return lambda env: env[k]
    if isinstance(t, Bang):
        return lambda env: 0
    if isinstance(t, FnApp):
        table = m.funcs[t.fn]
        arg = compile_term(m, t.arg, slots)
        return lambda env: table[arg(env)]
    if isinstance(t, Pair):
        l, r = compile_term(m, t.left, slots), compile_term(m, t.right, slots)
        nb = m.carrier(ty_of(t.right)).size
        return lambda env: l(env) * nb + r(env)
    if isinstance(t, (Proj1, Proj2)):
        p = compile_term(m, t.arg, slots)
        nb = m.carrier(ty_of(t.arg)).parts[1].size
        if isinstance(t, Proj1):
            return lambda env: p(env) // nb
        return lambda env: p(env) % nb
    if isinstance(t, App):
        f = compile_term(m, t.fun, slots)
        a = compile_term(m, t.arg, slots)
        maps = m.carrier(ty_of(t.fun)).maps
        return lambda env: maps[f(env)][a(env)]
    if isinstance(t, Lam):
        dom = m.carrier(t.ty)
        k = _next_slot(slots)
        inner = slots.bind(t.var, k, t.ty)
        body = compile_term(m, t.body, inner)
        index = m.carrier(ty_of(t)).index
        n = dom.size

        def lam(env):
            while len(env) <= k:
                env.append(0)
            saved = env[k]
            out = []
            for a in range(n):
                env[k] = a
                out.append(body(env))
            env[k] = saved
            return index[tuple(out)]
        return lam
    raise TypeError(f"not a term: {t!r}")


def interpret_term(m: Model, ctx: Ctx, t: Term) -> MonotoneMap:
    """Tabulate ⟦t⟧ : ⟦ctx⟧ → ⟦A⟧; the context is ordered as an iterated product."""
    from .terms import typecheck_term
    ty = typecheck_term(m.theory, ctx, t)
    slots = Slots({n: i for i, (n, _) in enumerate(ctx)}, types=dict(ctx))
    f = compile_term(m, t, slots)
    cars = [m.carrier(a) for _, a in ctx]
    dom = FinPreorder((1,))
    for c in cars:
        dom = product(dom, c.order)
    table = tuple(f(list(env)) for env in itertools.product(*(range(c.size) for c in cars)))
    return MonotoneMap(dom, m.carrier(ty).order, table)


# ---------------------------------------------------------------- formulas


class _Compiler:
    """Compile formulas to closures over an environment of slots.

    A theta variable has one (negative) slot, a gamma variable one
    (positive) slot, and a delta variable two: its negative and positive
    copies.  Terms in negative positions read ``nmap``, in positive
    positions ``pmap``.
    """

    def __init__(self, m: Model):
        self.m = m
        self.nslots = 0

    def new_slot(self) -> int:
        k = self.nslots
        self.nslots += 1
        return k

    def term(self, t: Term, slots: Slots):
        return compile_term(self.m, t, slots)

    def formula(self, phi: Formula, nmap: Slots, pmap: Slots):
        m = self.m
        if isinstance(phi, Top):
            return lambda env: True
        if isinstance(phi, And):
            l, r = self.formula(phi.left, nmap, pmap), self.formula(phi.right, nmap, pmap)
            return lambda env: l(env) and r(env)
        if isinstance(phi, Impl):
            a = self.formula(phi.ante, pmap, nmap)
            c = self.formula(phi.cons, nmap, pmap)
            return lambda env: (not a(env)) or c(env)
        if isinstance(phi, Le):
            s = self._term_in(phi.lhs, nmap)
            t = self._term_in(phi.rhs, pmap)
            rows = m.carrier(phi.ty).order.rows
            return lambda env: bool((rows[s(env)] >> t(env)) & 1)
        if isinstance(phi, Pred):
            s = self._term_in(phi.neg, nmap)
            t = self._term_in(phi.pos, pmap)
            table = m.preds[phi.name]
            npos = m.carrier(m.theory.preds[phi.name][1]).size
            return lambda env: bool(table[s(env) * npos + t(env)])
        # quantifiers
        k = self.new_slot()
        size = m.carrier(phi.ty).size
        if phi.pol is Pol.NEG:
            n2, p2 = nmap.bind(phi.var, k, phi.ty), pmap.without(phi.var)
        elif phi.pol is Pol.POS:
            n2, p2 = nmap.without(phi.var), pmap.bind(phi.var, k, phi.ty)
        else:
            n2, p2 = nmap.bind(phi.var, k, phi.ty), pmap.bind(phi.var, k, phi.ty)
        body = self.formula(phi.body, n2, p2)
        rng = range(size)
        if isinstance(phi, Exists):
            def ex(env):
                for a in rng:
                    env[k] = a
                    if body(env):
                        return True
                return False
            return ex

        def fa(env):
            for a in rng:
                env[k] = a
                if not body(env):
                    return False
            return True
        return fa

    def _term_in(self, t: Term, slots: Slots):
        # lambda bodies need scratch slots beyond every formula slot
        return compile_term(self.m, t, _Offset(slots, self))


class _Offset(Slots):
    """Slot map whose fresh slots are allocated from the compiler."""

    def __init__(self, base: Slots, comp: _Compiler):
        super().__init__(base, types=base.types)
        self.comp = comp

    def bind(self, name, slot, ty):
        s = _Offset(Slots.bind(self, name, slot, ty), self.comp)
        return s


def _next_slot(slots: Mapping[str, int]) -> int:
    comp = getattr(slots, "comp", None)
    if comp is not None:
        return comp.new_slot()
    return max(slots.values(), default=-1) + 1


@dataclass
class CompiledJudgement:
    """Closures for hypotheses and conclusion plus the slot layout."""

    pc: PolCtx
    hyps: list
    concl: Callable
    nslots: int
    theta: list[tuple[str, int, int]]        # (name, slot, carrier size)
    delta: list[tuple[str, int, int, int]]   # (name, neg slot, pos slot, size)
    gamma: list[tuple[str, int, int]]


def compile_judgement(m: Model, pc: PolCtx, hyps: Iterable[Formula], concl: Formula) -> CompiledJudgement:
    comp = _Compiler(m)
    nmap, pmap = Slots(), Slots()
    theta, delta, gamma = [], [], []
    for n, ty in pc.theta:
        k = comp.new_slot()
        nmap = nmap.bind(n, k, ty)
        theta.append((n, k, m.carrier(ty).size))
    for n, ty in pc.delta:
        kn, kp = comp.new_slot(), comp.new_slot()
        nmap = nmap.bind(n, kn, ty)
        pmap = pmap.bind(n, kp, ty)
        delta.append((n, kn, kp, m.carrier(ty).size))
    for n, ty in pc.gamma:
        k = comp.new_slot()
        pmap = pmap.bind(n, k, ty)
        gamma.append((n, k, m.carrier(ty).size))
    hs = [comp.formula(h, nmap, pmap) for h in hyps]
    c = comp.formula(concl, nmap, pmap)
    return CompiledJudgement(pc, hs, c, comp.nslots, theta, delta, gamma)


def _assignments(cj: CompiledJudgement, diagonal: bool):
    """Yield environments; with ``diagonal`` both copies of a delta variable agree."""
    ranges = [range(s) for _, _, s in cj.theta]
    if diagonal:
        ranges += [range(s) for _, _, _, s in cj.delta]
    else:
        for _, _, _, s in cj.delta:
            ranges += [range(s), range(s)]
    ranges += [range(s) for _, _, s in cj.gamma]
    for vals in itertools.product(*ranges):
        env = [0] * max(cj.nslots, 1)
        it = iter(vals)
        for _, k, _ in cj.theta:
            env[k] = next(it)
        for _, kn, kp, _ in cj.delta:
            v = next(it)
            env[kn] = v
            env[kp] = v if diagonal else next(it)
        for _, k, _ in cj.gamma:
            env[k] = next(it)
        yield vals, env


def _witness(m: Model, cj: CompiledJudgement, env: list, diagonal: bool = True) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for n, k, _ in cj.theta + cj.gamma:
        out[n] = m.carrier(cj.pc.type_of(n)).value(env[k])
    for n, kn, kp, _ in cj.delta:
        c = m.carrier(cj.pc.type_of(n))
        out[n] = c.value(env[kp]) if diagonal else [c.value(env[kn]), c.value(env[kp])]
    return out


def check_entailment_semantics(m: Model, j: Judgement) -> dict[str, Any] | None:
    """None if ⟦Φ⟧ ≤ ⟦φ⟧ at every diagonal point, else the first failing assignment."""
    cj = compile_judgement(m, j.pc, j.hyps, j.concl)
    for _, env in _assignments(cj, diagonal=True):
        if all(h(env) for h in cj.hyps) and not cj.concl(env):
            return _witness(m, cj, env)
    return None


def formula_table(m: Model, pc: PolCtx, phi: Formula) -> dict[tuple[int, ...], bool]:
    """⟦φ⟧ on every point of Θ^op × (Δ^op × Δ) × Γ, keyed by the value tuple.

    Keys list theta values, then (negative, positive) pairs for delta, then gamma.
    """
    cj = compile_judgement(m, pc, (), phi)
    return {vals: bool(cj.concl(env)) for vals, env in _assignments(cj, diagonal=False)}


def reindexed_table(m: Model, morph, phi: Formula) -> dict[tuple[int, ...], bool]:
    """⟦φ⟧ precomposed with the interpretation of a reindexing triple.

    Keys range over the target context, laid out as in ``formula_table``.
    A theta image is read with delta at its negative copy, a gamma image
    with delta at its positive copy, and a delta image at both copies.
    """
    f = morph.full()
    src, tgt = f.src, f.tgt
    source = formula_table(m, src, phi)
    nslots = Slots({n: i for i, (n, _) in enumerate(tgt.theta + tgt.delta)},
                   types=dict(tgt.theta + tgt.delta))
    pslots = Slots({n: i for i, (n, _) in enumerate(tgt.gamma + tgt.delta)},
                   types=dict(tgt.gamma + tgt.delta))
    dslots = Slots({n: i for i, (n, _) in enumerate(tgt.delta)}, types=dict(tgt.delta))
    neg = [compile_term(m, f.neg[n], nslots) for n, _ in src.theta]
    din = [compile_term(m, f.dinat[n], dslots) for n, _ in src.delta]
    pos = [compile_term(m, f.pos[n], pslots) for n, _ in src.gamma]
    nt, nd = len(tgt.theta), len(tgt.delta)
    out = {}
    for key in itertools.product(*(range(m.carrier(t).size) for _, t in tgt.theta),
                                 *(r for _, t in tgt.delta for r in [range(m.carrier(t).size)] * 2),
                                 *(range(m.carrier(t).size) for _, t in tgt.gamma)):
        th = list(key[:nt])
        dn = [key[nt + 2 * i] for i in range(nd)]
        dp = [key[nt + 2 * i + 1] for i in range(nd)]
        ga = list(key[nt + 2 * nd:])
        src_key = [c(th + dn) for c in neg]
        for c in din:
            src_key += [c(list(dn)), c(list(dp))]
        src_key += [c(ga + dp) for c in pos]
        out[key] = source[tuple(src_key)]
    return out


def eval_formula(m: Model, pc: PolCtx, phi: Formula, point: Mapping[str, Any]) -> bool:
    """Evaluate at one point; a delta variable maps to a (negative, positive) pair."""
    cj = compile_judgement(m, pc, (), phi)
    env = [0] * max(cj.nslots, 1)
    for n, k, _ in cj.theta + cj.gamma:
        env[k] = point[n]
    for n, kn, kp, _ in cj.delta:
        v = point[n]
        env[kn], env[kp] = (v, v) if isinstance(v, int) else v
    return bool(cj.concl(env))


def leq_fiber(m: Model, pc: PolCtx, psi: Formula, phi: Formula) -> bool:
    """ψ ≤ φ in the fiber: pointwise on the diagonal."""
    return check_entailment_semantics(m, Judgement(pc, (psi,), phi)) is None


# ---------------------------------------------------------------- model validation


def _fail(reason: str, msg: str, witness=None) -> ModelError:
    return ModelError(Diagnostic("model", reason, msg, witness=witness))


def check_model(theory: Theory, m: Model, skip_axioms: Iterable[str] = ()) -> None:
    """Raise ModelError unless ``m`` interprets ``theory``."""
    for b in theory.bases:
        p = m.bases.get(b)
        if p is None:
            raise _fail("unassigned-base", f"no preorder for base type {b}")
        if not p.is_valid():
            raise _fail("not-a-preorder", f"relation on {b} is not reflexive and transitive")
    for f, (dom, cod) in theory.funcs.items():
        table = m.funcs.get(f)
        if table is None:
            raise _fail("unassigned-function", f"no table for {f}")
        d, c = m.carrier(dom), m.carrier(cod)
        if len(table) != d.size or any(not 0 <= v < c.size for v in table):
            raise _fail("bad-table", f"table for {f} must map {d.size} elements into {c.size}")
        if not is_monotone(d.order, c.order, tuple(table)):
            bad = next((i, j) for i in range(d.size) for j in range(d.size)
                       if d.order.le(i, j) and not c.order.le(table[i], table[j]))
            raise _fail("not-monotone", f"{f} is not monotone", {"x": bad[0], "y": bad[1]})
    for p, (neg, pos) in theory.preds.items():
        table = m.preds.get(p)
        if table is None:
            raise _fail("unassigned-predicate", f"no table for {p}")
        n, q = m.carrier(neg).order, m.carrier(pos).order
        if len(table) != n.size * q.size or any(v not in (0, 1) for v in table):
            raise _fail("bad-table", f"table for {p} must have {n.size * q.size} entries in {{0,1}}")
        dom = product(n.op(), q)
        if not is_monotone(dom, TWO, tuple(table)):
            raise _fail("not-monotone", f"{p} is not monotone in (neg^op, pos)")
    for name, eq in theory.eqs.items():
        lhs, rhs = interpret_term(m, eq.ctx, eq.lhs), interpret_term(m, eq.ctx, eq.rhs)
        if lhs.table != rhs.table:
            k = next(i for i, (a, b) in enumerate(zip(lhs.table, rhs.table)) if a != b)
            raise _fail("equation-fails", f"equation {name} does not hold", {"point": k})
    skip = set(skip_axioms)
    for name, ax in theory.axioms.items():
        if name in skip:
            continue
        w = check_entailment_semantics(m, ax)
        if w is not None:
            raise _fail("axiom-fails", f"axiom {name} fails: {show_judgement(ax)}", w)


def is_model(theory: Theory, m: Model) -> bool:
    try:
        check_model(theory, m)
        return True
    except (ModelError, SizeGuardError):
        return False


__all__ = [
    "FinPreorder", "TWO", "product", "monotone_maps", "is_monotone", "MonotoneMap", "Carrier",
    "Model", "interpret_type", "interpret_term", "compile_judgement", "check_entailment_semantics",
    "formula_table", "reindexed_table", "eval_formula", "leq_fiber", "check_model", "is_model", "SIZE_GUARD",
]
