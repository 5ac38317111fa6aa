"""Goal-directed proof scripts and the elaboration of derived rules.

Every step, primitive or derived, is a function from the current goal and
its arguments to a list of subgoals plus a builder that assembles the
derivation once the subgoals are proved.  Derived rules expand into
primitive kernel nodes only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Sequence

from .errors import Diagnostic, DfolError, ParseError, TacticError
from .formulas import (
    formula_eq, formula_free_vars, subst_formula, split_dinatural, variance_report, wf_judgement,
)
from .kernel import Derivation, check_derivation, formula_subterm, replace_in_formula
from .parser import Parser
from .printer import show_formula, show_judgement, show_term
from .syntax import (
    And, Exists, Forall, Impl, Judgement, Le, Pol, PolCtx, TOP, Theory, Top, Var,
    ZONES, conj, ctx_names, fresh_name,
)
from .terms import binders_along, subst_term, term_at, typecheck_term

Builder = Callable[[list[Derivation]], Derivation]


def _fail(rule: str, reason: str, msg: str, **kw) -> TacticError:
    return TacticError(Diagnostic(rule=rule, reason=reason, message=msg, **kw))


def node(rule: str, claimed: Judgement, *premises: Derivation, **params: Any) -> Derivation:
    return Derivation(rule, claimed, tuple(premises), params)


def _fresh(base: str, *avoid_from) -> str:
    avoid: set[str] = set()
    for a in avoid_from:
        if isinstance(a, PolCtx):
            avoid |= set(a.names())
        elif isinstance(a, Judgement):
            avoid |= set(a.pc.names())
            for f in a.hyps + (a.concl,):
                avoid |= formula_free_vars(f)
        else:
            avoid |= set(a)
    return fresh_name(base, avoid)


# ---------------------------------------------------------------- conjunction plumbing


def proj_conj(pc: PolCtx, hyps: tuple, k: int, i: int) -> Derivation:
    """[pc] C ⊢ Φ_i where C is the right-nested conjunction of the k formulas ``hyps``."""
    c = conj(hyps)
    d = node("hyp", Judgement(pc, (c,), c), index=0)
    cur = c
    for _ in range(i):
        cur = cur.right
        d = node("and-elim-right", Judgement(pc, (c,), cur), d)
    if i < k - 1:
        d = node("and-elim-left", Judgement(pc, (c,), cur.left), d)
    return d


def intro_conj(pc: PolCtx, hyps: tuple, start: int = 0) -> Derivation:
    """[pc] Φ ⊢ conj(Φ[start:])."""
    rest = hyps[start:]
    if not rest:
        return node("top", Judgement(pc, hyps, TOP))
    if len(rest) == 1:
        return node("hyp", Judgement(pc, hyps, rest[0]), index=start)
    left = node("hyp", Judgement(pc, hyps, rest[0]), index=start)
    right = intro_conj(pc, hyps, start + 1)
    return node("and-intro", Judgement(pc, hyps, conj(rest)), left, right)


def conj_hyps(j: Judgement, d: Derivation) -> Derivation:
    """From a derivation of Φ ⊢ φ build one of conj(Φ) ⊢ φ."""
    pc, hyps = j.pc, j.hyps
    k = len(hyps)
    c = conj(hyps)
    if k == 1:
        return d
    if k == 0:
        return node("struct", Judgement(pc, (c,), j.concl), d, sigma=())
    state = list(hyps)
    for i in range(k):
        new = state[:i] + [c] + state[i + 1:]
        d = node("cut", Judgement(pc, tuple(new), j.concl), proj_conj(pc, hyps, k, i), d, index=i)
        state = new
    return node("struct", Judgement(pc, (c,), j.concl), d, sigma=(0,) * k)


# ---------------------------------------------------------------- step arguments


class Args:
    """Sequential reader over the argument text of one script step."""

    def __init__(self, raw: Any, line: int = 1, source: str = "<script>"):
        self.values: list | None = None
        if isinstance(raw, str):
            self.p: Parser | None = Parser(raw, source, line)
        else:
            self.p = None
            self.values = list(raw)

    def _take(self, kind: str, optional: bool):
        if self.values is not None:
            if not self.values:
                if optional:
                    return None
                raise ParseError(0, 0, f"a {kind} argument", "", "<args>")
            return self.values.pop(0)
        p = self.p
        if p.at_eof():
            if optional:
                return None
            raise p.error(f"a {kind} argument")
        tok = p.peek()
        if kind == "var":
            return p.ident("a variable")
        if kind == "int":
            if tok.kind != "num":
                if optional:
                    return None
                raise p.error("an integer")
            return int(p.next().text)
        if kind == "term":
            return p.term()
        if kind == "formula":
            return p.formula()
        if kind == "judgement":
            return p.judgement()
        if kind == "zone":
            t = p.next()
            if t.text in ("+", "-", "d"):
                return Pol(t.text)
            raise p.error("one of + - d", t)
        if kind == "word":
            t = p.next()
            return int(t.text) if t.kind == "num" else t.text
        if kind == "names":
            p.expect("(")
            out = []
            while p.peek().text != ")":
                out.append(p.ident("a variable"))
            p.next()
            return tuple(out)
        if kind == "ints":
            p.expect("(")
            out = []
            while p.peek().text != ")":
                t = p.next()
                if t.kind != "num":
                    raise p.error("an integer", t)
                out.append(int(t.text))
            p.next()
            return tuple(out)
        if kind == "bindings":
            p.expect("(")
            out = {}
            while p.peek().text != ")":
                p.expect("(")
                x = p.ident("a variable")
                out[x] = p.term()
                p.expect(")")
            p.next()
            return out
        raise ValueError(kind)

    def get(self, kind: str):
        return self._take(kind, False)

    def opt(self, kind: str):
        return self._take(kind, True)

    def rest_ints(self) -> tuple[int, ...]:
        out = []
        while True:
            v = self.opt("int")
            if v is None:
                return tuple(out)
            out.append(v)

    def done(self) -> None:
        if self.p is not None:
            self.p.done()
        elif self.values:
            raise ParseError(0, 0, "no further arguments", repr(self.values[0]), "<args>")


# ---------------------------------------------------------------- primitive steps


def _same(pc: PolCtx, hyps, concl) -> Judgement:
    return Judgement(pc, tuple(hyps), concl)


def step_hyp(th: Theory, g: Judgement, a: Args):
    i = a.opt("int")
    if i is None:
        for k, h in enumerate(g.hyps):
            if formula_eq(th, g.pc, h, g.concl):
                i = k
                break
        else:
            raise _fail("hyp", "not-a-hypothesis", "goal is not among the hypotheses",
                        found=show_judgement(g))
    return [], lambda ds: node("hyp", g, index=i)


def step_top(th, g, a):
    return [], lambda ds: node("top", g)


def step_axiom(th, g, a):
    name = a.get("var")
    return [], lambda ds: node("axiom", g, name=name)


def step_struct(th, g, a):
    sigma = a.rest_ints()
    if any(k >= len(g.hyps) for k in sigma):
        raise _fail("struct", "bad-index", f"struct indices {sigma} exceed the hypotheses")
    sub = _same(g.pc, (g.hyps[k] for k in sigma), g.concl)
    return [sub], lambda ds: node("struct", g, ds[0], sigma=sigma)


def step_have(th, g, a):
    """Cut in a lemma ψ proved from all hypotheses."""
    psi = a.get("formula")
    n = len(g.hyps)
    first = _same(g.pc, g.hyps, psi)
    second = _same(g.pc, (psi,) + g.hyps, g.concl)
    doubled = _same(g.pc, g.hyps + g.hyps, g.concl)

    def build(ds):
        cut = node("cut", doubled, ds[0], ds[1], index=0)
        if n == 0:
            return cut
        return node("struct", g, cut, sigma=tuple(range(n)) * 2)
    return [first, second], build


def step_weaken(th, g, a):
    names = []
    while (x := a.opt("var")) is not None:
        names.append(x)
    used = set()
    for f in g.hyps + (g.concl,):
        used |= formula_free_vars(f)
    for x in names:
        if x in used:
            raise _fail("reindex", "weaken-used-variable", f"{x} occurs in the goal")
        if g.pc.zone_of(x) is None:
            raise _fail("reindex", "unbound-variable", f"{x} is not in the context")
    sub = Judgement(g.pc.remove(*names), g.hyps, g.concl)
    return [sub], lambda ds: node("reindex", g, ds[0])


def step_reindex(th, g, a):
    prem = a.get("judgement")
    maps: dict[str, dict] = {"neg": {}, "dinat": {}, "pos": {}}
    while a.p is not None and not a.p.at_eof():
        a.p.expect("(")
        key = a.p.next().text
        if key not in maps:
            raise a.p.error("neg, dinat or pos")
        while a.p.peek().text != ")":
            a.p.expect("(")
            x = a.p.ident()
            maps[key][x] = a.p.term()
            a.p.expect(")")
        a.p.next()
    return [prem], lambda ds: node("reindex", g, ds[0], **maps)


def step_and_intro(th, g, a):
    if not isinstance(g.concl, And):
        raise _fail("and-intro", "shape", "goal is not a conjunction", found=show_formula(g.concl))
    l, r = _same(g.pc, g.hyps, g.concl.left), _same(g.pc, g.hyps, g.concl.right)
    return [l, r], lambda ds: node("and-intro", g, ds[0], ds[1])


def _and_elim(side: str):
    def step(th, g, a):
        other = a.get("formula")
        both = And(g.concl, other) if side == "left" else And(other, g.concl)
        sub = _same(g.pc, g.hyps, both)
        return [sub], lambda ds: node(f"and-elim-{side}", g, ds[0])
    return step


def _zone_split(g: Judgement, z: str) -> tuple[Pol, Any]:
    pol = g.pc.zone_of(z)
    if pol is None:
        raise _fail("tactic", "unbound-variable", f"{z} is not in the context")
    return pol, g.pc.type_of(z)


def step_le_down(th, g, a):
    """Goal [Θ,a | Δ | Γ,b] a ≤ b, Φ ⊢ φ; subgoal [Θ | Δ,z | Γ] Φ ⊢ φ(z,z)."""
    x, y, z = a.opt("var"), a.opt("var"), a.opt("var")
    if not g.hyps or not isinstance(g.hyps[0], Le):
        raise _fail("le-down", "shape", "the head hypothesis must be a directed equality")
    h = g.hyps[0]
    x = x or getattr(h.lhs, "name", None)
    y = y or getattr(h.rhs, "name", None)
    if x is None or y is None:
        raise _fail("le-down", "shape", "both sides of the head equality must be variables")
    z = z or _fresh("z", g)
    ty = h.ty
    sub_pc = g.pc.remove(x, y).extend(Pol.DIN, z, ty)
    sub = Judgement(sub_pc, g.hyps[1:], subst_formula(g.concl, neg={x: Var(z)}, pos={y: Var(z)}))
    return [sub], lambda ds: node("le-down", g, ds[0], a=x, b=y, z=z)


def step_le_up(th, g, a):
    """Goal [Θ | Δ,z | Γ] Φ ⊢ φ(z); subgoal [Θ,a | Δ | Γ,b] a ≤ b, Φ(a,b) ⊢ φ(a,b)."""
    z, x, y = a.get("var"), a.opt("var"), a.opt("var")
    pol, ty = _zone_split(g, z)
    if pol is not Pol.DIN:
        raise _fail("le-up", "naturality", f"{z} must be dinatural")
    x = x or _fresh("a", g)
    y = y or _fresh("b", g, {x})
    pc = g.pc.remove(z).extend(Pol.NEG, x, ty).extend(Pol.POS, y, ty)
    sub = Judgement(pc, (Le(Var(x), Var(y), ty),) + tuple(split_dinatural(f, z, x, y) for f in g.hyps),
                    split_dinatural(g.concl, z, x, y))
    return [sub], lambda ds: node("le-up", g, ds[0], z=z)


def _impl_contexts(g_pc: PolCtx, N, P, Np, Pp, upward: bool) -> PolCtx:
    """Context of the other side of rule (⇒) given the four moving groups.

    ``upward=False``: ``g_pc`` is the lower context [Θ,P' | Δ,N,P | Γ,N'] and the
    upper one is returned; ``upward=True`` goes the other way.
    """
    ty = dict(g_pc.all())

    def bind(names):
        return tuple((n, ty[n]) for n in names)

    if not upward:
        pc = g_pc.remove(*Pp, *N, *P, *Np)
        return PolCtx(pc.theta + bind(N), pc.delta + bind(Np) + bind(Pp), pc.gamma + bind(P))
    pc = g_pc.remove(*N, *Np, *Pp, *P)
    return PolCtx(pc.theta + bind(Pp), pc.delta + bind(N) + bind(P), pc.gamma + bind(Np))


def step_impl_down(th, g, a):
    """Goal Φ ⊢ ψ ⇒ φ in the lower context; subgoal ψ, Φ ⊢ φ in the upper one."""
    N, P, Np, Pp = (a.opt("names") or () for _ in range(4))
    if not isinstance(g.concl, Impl):
        raise _fail("impl-down", "shape", "goal must be an implication", found=show_formula(g.concl))
    for n in (*N, *P, *Np, *Pp):
        if g.pc.zone_of(n) is None:
            raise _fail("impl-down", "unbound-variable", f"{n} is not in the context")
    pc = _impl_contexts(g.pc, N, P, Np, Pp, upward=False)
    sub = Judgement(pc, (g.concl.ante,) + g.hyps, g.concl.cons)
    return [sub], lambda ds: node("impl-down", g, ds[0])


def step_impl_up(th, g, a):
    """Goal ψ, Φ ⊢ φ in the upper context; subgoal Φ ⊢ ψ ⇒ φ in the lower one."""
    N, P, Np, Pp = (a.opt("names") or () for _ in range(4))
    if not g.hyps:
        raise _fail("impl-up", "shape", "goal needs a head hypothesis to curry")
    for n in (*N, *P, *Np, *Pp):
        if g.pc.zone_of(n) is None:
            raise _fail("impl-up", "unbound-variable", f"{n} is not in the context")
    pc = _impl_contexts(g.pc, N, P, Np, Pp, upward=True)
    sub = Judgement(pc, g.hyps[1:], Impl(g.hyps[0], g.concl))
    return [sub], lambda ds: node("impl-up", g, ds[0])


def step_exists_down(th, g, a):
    """Goal [C, x] ψ(x), Φ ⊢ φ; subgoal [C] ∃x.ψ(x), Φ ⊢ φ."""
    x = a.get("var")
    binder = a.opt("var") or x
    pol, ty = _zone_split(g, x)
    if not g.hyps:
        raise _fail("exists-down", "shape", "goal needs the opened body as head hypothesis")
    body = subst_formula(g.hyps[0], dinat={x: Var(binder)}) if binder != x else g.hyps[0]
    sub = Judgement(g.pc.remove(x), (Exists(pol, binder, ty, body),) + g.hyps[1:], g.concl)
    return [sub], lambda ds: node("exists-down", g, ds[0], var=x)


def step_exists_up(th, g, a):
    """Goal [C] ∃x.ψ, Φ ⊢ φ; subgoal [C, x] ψ(x), Φ ⊢ φ."""
    if not g.hyps or not isinstance(g.hyps[0], Exists):
        raise _fail("exists-up", "shape", "head hypothesis must be an existential")
    q = g.hyps[0]
    x = a.opt("var") or _fresh(q.var, g)
    sub = Judgement(g.pc.extend(q.pol, x, q.ty),
                    (subst_formula(q.body, dinat={q.var: Var(x)}),) + g.hyps[1:], g.concl)
    return [sub], lambda ds: node("exists-up", g, ds[0], var=x)


def step_forall_down(th, g, a):
    """Goal [C] Φ ⊢ ∀x.φ; subgoal [C, x] Φ ⊢ φ(x)."""
    if not isinstance(g.concl, Forall):
        raise _fail("forall-down", "shape", "goal must be a universal", found=show_formula(g.concl))
    q = g.concl
    x = a.opt("var") or _fresh(q.var, g)
    if x in g.pc.names():
        raise _fail("forall-down", "name-clash", f"{x} is already bound in the context")
    sub = Judgement(g.pc.extend(q.pol, x, q.ty), g.hyps, subst_formula(q.body, dinat={q.var: Var(x)}))
    return [sub], lambda ds: node("forall-down", g, ds[0], var=x)


def step_forall_up(th, g, a):
    """Goal [C, x] Φ ⊢ φ(x); subgoal [C] Φ ⊢ ∀x.φ(x)."""
    x = a.get("var")
    pol, ty = _zone_split(g, x)
    sub = Judgement(g.pc.remove(x), g.hyps, Forall(pol, x, ty, g.concl))
    return [sub], lambda ds: node("forall-up", g, ds[0], var=x)


def step_rewrite(th, g, a):
    """Rewrite with an equation: ``rewrite NAME lr|rl concl|i (path) ((x t) ...)``."""
    name = a.get("var")
    direction = a.get("word")
    target = a.get("word")
    path = a.get("ints")
    inst = a.opt("bindings") or {}
    eq = th.eqs.get(name)
    if eq is None:
        raise _fail("termeq-rewrite", "unknown-equation", f"no equation named {name}")
    if direction not in ("lr", "rl"):
        raise _fail("termeq-rewrite", "bad-direction", "direction must be lr or rl")
    dst = subst_term(eq.rhs if direction == "lr" else eq.lhs, inst)
    formula = g.concl if target == "concl" else g.hyps[int(target)]
    new = replace_in_formula(formula, path, dst)
    if target == "concl":
        sub = Judgement(g.pc, g.hyps, new)
    else:
        t = int(target)
        sub = Judgement(g.pc, g.hyps[:t] + (new,) + g.hyps[t + 1:], g.concl)
    params = dict(eq=name, dir=direction, target=target, path=path, inst=inst)
    return [sub], lambda ds: node("termeq-rewrite", g, ds[0], **params)


# ---------------------------------------------------------------- derived rules


def _le_refl_node(g: Judgement, z: str) -> Derivation:
    ty = g.pc.type_of(z)
    x = _fresh("a", g)
    y = _fresh("b", g, {x})
    pc = g.pc.remove(z).extend(Pol.NEG, x, ty).extend(Pol.POS, y, ty)
    eq = Le(Var(x), Var(y), ty)
    prem = Judgement(pc, (eq,) + tuple(split_dinatural(f, z, x, y) for f in g.hyps), eq)
    return node("le-up", g, node("hyp", prem, index=0), z=z)


def rule_le_refl(th, g, a):
    """[Θ | Δ,z | Γ] Φ ⊢ z ≤ z."""
    c = g.concl
    if not (isinstance(c, Le) and isinstance(c.lhs, Var) and c.lhs == c.rhs):
        raise _fail("le_refl", "shape", "goal must be z <= z for a variable z", found=show_formula(c))
    z = c.lhs.name
    if g.pc.zone_of(z) is not Pol.DIN:
        raise _fail("le_refl", "naturality", f"{z} must be a dinatural variable")
    return [], lambda ds: _le_refl_node(g, z)


def rule_refl_term(th, g, a):
    """[Θ | Δ | Γ] Φ ⊢ t ≤ t with t over Δ only."""
    c = g.concl
    if not isinstance(c, Le):
        raise _fail("refl_term", "shape", "goal must be a directed equality", found=show_formula(c))
    t = c.lhs
    try:
        typecheck_term(th, g.pc.delta, t)
    except DfolError:
        raise _fail("refl_term", "naturality",
                    f"{show_term(t)} must only depend on dinatural variables") from None
    z = _fresh("z", g)
    mid = Judgement(g.pc.extend(Pol.DIN, z, c.ty), g.hyps, Le(Var(z), Var(z), c.ty))
    return [], lambda ds: node("reindex", g, _le_refl_node(mid, z), dinat={z: t})


def _le_generic(rule: str):
    """le_plus / le_minus / le_full / plain contraction, compiled through rule (⇒).

    Goal [..a..b..] a ≤ b, Φ ⊢ φ.  The subgoal replaces a and b by one
    variable z, placed in the zone the two variances leave available.
    """
    target_zone = {"le_plus": (Pol.DIN, Pol.POS, Pol.POS), "le_minus": (Pol.NEG, Pol.DIN, Pol.NEG),
                   "le_full": (Pol.DIN, Pol.DIN, Pol.DIN)}[rule]

    def apply(th, g, a):
        x, y, z = a.opt("var"), a.opt("var"), a.opt("var")
        if not g.hyps or not isinstance(g.hyps[0], Le):
            raise _fail(rule, "shape", "the head hypothesis must be a directed equality")
        h = g.hyps[0]
        x = x or getattr(h.lhs, "name", None)
        y = y or getattr(h.rhs, "name", None)
        if h.lhs != Var(x) or h.rhs != Var(y):
            raise _fail(rule, "shape", f"head hypothesis must be {x} <= {y}")
        za, zb, zz = target_zone
        if g.pc.zone_of(x) is not za or g.pc.zone_of(y) is not zb:
            raise _fail(rule, "naturality",
                        f"{rule} needs {x} in the {za.name.lower()} zone and {y} in the {zb.name.lower()} zone")
        ty = h.ty
        z = z or _fresh("z", g)
        rest = g.hyps[1:]
        base = g.pc.remove(x, y)
        ren = {x: Var(z), y: Var(z)}
        sub = Judgement(base.extend(zz, z, ty), tuple(subst_formula(f, dinat=ren) for f in rest),
                        subst_formula(g.concl, dinat=ren))
        c_ab = conj(rest)
        curried = Impl(c_ab, g.concl)
        all_names = base.all()
        s1 = Judgement(PolCtx(((x, ty),), all_names, ((y, ty),)), (h,), curried)
        try:
            wf_judgement(th, s1)
        except DfolError as e:
            raise _fail(rule, "naturality",
                        f"after currying, {x} must occur only negatively and {y} only positively: "
                        f"{e.diag.message}") from None

        def build(ds):
            d = ds[0]
            d = conj_hyps(sub, d)
            c_z = conj(sub.hyps)
            s0 = Judgement(PolCtx((), all_names + ((z, ty),), ()), (), Impl(c_z, sub.concl))
            d = node("impl-down", s0, d)
            if rule == "le_minus":
                d = node("reindex", s0, d)
            d = node("le-down", s1, d, a=x, b=y, z=z)
            top = Judgement(g.pc, (c_ab, h), g.concl)
            d = node("impl-up", top, d)
            mid = Judgement(g.pc, rest + (h,), g.concl)
            d = node("cut", mid, intro_conj(g.pc, rest), d, index=0)
            k = len(rest)
            return node("struct", g, d, sigma=tuple(range(1, k + 1)) + (0,))
        return [sub], build
    return apply


def rule_le_terms(th, g, a):
    """Goal η ≤ ρ, Φ ⊢ φ(η,ρ); args a b φ(a,b); subgoal [Θ | Δ,z | Γ] Φ ⊢ φ(z,z)."""
    x, y, phi = a.get("var"), a.get("var"), a.get("formula")
    z = a.opt("var") or _fresh("z", g, {x, y})
    if not g.hyps or not isinstance(g.hyps[0], Le):
        raise _fail("le_terms", "shape", "the head hypothesis must be a directed equality")
    h = g.hyps[0]
    rest = g.hyps[1:]
    if x in g.pc.names() or y in g.pc.names():
        raise _fail("le_terms", "name-clash", "the abstracted variables must be fresh")
    pc_ab = g.pc.extend(Pol.NEG, x, h.ty).extend(Pol.POS, y, h.ty)
    mid = Judgement(pc_ab, (Le(Var(x), Var(y), h.ty),) + rest, phi)
    want = subst_formula(phi, neg={x: h.lhs}, pos={y: h.rhs})
    if not formula_eq(th, g.pc, want, g.concl):
        raise _fail("le_terms", "shape", "goal is not the given formula at the two terms",
                    expected=show_formula(want), found=show_formula(g.concl))
    sub = Judgement(g.pc.extend(Pol.DIN, z, h.ty), rest, subst_formula(phi, dinat={x: Var(z), y: Var(z)}))

    def build(ds):
        d = node("le-down", mid, ds[0], a=x, b=y, z=z)
        return node("reindex", g, d, neg={x: h.lhs}, pos={y: h.rhs})
    return [sub], build


def _impl_named(rule: str, upward: bool):
    """impl_L: [Θ,N|Δ|Γ,P] ψ,Φ ⊢ φ  ⇔  [Θ|Δ,N,P|Γ] Φ ⊢ ψ⇒φ.
    impl_R: [Θ|Δ,N,P|Γ] ψ,Φ ⊢ φ  ⇔  [Θ,N|Δ|Γ,P] Φ ⊢ ψ⇒φ."""
    def apply(th, g, a):
        N, P = a.opt("names") or (), a.opt("names") or ()
        if rule == "impl_L":
            moves = dict(N=N, P=P, Np=(), Pp=())
        else:
            moves = dict(N=(), P=(), Np=P, Pp=N)
        step = step_impl_up if upward else step_impl_down
        subs, _ = step(th, g, Args([moves["N"], moves["P"], moves["Np"], moves["Pp"]]))
        tag = "impl-up" if upward else "impl-down"
        return subs, lambda ds: node(tag, g, ds[0])
    return apply


def rule_impl_varchange(th, g, a):
    """Goal [Θ,a | Δ | Γ] Φ ⊢ ψ(a)⇒φ; subgoal [Θ | Δ | Γ,a] ψ(a), Φ ⊢ φ."""
    x = a.get("var")
    if g.pc.zone_of(x) is not Pol.NEG or not isinstance(g.concl, Impl):
        raise _fail("impl_varchange", "shape", f"goal must conclude an implication with {x} negative")
    ty = g.pc.type_of(x)
    psi, phi = g.concl.ante, g.concl.cons
    mid = Judgement(g.pc.remove(x).extend(Pol.DIN, x, ty), (psi,) + g.hyps, phi)
    sub = Judgement(g.pc.remove(x).extend(Pol.POS, x, ty), (psi,) + g.hyps, phi)

    def build(ds):
        return node("impl-down", g, node("reindex", mid, ds[0]))
    return [sub], build


_ZONE_OF_RULE = {"plus": Pol.POS, "minus": Pol.NEG, "delta": Pol.DIN}


def _exists_term(kind: str):
    pol = _ZONE_OF_RULE[kind]

    def apply(th, g, a):
        t = a.get("term")
        q = g.concl
        if not isinstance(q, Exists) or q.pol is not pol:
            raise _fail(f"exists_term_{kind}", "shape", f"goal must be an existential of polarity {pol.value}",
                        found=show_formula(q))
        ctx = {Pol.POS: g.pc.pos_ctx(), Pol.NEG: g.pc.neg_ctx(), Pol.DIN: g.pc.delta}[pol]
        try:
            got = typecheck_term(th, ctx, t)
        except DfolError as e:
            raise _fail(f"exists_term_{kind}", "naturality",
                        f"witness {show_term(t)} is not typable in the allowed zones: {e.diag.message}") from None
        if got != q.ty:
            raise _fail(f"exists_term_{kind}", "type-mismatch", "witness has the wrong type")
        inst = subst_formula(q.body, dinat={q.var: t})
        sub = Judgement(g.pc, g.hyps, inst)
        x = _fresh(q.var, g, formula_free_vars(q.body))
        opened_body = subst_formula(q.body, dinat={q.var: Var(x)})
        hid = Judgement(g.pc, (q,), q)
        opened = Judgement(g.pc.extend(pol, x, q.ty), (opened_body,), q)
        back = Judgement(g.pc, (inst,), q)
        key = {Pol.POS: "pos", Pol.NEG: "neg", Pol.DIN: "dinat"}[pol]

        def build(ds):
            d = node("exists-down", opened, node("hyp", hid, index=0), var=x)
            d = node("reindex", back, d, **{key: {x: t}})
            return node("cut", g, ds[0], d, index=0)
        return [sub], build
    return apply


def _forall_term(kind: str):
    pol = _ZONE_OF_RULE[kind]

    def apply(th, g, a):
        t, q = a.get("term"), a.get("formula")
        if not isinstance(q, Forall) or q.pol is not pol:
            raise _fail(f"forall_term_{kind}", "shape", f"argument must be a universal of polarity {pol.value}")
        want = subst_formula(q.body, dinat={q.var: t})
        if not formula_eq(th, g.pc, want, g.concl):
            raise _fail(f"forall_term_{kind}", "shape", "goal is not the instance of the universal",
                        expected=show_formula(want), found=show_formula(g.concl))
        x = _fresh(q.var, g, formula_free_vars(q.body))
        opened = Judgement(g.pc.extend(pol, x, q.ty), g.hyps, subst_formula(q.body, dinat={q.var: Var(x)}))
        sub = Judgement(g.pc, g.hyps, q)
        key = {Pol.POS: "pos", Pol.NEG: "neg", Pol.DIN: "dinat"}[pol]

        def build(ds):
            d = node("forall-up", opened, ds[0], var=x)
            return node("reindex", g, d, **{key: {x: t}})
        return [sub], build
    return apply


def rule_naturalize(th, g, a):
    """Goal with y natural (zone + or -); subgoal with y dinatural.

    Sound because y already occurs with a single variance; the move goes
    through rule (⇒) with a trivial antecedent.
    """
    y, pol = a.get("var"), a.get("zone")
    if g.pc.zone_of(y) is not pol or pol is Pol.DIN:
        raise _fail("naturalize", "shape", f"{y} must be in the {pol.name.lower()} zone")
    ty = g.pc.type_of(y)
    sub = Judgement(g.pc.remove(y).extend(Pol.DIN, y, ty), g.hyps, g.concl)
    k = len(g.hyps)

    def build(ds):
        d = node("struct", Judgement(sub.pc, (TOP,) + g.hyps, g.concl), ds[0], sigma=tuple(range(1, k + 1)))
        d = node("impl-down", Judgement(g.pc, g.hyps, Impl(TOP, g.concl)), d)
        d = node("impl-up", Judgement(g.pc, (TOP,) + g.hyps, g.concl), d)
        return node("cut", g, node("top", Judgement(g.pc, (), TOP)), d, index=0)
    return [sub], build


# ---------------------------------------------------------------- registry and scripts


STEPS: dict[str, Callable] = {
    "hyp": step_hyp, "top": step_top, "axiom": step_axiom, "struct": step_struct,
    "have": step_have, "weaken": step_weaken, "reindex": step_reindex,
    "and-intro": step_and_intro, "and-elim-left": _and_elim("left"), "and-elim-right": _and_elim("right"),
    "le-down": step_le_down, "le-up": step_le_up, "impl-down": step_impl_down, "impl-up": step_impl_up,
    "exists-down": step_exists_down, "exists-up": step_exists_up,
    "forall-down": step_forall_down, "forall-up": step_forall_up, "rewrite": step_rewrite,
    # derived
    "refl_term": rule_refl_term, "le_refl": rule_le_refl,
    "le_plus": _le_generic("le_plus"), "le_minus": _le_generic("le_minus"), "le_full": _le_generic("le_full"),
    "le_terms": rule_le_terms,
    "impl_L": _impl_named("impl_L", False), "impl_L_up": _impl_named("impl_L", True),
    "impl_R": _impl_named("impl_R", False), "impl_R_up": _impl_named("impl_R", True),
    "impl_varchange": rule_impl_varchange,
    "exists_term_plus": _exists_term("plus"), "exists_term_minus": _exists_term("minus"),
    "exists_term_delta": _exists_term("delta"),
    "forall_term_plus": _forall_term("plus"), "forall_term_minus": _forall_term("minus"),
    "forall_term_delta": _forall_term("delta"),
    "naturalize": rule_naturalize,
}

DERIVED_RULES = (
    "refl_term", "le_refl", "le_plus", "le_minus", "le_full", "le_terms", "impl_L", "impl_R",
    "impl_varchange", "exists_term_plus", "exists_term_minus", "exists_term_delta",
    "forall_term_plus", "forall_term_minus", "forall_term_delta",
)


@dataclass(frozen=True)
class Step:
    name: str
    args: Any = ""
    line: int = 0


def apply_step(theory: Theory, goal: Judgement, step: Step) -> tuple[list[Judgement], Builder]:
    fn = STEPS.get(step.name)
    if fn is None:
        raise _fail(step.name, "unknown-step", f"line {step.line}: unknown step {step.name}")
    args = Args(step.args, step.line or 1)
    try:
        subs, build = fn(theory, goal, args)
        args.done()
    except ParseError as e:
        raise _fail(step.name, "bad-arguments", f"line {step.line}: {e}") from None
    except TacticError as e:
        e.diag.message = f"line {step.line}: {e.diag.message}" if step.line else e.diag.message
        raise
    # check the step locally, with its open subgoals standing in as axioms
    names = [f"$open{i}" for i in range(len(subs))]
    local = theory.with_axioms(dict(zip(names, subs)))
    diag = check_derivation(local, build([node("axiom", s, name=n) for n, s in zip(names, subs)]))
    if diag is not None:
        if step.line:
            diag.message = f"line {step.line}: {diag.message}"
        raise TacticError(diag)
    return subs, build


def run_script(theory: Theory, goal: Judgement, steps: Sequence[Step], check: bool = True) -> Derivation:
    """Assemble a derivation of ``goal`` from a linear script.

    Subgoals are solved depth-first, left to right.  With ``check`` the
    result is passed through the kernel and any rejection is raised.
    """
    pos = 0

    def solve(g: Judgement, path: tuple[int, ...]) -> Derivation:
        nonlocal pos
        if pos >= len(steps):
            raise TacticError(Diagnostic("script", "open-goal", "script ended with an unproved goal",
                                         path, found=show_judgement(g)))
        step = steps[pos]
        pos += 1
        subs, build = apply_step(theory, g, step)
        return build([solve(s, path + (i,)) for i, s in enumerate(subs)])

    d = solve(goal, ())
    if pos < len(steps):
        extra = steps[pos]
        raise TacticError(Diagnostic("script", "extra-steps",
                                     f"line {extra.line}: no goal left for step {extra.name}"))
    if check:
        diag = check_derivation(theory, d)
        if diag is not None:
            from .errors import KernelError
            raise KernelError(diag)
    return d


def elaborate(theory: Theory, rule: str, goal: Judgement, *args: Any) -> tuple[Derivation, Theory]:
    """Expand one rule application into primitive nodes.

    ``args`` is either one string in script syntax or already-parsed values.

    Its premises become axioms ``premise0, premise1, ...`` of the returned
    theory, so the result can be checked standalone.
    """
    raw = args[0] if len(args) == 1 and isinstance(args[0], str) else list(args)
    subs, build = apply_step(theory, goal, Step(rule, raw))
    extra = {f"premise{i}": s for i, s in enumerate(subs)}
    leaves = [node("axiom", s, name=f"premise{i}") for i, s in enumerate(subs)]
    return build(leaves), theory.with_axioms(extra)


def parse_steps(lines: Sequence[tuple[int, str]]) -> list[Step]:
    out = []
    for line, text in lines:
        text = text.strip()
        if not text:
            continue
        name, _, rest = text.partition(" ")
        out.append(Step(name, rest, line))
    return out


__all__ = [
    "Step", "STEPS", "DERIVED_RULES", "apply_step", "run_script", "elaborate", "parse_steps",
    "conj_hyps", "intro_conj", "proj_conj", "node",
]

_ = (Top, ZONES, ctx_names, variance_report, term_at, binders_along, formula_subterm)
