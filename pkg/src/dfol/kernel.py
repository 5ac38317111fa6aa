"""The proof-checking kernel: one check per primitive rule."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping

from .errors import Diagnostic, DfolError, KernelError
from .formulas import (
    Morphism, canonical_formula, formula_free_vars, judgement_alpha_eq, subst_formula,
    wf_formula, wf_judgement,
)
from .printer import show_formula, show_judgement, show_polctx, show_term
from .syntax import (
    And, Ctx, Exists, Forall, Formula, Impl, Judgement, Le, Pol, PolCtx, Pred, Term, Theory,
    Top, Var, ZONES, ctx_names,
)
from .terms import binders_along, decide_term_eq, replace_term_at, term_at, typecheck_term, subst_term

RULES = {
    "cut": 2, "axiom": 0, "struct": 1, "reindex": 1, "hyp": 0, "top": 0,
    "and-intro": 2, "and-elim-left": 1, "and-elim-right": 1,
    "le-down": 1, "le-up": 1, "impl-down": 1, "impl-up": 1,
    "exists-down": 1, "exists-up": 1, "forall-down": 1, "forall-up": 1,
    "termeq-rewrite": 1,
}


@dataclass(frozen=True)
class Derivation:
    """A rule application: tag, parameters, premise derivations and the claimed judgement."""

    rule: str
    claimed: Judgement
    premises: tuple["Derivation", ...] = ()
    params: Mapping[str, Any] = field(default_factory=dict)

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def nodes(self, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], "Derivation"]]:
        yield path, self
        for i, p in enumerate(self.premises):
            yield from p.nodes(path + (i,))

    def rules_used(self) -> set[str]:
        return {d.rule for _, d in self.nodes()}

    def render(self, indent: int = 0) -> str:
        """Indented tree, conclusion first."""
        ps = " ".join(f"{k}={_show_param(v)}" for k, v in self.params.items())
        line = "  " * indent + f"{show_judgement(self.claimed)}   by {self.rule}{' ' + ps if ps else ''}"
        return "\n".join([line] + [p.render(indent + 1) for p in self.premises])

    def to_json(self) -> dict[str, Any]:
        return {
            "rule": self.rule,
            "judgement": show_judgement(self.claimed),
            "params": {k: _show_param(v) for k, v in self.params.items()},
            "premises": [p.to_json() for p in self.premises],
        }


def _show_param(v: Any) -> str:
    if isinstance(v, Mapping):
        return "{" + ", ".join(f"{k}:{_show_param(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (tuple, list)):
        return "(" + " ".join(_show_param(x) for x in v) + ")"
    if isinstance(v, (Var,)) or type(v).__name__ in {"FnApp", "Bang", "Pair", "Proj1", "Proj2", "App", "Lam"}:
        return show_term(v)
    return str(v)


class _Reject(Exception):
    def __init__(self, reason: str, message: str, expected: str | None = None, found: str | None = None):
        super().__init__(message)
        self.reason, self.message, self.expected, self.found = reason, message, expected, found


def _feq(theory: Theory, ctx: Ctx, a: Formula, b: Formula) -> bool:
    if a == b:
        return True
    try:
        return canonical_formula(theory, ctx, a) == canonical_formula(theory, ctx, b)
    except (KeyError, TypeError, IndexError, DfolError):
        return False


def _same_ctx(rule: str, p: PolCtx, c: PolCtx) -> None:
    if not p.same_zones(c):
        raise _Reject("context-mismatch", f"{rule} keeps the context unchanged",
                      show_polctx(c), show_polctx(p))


def _hyps_eq(theory: Theory, ctx: Ctx, found: tuple, want: tuple, what: str) -> None:
    if len(found) != len(want):
        raise _Reject("hypotheses-mismatch", f"{what}: expected {len(want)} hypotheses, found {len(found)}",
                      ", ".join(map(show_formula, want)), ", ".join(map(show_formula, found)))
    for i, (f, w) in enumerate(zip(found, want)):
        if not _feq(theory, ctx, f, w):
            raise _Reject("hypotheses-mismatch", f"{what}: hypothesis {i} differs",
                          show_formula(w), show_formula(f))


def _concl_eq(theory: Theory, ctx: Ctx, found: Formula, want: Formula, what: str) -> None:
    if not _feq(theory, ctx, found, want):
        raise _Reject("conclusion-mismatch", what, show_formula(want), show_formula(found))


def _zone_names(pc: PolCtx, pol: Pol) -> set[str]:
    return set(ctx_names(pc.zone(pol)))


def _types(pc: PolCtx) -> dict[str, Any]:
    return dict(pc.all())


# ---------------------------------------------------------------- rule checks


def _cut(th: Theory, d: Derivation) -> None:
    c = d.claimed
    left, right = d.premises[0].claimed, d.premises[1].claimed
    _same_ctx("cut", left.pc, c.pc)
    _same_ctx("cut", right.pc, c.pc)
    ctx = c.pc.all()
    _concl_eq(th, ctx, right.concl, c.concl, "the second premise proves the conclusion")
    idx = d.params.get("index")
    cands = [idx] if idx is not None else range(len(right.hyps))
    for i in cands:
        if not 0 <= i < len(right.hyps):
            raise _Reject("bad-index", f"cut index {i} out of range")
        if not _feq(th, ctx, right.hyps[i], left.concl):
            if idx is not None:
                raise _Reject("cut-formula-mismatch", "the cut formula must be the first premise's conclusion",
                              show_formula(left.concl), show_formula(right.hyps[i]))
            continue
        want = right.hyps[:i] + left.hyps + right.hyps[i + 1:]
        try:
            _hyps_eq(th, ctx, c.hyps, want, "cut splices the hypotheses of the first premise")
            return
        except _Reject:
            if idx is not None:
                raise
    raise _Reject("cut-formula-mismatch", "no position of the second premise matches the cut")


def _axiom(th: Theory, d: Derivation) -> None:
    name = d.params.get("name")
    ax = th.axioms.get(name)
    if ax is None:
        raise _Reject("unknown-axiom", f"no axiom named {name}")
    if not judgement_alpha_eq(th, ax, d.claimed):
        raise _Reject("axiom-mismatch", f"claimed judgement is not an instance of axiom {name}",
                      show_judgement(ax), show_judgement(d.claimed))


def _struct(th: Theory, d: Derivation) -> None:
    c, p = d.claimed, d.premises[0].claimed
    _same_ctx("struct", p.pc, c.pc)
    sigma = tuple(d.params.get("sigma", ()))
    if any(not 0 <= k < len(c.hyps) for k in sigma):
        raise _Reject("bad-index", f"struct map {sigma} leaves the {len(c.hyps)} conclusion hypotheses")
    ctx = c.pc.all()
    _hyps_eq(th, ctx, p.hyps, tuple(c.hyps[k] for k in sigma), "premise hypotheses are indexed by the map")
    _concl_eq(th, ctx, p.concl, c.concl, "struct keeps the conclusion")


def _reindex(th: Theory, d: Derivation) -> None:
    c, p = d.claimed, d.premises[0].claimed
    neg, dinat, pos = (dict(d.params.get(k, {})) for k in ("neg", "dinat", "pos"))
    for m, pol in ((neg, Pol.NEG), (dinat, Pol.DIN), (pos, Pol.POS)):
        stray = set(m) - _zone_names(p.pc, pol)
        if stray:
            raise _Reject("reindex-bad-map",
                          f"{sorted(stray)[0]} is not a {pol.name.lower()} variable of the premise")
    mor = Morphism(p.pc, c.pc, neg, dinat, pos)
    try:
        mor.check(th)
    except DfolError as e:
        raise _Reject("reindex-ill-typed", e.diag.message, e.diag.expected, e.diag.found) from None
    ctx = c.pc.all()
    _hyps_eq(th, ctx, c.hyps, tuple(mor.apply(h) for h in p.hyps), "conclusion is the reindexed premise")
    _concl_eq(th, ctx, c.concl, mor.apply(p.concl), "conclusion is the reindexed premise")


def _hyp(th: Theory, d: Derivation) -> None:
    c = d.claimed
    i = d.params.get("index")
    if i is None:
        if any(_feq(th, c.pc.all(), h, c.concl) for h in c.hyps):
            return
        raise _Reject("not-a-hypothesis", "conclusion is not among the hypotheses", found=show_formula(c.concl))
    if not 0 <= i < len(c.hyps):
        raise _Reject("bad-index", f"hypothesis index {i} out of range")
    _concl_eq(th, c.pc.all(), c.concl, c.hyps[i], f"conclusion is hypothesis {i}")


def _top(th: Theory, d: Derivation) -> None:
    if not isinstance(d.claimed.concl, Top):
        raise _Reject("not-top", "conclusion must be top", "top", show_formula(d.claimed.concl))


def _and_intro(th: Theory, d: Derivation) -> None:
    c = d.claimed
    if not isinstance(c.concl, And):
        raise _Reject("shape", "conclusion must be a conjunction", found=show_formula(c.concl))
    ctx = c.pc.all()
    for p, part in zip(d.premises, (c.concl.left, c.concl.right)):
        _same_ctx("and-intro", p.claimed.pc, c.pc)
        _hyps_eq(th, ctx, p.claimed.hyps, c.hyps, "and-intro keeps hypotheses")
        _concl_eq(th, ctx, p.claimed.concl, part, "premises prove the conjuncts")


def _and_elim(side: int):
    def check(th: Theory, d: Derivation) -> None:
        c, p = d.claimed, d.premises[0].claimed
        _same_ctx("and-elim", p.pc, c.pc)
        ctx = c.pc.all()
        _hyps_eq(th, ctx, p.hyps, c.hyps, "and-elim keeps hypotheses")
        if not isinstance(p.concl, And):
            raise _Reject("shape", "premise must prove a conjunction", found=show_formula(p.concl))
        part = p.concl.left if side == 0 else p.concl.right
        _concl_eq(th, ctx, c.concl, part, "conclusion is a conjunct of the premise")
    return check


def _split_le_head(hyps: tuple, where: str) -> tuple[str, str, Any, tuple]:
    if not hyps or not isinstance(hyps[0], Le):
        raise _Reject("shape", f"{where} must start with a directed equality a <= b")
    h = hyps[0]
    if not isinstance(h.lhs, Var) or not isinstance(h.rhs, Var):
        raise _Reject("shape", f"{where}: both sides of the head equality must be variables",
                      found=show_formula(h))
    return h.lhs.name, h.rhs.name, h.ty, hyps[1:]


def _check_contractible(pc: PolCtx, a: str, b: str, ty, what: str) -> None:
    za, zb = pc.zone_of(a), pc.zone_of(b)
    if za is not Pol.NEG or zb is not Pol.POS:
        bad = a if za is not Pol.NEG else b
        zone = {Pol.NEG: "negative", Pol.DIN: "dinatural", Pol.POS: "positive", None: "unbound"}[pc.zone_of(bad)]
        raise _Reject("naturality",
                      f"{what}: {bad} is {zone}; the equality {a} <= {b} can only be contracted "
                      f"when {a} is a negative and {b} a positive variable",
                      f"[..., {a} | ... | ..., {b}]", show_polctx(pc))
    if pc.type_of(a) != ty or pc.type_of(b) != ty:
        raise _Reject("type-mismatch", f"{a} and {b} must both have the type of the equality")


def _le_down(th: Theory, d: Derivation) -> None:
    c, p = d.claimed, d.premises[0].claimed
    a, b, ty, rest = _split_le_head(c.hyps, "conclusion hypotheses")
    if d.params.get("a", a) != a or d.params.get("b", b) != b:
        raise _Reject("shape", f"head equality is {a} <= {b}, not the requested one")
    _check_contractible(c.pc, a, b, ty, "le-down")
    for i, h in enumerate(rest):
        if {a, b} & formula_free_vars(h):
            raise _Reject("naturality",
                          f"hypothesis {i + 1} mentions a contracted variable; the remaining "
                          "hypotheses must not depend on either side of the equality",
                          found=show_formula(h))
    extra = set(p.pc.names()) - set(c.pc.names())
    z = d.params.get("z") or (extra.pop() if len(extra) == 1 else None)
    if z is None or p.pc.zone_of(z) is not Pol.DIN:
        raise _Reject("context-mismatch", "premise must add exactly one dinatural variable",
                      found=show_polctx(p.pc))
    want_pc = c.pc.remove(a, b).extend(Pol.DIN, z, ty)
    if z in c.pc.remove(a, b).names() or not p.pc.same_zones(want_pc):
        raise _Reject("context-mismatch", "premise context must replace the pair by one dinatural variable",
                      show_polctx(want_pc), show_polctx(p.pc))
    ctx = p.pc.all() + c.pc.all()
    _hyps_eq(th, ctx, p.hyps, rest, "premise keeps the remaining hypotheses")
    want = subst_formula(c.concl, neg={a: Var(z)}, pos={b: Var(z)})
    _concl_eq(th, ctx, p.concl, want, "premise conclusion is the contracted conclusion")


def _le_up(th: Theory, d: Derivation) -> None:
    c, p = d.claimed, d.premises[0].claimed
    a, b, ty, rest = _split_le_head(p.hyps, "premise hypotheses")
    _check_contractible(p.pc, a, b, ty, "le-up")
    extra = set(c.pc.names()) - set(p.pc.names())
    z = d.params.get("z") or (extra.pop() if len(extra) == 1 else None)
    want_pc = p.pc.remove(a, b).extend(Pol.DIN, z, ty) if z else None
    if z is None or z in p.pc.remove(a, b).names() or not c.pc.same_zones(want_pc):
        raise _Reject("context-mismatch", "conclusion context must replace the pair by one dinatural variable",
                      show_polctx(want_pc) if want_pc else None, show_polctx(c.pc))
    ctx = p.pc.all() + c.pc.all()
    m = dict(neg={a: Var(z)}, pos={b: Var(z)})
    _hyps_eq(th, ctx, c.hyps, tuple(subst_formula(h, **m) for h in rest),
             "conclusion hypotheses are the contracted premise hypotheses")
    _concl_eq(th, ctx, c.concl, subst_formula(p.concl, **m), "conclusion is the contracted premise conclusion")


def _impl_match(th: Theory, top: Judgement, bot: Judgement) -> None:
    """``top``: [Θ,N | Δ,N',P' | Γ,P] ψ,Φ ⊢ φ and ``bot``: [Θ,P' | Δ,N,P | Γ,N'] Φ ⊢ ψ⇒φ."""
    t_th, t_de, t_ga = (_zone_names(top.pc, z) for z in ZONES)
    b_th, b_de, b_ga = (_zone_names(bot.pc, z) for z in ZONES)
    ty_t, ty_b = _types(top.pc), _types(bot.pc)
    for n in set(ty_t) & set(ty_b):
        if ty_t[n] != ty_b[n]:
            raise _Reject("context-mismatch", f"{n} changes type across the rule")
    N, P = t_th - b_th, t_ga - b_ga
    Pp, Np = b_th - t_th, b_ga - t_ga
    delta = t_de & b_de
    if t_de - delta != Np | Pp or b_de - delta != N | P:
        raise _Reject("context-mismatch",
                      "variables must move between the natural zones and delta exactly as the rule prescribes",
                      found=f"{show_polctx(top.pc)} / {show_polctx(bot.pc)}")
    if not isinstance(bot.concl, Impl):
        raise _Reject("shape", "the lower judgement must conclude an implication", found=show_formula(bot.concl))
    psi, phi = bot.concl.ante, bot.concl.cons
    if not top.hyps:
        raise _Reject("shape", "the upper judgement must have the antecedent as head hypothesis")
    ctx = top.pc.all() + bot.pc.all()
    _concl_eq(th, ctx, top.hyps[0], psi, "head hypothesis of the upper judgement is the antecedent")
    _hyps_eq(th, ctx, top.hyps[1:], bot.hyps, "remaining hypotheses agree")
    _concl_eq(th, ctx, top.concl, phi, "upper conclusion is the consequent")

    def sub(names):
        return tuple((n, ty_t.get(n, ty_b.get(n))) for n in sorted(names))

    dctx = tuple((n, ty_t[n]) for n in ctx_names(top.pc.delta) if n in delta)
    ante_pc = PolCtx(sub(N | Np), dctx, sub(P | Pp))
    rest_pc = PolCtx(sub(t_th & b_th | N | Pp), dctx, sub(t_ga & b_ga | P | Np))
    try:
        wf_formula(th, ante_pc, psi)
    except DfolError as e:
        raise _Reject("side-condition", f"antecedent must be a formula in {show_polctx(ante_pc)}: {e.diag.message}") from None
    for f in bot.hyps + (phi,):
        try:
            wf_formula(th, rest_pc, f)
        except DfolError as e:
            raise _Reject("side-condition",
                          f"{show_formula(f)} must be a formula in {show_polctx(rest_pc)}: {e.diag.message}") from None


def _impl_down(th: Theory, d: Derivation) -> None:
    _impl_match(th, d.premises[0].claimed, d.claimed)


def _impl_up(th: Theory, d: Derivation) -> None:
    _impl_match(th, d.claimed, d.premises[0].claimed)


def _bound_var(small: PolCtx, big: PolCtx, hint: str | None) -> tuple[str, Pol, Any]:
    extra = set(big.names()) - set(small.names())
    if hint is not None and hint not in extra:
        raise _Reject("context-mismatch", f"{hint} is not the variable introduced by the rule")
    if len(extra) != 1 or not big.remove(*extra).same_zones(small):
        raise _Reject("context-mismatch", "contexts must differ by exactly one variable",
                      show_polctx(small), show_polctx(big))
    x = extra.pop()
    return x, big.zone_of(x), big.type_of(x)


def _exists_match(th: Theory, hid: Judgement, opened: Judgement, hint: str | None) -> None:
    """``hid``: [C] ∃x.ψ, Φ ⊢ φ   ``opened``: [C, x] ψ(x), Φ ⊢ φ."""
    x, pol, ty = _bound_var(hid.pc, opened.pc, hint)
    if not hid.hyps or not isinstance(hid.hyps[0], Exists):
        raise _Reject("shape", "head hypothesis must be an existential")
    q = hid.hyps[0]
    if q.pol is not pol or q.ty != ty:
        raise _Reject("polarity-mismatch",
                      f"the quantifier binds a {q.pol.name.lower()} variable, {x} is {pol.name.lower()}")
    ctx = opened.pc.all()
    body = subst_formula(q.body, dinat={q.var: Var(x)})
    if not opened.hyps:
        raise _Reject("shape", "opened judgement needs the body as head hypothesis")
    _concl_eq(th, ctx, opened.hyps[0], body, "head hypothesis is the opened body")
    _hyps_eq(th, ctx, opened.hyps[1:], hid.hyps[1:], "other hypotheses are untouched")
    _concl_eq(th, ctx, opened.concl, hid.concl, "conclusion is untouched")


def _forall_match(th: Theory, closed: Judgement, opened: Judgement, hint: str | None) -> None:
    """``closed``: [C] Φ ⊢ ∀x.φ   ``opened``: [C, x] Φ ⊢ φ(x)."""
    x, pol, ty = _bound_var(closed.pc, opened.pc, hint)
    q = closed.concl
    if not isinstance(q, Forall):
        raise _Reject("shape", "conclusion must be a universal", found=show_formula(q))
    if q.pol is not pol or q.ty != ty:
        raise _Reject("polarity-mismatch",
                      f"the quantifier binds a {q.pol.name.lower()} variable, {x} is {pol.name.lower()}")
    ctx = opened.pc.all()
    _hyps_eq(th, ctx, opened.hyps, closed.hyps, "hypotheses are untouched")
    _concl_eq(th, ctx, opened.concl, subst_formula(q.body, dinat={q.var: Var(x)}), "opened conclusion")


def formula_subterm(phi: Formula, path: tuple[int, ...], ctx: Ctx) -> tuple[Formula, int, tuple[int, ...], Ctx]:
    """Walk ``path`` to an atom; return (atom, side, term path, local context)."""
    i = 0
    while not isinstance(phi, (Le, Pred)):
        if i >= len(path):
            raise IndexError("path stops before reaching an atom")
        k = path[i]
        if isinstance(phi, (And, Impl)) and k in (0, 1):
            phi = (phi.left if isinstance(phi, And) else phi.ante) if k == 0 else \
                (phi.right if isinstance(phi, And) else phi.cons)
        elif isinstance(phi, (Exists, Forall)) and k == 0:
            ctx = ctx + ((phi.var, phi.ty),)
            phi = phi.body
        else:
            raise IndexError(f"bad path step {k}")
        i += 1
    if i >= len(path) or path[i] not in (0, 1):
        raise IndexError("path must choose a side of the atom")
    return phi, path[i], tuple(path[i + 1:]), ctx


def replace_in_formula(phi: Formula, path: tuple[int, ...], new: Term) -> Formula:
    k, rest = path[0], path[1:]
    if isinstance(phi, And):
        return And(replace_in_formula(phi.left, rest, new), phi.right) if k == 0 else \
            And(phi.left, replace_in_formula(phi.right, rest, new))
    if isinstance(phi, Impl):
        return Impl(replace_in_formula(phi.ante, rest, new), phi.cons) if k == 0 else \
            Impl(phi.ante, replace_in_formula(phi.cons, rest, new))
    if isinstance(phi, (Exists, Forall)):
        return type(phi)(phi.pol, phi.var, phi.ty, replace_in_formula(phi.body, rest, new))
    if isinstance(phi, Le):
        return Le(replace_term_at(phi.lhs, rest, new), phi.rhs, phi.ty) if k == 0 else \
            Le(phi.lhs, replace_term_at(phi.rhs, rest, new), phi.ty)
    if isinstance(phi, Pred):
        return Pred(phi.name, replace_term_at(phi.neg, rest, new), phi.pos) if k == 0 else \
            Pred(phi.name, phi.neg, replace_term_at(phi.pos, rest, new))
    raise IndexError("path leaves the formula")


def _termeq(th: Theory, d: Derivation) -> None:
    c, p = d.claimed, d.premises[0].claimed
    _same_ctx("termeq-rewrite", p.pc, c.pc)
    name = d.params.get("eq")
    eq = th.eqs.get(name)
    if eq is None:
        raise _Reject("unknown-equation", f"no equation named {name}")
    direction = d.params.get("dir", "lr")
    target = d.params.get("target", "concl")
    path = tuple(d.params.get("path", ()))
    inst = dict(d.params.get("inst", {}))
    if set(inst) != set(ctx_names(eq.ctx)):
        raise _Reject("bad-instance", f"instance must assign exactly {list(ctx_names(eq.ctx))}")
    formula = c.concl if target == "concl" else c.hyps[int(target)]
    try:
        atom, side, tpath, lctx = formula_subterm(formula, path, c.pc.all())
        term = (atom.lhs if side == 0 else atom.rhs) if isinstance(atom, Le) else \
            (atom.neg if side == 0 else atom.pos)
        lctx = lctx + tuple(binders_along(term, tpath))
        here = term_at(term, tpath)
    except IndexError as e:
        raise _Reject("bad-position", str(e)) from None
    for v, vty in eq.ctx:
        try:
            got = typecheck_term(th, lctx, inst[v])
        except DfolError as e:
            raise _Reject("bad-instance", e.diag.message) from None
        if got != vty:
            raise _Reject("bad-instance", f"instance of {v} has the wrong type")
    src, dst = (eq.lhs, eq.rhs) if direction == "lr" else (eq.rhs, eq.lhs)
    src, dst = subst_term(src, inst), subst_term(dst, inst)
    try:
        ok = decide_term_eq(th, lctx, here, src, eq.ty)
    except DfolError as e:
        raise _Reject("bad-position", e.diag.message) from None
    if not ok:
        raise _Reject("rewrite-mismatch", "subterm at the position is not an instance of the equation side",
                      show_term(src), show_term(here))
    rewritten = replace_in_formula(formula, path, dst)
    want_hyps = c.hyps if target == "concl" else \
        c.hyps[:int(target)] + (rewritten,) + c.hyps[int(target) + 1:]
    want_concl = rewritten if target == "concl" else c.concl
    ctx = c.pc.all()
    _hyps_eq(th, ctx, p.hyps, want_hyps, "premise is the rewritten judgement")
    _concl_eq(th, ctx, p.concl, want_concl, "premise is the rewritten judgement")


_CHECKS = {
    "cut": _cut, "axiom": _axiom, "struct": _struct, "reindex": _reindex, "hyp": _hyp, "top": _top,
    "and-intro": _and_intro, "and-elim-left": _and_elim(0), "and-elim-right": _and_elim(1),
    "le-down": _le_down, "le-up": _le_up, "impl-down": _impl_down, "impl-up": _impl_up,
    "exists-down": lambda th, d: _exists_match(th, d.premises[0].claimed, d.claimed, d.params.get("var")),
    "exists-up": lambda th, d: _exists_match(th, d.claimed, d.premises[0].claimed, d.params.get("var")),
    "forall-down": lambda th, d: _forall_match(th, d.claimed, d.premises[0].claimed, d.params.get("var")),
    "forall-up": lambda th, d: _forall_match(th, d.premises[0].claimed, d.claimed, d.params.get("var")),
    "termeq-rewrite": _termeq,
}


def check_node(theory: Theory, d: Derivation, path: tuple[int, ...] = ()) -> Diagnostic | None:
    """Check one rule application, assuming nothing about its premises."""
    if d.rule not in RULES:
        return Diagnostic(d.rule, "unknown-rule", f"unknown rule {d.rule}", path)
    if len(d.premises) != RULES[d.rule]:
        return Diagnostic(d.rule, "arity", f"{d.rule} takes {RULES[d.rule]} premises, got {len(d.premises)}", path)
    try:
        wf_judgement(theory, d.claimed)
    except DfolError as e:
        return Diagnostic(d.rule, "ill-formed-judgement", e.diag.message, path,
                          found=show_judgement(d.claimed))
    try:
        _CHECKS[d.rule](theory, d)
    except _Reject as r:
        return Diagnostic(d.rule, r.reason, r.message, path, r.expected, r.found)
    return None


def check_derivation(theory: Theory, d: Derivation) -> Diagnostic | None:
    """None if every node is a correct rule application, else the first failure (pre-order)."""
    for path, node in d.nodes():
        diag = check_node(theory, node, path)
        if diag is not None:
            return diag
    return None


def assert_derivation(theory: Theory, d: Derivation) -> None:
    diag = check_derivation(theory, d)
    if diag is not None:
        raise KernelError(diag)


__all__ = [
    "RULES", "Derivation", "check_node", "check_derivation", "assert_derivation",
    "formula_subterm", "replace_in_formula",
]

_ = (Pred,)
