"""Pretty-printing in the ASCII surface syntax, plus a unicode display mode."""

from __future__ import annotations

from .syntax import (
    And, App, Arrow, Bang, Base, Exists, FnApp, Formula, Impl, Judgement, Lam, Le,
    Pair, Pol, PolCtx, Pred, Prod, Proj1, Proj2, Term, Top, Type, Unit, Var, ZONES,
)

_QUANT_SUFFIX = {Pol.NEG: "-", Pol.DIN: "d", Pol.POS: "+"}


def show_type(ty: Type | None) -> str:
    if ty is None:
        return "?"
    if isinstance(ty, Base):
        return ty.name
    if isinstance(ty, Unit):
        return "unit"
    if isinstance(ty, Prod):
        return f"(* {show_type(ty.left)} {show_type(ty.right)})"
    if isinstance(ty, Arrow):
        return f"(-> {show_type(ty.dom)} {show_type(ty.cod)})"
    raise TypeError(f"not a type: {ty!r}")


def show_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Bang):
        return "!"
    if isinstance(t, FnApp):
        return f"({t.fn} {show_term(t.arg)})"
    if isinstance(t, Pair):
        return f"(pair {show_term(t.left)} {show_term(t.right)})"
    if isinstance(t, Proj1):
        return f"(pi1 {show_term(t.arg)})"
    if isinstance(t, Proj2):
        return f"(pi2 {show_term(t.arg)})"
    if isinstance(t, App):
        return f"(@ {show_term(t.fun)} {show_term(t.arg)})"
    if isinstance(t, Lam):
        return f"(lam {t.var} {show_type(t.ty)} {show_term(t.body)})"
    raise TypeError(f"not a term: {t!r}")


def show_formula(phi: Formula) -> str:
    if isinstance(phi, Top):
        return "top"
    if isinstance(phi, And):
        return f"(and {show_formula(phi.left)} {show_formula(phi.right)})"
    if isinstance(phi, Impl):
        return f"(impl {show_formula(phi.ante)} {show_formula(phi.cons)})"
    if isinstance(phi, Le):
        return f"(le {show_term(phi.lhs)} {show_term(phi.rhs)} : {show_type(phi.ty)})"
    if isinstance(phi, Pred):
        return f"(pred {phi.name} {show_term(phi.neg)} {show_term(phi.pos)})"
    kw = "exists" if isinstance(phi, Exists) else "forall"
    return (f"({kw}{_QUANT_SUFFIX[phi.pol]} {phi.var} : {show_type(phi.ty)} "
            f"{show_formula(phi.body)})")


def show_ctx(ctx) -> str:
    return ", ".join(f"{n} : {show_type(t)}" for n, t in ctx)


def show_polctx(pc: PolCtx) -> str:
    parts = [show_ctx(pc.zone(p)) for p in ZONES]
    return "[" + " ".join(" | ".join(parts).split()) + "]"


def show_judgement(j: Judgement) -> str:
    hyps = ", ".join(show_formula(h) for h in j.hyps)
    sep = " " if hyps else ""
    return f"{show_polctx(j.pc)} {hyps}{sep}|- {show_formula(j.concl)}"


# ---------------------------------------------------------------- unicode display

_OVERLINE = "̅"


def _u_type(ty: Type) -> str:
    if isinstance(ty, Base):
        return ty.name
    if isinstance(ty, Unit):
        return "⊤"
    if isinstance(ty, Prod):
        return f"({_u_type(ty.left)} × {_u_type(ty.right)})"
    return f"({_u_type(ty.dom)} ⇒ {_u_type(ty.cod)})"


def _u_term(t: Term, bar: frozenset[str]) -> str:
    if isinstance(t, Var):
        return "".join(c + _OVERLINE for c in t.name) if t.name in bar else t.name
    if isinstance(t, Bang):
        return "!"
    if isinstance(t, FnApp):
        return f"{t.fn}({_u_term(t.arg, bar)})"
    if isinstance(t, Pair):
        return f"⟨{_u_term(t.left, bar)}, {_u_term(t.right, bar)}⟩"
    if isinstance(t, Proj1):
        return f"π₁({_u_term(t.arg, bar)})"
    if isinstance(t, Proj2):
        return f"π₂({_u_term(t.arg, bar)})"
    if isinstance(t, App):
        return f"({_u_term(t.fun, bar)} · {_u_term(t.arg, bar)})"
    return f"(λ{t.var}:{_u_type(t.ty)}. {_u_term(t.body, bar - {t.var})})"


def _u_formula(phi: Formula, dinat: frozenset[str], positive: bool) -> str:
    neg_bar = dinat if positive else frozenset()
    pos_bar = frozenset() if positive else dinat
    if isinstance(phi, Top):
        return "⊤"
    if isinstance(phi, And):
        return f"({_u_formula(phi.left, dinat, positive)} ∧ {_u_formula(phi.right, dinat, positive)})"
    if isinstance(phi, Impl):
        return f"({_u_formula(phi.ante, dinat, not positive)} ⇒ {_u_formula(phi.cons, dinat, positive)})"
    if isinstance(phi, Le):
        return f"{_u_term(phi.lhs, neg_bar)} ≤ {_u_term(phi.rhs, pos_bar)}"
    if isinstance(phi, Pred):
        return f"{phi.name}({_u_term(phi.neg, neg_bar)} | {_u_term(phi.pos, pos_bar)})"
    q = "∃" if isinstance(phi, Exists) else "∀"
    inner = dinat | {phi.var} if phi.pol is Pol.DIN else dinat - {phi.var}
    return f"{q}{phi.pol.symbol}{phi.var}:{_u_type(phi.ty)}. {_u_formula(phi.body, inner, positive)}"


def show_formula_unicode(phi: Formula, pc: PolCtx | None = None) -> str:
    """Mathematical notation; negative occurrences of dinatural variables get an overline."""
    dinat = frozenset(n for n, _ in pc.delta) if pc else frozenset()
    return _u_formula(phi, dinat, True)


def show_judgement_unicode(j: Judgement) -> str:
    zones = [", ".join(f"{n}:{_u_type(t)}" for n, t in j.pc.zone(p)) or "·" for p in ZONES]
    hyps = ", ".join(show_formula_unicode(h, j.pc) for h in j.hyps)
    return f"[{' | '.join(zones)}] {hyps}{' ' if hyps else ''}⊢ {show_formula_unicode(j.concl, j.pc)}"
