"""Typing, substitution and beta-eta normalization of terms."""

from __future__ import annotations

import itertools
from typing import Callable, Mapping

from .errors import Diagnostic, TypeCheckError
from .syntax import (
    App, Arrow, BANG, Bang, Base, Ctx, Equation, FnApp, Lam, Pair, Prod, Proj1, Proj2,
    Term, Theory, Type, Unit, Var, ctx_lookup, fresh_name, term_free_vars, type_bases,
)


def _fail(code: str, msg: str, path: tuple[int, ...]) -> TypeCheckError:
    return TypeCheckError(Diagnostic(rule="typing", reason=code, message=msg, path=path))


def check_type(theory: Theory, ty: Type) -> None:
    missing = type_bases(ty) - set(theory.bases)
    if missing:
        raise _fail("symbol-not-in-signature", f"unknown base type {sorted(missing)[0]}", ())


def check_ctx(theory: Theory, ctx: Ctx) -> None:
    seen = set()
    for name, ty in ctx:
        if name in seen:
            raise _fail("duplicate-variable", f"variable {name} bound twice", ())
        seen.add(name)
        check_type(theory, ty)


def typecheck_term(theory: Theory, ctx: Ctx, t: Term, _path: tuple[int, ...] = ()) -> Type:
    """Return the unique type of ``t`` in ``ctx`` or raise TypeCheckError."""
    from .printer import show_type

    if isinstance(t, Var):
        ty = ctx_lookup(ctx, t.name)
        if ty is None:
            raise _fail("unbound-variable", f"variable {t.name} is not in scope", _path)
        return ty
    if isinstance(t, Bang):
        return Unit()
    if isinstance(t, FnApp):
        sig = theory.funcs.get(t.fn)
        if sig is None:
            raise _fail("symbol-not-in-signature", f"unknown function symbol {t.fn}", _path)
        got = typecheck_term(theory, ctx, t.arg, _path + (0,))
        if got != sig[0]:
            raise _fail("type-mismatch",
                        f"{t.fn} expects {show_type(sig[0])}, got {show_type(got)}", _path + (0,))
        return sig[1]
    if isinstance(t, Pair):
        return Prod(typecheck_term(theory, ctx, t.left, _path + (0,)),
                    typecheck_term(theory, ctx, t.right, _path + (1,)))
    if isinstance(t, (Proj1, Proj2)):
        got = typecheck_term(theory, ctx, t.arg, _path + (0,))
        if not isinstance(got, Prod):
            raise _fail("type-mismatch", f"projection from non-product {show_type(got)}", _path + (0,))
        return got.left if isinstance(t, Proj1) else got.right
    if isinstance(t, App):
        fty = typecheck_term(theory, ctx, t.fun, _path + (0,))
        if not isinstance(fty, Arrow):
            raise _fail("type-mismatch", f"application of non-function {show_type(fty)}", _path + (0,))
        aty = typecheck_term(theory, ctx, t.arg, _path + (1,))
        if aty != fty.dom:
            raise _fail("type-mismatch",
                        f"argument of type {show_type(aty)}, expected {show_type(fty.dom)}", _path + (1,))
        return fty.cod
    if isinstance(t, Lam):
        check_type(theory, t.ty)
        body = typecheck_term(theory, ctx + ((t.var, t.ty),), t.body, _path + (0,))
        return Arrow(t.ty, body)
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------- substitution


def subst_term(t: Term, sub: Mapping[str, Term]) -> Term:
    """Simultaneous capture-avoiding substitution."""
    if not sub:
        return t
    if isinstance(t, Var):
        return sub.get(t.name, t)
    if isinstance(t, Bang):
        return t
    if isinstance(t, FnApp):
        return FnApp(t.fn, subst_term(t.arg, sub))
    if isinstance(t, Pair):
        return Pair(subst_term(t.left, sub), subst_term(t.right, sub))
    if isinstance(t, Proj1):
        return Proj1(subst_term(t.arg, sub))
    if isinstance(t, Proj2):
        return Proj2(subst_term(t.arg, sub))
    if isinstance(t, App):
        return App(subst_term(t.fun, sub), subst_term(t.arg, sub))
    if isinstance(t, Lam):
        inner = {k: v for k, v in sub.items() if k != t.var}
        body_fv = term_free_vars(t.body) - {t.var}
        inner = {k: v for k, v in inner.items() if k in body_fv}
        if not inner:
            return t
        range_fv = set().union(*(term_free_vars(v) for v in inner.values()))
        var = t.var
        if var in range_fv:
            var = fresh_name(t.var, range_fv | body_fv | set(inner))
            inner[t.var] = Var(var)
        return Lam(var, t.ty, subst_term(t.body, inner))
    raise TypeError(f"not a term: {t!r}")


def rename_term(t: Term, ren: Mapping[str, str]) -> Term:
    return subst_term(t, {k: Var(v) for k, v in ren.items()})


# ---------------------------------------------------------------- normalization by evaluation


def _reflect(ty: Type, neutral: Term, theory: Theory, fresh: Callable[[], str]):
    if isinstance(ty, Unit):
        return None
    if isinstance(ty, Prod):
        return (_reflect(ty.left, Proj1(neutral), theory, fresh),
                _reflect(ty.right, Proj2(neutral), theory, fresh))
    if isinstance(ty, Arrow):
        return lambda v: _reflect(ty.cod, App(neutral, _reify(ty.dom, v, theory, fresh)), theory, fresh)
    return neutral


def _reify(ty: Type, v, theory: Theory, fresh: Callable[[], str]) -> Term:
    if isinstance(ty, Unit):
        return BANG
    if isinstance(ty, Prod):
        return Pair(_reify(ty.left, v[0], theory, fresh), _reify(ty.right, v[1], theory, fresh))
    if isinstance(ty, Arrow):
        x = fresh()
        return Lam(x, ty.dom, _reify(ty.cod, v(_reflect(ty.dom, Var(x), theory, fresh)), theory, fresh))
    return v


def _eval(t: Term, env: dict, theory: Theory, fresh: Callable[[], str]):
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Bang):
        return None
    if isinstance(t, FnApp):
        dom, cod = theory.funcs[t.fn]
        arg = _reify(dom, _eval(t.arg, env, theory, fresh), theory, fresh)
        return _reflect(cod, FnApp(t.fn, arg), theory, fresh)
    if isinstance(t, Pair):
        return (_eval(t.left, env, theory, fresh), _eval(t.right, env, theory, fresh))
    if isinstance(t, Proj1):
        return _eval(t.arg, env, theory, fresh)[0]
    if isinstance(t, Proj2):
        return _eval(t.arg, env, theory, fresh)[1]
    if isinstance(t, App):
        return _eval(t.fun, env, theory, fresh)(_eval(t.arg, env, theory, fresh))
    if isinstance(t, Lam):
        return lambda v: _eval(t.body, {**env, t.var: v}, theory, fresh)
    raise TypeError(f"not a term: {t!r}")


def canonical_binders(t: Term, depth: int = 0, ren: Mapping[str, str] | None = None) -> Term:
    """Rename lambda binders to depth-indexed names so alpha-equal terms coincide."""
    ren = ren or {}
    if isinstance(t, Var):
        return Var(ren.get(t.name, t.name))
    if isinstance(t, Lam):
        x = f"${depth}"
        return Lam(x, t.ty, canonical_binders(t.body, depth + 1, {**ren, t.var: x}))
    if isinstance(t, Bang):
        return t
    if isinstance(t, FnApp):
        return FnApp(t.fn, canonical_binders(t.arg, depth, ren))
    if isinstance(t, Pair):
        return Pair(canonical_binders(t.left, depth, ren), canonical_binders(t.right, depth, ren))
    if isinstance(t, Proj1):
        return Proj1(canonical_binders(t.arg, depth, ren))
    if isinstance(t, Proj2):
        return Proj2(canonical_binders(t.arg, depth, ren))
    if isinstance(t, App):
        return App(canonical_binders(t.fun, depth, ren), canonical_binders(t.arg, depth, ren))
    raise TypeError(f"not a term: {t!r}")


def normalize(theory: Theory, ctx: Ctx, t: Term, ty: Type) -> Term:
    """Beta-eta-long normal form with surjective pairing and the unit law.

    Bound variables of the result are named ``$0, $1, ...`` by depth, so
    two terms are convertible iff their normal forms are equal.
    Equations of the theory are not used.
    """
    counter = itertools.count()

    def fresh() -> str:
        return f"$n{next(counter)}"

    env = {}
    for name, vty in ctx:
        env[name] = _reflect(vty, Var(name), theory, fresh)
    value = _eval(t, env, theory, fresh)
    return canonical_binders(_reify(ty, value, theory, fresh))


def decide_term_eq(theory: Theory, ctx: Ctx, s: Term, t: Term, at: Type) -> bool:
    """Convertibility of ``s`` and ``t`` at type ``at``.

    Raises TypeCheckError if either side does not have type ``at``.
    """
    from .printer import show_type

    for side, term in (("left", s), ("right", t)):
        got = typecheck_term(theory, ctx, term)
        if got != at:
            raise _fail("type-mismatch", f"{side} side has type {show_type(got)}, not {show_type(at)}", ())
    return normalize(theory, ctx, s, at) == normalize(theory, ctx, t, at)


# ---------------------------------------------------------------- positions and matching


def term_at(t: Term, path: tuple[int, ...]) -> Term:
    from .syntax import term_children

    for i in path:
        kids = term_children(t)
        if i >= len(kids):
            raise IndexError(f"term path {path} leaves the term")
        t = kids[i]
    return t


def replace_term_at(t: Term, path: tuple[int, ...], new: Term) -> Term:
    if not path:
        return new
    i, rest = path[0], path[1:]
    if isinstance(t, FnApp) and i == 0:
        return FnApp(t.fn, replace_term_at(t.arg, rest, new))
    if isinstance(t, Pair) and i in (0, 1):
        return Pair(replace_term_at(t.left, rest, new), t.right) if i == 0 else \
            Pair(t.left, replace_term_at(t.right, rest, new))
    if isinstance(t, Proj1) and i == 0:
        return Proj1(replace_term_at(t.arg, rest, new))
    if isinstance(t, Proj2) and i == 0:
        return Proj2(replace_term_at(t.arg, rest, new))
    if isinstance(t, App) and i in (0, 1):
        return App(replace_term_at(t.fun, rest, new), t.arg) if i == 0 else \
            App(t.fun, replace_term_at(t.arg, rest, new))
    if isinstance(t, Lam) and i == 0:
        return Lam(t.var, t.ty, replace_term_at(t.body, rest, new))
    raise IndexError(f"term path {path} leaves the term")


def binders_along(t: Term, path: tuple[int, ...]) -> list[tuple[str, Type]]:
    """Lambda binders crossed when walking ``path`` into ``t``."""
    out = []
    for i in path:
        if isinstance(t, Lam):
            out.append((t.var, t.ty))
        t = term_at(t, (i,))
    return out


def match_term(pattern: Term, t: Term, pvars: set[str],
               sub: dict[str, Term] | None = None) -> dict[str, Term] | None:
    """First-order matching modulo renaming of lambda binders."""
    sub = dict(sub or {})

    def go(p: Term, u: Term, bound: dict[str, str]) -> bool:
        if isinstance(p, Var) and p.name in pvars and p.name not in bound:
            if term_free_vars(u) & set(bound.values()):
                return False
            if p.name in sub:
                return canonical_binders(sub[p.name]) == canonical_binders(u)
            sub[p.name] = u
            return True
        if isinstance(p, Var):
            return isinstance(u, Var) and bound.get(p.name, p.name) == u.name
        if type(p) is not type(u):
            return False
        if isinstance(p, Bang):
            return True
        if isinstance(p, FnApp):
            return p.fn == u.fn and go(p.arg, u.arg, bound)
        if isinstance(p, Lam):
            return p.ty == u.ty and go(p.body, u.body, {**bound, p.var: u.var})
        pk = [getattr(p, f) for f in p.__slots__]
        uk = [getattr(u, f) for f in u.__slots__]
        return all(go(a, b, bound) for a, b in zip(pk, uk))

    return sub if go(pattern, t, {}) else None


def instantiate_equation(eq: Equation, sub: Mapping[str, Term], direction: str) -> tuple[Term, Term]:
    """(source, target) sides of ``eq`` under ``sub``; direction is 'lr' or 'rl'."""
    src, dst = (eq.lhs, eq.rhs) if direction == "lr" else (eq.rhs, eq.lhs)
    return subst_term(src, sub), subst_term(dst, sub)


__all__ = [
    "check_type", "check_ctx", "typecheck_term", "subst_term", "rename_term", "normalize",
    "decide_term_eq", "canonical_binders", "term_at", "replace_term_at", "match_term",
    "instantiate_equation", "binders_along",
]

_ = (Base,)
