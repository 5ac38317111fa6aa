"""A direct recursive evaluator, used to cross-check the compiled semantics.

Every variable carries a (negative, positive) pair of carrier indices;
implication swaps the pair for its antecedent and a quantifier binds its
variable at both copies.
"""

from __future__ import annotations

import itertools

from dfol.syntax import (
    And, App, Arrow, Bang, Exists, FnApp, Forall, Impl, Lam, Le, Pair, PolCtx, Pred, Proj1, Proj2,
    Top, Var,
)
from dfol.terms import typecheck_term


def eval_term(m, t, env: dict, types: dict) -> int:
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Bang):
        return 0
    if isinstance(t, Pair):
        rt = typecheck_term(m.theory, tuple(types.items()), t.right)
        return eval_term(m, t.left, env, types) * m.carrier(rt).size + eval_term(m, t.right, env, types)
    if isinstance(t, (Proj1, Proj2)):
        pt = typecheck_term(m.theory, tuple(types.items()), t.arg)
        q, r = divmod(eval_term(m, t.arg, env, types), m.carrier(pt.right).size)
        return q if isinstance(t, Proj1) else r
    if isinstance(t, FnApp):
        return m.funcs[t.fn][eval_term(m, t.arg, env, types)]
    if isinstance(t, App):
        ft = typecheck_term(m.theory, tuple(types.items()), t.fun)
        return m.carrier(ft).maps[eval_term(m, t.fun, env, types)][eval_term(m, t.arg, env, types)]
    if isinstance(t, Lam):
        inner = {**types, t.var: t.ty}
        table = tuple(eval_term(m, t.body, {**env, t.var: v}, inner) for v in range(m.carrier(t.ty).size))
        cod = typecheck_term(m.theory, tuple(inner.items()), t.body)
        return m.carrier(Arrow(t.ty, cod)).maps.index(table)
    raise TypeError(t)


def holds(m, phi, neg: dict, pos: dict, types: dict) -> bool:
    if isinstance(phi, Top):
        return True
    if isinstance(phi, And):
        return holds(m, phi.left, neg, pos, types) and holds(m, phi.right, neg, pos, types)
    if isinstance(phi, Impl):
        return not holds(m, phi.ante, pos, neg, types) or holds(m, phi.cons, neg, pos, types)
    if isinstance(phi, Le):
        a, b = eval_term(m, phi.lhs, neg, types), eval_term(m, phi.rhs, pos, types)
        return m.carrier(phi.ty).order.le(a, b)
    if isinstance(phi, Pred):
        nt, pt = m.theory.preds[phi.name]
        a, b = eval_term(m, phi.neg, neg, types), eval_term(m, phi.pos, pos, types)
        return bool(m.preds[phi.name][a * m.carrier(pt).size + b])
    if isinstance(phi, (Exists, Forall)):
        inner = {**types, phi.var: phi.ty}
        vals = (holds(m, phi.body, {**neg, phi.var: v}, {**pos, phi.var: v}, inner)
                for v in range(m.carrier(phi.ty).size))
        return any(vals) if isinstance(phi, Exists) else all(vals)
    raise TypeError(phi)


def table(m, pc: PolCtx, phi) -> dict[tuple[int, ...], bool]:
    """Same layout as ``formula_table``: theta, (neg, pos) per delta, gamma."""
    types = dict(pc.all())
    sizes = lambda zone: [m.carrier(t).size for _, t in zone]  # noqa: E731
    out = {}
    ranges = [range(s) for s in sizes(pc.theta)]
    ranges += [range(s) for s in sizes(pc.delta) for _ in (0, 1)]
    ranges += [range(s) for s in sizes(pc.gamma)]
    nt, nd = len(pc.theta), len(pc.delta)
    for key in itertools.product(*ranges):
        neg = {n: key[i] for i, (n, _) in enumerate(pc.theta)}
        pos = {n: key[nt + 2 * nd + i] for i, (n, _) in enumerate(pc.gamma)}
        for i, (n, _) in enumerate(pc.delta):
            neg[n], pos[n] = key[nt + 2 * i], key[nt + 2 * i + 1]
        out[key] = holds(m, phi, neg, pos, types)
    return out


