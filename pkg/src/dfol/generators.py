"""Random and exhaustive generation of well-formed syntax, for tests and sweeps."""

from __future__ import annotations

import random
from typing import Iterator

from .syntax import (
    And, App, Arrow, BANG, Base, Exists, FnApp, Forall, Formula, Impl, Judgement, Lam, Le,
    Pair, Pol, PolCtx, Pred, Prod, Proj1, Proj2, TOP, Term, Theory, Type, Unit, UNIT, Var,
    ZONES, Ctx, fresh_name,
)

QUANTS = (Exists, Forall)


class RandomGen:
    """Seeded generator of types, terms, formulas and judgements over a theory."""

    def __init__(self, theory: Theory, seed: int = 0, names: str = "abcdefgh"):
        self.theory = theory
        self.rng = random.Random(seed)
        self.names = names

    # -- types and contexts

    def type_(self, depth: int = 1) -> Type:
        bases = [Base(b) for b in self.theory.bases] or [UNIT]
        r = self.rng.random()
        if depth <= 0 or r < 0.55:
            return self.rng.choice(bases + [UNIT] if r < 0.05 else bases)
        if r < 0.8:
            return Prod(self.type_(depth - 1), self.type_(depth - 1))
        return Arrow(self.type_(depth - 1), self.type_(depth - 1))

    def polctx(self, size: int = 3, type_depth: int = 0) -> PolCtx:
        zones: dict[Pol, list] = {p: [] for p in ZONES}
        for i in range(size):
            name = self.names[i] if i < len(self.names) else f"v{i}"
            zones[self.rng.choice(ZONES)].append((name, self.type_(type_depth)))
        return PolCtx(tuple(zones[Pol.NEG]), tuple(zones[Pol.DIN]), tuple(zones[Pol.POS]))

    # -- terms

    def term(self, ctx: Ctx, ty: Type, depth: int = 2) -> Term | None:
        """A random term of type ``ty`` in ``ctx``, or None if none was found."""
        rng = self.rng
        options = []
        vars_ = [Var(n) for n, t in _visible(ctx) if t == ty]
        if vars_:
            options.append(lambda: rng.choice(vars_))
        if isinstance(ty, Unit):
            options.append(lambda: BANG)
        if depth > 0:
            if isinstance(ty, Prod):
                options.append(lambda: _pair(self.term(ctx, ty.left, depth - 1), self.term(ctx, ty.right, depth - 1)))
            if isinstance(ty, Arrow):
                def lam():
                    x = fresh_name("x", [n for n, _ in ctx])
                    body = self.term(ctx + ((x, ty.dom),), ty.cod, depth - 1)
                    return None if body is None else Lam(x, ty.dom, body)
                options.append(lam)
            fs = [f for f, (_, cod) in self.theory.funcs.items() if cod == ty]
            if fs:
                def fn():
                    f = rng.choice(fs)
                    arg = self.term(ctx, self.theory.funcs[f][0], depth - 1)
                    return None if arg is None else FnApp(f, arg)
                options.append(fn)
            prods = [(n, t) for n, t in _visible(ctx) if isinstance(t, Prod) and ty in (t.left, t.right)]
            if prods:
                def proj():
                    n, t = rng.choice(prods)
                    return Proj1(Var(n)) if t.left == ty and (t.right != ty or rng.random() < 0.5) else Proj2(Var(n))
                options.append(proj)
            arrows = [(n, t) for n, t in _visible(ctx) if isinstance(t, Arrow) and t.cod == ty]
            if arrows:
                def app():
                    n, t = rng.choice(arrows)
                    arg = self.term(ctx, t.dom, depth - 1)
                    return None if arg is None else App(Var(n), arg)
                options.append(app)
        rng.shuffle(options)
        for opt in options:
            t = opt()
            if t is not None:
                return t
        return None

    # -- formulas

    def formula(self, pc: PolCtx, depth: int = 2) -> Formula:
        """A random formula well-formed in ``pc``; falls back to top."""
        rng = self.rng
        kinds = ["top", "le", "pred"] + (["and", "impl", "quant", "quant"] if depth > 1 else [])
        for _ in range(8):
            k = rng.choice(kinds)
            if k == "top":
                return TOP
            if k == "le":
                ty = self._atom_type(pc)
                s, t = self.term(pc.neg_ctx(), ty, 1), self.term(pc.pos_ctx(), ty, 1)
                if s is not None and t is not None:
                    return Le(s, t, ty)
            elif k == "pred" and self.theory.preds:
                p = rng.choice(sorted(self.theory.preds))
                nt, pt = self.theory.preds[p]
                s, t = self.term(pc.neg_ctx(), nt, 1), self.term(pc.pos_ctx(), pt, 1)
                if s is not None and t is not None:
                    return Pred(p, s, t)
            elif k == "and":
                return And(self.formula(pc, depth - 1), self.formula(pc, depth - 1))
            elif k == "impl":
                return Impl(self.formula(pc.swapped(), depth - 1), self.formula(pc, depth - 1))
            elif k == "quant":
                pol = rng.choice(ZONES)
                x = fresh_name(rng.choice("xyz"), pc.names())
                ty = self.type_(0)
                body = self.formula(pc.extend(pol, x, ty), depth - 1)
                return rng.choice(QUANTS)(pol, x, ty, body)
        return TOP

    def _atom_type(self, pc: PolCtx) -> Type:
        tys = [t for _, t in pc.all()]
        return self.rng.choice(tys) if tys and self.rng.random() < 0.8 else self.type_(0)

    def judgement(self, pc: PolCtx | None = None, hyps: int = 2, depth: int = 2) -> Judgement:
        pc = pc or self.polctx()
        hs = tuple(self.formula(pc, depth) for _ in range(self.rng.randint(0, hyps)))
        return Judgement(pc, hs, self.formula(pc, depth))


def _visible(ctx: Ctx):
    """Bindings not shadowed by a later binding of the same name."""
    seen, out = set(), []
    for n, t in reversed(ctx):
        if n not in seen:
            seen.add(n)
            out.append((n, t))
    return out[::-1]


def _pair(a: Term | None, b: Term | None) -> Term | None:
    return None if a is None or b is None else Pair(a, b)


# ---------------------------------------------------------------- exhaustive grids


def grid_atoms(theory: Theory, pc: PolCtx) -> list[Formula]:
    """Top plus every variable-only directed equality and predicate atom in ``pc``."""
    out: list[Formula] = [TOP]
    neg, pos = _visible(pc.neg_ctx()), _visible(pc.pos_ctx())
    for s, st in neg:
        for t, tt in pos:
            if st == tt:
                out.append(Le(Var(s), Var(t), st))
    for p in sorted(theory.preds):
        nt, pt = theory.preds[p]
        for s, st in neg:
            for t, tt in pos:
                if st == nt and tt == pt:
                    out.append(Pred(p, Var(s), Var(t)))
    return out


def grid_formulas(theory: Theory, pc: PolCtx, binder: str = "x", binder_types: tuple[Type, ...] | None = None,
                  ) -> Iterator[Formula]:
    """Every formula of depth at most 2 with variable-only atoms.

    Depth counts atoms as 1, so these are atoms and single connectives
    (and, implication, the six quantifiers) applied to atoms.
    """
    atoms = grid_atoms(theory, pc)
    yield from atoms
    ants = grid_atoms(theory, pc.swapped())
    for a in atoms:
        for b in atoms:
            yield And(a, b)
    for a in ants:
        for b in atoms:
            yield Impl(a, b)
    tys = binder_types or tuple(Base(b) for b in theory.bases)
    for ty in tys:
        for pol in ZONES:
            inner = pc.extend(pol, binder, ty)
            for body in grid_atoms(theory, inner):
                for q in QUANTS:
                    yield q(pol, binder, ty, body)


__all__ = ["RandomGen", "grid_atoms", "grid_formulas", "derived_instance", "sample_theory"]


# ---------------------------------------------------------------- derived-rule instances


def _fresh_names(pc: PolCtx, k: int, stem: str) -> list[str]:
    out: list[str] = []
    for _ in range(k):
        out.append(fresh_name(stem, list(pc.names()) + out))
    return out


def _hyps(g: RandomGen, pc: PolCtx, k: int = 2) -> tuple[Formula, ...]:
    return tuple(g.formula(pc, 2) for _ in range(g.rng.randint(0, k)))


def _atom_ty(g: RandomGen) -> Type:
    return g.rng.choice([Base(b) for b in g.theory.bases])


def derived_instance(g: RandomGen, rule: str) -> tuple[Judgement, list]:
    """A random goal matching the conclusion of ``rule`` plus its arguments.

    Formulas are generated in the premise context and transported to the
    conclusion, so every side condition holds by construction.
    """
    from .formulas import split_dinatural, subst_formula

    rng = g.rng
    pc = g.polctx(rng.randint(1, 3))

    def term_in(ctx, ty):
        for _ in range(20):
            t = g.term(ctx, ty, 2)
            if t is not None:
                return t
        return None

    if rule in ("refl_term", "le_refl"):
        ty = _atom_ty(g)
        (z,) = _fresh_names(pc, 1, "z")
        pc = pc.extend(Pol.DIN, z, ty)
        t = Var(z) if rule == "le_refl" else term_in(pc.delta, g.type_(1)) or Var(z)
        from .terms import typecheck_term
        tty = typecheck_term(g.theory, pc.delta, t)
        return Judgement(pc, _hyps(g, pc), Le(t, t, tty)), []

    if rule in ("le_plus", "le_minus", "le_full"):
        ty = _atom_ty(g)
        z, a, b = _fresh_names(pc, 3, "v")
        zz, za, zb = {"le_plus": (Pol.POS, Pol.DIN, Pol.POS), "le_minus": (Pol.NEG, Pol.NEG, Pol.DIN),
                      "le_full": (Pol.DIN, Pol.DIN, Pol.DIN)}[rule]
        prem = pc.extend(zz, z, ty)
        hs, c = _hyps(g, prem), g.formula(prem, 2)
        if rule == "le_plus":
            hs = tuple(subst_formula(h, dinat={z: Var(a)}) for h in hs)
            c = subst_formula(c, dinat={z: Var(b)})
        elif rule == "le_minus":
            hs = tuple(subst_formula(h, dinat={z: Var(b)}) for h in hs)
            c = subst_formula(c, dinat={z: Var(a)})
        else:
            hs = tuple(split_dinatural(h, z, b, a) for h in hs)
            c = split_dinatural(c, z, a, b)
        goal_pc = pc.extend(za, a, ty).extend(zb, b, ty)
        return Judgement(goal_pc, (Le(Var(a), Var(b), ty),) + hs, c), [a, b, z]

    if rule == "le_terms":
        ty = _atom_ty(g)
        a, b, z = _fresh_names(pc, 3, "w")
        eta, rho = term_in(pc.neg_ctx(), ty), term_in(pc.pos_ctx(), ty)
        if eta is None or rho is None:
            (e,) = _fresh_names(pc, 1, "e")
            pc = pc.extend(Pol.DIN, e, ty)
            a, b, z = _fresh_names(pc, 3, "w")
            eta = eta or Var(e)
            rho = rho or Var(e)
        pc_ab = pc.extend(Pol.NEG, a, ty).extend(Pol.POS, b, ty)
        phi = g.formula(pc_ab, 2)
        concl = subst_formula(phi, neg={a: eta}, pos={b: rho})
        return Judgement(pc, (Le(eta, rho, ty),) + _hyps(g, pc), concl), [a, b, phi, z]

    if rule in ("impl_L", "impl_R"):
        k = rng.randint(0, 2)
        names = _fresh_names(pc, k, "m")
        split = rng.randint(0, k)
        N = [(n, _atom_ty(g)) for n in names[:split]]
        P = [(n, _atom_ty(g)) for n in names[split:]]
        nat = PolCtx(pc.theta + tuple(N), pc.delta, pc.gamma + tuple(P))
        if rule == "impl_L":
            psi = g.formula(PolCtx(tuple(N), pc.delta, tuple(P)), 2)
            goal_pc = PolCtx(pc.theta, pc.delta + tuple(N) + tuple(P), pc.gamma)
        else:
            psi = g.formula(PolCtx(tuple(P), pc.delta, tuple(N)), 2)
            goal_pc = nat
        hs, phi = _hyps(g, nat), g.formula(nat, 2)
        return Judgement(goal_pc, hs, Impl(psi, phi)), [tuple(n for n, _ in N), tuple(n for n, _ in P)]

    if rule == "impl_varchange":
        ty = _atom_ty(g)
        (a,) = _fresh_names(pc, 1, "u")
        psi = g.formula(PolCtx((), pc.delta, ((a, ty),)), 2)
        hs, phi = _hyps(g, pc), g.formula(pc, 2)
        return Judgement(pc.extend(Pol.NEG, a, ty), hs, Impl(psi, phi)), [a]

    if rule.startswith(("exists_term_", "forall_term_")):
        pol = {"plus": Pol.POS, "minus": Pol.NEG, "delta": Pol.DIN}[rule.rsplit("_", 1)[1]]
        ty = _atom_ty(g)
        (x,) = _fresh_names(pc, 1, "q")
        ctx = {Pol.POS: pc.pos_ctx(), Pol.NEG: pc.neg_ctx(), Pol.DIN: pc.delta}[pol]
        t = term_in(ctx, ty)
        if t is None:
            (e,) = _fresh_names(pc, 1, "e")
            pc = pc.extend(Pol.DIN, e, ty)
            t = Var(e)
        body = g.formula(pc.extend(pol, x, ty), 2)
        hs = _hyps(g, pc)
        if rule.startswith("exists"):
            return Judgement(pc, hs, Exists(pol, x, ty, body)), [t]
        q = Forall(pol, x, ty, body)
        return Judgement(pc, hs, subst_formula(body, dinat={x: t})), [t, q]

    raise ValueError(f"no instance generator for {rule}")


def sample_theory() -> Theory:
    """A small signature exercising every type former."""
    A, B = Base("A"), Base("B")
    return Theory(
        "sample", ("A", "B"),
        {"f": (A, B), "h": (Prod(A, A), A), "k": (Arrow(A, A), B)},
        {},
        {"P": (UNIT, A), "Q": (A, B)},
    )
