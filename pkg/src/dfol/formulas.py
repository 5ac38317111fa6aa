"""Formula well-formedness, variance, substitution and canonical forms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import Diagnostic, DfolError, TypeCheckError, WellFormednessError
from .syntax import (
    And, Ctx, Exists, Forall, Formula, Impl, Judgement, Le, Pol, PolCtx, Pred, Term, Theory,
    Top, Var, ZONES, ctx_names, fresh_name, term_free_vars,
)
from .terms import check_ctx, check_type, normalize, subst_term, typecheck_term, canonical_binders


# ---------------------------------------------------------------- well-formedness


def _wf_fail(reason: str, msg: str, path: tuple[int, ...], expected=None, found=None):
    return WellFormednessError(Diagnostic(rule="formula", reason=reason, message=msg, path=path,
                                          expected=expected, found=found))


def check_polctx(theory: Theory, pc: PolCtx) -> None:
    dup = pc.duplicate_names()
    if dup:
        raise _wf_fail("duplicate-variable", f"variable {dup[0]} occurs in more than one zone", ())
    for pol in ZONES:
        try:
            check_ctx(theory, pc.zone(pol))
        except TypeCheckError as e:
            raise WellFormednessError(e.diag) from None


def _typed_in(theory: Theory, ctx: Ctx, t: Term):
    try:
        return typecheck_term(theory, ctx, t), None
    except TypeCheckError as e:
        return None, e.diag


def wf_formula(theory: Theory, pc: PolCtx, phi: Formula, _path: tuple[int, ...] = ()) -> None:
    """Raise WellFormednessError unless ``phi`` is a formula in ``pc``."""
    from .printer import show_formula, show_term, show_type

    if isinstance(phi, Top):
        return
    if isinstance(phi, And):
        wf_formula(theory, pc, phi.left, _path + (0,))
        wf_formula(theory, pc, phi.right, _path + (1,))
        return
    if isinstance(phi, Impl):
        try:
            wf_formula(theory, pc.swapped(), phi.ante, _path + (0,))
        except WellFormednessError as e:
            d = e.diag
            raise _wf_fail("antecedent-swap-violation",
                           f"antecedent {show_formula(phi.ante)} is not a formula in the swapped "
                           f"context ({d.reason}: {d.message})", d.path) from None
        wf_formula(theory, pc, phi.cons, _path + (1,))
        return
    if isinstance(phi, Le):
        try:
            check_type(theory, phi.ty)
        except TypeCheckError as e:
            raise WellFormednessError(e.diag) from None
        for side, term, ctx, code in (
            (0, phi.lhs, pc.neg_ctx(), "le-lhs-not-negative-typable"),
            (1, phi.rhs, pc.pos_ctx(), "le-rhs-not-positive-typable"),
        ):
            ty, diag = _typed_in(theory, ctx, term)
            if ty != phi.ty:
                why = diag.message if diag else f"has type {show_type(ty)}"
                raise _wf_fail(code, f"{show_term(term)} in {show_formula(phi)}: {why}",
                               _path + (side,), expected=show_type(phi.ty),
                               found=show_type(ty) if ty is not None else None)
        return
    if isinstance(phi, Pred):
        sig = theory.preds.get(phi.name)
        if sig is None:
            raise _wf_fail("symbol-not-in-signature", f"unknown predicate {phi.name}", _path)
        for side, term, ctx, want in ((0, phi.neg, pc.neg_ctx(), sig[0]),
                                      (1, phi.pos, pc.pos_ctx(), sig[1])):
            ty, diag = _typed_in(theory, ctx, term)
            if ty != want:
                why = diag.message if diag else f"has type {show_type(ty)}"
                zone = "negative" if side == 0 else "positive"
                raise _wf_fail("pred-arg-mismatch",
                               f"{zone} argument {show_term(term)} of {phi.name}: {why}",
                               _path + (side,), expected=show_type(want),
                               found=show_type(ty) if ty is not None else None)
        return
    if isinstance(phi, (Exists, Forall)):
        try:
            check_type(theory, phi.ty)
        except TypeCheckError as e:
            raise WellFormednessError(e.diag) from None
        wf_formula(theory, pc.extend(phi.pol, phi.var, phi.ty), phi.body, _path + (0,))
        return
    raise TypeError(f"not a formula: {phi!r}")


def is_wf(theory: Theory, pc: PolCtx, phi: Formula) -> bool:
    try:
        wf_formula(theory, pc, phi)
        return True
    except DfolError:
        return False


def wf_judgement(theory: Theory, j: Judgement) -> None:
    check_polctx(theory, j.pc)
    for i, h in enumerate(j.hyps):
        try:
            wf_formula(theory, j.pc, h)
        except WellFormednessError as e:
            e.diag.message = f"hypothesis {i}: {e.diag.message}"
            raise
    wf_formula(theory, j.pc, j.concl)


# ---------------------------------------------------------------- free variables and variance


def formula_free_vars(phi: Formula) -> frozenset[str]:
    if isinstance(phi, Top):
        return frozenset()
    if isinstance(phi, And):
        return formula_free_vars(phi.left) | formula_free_vars(phi.right)
    if isinstance(phi, Impl):
        return formula_free_vars(phi.ante) | formula_free_vars(phi.cons)
    if isinstance(phi, Le):
        return term_free_vars(phi.lhs) | term_free_vars(phi.rhs)
    if isinstance(phi, Pred):
        return term_free_vars(phi.neg) | term_free_vars(phi.pos)
    return formula_free_vars(phi.body) - {phi.var}


def occurrences(phi: Formula, positive: bool = True, bound: frozenset[str] = frozenset()):
    """Yield (variable, is_positive) for every free occurrence position."""
    if isinstance(phi, Top):
        return
    if isinstance(phi, And):
        yield from occurrences(phi.left, positive, bound)
        yield from occurrences(phi.right, positive, bound)
    elif isinstance(phi, Impl):
        yield from occurrences(phi.ante, not positive, bound)
        yield from occurrences(phi.cons, positive, bound)
    elif isinstance(phi, (Le, Pred)):
        neg, pos = (phi.lhs, phi.rhs) if isinstance(phi, Le) else (phi.neg, phi.pos)
        for v in term_free_vars(neg) - bound:
            yield v, not positive
        for v in term_free_vars(pos) - bound:
            yield v, positive
    else:
        yield from occurrences(phi.body, positive, bound | {phi.var})


def variance_report(pc: PolCtx, phi: Formula) -> dict[str, dict[str, bool]]:
    """For each context variable, whether it occurs positively and/or negatively."""
    rep = {n: {"positive": False, "negative": False} for n in pc.names()}
    for v, is_pos in occurrences(phi):
        entry = rep.setdefault(v, {"positive": False, "negative": False})
        entry["positive" if is_pos else "negative"] = True
    return rep


def is_natural(report: Mapping[str, Mapping[str, bool]], var: str) -> bool:
    e = report.get(var, {})
    return not (e.get("positive") and e.get("negative"))


# ---------------------------------------------------------------- substitution


def subst_formula(phi: Formula, neg: Mapping[str, Term] | None = None,
                  dinat: Mapping[str, Term] | None = None,
                  pos: Mapping[str, Term] | None = None) -> Formula:
    """Substitute a polarized triple of term maps into ``phi``.

    A variable at a negative position is looked up in ``neg`` then ``dinat``;
    at a positive position in ``pos`` then ``dinat``.  Unmapped variables are
    left alone.  Antecedents of implications see the negative and positive
    maps exchanged.
    """
    neg, dinat, pos = dict(neg or {}), dict(dinat or {}), dict(pos or {})
    return _subst(phi, {**dinat, **neg}, {**dinat, **pos})


def _subst(phi: Formula, nsub: dict[str, Term], psub: dict[str, Term]) -> Formula:
    if not nsub and not psub:
        return phi
    if isinstance(phi, Top):
        return phi
    if isinstance(phi, And):
        return And(_subst(phi.left, nsub, psub), _subst(phi.right, nsub, psub))
    if isinstance(phi, Impl):
        return Impl(_subst(phi.ante, psub, nsub), _subst(phi.cons, nsub, psub))
    if isinstance(phi, Le):
        return Le(subst_term(phi.lhs, nsub), subst_term(phi.rhs, psub), phi.ty)
    if isinstance(phi, Pred):
        return Pred(phi.name, subst_term(phi.neg, nsub), subst_term(phi.pos, psub))
    # quantifier
    body_fv = formula_free_vars(phi.body) - {phi.var}
    nsub = {k: v for k, v in nsub.items() if k != phi.var and k in body_fv}
    psub = {k: v for k, v in psub.items() if k != phi.var and k in body_fv}
    if not nsub and not psub:
        return phi
    range_fv: set[str] = set()
    for t in list(nsub.values()) + list(psub.values()):
        range_fv |= term_free_vars(t)
    var = phi.var
    if var in range_fv:
        var = fresh_name(phi.var, range_fv | body_fv | set(nsub) | set(psub))
        nsub[phi.var] = Var(var)
        psub[phi.var] = Var(var)
    return type(phi)(phi.pol, var, phi.ty, _subst(phi.body, nsub, psub))


def rename_formula(phi: Formula, ren: Mapping[str, str]) -> Formula:
    m = {k: Var(v) for k, v in ren.items()}
    return subst_formula(phi, dinat=m)


@dataclass(frozen=True)
class Morphism:
    """A reindexing triple from ``src`` to ``tgt``.

    ``neg`` sends each theta-variable of ``src`` to a term over tgt's theta
    and delta, ``dinat`` sends delta-variables to terms over tgt's delta and
    ``pos`` sends gamma-variables to terms over tgt's gamma and delta.
    """

    src: PolCtx
    tgt: PolCtx
    neg: Mapping[str, Term] = field(default_factory=dict)
    dinat: Mapping[str, Term] = field(default_factory=dict)
    pos: Mapping[str, Term] = field(default_factory=dict)

    def full(self) -> "Morphism":
        """Make identity entries explicit."""
        def fill(zone, m):
            return {n: m.get(n, Var(n)) for n in ctx_names(zone)}
        return Morphism(self.src, self.tgt, fill(self.src.theta, self.neg),
                        fill(self.src.delta, self.dinat), fill(self.src.gamma, self.pos))

    def apply(self, phi: Formula) -> Formula:
        f = self.full()
        return subst_formula(phi, f.neg, f.dinat, f.pos)

    def then(self, g: "Morphism") -> "Morphism":
        """The composite: first this morphism, then ``g``."""
        f, g = self.full(), g.full()
        gn = {**g.dinat, **g.neg}
        gp = {**g.dinat, **g.pos}
        return Morphism(
            f.src, g.tgt,
            {k: subst_term(v, gn) for k, v in f.neg.items()},
            {k: subst_term(v, dict(g.dinat)) for k, v in f.dinat.items()},
            {k: subst_term(v, gp) for k, v in f.pos.items()},
        )

    def check(self, theory: Theory) -> None:
        """Typecheck every component against the declared contexts."""
        from .printer import show_type

        f = self.full()
        for zone, m, ctx in ((self.src.theta, f.neg, self.tgt.neg_ctx()),
                             (self.src.delta, f.dinat, self.tgt.delta),
                             (self.src.gamma, f.pos, self.tgt.pos_ctx())):
            for name, want in zone:
                got = typecheck_term(theory, ctx, m[name])
                if got != want:
                    raise TypeCheckError(Diagnostic(
                        rule="typing", reason="type-mismatch",
                        message=f"image of {name} has the wrong type",
                        expected=show_type(want), found=show_type(got)))


def identity_morphism(pc: PolCtx) -> Morphism:
    return Morphism(pc, pc)


def lift_natural(pc: PolCtx, phi: Formula, n: str, p: str) -> tuple[PolCtx, Formula]:
    """Move natural variables ``n`` (negative) and ``p`` (positive) into delta.

    The reindexing triple is made of projections, so the formula itself is
    unchanged; only its context moves.
    """
    tn, tp = pc.type_of(n), pc.type_of(p)
    if pc.zone_of(n) is not Pol.NEG or pc.zone_of(p) is not Pol.POS:
        raise ValueError(f"{n} must be negative and {p} positive")
    new = pc.remove(n, p).extend(Pol.DIN, n, tn).extend(Pol.DIN, p, tp)
    return new, phi


def contract_formula(pc: PolCtx, phi: Formula, n: str, p: str, a: str) -> tuple[PolCtx, Formula]:
    """Identify the natural variables ``n`` and ``p`` as one dinatural ``a``."""
    tn, tp = pc.type_of(n), pc.type_of(p)
    if pc.zone_of(n) is not Pol.NEG or pc.zone_of(p) is not Pol.POS or tn != tp:
        raise ValueError(f"{n} and {p} must be a negative/positive pair of one type")
    rest = pc.remove(n, p)
    if a in rest.names():
        raise ValueError(f"{a} is already bound")
    return rest.extend(Pol.DIN, a, tn), subst_formula(phi, neg={n: Var(a)}, pos={p: Var(a)})


def split_dinatural(phi: Formula, z: str, a: str, b: str) -> Formula:
    """Send negative occurrences of ``z`` to ``a`` and positive ones to ``b``."""
    return subst_formula(phi, neg={z: Var(a)}, pos={z: Var(b)})


# ---------------------------------------------------------------- canonical forms


def canonical_formula(theory: Theory, ctx: Ctx, phi: Formula, normalize_terms: bool = True,
                      _depth: int = 0) -> Formula:
    """Rename binders by depth and optionally normalize embedded terms.

    Two formulas in the same context are identified by the kernel iff their
    canonical forms are equal.
    """
    if isinstance(phi, Top):
        return phi
    if isinstance(phi, And):
        return And(canonical_formula(theory, ctx, phi.left, normalize_terms, _depth),
                   canonical_formula(theory, ctx, phi.right, normalize_terms, _depth))
    if isinstance(phi, Impl):
        return Impl(canonical_formula(theory, ctx, phi.ante, normalize_terms, _depth),
                    canonical_formula(theory, ctx, phi.cons, normalize_terms, _depth))
    if isinstance(phi, (Le, Pred)):
        def norm(t: Term, ty) -> Term:
            if normalize_terms:
                return normalize(theory, ctx, t, ty)
            return canonical_binders(t)
        if isinstance(phi, Le):
            return Le(norm(phi.lhs, phi.ty), norm(phi.rhs, phi.ty), phi.ty)
        nty, pty = theory.preds[phi.name]
        return Pred(phi.name, norm(phi.neg, nty), norm(phi.pos, pty))
    x = f"#{_depth}"
    body = subst_formula(phi.body, dinat={phi.var: Var(x)}) if phi.var != x else phi.body
    body = canonical_formula(theory, ctx + ((x, phi.ty),), body, normalize_terms, _depth + 1)
    return type(phi)(phi.pol, x, phi.ty, body)


def formula_eq(theory: Theory, pc: PolCtx, phi: Formula, psi: Formula) -> bool:
    """Equality up to alpha-renaming and convertibility of embedded terms."""
    if phi == psi:
        return True
    ctx = pc.all()
    try:
        return canonical_formula(theory, ctx, phi) == canonical_formula(theory, ctx, psi)
    except (KeyError, TypeError, IndexError):
        return False


def alpha_eq(phi: Formula, psi: Formula) -> bool:
    """Syntactic equality up to renaming of bound variables only."""
    empty = Theory()
    return canonical_formula(empty, (), phi, False) == canonical_formula(empty, (), psi, False)


def rename_polctx(pc: PolCtx, ren: Mapping[str, str]) -> PolCtx:
    return PolCtx(*(tuple((ren.get(n, n), t) for n, t in pc.zone(p)) for p in ZONES))


def judgement_alpha_eq(theory: Theory, j1: Judgement, j2: Judgement) -> bool:
    """Equality after positional renaming of context variables and canonicalization."""
    for p in ZONES:
        z1, z2 = j1.pc.zone(p), j2.pc.zone(p)
        if [t for _, t in z1] != [t for _, t in z2]:
            return False
    if len(j1.hyps) != len(j2.hyps):
        return False
    names1, names2 = j1.pc.names(), j2.pc.names()
    avoid = set(names1) | set(names2) | formula_free_vars_all(j1) | formula_free_vars_all(j2)
    common = []
    for i in range(len(names1)):
        common.append(fresh_name(f"v{i}_", avoid | set(common)))
    r1 = dict(zip(names1, common))
    r2 = dict(zip(names2, common))
    pc = rename_polctx(j1.pc, r1)
    pairs = list(zip(j1.hyps, j2.hyps)) + [(j1.concl, j2.concl)]
    for a, b in pairs:
        if not formula_eq(theory, pc, rename_formula(a, r1), rename_formula(b, r2)):
            return False
    return True


def formula_free_vars_all(j: Judgement) -> set[str]:
    out: set[str] = set()
    for f in j.hyps + (j.concl,):
        out |= formula_free_vars(f)
    return out


def judgement_eq(theory: Theory, j1: Judgement, j2: Judgement) -> bool:
    """Same variables in the same zones, formulas equal up to conversion."""
    if not j1.pc.same_zones(j2.pc) or len(j1.hyps) != len(j2.hyps):
        return False
    return all(formula_eq(theory, j1.pc, a, b)
               for a, b in zip(j1.hyps + (j1.concl,), j2.hyps + (j2.concl,)))


__all__ = [
    "check_polctx", "wf_formula", "is_wf", "wf_judgement", "formula_free_vars", "occurrences",
    "variance_report", "is_natural", "subst_formula", "rename_formula", "Morphism",
    "identity_morphism", "lift_natural", "contract_formula", "split_dinatural",
    "canonical_formula", "formula_eq", "alpha_eq", "judgement_alpha_eq", "judgement_eq",
    "rename_polctx",
]
