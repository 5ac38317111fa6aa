"""Line-oriented theory, proof and model files."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from .errors import ParseError
from .parser import Parser, is_identifier
from .semantics import FinPreorder, Model
from .syntax import Equation, Judgement, Theory
from .tactics import Step, parse_steps


def _lines(text: str) -> Iterator[tuple[int, str]]:
    for k, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].rstrip()
        if line.strip():
            yield k, line


def _col(raw: str, rest: str) -> int:
    return len(raw) - len(rest.lstrip()) + 1


def _parse_at(text: str, method: str, line: int, col: int, source: str):
    p = Parser(" " * (col - 1) + text, source, line)
    out = getattr(p, method)()
    p.done()
    return out


# ---------------------------------------------------------------- theories


def parse_theory(text: str, source: str = "<theory>") -> Theory:
    """Parse a theory file.

    Lines: ``theory NAME``, ``base A``, ``fun f : A -> B``,
    ``pred P : NEG, POS``, ``eq NAME [ctx] : TYPE LHS = RHS`` and
    ``axiom NAME <judgement>``.
    """
    name = "anonymous"
    bases: list[str] = []
    funcs, preds, eqs, axioms = {}, {}, {}, {}
    for line, raw in _lines(text):
        kw, _, rest = raw.strip().partition(" ")
        col = _col(raw, raw) + len(kw) + 1
        if kw == "theory":
            name = rest.strip()
        elif kw == "base":
            for b in rest.split():
                if not is_identifier(b):
                    raise ParseError(line, col, "a base type name", b, source)
                bases.append(b)
        elif kw == "fun":
            p = Parser(" " * (col - 1) + rest, source, line)
            f = p.ident("a function symbol")
            p.expect(":")
            dom = p.type_()
            p.expect("->")
            cod = p.type_()
            p.done()
            funcs[f] = (dom, cod)
        elif kw == "pred":
            p = Parser(" " * (col - 1) + rest, source, line)
            pn = p.ident("a predicate symbol")
            p.expect(":")
            neg = p.type_()
            p.expect(",")
            pos = p.type_()
            p.done()
            preds[pn] = (neg, pos)
        elif kw == "eq":
            p = Parser(" " * (col - 1) + rest, source, line)
            en = p.ident("an equation name")
            ctx = p.ctx()
            p.expect(":")
            ty = p.type_()
            lhs = p.term()
            p.expect("=")
            rhs = p.term()
            p.done()
            eqs[en] = Equation(ctx, ty, lhs, rhs)
        elif kw == "axiom":
            p = Parser(" " * (col - 1) + rest, source, line)
            an = p.ident("an axiom name")
            axioms[an] = p.judgement()
            p.done()
        else:
            raise ParseError(line, 1, "theory, base, fun, pred, eq or axiom", kw, source)
    return Theory(name, tuple(bases), funcs, eqs, preds, axioms)


# ---------------------------------------------------------------- proofs


@dataclass
class ProofEntry:
    name: str
    goal: Judgement
    steps: list[Step]
    line: int = 0


def parse_proofs(text: str, source: str = "<proof>") -> list[ProofEntry]:
    """Parse ``proof NAME`` / ``goal J`` / steps / ``qed`` blocks."""
    out: list[ProofEntry] = []
    cur: dict | None = None
    for line, raw in _lines(text):
        kw, _, rest = raw.strip().partition(" ")
        col = _col(raw, raw) + len(kw) + 1
        if kw == "proof":
            if cur is not None:
                raise ParseError(line, 1, "qed", "proof", source)
            cur = {"name": rest.strip(), "goal": None, "steps": [], "line": line}
        elif cur is None:
            raise ParseError(line, 1, "proof", kw, source)
        elif kw == "goal":
            cur["goal"] = _parse_at(rest, "judgement", line, col, source)
        elif kw == "qed":
            if cur["goal"] is None:
                raise ParseError(line, 1, "goal", "qed", source)
            out.append(ProofEntry(cur["name"], cur["goal"], parse_steps(cur["steps"]), cur["line"]))
            cur = None
        else:
            if cur["goal"] is None:
                raise ParseError(line, 1, "goal", kw, source)
            cur["steps"].append((line, raw.strip()))
    if cur is not None:
        raise ParseError(0, 0, "qed", "end of input", source)
    return out


# ---------------------------------------------------------------- models

_PAIR = re.compile(r"^(\d+)\s*<=\s*(\d+)$")


def parse_model(text: str, theory: Theory, source: str = "<model>") -> Model:
    """Parse a model file.

    ``base A N : 0<=1, 1<=2`` gives a preorder on N points generated by the
    listed pairs plus reflexivity (it is not closed under transitivity, so a
    non-transitive list is reported by ``check_model``).  ``fun f : 0 1 1``
    and ``pred P : 0 1`` give tables; predicate tables are indexed by
    ``neg * |pos| + pos``.
    """
    bases, funcs, preds = {}, {}, {}
    for line, raw in _lines(text):
        kw, _, rest = raw.strip().partition(" ")
        head, sep, body = rest.partition(":")
        parts = head.split()
        if kw == "base":
            if len(parts) != 2 or not parts[1].isdigit():
                raise ParseError(line, 1, "base NAME SIZE : pairs", raw.strip(), source)
            n = int(parts[1])
            pairs = []
            for item in body.split(","):
                item = item.strip()
                if not item:
                    continue
                m = _PAIR.match(item)
                if not m:
                    raise ParseError(line, raw.find(item) + 1, "i<=j", item, source)
                i, j = int(m.group(1)), int(m.group(2))
                if i >= n or j >= n:
                    raise ParseError(line, raw.find(item) + 1, f"elements below {n}", item, source)
                pairs.append((i, j))
            bases[parts[0]] = FinPreorder.from_pairs(n, pairs)
        elif kw in ("fun", "pred"):
            if len(parts) != 1 or not sep:
                raise ParseError(line, 1, f"{kw} NAME : table", raw.strip(), source)
            try:
                table = tuple(int(v) for v in body.split())
            except ValueError:
                raise ParseError(line, 1, "integers", body.strip(), source) from None
            (funcs if kw == "fun" else preds)[parts[0]] = table
        else:
            raise ParseError(line, 1, "base, fun or pred", kw, source)
    return Model(theory, bases, funcs, preds)


def show_model(m: Model) -> str:
    """Render a model in the file format accepted by ``parse_model``."""
    out = []
    for n, p in m.bases.items():
        pairs = ", ".join(f"{i}<={j}" for i, j in p.pairs())
        out.append(f"base {n} {p.size} : {pairs}".rstrip())
    for n, t in m.funcs.items():
        out.append(f"fun {n} : {' '.join(map(str, t))}")
    for n, t in m.preds.items():
        out.append(f"pred {n} : {' '.join(map(str, t))}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- files


@dataclass
class SourceFile:
    path: Path
    kind: str
    text: str = field(repr=False)

    @classmethod
    def read(cls, path: str | Path, kind: str) -> "SourceFile":
        p = Path(path)
        return cls(p, kind, p.read_text(encoding="utf-8"))


def load_theory(path: str | Path) -> Theory:
    src = SourceFile.read(path, "theory")
    return parse_theory(src.text, str(src.path))


def load_proofs(path: str | Path) -> list[ProofEntry]:
    src = SourceFile.read(path, "proof")
    return parse_proofs(src.text, str(src.path))


def load_model(path: str | Path, theory: Theory) -> Model:
    src = SourceFile.read(path, "model")
    return parse_model(src.text, theory, str(src.path))
