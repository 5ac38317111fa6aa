"""Command-line front end.

Exit codes: 0 success (proof accepted, sequent holds, countermodel found,
sweep clean), 1 negative outcome (rejection, counterexample, nothing
found within bounds, violations), 2 usage, parse, config or budget errors.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
import time
from pathlib import Path
from typing import Any, Sequence

from .errors import BudgetExhausted, Diagnostic, DfolError, ParseError, SCHEMA_VERSION, SizeGuardError
from .kernel import check_derivation
from .parser import parse_judgement
from .printer import show_judgement
from .search import SearchBounds, find_countermodel, soundness_sweep
from .semantics import check_entailment_semantics, check_model
from .surface import load_model, load_proofs, load_theory, show_model
from .tactics import elaborate, run_script

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2

DEFAULTS = {"max_size": 2, "max_models": 10_000, "budget_ms": 60_000, "seed": 0}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 already; keep the message uniform
        self.print_usage(sys.stderr)
        raise _UsageError(message)


def _emit(args, record: dict[str, Any], text: str) -> int:
    record = {"version": SCHEMA_VERSION, "command": args.command, **record}
    if args.json:
        print(json.dumps(record, indent=2, sort_keys=True))
    elif text:
        print(text)
    return record["exit"]


def _error(args, diag: Diagnostic, text: str | None = None) -> int:
    rec = {"status": "error", "exit": EXIT_ERROR, "diagnostics": [diag.to_json()]}
    if args.json:
        return _emit(args, rec, "")
    print(text or str(diag), file=sys.stderr)
    return EXIT_ERROR


def _parse_diag(e: ParseError) -> Diagnostic:
    return Diagnostic("parse", "syntax-error", str(e), (e.line, e.column), e.expected, e.found or None)


def load_config(path: str | None) -> dict[str, int]:
    """Read ``[search]`` keys max_size, max_models, budget_ms, seed from an ini-style file."""
    out = dict(DEFAULTS)
    if path is None:
        return out
    cp = configparser.ConfigParser()
    if not cp.read(path, encoding="utf-8"):
        raise FileNotFoundError(path)
    if cp.has_section("search"):
        for key in DEFAULTS:
            if cp.has_option("search", key):
                out[key] = cp.getint("search", key)
        unknown = set(cp.options("search")) - set(DEFAULTS)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return out


def _bounds(args) -> SearchBounds:
    cfg = load_config(args.config)
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    if cfg["max_size"] < 0:
        raise ValueError("--max-size must be non-negative")
    return SearchBounds(cfg["max_size"], cfg["max_models"], cfg["budget_ms"], cfg["seed"])


def _sequent(text: str):
    p = Path(text)
    if text.endswith(".seq") and p.exists():
        text = p.read_text(encoding="utf-8")
    return parse_judgement(text.strip(), "<sequent>")


# ---------------------------------------------------------------- commands


def cmd_check(args) -> int:
    theory = load_theory(args.theory)
    entries = load_proofs(args.proof)
    if args.name:
        entries = [e for e in entries if e.name in args.name]
    results, lines, failed = [], [], False
    t0 = time.perf_counter()
    for e in entries:
        try:
            d = run_script(theory, e.goal, e.steps)
        except DfolError as err:
            failed = True
            results.append({"name": e.name, "status": "rejected", "diagnostic": err.diag.to_json()})
            lines.append(f"FAIL {e.name}\n{err.diag}")
            continue
        results.append({"name": e.name, "status": "accepted", "nodes": d.size(),
                        "rules": sorted(d.rules_used())})
        lines.append(f"ok   {e.name} ({d.size()} nodes)")
    secs = time.perf_counter() - t0
    lines.append(f"{len(entries) - sum(r['status'] != 'accepted' for r in results)}/{len(entries)} "
                 f"proofs accepted in {secs:.3f}s")
    code = EXIT_FAIL if failed else EXIT_OK
    rec = {"status": "fail" if failed else "ok", "exit": code, "proofs": results,
           "diagnostics": [r["diagnostic"] for r in results if "diagnostic" in r]}
    return _emit(args, rec, "\n".join(lines))


def cmd_model_check(args) -> int:
    theory = load_theory(args.theory)
    model = load_model(args.model, theory)
    j = _sequent(args.sequent)
    try:
        check_model(theory, model, skip_axioms=args.skip_axiom or ())
    except DfolError as err:
        return _error(args, err.diag, f"invalid model\n{err.diag}")
    from .formulas import wf_judgement
    wf_judgement(theory, j)
    w = check_entailment_semantics(model, j)
    if w is None:
        return _emit(args, {"status": "ok", "exit": EXIT_OK, "holds": True, "diagnostics": []},
                     f"holds: {show_judgement(j)}")
    diag = Diagnostic("model-check", "counterexample", "the sequent fails in the model",
                      found=show_judgement(j), witness=w)
    witness = ", ".join(f"{k}={v}" for k, v in w.items())
    return _emit(args, {"status": "fail", "exit": EXIT_FAIL, "holds": False, "witness": w,
                        "diagnostics": [diag.to_json()]},
                 f"fails: {show_judgement(j)}\nwitness: {witness}")


def cmd_countermodel(args) -> int:
    theory = load_theory(args.theory)
    j = _sequent(args.sequent)
    b = _bounds(args)
    try:
        found = find_countermodel(theory, j, b)
    except BudgetExhausted as e:
        diag = Diagnostic("countermodel", "budget-exhausted", str(e), witness=e.progress)
        return _error(args, diag, f"budget exhausted: {e} (progress: {e.progress})")
    if found is None:
        return _emit(args, {"status": "fail", "exit": EXIT_FAIL, "found": False, "diagnostics": []},
                     f"no countermodel with bases of size <= {b.max_size}")
    witness = ", ".join(f"{k}={v}" for k, v in found.assignment.items())
    text = (f"countermodel found after {found.models_tried} model(s)\n"
            f"{show_model(found.model)}witness: {witness}")
    return _emit(args, {"status": "ok", "exit": EXIT_OK, "found": True, "model": found.model.describe(),
                        "witness": found.assignment, "diagnostics": []}, text)


def cmd_elaborate(args) -> int:
    theory = load_theory(args.theory)
    goal = _sequent(args.goal)
    try:
        d, local = elaborate(theory, args.rule, goal, " ".join(args.args))
    except DfolError as err:
        return _emit(args, {"status": "fail", "exit": EXIT_FAIL, "diagnostics": [err.diag.to_json()]},
                     f"rule does not apply\n{err.diag}")
    premises = {n: j for n, j in local.axioms.items() if n not in theory.axioms}
    diag = check_derivation(local, d)
    code = EXIT_OK if diag is None else EXIT_FAIL
    text = d.render()
    if premises:
        text += "\npremises:\n" + "\n".join(f"  {n}: {show_judgement(j)}" for n, j in premises.items())
    if diag is not None:
        text += f"\nkernel rejected the expansion\n{diag}"
    return _emit(args, {"status": "ok" if diag is None else "fail", "exit": code, "derivation": d.to_json(),
                        "premises": [show_judgement(j) for j in premises.values()],
                        "diagnostics": [] if diag is None else [diag.to_json()]}, text)


def cmd_sweep(args) -> int:
    theory = load_theory(args.theory)
    b = _bounds(args)
    corpus = []
    for path in args.proofs:
        for e in load_proofs(path):
            try:
                corpus.append(run_script(theory, e.goal, e.steps))
            except DfolError as err:
                return _error(args, err.diag, f"proof {e.name} is rejected; sweep not run\n{err.diag}")
    try:
        report = soundness_sweep(theory, corpus, b)
    except BudgetExhausted as e:
        diag = Diagnostic("sweep", "budget-exhausted", str(e), witness=e.progress)
        return _error(args, diag, f"budget exhausted: {e} (progress: {e.progress})")
    code = EXIT_OK if report.clean else EXIT_FAIL
    text = (f"{report.models} models x {report.judgements} judgements = {report.checks} checks, "
            f"{len(report.violations)} violations{' (sampled)' if report.sampled else ''} "
            f"in {report.seconds:.2f}s")
    for v in report.violations:
        text += f"\n  derivation {v.derivation} node {list(v.path)}: {v.judgement}\n    {v.assignment}"
    return _emit(args, {"status": "ok" if report.clean else "fail", "exit": code, "report": report.to_json(),
                        "diagnostics": []}, text)


# ---------------------------------------------------------------- argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dfol", description="Check directed first-order logic proofs and finite models.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, search=False):
        sp.add_argument("--json", action="store_true", help="emit a machine-readable record")
        if search:
            sp.add_argument("--max-size", dest="max_size", type=int, help="largest preorder per base type")
            sp.add_argument("--max-models", dest="max_models", type=int, help="sample beyond this many models")
            sp.add_argument("--budget-ms", dest="budget_ms", type=int, help="time budget in milliseconds")
            sp.add_argument("--seed", type=int, help="seed for model sampling")
            sp.add_argument("--config", help="ini file with a [search] section")

    c = sub.add_parser("check", help="check the proofs in a proof file")
    c.add_argument("theory")
    c.add_argument("proof")
    c.add_argument("--name", action="append", help="only check the named proof (repeatable)")
    common(c)
    c.set_defaults(func=cmd_check)

    m = sub.add_parser("model-check", help="evaluate a sequent in a model file")
    m.add_argument("theory")
    m.add_argument("model")
    m.add_argument("sequent", help="a judgement, or a .seq file containing one")
    m.add_argument("--skip-axiom", action="append", help="do not require this axiom to hold")
    common(m)
    m.set_defaults(func=cmd_model_check)

    k = sub.add_parser("countermodel", help="search finite preorder models for a countermodel")
    k.add_argument("theory")
    k.add_argument("sequent")
    common(k, search=True)
    k.set_defaults(func=cmd_countermodel)

    e = sub.add_parser("elaborate", help="expand one rule application into kernel rules")
    e.add_argument("theory")
    e.add_argument("rule")
    e.add_argument("goal")
    e.add_argument("args", nargs="*")
    common(e)
    e.set_defaults(func=cmd_elaborate)

    s = sub.add_parser("sweep", help="check every proof judgement in every small model")
    s.add_argument("theory")
    s.add_argument("proofs", nargs="+")
    common(s, search=True)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(f"dfol: {e}", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except ParseError as e:
        return _error(args, _parse_diag(e))
    except (OSError, configparser.Error, ValueError) as e:
        return _error(args, Diagnostic("cli", "input-error", str(e)))
    except SizeGuardError as e:
        return _error(args, Diagnostic("cli", "size-guard", str(e)))
    except DfolError as e:
        return _error(args, e.diag)


if __name__ == "__main__":
    sys.exit(main())
