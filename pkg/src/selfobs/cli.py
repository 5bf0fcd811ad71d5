"""Command-line driver: ``selfobs check|verify|search``.

Exit codes: 0 when every check passes, 1 when a verdict fails or a
counterexample turns up, 2 on unreadable or invalid input.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from typing import Sequence

from . import diagonal as dg
from . import observation as ob
from .errors import BoundsTooLarge, InvalidSeed, ModelError, PremiseViolated
from .report import Report, render_structured, render_text
from .search import search_models
from .spaces import (
    StatePropertySpace,
    classicality_verdict,
    is_classical_property,
    state_determination_verdict,
)
from .speclang import ParseError, Workspace, load, merge, parse, validate
from .verdict import Verdict

OK, FAILED, INPUT_ERROR = 0, 1, 2


class InputError(Exception):
    pass


def _pair(text: str) -> tuple[str, str]:
    m, sep, a = text.partition(":")
    if not sep or not m or not a:
        raise argparse.ArgumentTypeError(f"expected STATE:PROPERTY, got {text!r}")
    return m, a


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--no-timing", action="store_true", help="omit durations from the report")
    common.add_argument("--strict-inversion", action="store_true",
                        help="inversions must also have single-valued entries")

    files = argparse.ArgumentParser(add_help=False)
    files.add_argument("files", nargs="+", metavar="FILE")
    files.add_argument("--relation", help="relation to use when a document declares several")
    files.add_argument("--allow-nonsurjective", action="store_true",
                       help="report a relation missing yes or no as a warning")

    p = argparse.ArgumentParser(prog="selfobs", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common, files], help="validate models and run checks")
    c.add_argument("--perfect", type=_pair, action="append", default=[], metavar="M:A",
                   help="is observer state M perfect for property A")
    c.add_argument("--classical-perfect", type=_pair, action="append", default=[], metavar="M:A")
    c.add_argument("--inversion", action="store_true", help="check the declared inversion map")
    c.add_argument("--knowledgable", action="store_true")
    c.add_argument("--state-determination", action="store_true")

    v = sub.add_parser("verify", parents=[common, files], help="verify one theorem on a model")
    v.add_argument("--theorem", type=int, choices=range(1, 6), required=True)
    v.add_argument("--property", help="classical system property (theorems 1, 2)")
    v.add_argument("--m", help="observer state perfect for the property (theorem 2)")
    v.add_argument("--mstar", help="observer state perfect for its inverse (theorem 2)")
    v.add_argument("--focus", help="classical observer property (theorems 3-5); default the indicator")
    v.add_argument("--quantify", choices=("diagonal", "full"), default="diagonal")

    s = sub.add_parser("search", parents=[common], help="enumerate or sample self models")
    s.add_argument("--max-states", type=int, required=True)
    s.add_argument("--mode", choices=("exhaustive", "sampled"))
    s.add_argument("--samples", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--quantify", choices=("diagonal", "full"), default="diagonal")
    s.add_argument("--workers", type=int, default=1)
    return p


def _load(args) -> tuple[Workspace, list[Verdict]]:
    docs = []
    for f in args.files:
        try:
            with open(f, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"{f}: {exc.strerror or exc}") from None
        try:
            docs.append(parse(text))
        except ParseError as exc:
            raise InputError(f"{f}:{exc.line}:{exc.col}: {exc.kind}: {exc.message}") from None
    try:
        doc = merge(docs)
    except ParseError as exc:
        raise InputError(f"{exc.line}:{exc.col}: {exc.kind}: {exc.message}") from None
    try:
        problems = validate(doc, args.allow_nonsurjective)
    except ModelError as exc:
        raise InputError(str(exc)) from None
    errors = [v for v in problems if v.severity == "error"]
    if errors:
        raise _Invalid(problems)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            ws = load(doc, args.allow_nonsurjective)
    except ModelError as exc:
        raise InputError(f"{type(exc).__name__}: {exc}") from None
    return ws, problems


class _Invalid(Exception):
    def __init__(self, verdicts: list[Verdict]):
        super().__init__("document failed validation")
        self.verdicts = verdicts


def _mode(args) -> str:
    return "strict" if args.strict_inversion else "relational"


def _observer(ws: Workspace, args) -> tuple[str, ob.ObserverModel, StatePropertySpace]:
    try:
        rid = ws.pick(args.relation)
    except ModelError as exc:
        raise InputError(str(exc)) from None
    return rid, ws.observers[rid], ws.systems[rid]


def _self_model(ws: Workspace, args) -> dg.SelfModel:
    rid, _, _ = _observer(ws, args)
    try:
        return ws.self_model(rid, args.focus, _mode(args))
    except (ModelError, KeyError) as exc:
        raise InputError(f"{type(exc).__name__}: {exc}") from None


def _guard(fn, *a, **kw):
    """Run a library check, turning lookup and model errors into input errors."""
    try:
        return fn(*a, **kw)
    except PremiseViolated:
        raise
    except (ModelError, KeyError) as exc:
        raise InputError(f"{type(exc).__name__}: {exc}") from None


def cmd_check(args, report: Report) -> None:
    ws, problems = _load(args)
    report.verdicts += problems
    for sid in sorted(ws.spaces):
        sp = ws.spaces[sid]
        for pid in sorted(sp.properties):
            if is_classical_property(sp, pid):
                v = classicality_verdict(sp, pid)
                report.verdicts.append(Verdict(v.check, v.ok, v.detail, dict(v.witness, entity=sid)))
    for rid in ws.relation_ids():
        m = ws.observers[rid]
        v = ob.indicator_partition_verdict(m.space, m.indicator)
        report.verdicts.append(Verdict(v.check, v.ok, v.detail, dict(v.witness, entity=m.id)))
    if args.perfect or args.classical_perfect or args.inversion or args.knowledgable:
        rid, model, system = _observer(ws, args)
        for m, a in args.perfect:
            ok = _guard(ob.is_perfect, model, system, m, a)
            report.verdicts.append(Verdict("perfect", ok, "", {"state": m, "property": a}))
        for m, a in args.classical_perfect:
            report.verdicts.append(_guard(ob.is_classical_perfect, model, system, m, a, _mode(args)))
        if args.inversion:
            if model.inversion is None:
                report.verdicts.append(Verdict.failed("inversion", f"no inversion declared on {model.id}"))
            else:
                report.verdicts.append(ob.is_inversion(model, model.inversion, _mode(args)))
        if args.knowledgable:
            report.verdicts.append(ob.is_knowledgable(model, system))
    if args.state_determination:
        for sid in sorted(ws.spaces):
            v = state_determination_verdict(ws.spaces[sid])
            report.verdicts.append(Verdict(v.check, v.ok, v.detail, dict(v.witness, entity=sid)))


def _premise(report: Report, theorem: int, exc: PremiseViolated) -> None:
    report.verdicts.append(Verdict(f"theorem{theorem}", True, f"premise violated: {exc}",
                                   {"premise": "violated"}, "info"))


def _classical_props(system: StatePropertySpace, args) -> list[str]:
    if args.property:
        if not _guard(is_classical_property, system, args.property):
            raise InputError(f"property {args.property!r} is not classical")
        return [args.property]
    props = [p for p in sorted(system.properties) if is_classical_property(system, p)]
    if not props:
        raise InputError(f"system {system.id!r} has no classical property")
    return props


def cmd_verify(args, report: Report) -> None:
    ws, problems = _load(args)
    report.verdicts += problems
    n = args.theorem
    if n in (1, 2):
        _, model, system = _observer(ws, args)
        props = _classical_props(system, args)
        for a in props:
            try:
                if n == 1:
                    report.verdicts.append(_guard(ob.verify_theorem1, model, system, a, _mode(args)))
                    continue
                if args.m or args.mstar:
                    if not (args.m and args.mstar):
                        raise InputError("theorem 2 needs both --m and --mstar")
                    pairs = [(args.m, args.mstar)]
                else:
                    pairs = ob.perfect_pairs(model, system, a)
                    if not pairs:
                        raise PremiseViolated(f"no perfect pair for {a} and its inverse")
                for m, ms in pairs:
                    report.verdicts.append(_guard(ob.verify_theorem2, model, system, a, m, ms, _mode(args)))
            except PremiseViolated as exc:
                _premise(report, n, exc)
        return
    sm = _self_model(ws, args)
    if n == 3:
        try:
            report.verdicts.append(dg.theorem3_check(sm))
        except PremiseViolated as exc:
            _premise(report, n, exc)
    elif n == 4:
        cert = dg.diagonal_contradiction(sm, args.quantify)
        report.certificates.append(cert)
        report.verdicts.append(Verdict("theorem4", cert.kind != "counterexample",
                                       f"certificate: {cert.kind}", {"focus": sm.focus}))
        report.verdicts.append(Verdict("replay", dg.replay_certificate(sm, cert), "", {}))
    else:
        v = dg.theorem5_check(sm, args.quantify)
        report.verdicts.append(v)
        if v.witness.get("horn") == "diagonal":
            report.certificates.append(dg.diagonal_contradiction(sm, args.quantify))


def cmd_search(args, report: Report) -> None:
    if args.workers < 1:
        raise InputError("--workers must be at least 1")
    try:
        report.search = search_models(args.max_states, args.mode, args.samples, args.seed,
                                      args.quantify, _mode(args), args.workers)
    except (BoundsTooLarge, InvalidSeed, ValueError) as exc:
        raise InputError(f"{type(exc).__name__}: {exc}") from None


COMMANDS = {"check": cmd_check, "verify": cmd_verify, "search": cmd_search}


def _flags(args) -> dict:
    skip = {"command", "files", "format", "no_timing"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip or v is None or v is False or v == []:
            continue
        if k in ("perfect", "classical_perfect"):
            v = [f"{m}:{a}" for m, a in v]
        out[k.replace("_", "-")] = v
    return out


def execute(argv: Sequence[str] | None = None) -> tuple[int, Report, argparse.Namespace]:
    """Parse arguments and run the command; returns (exit code, report, arguments)."""
    args = build_parser().parse_args(argv)
    report = Report(args.command, list(getattr(args, "files", [])), _flags(args))
    code = OK
    try:
        COMMANDS[args.command](args, report)
        failed = any(not v.ok and v.severity == "error" for v in report.verdicts)
        if report.search is not None and not report.search.ok:
            failed = True
        code = FAILED if failed else OK
    except _Invalid as exc:
        report.verdicts += exc.verdicts
        report.errors.append(str(exc))
        code = INPUT_ERROR
    except InputError as exc:
        report.errors.append(str(exc))
        code = INPUT_ERROR
    report.status = {OK: "pass", FAILED: "fail", INPUT_ERROR: "error"}[code]
    return code, report, args


def main(argv: Sequence[str] | None = None) -> int:
    code, report, args = execute(argv)
    render = render_structured if args.format == "structured" else render_text
    sys.stdout.write(render(report, timing=not args.no_timing))
    if code == INPUT_ERROR:
        for err in report.errors:
            print(f"selfobs: {err}", file=sys.stderr)
        for v in report.verdicts:
            if not v.ok and v.severity == "error":
                print(f"selfobs: {v.check}: {v.detail} at {v.witness.get('where', '?')}", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
