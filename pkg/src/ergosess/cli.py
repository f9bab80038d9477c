"""Command-line driver: check, recon, run and eq.

Exit status: 0 on success, 1 on a static error, 2 on a lexical or parse
error, 3 when a run gets stuck or exceeds its budget.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from . import arith as ar
from . import interp
from . import syntax as sx
from .parser import (LexError, ParseError, parse_prop, parse_signature, parse_type,
                     render_diagnostic, render_signature)
from .recon import CostModel, ReconError, reconstruct
from .typecheck import CheckError, check_signature
from .typeeq import type_equal

OK, STATIC, SYNTAX, RUNTIME = 0, 1, 2, 3


@dataclass
class CliConfig:
    command: str
    path: str
    syntax: str = "implicit"
    cost: str = "none"
    verbose: bool = False
    json: bool = False
    budget: int = 1_000_000
    target: str = ""
    indices: tuple[int, ...] = ()
    types: tuple[str, str] = ("", "")
    vars: tuple[str, ...] = ()
    constraint: str = "true"


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="ergosess", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("path")
        p.add_argument("--syntax", choices=("implicit", "explicit"), default="implicit")
        p.add_argument("--cost", default="none", help="none | send | recv | flat:r")
        p.add_argument("-v", "--verbose", action="store_true")
        p.add_argument("--json", action="store_true")
        return p

    common(sub.add_parser("check", help="type check every definition"))
    common(sub.add_parser("recon", help="print the reconstructed explicit program"))
    run = common(sub.add_parser("run", help="execute a closed process"))
    run.add_argument("target", help="process name")
    run.add_argument("indices", nargs="*", type=int)
    run.add_argument("--budget", type=int, default=1_000_000)
    eq = sub.add_parser("eq", help="decide equality of two types")
    eq.add_argument("path")
    eq.add_argument("left")
    eq.add_argument("right")
    eq.add_argument("--vars", default="", help="comma-separated index variables")
    eq.add_argument("--constraint", default="true")
    eq.add_argument("--json", action="store_true")
    return top


def config_from_args(argv=None) -> CliConfig:
    a = build_parser().parse_args(argv)
    cfg = CliConfig(a.command, a.path, json=a.json)
    if a.command == "eq":
        cfg.types = (a.left, a.right)
        cfg.vars = tuple(v.strip() for v in a.vars.split(",") if v.strip())
        cfg.constraint = a.constraint
        return cfg
    cfg.syntax, cfg.cost, cfg.verbose = a.syntax, a.cost, a.verbose
    if a.command == "run":
        cfg.target, cfg.indices, cfg.budget = a.target, tuple(a.indices), a.budget
    return cfg


@dataclass
class Outcome:
    status: int
    out: list[str] = field(default_factory=list)
    err: list[str] = field(default_factory=list)


def dispatch(cfg: CliConfig) -> Outcome:
    with open(cfg.path) as fh:
        source = fh.read()
    res = Outcome(OK)
    diag = lambda e: res.err.append(render_diagnostic(e, source, cfg.path))  # noqa: E731
    try:
        sig = parse_signature(source)
        CostModel.parse(cfg.cost)
        match cfg.command:
            case "check":
                return _check(cfg, sig, res, diag)
            case "recon":
                sx.check_signature_wellformed(sig)
                res.out.append(render_signature(reconstruct(sig, cfg.cost)))
            case "run":
                return _run(cfg, sig, res, diag)
            case "eq":
                return _eq(cfg, sig, res)
    except (LexError, ParseError) as e:
        diag(e)
        res.status = SYNTAX
    except (sx.SignatureError, ReconError, CheckError, ar.ArithError) as e:
        diag(e)
        res.status = STATIC
    except ValueError as e:
        res.err.append(f"error: {e}")
        res.status = STATIC
    return res


def _check(cfg, sig, res, diag) -> Outcome:
    report = check_signature(sig, cfg.syntax, cfg.cost)
    if report.error is not None:
        diag(report.error)
        res.status = STATIC
        return res
    for v in report.verdicts:
        res.out.append(v.json() if cfg.json else v.line())
        if not v.ok:
            diag(v.error)
    if cfg.verbose and not cfg.json:
        res.out.append(f"reconstruction: {report.recon_ms:.1f} ms")
    res.status = OK if report.ok else STATIC
    return res


def _run(cfg, sig, res, diag) -> Outcome:
    report = check_signature(sig, cfg.syntax, cfg.cost)
    if not report.ok:
        for e in [report.error, *report.errors().values()]:
            if e is not None:
                diag(e)
        res.status = STATIC
        return res
    try:
        conf = interp.spawn_config(report.signature, cfg.target, cfg.indices)
        result = interp.run(conf, cfg.budget)
    except (interp.NonEmptyContext, interp.ConstraintUnsatisfied, KeyError) as e:
        res.err.append(f"error: {e}")
        res.status = STATIC
        return res
    except (interp.RuntimeFault, interp.BudgetExhausted) as e:
        res.err.append(f"error:runtime: {e}")
        res.status = RUNTIME
        return res
    if cfg.json:
        res.out.append(json.dumps({"trace": result.trace, "work": result.work,
                                   "potential": result.potential, "steps": result.steps}))
    else:
        res.out.append(result.render())
        if cfg.verbose:
            res.out.append(f"steps={result.steps}")
    return res


def _eq(cfg, sig, res) -> Outcome:
    sx.check_signature_wellformed(sig)
    esig = sx.elaborate_internal_names(sig)
    text = cfg.constraint
    try:
        # spans refer to the command-line argument, not the file
        C = parse_prop(text)
        parsed = []
        for text in cfg.types:
            parsed.append(parse_type(text))
            sx.check_type_valid(esig, cfg.vars, C, parsed[-1])
    except (LexError, ParseError, sx.SignatureError) as e:
        res.err.append(render_diagnostic(e, text, "<argument>"))
        res.status = STATIC if isinstance(e, sx.SignatureError) else SYNTAX
        return res
    a, b = parsed
    r = type_equal(esig, cfg.vars, C, a, b)
    if cfg.json:
        res.out.append(json.dumps({"verdict": r.verdict.value, "path": list(r.path),
                                   "reason": r.reason}))
    else:
        res.out.append(r.verdict.value)
        if not r.equal:
            res.out.append("path: " + (" ".join(r.path) or "(top)"))
            res.out.append(f"reason: {r.reason}")
    res.status = OK if r.equal else STATIC
    return res


def main(argv=None) -> int:
    res = dispatch(config_from_args(argv))
    for line in res.out:
        print(line)
    for line in res.err:
        print(line, file=sys.stderr)
    return res.status

