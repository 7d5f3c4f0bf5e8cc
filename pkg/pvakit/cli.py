###############################################################################
# pvakit: exact computer algebra for non-local Hamiltonian structures.
# Copyright © 2026 by the pvakit developers. All rights reserved.
# Distributed under the BSD 3-clause license; see LICENSE.md.
###############################################################################
"""
Command-line program
"""

import argparse
import json
import logging
import sys
from typing import List, Optional, Union

# package
from pvakit import catalog
from pvakit.config import ConfigError, Job, load_config
from pvakit.const import (
    CONSOLE,
    Engine,
    ExitCode,
    OutputFormats,
    PvakitError,
    SeedKind,
    Verdict,
)
from pvakit.diffalg import to_text as expr_text
from pvakit.dsl import DslError, compile_operator
from pvakit.lenard import Obstruction, lenard_run, verify_involution
from pvakit.pva import (
    BracketContext,
    IsotropyFailed,
    NotSkewadjoint,
    check_axioms,
    check_compatible,
    check_jacobi,
    check_symplectic,
    functional_bracket,
    skew_report,
)
from pvakit.ratop import RationalOp, frac_det, frac_inverse
from pvakit.report import CheckReport, HierarchyReport, exit_code, to_json, to_text
from pvakit.version import VERSION

__author__ = "pvakit developers"

SCRIPT_NAME = "pvakit"
_log = logging.getLogger(SCRIPT_NAME)

Report = Union[CheckReport, HierarchyReport]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- commands --


def _operator(job: Job, args) -> RationalOp:
    if args.expr:
        return compile_operator(job.alg, args.expr)
    return job.operator(args.op)


def _name(args) -> str:
    return args.expr or args.op


def _not_skew(check: str, operator: str, err: PvakitError) -> CheckReport:
    return CheckReport(
        check=check,
        operator=operator,
        result=Verdict.FAIL,
        details={"skewadjoint": False, "error": str(err)},
    )


def skew_main(job: Job, args) -> List[Report]:
    return [skew_report(_operator(job, args), job.floor)]


def jacobi_main(job: Job, args) -> List[Report]:
    engine = Engine(args.engine)
    try:
        reports = check_jacobi(_operator(job, args), engine, job.window, operator=_name(args))
    except (IsotropyFailed, NotSkewadjoint) as err:
        return [_not_skew("jacobi", _name(args), err)]
    if engine == Engine.BOTH:
        exact, windowed = reports
        same = [a.verdict for a in exact.verdicts] == [b.verdict for b in windowed.verdicts]
        if not same:
            _log.error("Exact and windowed engines disagree")
            for r in reports:
                r.details["engines_agree"] = False
                r.result = Verdict.FAIL
    return reports


def compat_main(job: Job, args) -> List[Report]:
    H, K = _operator(job, args), job.operator(args.other)
    text = f"{_name(args)} | {args.other}"
    try:
        return [check_compatible(H, K, job.window, operator=text)]
    except NotSkewadjoint as err:
        return [_not_skew("compatibility", text, err)]


def symplectic_main(job: Job, args) -> List[Report]:
    try:
        return [check_symplectic(_operator(job, args), job.window, operator=_name(args))]
    except NotSkewadjoint as err:
        return [_not_skew("symplectic", _name(args), err)]


def axioms_main(job: Job, args) -> List[Report]:
    return [check_axioms(BracketContext(_operator(job, args), job.floor))]


def det_main(job: Job, args) -> List[Report]:
    R = _operator(job, args)
    det = frac_det(R)
    return [
        CheckReport(
            check="det",
            operator=R.to_text(),
            result=Verdict.PASS,
            details={"det": det.to_text(), "zero": det.is_zero()},
        )
    ]


def invert_main(job: Job, args) -> List[Report]:
    R = _operator(job, args)
    inverse = frac_inverse(R)
    return [
        CheckReport(
            check="invert",
            operator=R.to_text(),
            result=Verdict.PASS,
            details={
                "fraction": inverse.to_dict(),
                "series": inverse.to_series(job.floor).to_text(),
                "floor": job.floor,
            },
        )
    ]


def eval_main(job: Job, args) -> List[Report]:
    R = _operator(job, args)
    details = {"series": R.to_series(job.floor).to_text(), "floor": job.floor}
    if args.f:
        if not R.is_differential():
            raise UsageError("op-eval --f applies only differential operators")
        image = R.A.apply([job.density(t) for t in args.f])
        details["image"] = [expr_text(job.alg, x) for x in image]
    return [
        CheckReport(check="op-eval", operator=R.to_text(), result=Verdict.PASS, details=details)
    ]


def bracket_main(job: Job, args) -> List[Report]:
    if not args.f or len(args.f) != 2:
        raise UsageError("bracket needs two densities: --f F --f G")
    f, g = (job.density(t) for t in args.f)
    value = functional_bracket(f, g, _operator(job, args)).normalized()
    return [
        CheckReport(
            check="bracket",
            operator=_name(args),
            result=Verdict.PASS,
            details={"bracket": expr_text(job.alg, value.density), "zero": value.is_zero()},
        )
    ]


def lenard_main(job: Job, args) -> List[Report]:
    config = job.lenard_config(max_steps=args.max_steps)
    if args.seed == SeedKind.DENSITY.value:
        if config.h0 is None:
            raise ConfigError("seed 'density' needs lenard.h0")
        config.seed_kernel = None
    elif args.seed == SeedKind.KERNEL.value and config.seed_kernel is None:
        raise ConfigError("seed 'kernel' needs lenard.seed_kernel")
    text = f"{job.config.lenard.H} | {job.config.lenard.K}"
    _log.info(f"[begin] lenard {text}")
    try:
        state = lenard_run(config)
    except Obstruction as err:
        _log.info("[ end ] lenard (obstruction)")
        return [HierarchyReport(operator=text, obstruction=str(err))]
    verify_involution(state, config.H, config.K, **config.solver_kw)
    _log.info(f"[ end ] lenard {text}")
    return [state.to_report(text)]


COMMANDS = {
    "check-skew": skew_main,
    "check-jacobi": jacobi_main,
    "check-compat": compat_main,
    "check-symplectic": symplectic_main,
    "check-axioms": axioms_main,
    "det": det_main,
    "invert": invert_main,
    "op-eval": eval_main,
    "lenard": lenard_main,
    "bracket": bracket_main,
}


def write_reports(reports: List[Report], fmt: str, ofile: Optional[str]) -> None:
    if fmt == OutputFormats.JSON.value:
        if len(reports) == 1:
            text = to_json(reports[0])
        else:
            data = [r.model_dump(mode="json", by_alias=True) for r in reports]
            text = json.dumps(data, sort_keys=True, indent=2)
    else:
        text = "\n\n".join(to_text(r) for r in reports)
    if ofile is None or ofile == CONSOLE:
        print(text)
    else:
        with open(ofile, "w", encoding="utf-8") as f:
            f.write(text + "\n")
        _log.info(f"Report written to '{ofile}'")


def overall_code(reports: List[Report]) -> int:
    verdicts = [r.verdict for r in reports]
    if Verdict.FAIL in verdicts:
        return exit_code(Verdict.FAIL)
    if Verdict.UNDETERMINED in verdicts:
        return exit_code(Verdict.UNDETERMINED)
    return exit_code(Verdict.PASS)


USAGE = f"""
This script checks non-local Hamiltonian structures and runs Lenard-Magri
recursions. Operators come from a JSON configuration file or from the bundled
examples (--example NAME; --list-examples shows them).

Commands:

    check-skew        Skewadjointness and skewsymmetry of the bracket
    check-jacobi      Jacobi identity (--engine exact|windowed|both)
    check-compat      Compatibility of --op and --other
    check-symplectic  Symplectic identity
    check-axioms      Sesquilinearity and Leibniz rules on random densities
    det               Dieudonne determinant
    invert            Inverse as a fraction and as a series
    op-eval           Series expansion; with --f, the image of a vector
    lenard            Lenard-Magri recursion (--max-steps, --seed kernel|density)
    bracket           Bracket of two local functionals (--f F --f G)

Operators are written with d for the derivative and primes for jets, e.g.

    {SCRIPT_NAME} check-jacobi --example sokolov --engine both
    {SCRIPT_NAME} check-jacobi --example gfz --expr "d^3 + u^2*d + u*u'"
    {SCRIPT_NAME} det --example nls --expr "[[u, 0], [v, u*d + 2*u']]"
    {SCRIPT_NAME} lenard nls.json --max-steps 4 -O nls-report.json

Exit codes: 0 all checks pass, 1 some check fails, 2 undetermined,
3 usage, parse or configuration error.
"""


def _add_log_options(parser: argparse.ArgumentParser) -> None:
    """Add logging-specific options to the argument parser

    Args:
        parser (argparse.ArgumentParser): Parser to modify
    """
    parser.add_argument("-q", "--quiet", action="store_true", help="Minimal logging")
    parser.add_argument(
        "-v",
        action="count",
        dest="vb",
        default=0,
        help="Increase verbosity (repeatable)",
    )


def _process_log_options(module_name: str, args: argparse.Namespace) -> logging.Logger:
    log = logging.getLogger(module_name)
    if not log.handlers:
        h = logging.StreamHandler()
        fmt = "[{levelname}] {asctime} ({name}) {message}"
        h.setFormatter(logging.Formatter(fmt, style="{"))
        log.addHandler(h)
    if args.quiet:
        log.setLevel(logging.CRITICAL)
    else:
        log.setLevel(
            (logging.ERROR, logging.WARNING, logging.INFO, logging.DEBUG)[min(args.vb, 3)]
        )
    return log


def _parser() -> argparse.ArgumentParser:
    p = _Parser(description="Check non-local Hamiltonian structures", prog=SCRIPT_NAME)
    p.add_argument("--usage", action="store_true", help="Print usage with examples")
    p.add_argument("command", nargs="?", choices=sorted(COMMANDS), help="What to do")
    p.add_argument(
        "config", nargs="?", help="JSON configuration file, - for stdin", metavar="FILE"
    )
    p.add_argument("--example", "-e", help="Use a bundled example instead of FILE")
    p.add_argument("--list-examples", action="store_true", help="List bundled examples")
    p.add_argument("--op", default="H", help="Operator name (default=H)")
    p.add_argument("--other", default="K", help="Second operator name (default=K)")
    p.add_argument("--expr", help="Operator given as text, instead of --op")
    p.add_argument("--f", action="append", help="Density or function (repeatable)")
    p.add_argument(
        "--engine",
        choices=sorted(e.value for e in Engine),
        default=Engine.EXACT.value,
        help="Jacobi engine (default=exact)",
    )
    p.add_argument("--max-steps", type=int, default=None, help="Lenard steps")
    p.add_argument(
        "--seed", choices=sorted(s.value for s in SeedKind), default=None, help="Lenard seed"
    )
    p.add_argument("--floor", type=int, default=None, help="Validity floor for series")
    p.add_argument(
        "--format",
        choices=sorted(f.value for f in OutputFormats),
        default=None,
        help="Report format (default=json)",
    )
    p.add_argument("-O", "--output-file", dest="ofile", default=None, help="Output file")
    p.add_argument("--version", help="Print version number and quit", action="store_true")
    _add_log_options(p)
    return p


def main(command_line=None) -> int:
    p = _parser()
    try:
        args = p.parse_args(args=command_line)
    except UsageError as err:
        print(f"{SCRIPT_NAME}: {err}. Try --usage for details.", file=sys.stderr)
        return ExitCode.USAGE
    if args.version:
        print(VERSION)
        return ExitCode.PASS
    if args.usage:
        print(USAGE)
        return ExitCode.PASS
    if args.list_examples:
        for name in catalog.names():
            print(f"{name:20s} {catalog.EXAMPLES[name]['description']}")
        return ExitCode.PASS
    if args.command is None:
        print("A command is required. Try --usage for details.\n", file=sys.stderr)
        p.print_help()
        return ExitCode.USAGE
    _process_log_options("pvakit", args)
    _log.info(f"[begin] {args.command}")
    try:
        if args.example:
            config = catalog.example_config(args.example)
        elif args.config == CONSOLE:
            config = load_config(sys.stdin)
        elif args.config:
            config = load_config(args.config)
        else:
            raise UsageError("a configuration FILE or --example is required")
        job = Job(config, floor=args.floor)
        reports = COMMANDS[args.command](job, args)
    except (UsageError, KeyError, ConfigError, DslError) as err:
        _log.info(f"[ end ] {args.command} (usage)")
        print(f"{SCRIPT_NAME}: {err}", file=sys.stderr)
        return ExitCode.USAGE
    except PvakitError as err:
        _log.info(f"[ end ] {args.command} (error)")
        _log.error(f"{args.command}: {err}")
        return ExitCode.USAGE
    fmt = args.format or job.config.format.value
    write_reports(reports, fmt, args.ofile or job.config.output)
    code = overall_code(reports)
    _log.info(f"[ end ] {args.command} ({code})")
    return code


if __name__ == "__main__":
    sys.exit(main())
