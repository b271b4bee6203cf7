"""Command line interface.

    kindmc verify <file> [--mode bmc|kind|kind-inv] [--max-k N]
                  [--width-int N --width-long N] [--solver-cmd TMPL]
                  [--timeout SECS] [--oracle-width N]
                  [--dump-goto|--dump-inv|--dump-vc|--dump-smt]
                  [--dump-phase base|forward|inductive] [--dump-k N]
    kindmc bench <dir> [--workers N] [--score-weights a,b,c,d]
                  [--json PATH] [--csv PATH] [verify options]

Exit codes: 0 the property holds, 10 a counterexample was found,
2 unknown, 1 usage or internal error.
"""

from __future__ import annotations

import argparse
import sys

from . import bench as bench_mod
from . import invgen
from .driver import (FALSE, TRUE, InternalCheckError, VerifyOptions,
                     format_counterexample, verify)
from .frontend import SourceError, WidthConfig, parse_and_check
from .goto_ir import analyze_loops, lower
from .kind_transform import (make_base_case, make_forward_condition,
                             make_inductive_step)
from .solver import emit_smtlib
from .vcgen import build_vc, simplify_assumes, to_ssa

EXIT_TRUE = 0
EXIT_FALSE = 10
EXIT_UNKNOWN = 2
EXIT_ERROR = 1

_PHASE_MAKERS = {
    "base": make_base_case,
    "forward": make_forward_condition,
    "inductive": make_inductive_step,
}


def _add_verify_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mode", choices=("bmc", "kind", "kind-inv"),
                        default="kind-inv")
    parser.add_argument("--max-k", type=int, default=100)
    parser.add_argument("--width-int", type=int, default=32)
    parser.add_argument("--width-long", type=int, default=64)
    parser.add_argument("--solver-cmd", default=None,
                        help="external solver template; '{file}' expands to a "
                             "script path, otherwise the script is piped in")
    parser.add_argument("--timeout", type=float, default=900.0,
                        help="wall-clock budget per task, seconds")
    parser.add_argument("--oracle-width", type=int, default=0,
                        help="discharge VCs with the exhaustive enumerator, "
                             "capping symbol widths at N bits")


def _options(args) -> VerifyOptions:
    return VerifyOptions(
        mode=args.mode, max_k=args.max_k,
        widths=WidthConfig(args.width_int, args.width_long),
        solver_cmd=args.solver_cmd, oracle_width=args.oracle_width,
        timeout=args.timeout)


def _cmd_verify(args) -> int:
    try:
        text = open(args.file).read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    opts = _options(args)
    try:
        if args.dump_goto or args.dump_inv or args.dump_vc or args.dump_smt or args.dump_phase:
            return _dump(text, args, opts)
        outcome = verify(text, opts)
    except SourceError as exc:
        print(exc.format(args.file), file=sys.stderr)
        return EXIT_ERROR
    except (InternalCheckError, RuntimeError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(f"verdict: {outcome.verdict}  phase: {outcome.phase}  k: {outcome.k_final}")
    if outcome.reason:
        print(f"reason: {outcome.reason}")
    if outcome.vacuous:
        print("note: an assume reduced to false; the program is vacuous")
    if outcome.counterexample is not None:
        print(format_counterexample(outcome.counterexample))
    if outcome.verdict == TRUE:
        return EXIT_TRUE
    if outcome.verdict == FALSE:
        return EXIT_FALSE
    return EXIT_UNKNOWN


def _dump(text: str, args, opts: VerifyOptions) -> int:
    program = parse_and_check(text, opts.widths)
    gp = lower(program, opts.widths)
    loops = analyze_loops(gp)
    if args.dump_inv or (args.mode == "kind-inv" and not args.dump_goto):
        invs = invgen.propagate(gp, loops)
        if args.dump_inv:
            sys.stdout.write(invs.dump(gp))
            return EXIT_TRUE
        gp = invgen.instrument(gp, invs)
    if args.dump_goto:
        sys.stdout.write(gp.dump())
        return EXIT_TRUE
    phases = [args.dump_phase] if args.dump_phase else list(_PHASE_MAKERS)
    for phase in phases:
        lfp = _PHASE_MAKERS[phase](gp, args.dump_k)
        if args.dump_phase and not (args.dump_vc or args.dump_smt):
            sys.stdout.write(lfp.dump())
            continue
        ssa = simplify_assumes(to_ssa(lfp))
        vc = build_vc(ssa)
        if args.dump_smt:
            sys.stdout.write(emit_smtlib(vc))
        else:
            sys.stdout.write(ssa.dump())
    return EXIT_TRUE


def _cmd_bench(args) -> int:
    try:
        score = bench_mod.ScoreConfig.parse(args.score_weights)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    opts = _options(args)
    report = bench_mod.run_corpus(args.dir, opts, score_config=score,
                                  workers=args.workers)
    print(report.table())
    if args.json:
        bench_mod.write_json(report, args.json)
    if args.csv:
        bench_mod.write_csv(report, args.csv)
    return EXIT_TRUE


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="kindmc",
                                     description="k-induction model checker for a mini-C language")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="verify a single task")
    p_verify.add_argument("file")
    _add_verify_args(p_verify)
    p_verify.add_argument("--dump-goto", action="store_true",
                          help="print the (instrumented) GOTO-program and exit")
    p_verify.add_argument("--dump-inv", action="store_true",
                          help="print inferred invariants per program point and exit")
    p_verify.add_argument("--dump-vc", action="store_true",
                          help="print the phase SSA programs and exit")
    p_verify.add_argument("--dump-smt", action="store_true",
                          help="print the phase SMT-LIB2 scripts and exit")
    p_verify.add_argument("--dump-phase", choices=tuple(_PHASE_MAKERS), default=None,
                          help="restrict dumps to one phase program")
    p_verify.add_argument("--dump-k", type=int, default=1,
                          help="unwinding depth used by dumps")
    p_verify.set_defaults(func=_cmd_verify)

    p_bench = sub.add_parser("bench", help="run a task directory and score it")
    p_bench.add_argument("dir")
    _add_verify_args(p_bench)
    p_bench.add_argument("--workers", type=int, default=1)
    p_bench.add_argument("--score-weights", default="2,1,-12,-6",
                         help="correct-true,correct-false,wrong-true,wrong-false")
    p_bench.add_argument("--json", default=None)
    p_bench.add_argument("--csv", default=None)
    p_bench.set_defaults(func=_cmd_bench)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
