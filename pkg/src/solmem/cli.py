"""Command-line entry points.

  solmem verify <file.sol>       check every assert with the SMT solver
  solmem run <file.sol>          execute through the reference interpreter
  solmem corpus <dir>            run a test corpus, print a summary table
  solmem fuzz                    differential fuzzing over generated programs

The solver command resolves from --solver-cmd, then $SOLMEM_SOLVER, then
z3/cvc5 on PATH, then the bundled Node.js backend.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import SolmemError
from .harness import render_table, report_json, run_corpus, run_fuzz
from .oracle import exec_function, run_constructor, serialize, serialize_storage
from .parser import parse_source
from .resolver import resolve_and_check
from .verify import verify_source


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--solver-cmd", help="solver command line (reads SMT-LIB on stdin)")
    p.add_argument("--timeout", type=float, default=60.0, help="per-query timeout in seconds")
    p.add_argument("--unroll", type=int, default=None, metavar="N",
                   help="bound element-wise copies of dynamic arrays by N (adds length assumptions)")


def cmd_verify(args) -> int:
    path = Path(args.file)
    try:
        text = path.read_text()
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    report = verify_source(
        text,
        solver_cmd=args.solver_cmd,
        timeout=args.timeout,
        unroll=args.unroll,
        collect_smt=args.emit_smt is not None,
        emit_ir=args.emit_ir,
    )
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if report.error is not None:
        print(f"{path}: error: {report.error}")
        return 2
    if report.unsupported is not None:
        print(f"{path}: {report.unsupported}")
        return 2
    for f in report.functions:
        if f.unsupported is not None:
            print(f"{f.name}: {f.unsupported}")
            continue
        if args.emit_ir and f.ir_text:
            print(f"; intermediate program for {f.name}")
            print(f.ir_text)
        for a in f.asserts:
            where = f"{f.name}:{a.line}"
            if a.verdict == "verified":
                print(f"{where}: assert({a.text}): verified [{a.time_seconds:.2f}s]")
            elif a.verdict == "counterexample":
                model = ", ".join(f"{k} = {v}" for k, v in sorted(a.model.items()))
                print(f"{where}: assert({a.text}): counterexample"
                      + (f" [{model}]" if model else ""))
            else:
                print(f"{where}: assert({a.text}): {a.verdict} {a.detail}")
        if args.emit_smt is not None:
            out_dir = Path(args.emit_smt)
            out_dir.mkdir(parents=True, exist_ok=True)
            for i, script in enumerate(f.smt_scripts):
                (out_dir / f"{path.stem}.{f.name}.{i}.smt2").write_text(script)
    return report.exit_code()


def cmd_run(args) -> int:
    path = Path(args.file)
    try:
        contract = resolve_and_check(parse_source(path.read_text()))
    except SolmemError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        if args.entry == "constructor":
            result = run_constructor(contract)
        else:
            fn = contract.function(args.entry)
            if fn is None:
                print(f"error: no function named {args.entry}", file=sys.stderr)
                return 2
            fn_args = json.loads(args.args) if args.args else []
            base = run_constructor(contract)
            result = exec_function(contract, args.entry, fn_args, initial=base.state)
    except SolmemError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    fn = contract.function(args.entry)
    returns = {}
    if fn is not None and fn.returns:
        returns = {
            (r.name_source or r.name): serialize(result.state, r.ty, result.returns[r.name_source or r.name])
            for r in fn.returns
        }
    payload = {
        "storage": serialize_storage(result),
        "returns": returns,
        "asserts": [
            {"index": a.ordinal, "line": a.line, "passed": a.passed} for a in result.asserts
        ],
    }
    print(json.dumps(payload, sort_keys=True, indent=2))
    failed = result.failed
    if failed is not None:
        print(f"assert failed at line {failed.line} (index {failed.ordinal})", file=sys.stderr)
        return 1
    return 0


def cmd_corpus(args) -> int:
    corpus_dir = Path(args.dir)
    if not corpus_dir.is_dir():
        print(f"error: {corpus_dir} is not a directory", file=sys.stderr)
        return 2
    classes = run_corpus(
        corpus_dir,
        solver_cmd=args.solver_cmd,
        timeout=args.timeout,
        unroll=args.unroll,
        jobs=args.jobs,
        cross_check_oracle=args.oracle,
    )
    print(render_table(classes))
    if args.json:
        Path(args.json).write_text(json.dumps(report_json(classes), indent=2, sort_keys=True))
    bad = sum(s.incorrect + s.invalid for s in classes.values())
    return 1 if bad else 0


def cmd_fuzz(args) -> int:
    outcomes = run_fuzz(
        range(args.start, args.start + args.count),
        size_budget=args.budget,
        solver_cmd=args.solver_cmd,
        timeout=args.timeout,
        jobs=args.jobs,
    )
    disagreements = [o for o in outcomes if not o.agreed]
    compared = sum(o.compared for o in outcomes)
    print(f"{len(outcomes)} seeds, {compared} asserts compared, "
          f"{len(disagreements)} disagreements")
    for o in disagreements:
        print(f"  seed {o.seed}: {o.detail}")
    if args.json:
        payload = {
            "schema": 1,
            "seeds": [
                {"seed": o.seed, "agreed": o.agreed, "compared": o.compared, "detail": o.detail}
                for o in outcomes
            ],
        }
        Path(args.json).write_text(json.dumps(payload, indent=2, sort_keys=True))
    return 1 if disagreements else 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="solmem", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="verify the asserts in a contract")
    p.add_argument("file")
    _add_solver_flags(p)
    p.add_argument("--emit-smt", metavar="DIR", help="write one .smt2 script per assert")
    p.add_argument("--emit-ir", action="store_true", help="print the intermediate program")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("run", help="execute a function through the reference interpreter")
    p.add_argument("file")
    p.add_argument("--entry", default="constructor", help="function to run (default: constructor)")
    p.add_argument("--args", help="JSON array of arguments")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("corpus", help="run a corpus directory")
    p.add_argument("dir")
    _add_solver_flags(p)
    p.add_argument("--jobs", type=int, default=4)
    p.add_argument("--json", metavar="PATH", help="write a JSON report")
    p.add_argument("--oracle", action="store_true",
                   help="also run self-contained tests through the reference interpreter")
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("fuzz", help="differential fuzzing against the reference interpreter")
    _add_solver_flags(p)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--budget", type=int, default=10, help="statements per generated program")
    p.add_argument("--jobs", type=int, default=4)
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_fuzz)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
