"""End-to-end verification pipeline.

parse -> resolve -> translate each function -> normalize -> SSA -> one
verification condition per assert -> external solver. Produces a
structured report that the CLI renders and the corpus harness consumes.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .errors import ParseError, ResolveError, SolmemError, UnsupportedError
from .normalize import normalize_lhs
from .parser import parse_source
from .resolver import resolve_and_check
from .smtlib import emit_smtlib
from .solver import SolverVerdict, check
from .ssa import to_ssa
from .translate import TranslatedFunction, translate_function
from .vcgen import vc_gen
from .ir import format_program


@dataclass
class AssertResult:
    line: int
    text: str
    verdict: str  # "verified" | "counterexample" | "timeout" | "unknown" | "error"
    model: dict[str, str] = field(default_factory=dict)
    detail: str = ""
    time_seconds: float = 0.0


@dataclass
class FunctionReport:
    name: str
    asserts: list[AssertResult] = field(default_factory=list)
    unsupported: str | None = None
    smt_scripts: list[str] = field(default_factory=list)
    ir_text: str | None = None


@dataclass
class VerifyReport:
    functions: list[FunctionReport] = field(default_factory=list)
    error: str | None = None
    unsupported: str | None = None
    warnings: list[str] = field(default_factory=list)

    @property
    def all_verified(self) -> bool:
        return self.error is None and self.unsupported is None and all(
            f.unsupported is None and all(a.verdict == "verified" for a in f.asserts)
            for f in self.functions
        )

    @property
    def any_violation(self) -> bool:
        return any(
            a.verdict == "counterexample" for f in self.functions for a in f.asserts
        )

    @property
    def any_timeout(self) -> bool:
        return any(a.verdict == "timeout" for f in self.functions for a in f.asserts)

    @property
    def any_unsupported(self) -> bool:
        return self.unsupported is not None or any(
            f.unsupported is not None for f in self.functions
        )

    def exit_code(self) -> int:
        if self.error is not None:
            return 2
        if self.any_violation:
            return 1
        if self.any_unsupported or self.any_timeout or not self.all_verified:
            return 2
        return 0


def _relevant_model(model: dict[str, str]) -> dict[str, str]:
    """Inputs only: drop SSA versions and machinery, keep pre-state."""
    out = {}
    for name, value in model.items():
        if "!" in name or "~" in name or name.startswith(("arrHeap_", "structHeap_")):
            continue
        out[name] = value
    return out


def verify_translated(
    tf: TranslatedFunction,
    solver_cmd: str | None = None,
    timeout: float = 60.0,
    collect_smt: bool = False,
) -> FunctionReport:
    report = FunctionReport(tf.name)
    normalized = normalize_lhs(tf.program)
    ssa = to_ssa(normalized)
    for info in tf.asserts:
        formula = vc_gen(ssa.program, info.ordinal)
        script = emit_smtlib(ssa.program, formula)
        if collect_smt:
            report.smt_scripts.append(script)
        start = time.monotonic()
        verdict: SolverVerdict = check(script, timeout, solver_cmd)
        elapsed = time.monotonic() - start
        if verdict.is_unsat:
            result = AssertResult(info.line, info.text, "verified")
        elif verdict.is_sat:
            result = AssertResult(
                info.line, info.text, "counterexample", model=_relevant_model(verdict.model)
            )
        elif verdict.kind == "timeout":
            result = AssertResult(info.line, info.text, "timeout")
        elif verdict.kind == "unknown":
            result = AssertResult(info.line, info.text, "unknown", detail=verdict.detail)
        else:
            result = AssertResult(info.line, info.text, "error", detail=verdict.detail)
        result.time_seconds = elapsed
        report.asserts.append(result)
    return report


def verify_source(
    text: str,
    solver_cmd: str | None = None,
    timeout: float = 60.0,
    unroll: int | None = None,
    collect_smt: bool = False,
    emit_ir: bool = False,
) -> VerifyReport:
    report = VerifyReport()
    try:
        contract = resolve_and_check(parse_source(text))
    except UnsupportedError as e:
        report.unsupported = str(e)
        return report
    except (ParseError, ResolveError) as e:
        report.error = str(e)
        return report
    report.warnings = list(contract.warnings)
    for fn in contract.all_functions():
        try:
            tf = translate_function(contract, fn, unroll)
        except UnsupportedError as e:
            report.functions.append(FunctionReport(fn.name, unsupported=str(e)))
            continue
        except SolmemError as e:
            report.error = f"{fn.name}: {e}"
            return report
        fn_report = verify_translated(tf, solver_cmd, timeout, collect_smt)
        if emit_ir:
            fn_report.ir_text = format_program(tf.program)
        report.functions.append(fn_report)
    return report
