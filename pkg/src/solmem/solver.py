"""Client for an external SMT-LIB v2 solver process.

Each query launches one solver process, writes the script on stdin, and
parses the verdict from stdout. The command is configurable via the
`SOLMEM_SOLVER` environment variable or an explicit argument; by default
a `z3` or `cvc5` binary on PATH is used, falling back to the bundled
Node.js shim around the z3-solver WASM distribution.
"""

from __future__ import annotations

import os
import shlex
import shutil
import subprocess
from dataclasses import dataclass, field
from pathlib import Path

from .errors import SolverFailure

KILL_GRACE_SECONDS = 2.0


@dataclass
class SolverVerdict:
    kind: str  # "unsat" | "sat" | "unknown" | "timeout" | "error"
    model: dict[str, str] = field(default_factory=dict)
    detail: str = ""

    @property
    def is_sat(self) -> bool:
        return self.kind == "sat"

    @property
    def is_unsat(self) -> bool:
        return self.kind == "unsat"


def _bundled_shim() -> Path:
    return Path(__file__).parent / "backends" / "z3smt2.cjs"


_default_cmd_cache: list[str] | None = None


def default_solver_command() -> list[str]:
    """Resolve the solver command: $SOLMEM_SOLVER, a z3/cvc5 binary on
    PATH, or the bundled Node.js shim."""
    global _default_cmd_cache
    env = os.environ.get("SOLMEM_SOLVER")
    if env:
        return shlex.split(env)
    if _default_cmd_cache is not None:
        return list(_default_cmd_cache)
    if shutil.which("z3"):
        _default_cmd_cache = ["z3", "-in"]
    elif shutil.which("cvc5"):
        _default_cmd_cache = ["cvc5", "--lang", "smt2"]
    elif shutil.which("node") and _bundled_shim().exists():
        _default_cmd_cache = ["node", str(_bundled_shim())]
    else:
        raise SolverFailure(
            "no SMT solver found: install z3 or cvc5, run "
            "`npm install -g z3-solver` for the bundled backend, or set "
            "SOLMEM_SOLVER / --solver-cmd"
        )
    return list(_default_cmd_cache)


def resolve_command(solver_cmd: str | None) -> list[str]:
    if solver_cmd:
        return shlex.split(solver_cmd)
    return default_solver_command()


def check(script: str, timeout_seconds: float = 60.0, solver_cmd: str | None = None) -> SolverVerdict:
    """Run one SMT-LIB session and classify the outcome.

    The child process is killed (and reaped) if it exceeds the timeout.
    """
    cmd = resolve_command(solver_cmd)
    try:
        proc = subprocess.Popen(
            cmd,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
        )
    except OSError as e:
        return SolverVerdict("error", detail=f"failed to launch solver {cmd[0]}: {e}")
    try:
        out, err = proc.communicate(script, timeout=timeout_seconds)
    except subprocess.TimeoutExpired:
        proc.kill()
        try:
            proc.communicate(timeout=KILL_GRACE_SECONDS)
        except subprocess.TimeoutExpired:
            pass
        return SolverVerdict("timeout")
    verdict = None
    for line in out.splitlines():
        token = line.strip()
        if token in ("sat", "unsat", "unknown"):
            verdict = token
            break
    if verdict is None:
        return SolverVerdict(
            "error",
            detail=f"solver produced no verdict (exit {proc.returncode}): "
            f"{out.strip()[:500]} {err.strip()[:500]}".strip(),
        )
    if verdict == "sat":
        return SolverVerdict("sat", model=parse_model(out))
    if verdict == "unknown":
        return SolverVerdict("unknown", detail=out.strip()[:500])
    return SolverVerdict("unsat")


# ---------------------------------------------------------------------------
# Model parsing


def _tokenize_sexpr(text: str) -> list[str]:
    tokens: list[str] = []
    i = 0
    while i < len(text):
        c = text[i]
        if c in "()":
            tokens.append(c)
            i += 1
        elif c.isspace():
            i += 1
        elif c == ";":
            while i < len(text) and text[i] != "\n":
                i += 1
        elif c == '"':
            j = i + 1
            while j < len(text) and text[j] != '"':
                j += 1
            tokens.append(text[i : j + 1])
            i = j + 1
        elif c == "|":
            j = i + 1
            while j < len(text) and text[j] != "|":
                j += 1
            tokens.append(text[i : j + 1])
            i = j + 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in "();":
                j += 1
            tokens.append(text[i:j])
            i = j
    return tokens


def _parse_sexprs(tokens: list[str]):
    pos = 0

    def parse():
        nonlocal pos
        if tokens[pos] == "(":
            pos += 1
            items = []
            while pos < len(tokens) and tokens[pos] != ")":
                items.append(parse())
            pos += 1  # closing paren
            return items
        atom = tokens[pos]
        pos += 1
        return atom

    out = []
    while pos < len(tokens):
        out.append(parse())
    return out


def _render(node) -> str:
    if isinstance(node, str):
        return node
    return "(" + " ".join(_render(n) for n in node) + ")"


def parse_model(text: str) -> dict[str, str]:
    """Best-effort name -> value extraction from get-model output.

    Integers and booleans become plain text ("3", "-4", "true"); values
    of other sorts (datatypes, arrays) are preserved as raw s-expression
    text.
    """
    start = text.find("(")
    if start < 0:
        return {}
    try:
        nodes = _parse_sexprs(_tokenize_sexpr(text[start:]))
    except IndexError:
        return {}
    model: dict[str, str] = {}

    def visit(node):
        if not isinstance(node, list):
            return
        if len(node) == 5 and node[0] == "define-fun" and node[2] == []:
            name, value = node[1], node[4]
            if isinstance(value, list) and len(value) == 2 and value[0] == "-":
                model[name] = f"-{value[1]}"
            elif isinstance(value, str):
                model[name] = value
            else:
                model[name] = _render(value)
        else:
            for child in node:
                visit(child)

    for n in nodes:
        visit(n)
    return model
