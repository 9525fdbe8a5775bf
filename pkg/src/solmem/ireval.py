"""Concrete big-step evaluator for IR programs.

Used as the testing oracle for the LHS normalization and SSA passes and
for cross-checking translated programs on concrete inputs. Arrays are
total maps (a default plus finitely many exceptions); datatype values are
constructor tuples. Variables that are declared but never assigned read
as type defaults, so evaluation is deterministic; tests may seed the
environment to model free inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .errors import IrError
from .ir import (
    ArrayRead,
    ArrayType,
    ArrayWrite,
    Assert,
    Assign,
    Assume,
    BinOp,
    BoolLit,
    BoolType,
    ConstArray,
    Construct,
    DatatypeType,
    Ident,
    IfStmt,
    IntLit,
    IntType,
    IrExpr,
    IrStmt,
    IrType,
    Ite,
    Select,
    SmtProgram,
    UnOp,
)


@dataclass
class VArray:
    """Total map: `entries` overrides `default` at finitely many keys."""

    default: Any
    entries: dict = field(default_factory=dict)

    def read(self, key):
        return self.entries.get(key, self.default)

    def write(self, key, value) -> "VArray":
        new = dict(self.entries)
        new[key] = value
        return VArray(self.default, new)


@dataclass
class VData:
    datatype: str
    members: tuple

    def replace(self, index: int, value) -> "VData":
        ms = list(self.members)
        ms[index] = value
        return VData(self.datatype, tuple(ms))


def values_equal(a, b) -> bool:
    """Semantic equality; array exceptions equal to the default collapse."""
    if isinstance(a, VArray) and isinstance(b, VArray):
        if not values_equal(a.default, b.default):
            # Different defaults with finite exceptions can only be equal
            # over a finite index type; our index types are infinite (Int).
            return False
        keys = set(a.entries) | set(b.entries)
        return all(values_equal(a.read(k), b.read(k)) for k in keys)
    if isinstance(a, VData) and isinstance(b, VData):
        return (
            a.datatype == b.datatype
            and len(a.members) == len(b.members)
            and all(values_equal(x, y) for x, y in zip(a.members, b.members))
        )
    if isinstance(a, bool) != isinstance(b, bool):
        return False
    return a == b


def default_value(ty: IrType, program: SmtProgram):
    if isinstance(ty, IntType):
        return 0
    if isinstance(ty, BoolType):
        return False
    if isinstance(ty, ArrayType):
        return VArray(default_value(ty.elem, program))
    if isinstance(ty, DatatypeType):
        dt = program.datatype(ty.name)
        if dt is None:
            raise IrError(f"unknown datatype {ty.name}")
        return VData(dt.name, tuple(default_value(t, program) for _, t in dt.members))
    raise IrError(f"no default for type {ty}")


@dataclass
class EvalResult:
    status: str  # "ok" | "assume-violated" | "assert-failed"
    env: dict
    failed_index: int | None = None  # ordinal of the violated assume/assert


class _Machine:
    def __init__(self, program: SmtProgram, env: dict | None):
        self.program = program
        self.env: dict = dict(env) if env else {}
        self.assert_ordinal = 0
        self.assume_ordinal = 0

    # -- expressions --------------------------------------------------

    def eval(self, e: IrExpr):
        if isinstance(e, Ident):
            if e.name in self.env:
                return self.env[e.name]
            ty = self.program.decl_type(e.name)
            if ty is None:
                raise IrError(f"undeclared identifier {e.name}")
            val = default_value(ty, self.program)
            self.env[e.name] = val
            return val
        if isinstance(e, IntLit):
            return e.value
        if isinstance(e, BoolLit):
            return e.value
        if isinstance(e, ArrayRead):
            arr = self.eval(e.array)
            idx = self._key(self.eval(e.index))
            if not isinstance(arr, VArray):
                raise IrError("array read on non-array value")
            return arr.read(idx)
        if isinstance(e, ArrayWrite):
            arr = self.eval(e.array)
            if not isinstance(arr, VArray):
                raise IrError("array write on non-array value")
            return arr.write(self._key(self.eval(e.index)), self.eval(e.value))
        if isinstance(e, ConstArray):
            return VArray(self.eval(e.value))
        if isinstance(e, Construct):
            return VData(e.datatype, tuple(self.eval(a) for a in e.args))
        if isinstance(e, Select):
            base = self.eval(e.base)
            if not isinstance(base, VData):
                raise IrError(f"member select on non-datatype value: {e}")
            dt = self.program.datatype(e.datatype)
            if dt is None:
                raise IrError(f"unknown datatype {e.datatype}")
            return base.members[dt.member_index(e.member)]
        if isinstance(e, Ite):
            return self.eval(e.then) if self.eval(e.cond) else self.eval(e.other)
        if isinstance(e, BinOp):
            return self._binop(e)
        if isinstance(e, UnOp):
            v = self.eval(e.operand)
            if e.op == "not":
                return not v
            if e.op == "neg":
                return -v
            raise IrError(f"unknown unary operator {e.op}")
        raise IrError(f"unknown expression {e!r}")

    @staticmethod
    def _key(v):
        if isinstance(v, (int, bool)):
            return v
        raise IrError("array index must be an integer or boolean")

    def _binop(self, e: BinOp):
        op = e.op
        a = self.eval(e.left)
        b = self.eval(e.right)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "==":
            return values_equal(a, b)
        if op == "!=":
            return not values_equal(a, b)
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        if op == ">=":
            return a >= b
        if op == "and":
            return bool(a) and bool(b)
        if op == "or":
            return bool(a) or bool(b)
        raise IrError(f"unknown operator {op}")

    # -- statements ---------------------------------------------------

    def assign(self, lhs: IrExpr, value) -> None:
        if isinstance(lhs, Ident):
            self.env[lhs.name] = value
            return
        if isinstance(lhs, ArrayRead):
            arr = self.eval(lhs.array)
            if not isinstance(arr, VArray):
                raise IrError("array write on non-array value")
            self.assign(lhs.array, arr.write(self._key(self.eval(lhs.index)), value))
            return
        if isinstance(lhs, Select):
            base = self.eval(lhs.base)
            if not isinstance(base, VData):
                raise IrError("member write on non-datatype value")
            dt = self.program.datatype(lhs.datatype)
            if dt is None:
                raise IrError(f"unknown datatype {lhs.datatype}")
            self.assign(lhs.base, base.replace(dt.member_index(lhs.member), value))
            return
        if isinstance(lhs, Ite):
            target = lhs.then if self.eval(lhs.cond) else lhs.other
            self.assign(target, value)
            return
        raise IrError(f"invalid assignment target {lhs!r}")

    def run(self, stmts) -> EvalResult | None:
        for s in stmts:
            r = self.step(s)
            if r is not None:
                return r
        return None

    def _skip_counts(self, stmts) -> None:
        """Ordinals are static (program-text positions), so a skipped
        branch still advances the counters."""
        for s in stmts:
            if isinstance(s, Assume):
                self.assume_ordinal += 1
            elif isinstance(s, Assert):
                self.assert_ordinal += 1
            elif isinstance(s, IfStmt):
                self._skip_counts(s.then)
                self._skip_counts(s.other)

    def step(self, s: IrStmt) -> EvalResult | None:
        if isinstance(s, Assign):
            self.assign(s.lhs, self.eval(s.rhs))
            return None
        if isinstance(s, IfStmt):
            if self.eval(s.cond):
                result = self.run(s.then)
                self._skip_counts(s.other)
            else:
                self._skip_counts(s.then)
                result = self.run(s.other)
            return result
        if isinstance(s, Assume):
            idx = self.assume_ordinal
            self.assume_ordinal += 1
            if not self.eval(s.cond):
                return EvalResult("assume-violated", self.env, idx)
            return None
        if isinstance(s, Assert):
            idx = self.assert_ordinal
            self.assert_ordinal += 1
            if not self.eval(s.cond):
                return EvalResult("assert-failed", self.env, idx)
            return None
        raise IrError(f"unknown statement {s!r}")


def eval_ir(program: SmtProgram, env: dict | None = None) -> EvalResult:
    """Run `program` to completion or to the first violated assume/assert.

    `env` seeds identifiers (free inputs); identifiers that are declared
    but absent read as type defaults.
    """
    m = _Machine(program, env)
    result = m.run(program.stmts)
    return result if result is not None else EvalResult("ok", m.env)
