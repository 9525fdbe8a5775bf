"""Single static assignment conversion.

Input must be normalized (identifier assignment targets only). The output
is a flat, straight-line program: every version is assigned at most once,
if-then-else statements are dissolved by versioning both branches and
merging differing versions through `ite` expressions at the join, and
assumes/asserts nested under branches are guarded by their path
condition. Version k of `x` is named `x!k`; version 0 keeps the original
name, so never-assigned inputs are stable across the conversion.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import IrError
from .ir import (
    ArrayRead,
    ArrayWrite,
    Assert,
    Assign,
    Assume,
    BinOp,
    BoolLit,
    ConstArray,
    Construct,
    Ident,
    IfStmt,
    IntLit,
    IrExpr,
        Ite,
    Select,
    SmtProgram,
    UnOp,
    or_,
    not_,
)


def rename_idents(e: IrExpr, versions: dict[str, str]) -> IrExpr:
    if isinstance(e, Ident):
        return Ident(versions.get(e.name, e.name))
    if isinstance(e, (IntLit, BoolLit)):
        return e
    if isinstance(e, ArrayRead):
        return ArrayRead(rename_idents(e.array, versions), rename_idents(e.index, versions))
    if isinstance(e, ArrayWrite):
        return ArrayWrite(
            rename_idents(e.array, versions),
            rename_idents(e.index, versions),
            rename_idents(e.value, versions),
        )
    if isinstance(e, ConstArray):
        return ConstArray(e.index, e.elem, rename_idents(e.value, versions))
    if isinstance(e, Construct):
        return Construct(e.datatype, tuple(rename_idents(a, versions) for a in e.args))
    if isinstance(e, Select):
        return Select(rename_idents(e.base, versions), e.member, e.datatype)
    if isinstance(e, Ite):
        return Ite(
            rename_idents(e.cond, versions),
            rename_idents(e.then, versions),
            rename_idents(e.other, versions),
        )
    if isinstance(e, BinOp):
        return BinOp(e.op, rename_idents(e.left, versions), rename_idents(e.right, versions))
    if isinstance(e, UnOp):
        return UnOp(e.op, rename_idents(e.operand, versions))
    raise IrError(f"unknown expression {e!r}")


@dataclass
class SsaResult:
    program: SmtProgram
    final_versions: dict[str, str]  # original name -> name of last version


class _Converter:
    def __init__(self, program: SmtProgram):
        self.source = program
        self.out = program.copy_shell()
        self.counters: dict[str, int] = {}
        self.taken = {name for name, _ in program.decls}

    def fresh_version(self, base: str) -> str:
        k = self.counters.get(base, 0) + 1
        name = f"{base}!{k}"
        while name in self.taken:
            k += 1
            name = f"{base}!{k}"
        self.counters[base] = k
        self.taken.add(name)
        ty = self.source.decl_type(base)
        if ty is None:
            raise IrError(f"assignment to undeclared identifier {base}")
        self.out.declare(name, ty)
        return name

    def convert(self, stmts, versions: dict[str, str], path: IrExpr | None) -> None:
        for s in stmts:
            if isinstance(s, Assign):
                if not isinstance(s.lhs, Ident):
                    raise IrError("to_ssa requires a normalized program")
                rhs = rename_idents(s.rhs, versions)
                name = self.fresh_version(s.lhs.name)
                versions[s.lhs.name] = name
                self.out.stmts.append(Assign(Ident(name), rhs))
            elif isinstance(s, Assume):
                cond = rename_idents(s.cond, versions)
                if path is not None:
                    cond = or_(not_(path), cond)
                self.out.stmts.append(Assume(cond))
            elif isinstance(s, Assert):
                cond = rename_idents(s.cond, versions)
                if path is not None:
                    cond = or_(not_(path), cond)
                self.out.stmts.append(Assert(cond, s.line, s.comment))
            elif isinstance(s, IfStmt):
                cond = rename_idents(s.cond, versions)
                then_path = cond if path is None else BinOp("and", path, cond)
                else_path = not_(cond) if path is None else BinOp("and", path, not_(cond))
                then_versions = dict(versions)
                else_versions = dict(versions)
                self.convert(s.then, then_versions, then_path)
                self.convert(s.other, else_versions, else_path)
                merged = set(then_versions) | set(else_versions)
                for var in sorted(merged):
                    tv = then_versions.get(var, var)
                    ev = else_versions.get(var, var)
                    if tv == ev:
                        versions[var] = tv
                        continue
                    name = self.fresh_version(var)
                    self.out.stmts.append(
                        Assign(Ident(name), Ite(cond, Ident(tv), Ident(ev)))
                    )
                    versions[var] = name
            else:
                raise IrError(f"unknown statement {s!r}")


def to_ssa(program: SmtProgram) -> SsaResult:
    """Flatten `program` into straight-line single-assignment form."""
    conv = _Converter(program)
    versions: dict[str, str] = {}
    conv.convert(program.stmts, versions, None)
    final = {name: versions.get(name, name) for name, _ in program.decls}
    return SsaResult(conv.out, final)
