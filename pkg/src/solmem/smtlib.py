"""SMT-LIB v2 script emission.

Produces solver-agnostic scripts: one `declare-datatypes` command for all
single-constructor datatypes (selectors are prefixed with the datatype
name to keep them globally unique), `declare-const` per variable, one
`assert`, `check-sat`, and `get-model`. Constant arrays use the standard
`as const` form. No quantifiers are ever emitted.
"""

from __future__ import annotations

from .errors import IrError
from .ir import (
    ArrayRead,
    ArrayType,
    ArrayWrite,
    BinOp,
    BoolLit,
    BoolType,
    ConstArray,
    Construct,
    DatatypeType,
    Ident,
    IntLit,
    IntType,
    IrExpr,
    IrType,
    SmtProgram,
    Ite,
    Select,
    UnOp,
)


def sort_of(ty: IrType) -> str:
    if isinstance(ty, IntType):
        return "Int"
    if isinstance(ty, BoolType):
        return "Bool"
    if isinstance(ty, ArrayType):
        return f"(Array {sort_of(ty.index)} {sort_of(ty.elem)})"
    if isinstance(ty, DatatypeType):
        return ty.name
    raise IrError(f"unknown type {ty}")


def selector_name(datatype: str, member: str) -> str:
    return f"{datatype}.{member}"


_OPS = {
    "+": "+",
    "-": "-",
    "==": "=",
    "<": "<",
    "<=": "<=",
    ">": ">",
    ">=": ">=",
    "and": "and",
    "or": "or",
}


def expr_to_sexpr(e: IrExpr) -> str:
    if isinstance(e, Ident):
        return e.name
    if isinstance(e, IntLit):
        return str(e.value) if e.value >= 0 else f"(- {-e.value})"
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, ArrayRead):
        return f"(select {expr_to_sexpr(e.array)} {expr_to_sexpr(e.index)})"
    if isinstance(e, ArrayWrite):
        return (
            f"(store {expr_to_sexpr(e.array)} "
            f"{expr_to_sexpr(e.index)} {expr_to_sexpr(e.value)})"
        )
    if isinstance(e, ConstArray):
        sort = f"(Array {sort_of(e.index)} {sort_of(e.elem)})"
        return f"((as const {sort}) {expr_to_sexpr(e.value)})"
    if isinstance(e, Construct):
        if not e.args:
            return e.datatype
        return f"({e.datatype} {' '.join(expr_to_sexpr(a) for a in e.args)})"
    if isinstance(e, Select):
        return f"({selector_name(e.datatype, e.member)} {expr_to_sexpr(e.base)})"
    if isinstance(e, Ite):
        return (
            f"(ite {expr_to_sexpr(e.cond)} "
            f"{expr_to_sexpr(e.then)} {expr_to_sexpr(e.other)})"
        )
    if isinstance(e, BinOp):
        if e.op == "!=":
            return f"(distinct {expr_to_sexpr(e.left)} {expr_to_sexpr(e.right)})"
        op = _OPS.get(e.op)
        if op is None:
            raise IrError(f"unknown operator {e.op}")
        return f"({op} {expr_to_sexpr(e.left)} {expr_to_sexpr(e.right)})"
    if isinstance(e, UnOp):
        if e.op == "not":
            return f"(not {expr_to_sexpr(e.operand)})"
        if e.op == "neg":
            return f"(- {expr_to_sexpr(e.operand)})"
        raise IrError(f"unknown unary operator {e.op}")
    raise IrError(f"unknown expression {e!r}")


def datatype_block(program: SmtProgram) -> str:
    if not program.datatypes:
        return ""
    heads = " ".join(f"({dt.name} 0)" for dt in program.datatypes)
    bodies = []
    for dt in program.datatypes:
        sels = " ".join(
            f"({selector_name(dt.name, m)} {sort_of(t)})" for m, t in dt.members
        )
        bodies.append(f"(({dt.name} {sels}))")
    return f"(declare-datatypes ({heads}) ({' '.join(bodies)}))"


def emit_smtlib(program: SmtProgram, formula: IrExpr, get_model: bool = True) -> str:
    """Complete SMT-LIB session checking satisfiability of `formula` over
    the program's datatypes and declarations."""
    lines = ["(set-logic ALL)"]
    block = datatype_block(program)
    if block:
        lines.append(block)
    for name, ty in program.decls:
        lines.append(f"(declare-const {name} {sort_of(ty)})")
    lines.append(f"(assert {expr_to_sexpr(formula)})")
    lines.append("(check-sat)")
    if get_model:
        lines.append("(get-model)")
    return "\n".join(lines) + "\n"
