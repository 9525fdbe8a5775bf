"""Typed syntax tree for the Solidity fragment.

Types are immutable and structural (structs compare by name). Expression
and statement nodes are mutable: the resolver fills in the `ty` and `loc`
annotations and rewrites identifiers to their globally unique names.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class SolType:
    pass


@dataclass(frozen=True)
class ValueType(SolType):
    kind: str  # "address" | "int" | "uint" | "bool"

    def __str__(self) -> str:
        return self.kind


@dataclass(frozen=True)
class MappingType(SolType):
    key: SolType
    value: SolType

    def __str__(self) -> str:
        return f"mapping({self.key} => {self.value})"


@dataclass(frozen=True)
class DynArrayType(SolType):
    base: SolType

    def __str__(self) -> str:
        return f"{self.base}[]"


@dataclass(frozen=True)
class FixArrayType(SolType):
    base: SolType
    size: int

    def __str__(self) -> str:
        return f"{self.base}[{self.size}]"


@dataclass(frozen=True)
class StructType(SolType):
    name: str

    def __str__(self) -> str:
        return self.name


ADDRESS = ValueType("address")
INT = ValueType("int")
UINT = ValueType("uint")
BOOL = ValueType("bool")


def is_value_type(t: SolType) -> bool:
    return isinstance(t, ValueType)


def is_reference_type(t: SolType) -> bool:
    return not isinstance(t, ValueType)


def is_array_type(t: SolType) -> bool:
    return isinstance(t, (DynArrayType, FixArrayType))


def is_integerish(t: SolType) -> bool:
    return isinstance(t, ValueType) and t.kind in ("int", "uint", "address")


def array_base(t: SolType) -> SolType:
    if isinstance(t, (DynArrayType, FixArrayType)):
        return t.base
    raise TypeError(f"not an array type: {t}")


def value_compatible(a: SolType, b: SolType) -> bool:
    """Assignment/comparison compatibility: int, uint and address are
    interchangeable integers; everything else requires exact equality."""
    if is_integerish(a) and is_integerish(b):
        return True
    return a == b


def mangle(t: SolType) -> str:
    """Stable, readable name component for SMT datatype names. Fixed and
    dynamic arrays collapse to the same name (they share an encoding)."""
    if isinstance(t, ValueType):
        return t.kind
    if isinstance(t, MappingType):
        return f"map_{mangle(t.key)}_{mangle(t.value)}"
    if isinstance(t, (DynArrayType, FixArrayType)):
        return f"{mangle(t.base)}_arr"
    if isinstance(t, StructType):
        return t.name
    raise TypeError(f"unknown type {t}")


class Loc(enum.Enum):
    """Data-location category of an expression."""

    VALUE = "value"
    STORAGE = "storage"
    STORPTR = "storptr"
    MEMORY = "memory"


# ---------------------------------------------------------------------------
# Expressions


@dataclass
class Expr:
    line: int = field(default=0, kw_only=True)
    col: int = field(default=0, kw_only=True)
    ty: SolType | None = field(default=None, kw_only=True, compare=False)
    loc: Loc | None = field(default=None, kw_only=True, compare=False)


@dataclass
class IdentExpr(Expr):
    name: str
    # filled by the resolver: "state" | "local" | "param" | "return"
    decl_kind: str | None = field(default=None, compare=False)


@dataclass
class IntLitExpr(Expr):
    value: int


@dataclass
class BoolLitExpr(Expr):
    value: bool


@dataclass
class MemberExpr(Expr):
    base: Expr
    member: str


@dataclass
class IndexExpr(Expr):
    base: Expr
    index: Expr


@dataclass
class CondExpr(Expr):
    cond: Expr
    then: Expr
    other: Expr


@dataclass
class NewArrayExpr(Expr):
    elem_type: SolType
    length: Expr


@dataclass
class StructCtorExpr(Expr):
    name: str
    args: list[Expr]


@dataclass
class BinExpr(Expr):
    op: str  # + - == != < <= > >= && ||
    left: Expr
    right: Expr


@dataclass
class UnExpr(Expr):
    op: str  # ! -
    operand: Expr


# ---------------------------------------------------------------------------
# Statements


@dataclass
class Stmt:
    line: int = field(default=0, kw_only=True)


@dataclass
class DeclStmt(Stmt):
    var_type: SolType
    data_loc: str | None  # "storage" | "memory" | None
    name: str
    init: Expr | None


@dataclass
class AssignStmt(Stmt):
    lhs: list[Expr]
    rhs: list[Expr]
    tuple_form: bool = False


@dataclass
class PushStmt(Stmt):
    target: Expr
    value: Expr


@dataclass
class PopStmt(Stmt):
    target: Expr


@dataclass
class DeleteStmt(Stmt):
    target: Expr


@dataclass
class AssertStmt(Stmt):
    cond: Expr


# ---------------------------------------------------------------------------
# Declarations


@dataclass
class StructMember:
    name: str
    ty: SolType
    line: int = 0


@dataclass
class StructDef:
    name: str
    members: list[StructMember]
    line: int = 0

    def member(self, name: str) -> StructMember | None:
        for m in self.members:
            if m.name == name:
                return m
        return None


@dataclass
class StateVar:
    name: str
    ty: SolType
    line: int = 0


@dataclass
class Param:
    ty: SolType
    data_loc: str | None
    name: str
    line: int = 0
    name_source: str = ""  # pre-rename name, for reports and JSON keys

    @property
    def loc(self) -> Loc:
        if is_value_type(self.ty):
            return Loc.VALUE
        return Loc.STORPTR if self.data_loc == "storage" else Loc.MEMORY


@dataclass
class Function:
    name: str
    params: list[Param]
    returns: list[Param]
    body: list[Stmt]
    is_constructor: bool = False
    line: int = 0


@dataclass
class Contract:
    name: str
    structs: list[StructDef]
    state_vars: list[StateVar]
    constructor: Function | None
    functions: list[Function]
    warnings: list[str] = field(default_factory=list)
    resolved: bool = False

    def struct(self, name: str) -> StructDef | None:
        for s in self.structs:
            if s.name == name:
                return s
        return None

    def state_var(self, name: str) -> StateVar | None:
        for v in self.state_vars:
            if v.name == name:
                return v
        return None

    def all_functions(self) -> list[Function]:
        fns = list(self.functions)
        if self.constructor is not None:
            fns.insert(0, self.constructor)
        return fns

    def function(self, name: str) -> Function | None:
        if name == "constructor":
            return self.constructor
        for f in self.functions:
            if f.name == name:
                return f
        return None


def type_of(expr: Expr) -> tuple[SolType, Loc]:
    """Annotation lookup; total on resolved trees."""
    if expr.ty is None or expr.loc is None:
        raise ValueError("expression is not resolved")
    return expr.ty, expr.loc
