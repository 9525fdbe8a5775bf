"""Translation from resolved contracts to SMT-based programs.

Storage entities become SMT values: storage arrays and structs are
single-constructor datatypes (value semantics, deep copy on assignment,
non-aliasing by construction), mappings are SMT arrays. Memory entities
live behind integer pointers into per-type heaps (`arrHeap_T`,
`structHeap_S`), with a monotone allocation counter `refcnt` generating
fresh addresses. Local storage pointers are integer arrays spelling a
path through the per-type storage tree; they are created by packing a
storage lvalue and dereferenced by unpacking into a conditional over the
tree's leaves.

Indexed array reads are length-guarded: an index outside [0, length)
yields the element type's default value. Pointer dereferences read the
backing store raw, so an element removed by pop keeps its value for
dangling storage pointers while indexing sees a defaulted slot.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import IrError, UnsupportedError
from . import ir
from .ir import (
    PTR,
    ArrayRead,
    ArrayType,
    ArrayWrite,
    Assert,
    Assign,
    Assume,
    BinOp,
    BoolLit,
    ConstArray,
    Construct,
    DatatypeDef,
    DatatypeType,
    Ident,
    IntLit,
    IrExpr,
    IrType,
    Ite,
    Select,
    SmtProgram,
    UnOp,
)
from .printer import expr_to_source
from .sol_ast import (
    BOOL,
    AssertStmt,
    AssignStmt,
    BinExpr,
    BoolLitExpr,
    CondExpr,
    Contract,
    DeclStmt,
    DeleteStmt,
    DynArrayType,
    Expr,
    FixArrayType,
    Function,
    IdentExpr,
    IndexExpr,
    IntLitExpr,
    Loc,
    MappingType,
    MemberExpr,
    NewArrayExpr,
    PopStmt,
    PushStmt,
    SolType,
    StructCtorExpr,
    StructType,
    UnExpr,
    is_reference_type,
    is_value_type,
    mangle,
)
from .storage_tree import (
    StorageTree,
    TreeNode,
    build_storage_tree,
    default_context_name,
    default_context_tree,
)

REFCNT = "refcnt"

_BINOPS = {"+": "+", "-": "-", "==": "==", "!=": "!=", "<": "<", "<=": "<=", ">": ">", ">=": ">=", "&&": "and", "||": "or"}


@dataclass
class AssertInfo:
    ordinal: int
    line: int
    text: str


@dataclass
class TranslatedFunction:
    name: str
    program: SmtProgram
    asserts: list[AssertInfo]
    is_constructor: bool = False


@dataclass
class Operand:
    """Assignment operand: type, location category, and at least one of a
    source expression (for packing) or an already-translated term."""

    ty: SolType
    loc: Loc
    ast: Expr | None = None
    ir_value: IrExpr | None = None
    ir_target: IrExpr | None = None


class Translator:
    """Per-function translation context: one SMT program, one allocation
    counter, deduplicated datatype/heap declarations, a fresh-name supply,
    and cached storage trees."""

    def __init__(self, contract: Contract, unroll: int | None = None):
        if not contract.resolved:
            raise IrError("contract must be resolved before translation")
        self.contract = contract
        self.unroll = unroll
        self.program = SmtProgram()
        self.stmts: list[ir.IrStmt] = self.program.stmts
        self.fresh_counter = 0
        self.trees: dict[SolType, StorageTree] = {}
        self.asserts: list[AssertInfo] = []
        self.program.declare(REFCNT, ir.INT)

    # ------------------------------------------------------------------
    # helpers

    def fresh(self, prefix: str, ty: IrType) -> Ident:
        self.fresh_counter += 1
        name = f"{prefix}~{self.fresh_counter}"
        self.program.declare(name, ty)
        return Ident(name)

    def emit(self, stmt: ir.IrStmt) -> None:
        self.stmts.append(stmt)

    def struct_def(self, name: str):
        sd = self.contract.struct(name)
        if sd is None:
            raise IrError(f"unknown struct {name}")
        return sd

    def allocate(self, prefix: str = "newptr") -> Ident:
        """refcnt := refcnt + 1; p := refcnt — fresh, never-aliasing address."""
        self.emit(Assign(Ident(REFCNT), ir.add(Ident(REFCNT), IntLit(1))))
        ptr = self.fresh(prefix, ir.INT)
        self.emit(Assign(ptr, Ident(REFCNT)))
        return ptr

    # ------------------------------------------------------------------
    # type mapping

    def map_type(self, ty: SolType, loc: Loc) -> IrType:
        if is_value_type(ty):
            return ir.BOOL if ty == BOOL else ir.INT
        if loc == Loc.STORPTR:
            return PTR
        if isinstance(ty, MappingType):
            if loc != Loc.STORAGE:
                raise IrError("mappings exist only in storage")
            return ArrayType(self.map_type(ty.key, Loc.VALUE), self.map_type(ty.value, Loc.STORAGE))
        if isinstance(ty, (DynArrayType, FixArrayType)):
            base = ty.base
            if loc == Loc.STORAGE:
                elem = self.map_type(base, Loc.STORAGE if is_reference_type(base) else Loc.VALUE)
                name = f"StorArr_{mangle(base)}"
                self.program.add_datatype(
                    DatatypeDef(name, (("arr", ArrayType(ir.INT, elem)), ("length", ir.INT)))
                )
                return DatatypeType(name)
            if loc == Loc.MEMORY:
                elem = self.map_type(base, Loc.MEMORY if is_reference_type(base) else Loc.VALUE)
                name = f"MemArr_{mangle(base)}"
                self.program.add_datatype(
                    DatatypeDef(name, (("arr", ArrayType(ir.INT, elem)), ("length", ir.INT)))
                )
                self.program.declare(f"arrHeap_{mangle(base)}", ArrayType(ir.INT, DatatypeType(name)))
                return ir.INT
        if isinstance(ty, StructType):
            sd = self.struct_def(ty.name)
            if loc == Loc.STORAGE:
                name = f"StorStruct_{ty.name}"
                if self.program.datatype(name) is None:
                    members = tuple(
                        (
                            m.name,
                            self.map_type(
                                m.ty, Loc.STORAGE if is_reference_type(m.ty) else Loc.VALUE
                            ),
                        )
                        for m in sd.members
                    )
                    self.program.add_datatype(DatatypeDef(name, members))
                return DatatypeType(name)
            if loc == Loc.MEMORY:
                name = f"MemStruct_{ty.name}"
                if self.program.datatype(name) is None:
                    members = tuple(
                        (
                            m.name,
                            self.map_type(
                                m.ty, Loc.MEMORY if is_reference_type(m.ty) else Loc.VALUE
                            ),
                        )
                        for m in sd.members
                    )
                    self.program.add_datatype(DatatypeDef(name, members))
                self.program.declare(f"structHeap_{ty.name}", ArrayType(ir.INT, DatatypeType(name)))
                return ir.INT
        raise IrError(f"no type mapping for {ty} in {loc}")

    def stor_datatype(self, ty: SolType) -> str:
        mapped = self.map_type(ty, Loc.STORAGE)
        assert isinstance(mapped, DatatypeType)
        return mapped.name

    def mem_datatype(self, ty: SolType) -> str:
        if isinstance(ty, (DynArrayType, FixArrayType)):
            self.map_type(ty, Loc.MEMORY)
            return f"MemArr_{mangle(ty.base)}"
        if isinstance(ty, StructType):
            self.map_type(ty, Loc.MEMORY)
            return f"MemStruct_{ty.name}"
        raise IrError(f"no memory datatype for {ty}")

    def heap_ident(self, ty: SolType) -> Ident:
        self.map_type(ty, Loc.MEMORY)
        if isinstance(ty, (DynArrayType, FixArrayType)):
            return Ident(f"arrHeap_{mangle(ty.base)}")
        if isinstance(ty, StructType):
            return Ident(f"structHeap_{ty.name}")
        raise IrError(f"no heap for {ty}")

    def heap_read(self, ty: SolType, pointer: IrExpr) -> IrExpr:
        return ArrayRead(self.heap_ident(ty), pointer)

    # ------------------------------------------------------------------
    # storage trees, pack, unpack

    def tree_for(self, target: SolType) -> StorageTree:
        tree = self.trees.get(target)
        if tree is None:
            tree = build_storage_tree(self.contract, target)
            if tree.is_empty:
                tree = default_context_tree(target)
                self.program.declare(
                    default_context_name(target),
                    ArrayType(ir.INT, self.map_type(target, Loc.STORAGE)),
                )
            self.trees[target] = tree
        return tree

    @staticmethod
    def _base_chain(expr: Expr) -> list[Expr]:
        """Innermost-first list of base expressions: for ss[8].ts[5] the
        chain is [ss, ss[8], ss[8].ts, ss[8].ts[5]]."""
        chain: list[Expr] = []
        node = expr
        while True:
            chain.append(node)
            if isinstance(node, MemberExpr):
                node = node.base
            elif isinstance(node, IndexExpr):
                node = node.base
            else:
                break
        chain.reverse()
        return chain

    def _mapping_key_to_int(self, node: TreeNode, key: IrExpr) -> IrExpr:
        if node.kind == "mapping" and isinstance(node.ty, MappingType) and node.ty.key == BOOL:
            return Ite(key, IntLit(1), IntLit(0))
        return key

    def _step_index_read(self, node: TreeNode, subexpr: IrExpr, ptr: IrExpr, depth: int) -> IrExpr:
        """Index step of unpack: raw backing read for storage arrays,
        plain array read for mappings (bool keys decoded from 0/1)."""
        idx: IrExpr = ArrayRead(ptr, IntLit(depth))
        if node.kind == "array":
            assert node.ty is not None
            dt = self.stor_datatype(node.ty)
            return ArrayRead(Select(subexpr, "arr", dt), idx)
        if node.kind == "mapping":
            assert isinstance(node.ty, MappingType)
            if node.ty.key == BOOL:
                idx = BinOp("!=", idx, IntLit(0))
            return ArrayRead(subexpr, idx)
        raise IrError(f"unexpected node kind {node.kind}")

    def pack(self, expr: Expr) -> IrExpr:
        """Path array uniquely identifying the storage entity `expr`
        denotes: edge ordinals at identifier/member steps, translated
        index expressions at index steps."""
        chain = self._base_chain(expr)
        root_expr = chain[0]
        if not isinstance(root_expr, IdentExpr):
            raise IrError(f"cannot pack non-lvalue {expr_to_source(expr)}")
        if root_expr.decl_kind == "state":
            return self._pack_from_root(chain, expr)
        if root_expr.loc == Loc.STORPTR:
            return self._repack(root_expr, chain[1:], expr)
        raise IrError(f"cannot pack {expr_to_source(expr)}")

    def _pack_from_root(self, chain: list[Expr], expr: Expr) -> IrExpr:
        tree = self.tree_for(expr.ty)
        if tree.default_context:
            raise IrError("state-variable path cannot live in a default context")
        node = tree.root
        result: IrExpr = ConstArray(ir.INT, ir.INT, IntLit(0))
        for depth, step in enumerate(chain):
            if isinstance(step, IdentExpr):
                edge = self._edge_by_label(node, step.name)
                result = ArrayWrite(result, IntLit(depth), IntLit(edge.ordinal))
            elif isinstance(step, MemberExpr):
                edge = self._edge_by_label(node, step.member)
                result = ArrayWrite(result, IntLit(depth), IntLit(edge.ordinal))
            elif isinstance(step, IndexExpr):
                edge = node.edges[0]
                idx = self._mapping_key_to_int(node, self.expr(step.index))
                result = ArrayWrite(result, IntLit(depth), idx)
            else:
                raise IrError(f"cannot pack step {step!r}")
            node = edge.target
        return result

    @staticmethod
    def _edge_by_label(node: TreeNode, label: str):
        for e in node.edges:
            if e.label == label:
                return e
        raise IrError(f"storage tree has no edge labeled {label}")

    def _repack(self, root: IdentExpr, suffix: list[Expr], expr: Expr) -> IrExpr:
        """Rebase a pointer-rooted lvalue (e.g. p.member[i]) into a path
        for the composite's own type: for every leaf the pointer may
        reference, re-encode the prefix ordinals in the target tree and
        append the suffix steps at the leaf's depth."""
        source_tree = self.tree_for(root.ty)
        if source_tree.default_context:
            raise UnsupportedError(
                "unsupported: storage pointer access through a default context "
                "cannot be re-packed",
                expr.line,
            )
        target_tree = self.tree_for(expr.ty)
        if target_tree.default_context:
            raise IrError("target tree empty while source tree is not")
        ptr = self.expr(root)

        # suffix index expressions are translated once, in source order
        suffix_steps: list[tuple[str, object]] = []
        for step in suffix:
            if isinstance(step, MemberExpr):
                suffix_steps.append(("label", step.member))
            elif isinstance(step, IndexExpr):
                suffix_steps.append(("index", self.expr(step.index)))
            else:
                raise IrError(f"cannot pack step {step!r}")

        leaves: list[tuple[list[tuple[str, object]], list[tuple[int, int]]]] = []

        def collect(node: TreeNode, steps, conds) -> None:
            if node.is_leaf:
                leaves.append((steps, conds))
                return
            branching = node.kind in ("contract", "struct")
            for e in node.edges:
                step = ("label", e.label) if e.label is not None else ("index", None)
                cond = conds + [(len(steps), e.ordinal)] if branching else conds
                collect(e.target, steps + [step], cond)

        collect(source_tree.root, [], [])

        def path_for(leaf_steps) -> IrExpr:
            node = target_tree.root
            result: IrExpr = ConstArray(ir.INT, ir.INT, IntLit(0))
            depth = 0
            for kind, payload in leaf_steps + suffix_steps:
                if kind == "label":
                    edge = self._edge_by_label(node, payload)
                    result = ArrayWrite(result, IntLit(depth), IntLit(edge.ordinal))
                else:
                    edge = node.edges[0]
                    idx = payload if payload is not None else ArrayRead(ptr, IntLit(depth))
                    idx = self._mapping_key_to_int(node, idx)
                    result = ArrayWrite(result, IntLit(depth), idx)
                node = edge.target
                depth += 1
            if not node.is_leaf:
                raise IrError("re-packed path does not reach a leaf")
            return result

        result: IrExpr | None = None
        for steps, conds in reversed(leaves):
            path = path_for(steps)
            if result is None:
                result = path
            else:
                guard = ir.conjoin(
                    [ir.eq(ArrayRead(ptr, IntLit(d)), IntLit(o)) for d, o in conds]
                )
                result = Ite(guard, path, result)
        assert result is not None
        return result

    def unpack(self, ptr: IrExpr, target: SolType) -> IrExpr:
        """Conditional over the storage tree's leaves decoding a pointer:
        contract/struct nodes branch on the path element (processed in
        reverse so the last edge is the unguarded fall-through), arrays
        and mappings index by it."""
        tree = self.tree_for(target)

        def walk(node: TreeNode, subexpr: IrExpr | None, depth: int) -> IrExpr:
            if node.is_leaf:
                assert subexpr is not None
                return subexpr
            if node.kind in ("contract", "struct"):
                result: IrExpr | None = None
                for edge in reversed(node.edges):
                    if node.kind == "contract":
                        sub: IrExpr = Ident(edge.label)
                    else:
                        assert isinstance(node.ty, StructType) and subexpr is not None
                        sub = Select(subexpr, edge.label, self.stor_datatype(node.ty))
                    branch = walk(edge.target, sub, depth + 1)
                    if result is None:
                        result = branch
                    else:
                        cond = ir.eq(ArrayRead(ptr, IntLit(depth)), IntLit(edge.ordinal))
                        result = Ite(cond, branch, result)
                if result is None:
                    raise IrError("unpack over an empty storage tree")
                return result
            # array / mapping: single index edge
            assert subexpr is not None
            edge = node.edges[0]
            return walk(edge.target, self._step_index_read(node, subexpr, ptr, depth), depth + 1)

        return walk(tree.root, None, 0)

    # ------------------------------------------------------------------
    # default values

    def default_value(self, ty: SolType, loc: Loc) -> IrExpr:
        if is_value_type(ty):
            return BoolLit(False) if ty == BOOL else IntLit(0)
        if loc == Loc.STORPTR:
            raise IrError("storage pointers have no default value")
        if isinstance(ty, MappingType):
            key_ty = self.map_type(ty.key, Loc.VALUE)
            val_ty = self.map_type(ty.value, Loc.STORAGE)
            return ConstArray(key_ty, val_ty, self.default_value(ty.value, Loc.STORAGE))
        if isinstance(ty, (DynArrayType, FixArrayType)):
            length = ty.size if isinstance(ty, FixArrayType) else 0
            if loc == Loc.STORAGE:
                elem_loc = Loc.STORAGE if is_reference_type(ty.base) else Loc.VALUE
                elem_ty = self.map_type(ty.base, elem_loc)
                return Construct(
                    self.stor_datatype(ty),
                    (
                        ConstArray(ir.INT, elem_ty, self.default_value(ty.base, elem_loc)),
                        IntLit(length),
                    ),
                )
            return self._alloc_memory_array(ty, IntLit(length), length)
        if isinstance(ty, StructType):
            sd = self.struct_def(ty.name)
            if loc == Loc.STORAGE:
                args = tuple(
                    self.default_value(m.ty, Loc.STORAGE if is_reference_type(m.ty) else Loc.VALUE)
                    for m in sd.members
                )
                return Construct(self.stor_datatype(ty), args)
            # memory struct: allocate and initialize members recursively
            ptr = self.allocate()
            args = tuple(
                self.default_value(m.ty, Loc.MEMORY if is_reference_type(m.ty) else Loc.VALUE)
                for m in sd.members
            )
            dt = self.mem_datatype(ty)
            self.emit(Assign(self.heap_read(ty, ptr), Construct(dt, args)))
            return ptr
        raise IrError(f"no default for {ty} in {loc}")

    def _alloc_memory_array(
        self, ty: SolType, length_expr: IrExpr, const_length: int | None
    ) -> IrExpr:
        """Allocate a memory array with defaulted elements. Value bases
        default wholesale through a constant array; reference bases need
        one allocation per element, so the length must be a compile-time
        constant or bounded by --unroll."""
        assert isinstance(ty, (DynArrayType, FixArrayType))
        base = ty.base
        ptr = self.allocate()
        dt = self.mem_datatype(ty)
        heap_slot = self.heap_read(ty, ptr)
        if is_value_type(base):
            elem_default = self.default_value(base, Loc.VALUE)
            backing: IrExpr = ConstArray(ir.INT, self.map_type(base, Loc.VALUE), elem_default)
            self.emit(Assign(heap_slot, Construct(dt, (backing, length_expr))))
            return ptr
        backing = ConstArray(ir.INT, ir.INT, IntLit(0))
        self.emit(Assign(heap_slot, Construct(dt, (backing, length_expr))))
        if const_length is not None:
            bound = const_length
        elif self.unroll is not None:
            bound = self.unroll
            self.emit(Assume(ir.le(length_expr, IntLit(bound))))
            self.emit(Assume(ir.le(IntLit(0), length_expr)))
        else:
            raise UnsupportedError(
                "unsupported: memory array of reference base type with "
                "non-constant length (use --unroll)"
            )
        for i in range(bound):
            elem = self.default_value(base, Loc.MEMORY)
            self.emit(
                Assign(ArrayRead(Select(self.heap_read(ty, ptr), "arr", dt), IntLit(i)), elem)
            )
        return ptr

    # ------------------------------------------------------------------
    # expressions

    def expr(self, e: Expr) -> IrExpr:
        """Rvalue translation; side effects are emitted in order."""
        if isinstance(e, IdentExpr):
            return Ident(e.name)
        if isinstance(e, IntLitExpr):
            return IntLit(e.value)
        if isinstance(e, BoolLitExpr):
            return BoolLit(e.value)
        if isinstance(e, MemberExpr):
            return self._member(e, lvalue=False)
        if isinstance(e, IndexExpr):
            return self._index(e, lvalue=False)
        if isinstance(e, CondExpr):
            return self._conditional(e)
        if isinstance(e, NewArrayExpr):
            return self._new_array(e)
        if isinstance(e, StructCtorExpr):
            return self._struct_ctor(e)
        if isinstance(e, BinExpr):
            op = _BINOPS.get(e.op)
            if op is None:
                raise IrError(f"unknown operator {e.op}")
            return BinOp(op, self.expr(e.left), self.expr(e.right))
        if isinstance(e, UnExpr):
            return UnOp("not" if e.op == "!" else "neg", self.expr(e.operand))
        raise IrError(f"unknown expression {e!r}")

    def lvalue(self, e: Expr) -> IrExpr:
        """Assignment-target translation: raw selects and reads, with the
        pointer dereference inserted at storage-pointer bases."""
        if isinstance(e, IdentExpr):
            return Ident(e.name)
        if isinstance(e, MemberExpr):
            return self._member(e, lvalue=True)
        if isinstance(e, IndexExpr):
            return self._index(e, lvalue=True)
        raise IrError(f"not an lvalue: {expr_to_source(e)}")

    def _storage_base(self, base: Expr, lvalue: bool) -> IrExpr:
        """Base of a member/index access as a storage or memory entity."""
        if base.loc == Loc.STORPTR:
            return self.unpack(self.expr(base), base.ty)
        if base.loc == Loc.MEMORY:
            return self.heap_read(base.ty, self.expr(base))
        return self.lvalue(base) if lvalue else self.expr(base)

    def _member(self, e: MemberExpr, lvalue: bool) -> IrExpr:
        base_ty = e.base.ty
        if isinstance(base_ty, (DynArrayType, FixArrayType)):
            # only `length`; the resolver rejects anything else
            entity = self._storage_base(e.base, lvalue)
            if e.base.loc == Loc.MEMORY:
                dt = self.mem_datatype(base_ty)
            else:
                dt = self.stor_datatype(base_ty)
            return Select(entity, "length", dt)
        assert isinstance(base_ty, StructType)
        entity = self._storage_base(e.base, lvalue)
        if e.base.loc == Loc.MEMORY:
            dt = self.mem_datatype(base_ty)
        else:
            dt = self.stor_datatype(base_ty)
        return Select(entity, e.member, dt)

    def _index(self, e: IndexExpr, lvalue: bool) -> IrExpr:
        base_ty = e.base.ty
        if isinstance(base_ty, MappingType):
            entity = self._storage_base(e.base, lvalue)
            return ArrayRead(entity, self.expr(e.index))
        assert isinstance(base_ty, (DynArrayType, FixArrayType))
        in_memory = e.base.loc == Loc.MEMORY
        dt = self.mem_datatype(base_ty) if in_memory else self.stor_datatype(base_ty)
        entity = self._storage_base(e.base, lvalue)
        idx = self.expr(e.index)
        backing = ArrayRead(Select(entity, "arr", dt), idx)
        if lvalue:
            return backing
        # length-guarded read: out-of-range indexes yield the element
        # default (in particular, elements removed by pop)
        if not isinstance(entity, (Ident, Select)):
            tmp = self.fresh("arrval", DatatypeType(dt))
            self.emit(Assign(tmp, entity))
            entity = tmp
            backing = ArrayRead(Select(entity, "arr", dt), idx)
        in_range = ir.and_(
            ir.le(IntLit(0), idx), ir.lt(idx, Select(entity, "length", dt))
        )
        elem = base_ty.base
        if in_memory and is_reference_type(elem):
            fallback: IrExpr = IntLit(0)
        elif in_memory:
            fallback = self.default_value(elem, Loc.VALUE)
        else:
            fallback = self.default_value(
                elem, Loc.STORAGE if is_reference_type(elem) else Loc.VALUE
            )
        return Ite(in_range, backing, fallback)

    def _conditional(self, e: CondExpr) -> IrExpr:
        cond = self.expr(e.cond)
        if e.loc == Loc.VALUE:
            return Ite(cond, self.expr(e.then), self.expr(e.other))
        var_ty = self.map_type(e.ty, e.loc)
        var_t = self.fresh("cond_t", var_ty)
        var_f = self.fresh("cond_f", var_ty)
        self.assign(
            Operand(e.ty, e.loc, ir_target=var_t, ir_value=var_t),
            self.operand_of(e.then),
        )
        self.assign(
            Operand(e.ty, e.loc, ir_target=var_f, ir_value=var_f),
            self.operand_of(e.other),
        )
        return Ite(cond, var_t, var_f)

    def _new_array(self, e: NewArrayExpr) -> IrExpr:
        ty = DynArrayType(e.elem_type)
        self.map_type(ty, Loc.MEMORY)
        length = self.expr(e.length)
        const_length = e.length.value if isinstance(e.length, IntLitExpr) else None
        return self._alloc_memory_array(ty, length, const_length)

    def _struct_ctor(self, e: StructCtorExpr) -> IrExpr:
        ty = StructType(e.name)
        self.map_type(ty, Loc.MEMORY)
        sd = self.struct_def(e.name)
        ptr = self.allocate()
        dt = self.mem_datatype(ty)
        for member, arg in zip(sd.members, e.args):
            slot = Select(self.heap_read(ty, ptr), member.name, dt)
            loc = Loc.MEMORY if is_reference_type(member.ty) else Loc.VALUE
            self.assign(Operand(member.ty, loc, ir_target=slot), self.operand_of(arg))
        return ptr

    # ------------------------------------------------------------------
    # assignment

    def operand_of(self, e: Expr) -> Operand:
        return Operand(e.ty, e.loc, ast=e)

    def _value_of(self, op: Operand) -> IrExpr:
        if op.ir_value is None:
            assert op.ast is not None
            op.ir_value = self.expr(op.ast)
        return op.ir_value

    def _target_of(self, op: Operand) -> IrExpr:
        if op.ir_target is None:
            assert op.ast is not None
            op.ir_target = self.lvalue(op.ast)
        return op.ir_target

    def _pack_operand(self, op: Operand) -> IrExpr:
        """Pointer value of a storage-category operand."""
        if op.ast is None:
            raise IrError("cannot pack a synthesized storage value")
        return self.pack(op.ast)

    def assign(self, lhs: Operand, rhs: Operand) -> None:
        """Location-directed assignment of reference and value types."""
        if is_value_type(lhs.ty):
            self.emit(Assign(self._target_of(lhs), self._value_of(rhs)))
            return
        if isinstance(lhs.ty, MappingType):
            self._assign_mapping(lhs, rhs)
            return
        if isinstance(lhs.ty, StructType):
            self._assign_struct(lhs, rhs)
            return
        if isinstance(lhs.ty, (DynArrayType, FixArrayType)):
            self._assign_array(lhs, rhs)
            return
        raise IrError(f"cannot assign {lhs.ty}")

    def _assign_mapping(self, lhs: Operand, rhs: Operand) -> None:
        if lhs.loc == Loc.STORPTR and rhs.loc == Loc.STORAGE:
            self.emit(Assign(self._target_of(lhs), self._pack_operand(rhs)))
        elif lhs.loc == Loc.STORPTR and rhs.loc == Loc.STORPTR:
            self.emit(Assign(self._target_of(lhs), self._value_of(rhs)))
        # other combinations cannot be performed (keys are not stored);
        # the resolver rejects them in source, so nothing is emitted here

    def _assign_struct(self, lhs: Operand, rhs: Operand) -> None:
        assert isinstance(lhs.ty, StructType)
        sd = self.struct_def(lhs.ty.name)
        if lhs.loc == Loc.STORAGE:
            if rhs.loc == Loc.STORAGE:
                self.emit(Assign(self._target_of(lhs), self._value_of(rhs)))
            elif rhs.loc == Loc.STORPTR:
                unpacked = self.unpack(self._value_of(rhs), rhs.ty)
                self.emit(Assign(self._target_of(lhs), unpacked))
            elif rhs.loc == Loc.MEMORY:
                # member-wise deep copy out of the heap
                rhs_ptr = self._value_of(rhs)
                mem_dt = self.mem_datatype(rhs.ty)
                stor_dt = self.stor_datatype(lhs.ty)
                target = self._target_of(lhs)
                for m in sd.members:
                    m_lhs = Operand(
                        m.ty,
                        Loc.STORAGE if is_reference_type(m.ty) else Loc.VALUE,
                        ir_target=Select(target, m.name, stor_dt),
                    )
                    m_rhs = Operand(
                        m.ty,
                        Loc.MEMORY if is_reference_type(m.ty) else Loc.VALUE,
                        ir_value=Select(self.heap_read(rhs.ty, rhs_ptr), m.name, mem_dt),
                    )
                    self.assign(m_lhs, m_rhs)
            return
        if lhs.loc == Loc.MEMORY:
            if rhs.loc == Loc.MEMORY:
                self.emit(Assign(self._target_of(lhs), self._value_of(rhs)))
                return
            # storage (or pointer) into memory: allocate, then deep copy
            value = (
                self.unpack(self._value_of(rhs), rhs.ty)
                if rhs.loc == Loc.STORPTR
                else self._value_of(rhs)
            )
            ptr = self.allocate()
            stor_dt = self.stor_datatype(rhs.ty)
            mem_dt = self.mem_datatype(lhs.ty)
            for m in sd.members:
                m_lhs = Operand(
                    m.ty,
                    Loc.MEMORY if is_reference_type(m.ty) else Loc.VALUE,
                    ir_target=Select(self.heap_read(lhs.ty, ptr), m.name, mem_dt),
                )
                m_rhs = Operand(
                    m.ty,
                    Loc.STORAGE if is_reference_type(m.ty) else Loc.VALUE,
                    ir_value=Select(value, m.name, stor_dt),
                )
                self.assign(m_lhs, m_rhs)
            self.emit(Assign(self._target_of(lhs), ptr))
            return
        if lhs.loc == Loc.STORPTR:
            if rhs.loc == Loc.STORAGE:
                self.emit(Assign(self._target_of(lhs), self._pack_operand(rhs)))
            elif rhs.loc == Loc.STORPTR:
                self.emit(Assign(self._target_of(lhs), self._value_of(rhs)))
            else:
                raise IrError("memory cannot be assigned to a storage pointer")
            return
        raise IrError(f"cannot assign struct at {lhs.loc}")

    def _assign_array(self, lhs: Operand, rhs: Operand) -> None:
        assert isinstance(lhs.ty, (DynArrayType, FixArrayType))
        if lhs.loc == Loc.STORAGE:
            if rhs.loc == Loc.STORAGE:
                self.emit(Assign(self._target_of(lhs), self._value_of(rhs)))
            elif rhs.loc == Loc.STORPTR:
                unpacked = self.unpack(self._value_of(rhs), rhs.ty)
                self.emit(Assign(self._target_of(lhs), unpacked))
            elif rhs.loc == Loc.MEMORY:
                self._array_memory_to_storage(lhs, rhs)
            return
        if lhs.loc == Loc.MEMORY:
            if rhs.loc == Loc.MEMORY:
                self.emit(Assign(self._target_of(lhs), self._value_of(rhs)))
                return
            value = (
                self.unpack(self._value_of(rhs), rhs.ty)
                if rhs.loc == Loc.STORPTR
                else self._value_of(rhs)
            )
            self._array_storage_to_memory(lhs, value)
            return
        if lhs.loc == Loc.STORPTR:
            if rhs.loc == Loc.STORAGE:
                self.emit(Assign(self._target_of(lhs), self._pack_operand(rhs)))
            elif rhs.loc == Loc.STORPTR:
                self.emit(Assign(self._target_of(lhs), self._value_of(rhs)))
            else:
                raise IrError("memory cannot be assigned to a storage pointer")
            return
        raise IrError(f"cannot assign array at {lhs.loc}")

    def _array_bound(self, ty: SolType, length: IrExpr, what: str) -> int:
        """Unroll bound for element-wise array copies: the compile-time
        size for fixed arrays, --unroll (with an assumed length bound)
        for dynamic ones."""
        if isinstance(ty, FixArrayType):
            return ty.size
        if self.unroll is not None:
            self.emit(Assume(ir.le(length, IntLit(self.unroll))))
            self.emit(Assume(ir.le(IntLit(0), length)))
            return self.unroll
        raise UnsupportedError(
            f"unsupported: {what} of a dynamic array with reference base "
            "type requires element-wise iteration (use --unroll)"
        )

    def _array_memory_to_storage(self, lhs: Operand, rhs: Operand) -> None:
        assert isinstance(lhs.ty, (DynArrayType, FixArrayType))
        base = lhs.ty.base
        rhs_ptr = self._value_of(rhs)
        mem_dt = self.mem_datatype(rhs.ty)
        stor_dt = self.stor_datatype(lhs.ty)
        heap_val = self.heap_read(rhs.ty, rhs_ptr)
        length = Select(heap_val, "length", mem_dt)
        if is_value_type(base):
            copied = Construct(stor_dt, (Select(heap_val, "arr", mem_dt), length))
            self.emit(Assign(self._target_of(lhs), copied))
            return
        bound = self._array_bound(lhs.ty, length, "deep copy into storage")
        elem_loc = Loc.STORAGE
        elem_ty = self.map_type(base, elem_loc)
        blank = Construct(
            stor_dt,
            (ConstArray(ir.INT, elem_ty, self.default_value(base, elem_loc)), length),
        )
        target = self._target_of(lhs)
        self.emit(Assign(target, blank))
        for i in range(bound):
            m_lhs = Operand(
                base, Loc.STORAGE, ir_target=ArrayRead(Select(target, "arr", stor_dt), IntLit(i))
            )
            m_rhs = Operand(
                base,
                Loc.MEMORY,
                ir_value=ArrayRead(Select(self.heap_read(rhs.ty, rhs_ptr), "arr", mem_dt), IntLit(i)),
            )
            self.assign(m_lhs, m_rhs)

    def _array_storage_to_memory(self, lhs: Operand, value: IrExpr) -> None:
        assert isinstance(lhs.ty, (DynArrayType, FixArrayType))
        base = lhs.ty.base
        stor_dt = self.stor_datatype(lhs.ty)
        mem_dt = self.mem_datatype(lhs.ty)
        length = Select(value, "length", stor_dt)
        ptr = self.allocate()
        heap_slot = self.heap_read(lhs.ty, ptr)
        if is_value_type(base):
            self.emit(Assign(heap_slot, Construct(mem_dt, (Select(value, "arr", stor_dt), length))))
            self.emit(Assign(self._target_of(lhs), ptr))
            return
        bound = self._array_bound(lhs.ty, length, "deep copy into memory")
        self.emit(
            Assign(heap_slot, Construct(mem_dt, (ConstArray(ir.INT, ir.INT, IntLit(0)), length)))
        )
        for i in range(bound):
            m_lhs = Operand(
                base,
                Loc.MEMORY,
                ir_target=ArrayRead(Select(self.heap_read(lhs.ty, ptr), "arr", mem_dt), IntLit(i)),
            )
            m_rhs = Operand(
                base, Loc.STORAGE, ir_value=ArrayRead(Select(value, "arr", stor_dt), IntLit(i))
            )
            self.assign(m_lhs, m_rhs)
        self.emit(Assign(self._target_of(lhs), ptr))

    # ------------------------------------------------------------------
    # statements

    def stmt(self, s) -> None:
        if isinstance(s, DeclStmt):
            self._decl_stmt(s)
        elif isinstance(s, AssignStmt):
            self._assign_stmt(s)
        elif isinstance(s, PushStmt):
            self._push_stmt(s)
        elif isinstance(s, PopStmt):
            self._pop_stmt(s)
        elif isinstance(s, DeleteStmt):
            self._delete_stmt(s)
        elif isinstance(s, AssertStmt):
            cond = self.expr(s.cond)
            info = AssertInfo(len(self.asserts), s.line, expr_to_source(s.cond))
            self.asserts.append(info)
            self.emit(Assert(cond, s.line, info.text))
        else:
            raise IrError(f"unknown statement {s!r}")

    def _local_loc(self, s: DeclStmt) -> Loc:
        if is_value_type(s.var_type):
            return Loc.VALUE
        return Loc.STORPTR if s.data_loc == "storage" else Loc.MEMORY

    def _decl_stmt(self, s: DeclStmt) -> None:
        loc = self._local_loc(s)
        var_ty = self.map_type(s.var_type, loc)
        self.program.declare(s.name, var_ty)
        target = Operand(s.var_type, loc, ir_target=Ident(s.name), ir_value=Ident(s.name))
        if s.init is not None:
            self.assign(target, self.operand_of(s.init))
        else:
            default = self.default_value(s.var_type, loc)
            rhs_loc = loc if is_reference_type(s.var_type) else Loc.VALUE
            self.assign(target, Operand(s.var_type, rhs_loc, ir_value=default))

    def _assign_stmt(self, s: AssignStmt) -> None:
        if len(s.lhs) == 1:
            self.assign(self.operand_of(s.lhs[0]), self.operand_of(s.rhs[0]))
            return
        # tuple: evaluate the right side left to right (storage entities
        # evaluate to pointers), assign right to left
        temps: list[Operand] = []
        for r in s.rhs:
            if is_value_type(r.ty):
                tmp = self.fresh("tmp", self.map_type(r.ty, Loc.VALUE))
                self.emit(Assign(tmp, self.expr(r)))
                temps.append(Operand(r.ty, Loc.VALUE, ir_value=tmp))
            elif r.loc == Loc.STORAGE:
                tmp = self.fresh("tmp", PTR)
                self.emit(Assign(tmp, self.pack(r)))
                temps.append(Operand(r.ty, Loc.STORPTR, ir_value=tmp))
            elif r.loc == Loc.STORPTR:
                tmp = self.fresh("tmp", PTR)
                self.emit(Assign(tmp, self.expr(r)))
                temps.append(Operand(r.ty, Loc.STORPTR, ir_value=tmp))
            else:
                tmp = self.fresh("tmp", ir.INT)
                self.emit(Assign(tmp, self.expr(r)))
                temps.append(Operand(r.ty, Loc.MEMORY, ir_value=tmp))
        for target, tmp_op in reversed(list(zip(s.lhs, temps))):
            self.assign(self.operand_of(target), tmp_op)

    def _array_entity(self, e: Expr) -> tuple[IrExpr, str]:
        """Storage array entity for push/pop, as an assignable term."""
        assert isinstance(e.ty, DynArrayType)
        dt = self.stor_datatype(e.ty)
        if e.loc == Loc.STORPTR:
            return self.unpack(self.expr(e), e.ty), dt
        return self.lvalue(e), dt

    def _push_stmt(self, s: PushStmt) -> None:
        entity, dt = self._array_entity(s.target)
        elem = s.target.ty.base
        length = Select(entity, "length", dt)
        slot = ArrayRead(Select(entity, "arr", dt), length)
        loc = Loc.STORAGE if is_reference_type(elem) else Loc.VALUE
        self.assign(Operand(elem, loc, ir_target=slot), self.operand_of(s.value))
        self.emit(Assign(length, ir.add(length, IntLit(1))))

    def _pop_stmt(self, s: PopStmt) -> None:
        # length shrinks; the backing slot is retained so dangling
        # storage pointers still read the removed element, while indexed
        # access (length-guarded) sees the default value
        entity, dt = self._array_entity(s.target)
        length = Select(entity, "length", dt)
        self.emit(Assign(length, ir.sub(length, IntLit(1))))

    def _delete_stmt(self, s: DeleteStmt) -> None:
        target = self.operand_of(s.target)
        loc = s.target.loc
        if loc == Loc.VALUE:
            default = self.default_value(s.target.ty, Loc.VALUE)
            self.assign(target, Operand(s.target.ty, Loc.VALUE, ir_value=default))
        elif loc == Loc.MEMORY:
            default = self.default_value(s.target.ty, Loc.MEMORY)
            self.assign(target, Operand(s.target.ty, Loc.MEMORY, ir_value=default))
        else:
            default = self.default_value(s.target.ty, Loc.STORAGE)
            self.assign(target, Operand(s.target.ty, Loc.STORAGE, ir_value=default))

    # ------------------------------------------------------------------
    # functions

    def _assume_memory_pointer(self, ty: SolType, pointer: IrExpr, depth: int = 0) -> None:
        """Non-aliasing assumptions for memory pointers passed in: the
        pointer, and recursively every reference it contains, precedes
        all fresh allocations."""
        self.emit(Assume(ir.le(pointer, Ident(REFCNT))))
        if isinstance(ty, StructType):
            sd = self.struct_def(ty.name)
            dt = self.mem_datatype(ty)
            for m in sd.members:
                if is_reference_type(m.ty):
                    self._assume_memory_pointer(
                        m.ty, Select(self.heap_read(ty, pointer), m.name, dt), depth + 1
                    )
            return
        if isinstance(ty, (DynArrayType, FixArrayType)):
            base = ty.base
            if not is_reference_type(base):
                return
            dt = self.mem_datatype(ty)
            heap_val = self.heap_read(ty, pointer)
            length = Select(heap_val, "length", dt)
            if isinstance(ty, FixArrayType):
                bound = ty.size
            elif self.unroll is not None:
                bound = self.unroll
                self.emit(Assume(ir.le(length, IntLit(bound))))
            else:
                raise UnsupportedError(
                    "unsupported: memory parameter containing a dynamic array "
                    "of reference base type requires quantified non-aliasing "
                    "assumptions (use --unroll)"
                )
            for i in range(bound):
                elem = ArrayRead(Select(self.heap_read(ty, pointer), "arr", dt), IntLit(i))
                self._assume_memory_pointer(base, elem, depth + 1)

    def translate_function(self, fn: Function) -> TranslatedFunction:
        for v in self.contract.state_vars:
            loc = Loc.STORAGE if is_reference_type(v.ty) else Loc.VALUE
            self.program.declare(v.name, self.map_type(v.ty, loc))
        for p in fn.params + fn.returns:
            self.program.declare(p.name, self.map_type(p.ty, p.loc))
        if fn.is_constructor:
            # direct default assignments: the mapping row of the
            # assignment matrix must not swallow state initialization
            for v in self.contract.state_vars:
                loc = Loc.STORAGE if is_reference_type(v.ty) else Loc.VALUE
                self.emit(Assign(Ident(v.name), self.default_value(v.ty, loc)))
        else:
            for p in fn.params:
                if p.loc == Loc.MEMORY:
                    self._assume_memory_pointer(p.ty, Ident(p.name))
        for p in fn.returns:
            default = self.default_value(p.ty, p.loc)
            rhs_loc = p.loc if is_reference_type(p.ty) else Loc.VALUE
            self.assign(
                Operand(p.ty, p.loc, ir_target=Ident(p.name), ir_value=Ident(p.name)),
                Operand(p.ty, rhs_loc, ir_value=default),
            )
        for s in fn.body:
            self.stmt(s)
        return TranslatedFunction(fn.name, self.program, self.asserts, fn.is_constructor)


def translate_function(
    contract: Contract, fn: Function, unroll: int | None = None
) -> TranslatedFunction:
    return Translator(contract, unroll).translate_function(fn)


def translate_contract(
    contract: Contract, unroll: int | None = None
) -> dict[str, TranslatedFunction]:
    """Translate every function (constructor included) independently."""
    out: dict[str, TranslatedFunction] = {}
    for fn in contract.all_functions():
        out[fn.name] = translate_function(contract, fn, unroll)
    return out
