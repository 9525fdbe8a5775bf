"""Random well-typed fragment programs for differential testing.

Generation is oracle-guided: after each emitted statement the program so
far is re-run through the reference interpreter, so array indexes stay
in bounds and assert expectations are computed from actual state rather
than guessed. Programs are constructor-only (fully concrete), biased
toward reference-type assignments across data locations, storage pointer
creation and re-pointing, push/pop/delete, and tuple swaps, and never
use constructs the translator reports as unsupported. Output is
deterministic per seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .oracle import MemArray, MemRef, MemStruct, StorArray, StorMapping, StorPath, StorStruct, run_constructor
from .parser import parse_source
from .resolver import resolve_and_check
from .sol_ast import (
    BOOL,
    INT,
    UINT,
    DynArrayType,
    FixArrayType,
    MappingType,
    SolType,
    StructType,
    ValueType,
    is_reference_type,
    is_value_type,
)

_KEY_POOL = [0, 1, 2, 7]

_STRUCTS = {
    "T": [("z", INT)],
    "S": [("x", INT), ("f", BOOL), ("t", StructType("T")), ("data", DynArrayType(INT))],
    "P": [("a", UINT), ("ts", FixArrayType(StructType("T"), 2))],
}

_STATE_POOLS = [
    ("t1", StructType("T")),
    ("s1", StructType("S")),
    ("nums", DynArrayType(INT)),
    ("grid", FixArrayType(INT, 3)),
    ("balances", MappingType(ValueType("address"), INT)),
    ("flags", MappingType(BOOL, INT)),
    ("recs", MappingType(ValueType("address"), StructType("S"))),
    ("ss", DynArrayType(StructType("S"))),
    ("ps", DynArrayType(StructType("P"))),
    ("pairs", FixArrayType(StructType("T"), 2)),
    ("table", MappingType(INT, DynArrayType(INT))),
    ("counter", INT),
    ("ok", BOOL),
]


def _type_src(ty: SolType) -> str:
    from .printer import type_to_source

    return type_to_source(ty)


def _memory_safe(ty: SolType, structs: dict) -> bool:
    """True when the type can live in memory without unbounded copies:
    no mapping and no dynamic array of reference base anywhere."""
    if is_value_type(ty):
        return True
    if isinstance(ty, MappingType):
        return False
    if isinstance(ty, DynArrayType):
        return is_value_type(ty.base)
    if isinstance(ty, FixArrayType):
        return _memory_safe(ty.base, structs)
    if isinstance(ty, StructType):
        return all(_memory_safe(mty, structs) for _, mty in structs[ty.name])
    return False


@dataclass
class _Gen:
    rng: random.Random
    structs: dict
    state_vars: list
    lines: list[str] = field(default_factory=list)
    locals: list[tuple[str, SolType, str]] = field(default_factory=list)  # name, type, loc
    counter: int = 0

    def fresh(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"


class ProgramBuilder:
    def __init__(self, seed: int, size_budget: int):
        self.rng = random.Random(seed)
        self.size_budget = size_budget
        used_structs = ["T", "S"] + (["P"] if self.rng.random() < 0.5 else [])
        self.structs = {name: _STRUCTS[name] for name in used_structs}
        pool = [
            (n, t)
            for n, t in _STATE_POOLS
            if all(s.name in self.structs for s in _struct_names(t))
        ]
        count = self.rng.randint(3, min(6, len(pool)))
        self.state_vars = self.rng.sample(pool, count)
        self.g = _Gen(self.rng, self.structs, self.state_vars)
        self.machine = None

    # ----- source assembly -------------------------------------------

    def source(self, extra: list[str] | None = None) -> str:
        lines = ["contract Fuzz {"]
        for name, members in self.structs.items():
            lines.append(f"    struct {name} {{")
            for mname, mty in members:
                lines.append(f"        {_type_src(mty)} {mname};")
            lines.append("    }")
        for name, ty in self.state_vars:
            lines.append(f"    {_type_src(ty)} {name};")
        lines.append("    constructor() {")
        for line in self.g.lines + (extra or []):
            lines.append(f"        {line}")
        lines.append("    }")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def _refresh(self, extra: list[str] | None = None) -> bool:
        """Re-run the program; returns False if the candidate is invalid."""
        try:
            contract = resolve_and_check(parse_source(self.source(extra)))
            result = run_constructor(contract)
        except Exception:
            return False
        if result.failed is not None:
            return False  # asserts are only appended at the end
        self.machine = result.state
        return True

    def commit(self, line: str) -> bool:
        if self._refresh([line]):
            self.g.lines.append(line)
            return True
        return False

    # ----- state sampling ---------------------------------------------

    def _storage_paths(self):
        """Every reachable storage lvalue with its concrete value, as
        (source-text, type, value), staying in bounds."""
        out = []

        def walk(text: str, ty: SolType, value, depth: int):
            out.append((text, ty, value))
            if depth > 3:
                return
            if isinstance(ty, StructType):
                assert isinstance(value, StorStruct)
                for mname, mty in self.structs[ty.name]:
                    walk(f"{text}.{mname}", mty, value.members[mname], depth + 1)
            elif isinstance(ty, (DynArrayType, FixArrayType)):
                assert isinstance(value, StorArray)
                for i in range(min(max(value.length, 0), 3)):
                    walk(f"{text}[{i}]", ty.base, self.machine.backing_read(value, i), depth + 1)
            elif isinstance(ty, MappingType):
                assert isinstance(value, StorMapping)
                keys = _KEY_POOL if ty.key != BOOL else [True, False]
                for key in self.rng.sample(keys, min(2, len(keys))):
                    ktext = ("true" if key else "false") if ty.key == BOOL else str(key)
                    kval = self.machine.mapping_read(value, key)
                    walk(f"{text}[{ktext}]", ty.value, kval, depth + 1)

        for name, ty in self.state_vars:
            walk(name, ty, self.machine.storage[name], 0)
        return out

    def _pointer_paths(self):
        """Storage lvalues reachable through live storage pointers."""
        out = []
        for name, ty, loc in self.g.locals:
            if loc != "storage":
                continue
            pointer = self.machine.locals.get(name)
            if not isinstance(pointer, StorPath):
                continue
            value = self.machine.path_place(pointer).read()
            out.append((name, ty, value))
            if isinstance(ty, StructType):
                assert isinstance(value, StorStruct)
                for mname, mty in self.structs[ty.name]:
                    out.append((f"{name}.{mname}", mty, value.members[mname]))
            elif isinstance(ty, (DynArrayType, FixArrayType)):
                assert isinstance(value, StorArray)
                for i in range(min(max(value.length, 0), 2)):
                    out.append((f"{name}[{i}]", ty.base, self.machine.backing_read(value, i)))
            elif isinstance(ty, MappingType):
                assert isinstance(value, StorMapping)
                key = self.rng.choice(_KEY_POOL if ty.key != BOOL else [True, False])
                ktext = ("true" if key else "false") if ty.key == BOOL else str(key)
                out.append((f"{name}[{ktext}]", ty.value, self.machine.mapping_read(value, key)))
        return out

    def _memory_values(self):
        out = []
        for name, ty, loc in self.g.locals:
            if loc != "memory":
                continue
            ref = self.machine.locals.get(name)
            if not isinstance(ref, MemRef):
                continue
            out.append((name, ty, ref))
            obj = self.machine.heap[ref.addr]
            if isinstance(obj, MemArray):
                for i in range(min(max(obj.length, 0), 2)):
                    if i < len(obj.elems):
                        out.append((f"{name}[{i}]", ty.base, obj.elems[i]))
            elif isinstance(obj, MemStruct):
                for mname, mty in self.structs[obj.struct]:
                    out.append((f"{name}.{mname}", mty, obj.members[mname]))
        return out

    def _value_reads(self):
        """Readable value-typed expressions with their current values."""
        reads = []
        for text, ty, value in self._storage_paths() + self._pointer_paths() + self._memory_values():
            if is_value_type(ty):
                reads.append((text, ty, value))
            elif isinstance(ty, (DynArrayType, FixArrayType)) and not isinstance(value, MemRef):
                if isinstance(value, StorArray):
                    reads.append((f"{text}.length", UINT, value.length))
        for name, ty, loc in self.g.locals:
            if loc == "value" and name in self.machine.locals:
                reads.append((name, ty, self.machine.locals[name]))
        return reads

    def _literal(self, ty: SolType) -> str:
        if ty == BOOL:
            return self.rng.choice(["true", "false"])
        return str(self.rng.choice([0, 1, 2, 3, 5, 8, 42]))

    # ----- statement generators -----------------------------------------

    def _op_value_write(self) -> bool:
        targets = [
            (t, ty) for t, ty, _ in self._storage_paths() + self._pointer_paths() + self._memory_values()
            if is_value_type(ty)
        ]
        targets += [(n, ty) for n, ty, loc in self.g.locals if loc == "value"]
        if not targets:
            return False
        text, ty = self.rng.choice(targets)
        reads = [r for r in self._value_reads() if _compatible(r[1], ty)]
        if reads and self.rng.random() < 0.5:
            src, _, _ = self.rng.choice(reads)
            if ty != BOOL and self.rng.random() < 0.4:
                src = f"{src} + {self._literal(INT)}"
        else:
            src = self._literal(ty)
        return self.commit(f"{text} = {src};")

    def _op_local_value(self) -> bool:
        ty = self.rng.choice([INT, UINT, BOOL])
        name = self.g.fresh("v")
        init = f" = {self._literal(ty)}" if self.rng.random() < 0.8 else ""
        if self.commit(f"{_type_src(ty)} {name}{init};"):
            self.g.locals.append((name, ty, "value"))
            return True
        return False

    def _op_push(self) -> bool:
        arrays = [
            (t, ty, v)
            for t, ty, v in self._storage_paths() + self._pointer_paths()
            if isinstance(ty, DynArrayType) and isinstance(v, StorArray) and v.length < 4
        ]
        if not arrays:
            return False
        text, ty, _ = self.rng.choice(arrays)
        elem = ty.base
        if is_value_type(elem):
            value = self._literal(elem)
        elif isinstance(elem, StructType) and _memory_safe(elem, self.structs):
            value = self._struct_ctor_src(elem)
        else:
            sources = [
                t for t, sty, sv in self._storage_paths() if sty == elem
            ]
            if not sources:
                return False
            value = self.rng.choice(sources)
        return self.commit(f"{text}.push({value});")

    def _struct_ctor_src(self, ty: StructType) -> str:
        args = []
        for _, mty in self.structs[ty.name]:
            if is_value_type(mty):
                args.append(self._literal(mty))
            elif isinstance(mty, DynArrayType) and is_value_type(mty.base):
                n = self.rng.randint(0, 2)
                args.append(f"new {_type_src(mty.base)}[]({n})")
            else:
                mems = [t for t, t2, _ in self._memory_values() if t2 == mty]
                stos = [t for t, t2, _ in self._storage_paths() if t2 == mty]
                if mems:
                    args.append(self.rng.choice(mems))
                elif stos:
                    args.append(self.rng.choice(stos))
                else:
                    return ""  # caller treats as failure
        return f"{ty.name}({', '.join(args)})"

    def _op_pop(self) -> bool:
        arrays = [
            (t, ty, v)
            for t, ty, v in self._storage_paths() + self._pointer_paths()
            if isinstance(ty, DynArrayType) and isinstance(v, StorArray) and v.length > 0
        ]
        if not arrays:
            return False
        text, _, _ = self.rng.choice(arrays)
        return self.commit(f"{text}.pop();")

    def _op_delete(self) -> bool:
        targets = [
            (t, ty)
            for t, ty, v in self._storage_paths()
            if not isinstance(ty, MappingType) and not isinstance(v, MemRef)
        ]
        if not targets:
            return False
        text, _ = self.rng.choice(targets)
        return self.commit(f"delete {text};")

    def _op_storptr_decl(self) -> bool:
        refs = [
            (t, ty)
            for t, ty, _ in self._storage_paths()
            if is_reference_type(ty)
        ]
        if not refs:
            return False
        text, ty = self.rng.choice(refs)
        name = self.g.fresh("p")
        if self.commit(f"{_type_src(ty)} storage {name} = {text};"):
            self.g.locals.append((name, ty, "storage"))
            return True
        return False

    def _op_repoint(self) -> bool:
        pointers = [(n, ty) for n, ty, loc in self.g.locals if loc == "storage"]
        if not pointers:
            return False
        name, ty = self.rng.choice(pointers)
        candidates = [t for t, t2, _ in self._storage_paths() if t2 == ty]
        candidates += [n for n, t2, loc in self.g.locals if loc == "storage" and t2 == ty and n != name]
        if not candidates:
            return False
        return self.commit(f"{name} = {self.rng.choice(candidates)};")

    def _op_memory_decl(self) -> bool:
        choice = self.rng.random()
        name = self.g.fresh("m")
        if choice < 0.4:
            base = self.rng.choice([INT, UINT, BOOL])
            n = self.rng.randint(0, 3)
            ty: SolType = DynArrayType(base)
            line = f"{_type_src(base)}[] memory {name} = new {_type_src(base)}[]({n});"
        elif choice < 0.7:
            structs = [
                StructType(s) for s in self.structs if _memory_safe(StructType(s), self.structs)
            ]
            if not structs:
                return False
            ty = self.rng.choice(structs)
            ctor = self._struct_ctor_src(ty)
            if not ctor:
                return False
            line = f"{_type_src(ty)} memory {name} = {ctor};"
        else:
            # deep copy out of storage
            refs = [
                (t, t2)
                for t, t2, _ in self._storage_paths()
                if is_reference_type(t2) and _memory_safe(t2, self.structs)
            ]
            if not refs:
                return False
            text, ty = self.rng.choice(refs)
            line = f"{_type_src(ty)} memory {name} = {text};"
        if self.commit(line):
            self.g.locals.append((name, ty, "memory"))
            return True
        return False

    def _op_copy_into_storage(self) -> bool:
        mems = [
            (t, ty)
            for t, ty, v in self._memory_values()
            if is_reference_type(ty) and isinstance(v, MemRef)
        ]
        if not mems:
            return False
        src, ty = self.rng.choice(mems)
        targets = [t for t, t2, _ in self._storage_paths() + self._pointer_paths() if t2 == ty]
        if not targets:
            return False
        return self.commit(f"{self.rng.choice(targets)} = {src};")

    def _op_storage_copy(self) -> bool:
        refs = [(t, ty) for t, ty, _ in self._storage_paths() if is_reference_type(ty) and not isinstance(ty, MappingType)]
        if not refs:
            return False
        src, ty = self.rng.choice(refs)
        targets = [t for t, t2, _ in self._storage_paths() + self._pointer_paths() if t2 == ty and t != src]
        if not targets:
            return False
        return self.commit(f"{self.rng.choice(targets)} = {src};")

    def _op_tuple_swap(self) -> bool:
        if self.rng.random() < 0.5:
            vals = [(t, ty) for t, ty, _ in self._storage_paths() + self._pointer_paths() if is_value_type(ty)]
            pairs = [(a, b) for a, aty in vals for b, bty in vals if a != b and _compatible(aty, bty)]
            if not pairs:
                return False
            a, b = self.rng.choice(pairs)
            return self.commit(f"({a}, {b}) = ({b}, {a});")
        structs = [
            (t, ty) for t, ty, _ in self._storage_paths()
            if isinstance(ty, StructType)
        ]
        pairs = [(a, b) for a, aty in structs for b, bty in structs if a != b and aty == bty]
        if not pairs:
            return False
        a, b = self.rng.choice(pairs)
        return self.commit(f"({a}, {b}) = ({b}, {a});")

    def _op_cond_value(self) -> bool:
        reads = self._value_reads()
        ints = [r for r in reads if r[1] != BOOL]
        bools = [r for r in reads if r[1] == BOOL]
        if not ints:
            return False
        cond = self.rng.choice(bools)[0] if bools and self.rng.random() < 0.5 else (
            f"{self.rng.choice(ints)[0]} {self.rng.choice(['<', '<=', '==', '!='])} {self._literal(INT)}"
        )
        a = self.rng.choice(ints)[0]
        b = self.rng.choice(ints)[0]
        name = self.g.fresh("v")
        if self.commit(f"int {name} = {cond} ? {a} : {b};"):
            self.g.locals.append((name, INT, "value"))
            return True
        return False

    # ----- asserts -------------------------------------------------------

    def _probe(self, expr: str):
        """Concrete value of a value-typed expression in the final state."""
        probe = self.g.fresh("probe")
        try:
            contract = resolve_and_check(
                parse_source(self.source([f"int {probe} = {expr};"]))
            )
            result = run_constructor(contract)
        except Exception:
            return None
        if result.failed is not None:
            return None
        return result.state.locals.get(probe)

    def make_asserts(self, max_asserts: int = 3, fail_share: float = 0.3):
        reads = [r for r in self._value_reads() if r[1] != BOOL]
        bools = [r for r in self._value_reads() if r[1] == BOOL]
        count = self.rng.randint(1, max_asserts)
        emitted = 0
        for _ in range(count):
            if reads and (not bools or self.rng.random() < 0.8):
                text, _, _ = self.rng.choice(reads)
                value = self._probe(text)
                if value is None:
                    continue
                line = f"assert({text} == {int(value)});"
            else:
                text, _, value = self.rng.choice(bools)
                line = f"assert({text} == {'true' if value else 'false'});"
            if self.commit(line):
                emitted += 1
        # at most one failing assert, placed last so every earlier assert
        # is reached by the oracle
        if reads and self.rng.random() < fail_share:
            text, _, _ = self.rng.choice(reads)
            value = self._probe(text)
            if value is not None:
                line = f"assert({text} == {int(value) + 1});"
                if self._refresh():  # state before appending
                    self.g.lines.append(line)
                    emitted += 1
        return emitted

    # ----- driver ---------------------------------------------------------

    _OPS = [
        ("_op_value_write", 3.0),
        ("_op_local_value", 1.0),
        ("_op_push", 2.5),
        ("_op_pop", 1.2),
        ("_op_delete", 1.0),
        ("_op_storptr_decl", 2.5),
        ("_op_repoint", 1.2),
        ("_op_memory_decl", 2.0),
        ("_op_copy_into_storage", 1.5),
        ("_op_storage_copy", 1.5),
        ("_op_tuple_swap", 1.2),
        ("_op_cond_value", 0.8),
    ]

    def build(self) -> str:
        if not self._refresh():
            raise RuntimeError("generator produced an invalid skeleton")
        emitted = 0
        attempts = 0
        names = [n for n, _ in self._OPS]
        weights = [w for _, w in self._OPS]
        while emitted < self.size_budget and attempts < self.size_budget * 10:
            attempts += 1
            op = self.rng.choices(names, weights)[0]
            if getattr(self, op)():
                emitted += 1
        self.make_asserts()
        return self.source()


def _struct_names(ty: SolType):
    if isinstance(ty, StructType):
        yield ty
    elif isinstance(ty, (DynArrayType, FixArrayType)):
        yield from _struct_names(ty.base)
    elif isinstance(ty, MappingType):
        yield from _struct_names(ty.value)


def _compatible(a: SolType, b: SolType) -> bool:
    from .sol_ast import value_compatible

    return value_compatible(a, b)


def random_program(seed: int, size_budget: int = 10) -> str:
    """Deterministic, well-typed, in-bounds fragment program."""
    return ProgramBuilder(seed, size_budget).build()
