"""Reference interpreter: worked examples, determinism, storage purity."""

import json


from sources import DANGLING_POINTER, DATA_STORAGE, TUPLE_SWAP
from solmem.oracle import (
    MemRef,
    StorArray,
    StorMapping,
    StorStruct,
    exec_function,
    run_constructor,
    serialize,
    serialize_storage,
)
from solmem.parser import parse_source
from solmem.resolver import resolve_and_check


def compile_source(text):
    return resolve_and_check(parse_source(text))


def test_primitive_tuple_swap():
    c = compile_source(TUPLE_SWAP)
    result = exec_function(c, "primitiveAssign")
    assert serialize_storage(result) == {
        "s1": {"x": 3},
        "s2": {"x": 1},
        "s3": {"x": 2},
    }


def test_storage_tuple_swap_reads_through_pointers():
    c = compile_source(TUPLE_SWAP)
    result = exec_function(c, "storageAssign")
    assert serialize_storage(result) == {
        "s1": {"x": 1},
        "s2": {"x": 1},
        "s3": {"x": 1},
    }


def test_dangling_pointer_semantics():
    c = compile_source(DANGLING_POINTER)
    result = run_constructor(c)
    assert [a.passed for a in result.asserts] == [True, False]
    assert serialize_storage(result) == {"a": {"length": 0, "elems": []}}


def test_data_storage_append_isset_get():
    c = compile_source(DATA_STORAGE)
    state = run_constructor(c).state
    state = exec_function(c, "append", [7, 41], initial=state).state
    result = exec_function(c, "append", [7, 42], initial=state)
    assert exec_function(c, "isset", [[0, 7]], initial=result.state).returns["s"] is True
    assert exec_function(c, "isset", [[0, 99]], initial=result.state).returns["s"] is False
    got = exec_function(c, "get", [7], initial=result.state)
    ret_ty = c.function("get").returns[0].ty
    assert serialize(got.state, ret_ty, got.returns["ret"]) == {
        "length": 2,
        "elems": [41, 42],
    }


def test_constructor_defaults():
    c = compile_source(
        "contract C { struct S { int x; bool b; } int x; S s; int[2] a; mapping(int => int) m; }"
    )
    result = run_constructor(c)
    assert serialize_storage(result) == {
        "x": 0,
        "s": {"x": 0, "b": False},
        "a": {"length": 2, "elems": [0, 0]},
        "m": {"default": 0, "entries": {}},
    }


def test_determinism():
    c = compile_source(TUPLE_SWAP)
    a = json.dumps(serialize_storage(exec_function(c, "storageAssign")), sort_keys=True)
    b = json.dumps(serialize_storage(exec_function(c, "storageAssign")), sort_keys=True)
    assert a == b


def test_storage_purity_no_heap_references():
    src = """
contract C {
    struct S { int x; int[] data; }
    S s;
    constructor() {
        S memory m = S(4, new int[](2));
        s = m;
    }
}
"""
    result = run_constructor(compile_source(src))

    def scan(v):
        assert not isinstance(v, MemRef)
        if isinstance(v, StorStruct):
            for m in v.members.values():
                scan(m)
        elif isinstance(v, StorArray):
            for e in v.backing:
                scan(e)
        elif isinstance(v, StorMapping):
            for e in v.entries.values():
                scan(e)

    for value in result.storage.values():
        scan(value)
    assert json.dumps(serialize_storage(result), sort_keys=True)


def test_memory_aliasing_inside_heap():
    src = """
contract C {
    struct T { int z; }
    struct S { int x; T t; }
    int probe;
    constructor() {
        T memory shared = T(1);
        S memory a = S(10, shared);
        S memory b = S(20, shared);
        a.t.z = 5;
        probe = b.t.z;
    }
}
"""
    result = run_constructor(compile_source(src))
    assert result.storage["probe"] == 5


def test_delete_resets_memory_pointer_to_fresh_default():
    src = """
contract C {
    int probe;
    constructor() {
        int[] memory m = new int[](2);
        m[0] = 9;
        delete m;
        probe = m.length;
    }
}
"""
    result = run_constructor(compile_source(src))
    assert result.storage["probe"] == 0


def test_out_of_bounds_reads_default_and_negative_pop():
    src = """
contract C {
    int[] a;
    int probe;
    constructor() {
        a.push(3);
        a.pop();
        a.pop();
        probe = a[0];
    }
}
"""
    result = run_constructor(compile_source(src))
    machine = result.state
    assert machine.storage["a"].length == -1
    assert result.storage["probe"] == 0


def test_mapping_values_not_tracked_for_existence():
    c = compile_source(DATA_STORAGE)
    result = exec_function(c, "get", [123])
    ret_ty = c.function("get").returns[0].ty
    assert serialize(result.state, ret_ty, result.returns["ret"]) == {
        "length": 0,
        "elems": [],
    }
