"""Hand-picked adversarial programs where oracle and verifier must agree:
pointer/pop interactions, bool mapping keys, nested mappings, memory
aliasing graphs, and deletes observed through watching pointers."""

import pytest

from solmem.harness import differential_check

CASES = {
    "bool_keyed_mapping_pointer": """
contract C {
    mapping(bool => int) flags;
    constructor() {
        mapping(bool => int) storage p = flags;
        p[true] = 7;
        p[false] = 3;
        assert(flags[true] == 7);
        assert(flags[false] == 3);
    }
}
""",
    "pop_then_push_reexposes_slot": """
contract C {
    int[] a;
    constructor() {
        a.push(1);
        a.push(2);
        a.pop();
        a.push(9);
        assert(a[1] == 9);
        assert(a.length == 2);
    }
}
""",
    "dangling_pointer_sees_overwrite": """
contract C {
    struct S { int x; }
    S[] a;
    constructor() {
        a.push(S(5));
        S storage p = a[0];
        a.pop();
        assert(p.x == 5);
        a.push(S(6));
        assert(p.x == 6);
        assert(a[0].x == 6);
    }
}
""",
    "nested_mapping_through_pointer": """
contract C {
    mapping(int => mapping(int => int)) grid;
    constructor() {
        mapping(int => int) storage row = grid[3];
        row[4] = 34;
        assert(grid[3][4] == 34);
        assert(grid[4][3] == 0);
    }
}
""",
    "memory_alias_graph": """
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
        assert(probe == 5);
    }
}
""",
    "delete_watched_by_second_pointer": """
contract C {
    struct S { int x; int[] data; }
    S s;
    constructor() {
        s.data.push(8);
        S storage p = s;
        int[] storage d = p.data;
        delete p.data;
        assert(d.length == 0);
        assert(d[0] == 0);
    }
}
""",
    "tuple_swap_of_pointers_then_write": """
contract C {
    struct S { int x; }
    S s1;
    S s2;
    constructor() {
        S storage p = s1;
        S storage q = s2;
        (p, q) = (q, p);
        p.x = 1;
        q.x = 2;
        assert(s2.x == 1);
        assert(s1.x == 2);
    }
}
""",
    "failing_assert_matches": """
contract C {
    int[] a;
    constructor() {
        a.push(4);
        assert(a[0] == 5);
    }
}
""",
}


@pytest.mark.parametrize("name", CASES)
def test_differential_agreement(name, solver_available):
    agreed, compared, detail = differential_check(CASES[name], timeout=30)
    assert agreed, detail
    assert compared >= 1
