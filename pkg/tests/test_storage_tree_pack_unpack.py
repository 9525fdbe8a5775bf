"""Storage trees and pointer packing/unpacking against the worked example:

    contract C { struct T { int z; }  struct S { int x; T t; T[] ts; }
                 T t1;  S s1;  S[] ss; }

The tree for T has five leaves (t1, s1.t, s1.ts[i], ss[i].t,
ss[i].ts[i]); t1 packs to [0], s1.t to [1,0], ss[8].ts[5] to [2,8,1,5];
unpacking decodes a pointer back into the matching conditional.
"""


from sources import POINTER_CONTRACT
from solmem import ir
from solmem.ir import Assign, Ident, format_expr
from solmem.ireval import VArray, eval_ir
from solmem.parser import parse_source
from solmem.resolver import resolve_and_check
from solmem.sol_ast import INT, StructType
from solmem.storage_tree import build_storage_tree, default_context_tree
from solmem.translate import Translator


def pointer_contract(extra: str = ""):
    src = POINTER_CONTRACT
    if extra:
        src = src.replace("S[] ss;", f"S[] ss;\n    {extra}")
    return resolve_and_check(parse_source(src))


def eval_pack(tr: Translator, expr) -> list[int]:
    packed = tr.pack(expr)
    prog = tr.program.copy_shell()
    prog.stmts = list(tr.stmts) + [Assign(Ident("out~"), packed)]
    prog.declare("out~", ir.PTR)
    result = eval_ir(prog)
    arr = result.env["out~"]
    assert isinstance(arr, VArray)
    depth = max(arr.entries, default=-1) + 1
    return [arr.read(i) for i in range(depth)]


def test_tree_for_t_has_five_leaves():
    c = pointer_contract()
    tree = build_storage_tree(c, StructType("T"))
    assert tree.leaf_count() == 5
    assert tree.leaf_paths() == [
        ["t1"],
        ["s1", "t"],
        ["s1", "ts", "[i]"],
        ["ss", "[i]", "t"],
        ["ss", "[i]", "ts", "[i]"],
    ]
    # edges are numbered consecutively after filtering
    assert [(e.label, e.ordinal) for e in tree.root.edges] == [
        ("t1", 0),
        ("s1", 1),
        ("ss", 2),
    ]


def test_tree_for_s_filters_and_renumbers():
    c = pointer_contract()
    tree = build_storage_tree(c, StructType("S"))
    assert tree.leaf_paths() == [["s1"], ["ss", "[i]"]]
    assert [(e.label, e.ordinal) for e in tree.root.edges] == [("s1", 0), ("ss", 1)]


def test_empty_tree_is_legal():
    c = resolve_and_check(parse_source("contract C { struct T { int z; } int x; }"))
    tree = build_storage_tree(c, StructType("T"))
    assert tree.is_empty
    assert tree.leaf_count() == 0


def test_default_context_tree_shape():
    tree = default_context_tree(StructType("T"))
    assert tree.default_context
    assert tree.leaf_count() == 1
    assert tree.root.edges[0].label == "defaultctx_T"


def test_pack_goldens():
    c = pointer_contract(
        "function probe() { T storage a = t1; T storage b = s1.t; T storage d = ss[8].ts[5]; }"
    )
    tr = Translator(c)
    decls = c.function("probe").body
    assert eval_pack(tr, decls[0].init) == [0]
    assert eval_pack(tr, decls[1].init) == [1, 0]
    assert eval_pack(tr, decls[2].init) == [2, 8, 1, 5]


def test_pack_symbolic_index():
    c = pointer_contract("function probe(int i) { T storage a = ss[i].t; }")
    tr = Translator(c)
    expr = c.function("probe").body[0].init
    packed = tr.pack(expr)
    prog = tr.program.copy_shell()
    prog.stmts = list(tr.stmts) + [Assign(Ident("out~"), packed)]
    prog.declare("out~", ir.PTR)
    env = eval_ir(prog, {next(p.name for p in c.function("probe").params): 8}).env
    assert [env["out~"].read(k) for k in range(3)] == [2, 8, 0]


def test_unpack_matches_tree_conditional():
    c = pointer_contract()
    tr = Translator(c)
    text = format_expr(tr.unpack(Ident("ptr"), StructType("T")))
    assert text == (
        "ite((ptr[0] == 0), t1, "
        "ite((ptr[0] == 1), "
        "ite((ptr[1] == 0), s1.t, s1.ts.arr[ptr[2]]), "
        "ite((ptr[2] == 0), ss.arr[ptr[1]].t, ss.arr[ptr[1]].ts.arr[ptr[3]])))"
    )


def test_unpack_single_leaf_has_no_conditional():
    c = resolve_and_check(parse_source("contract C { struct T { int z; } T t; }"))
    tr = Translator(c)
    assert format_expr(tr.unpack(Ident("ptr"), StructType("T"))) == "t"


def test_unpack_of_packed_path_evaluates_to_entity():
    # pointer [2, 8, 1, 5] decodes exactly to ss[8].ts[5]
    from solmem.ireval import VData
    from solmem.sol_ast import Loc

    c = pointer_contract()
    tr = Translator(c)
    unpacked = tr.unpack(Ident("ptr"), StructType("T"))
    prog = tr.program.copy_shell()
    prog.declare("out~", tr.map_type(StructType("T"), Loc.STORAGE))
    prog.declare("ptr", ir.PTR)
    prog.stmts = [Assign(Ident("out~"), unpacked)]

    t_zero = VData("StorStruct_T", (0,))
    marked = VData("StorStruct_T", (55,))
    empty_ts = VData("StorArr_T", (VArray(t_zero), 0))
    s_zero = VData("StorStruct_S", (0, t_zero, empty_ts))
    # build ss with ss[8].ts[5].z == 55
    ts = VData("StorArr_T", (VArray(t_zero, {5: marked}), 6))
    s_at_8 = VData("StorStruct_S", (0, t_zero, ts))
    env = {
        "ptr": VArray(0, {0: 2, 1: 8, 2: 1, 3: 5}),
        "ss": VData("StorArr_S", (VArray(s_zero, {8: s_at_8}), 9)),
        "t1": t_zero,
        "s1": s_zero,
    }
    result = eval_ir(prog, env)
    assert result.env["out~"] == marked


def test_mapping_tree_and_bool_keys():
    src = """
contract C {
    struct R { int v; }
    mapping(bool => R) flags;
    function probe() { R storage p = flags[true]; }
}
"""
    c = resolve_and_check(parse_source(src))
    tr = Translator(c)
    expr = c.function("probe").body[0].init
    assert eval_pack(tr, expr) == [0, 1]  # true encodes as 1
    text = format_expr(tr.unpack(Ident("ptr"), StructType("R")))
    assert text == "flags[(ptr[1] != 0)]"


def test_repack_through_pointer():
    c = pointer_contract("function probe() { S storage p = ss[3]; T storage q = p.t; }")
    tr = Translator(c)
    q_init = c.function("probe").body[1].init
    packed = tr.pack(q_init)
    # the pointer p targets tree(S); re-encoding p.t in tree(T) must
    # branch on whether p denotes s1 ([0]) or ss[i] ([1, i])
    prog = tr.program.copy_shell()
    prog.stmts = list(tr.stmts) + [Assign(Ident("out~"), packed)]
    prog.declare("out~", ir.PTR)
    p_name = c.function("probe").body[0].name
    # p = [1, 3] in tree(S) coordinates (ss is edge 1 there)
    env = {p_name: VArray(0, {0: 1, 1: 3})}
    out = eval_ir(prog, env).env["out~"]
    assert [out.read(k) for k in range(3)] == [2, 3, 0]  # ss[3].t in tree(T)
    env2 = {p_name: VArray(0, {0: 0})}  # p = s1
    out2 = eval_ir(prog, env2).env["out~"]
    assert [out2.read(k) for k in range(2)] == [1, 0]  # s1.t in tree(T)
