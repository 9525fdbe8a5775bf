"""LHS elimination and SSA conversion, checked against the evaluator."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irgen import random_env, random_ir_program
from solmem import ir
from solmem.errors import IrError
from solmem.ir import (
    ArrayRead,
    ArrayWrite,
    Assert,
    Assign,
    BoolLit,
    Construct,
    Ident,
    IfStmt,
    IntLit,
    Ite,
    Select,
    SmtProgram,
)
from solmem.ireval import eval_ir, values_equal
from solmem.normalize import normalize_lhs
from solmem.ssa import to_ssa


def _shell(decls=(), datatypes=()):
    p = SmtProgram()
    for dt in datatypes:
        p.add_datatype(dt)
    for n, t in decls:
        p.declare(n, t)
    return p


def test_array_write_rule():
    p = _shell([("a", ir.ArrayType(ir.INT, ir.INT)), ("i", ir.INT), ("e", ir.INT)])
    p.stmts = [Assign(ArrayRead(Ident("a"), Ident("i")), Ident("e"))]
    out = normalize_lhs(p)
    assert out.stmts == [Assign(Ident("a"), ArrayWrite(Ident("a"), Ident("i"), Ident("e")))]


def test_member_constructor_rule():
    dt = ir.DatatypeDef("D", (("m1", ir.INT), ("m2", ir.INT), ("m3", ir.INT)))
    p = _shell([("d", ir.DatatypeType("D")), ("e", ir.INT)], [dt])
    p.stmts = [Assign(Select(Ident("d"), "m2", "D"), Ident("e"))]
    out = normalize_lhs(p)
    expected = Assign(
        Ident("d"),
        Construct(
            "D",
            (Select(Ident("d"), "m1", "D"), Ident("e"), Select(Ident("d"), "m3", "D")),
        ),
    )
    assert out.stmts == [expected]


def test_ite_branch_duplication_rule():
    p = _shell([("c", ir.BOOL), ("x", ir.INT), ("y", ir.INT)])
    p.stmts = [Assign(Ite(Ident("c"), Ident("x"), Ident("y")), IntLit(5))]
    out = normalize_lhs(p)
    assert out.stmts == [
        IfStmt(
            Ident("c"),
            (Assign(Ident("x"), IntLit(5)),),
            (Assign(Ident("y"), IntLit(5)),),
        )
    ]


def test_nested_lvalue_peels_to_identifier():
    dt = ir.DatatypeDef("D", (("m", ir.ArrayType(ir.INT, ir.INT)),))
    p = _shell([("d", ir.DatatypeType("D"))], [dt])
    p.stmts = [Assign(ArrayRead(Select(Ident("d"), "m", "D"), IntLit(1)), IntLit(9))]
    out = normalize_lhs(p)
    (stmt,) = out.stmts
    assert isinstance(stmt, Assign) and stmt.lhs == Ident("d")
    result = eval_ir(out)
    assert result.env["d"].members[0].read(1) == 9


def test_non_lvalue_rejected():
    p = _shell()
    p.stmts = [Assign(IntLit(3), IntLit(4))]
    with pytest.raises(IrError):
        normalize_lhs(p)


def test_ssa_sequential_renaming():
    p = _shell([("x", ir.INT)])
    p.stmts = [
        Assign(Ident("x"), IntLit(1)),
        Assign(Ident("x"), ir.add(Ident("x"), IntLit(1))),
    ]
    out = to_ssa(p)
    assert out.program.stmts == [
        Assign(Ident("x!1"), IntLit(1)),
        Assign(Ident("x!2"), ir.add(Ident("x!1"), IntLit(1))),
    ]
    assert out.final_versions["x"] == "x!2"


def test_ssa_merges_branches_with_ite():
    p = _shell([("c", ir.BOOL), ("x", ir.INT)])
    p.stmts = [
        IfStmt(
            Ident("c"),
            (Assign(Ident("x"), IntLit(1)),),
            (Assign(Ident("x"), IntLit(2)),),
        ),
        Assert(ir.lt(IntLit(0), Ident("x"))),
    ]
    out = to_ssa(p)
    stmts = out.program.stmts
    # both branch definitions, one ite merge, then the assert over it
    merge = stmts[2]
    assert isinstance(merge, Assign)
    assert merge.rhs == Ite(Ident("c"), Ident("x!1"), Ident("x!2"))
    assert isinstance(stmts[3], Assert)
    assert out.final_versions["x"] == merge.lhs.name
    for env in ({"c": True}, {"c": False}):
        a = eval_ir(p, dict(env))
        b = eval_ir(out.program, dict(env))
        assert a.status == b.status == "ok"
        assert a.env["x"] == b.env[out.final_versions["x"]]


def _equivalent(seed: int) -> None:
    original = random_ir_program(seed)
    env = random_env(seed)
    normalized = normalize_lhs(original)
    ssa = to_ssa(normalized)

    r0 = eval_ir(original, dict(env))
    r1 = eval_ir(normalized, dict(env))
    r2 = eval_ir(ssa.program, dict(env))

    assert r0.status == r1.status == r2.status
    assert r0.failed_index == r1.failed_index == r2.failed_index
    if r0.status == "ok":
        for name, _ in original.decls:
            assert values_equal(r0.env.get(name), r1.env.get(name)), name
            final = ssa.final_versions[name]
            v2 = r2.env.get(final)
            if v2 is None and final == name:
                continue
            assert values_equal(r0.env.get(name), v2), name


@pytest.mark.parametrize("seed", range(40))
def test_transformations_preserve_evaluation(seed):
    _equivalent(seed)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1000, max_value=100000))
def test_transformations_preserve_evaluation_hypothesis(seed):
    _equivalent(seed)


def test_ssa_requires_normalized_input():
    p = _shell([("a", ir.ArrayType(ir.INT, ir.INT))])
    p.stmts = [Assign(ArrayRead(Ident("a"), IntLit(0)), IntLit(1))]
    with pytest.raises(IrError):
        to_ssa(p)


def test_ssa_guards_nested_asserts_with_path_condition():
    p = _shell([("c", ir.BOOL)])
    p.stmts = [IfStmt(Ident("c"), (Assert(BoolLit(False)),), ())]
    out = to_ssa(p)
    assert eval_ir(out.program, {"c": False}).status == "ok"
    assert eval_ir(out.program, {"c": True}).status == "assert-failed"
