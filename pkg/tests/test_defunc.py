import pytest

from defuncq.defunc.defunctionalize import (
    DispatchRegistry,
    LabelGen,
    LiftedSet,
    declare_dispatch,
    defunctionalize,
    lambda_lift,
    transform_expr,
)
from defuncq.syntax import ast
from defuncq.syntax.analysis import check_first_order, validate
from defuncq.syntax.parser import parse, parse_expr
from defuncq.syntax.printer import print_expr
from defuncq.utils.errors import ValidationError

from .conftest import CORPUS_NAMES, corpus_program


def _decl_names(program):
    return [decl.name for decl in program.decls]


def test_named_reference_becomes_empty_closure():
    program = defunctionalize(parse("let $exp := pow#2 return $exp(2, 3)"))
    assert program.main == ast.Let(
        "exp",
        ast.ClosureCtor(1, ()),
        ast.StaticCall(
            "dispatch_2", (ast.VarRef("exp"), ast.IntLit(2), ast.IntLit(3))
        ),
    )
    (dispatcher,) = program.decls
    assert dispatcher.params == ("clos", "b1", "b2")
    (branch,) = dispatcher.body.branches
    assert branch == ast.Branch(
        1, (), ast.BuiltinCall("pow", (ast.VarRef("b1"), ast.VarRef("b2")))
    )


def test_group_by_layout():
    program = defunctionalize(corpus_program("group-by-lazy"))
    assert _decl_names(program) == [
        "dispatch_0",
        "dispatch_1",
        "ell_1",
        "ell_2",
        "group-by",
    ]
    assert program.decl("ell_1").params == ("k", "key", "seq")
    assert program.decl("ell_2").params == ("x",)
    (branch,) = program.decl("dispatch_0").body.branches
    assert branch.label == 1 and branch.vars == ("k", "key", "seq")
    assert "dispatch_0(" in print_expr(program.main)


def test_literal_lifting():
    registry, lifted = DispatchRegistry(), LiftedSet()
    expr = parse_expr("function() { $seq[$key(.) = $k] }")
    closure = transform_expr(expr, registry, lifted, LabelGen())
    assert closure == ast.ClosureCtor(
        1, (ast.VarRef("k"), ast.VarRef("key"), ast.VarRef("seq"))
    )
    (surrogate,) = lifted.decls
    assert surrogate.name == "ell_1"
    assert surrogate.params == ("k", "key", "seq")
    assert "dispatch_1" in print_expr(surrogate.body)


def test_lambda_lift_appends_free_variables():
    literal = parse_expr("function($x) { $x mod 2 }")
    decl = lambda_lift(literal, [], 2)
    assert decl.name == "ell_2" and decl.params == ("x",)


def test_declare_dispatch_without_branches():
    assert declare_dispatch(3, []) is None


def test_declare_dispatch_renames_colliding_branch_vars():
    branch = ast.Branch(
        4, ("b1",), ast.StaticCall("ell_4", (ast.VarRef("b1"), ast.VarRef("b1")))
    )
    decl = declare_dispatch(1, [branch])
    (arm,) = decl.body.branches
    assert arm.vars[0] not in ("b1", "clos")
    fresh = ast.VarRef(arm.vars[0])
    assert arm.body == ast.StaticCall("ell_4", (fresh, fresh))


def test_every_reference_gets_its_own_label():
    program = defunctionalize(parse("(count#1, count#1)"))
    assert program.main == ast.Seq((ast.ClosureCtor(1, ()), ast.ClosureCtor(2, ())))


def test_identity_on_first_order_programs():
    program = corpus_program("map-first-order")
    assert defunctionalize(program) == program


@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_output_is_target_language(name):
    program = defunctionalize(corpus_program(name))
    assert check_first_order(program) == []
    assert validate(program, reserved=False) == []


def test_labels_continue_above_existing_ones():
    program = parse(
        "declare function ell_7($x) { $x }; "
        "(case closure ell_7 [] of { ell_7 [] => 1 }, function() { 2 })"
    )
    result = defunctionalize(program)
    assert result.decl("ell_8") is not None


def test_invalid_input_is_rejected():
    with pytest.raises(ValidationError):
        defunctionalize(parse("$nowhere"))


def test_labels_follow_source_order_in_dynamic_calls():
    program = defunctionalize(parse("(function($f) { $f(1) })(count#1)"))
    assert program.main == ast.StaticCall(
        "dispatch_1", (ast.ClosureCtor(1, ()), ast.ClosureCtor(2, ()))
    )
    assert program.decl("ell_1").params == ("f",)
