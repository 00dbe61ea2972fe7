import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from defuncq.defunc.defunctionalize import defunctionalize
from defuncq.engine.evaluator import evaluate
from defuncq.engine.values import serialize, values_equal
from defuncq.fuzz.generator import GenConfig, gen_program
from defuncq.rewrite.cancel import cancel_case_of
from defuncq.rewrite.optimize import (
    PASSES,
    OptimizeReport,
    optimize,
    optimize_with_report,
)
from defuncq.rewrite.simplify import (
    drop_empty_closures,
    remove_dead_declarations,
    simplify,
)
from defuncq.rewrite.traversal import CallGraph, count_free, uses_context_item
from defuncq.rewrite.unfold import unfold
from defuncq.syntax import ast
from defuncq.syntax.parser import parse, parse_expr
from defuncq.utils.constants import DEFAULT_FUZZ_COUNT, OPT_LEVELS, SOURCE, TARGET
from defuncq.utils.errors import EvaluationError, RewriteError
from defuncq.utils.names import parse_dispatch

from .conftest import CORPUS_NAMES, corpus_program


def _forms(program, *types):
    return [e for e in ast.walk_program(program) if isinstance(e, types)]


def test_simple_let_is_inlined():
    program = unfold(parse("let $x := 1 return $x + $x"))
    assert program.main == ast.BuiltinCall("+", (ast.IntLit(1), ast.IntLit(1)))


def test_recursive_functions_stay():
    program = optimize(defunctionalize(corpus_program("fold-right-pow")), 2)
    assert program.decl("fold-right") is not None
    assert "fold-right" in CallGraph.of(program).recursive()


def test_cancel_binds_slots():
    program = cancel_case_of(
        parse("let $k := 3 return case closure ell_1 [$k] of { ell_1 [$v] => $v }")
    )
    assert program.main == ast.Let(
        "k", ast.IntLit(3), ast.Let("v", ast.VarRef("k"), ast.VarRef("v"))
    )


def test_cancel_label_atom():
    program = cancel_case_of(parse('case "ell_2" of { ell_2 [] => 7 }'))
    assert program.main == ast.IntLit(7)


def test_cancel_floats_over_let():
    program = cancel_case_of(
        parse("case let $y := 1 return closure ell_1 [$y] of { ell_1 [$a] => $a }")
    )
    assert program.main == ast.Let(
        "y", ast.IntLit(1), ast.Let("a", ast.VarRef("y"), ast.VarRef("a"))
    )


def test_cancel_without_branch():
    with pytest.raises(RewriteError):
        cancel_case_of(parse("case closure ell_3 [] of { ell_1 [] => 1 }"))


def test_eager_group_by_loses_its_closures():
    program = optimize(defunctionalize(corpus_program("group-by-eager")), 2)
    assert _forms(program, ast.ClosureCtor, ast.CaseOf) == []
    assert not [d for d in program.decls if parse_dispatch(d.name) is not None]
    value, stats = evaluate(program, TARGET)
    expected, _ = evaluate(corpus_program("group-by-eager"), SOURCE)
    assert values_equal(value, expected)
    assert stats.dispatched_calls == 0


@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_opt_zero_is_identity(name):
    target = defunctionalize(corpus_program(name))
    assert optimize(target, 0) == target


@pytest.mark.parametrize("name", CORPUS_NAMES)
@pytest.mark.parametrize("rewrite", [unfold, cancel_case_of, simplify])
def test_each_pass_preserves_values(name, rewrite):
    target = defunctionalize(corpus_program(name))
    expected, _ = evaluate(target, TARGET)
    value, _ = evaluate(rewrite(target), TARGET)
    assert values_equal(value, expected)


def test_optimize_report():
    target = defunctionalize(corpus_program("pow"))
    program, report = optimize_with_report(target, 1)
    assert isinstance(report, OptimizeReport)
    assert report.level == 1 and not report.capped
    assert report.rounds >= 1
    assert report.size_after == ast.program_size(program)
    assert optimize_with_report(target, 0)[1].rounds == 0


@pytest.mark.parametrize("level", OPT_LEVELS)
def test_optimize_reaches_fixpoint(level):
    program = optimize(defunctionalize(corpus_program("map")), level)
    assert optimize(program, level) == program


def test_empty_closures_become_label_atoms():
    assert drop_empty_closures(parse_expr("closure ell_4 []")) == ast.StrLit("ell_4")
    kept = parse_expr("closure ell_4 [1]")
    assert drop_empty_closures(kept) == kept


def test_dead_declarations_are_removed():
    program = parse(
        "declare function used() { 1 }; declare function unused() { 2 }; used()"
    )
    assert [d.name for d in remove_dead_declarations(program).decls] == ["used"]


def test_count_free_respects_shadowing():
    expr = parse_expr("($x, let $x := 1 return $x, $x)")
    assert count_free(expr, "x") == 2


def test_context_item_inside_predicate_is_bound():
    assert not uses_context_item(parse_expr("(1, 2)[. = 1]"))
    assert uses_context_item(parse_expr(". + 1"))


@pytest.mark.parametrize("name", CORPUS_NAMES)
@pytest.mark.parametrize("level", OPT_LEVELS)
def test_optimization_never_grows_corpus_programs(name, level):
    target = defunctionalize(corpus_program(name))
    program, report = optimize_with_report(target, level)
    assert ast.program_size(program) <= ast.program_size(target)
    assert report.size_after <= report.size_before


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=10**6),
    level=st.sampled_from([1, 2]),
)
def test_optimization_never_grows_generated_programs(seed, level):
    target = defunctionalize(gen_program(GenConfig(seed=seed)))
    assert ast.program_size(optimize(target, level)) <= ast.program_size(target)


def test_growing_round_is_rejected(monkeypatch):
    def bloat(program):
        return ast.Program(program.decls, ast.seq(program.main, ast.Seq(())))

    monkeypatch.setitem(PASSES, 1, (bloat,))
    target = defunctionalize(corpus_program("pow"))
    program, report = optimize_with_report(target, 1)
    assert program == target
    assert report.rejected and report.rounds == 1


def _result(program):
    try:
        value, _ = evaluate(program, TARGET)
    except EvaluationError as e:
        return e.tag
    return serialize(value)


def _preserves_values(rewrite, seed):
    target = defunctionalize(gen_program(GenConfig(seed=seed)))
    return _result(rewrite(target)) == _result(target)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10**6))
@pytest.mark.parametrize("rewrite", [unfold, cancel_case_of, simplify])
def test_each_pass_preserves_generated_values(rewrite, seed):
    assert _preserves_values(rewrite, seed)


@pytest.mark.slow
@pytest.mark.parametrize("rewrite", [unfold, cancel_case_of, simplify])
def test_each_pass_preserves_default_fuzz_run(rewrite):
    seeds = range(1, DEFAULT_FUZZ_COUNT + 1)
    assert [seed for seed in seeds if not _preserves_values(rewrite, seed)] == []
