import pytest

from defuncq.engine.evaluator import EvalOptions, evaluate
from defuncq.engine.stats import STAT_KEYS, RunStats
from defuncq.engine.values import (
    IntAtom,
    Node,
    StrAtom,
    node_count,
    serialize,
    values_equal,
)
from defuncq.syntax.parser import parse
from defuncq.utils.constants import LOWERED, SOURCE, TARGET
from defuncq.utils.errors import (
    ArityMismatch,
    DivisionByZero,
    EngineTypeError,
    IntegerOverflow,
    NotFirstOrder,
    UnboundVariable,
    UnknownFunction,
    UnknownLabel,
)

from .conftest import corpus_program


def _run(text, engine=SOURCE):
    value, _ = evaluate(parse(text), engine)
    return value


def _ints(*numbers):
    return tuple(IntAtom(n) for n in numbers)


def test_pow_by_reference():
    assert _run("let $exp := pow#2 return $exp(2, 3)") == _ints(8)


def test_fold_right_concat():
    value, _ = evaluate(corpus_program("fold-right-concat"), SOURCE)
    assert value == (StrAtom("abc"),)


def test_group_by_on_source_engine():
    value, _ = evaluate(corpus_program("group-by-lazy"), SOURCE)
    assert serialize(value).splitlines() == [
        "<group>0 2 8 34</group>",
        "<group>1 1 3 5 13 21</group>",
    ]


def test_map_lookup():
    value, _ = evaluate(corpus_program("map"), SOURCE)
    assert value == (StrAtom("two"),)


def test_distinct_values_keep_first_occurrence():
    assert _run("distinct-values((0, 1, 1, 0, 1, 1, 0, 1, 1, 0))") == _ints(0, 1)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("7 div 2", 3),
        ("-7 div 2", -3),
        ("-7 mod 3", -1),
        ("7 mod -3", 1),
        ("greatest(3, 5)", 5),
        ("least(3, 5)", 3),
        ("sum(1 to 4)", 10),
        ("count(())", 0),
        ("-(2 + 3)", -5),
    ],
)
def test_arithmetic(text, expected):
    assert _run(text) == _ints(expected)


def test_positional_and_boolean_predicates():
    assert _run("(5, 6, 7)[2]") == _ints(6)
    assert _run("(1 to 6)[. mod 2 = 0]") == _ints(2, 4, 6)


def test_context_item_inside_dynamic_call():
    text = "let $key := function($x) { $x mod 3 } return (1 to 7)[$key(.) = 1]"
    assert _run(text) == _ints(1, 4, 7)


def test_element_content_joins_atoms():
    (node,) = _run("element group { (1, 2), 3 }")
    assert isinstance(node, Node)
    assert serialize((node,)) == "<group>1 2 3</group>"
    assert node_count((node,)) == 2


def test_untyped_content_compares_with_integers():
    text = "let $e := element key { 12 } return ($e = 12, $e/child::text() = 12)"
    assert serialize(_run(text)) == "true\ntrue"


def test_constructed_nodes_are_copies():
    text = "let $a := element a {} return element b { $a, $a }"
    (node,) = _run(text)
    first, second = node.children
    assert first.id != second.id
    assert values_equal((first,), (second,))


@pytest.mark.parametrize(
    "text, error",
    [
        ("1 div 0", DivisionByZero),
        ("pow(2, 64) * 2", IntegerOverflow),
        ("9223372036854775807 + 1", IntegerOverflow),
        ("let $f := function($x) { $x } return $f(1, 2)", ArityMismatch),
        ('"a" + 1', EngineTypeError),
        ("(1, 2) + 1", EngineTypeError),
        ("error()", UnknownLabel),
        ("declare function f() { . }; (1)[f()]", EngineTypeError),
    ],
)
def test_runtime_errors(text, error):
    with pytest.raises(error):
        _run(text)


def test_unbound_variable_at_runtime():
    with pytest.raises(UnboundVariable):
        evaluate(parse("$nowhere"), SOURCE)


def test_unknown_function_at_runtime():
    with pytest.raises(UnknownFunction):
        evaluate(parse("nope#1(3)"), SOURCE)


def test_engines_reject_foreign_forms():
    higher_order = parse("let $f := count#1 return $f((1, 2))")
    with pytest.raises(EngineTypeError):
        evaluate(higher_order, TARGET)
    with pytest.raises(NotFirstOrder):
        evaluate(higher_order, LOWERED)
    with pytest.raises(EngineTypeError):
        evaluate(parse("closure ell_1 []"), SOURCE)
    with pytest.raises(NotFirstOrder):
        evaluate(parse("closure ell_1 []"), LOWERED)


def test_case_of_on_target_engine():
    text = "case closure ell_1 [1, 2] of { ell_1 [$a, $b] => $a + $b }"
    value, stats = evaluate(parse(text), TARGET)
    assert value == _ints(3)
    assert stats.closures_built == 1


def test_case_of_without_matching_branch():
    text = "case closure ell_2 [] of { ell_1 [] => 1 }"
    with pytest.raises(UnknownLabel):
        evaluate(parse(text), TARGET)


def test_case_of_accepts_label_atoms():
    text = 'case "ell_1" of { ell_1 [] => 5 }'
    assert evaluate(parse(text), TARGET)[0] == _ints(5)


def test_case_of_slot_count_mismatch():
    text = "case closure ell_1 [1] of { ell_1 [$a, $b] => $a }"
    with pytest.raises(ArityMismatch):
        evaluate(parse(text), TARGET)


def test_recursive_declaration():
    text = (
        "declare function down($n) { if ($n = 0) then 0 else down($n - 1) }; "
        "down(10)"
    )
    assert _run(text) == _ints(0)


def test_stats_keys():
    assert set(RunStats().as_dict()) == set(STAT_KEYS)
    assert STAT_KEYS == (
        "dispatchedCalls",
        "staticCalls",
        "closuresBuilt",
        "nodesBuilt",
        "envItemsStored",
        "maxClosureDepth",
    )


def test_stats_only_grow():
    program = corpus_program("fold-right-pow")
    _, stats = evaluate(program, SOURCE, EvalOptions())
    record = stats.as_dict()
    assert all(count >= 0 for count in record.values())
    assert record["staticCalls"] >= 3


class _WatchedStats(RunStats):
    decreases = []

    def __setattr__(self, name, value):
        if value < getattr(self, name, 0):
            self.decreases.append(name)
        super().__setattr__(name, value)


def test_merged_text_is_counted_once(monkeypatch):
    monkeypatch.setattr("defuncq.engine.evaluator.RunStats", _WatchedStats)
    monkeypatch.setattr(_WatchedStats, "decreases", [])
    text = (
        'element b { element a { "x" }/child::text(), 1, '
        'element c { "y" }/child::text() }'
    )
    value, stats = evaluate(parse(text), SOURCE)
    assert serialize(value) == "<b>x1y</b>"
    assert stats.nodes_built == 6
    assert _WatchedStats.decreases == []
