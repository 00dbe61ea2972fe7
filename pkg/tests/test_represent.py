import pytest
from hypothesis import given
from hypothesis import strategies as st

from defuncq.defunc.defunctionalize import defunctionalize
from defuncq.diff.diff import find_mismatch
from defuncq.engine.evaluator import EvalOptions, evaluate
from defuncq.engine.values import (
    IntAtom,
    StrAtom,
    node_count,
    serialize,
    values_equal,
)
from defuncq.represent.envstore import EnvStore
from defuncq.represent.labelflow import (
    Decision,
    analyze_inlining,
    applicability_seq,
    label_dependencies,
)
from defuncq.represent.lowering import (
    choose_representation,
    lower_node,
    lower_seq,
)
from defuncq.syntax import ast
from defuncq.syntax.analysis import has_target_forms
from defuncq.syntax.parser import parse
from defuncq.utils.constants import LOWERED, NODE, SEQ, SOURCE, TARGET
from defuncq.utils.errors import NotApplicable

from .conftest import corpus_path, corpus_program

_atoms = st.one_of(
    st.integers(-5, 5).map(IntAtom), st.sampled_from("abc").map(StrAtom)
)
_values = st.lists(_atoms, max_size=3).map(tuple)
_envs = st.lists(_values, min_size=1, max_size=3).map(tuple)


@given(first=_envs, second=_envs)
def test_shared_store_keys_are_injective(first, second):
    store = EnvStore(share=True)
    a, b = store.intern(first), store.intern(second)
    assert (a == b) == (len(first) == len(second) and all(
        map(values_equal, first, second)
    ))


@given(env=_envs)
def test_store_lookup_restores_environment(env):
    for share in (True, False):
        store = EnvStore(share=share)
        restored = store.lookup(store.intern(env))
        assert len(restored) == len(env)
        assert all(map(values_equal, restored, env))


def test_unshared_store_appends():
    store = EnvStore(share=False)
    env = ((IntAtom(1),), (IntAtom(2), IntAtom(3)))
    assert store.intern(env) != store.intern(env)


def test_shared_sequences_are_stored_once():
    store = EnvStore(share=True)
    seq = tuple(IntAtom(i) for i in range(10))
    for k in range(4):
        store.intern(((IntAtom(k),), seq))
    assert store.total_stored_items == 10 + 4 * 2


def test_map_closure_is_stored():
    decisions = analyze_inlining(defunctionalize(corpus_program("map")))
    assert decisions[3] == Decision.STORE
    assert decisions[1] == Decision.INLINE


def test_label_chain_is_inlined():
    target = defunctionalize(corpus_program("completion"))
    graph = label_dependencies(target)
    assert (1, 4) in graph.edges and (3, 4) in graph.edges
    assert set(analyze_inlining(target).values()) == {Decision.INLINE}


def test_no_closures_no_decisions():
    assert analyze_inlining(corpus_program("first-order")) == {}


@pytest.mark.parametrize(
    "name, applicable",
    [("pow", True), ("group-by-lazy", False), ("map", False)],
)
def test_seq_applicability(name, applicable):
    assert applicability_seq(defunctionalize(corpus_program(name))) is applicable


def test_choose_representation():
    assert choose_representation(defunctionalize(corpus_program("pow"))) == SEQ
    group_by = defunctionalize(corpus_program("group-by-lazy"))
    assert choose_representation(group_by) == NODE
    assert choose_representation(group_by, SEQ) == SEQ


def test_seq_lowering_rejects_nested_closures():
    with pytest.raises(NotApplicable):
        lower_seq(defunctionalize(corpus_program("map")))


def test_seq_closure_layout():
    program = lower_seq(parse("let $k := 0 return closure ell_1 [$k]"))
    value, _ = evaluate(program, LOWERED)
    assert value == (StrAtom("ell_1"), IntAtom(0))


@pytest.mark.parametrize("lowering", [lower_node, lower_seq])
def test_lowered_programs_are_first_order(lowering):
    program = lowering(defunctionalize(corpus_program("pow")))
    assert not has_target_forms(program)
    value, _ = evaluate(program, LOWERED)
    assert value == (IntAtom(8),)


def test_node_lowering_wraps_environments():
    program = lower_node(parse("closure ell_1 [1]"))
    value, _ = evaluate(program, LOWERED)
    (node,) = value
    assert node.tag == "ell_1"
    (env,) = node.children
    (atom,) = env.children
    (integer,) = atom.children
    assert (env.tag, atom.tag, integer.tag) == ("env", "atom", "integer")


def test_node_lowering_without_closures_is_identity():
    program = corpus_program("map-first-order")
    assert lower_node(program) == program


def _with_main(name, main):
    program = corpus_program(name)
    return ast.Program(program.decls, parse(main).main)


def _map_entries(n):
    entries = ", ".join(f'map-entry({k}, "v")' for k in range(1, n + 1))
    return f"map-new(({entries}))"


def test_functional_map_grows_by_ten_nodes_per_entry():
    counts = []
    for n in range(1, 7):
        program = _with_main("map", _map_entries(n))
        lowered = lower_node(defunctionalize(program))
        value, _ = evaluate(lowered, LOWERED)
        counts.append(node_count(value))
    assert [b - a for a, b in zip(counts, counts[1:])] == [10] * 5


def test_first_order_map_grows_by_nine_nodes_per_entry():
    counts = []
    for n in range(1, 7):
        program = _with_main("map-first-order", _map_entries(n))
        value, _ = evaluate(program, LOWERED)
        counts.append(node_count(value))
    assert [b - a for a, b in zip(counts, counts[1:])] == [9] * 5
    assert counts[0] == 1 + 9


def _lazy_group_by(items, groups):
    text = corpus_path("group-by-lazy").read_text(encoding="utf-8")
    declaration = text[: text.index("let $fib")]
    main = (
        f"for $g in group-by(1 to {items}, function($x) {{ $x mod {groups} }}) "
        "return count($g())"
    )
    return defunctionalize(parse(declaration + main))


def test_environment_sharing_bound():
    items, groups = 100, 10
    program = _lazy_group_by(items, groups)
    shared_value, shared = evaluate(program, TARGET, EvalOptions(share_env=True))
    plain_value, plain = evaluate(program, TARGET, EvalOptions(share_env=False))
    assert values_equal(shared_value, plain_value)
    assert shared_value == (IntAtom(10),) * groups
    assert shared.env_items_stored <= items + 5 * groups
    assert plain.env_items_stored >= 0.9 * groups * items


def _captured(items):
    return parse(f"let $t := ({items}) return function() {{ $t }}()")


def test_captured_text_nodes_stay_apart():
    program = _captured(
        'element a { "x" }/child::text(), element b { "y" }/child::text()'
    )
    value, _ = evaluate(lower_node(defunctionalize(program)), LOWERED)
    assert len(value) == 2
    assert serialize(value) == "x\ny"
    assert find_mismatch(program) is None


@pytest.mark.parametrize("tag", ["atom", "node", "env"])
def test_captured_elements_named_like_wrappers(tag):
    program = _captured(f'element {tag} {{ element integer {{ "5" }} }}, 1')
    expected, _ = evaluate(program, SOURCE)
    value, _ = evaluate(lower_node(defunctionalize(program)), LOWERED)
    assert serialize(value) == serialize(expected)
    assert serialize(value) == f"<{tag}><integer>5</integer></{tag}>\n1"
    assert find_mismatch(program) is None


def test_returned_closures_hold_their_environment():
    program = defunctionalize(_with_main("map", _map_entries(3)))
    shared, _ = evaluate(program, TARGET, EvalOptions(share_env=True))
    plain, _ = evaluate(program, TARGET, EvalOptions(share_env=False))
    (closure,) = shared
    assert closure.key is None and closure.env
    assert values_equal(shared, plain)
    assert serialize(shared) == serialize(plain)
