import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from defuncq.diff.diff import describe, find_mismatch, outcome, variants
from defuncq.engine.values import IntAtom, serialize, values_equal
from defuncq.fuzz.generator import GenConfig, gen_program
from defuncq.pipeline import PipelineConfig, compile_program, load_program, run_program
from defuncq.syntax.analysis import check_first_order
from defuncq.utils.constants import LOWERED, OPT_LEVELS, SEQ, SOURCE, TARGET
from defuncq.utils.errors import ValidationError

from .conftest import corpus_program


def test_corpus_goldens(corpus_entry):
    program = corpus_program(corpus_entry.name)
    reference = outcome(program, PipelineConfig(engine=SOURCE))
    assert reference.error is None
    assert tuple(reference.text.splitlines()) == corpus_entry.expected
    assert find_mismatch(program) is None


def test_dispatched_calls_never_grow_with_opt(corpus_entry):
    program = corpus_program(corpus_entry.name)
    counts = []
    for opt in OPT_LEVELS:
        _, stats = run_program(program, PipelineConfig(engine=TARGET, opt=opt))
        counts.append(stats.dispatched_calls)
    assert counts == sorted(counts, reverse=True)


def test_pow_on_every_engine():
    program = corpus_program("pow")
    configs = [PipelineConfig(engine=SOURCE), *variants(program)]
    assert any(config.repr == SEQ for config in configs)
    for config in configs:
        value, _ = run_program(program, config)
        assert value == (IntAtom(8),), describe(config)


def test_lowered_programs_are_first_order(corpus_entry):
    program = corpus_program(corpus_entry.name)
    for opt in OPT_LEVELS:
        compiled = compile_program(program, PipelineConfig(engine=LOWERED, opt=opt))
        assert check_first_order(compiled) == []


def test_source_engine_runs_program_as_written():
    program = corpus_program("map")
    assert compile_program(program, PipelineConfig(engine=SOURCE)) is program


def test_erroring_engines_agree():
    program = load_program("let $f := function($x) { $x div 0 } return $f(1)")
    assert find_mismatch(program) is None
    assert outcome(program, PipelineConfig(engine=SOURCE)).error


def test_load_program_validates():
    with pytest.raises(ValidationError) as e:
        load_program("declare function f($x) { $y }; f(1)")
    assert "y" in str(e.value)


def test_config_but():
    config = PipelineConfig()
    changed = config.but(opt=2, share_env=True)
    assert (changed.opt, changed.share_env) == (2, True)
    assert (config.engine, config.opt, config.share_env) == (TARGET, 1, False)


def test_errors_of_different_kinds_disagree():
    program = load_program("let $f := count#1 return $f(1, 2)")
    mismatch = find_mismatch(program)
    assert mismatch is not None
    assert mismatch.expected.error_kind == "ArityMismatch"
    assert mismatch.actual.error_kind != "ArityMismatch"


@pytest.mark.parametrize("name", ["first-order", "map-first-order"])
@pytest.mark.parametrize("engine", [SOURCE, TARGET, LOWERED])
def test_first_order_programs_build_no_closures(name, engine):
    _, stats = run_program(corpus_program(name), PipelineConfig(engine=engine))
    assert stats.dispatched_calls == 0
    assert stats.closures_built == 0
    assert stats.env_items_stored == 0
    assert stats.max_closure_depth == 0
    assert stats.static_calls > 0


@pytest.mark.parametrize("opt", OPT_LEVELS)
def test_shared_environments_give_equal_values(corpus_entry, opt):
    program = corpus_program(corpus_entry.name)
    config = PipelineConfig(engine=TARGET, opt=opt)
    shared, _ = run_program(program, config.but(share_env=True))
    plain, _ = run_program(program, config.but(share_env=False))
    assert values_equal(shared, plain)
    assert serialize(shared) == serialize(plain)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10**6))
def test_shared_environments_on_generated_programs(seed):
    program = gen_program(GenConfig(seed=seed))
    config = PipelineConfig(engine=TARGET, opt=0)
    shared = outcome(program, config.but(share_env=True))
    plain = outcome(program, config.but(share_env=False))
    assert shared.agrees_with(plain)
    assert shared.text == plain.text
