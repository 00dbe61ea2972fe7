import json
from dataclasses import replace

import pytest

from defuncq import pipeline
from defuncq.__main__ import main
from defuncq.engine.stats import STAT_KEYS
from defuncq.syntax import ast
from defuncq.syntax.analysis import has_target_forms
from defuncq.syntax.parser import parse
from defuncq.syntax.printer import print_program
from defuncq.utils.constants import (
    EMBEDDED_CORPUS,
    EXIT_INPUT_ERROR,
    EXIT_IO_ERROR,
    EXIT_MISMATCH,
    EXIT_OK,
    EXIT_RUNTIME_ERROR,
)
from defuncq.utils.names import parse_dispatch

from .conftest import corpus_path, corpus_program


def _source(tmp_path, text):
    path = tmp_path / "program.fq"
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_run_prints_value(runner):
    result = runner.invoke(main, ["run", str(corpus_path("group-by-lazy"))])
    assert result.exit_code == EXIT_OK
    assert result.output.splitlines() == [
        "<group>0 2 8 34</group>",
        "<group>1 1 3 5 13 21</group>",
    ]


@pytest.mark.parametrize("engine", ["source", "target", "lowered"])
def test_run_on_each_engine(runner, engine):
    args = ["run", str(corpus_path("pow")), "--engine", engine, "--opt", "0"]
    result = runner.invoke(main, args)
    assert result.exit_code == EXIT_OK
    assert result.output == "8\n"


def test_run_writes_stats(runner, tmp_path):
    stats_path = tmp_path / "stats.json"
    path = str(corpus_path("fold-right-pow"))
    args = ["run", path, "--opt", "0", "--stats", str(stats_path)]
    result = runner.invoke(main, args)
    assert result.exit_code == EXIT_OK
    record = json.loads(stats_path.read_text(encoding="utf-8"))
    assert tuple(record) == STAT_KEYS
    assert record["dispatchedCalls"] == 3


@pytest.mark.parametrize(
    "text, code",
    [
        ("1 +", EXIT_INPUT_ERROR),
        ("$nowhere", EXIT_INPUT_ERROR),
        ("1 div 0", EXIT_RUNTIME_ERROR),
    ],
)
def test_run_exit_codes(runner, tmp_path, text, code):
    result = runner.invoke(main, ["run", _source(tmp_path, text)])
    assert result.exit_code == code


def test_missing_input_file(runner, tmp_path):
    result = runner.invoke(main, ["run", str(tmp_path / "missing.fq")])
    assert result.exit_code == EXIT_IO_ERROR


@pytest.mark.parametrize("engine", ["target", "lowered"])
@pytest.mark.parametrize("opt", ["0", "1", "2"])
def test_compile_first_order_is_identity(runner, engine, opt):
    path = corpus_path("first-order")
    args = ["compile", str(path), "--engine", engine, "--opt", opt]
    result = runner.invoke(main, args)
    assert result.exit_code == EXIT_OK
    assert result.output == print_program(corpus_program("first-order"))


def test_compile_writes_output_file(runner, tmp_path):
    output = tmp_path / "pow-lowered.fq"
    args = ["compile", str(corpus_path("pow")), "--repr", "node", "-o", str(output)]
    result = runner.invoke(main, args)
    assert result.exit_code == EXIT_OK
    text = output.read_text(encoding="utf-8")
    assert not has_target_forms(parse(text))
    assert text.endswith("\n") and not text.endswith("\n\n")


def test_compile_seq_not_applicable(runner):
    args = ["compile", str(corpus_path("map")), "--repr", "seq", "--opt", "0"]
    result = runner.invoke(main, args)
    assert result.exit_code == EXIT_INPUT_ERROR


def test_diff_agrees_on_corpus(runner):
    result = runner.invoke(main, ["diff", str(corpus_path("group-by-lazy"))])
    assert result.exit_code == EXIT_OK
    assert "All engines agree." in result.output


def _corrupt_dispatchers(program):
    def corrupt(decl):
        if parse_dispatch(decl.name) is None:
            return decl
        branches = tuple(
            replace(branch, body=ast.IntLit(0)) for branch in decl.body.branches
        )
        return replace(decl, body=replace(decl.body, branches=branches))

    return ast.Program(tuple(map(corrupt, program.decls)), program.main)


def test_diff_detects_corrupted_dispatcher(runner, monkeypatch):
    defunctionalize = pipeline.defunctionalize
    monkeypatch.setattr(
        pipeline,
        "defunctionalize",
        lambda program: _corrupt_dispatchers(defunctionalize(program)),
    )
    result = runner.invoke(main, ["diff", str(corpus_path("pow")), "--opt", "0"])
    assert result.exit_code == EXIT_MISMATCH
    assert "Mismatch under target opt 0" in result.output


def test_bench_without_iterations(runner):
    args = ["bench", str(corpus_path("bench")), "--iterations", "0"]
    result = runner.invoke(main, args)
    assert result.exit_code == EXIT_OK
    assert "No iterations requested." in result.output


def test_bench_table(runner):
    args = ["bench", str(corpus_path("bench")), "-n", "20"]
    result = runner.invoke(main, args)
    assert result.exit_code == EXIT_OK
    for variant in ("static", "native dynamic", "dispatched opt 2"):
        assert variant in result.output


def test_bench_needs_bench_function(runner):
    result = runner.invoke(main, ["bench", str(corpus_path("pow")), "-n", "5"])
    assert result.exit_code == EXIT_INPUT_ERROR


def test_corpus_command(runner):
    args = ["corpus", "-d", EMBEDDED_CORPUS, "-k", "pow", "-k", "group-by-eager"]
    result = runner.invoke(main, args)
    assert result.exit_code == EXIT_OK
    assert "All 2 corpus programs passed." in result.output


def test_fuzz_command(runner, tmp_path):
    args = ["fuzz", "-n", "5", "--seed", "3", "--save-dir", str(tmp_path)]
    result = runner.invoke(main, args)
    assert result.exit_code == EXIT_OK
    assert "All 5 programs agree." in result.output
    assert list(tmp_path.iterdir()) == []


@pytest.mark.parametrize("command", ["run", "compile", "diff"])
def test_undecodable_input_is_an_input_error(runner, tmp_path, command):
    path = tmp_path / "latin1.fq"
    path.write_bytes('"caf\xe9"'.encode("latin-1"))
    result = runner.invoke(main, [command, str(path)])
    assert result.exit_code == EXIT_INPUT_ERROR
