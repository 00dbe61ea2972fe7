from pathlib import Path

import pytest
from click.testing import CliRunner

from defuncq.corpus.corpus import load_manifest
from defuncq.pipeline import read_program
from defuncq.utils.constants import EMBEDDED_CORPUS

CORPUS = load_manifest(EMBEDDED_CORPUS)
CORPUS_NAMES = [entry.name for entry in CORPUS]


def corpus_path(name):
    return Path(EMBEDDED_CORPUS) / f"{name}.fq"


def corpus_program(name):
    return read_program(corpus_path(name))


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(params=CORPUS, ids=CORPUS_NAMES)
def corpus_entry(request):
    return request.param
