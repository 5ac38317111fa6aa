from pathlib import Path

import pytest

from dfol.surface import load_proofs, load_theory

DATA = Path(__file__).resolve().parent.parent / "src" / "dfol" / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def corpus_theory():
    return load_theory(DATA / "theories" / "corpus.thy")


@pytest.fixture(scope="session")
def lambda_theory():
    return load_theory(DATA / "theories" / "lambda.thy")


@pytest.fixture(scope="session")
def corpus_proofs():
    return {e.name: e for e in load_proofs(DATA / "proofs" / "corpus.prf")}


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
