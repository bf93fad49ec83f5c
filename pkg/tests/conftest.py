from pathlib import Path

import pytest

from kgsense.embeddings import load_embeddings
from kgsense.enrich import Enricher
from kgsense.extract import load_lexicon
from kgsense.graph import load_triples

DATA = Path(__file__).resolve().parents[1] / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def store():
    return load_embeddings(str(DATA / "embeddings.txt"))


@pytest.fixture(scope="session")
def kg():
    return load_triples(str(DATA / "kg.tsv"))


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon(str(DATA / "lexicon.tsv"))


@pytest.fixture(scope="session")
def enricher(store, kg, lexicon):
    return Enricher(store, kg, lexicon)


@pytest.fixture(scope="session")
def eval_store():
    return load_embeddings(str(DATA / "eval_embeddings.txt"))


GOLDEN_INPUT = "People in cities usually buy apples in the local markets."
GOLDEN_OUTPUT = (
    "People (citizen) in cities (settlement) usually buy apples (fruit) "
    "in the local markets (supermarket)."
)
