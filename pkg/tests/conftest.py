import json
import os

import pytest

import animflow as af

CORPUS = os.path.join(os.path.dirname(__file__), "corpus")
GOLDEN = os.path.join(os.path.dirname(__file__), "golden")

CORPUS_SPECS = ["gapminder", "stores", "barrace", "barrace_fixed", "trailing", "static"]


def corpus_path(name: str) -> str:
    return os.path.join(CORPUS, name)


def load_corpus_spec(name: str):
    with open(corpus_path(f"{name}.json"), encoding="utf-8") as f:
        return af.parse_spec(f.read())


def load_corpus_doc(name: str) -> dict:
    with open(corpus_path(f"{name}.json"), encoding="utf-8") as f:
        return json.load(f)


def build_corpus(name: str):
    spec = load_corpus_spec(name)
    state, diags, graph = af.build(spec, spec_dir=CORPUS)
    assert not [d for d in diags if d.severity == "error"], diags
    return state, graph


def corpus_table(name: str):
    spec = load_corpus_spec(name)
    return af.load_data(spec, spec_dir=CORPUS)


@pytest.fixture
def gapminder():
    return build_corpus("gapminder")[0]


@pytest.fixture
def gapminder_table():
    return corpus_table("gapminder")
