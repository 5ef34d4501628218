from __future__ import annotations

from pathlib import Path

import pytest

from cqbench.generate import generate_all
from cqbench.kif import build_index, parse_kif
from cqbench.mapping import load_mapping_dir
from cqbench.wordnet import load_wordnet_dir, parse_morphosemantic_links

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def mini_index():
    return build_index(parse_kif((FIXTURES / "mini_sumo.kif").read_text()))


@pytest.fixture(scope="session")
def store():
    return load_wordnet_dir(FIXTURES / "wordnet")


@pytest.fixture(scope="session")
def mapping_entries(store):
    entries, diagnostics = load_mapping_dir(FIXTURES / "mapping")
    assert not diagnostics
    return entries


@pytest.fixture(scope="session")
def morph_links(store):
    return parse_morphosemantic_links(
        (FIXTURES / "morphosemantic_links.csv").read_text(), store
    )


@pytest.fixture(scope="session")
def fixture_cqs(store, mapping_entries, mini_index, morph_links):
    cqs, diagnostics = generate_all(store, mapping_entries, mini_index, morph_links)
    assert not diagnostics
    return cqs
