from __future__ import annotations

import pytest

from cqbench.wordnet import (
    HyponymEdge,
    WordNetFormatError,
    antonym_pairs,
    hyponym_pairs,
    parse_morphosemantic_links,
    parse_wordnet_data,
)

NOUN_3 = """\
10000001 04 n 01 alpha 0 001 @ 10000002 n 0000 | first thing
10000002 04 n 01 beta 0 000 | second thing
10000003 04 n 01 gamma 0 001 @ 10000002 n 0000 | third thing
"""


class TestParseData:
    def test_fixture_loads_all_synsets(self, store):
        assert len(store.synsets) == 14
        smoking = store.synsets["10000005-n"]
        assert smoking.words == ("smoking", "smoke")
        assert smoking.gloss.startswith("the act of smoking")

    def test_hypernym_pointer_captured(self, store):
        assert HyponymEdge("10000005-n", "10000006-n", "n") in store.hypernyms

    def test_synset_without_pointers(self, store):
        machine = store.synsets["10000009-n"]
        assert machine.pos == "n"
        assert all(e.hypo != machine.id for e in store.hypernyms)

    def test_three_synsets_two_edges(self):
        store = parse_wordnet_data({"data.noun": NOUN_3})
        assert len(store.synsets) == 3
        assert len(store.hypernyms) == 2

    def test_malformed_line_names_location(self):
        with pytest.raises(WordNetFormatError, match="data.noun:2"):
            parse_wordnet_data(
                {"data.noun": "10000001 04 n 01 alpha 0 000 | ok\n10000002 04 n xx\n"}
            )

    def test_missing_gloss_separator(self):
        with pytest.raises(WordNetFormatError, match="gloss"):
            parse_wordnet_data({"data.noun": "10000001 04 n 01 alpha 0 000\n"})

    def test_dangling_pointer_dropped_with_diagnostic(self):
        store = parse_wordnet_data(
            {"data.noun": "10000001 04 n 01 alpha 0 001 @ 99999999 n 0000 | thing\n"}
        )
        assert store.hypernyms == []
        assert any("99999999" in d for d in store.diagnostics)

    def test_satellite_normalized_to_adjective(self):
        store = parse_wordnet_data(
            {"data.adj": "30000009 00 s 01 shiny 0 000 | reflecting light\n"}
        )
        assert store.synsets["30000009-a"].pos == "a"

    def test_duplicate_synset_rejected(self):
        line = "10000001 04 n 01 alpha 0 000 | thing\n"
        with pytest.raises(WordNetFormatError, match="duplicate"):
            parse_wordnet_data({"data.noun": line + line})

    def test_deterministic_across_loads(self, store):
        from .conftest import FIXTURES

        again = parse_wordnet_data(
            {
                name: (FIXTURES / "wordnet" / name).read_text()
                for name in ("data.noun", "data.verb", "data.adj")
            }
        )
        assert again.hypernyms == store.hypernyms
        assert again.antonyms == store.antonyms
        assert sorted(again.synsets) == sorted(store.synsets)


class TestHyponymPairs:
    def test_fixture_noun_pairs(self, store):
        pairs = [(e.hypo, e.hyper) for e in hyponym_pairs(store, "n")]
        assert ("10000005-n", "10000006-n") in pairs
        assert ("10000001-n", "10000002-n") in pairs
        assert pairs == sorted(pairs)

    def test_no_verb_pairs_in_noun_only_fixture(self):
        store = parse_wordnet_data({"data.noun": NOUN_3})
        assert hyponym_pairs(store, "v") == []

    def test_bad_pos_rejected(self, store):
        with pytest.raises(ValueError):
            hyponym_pairs(store, "a")

    def test_transitive_expansion(self):
        text = (
            "10000001 04 n 01 a 0 001 @ 10000002 n 0000 | x\n"
            "10000002 04 n 01 b 0 001 @ 10000003 n 0000 | x\n"
            "10000003 04 n 01 c 0 000 | x\n"
        )
        store = parse_wordnet_data({"data.noun": text})
        direct = {(e.hypo, e.hyper) for e in hyponym_pairs(store, "n")}
        closed = {(e.hypo, e.hyper) for e in hyponym_pairs(store, "n", transitive=True)}
        assert ("10000001-n", "10000003-n") not in direct
        assert ("10000001-n", "10000003-n") in closed
        assert direct < closed


class TestAntonymPairs:
    def test_fixture_pairs(self, store):
        pairs = antonym_pairs(store)
        ids = [(p.a, p.b) for p in pairs]
        assert ("20000002-v", "20000003-v") in ids
        assert ("30000001-a", "30000002-a") in ids

    def test_lemma_pair_recorded(self, store):
        pair = next(p for p in antonym_pairs(store) if p.a == "30000001-a")
        assert (pair.lemma_a, pair.lemma_b) == ("male", "female")

    def test_symmetric_links_deduplicated(self, store):
        # Both fixture synsets carry the '!' pointer; one pair survives.
        ids = [(p.a, p.b) for p in antonym_pairs(store)]
        assert len(ids) == len(set(ids)) == 2

    def test_no_self_pairs_and_canonical_order(self, store):
        for p in antonym_pairs(store):
            assert p.a < p.b


class TestMorphosemanticLinks:
    def test_machine_instrument_link(self, store, morph_links):
        assert len(morph_links) == 1
        link = morph_links[0]
        assert (link.verb, link.noun, link.role) == (
            "20000001-v",
            "10000009-n",
            "instrument",
        )

    def test_out_of_scope_relation_filtered(self, store):
        links = parse_morphosemantic_links(
            "machine%2:36:00::,event,machine%1:06:00::\n", store
        )
        assert links == []

    def test_five_rows_three_in_scope(self, store):
        text = (
            "machine%2:36:00::,instrument,machine%1:06:00::\n"
            "machine%2:36:00::,agent,machine%1:06:00::\n"
            "machine%2:36:00::,result,machine%1:06:00::\n"
            "machine%2:36:00::,event,machine%1:06:00::\n"
            "machine%2:36:00::,material,machine%1:06:00::\n"
        )
        assert len(parse_morphosemantic_links(text, store)) == 3

    def test_unresolvable_key_dropped_with_diagnostic(self, store):
        before = len(store.diagnostics)
        links = parse_morphosemantic_links(
            "missing%2:99:00::,agent,machine%1:06:00::\n", store
        )
        assert links == []
        assert any("missing%2:99:00::" in d for d in store.diagnostics[before:])

    def test_every_link_references_store(self, store, morph_links):
        for link in morph_links:
            assert link.verb in store.synsets
            assert link.noun in store.synsets
            assert store.synsets[link.verb].pos == "v"
            assert store.synsets[link.noun].pos == "n"
