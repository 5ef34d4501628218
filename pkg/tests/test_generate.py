from __future__ import annotations

from collections import Counter

import pytest

from cqbench.formulas import (
    And,
    Exists,
    Forall,
    FormulaShapeError,
    Implies,
    Not,
    attribute_atom,
    free_variables,
    instance_atom,
    parse_fof_document,
    role_atom,
)
from cqbench.generate import (
    QpKind,
    emit_tptp,
    generate_all,
    generate_antonymy_cqs,
    generate_hyponymy_cqs,
    generate_morphosemantic_cqs,
    make_test_pair,
    read_manifest,
    rebuild_cq,
    write_manifest,
    write_problems,
)
from cqbench.kif import build_index, parse_kif
from cqbench.mapping import parse_mapping_file
from cqbench.wordnet import parse_wordnet_data

from .properties import check_involution

EQ4_TRUTH = Forall(
    ("X",), Implies(instance_atom("X", "Smoking"), instance_atom("X", "Breathing"))
)
EQ1_TRUTH = Forall(
    ("Y",),
    Implies(
        instance_atom("Y", "Machine"),
        Exists(
            ("X",),
            And((instance_atom("X", "Making"), role_atom("instrument", "X", "Y"))),
        ),
    ),
)


def by_id(cqs):
    return {cq.id: cq for cq in cqs}


class TestHyponymy:
    def test_smoking_breathing_noun2(self, fixture_cqs):
        cq = next(c for c in fixture_cqs if "Smoking" in c.terms)
        assert cq.kind is QpKind.NOUN_HYPO2
        assert cq.truth == EQ4_TRUTH

    def test_army_noun2(self, fixture_cqs):
        cq = next(c for c in fixture_cqs if "Army" in c.terms)
        assert cq.kind is QpKind.NOUN_HYPO2
        assert cq.terms == ("Army", "MilitaryService")
        assert cq.relations == ("=", "=")

    def test_subsumption_mapping_gives_pattern_one(self, fixture_cqs):
        cq = next(c for c in fixture_cqs if "Lightning" in c.terms)
        assert cq.kind is QpKind.NOUN_HYPO1

    def test_identical_terms_skipped(self):
        store = parse_wordnet_data(
            {
                "data.noun": (
                    "10000001 06 n 01 machine 0 001 @ 10000002 n 0000 | a\n"
                    "10000002 06 n 01 device 0 000 | b\n"
                )
            }
        )
        entries, _ = parse_mapping_file(
            "10000001 06 n 01 machine 0 000 | a &%Machine=\n"
            "10000002 06 n 01 device 0 000 | b &%Machine=\n",
            "n",
        )
        index = build_index(parse_kif("(subclass Machine Device)"))
        cqs, diags = generate_hyponymy_cqs(store, entries, index, "n")
        assert cqs == []
        assert diags == []

    def test_missing_mapping_skipped_with_diagnostic(self):
        store = parse_wordnet_data(
            {
                "data.noun": (
                    "10000001 06 n 01 army 0 001 @ 10000002 n 0000 | a\n"
                    "10000002 06 n 01 service 0 000 | b\n"
                )
            }
        )
        entries, _ = parse_mapping_file(
            "10000001 06 n 01 army 0 000 | a &%Army=\n", "n"
        )
        index = build_index(parse_kif("(subclass Army MilitaryService)"))
        cqs, diags = generate_hyponymy_cqs(store, entries, index, "n")
        assert cqs == []
        assert any("10000002-n" in d for d in diags)

    def test_entry_pair_combinations(self):
        store = parse_wordnet_data(
            {
                "data.noun": (
                    "10000001 06 n 01 a 0 001 @ 10000002 n 0000 | a\n"
                    "10000002 06 n 01 b 0 000 | b\n"
                )
            }
        )
        entries, _ = parse_mapping_file(
            "10000001 06 n 01 a 0 000 | a &%Army= &%Machine+\n"
            "10000002 06 n 01 b 0 000 | b &%MilitaryService= &%Device+\n",
            "n",
        )
        index = build_index(
            parse_kif(
                "(subclass Army MilitaryService)(subclass Machine Device)"
            )
        )
        cqs, _ = generate_hyponymy_cqs(store, entries, index, "n")
        assert len(cqs) == 4
        kinds = Counter(cq.kind for cq in cqs)
        assert kinds == {QpKind.NOUN_HYPO2: 2, QpKind.NOUN_HYPO1: 2}
        assert len({cq.id for cq in cqs}) == 4


class TestAntonymy:
    def test_fetch_carry_away(self, fixture_cqs):
        cq = next(c for c in fixture_cqs if "Removing" in c.terms)
        assert cq.kind is QpKind.ANTONYM2
        # Equivalence-mapped side is the antecedent.
        assert cq.terms == ("Transfer", "Removing")
        assert cq.truth == Forall(
            ("X",),
            Implies(
                instance_atom("X", "Transfer"), Not(instance_atom("X", "Removing"))
            ),
        )

    def test_male_female_attribute_atoms(self, fixture_cqs):
        cq = next(c for c in fixture_cqs if "Female" in c.terms)
        assert cq.kind is QpKind.ANTONYM2
        assert cq.truth == Forall(
            ("X",),
            Implies(attribute_atom("X", "Female"), Not(attribute_atom("X", "Male"))),
        )

    def _antonym_fixture(self, annot_a, annot_b, kif):
        store = parse_wordnet_data(
            {
                "data.adj": (
                    "30000001 00 a 01 one 0 001 ! 30000002 a 0101 | a\n"
                    "30000002 00 a 01 two 0 001 ! 30000001 a 0101 | b\n"
                )
            }
        )
        entries, _ = parse_mapping_file(
            f"30000001 00 a 01 one 0 000 | a {annot_a}\n"
            f"30000002 00 a 01 two 0 000 | b {annot_b}\n",
            "a",
        )
        return store, entries, build_index(parse_kif(kif))

    def test_both_equivalence_gives_pattern_one(self):
        store, entries, index = self._antonym_fixture(
            "&%Female=", "&%Male=", "(contraryAttribute Female Male)"
        )
        cqs, _ = generate_antonymy_cqs(store, entries, index)
        assert [cq.kind for cq in cqs] == [QpKind.ANTONYM1]

    def test_no_equivalence_gives_pattern_three(self):
        store, entries, index = self._antonym_fixture(
            "&%Female+", "&%Male@", "(contraryAttribute Female Male)"
        )
        cqs, _ = generate_antonymy_cqs(store, entries, index)
        assert [cq.kind for cq in cqs] == [QpKind.ANTONYM3]
        # Neither side equivalence-mapped: id-order side comes first.
        assert cqs[0].synsets == ("30000001-a", "30000002-a")

    def test_same_term_pair_skipped(self):
        store, entries, index = self._antonym_fixture(
            "&%Female=", "&%Female+", "(contraryAttribute Female Male)"
        )
        cqs, _ = generate_antonymy_cqs(store, entries, index)
        assert cqs == []


class TestMorphosemantic:
    def test_machine_instrument_matches_schema(self, fixture_cqs):
        cq = next(c for c in fixture_cqs if c.kind is QpKind.MORPH_INSTRUMENT)
        assert cq.truth == EQ1_TRUTH
        assert cq.synsets == ("20000001-v", "10000009-n")

    def test_agent_role_swaps_predicate(self, store, mapping_entries, mini_index):
        from cqbench.wordnet import MorphLink

        links = [MorphLink("20000001-v", "10000009-n", "agent")]
        cqs, _ = generate_morphosemantic_cqs(links, mapping_entries, mini_index)
        assert [cq.kind for cq in cqs] == [QpKind.MORPH_AGENT]
        assert cqs[0].truth == Forall(
            ("Y",),
            Implies(
                instance_atom("Y", "Machine"),
                Exists(
                    ("X",),
                    And((instance_atom("X", "Making"), role_atom("agent", "X", "Y"))),
                ),
            ),
        )

    def test_missing_mapping_diagnostic(self, store, mini_index):
        from cqbench.wordnet import MorphLink

        links = [MorphLink("20000001-v", "10000009-n", "result")]
        cqs, diags = generate_morphosemantic_cqs(links, {}, mini_index)
        assert cqs == []
        assert len(diags) == 1


class TestMakeTestPair:
    def test_inclusion_complement(self):
        truth, falsity = make_test_pair(EQ4_TRUTH)
        assert truth == EQ4_TRUTH
        assert falsity == Forall(
            ("X",),
            Implies(
                instance_atom("X", "Smoking"), Not(instance_atom("X", "Breathing"))
            ),
        )

    def test_involution(self):
        _, falsity = make_test_pair(EQ4_TRUTH)
        assert make_test_pair(falsity)[1] == EQ4_TRUTH
        check_involution(cases=100)

    def test_morph_complement_negates_existential(self):
        _, falsity = make_test_pair(EQ1_TRUTH)
        assert isinstance(falsity.body.consequent, Not)
        assert isinstance(falsity.body.consequent.body, Exists)

    def test_strict_negation_mode(self):
        truth, falsity = make_test_pair(EQ4_TRUTH, mode="negation")
        assert falsity == Not(EQ4_TRUTH)

    def test_out_of_shape_is_error(self):
        with pytest.raises(FormulaShapeError):
            make_test_pair(instance_atom("X", "A"))

    def test_unknown_mode_is_error(self):
        with pytest.raises(ValueError):
            make_test_pair(EQ4_TRUTH, mode="sideways")


class TestCorpus:
    def test_fixture_counts_hand_checked(self, fixture_cqs):
        kinds = Counter(cq.kind for cq in fixture_cqs)
        assert kinds == {
            QpKind.NOUN_HYPO2: 3,
            QpKind.NOUN_HYPO1: 1,
            QpKind.ANTONYM2: 2,
            QpKind.MORPH_INSTRUMENT: 1,
        }
        assert len(fixture_cqs) == 7

    def test_generation_is_pure(self, store, mapping_entries, mini_index, morph_links):
        first, _ = generate_all(store, mapping_entries, mini_index, morph_links)
        second, _ = generate_all(store, mapping_entries, mini_index, morph_links)
        assert first == second

    def test_qp_filter(self, store, mapping_entries, mini_index, morph_links):
        only_morph, _ = generate_all(
            store,
            mapping_entries,
            mini_index,
            morph_links,
            enabled={QpKind.MORPH_INSTRUMENT},
        )
        assert [cq.kind for cq in only_morph] == [QpKind.MORPH_INSTRUMENT]
        nothing, _ = generate_all(
            store, mapping_entries, mini_index, morph_links, enabled=set()
        )
        assert nothing == []

    def test_all_conjectures_closed(self, fixture_cqs):
        for cq in fixture_cqs:
            assert free_variables(cq.truth) == set()
            assert free_variables(cq.falsity) == set()

    def test_symbol_inventory(self, fixture_cqs):
        allowed_preds = {"instance", "attribute", "agent", "instrument", "result", "="}
        for cq in fixture_cqs:
            doc = emit_tptp(cq, "")[0]
            parsed = parse_fof_document(doc)
            formula = parsed.conjecture().formula

            def constants(f):
                from cqbench.formulas import Atom, And, Not, Implies, Forall, Exists

                if isinstance(f, Atom):
                    assert f.pred in allowed_preds
                    return {t.name for t in f.args if not t.is_var}
                if isinstance(f, (Forall, Exists)):
                    return constants(f.body)
                if isinstance(f, Not):
                    return constants(f.body)
                if isinstance(f, Implies):
                    return constants(f.antecedent) | constants(f.consequent)
                return {n for p in f.parts for n in constants(p)}

            assert constants(formula) <= set(cq.terms)


class TestEmission:
    def test_documents_are_deterministic(self, fixture_cqs):
        cq = fixture_cqs[0]
        assert emit_tptp(cq, "ax.tptp") == emit_tptp(cq, "ax.tptp")

    def test_include_and_names(self, fixture_cqs):
        cq = fixture_cqs[0]
        truth_doc, falsity_doc = emit_tptp(cq, "fol_sumo.tptp")
        assert truth_doc.startswith("include('fol_sumo.tptp').\n")
        assert f"fof({cq.id}_truth, conjecture," in truth_doc
        assert f"fof({cq.id}_falsity, conjecture," in falsity_doc

    def test_emitted_documents_reparse(self, fixture_cqs):
        for cq in fixture_cqs:
            truth_doc, falsity_doc = emit_tptp(cq, "ax.tptp")
            assert parse_fof_document(truth_doc).conjecture().formula == cq.truth
            assert parse_fof_document(falsity_doc).conjecture().formula == cq.falsity

    def test_prefix_mode_reparses(self, fixture_cqs):
        for cq in fixture_cqs:
            truth_doc, _ = emit_tptp(cq, "ax.tptp", prefix="s__")
            parsed = parse_fof_document(truth_doc, prefix="s__")
            assert parsed.conjecture().formula == cq.truth

    def test_write_problems_and_manifest(self, fixture_cqs, tmp_path):
        rows = write_problems(fixture_cqs, tmp_path / "problems", "ax.tptp")
        assert len(rows) == len(fixture_cqs)
        for row in rows:
            assert (tmp_path / "problems" / row.truth_file).exists()
            assert (tmp_path / "problems" / row.falsity_file).exists()
        write_manifest(rows, tmp_path / "manifest.csv")
        assert read_manifest(tmp_path / "manifest.csv") == rows

    def test_duplicate_ids_rejected(self, fixture_cqs, tmp_path):
        with pytest.raises(ValueError, match="duplicate"):
            write_problems(
                [fixture_cqs[0], fixture_cqs[0]], tmp_path / "problems", "ax.tptp"
            )

    def test_rebuild_matches_generation(
        self, fixture_cqs, mini_index, tmp_path
    ):
        rows = write_problems(fixture_cqs, tmp_path / "problems", "ax.tptp")
        for row, cq in zip(rows, fixture_cqs):
            rebuilt = rebuild_cq(row, mini_index)
            assert rebuilt.truth == cq.truth
            assert rebuilt.falsity == cq.falsity
            assert rebuilt.kind is cq.kind
