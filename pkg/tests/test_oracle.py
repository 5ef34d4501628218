from __future__ import annotations

import pytest

from cqbench.formulas import (
    And,
    Exists,
    Forall,
    FormulaShapeError,
    Implies,
    Not,
    equal_atom,
    instance_atom,
    role_atom,
)
from cqbench.kif import build_index, parse_kif
from cqbench.oracle import (
    BridgeAxiom,
    Classification,
    FiniteModel,
    ModelEvaluationError,
    brute_force_check,
    classify_truth_formula,
    enumerate_models,
    load_bridge_axioms,
    oracle_classify,
)

from .conftest import FIXTURES
from .properties import check_oracle_soundness


def inclusion(a, b):
    return Forall(("X",), Implies(instance_atom("X", a), instance_atom("X", b)))


def exclusion(a, b):
    return Forall(("X",), Implies(instance_atom("X", a), Not(instance_atom("X", b))))


def morph(verb, noun, role):
    return Forall(
        ("Y",),
        Implies(
            instance_atom("Y", noun),
            Exists(("X",), And((instance_atom("X", verb), role_atom(role, "X", "Y")))),
        ),
    )


class TestClassify:
    def test_army_entailed(self, mini_index):
        assert (
            classify_truth_formula(inclusion("Army", "MilitaryService"), mini_index)
            is Classification.ENTAILED
        )

    def test_smoking_incompatible(self, mini_index):
        assert (
            classify_truth_formula(inclusion("Smoking", "Breathing"), mini_index)
            is Classification.INCOMPATIBLE
        )

    def test_fetch_exclusion_incompatible(self, mini_index):
        # Removing is below Transfer, so the falsity side succeeds.
        assert (
            classify_truth_formula(exclusion("Transfer", "Removing"), mini_index)
            is Classification.INCOMPATIBLE
        )

    def test_exclusion_entailed_on_disjoint(self, mini_index):
        assert (
            classify_truth_formula(exclusion("Smoking", "Breathing"), mini_index)
            is Classification.ENTAILED
        )

    def test_machine_unknown_without_bridges(self, mini_index):
        assert (
            classify_truth_formula(morph("Making", "Machine", "instrument"), mini_index)
            is Classification.UNKNOWN
        )

    def test_machine_entailed_with_bridge(self, mini_index):
        bridges = load_bridge_axioms(
            (FIXTURES / "bridges_machine.csv").read_text()
        )
        assert (
            classify_truth_formula(
                morph("Making", "Machine", "instrument"), mini_index, bridges
            )
            is Classification.ENTAILED
        )

    def test_bridge_generalizes_through_subsumption(self, mini_index):
        # Bridge over (Creation, instrument, Device) still covers the
        # Machine/Making conjecture: Machine <= Device, Creation <= ... no,
        # the process side must sit below the verb statement.
        bridges = [BridgeAxiom("Making", "instrument", "Device")]
        assert (
            classify_truth_formula(
                morph("Creation", "Machine", "instrument"), mini_index, bridges
            )
            is Classification.ENTAILED
        )

    def test_bridge_role_must_match(self, mini_index):
        bridges = [BridgeAxiom("Making", "agent", "Machine")]
        assert (
            classify_truth_formula(
                morph("Making", "Machine", "instrument"), mini_index, bridges
            )
            is Classification.UNKNOWN
        )

    def test_conflict_on_vacuous_antecedent(self):
        index = build_index(
            parse_kif("(disjoint B C)(subclass A B)(subclass A C)")
        )
        assert classify_truth_formula(inclusion("A", "B"), index) is (
            Classification.CONFLICT
        )

    def test_no_conflict_elsewhere_on_fixture(self, fixture_cqs, mini_index):
        for cq in fixture_cqs:
            assert oracle_classify(cq, mini_index) is not Classification.CONFLICT

    def test_equality_antecedent_uses_instance_assertions(self, mini_index):
        truth = Forall(
            ("X",), Implies(equal_atom("X", "Waist"), instance_atom("X", "BodyPart"))
        )
        assert classify_truth_formula(truth, mini_index) is Classification.ENTAILED
        disjoint = Forall(
            ("X",), Implies(equal_atom("X", "Waist"), instance_atom("X", "Smoking"))
        )
        assert classify_truth_formula(disjoint, mini_index) is (
            Classification.INCOMPATIBLE
        )

    def test_out_of_fragment_is_error_not_unknown(self, mini_index):
        with pytest.raises(FormulaShapeError):
            classify_truth_formula(instance_atom("X", "A"), mini_index)

    def test_fixture_classifications(self, fixture_cqs, mini_index):
        got = {cq.terms: oracle_classify(cq, mini_index) for cq in fixture_cqs}
        assert got[("Army", "MilitaryService")] is Classification.ENTAILED
        assert got[("Lightning", "Radiating")] is Classification.ENTAILED
        assert got[("Smoking", "Breathing")] is Classification.INCOMPATIBLE
        assert got[("Cloud", "NaturalProcess")] is Classification.INCOMPATIBLE
        assert got[("Transfer", "Removing")] is Classification.INCOMPATIBLE
        assert got[("Female", "Male")] is Classification.ENTAILED
        assert got[("Making", "Machine")] is Classification.UNKNOWN


class TestBruteForce:
    def test_subset_model_satisfies_inclusion(self):
        model = FiniteModel(
            (1, 2, 3),
            {"Smoking": frozenset({1}), "Breathing": frozenset({1, 2})},
            {},
        )
        assert brute_force_check(inclusion("Smoking", "Breathing"), model)

    def test_witness_outside_superset_falsifies(self):
        model = FiniteModel(
            (1, 2),
            {"Smoking": frozenset({1, 2}), "Breathing": frozenset({1})},
            {},
        )
        assert not brute_force_check(inclusion("Smoking", "Breathing"), model)

    def test_morph_formula_in_hand_built_model(self):
        formula = morph("Making", "Machine", "instrument")
        model = FiniteModel(
            (1, 2, 3),
            {"Machine": frozenset({3}), "Making": frozenset({1})},
            {"instrument": frozenset({(1, 3)})},
        )
        assert brute_force_check(formula, model)
        broken = FiniteModel(
            (1, 2, 3),
            {"Machine": frozenset({3}), "Making": frozenset({1})},
            {"instrument": frozenset({(3, 1)})},
        )
        assert not brute_force_check(formula, broken)

    def test_missing_extension_is_error(self):
        model = FiniteModel((1,), {}, {})
        with pytest.raises(ModelEvaluationError):
            brute_force_check(inclusion("A", "B"), model)

    def test_constant_equality_unsupported(self):
        model = FiniteModel((1,), {"A": frozenset({1})}, {})
        formula = Forall(
            ("X",), Implies(instance_atom("X", "A"), equal_atom("X", "Waist"))
        )
        with pytest.raises(ModelEvaluationError):
            brute_force_check(formula, model)


class TestEnumerateModels:
    def test_one_class_singleton_domain(self):
        index = build_index([])
        models = list(enumerate_models(index, ["A"], 1))
        assert len(models) == 2

    def test_two_unconstrained_classes(self):
        index = build_index([])
        assert len(list(enumerate_models(index, ["A", "B"], 1))) == 4

    def test_two_disjoint_classes(self):
        index = build_index(parse_kif("(disjoint A B)"))
        assert len(list(enumerate_models(index, ["A", "B"], 1))) == 3

    def test_subclass_constraint_respected(self):
        index = build_index(parse_kif("(subclass A B)"))
        for model in enumerate_models(index, ["A", "B"], 2):
            assert model.extensions["A"] <= model.extensions["B"]

    def test_vacuous_term_forced_empty(self):
        index = build_index(parse_kif("(disjoint B C)(subclass A B)(subclass A C)"))
        for model in enumerate_models(index, ["A", "B", "C"], 2):
            assert model.extensions["A"] == frozenset()

    def test_role_extension_space(self):
        index = build_index([])
        models = list(enumerate_models(index, ["A"], 1, roles=("agent",)))
        # 2 class extensions x 2 role extensions over a 1-element domain.
        assert len(models) == 4

    def test_limits_enforced(self):
        index = build_index([])
        with pytest.raises(ValueError):
            list(enumerate_models(index, ["A"] * 6, 2))
        with pytest.raises(ValueError):
            list(enumerate_models(index, ["A"], 5))
        with pytest.raises(ValueError):
            list(enumerate_models(index, ["A"], 2, roles=("agent", "result")))


def test_oracle_soundness_sampled():
    tally = check_oracle_soundness(cases=150, seed=7)
    # The random mix must actually exercise the committed classifications.
    assert tally.get("entailed", 0) > 0
    assert tally.get("incompatible", 0) > 0
