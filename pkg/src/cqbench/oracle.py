"""Internal decision procedure for the question-pattern fragment.

``classify_truth_formula`` decides a conjecture pair over the taxonomy
index alone: subsumption answers inclusion questions, propagated
disjointness answers exclusion questions, and explicitly supplied
bridge axioms answer morphosemantic ones. The oracle is deliberately
incomplete: Unknown means "no taxonomic proof", which mirrors how most
unsolved benchmark problems trace to missing ontology knowledge.

The module also carries a brute-force finite-model evaluator and a
constrained model enumerator. They exist to test the oracle: whenever
the oracle commits to Entailed or Incompatible, the corresponding
conjecture must hold in every small model that satisfies the index
constraints.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from itertools import product
from typing import Iterator, Mapping, Optional, Sequence

from .formulas import (
    And,
    Atom,
    Exists,
    Forall,
    Formula,
    Implies,
    Not,
    QpShape,
    const,
    qp_shape,
    var,
)
from .kif import (
    OntologyIndex,
    are_disjoint,
    instance_classes,
    is_instance_of,
    is_subclass_of,
)


class Classification(Enum):
    ENTAILED = "entailed"
    INCOMPATIBLE = "incompatible"
    UNKNOWN = "unknown"
    CONFLICT = "conflict"


SOLVED = (Classification.ENTAILED, Classification.INCOMPATIBLE)


@dataclass(frozen=True)
class BridgeAxiom:
    """Every member of ``participant`` takes part, via ``role``, in some
    instance of ``process``."""

    process: str
    role: str
    participant: str

    def as_formula(self) -> Formula:
        return Forall(
            ("Y",),
            Implies(
                Atom("instance", (var("Y"), const(self.participant))),
                Exists(
                    ("X",),
                    And(
                        (
                            Atom("instance", (var("X"), const(self.process))),
                            Atom(self.role, (var("X"), var("Y"))),
                        )
                    ),
                ),
            ),
        )


def load_bridge_axioms(text: str) -> list[BridgeAxiom]:
    """Bridge axioms from CSV rows (process_class, role, participant_class)."""
    out: list[BridgeAxiom] = []
    for row_no, row in enumerate(csv.reader(text.splitlines()), start=1):
        if not row or not "".join(row).strip():
            continue
        if row[0].strip() == "process_class":
            continue
        if len(row) != 3:
            raise ValueError(f"bridge axiom row {row_no}: expected 3 columns")
        process, role, participant = (c.strip() for c in row)
        if role not in ("agent", "instrument", "result"):
            raise ValueError(f"bridge axiom row {row_no}: unknown role {role!r}")
        out.append(BridgeAxiom(process, role, participant))
    return out


def _atom_entails(index: OntologyIndex, a: Atom, b: Atom) -> bool:
    """Does the index prove ext(a) is a subset of ext(b)?"""
    ta, tb = a.args[1].name, b.args[1].name
    if a.pred == b.pred and a.pred in ("instance", "attribute"):
        return is_subclass_of(index, ta, tb)
    if a.pred == "=" and b.pred == "instance":
        return is_instance_of(index, ta, tb)
    if a.pred == "=" and b.pred == "=":
        return ta == tb
    return False


def _atom_excludes(index: OntologyIndex, a: Atom, b: Atom) -> bool:
    """Does the index prove ext(a) and ext(b) cannot intersect?"""
    ta, tb = a.args[1].name, b.args[1].name
    if a.pred == b.pred and a.pred in ("instance", "attribute"):
        return are_disjoint(index, ta, tb)
    if a.pred == "=" and b.pred == "instance":
        return any(are_disjoint(index, d, tb) for d in sorted(instance_classes(index, ta)))
    if a.pred == "instance" and b.pred == "=":
        return any(are_disjoint(index, d, ta) for d in sorted(instance_classes(index, tb)))
    return False


def classify_truth_formula(
    truth: Formula,
    index: OntologyIndex,
    bridges: Sequence[BridgeAxiom] = (),
) -> Classification:
    """Classification of a conjecture pair given by its truth formula.

    Inclusion: entailed iff the antecedent statement is subsumed by the
    consequent one, incompatible iff the two are disjoint. Exclusion:
    entailed iff disjoint; incompatible iff the two statements are in a
    subsumption relation in either direction (the exclusion conjecture
    is symmetric under contraposition, so the falsity test succeeds from
    whichever inclusion holds). Morphosemantic: entailed iff some bridge
    axiom covers it. Both conditions at once means the antecedent is
    vacuous and the pair is reported as Conflict.

    Formulas outside the three shapes raise FormulaShapeError; the
    oracle never converts a shape error into a silent Unknown.
    """
    shape = qp_shape(truth)
    if shape.kind == "inclusion":
        entailed = _atom_entails(index, shape.antecedent, shape.consequent)
        incompatible = _atom_excludes(index, shape.antecedent, shape.consequent)
    elif shape.kind == "exclusion":
        entailed = _atom_excludes(index, shape.antecedent, shape.consequent)
        incompatible = _atom_entails(
            index, shape.antecedent, shape.consequent
        ) or _atom_entails(index, shape.consequent, shape.antecedent)
    else:
        entailed = _bridge_entails(index, shape, bridges)
        incompatible = False
    if entailed and incompatible:
        return Classification.CONFLICT
    if entailed:
        return Classification.ENTAILED
    if incompatible:
        return Classification.INCOMPATIBLE
    return Classification.UNKNOWN


def _bridge_entails(
    index: OntologyIndex, shape: QpShape, bridges: Sequence[BridgeAxiom]
) -> bool:
    if shape.antecedent.pred != "instance" or shape.consequent.pred != "instance":
        return False
    noun_term = shape.antecedent.args[1].name
    verb_term = shape.consequent.args[1].name
    return any(
        b.role == shape.role
        and is_subclass_of(index, noun_term, b.participant)
        and is_subclass_of(index, b.process, verb_term)
        for b in bridges
    )


def oracle_classify(cq, index: OntologyIndex, bridges: Sequence[BridgeAxiom] = ()):
    """Classify a CompetencyQuestion via its truth conjecture."""
    return classify_truth_formula(cq.truth, index, bridges)


@dataclass(frozen=True)
class FiniteModel:
    """A small interpretation: per-term extensions over an integer domain.

    Equality is identity on domain elements; role predicates get pair
    extensions. Constant symbols have no denotation here, so formulas
    with equality atoms over constants cannot be evaluated.
    """

    domain: tuple[int, ...]
    extensions: Mapping[str, frozenset[int]]
    roles: Mapping[str, frozenset[tuple[int, int]]]


class ModelEvaluationError(Exception):
    pass


def brute_force_check(
    formula: Formula, model: FiniteModel, env: Optional[dict[str, int]] = None
) -> bool:
    """Standard satisfaction by exhaustive quantifier enumeration."""
    env = env or {}
    if isinstance(formula, Forall):
        return all(
            brute_force_check(formula.body, model, {**env, **dict(zip(formula.variables, vs))})
            for vs in product(model.domain, repeat=len(formula.variables))
        )
    if isinstance(formula, Exists):
        return any(
            brute_force_check(formula.body, model, {**env, **dict(zip(formula.variables, vs))})
            for vs in product(model.domain, repeat=len(formula.variables))
        )
    if isinstance(formula, Not):
        return not brute_force_check(formula.body, model, env)
    if isinstance(formula, And):
        return all(brute_force_check(p, model, env) for p in formula.parts)
    if isinstance(formula, Implies):
        return not brute_force_check(
            formula.antecedent, model, env
        ) or brute_force_check(formula.consequent, model, env)
    if isinstance(formula, Atom):
        return _eval_atom(formula, model, env)
    raise TypeError(f"not a formula: {formula!r}")


def _element(term, model: FiniteModel, env: dict[str, int]) -> int:
    if term.is_var:
        if term.name not in env:
            raise ModelEvaluationError(f"unbound variable {term.name}")
        return env[term.name]
    raise ModelEvaluationError(
        f"constant {term.name!r} has no extension in a finite model"
    )


def _eval_atom(atom: Atom, model: FiniteModel, env: dict[str, int]) -> bool:
    if atom.pred in ("instance", "attribute"):
        subject, cls = atom.args
        if cls.name not in model.extensions:
            raise ModelEvaluationError(f"term {cls.name!r} has no extension")
        return _element(subject, model, env) in model.extensions[cls.name]
    if atom.pred == "=":
        lhs, rhs = atom.args
        return _element(lhs, model, env) == _element(rhs, model, env)
    if atom.pred not in model.roles:
        raise ModelEvaluationError(f"role {atom.pred!r} has no extension")
    x, y = atom.args
    return (
        _element(x, model, env),
        _element(y, model, env),
    ) in model.roles[atom.pred]


MAX_MODEL_TERMS = 5
MAX_MODEL_ROLES = 1
MAX_MODEL_DOMAIN = 4


def enumerate_models(
    index: OntologyIndex,
    terms: Sequence[str],
    domain_size: int,
    roles: Sequence[str] = (),
) -> Iterator[FiniteModel]:
    """All models over 1..domain_size satisfying the index constraints.

    Constraints among the given terms: subclass (or subAttribute)
    reachability forces extension inclusion; propagated disjointness
    forces empty intersection; a term disjoint from itself is vacuous
    and forced empty. Enumeration is exponential by design and capped
    at test scale.
    """
    if len(terms) > MAX_MODEL_TERMS:
        raise ValueError(f"at most {MAX_MODEL_TERMS} terms, got {len(terms)}")
    if len(roles) > MAX_MODEL_ROLES:
        raise ValueError(f"at most {MAX_MODEL_ROLES} role predicate")
    if not 1 <= domain_size <= MAX_MODEL_DOMAIN:
        raise ValueError(f"domain size must be in 1..{MAX_MODEL_DOMAIN}")
    terms = list(terms)
    domain = tuple(range(1, domain_size + 1))
    subsets = [frozenset(s) for s in _powerset(domain)]
    pair_subset = [
        (i, j)
        for i in range(len(terms))
        for j in range(len(terms))
        if i != j and is_subclass_of(index, terms[i], terms[j])
    ]
    pair_disjoint = [
        (i, j)
        for i in range(len(terms))
        for j in range(i + 1, len(terms))
        if are_disjoint(index, terms[i], terms[j])
    ]
    vacuous = [i for i in range(len(terms)) if are_disjoint(index, terms[i], terms[i])]

    def assignments(i: int, chosen: list[frozenset[int]]) -> Iterator[list[frozenset[int]]]:
        if i == len(terms):
            yield list(chosen)
            return
        for ext in subsets:
            if i in vacuous and ext:
                continue
            ok = True
            for a, b in pair_subset:
                if a == i and b < i and not ext <= chosen[b]:
                    ok = False
                    break
                if b == i and a < i and not chosen[a] <= ext:
                    ok = False
                    break
            if ok:
                for a, b in pair_disjoint:
                    if b == i and a < i and chosen[a] & ext:
                        ok = False
                        break
                    if a == i and b < i and chosen[b] & ext:
                        ok = False
                        break
            if ok:
                chosen.append(ext)
                yield from assignments(i + 1, chosen)
                chosen.pop()

    role_space = [frozenset(s) for s in _powerset(tuple(product(domain, domain)))]
    for exts in assignments(0, []):
        extensions = dict(zip(terms, exts))
        if not roles:
            yield FiniteModel(domain, extensions, {})
            continue
        for pairs in role_space:
            yield FiniteModel(domain, extensions, {roles[0]: pairs})


def _powerset(items: tuple) -> Iterator[tuple]:
    n = len(items)
    for mask in range(1 << n):
        yield tuple(items[i] for i in range(n) if mask >> i & 1)
