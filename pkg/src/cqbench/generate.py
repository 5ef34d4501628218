"""Question-pattern instantiation and problem emission.

Ten question patterns turn WordNet relation pairs plus mapping
statements into competency questions: four hyponymy patterns (two per
noun/verb, split on the hyponym's mapping relation), three antonymy
patterns (split on how many sides are equivalence-mapped) and three
morphosemantic patterns (agent, instrument, result). Every question
carries a dual conjecture pair: the truth conjecture and its
complementary falsity conjecture. Problems are emitted as TPTP FOF
documents, two per question, plus a CSV manifest.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .formulas import (
    And,
    Atom,
    Exists,
    Forall,
    Formula,
    FormulaShapeError,
    Implies,
    Not,
    attribute_atom,
    equal_atom,
    instance_atom,
    qp_shape,
    role_atom,
    to_fof,
)
from .kif import OntologyIndex
from .mapping import (
    EQUIVALENCE,
    MappingEntry,
    MappingStatement,
    StatementShape,
    UntranslatableEntryError,
    translate_entry,
)
from .wordnet import MorphLink, SynsetStore, antonym_pairs, hyponym_pairs

COMPLEMENT = "complement"
NEGATION = "negation"
FALSITY_MODES = (COMPLEMENT, NEGATION)


class QpKind(Enum):
    NOUN_HYPO1 = "noun_hypo1"
    NOUN_HYPO2 = "noun_hypo2"
    VERB_HYPO1 = "verb_hypo1"
    VERB_HYPO2 = "verb_hypo2"
    ANTONYM1 = "antonym1"
    ANTONYM2 = "antonym2"
    ANTONYM3 = "antonym3"
    MORPH_AGENT = "morph_agent"
    MORPH_INSTRUMENT = "morph_instrument"
    MORPH_RESULT = "morph_result"


QP_LABELS = {
    QpKind.NOUN_HYPO1: ("Hyponymy", "Noun #1"),
    QpKind.NOUN_HYPO2: ("Hyponymy", "Noun #2"),
    QpKind.VERB_HYPO1: ("Hyponymy", "Verb #1"),
    QpKind.VERB_HYPO2: ("Hyponymy", "Verb #2"),
    QpKind.ANTONYM1: ("Antonymy", "#1"),
    QpKind.ANTONYM2: ("Antonymy", "#2"),
    QpKind.ANTONYM3: ("Antonymy", "#3"),
    QpKind.MORPH_AGENT: ("Morphosemantic Links", "Agent"),
    QpKind.MORPH_INSTRUMENT: ("Morphosemantic Links", "Instrument"),
    QpKind.MORPH_RESULT: ("Morphosemantic Links", "Result"),
}

_MORPH_KINDS = {
    "agent": QpKind.MORPH_AGENT,
    "instrument": QpKind.MORPH_INSTRUMENT,
    "result": QpKind.MORPH_RESULT,
}

_REL_TAGS = {"=": "eq", "+": "sub", "@": "inst"}


@dataclass(frozen=True)
class CompetencyQuestion:
    """One QP instantiation with its dual conjecture pair.

    ``synsets``, ``terms`` and ``relations`` are ordered the way the
    truth conjecture uses them: (antecedent side, consequent side) for
    hyponymy and antonymy, (verb, noun) for morphosemantic questions.
    """

    id: str
    kind: QpKind
    synsets: tuple[str, str]
    terms: tuple[str, str]
    relations: tuple[str, str]
    truth: Formula
    falsity: Formula


def statement_atom(statement: MappingStatement, v: str) -> Atom:
    if statement.shape is StatementShape.INSTANCE_OF:
        return instance_atom(v, statement.term)
    if statement.shape is StatementShape.HAS_ATTRIBUTE:
        return attribute_atom(v, statement.term)
    return equal_atom(v, statement.term)


def make_test_pair(truth: Formula, mode: str = COMPLEMENT) -> tuple[Formula, Formula]:
    """Dual test pair for a truth conjecture.

    In complement mode the consequent is flipped: inclusion becomes
    exclusion and vice versa, and the morphosemantic existential is
    negated. Applying the rule twice returns the original formula. In
    negation mode the falsity conjecture is the literal negation, which
    is only provable when the ontology carries existence axioms.
    """
    if mode == NEGATION:
        qp_shape(truth)
        return truth, Not(truth)
    if mode != COMPLEMENT:
        raise ValueError(f"unknown falsity mode {mode!r}")
    if not (isinstance(truth, Forall) and isinstance(truth.body, Implies)):
        raise FormulaShapeError("expected a universal implication")
    cons = truth.body.consequent
    if isinstance(cons, Not):
        # Exclusion, or the complement of a morphosemantic conjecture:
        # dropping the negation must land back in a positive QP shape.
        flipped: Formula = Forall(
            truth.variables, Implies(truth.body.antecedent, cons.body)
        )
        if qp_shape(flipped).kind not in ("inclusion", "morph"):
            raise FormulaShapeError("negated consequent fits no QP shape")
        return truth, flipped
    qp_shape(truth)
    flipped = Forall(truth.variables, Implies(truth.body.antecedent, Not(cons)))
    return truth, flipped


def _sanitize(part: str) -> str:
    return re.sub(r"[^A-Za-z0-9]", "_", part)


def _cq_id(
    kind: QpKind,
    synsets: tuple[str, str],
    statements: tuple[MappingStatement, MappingStatement],
) -> str:
    bits = [kind.value]
    bits.extend(_sanitize(s) for s in synsets)
    for st in statements:
        bits.append(f"{_sanitize(st.term)}_{_REL_TAGS[st.entry.relation]}")
    return "__".join(bits)


def _build_cq(
    kind: QpKind,
    synsets: tuple[str, str],
    statements: tuple[MappingStatement, MappingStatement],
    truth: Formula,
    falsity_mode: str,
) -> CompetencyQuestion:
    truth, falsity = make_test_pair(truth, falsity_mode)
    return CompetencyQuestion(
        id=_cq_id(kind, synsets, statements),
        kind=kind,
        synsets=synsets,
        terms=(statements[0].term, statements[1].term),
        relations=(statements[0].entry.relation, statements[1].entry.relation),
        truth=truth,
        falsity=falsity,
    )


class _StatementCache:
    """Translates mapping entries once per synset, recording failures."""

    def __init__(
        self,
        mapping: Mapping[str, list[MappingEntry]],
        index: OntologyIndex,
        diagnostics: list[str],
    ):
        self.mapping = mapping
        self.index = index
        self.diagnostics = diagnostics
        self._cache: dict[str, list[MappingStatement]] = {}
        self._reported: set[str] = set()

    def statements(self, sid: str) -> list[MappingStatement]:
        if sid in self._cache:
            return self._cache[sid]
        out: list[MappingStatement] = []
        for entry in self.mapping.get(sid, []):
            try:
                out.append(translate_entry(entry, self.index))
            except UntranslatableEntryError as exc:
                key = f"{sid}:{entry.suffix()}"
                if key not in self._reported:
                    self._reported.add(key)
                    self.diagnostics.append(f"untranslatable mapping entry: {exc}")
        self._cache[sid] = out
        return out


def generate_hyponymy_cqs(
    store: SynsetStore,
    mapping: Mapping[str, list[MappingEntry]],
    index: OntologyIndex,
    pos: str,
    falsity_mode: str = COMPLEMENT,
    transitive: bool = False,
) -> tuple[list[CompetencyQuestion], list[str]]:
    """Hyponymy questions: forall X (hypo-statement -> hyper-statement).

    The hyponym's mapping relation selects the pattern: equivalence
    gives pattern #2, subsumption and instantiation give pattern #1.
    Pairs whose two statements share one SUMO term are skipped as
    trivial; pairs missing a translatable side are skipped with a
    diagnostic.
    """
    diagnostics: list[str] = []
    cache = _StatementCache(mapping, index, diagnostics)
    kind2 = QpKind.NOUN_HYPO2 if pos == "n" else QpKind.VERB_HYPO2
    kind1 = QpKind.NOUN_HYPO1 if pos == "n" else QpKind.VERB_HYPO1
    cqs: list[CompetencyQuestion] = []
    for edge in hyponym_pairs(store, pos, transitive=transitive):
        lo = cache.statements(edge.hypo)
        hi = cache.statements(edge.hyper)
        if not lo or not hi:
            missing = edge.hypo if not lo else edge.hyper
            diagnostics.append(
                f"hyponym pair ({edge.hypo}, {edge.hyper}) skipped:"
                f" no translatable mapping for {missing}"
            )
            continue
        for st_lo in lo:
            for st_hi in hi:
                if st_lo.term == st_hi.term:
                    continue
                kind = kind2 if st_lo.entry.relation == EQUIVALENCE else kind1
                truth = Forall(
                    ("X",),
                    Implies(statement_atom(st_lo, "X"), statement_atom(st_hi, "X")),
                )
                cqs.append(
                    _build_cq(
                        kind,
                        (edge.hypo, edge.hyper),
                        (st_lo, st_hi),
                        truth,
                        falsity_mode,
                    )
                )
    return cqs, diagnostics


def generate_antonymy_cqs(
    store: SynsetStore,
    mapping: Mapping[str, list[MappingEntry]],
    index: OntologyIndex,
    falsity_mode: str = COMPLEMENT,
) -> tuple[list[CompetencyQuestion], list[str]]:
    """Antonymy questions: forall X (one statement -> not the other).

    The antecedent is the equivalence-mapped side when exactly one side
    is equivalence-mapped, otherwise the id-order first side. The
    pattern number counts equivalence-mapped sides: two -> #1,
    one -> #2, none -> #3.
    """
    diagnostics: list[str] = []
    cache = _StatementCache(mapping, index, diagnostics)
    cqs: list[CompetencyQuestion] = []
    for pair in antonym_pairs(store):
        sa = cache.statements(pair.a)
        sb = cache.statements(pair.b)
        if not sa or not sb:
            missing = pair.a if not sa else pair.b
            diagnostics.append(
                f"antonym pair ({pair.a}, {pair.b}) skipped:"
                f" no translatable mapping for {missing}"
            )
            continue
        for st_a in sa:
            for st_b in sb:
                if st_a.term == st_b.term:
                    continue
                eq_count = sum(
                    1
                    for st in (st_a, st_b)
                    if st.entry.relation == EQUIVALENCE
                )
                kind = (QpKind.ANTONYM3, QpKind.ANTONYM2, QpKind.ANTONYM1)[eq_count]
                first, second = st_a, st_b
                synsets = (pair.a, pair.b)
                if eq_count == 1 and st_b.entry.relation == EQUIVALENCE:
                    first, second = st_b, st_a
                    synsets = (pair.b, pair.a)
                truth = Forall(
                    ("X",),
                    Implies(
                        statement_atom(first, "X"),
                        Not(statement_atom(second, "X")),
                    ),
                )
                cqs.append(
                    _build_cq(kind, synsets, (first, second), truth, falsity_mode)
                )
    return cqs, diagnostics


def generate_morphosemantic_cqs(
    links: Sequence[MorphLink],
    mapping: Mapping[str, list[MappingEntry]],
    index: OntologyIndex,
    falsity_mode: str = COMPLEMENT,
) -> tuple[list[CompetencyQuestion], list[str]]:
    """Morphosemantic questions: every noun member participates, via the
    link's role, in some event covered by the verb statement."""
    diagnostics: list[str] = []
    cache = _StatementCache(mapping, index, diagnostics)
    cqs: list[CompetencyQuestion] = []
    for link in links:
        sv = cache.statements(link.verb)
        sn = cache.statements(link.noun)
        if not sv or not sn:
            missing = link.verb if not sv else link.noun
            diagnostics.append(
                f"morphosemantic link ({link.verb}, {link.noun}, {link.role})"
                f" skipped: no translatable mapping for {missing}"
            )
            continue
        for st_v in sv:
            for st_n in sn:
                truth = Forall(
                    ("Y",),
                    Implies(
                        statement_atom(st_n, "Y"),
                        Exists(
                            ("X",),
                            And(
                                (
                                    statement_atom(st_v, "X"),
                                    role_atom(link.role, "X", "Y"),
                                )
                            ),
                        ),
                    ),
                )
                cqs.append(
                    _build_cq(
                        _MORPH_KINDS[link.role],
                        (link.verb, link.noun),
                        (st_v, st_n),
                        truth,
                        falsity_mode,
                    )
                )
    return cqs, diagnostics


def generate_all(
    store: SynsetStore,
    mapping: Mapping[str, list[MappingEntry]],
    index: OntologyIndex,
    links: Sequence[MorphLink],
    enabled: Optional[Iterable[QpKind]] = None,
    falsity_mode: str = COMPLEMENT,
    transitive: bool = False,
) -> tuple[list[CompetencyQuestion], list[str]]:
    """Full corpus over all enabled question patterns, deterministic order."""
    enabled_set = set(QpKind) if enabled is None else set(enabled)
    cqs: list[CompetencyQuestion] = []
    diagnostics: list[str] = []
    for pos in ("n", "v"):
        got, diags = generate_hyponymy_cqs(
            store, mapping, index, pos, falsity_mode, transitive
        )
        cqs.extend(got)
        diagnostics.extend(diags)
    got, diags = generate_antonymy_cqs(store, mapping, index, falsity_mode)
    cqs.extend(got)
    diagnostics.extend(diags)
    got, diags = generate_morphosemantic_cqs(links, mapping, index, falsity_mode)
    cqs.extend(got)
    diagnostics.extend(diags)
    return [cq for cq in cqs if cq.kind in enabled_set], diagnostics


def emit_tptp(
    cq: CompetencyQuestion, axiom_file_name: str, prefix: str = ""
) -> tuple[str, str]:
    """The two problem documents for a question, byte-deterministic.

    Each document is one include of the first-order axiom bundle plus one
    FOF conjecture. ``prefix`` is prepended to every predicate and
    constant symbol so the conjectures use the bundle's naming scheme;
    symbols that are not plain lower words are single-quoted.
    """
    docs = []
    for suffix, formula in (("truth", cq.truth), ("falsity", cq.falsity)):
        lines = []
        if axiom_file_name:
            lines.append(f"include('{axiom_file_name}').")
        name = f"{cq.id}_{suffix}"
        lines.append(f"fof({name}, conjecture, {to_fof(formula, prefix)}).")
        docs.append("\n".join(lines) + "\n")
    return docs[0], docs[1]


MANIFEST_FIELDS = (
    "cq_id",
    "qp",
    "synset_a",
    "synset_b",
    "term_a",
    "term_b",
    "relation_a",
    "relation_b",
    "truth_file",
    "falsity_file",
)


@dataclass(frozen=True)
class ManifestRow:
    cq_id: str
    qp: QpKind
    synset_a: str
    synset_b: str
    term_a: str
    term_b: str
    relation_a: str
    relation_b: str
    truth_file: str
    falsity_file: str


def write_problems(
    cqs: Sequence[CompetencyQuestion],
    out_dir: Path,
    axiom_file_name: str,
    prefix: str = "",
) -> list[ManifestRow]:
    """Emit every problem pair under ``out_dir`` and return manifest rows."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    seen: set[str] = set()
    rows: list[ManifestRow] = []
    for cq in cqs:
        if cq.id in seen:
            raise ValueError(f"duplicate competency question id: {cq.id}")
        seen.add(cq.id)
        truth_doc, falsity_doc = emit_tptp(cq, axiom_file_name, prefix)
        truth_file = f"{cq.id}_truth.p"
        falsity_file = f"{cq.id}_falsity.p"
        (out_dir / truth_file).write_text(truth_doc, encoding="utf-8")
        (out_dir / falsity_file).write_text(falsity_doc, encoding="utf-8")
        rows.append(
            ManifestRow(
                cq_id=cq.id,
                qp=cq.kind,
                synset_a=cq.synsets[0],
                synset_b=cq.synsets[1],
                term_a=cq.terms[0],
                term_b=cq.terms[1],
                relation_a=cq.relations[0],
                relation_b=cq.relations[1],
                truth_file=truth_file,
                falsity_file=falsity_file,
            )
        )
    return rows


def write_manifest(rows: Sequence[ManifestRow], path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_FIELDS)
        for r in rows:
            writer.writerow(
                (
                    r.cq_id,
                    r.qp.value,
                    r.synset_a,
                    r.synset_b,
                    r.term_a,
                    r.term_b,
                    r.relation_a,
                    r.relation_b,
                    r.truth_file,
                    r.falsity_file,
                )
            )


def rebuild_cq(
    row: ManifestRow, index: OntologyIndex, falsity_mode: str = COMPLEMENT
) -> CompetencyQuestion:
    """Reconstruct a question's conjectures from its manifest row.

    The manifest carries synsets, terms and mapping relations; statement
    shapes come from term kinds exactly as during generation, so the
    rebuilt formulas are identical to the originally emitted ones.
    """
    statements = []
    for term, relation in ((row.term_a, row.relation_a), (row.term_b, row.relation_b)):
        entry = MappingEntry(synset="", sumo_term=term, relation=relation)
        statements.append(translate_entry(entry, index))
    atom_a = statement_atom(statements[0], "X")
    atom_b = statement_atom(statements[1], "X")
    if row.qp in (QpKind.ANTONYM1, QpKind.ANTONYM2, QpKind.ANTONYM3):
        truth: Formula = Forall(("X",), Implies(atom_a, Not(atom_b)))
    elif row.qp in _MORPH_KINDS.values():
        role = row.qp.value.removeprefix("morph_")
        truth = Forall(
            ("Y",),
            Implies(
                statement_atom(statements[1], "Y"),
                Exists(
                    ("X",),
                    And((statement_atom(statements[0], "X"), role_atom(role, "X", "Y"))),
                ),
            ),
        )
    else:
        truth = Forall(("X",), Implies(atom_a, atom_b))
    truth, falsity = make_test_pair(truth, falsity_mode)
    return CompetencyQuestion(
        id=row.cq_id,
        kind=row.qp,
        synsets=(row.synset_a, row.synset_b),
        terms=(row.term_a, row.term_b),
        relations=(row.relation_a, row.relation_b),
        truth=truth,
        falsity=falsity,
    )


def read_manifest(path: Path) -> list[ManifestRow]:
    rows: list[ManifestRow] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != MANIFEST_FIELDS:
            raise ValueError(f"{path}: unexpected manifest header {reader.fieldnames}")
        for rec in reader:
            rows.append(
                ManifestRow(
                    cq_id=rec["cq_id"],
                    qp=QpKind(rec["qp"]),
                    synset_a=rec["synset_a"],
                    synset_b=rec["synset_b"],
                    term_a=rec["term_a"],
                    term_b=rec["term_b"],
                    relation_a=rec["relation_a"],
                    relation_b=rec["relation_b"],
                    truth_file=rec["truth_file"],
                    falsity_file=rec["falsity_file"],
                )
            )
    return rows
