"""Sampling, annotation merging, report tables, misalignment findings.

The analysis table mirrors the benchmark's detailed-analysis layout:
per question pattern, the sampled count, the entailed and incompatible
blocks (solved count, correct/incorrect mapping with the precise subset
in brackets, correct/incorrect proof knowledge), the unsolved block and
the totals. Records without an annotation land in an explicit
unannotated bucket rather than being guessed, and every arithmetic
identity between the buckets is enforced.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Optional, Sequence, TypeVar

from .formulas import qp_shape
from .generate import QP_LABELS, CompetencyQuestion, QpKind
from .kif import OntologyIndex, disjointness_witness, is_subclass_of
from .oracle import Classification

T = TypeVar("T")


class MappingQuality(Enum):
    CORRECT_PRECISE = "CorrectPrecise"
    ONLY_CORRECT = "OnlyCorrect"
    INCORRECT = "Incorrect"


class KnowledgeQuality(Enum):
    CORRECT = "Correct"
    INCORRECT = "Incorrect"
    NOT_APPLICABLE = "NotApplicable"


class Entailable(Enum):
    YES = "Yes"
    NO = "No"
    UNCHECKED = "Unchecked"


@dataclass(frozen=True)
class AnnotationRecord:
    cq_id: str
    mapping_quality: MappingQuality
    knowledge_quality: KnowledgeQuality = KnowledgeQuality.NOT_APPLICABLE
    entailable: Entailable = Entailable.UNCHECKED
    note: str = ""


@dataclass(frozen=True)
class EvaluationRecord:
    cq_id: str
    kind: QpKind
    classification: Classification
    annotation: Optional[AnnotationRecord] = None


def sample_uniform(records: Sequence[T], fraction: float, seed: int) -> list[T]:
    """floor(fraction * N) records chosen by a seeded shuffle.

    Deterministic per (records, seed); every record equally likely
    across seeds. fraction 1 returns the whole set in shuffled order.
    """
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    out = list(records)
    random.Random(seed).shuffle(out)
    size = int(fraction * len(out))
    return out[:size]


def parse_annotations_csv(text: str) -> list[AnnotationRecord]:
    """Annotation rows: cq_id, mapping_quality, knowledge_quality, entailable, note."""
    rows: list[AnnotationRecord] = []
    for row_no, row in enumerate(csv.reader(text.splitlines()), start=1):
        if not row or not "".join(row).strip():
            continue
        if row[0].strip() == "cq_id":
            continue
        if len(row) < 2:
            raise ValueError(f"annotation row {row_no}: expected at least 2 columns")
        padded = [c.strip() for c in row] + [""] * (5 - len(row))
        cq_id, mq, kq, ent, note = padded[:5]
        try:
            rows.append(
                AnnotationRecord(
                    cq_id=cq_id,
                    mapping_quality=MappingQuality(mq),
                    knowledge_quality=KnowledgeQuality(kq or "NotApplicable"),
                    entailable=Entailable(ent or "Unchecked"),
                    note=note,
                )
            )
        except ValueError as exc:
            raise ValueError(f"annotation row {row_no}: {exc}") from exc
    return rows


def merge_annotations(
    records: Sequence[EvaluationRecord], annotations: Sequence[AnnotationRecord]
) -> list[EvaluationRecord]:
    """Attach annotations to records by cq id.

    Unknown ids and duplicate annotations are errors; a knowledge label
    other than NotApplicable on an unsolved record is rejected too.
    """
    by_id = {r.cq_id: r for r in records}
    seen: set[str] = set()
    unknown = [a.cq_id for a in annotations if a.cq_id not in by_id]
    if unknown:
        raise ValueError(f"annotations reference unknown cq ids: {sorted(set(unknown))}")
    merged = dict(by_id)
    for ann in annotations:
        if ann.cq_id in seen:
            raise ValueError(f"duplicate annotation for cq id {ann.cq_id}")
        seen.add(ann.cq_id)
        record = by_id[ann.cq_id]
        solved = record.classification in (
            Classification.ENTAILED,
            Classification.INCOMPATIBLE,
        )
        if not solved and ann.knowledge_quality is not KnowledgeQuality.NOT_APPLICABLE:
            raise ValueError(
                f"annotation for {ann.cq_id}: knowledge quality applies only"
                f" to solved problems"
            )
        merged[ann.cq_id] = replace(record, annotation=ann)
    return [merged[r.cq_id] for r in records]


QP_TABLE_ORDER = tuple(QpKind)


@dataclass
class CountTable:
    rows: list[tuple[QpKind, int]]
    total: int


def build_qp_count_table(kinds: Sequence[QpKind]) -> CountTable:
    counts = {kind: 0 for kind in QP_TABLE_ORDER}
    for kind in kinds:
        counts[kind] += 1
    rows = [(kind, counts[kind]) for kind in QP_TABLE_ORDER]
    return CountTable(rows=rows, total=sum(counts.values()))


# Published corpus sizes for the full WordNet 3.0 / SUMO mapping inputs;
# full-scale regeneration is compared against these per pattern.
REFERENCE_PROBLEM_COUNTS: dict[QpKind, int] = {
    QpKind.NOUN_HYPO1: 7539,
    QpKind.NOUN_HYPO2: 1944,
    QpKind.VERB_HYPO1: 1765,
    QpKind.VERB_HYPO2: 304,
    QpKind.ANTONYM1: 91,
    QpKind.ANTONYM2: 574,
    QpKind.ANTONYM3: 2780,
    QpKind.MORPH_AGENT: 829,
    QpKind.MORPH_INSTRUMENT: 348,
    QpKind.MORPH_RESULT: 788,
}
REFERENCE_TOTAL = sum(REFERENCE_PROBLEM_COUNTS.values())


def compare_reference_counts(table: CountTable) -> list[tuple[str, int, int, float]]:
    """Per-pattern (label, actual, expected, deviation %) against the
    published corpus sizes, final row for the total."""
    out = []
    for kind, actual in table.rows:
        expected = REFERENCE_PROBLEM_COUNTS[kind]
        deviation = 100.0 * (actual - expected) / expected
        out.append((qp_label(kind), actual, expected, deviation))
    out.append(
        (
            "Total",
            table.total,
            REFERENCE_TOTAL,
            100.0 * (table.total - REFERENCE_TOTAL) / REFERENCE_TOTAL,
        )
    )
    return out


def qp_label(kind: QpKind) -> str:
    group, name = QP_LABELS[kind]
    if group == "Hyponymy":
        return name
    if group == "Antonymy":
        return f"Antonym {name}"
    return name


@dataclass
class ClassBlock:
    solved: int = 0
    correct_mapping: int = 0
    precise_mapping: int = 0
    incorrect_mapping: int = 0
    correct_knowledge: int = 0
    incorrect_knowledge: int = 0
    unannotated: int = 0


@dataclass
class UnsolvedBlock:
    unsolved: int = 0
    correct_mapping: int = 0
    precise_mapping: int = 0
    incorrect_mapping: int = 0
    unannotated: int = 0


@dataclass
class AnalysisRow:
    label: str
    sampled: int = 0
    entailed: ClassBlock = field(default_factory=ClassBlock)
    incompatible: ClassBlock = field(default_factory=ClassBlock)
    unsolved: UnsolvedBlock = field(default_factory=UnsolvedBlock)
    conflicts: int = 0

    @property
    def total_cm(self) -> int:
        return (
            self.entailed.correct_mapping
            + self.incompatible.correct_mapping
            + self.unsolved.correct_mapping
        )

    @property
    def total_precise(self) -> int:
        return (
            self.entailed.precise_mapping
            + self.incompatible.precise_mapping
            + self.unsolved.precise_mapping
        )

    @property
    def total_im(self) -> int:
        return (
            self.entailed.incorrect_mapping
            + self.incompatible.incorrect_mapping
            + self.unsolved.incorrect_mapping
        )

    @property
    def total_ck(self) -> int:
        return self.entailed.correct_knowledge + self.incompatible.correct_knowledge

    @property
    def total_ik(self) -> int:
        return self.entailed.incorrect_knowledge + self.incompatible.incorrect_knowledge

    @property
    def total_unannotated(self) -> int:
        return (
            self.entailed.unannotated
            + self.incompatible.unannotated
            + self.unsolved.unannotated
        )


@dataclass
class AnalysisTable:
    rows: list[tuple[QpKind, AnalysisRow]]
    total: AnalysisRow


class TableIdentityError(Exception):
    """A bookkeeping identity failed while building the analysis table."""


def _tally_class(block: ClassBlock, record: EvaluationRecord) -> None:
    block.solved += 1
    ann = record.annotation
    if ann is None:
        block.unannotated += 1
        return
    if ann.mapping_quality is MappingQuality.INCORRECT:
        block.incorrect_mapping += 1
    else:
        block.correct_mapping += 1
        if ann.mapping_quality is MappingQuality.CORRECT_PRECISE:
            block.precise_mapping += 1
    if ann.knowledge_quality is KnowledgeQuality.CORRECT:
        block.correct_knowledge += 1
    elif ann.knowledge_quality is KnowledgeQuality.INCORRECT:
        block.incorrect_knowledge += 1


def _tally_unsolved(block: UnsolvedBlock, record: EvaluationRecord) -> None:
    block.unsolved += 1
    ann = record.annotation
    if ann is None:
        block.unannotated += 1
        return
    if ann.mapping_quality is MappingQuality.INCORRECT:
        block.incorrect_mapping += 1
    else:
        block.correct_mapping += 1
        if ann.mapping_quality is MappingQuality.CORRECT_PRECISE:
            block.precise_mapping += 1


def _check_row(row: AnalysisRow) -> None:
    for block in (row.entailed, row.incompatible):
        if block.correct_mapping + block.incorrect_mapping + block.unannotated != block.solved:
            raise TableIdentityError(f"{row.label}: mapping buckets do not sum to S")
        if (
            block.correct_knowledge + block.incorrect_knowledge + block.unannotated
            != block.solved
        ):
            raise TableIdentityError(f"{row.label}: knowledge buckets do not sum to S")
    uns = row.unsolved
    if uns.correct_mapping + uns.incorrect_mapping + uns.unannotated != uns.unsolved:
        raise TableIdentityError(f"{row.label}: unsolved buckets do not sum to U")
    if (
        row.entailed.solved + row.incompatible.solved + uns.unsolved + row.conflicts
        != row.sampled
    ):
        raise TableIdentityError(f"{row.label}: class counts do not sum to #")
    if row.total_cm + row.total_im + row.total_unannotated + row.conflicts != row.sampled:
        raise TableIdentityError(f"{row.label}: total mapping buckets do not sum to #")


def build_analysis_table(records: Sequence[EvaluationRecord]) -> AnalysisTable:
    """Aggregate records into the per-pattern analysis table.

    Unknown classifications count as unsolved; conflicts go to their own
    bucket (they indicate degenerate conjectures, not benchmark results).
    """
    per_kind = {kind: AnalysisRow(label=qp_label(kind)) for kind in QP_TABLE_ORDER}
    total = AnalysisRow(label="Total")
    for record in records:
        for row in (per_kind[record.kind], total):
            row.sampled += 1
            if record.classification is Classification.ENTAILED:
                _tally_class(row.entailed, record)
            elif record.classification is Classification.INCOMPATIBLE:
                _tally_class(row.incompatible, record)
            elif record.classification is Classification.CONFLICT:
                row.conflicts += 1
            else:
                _tally_unsolved(row.unsolved, record)
    for row in per_kind.values():
        _check_row(row)
    _check_row(total)
    return AnalysisTable(
        rows=[(kind, per_kind[kind]) for kind in QP_TABLE_ORDER], total=total
    )


def format_analysis_row(row: AnalysisRow) -> str:
    """The 19 canonical cells of one analysis row, slash-separated."""
    e, i, u = row.entailed, row.incompatible, row.unsolved
    cells = [
        str(row.sampled),
        str(e.solved),
        f"{e.correct_mapping}({e.precise_mapping})",
        str(e.incorrect_mapping),
        str(e.correct_knowledge),
        str(e.incorrect_knowledge),
        str(i.solved),
        f"{i.correct_mapping}({i.precise_mapping})",
        str(i.incorrect_mapping),
        str(i.correct_knowledge),
        str(i.incorrect_knowledge),
        str(u.unsolved),
        f"{u.correct_mapping}({u.precise_mapping})",
        str(u.incorrect_mapping),
        f"{row.total_cm}({row.total_precise})",
        str(row.total_im),
        str(row.total_ck),
        str(row.total_ik),
        str(u.unsolved),
    ]
    return " / ".join(cells)


_ANALYSIS_HEADER = (
    "QP",
    "#",
    "E.S",
    "E.CM",
    "E.IM",
    "E.CK",
    "E.IK",
    "I.S",
    "I.CM",
    "I.IM",
    "I.CK",
    "I.IK",
    "U",
    "U.CM",
    "U.IM",
    "T.CM",
    "T.IM",
    "T.CK",
    "T.IK",
    "T.U",
    "Unann.",
    "Confl.",
)


def render_analysis_markdown(table: AnalysisTable) -> str:
    lines = [
        "| " + " | ".join(_ANALYSIS_HEADER) + " |",
        "|" + "---|" * len(_ANALYSIS_HEADER),
    ]
    for _, row in table.rows + [(None, table.total)]:
        cells = format_analysis_row(row).split(" / ")
        cells += [str(row.total_unannotated), str(row.conflicts)]
        lines.append("| " + " | ".join([row.label] + cells) + " |")
    return "\n".join(lines) + "\n"


def write_analysis_csv(table: AnalysisTable, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(_ANALYSIS_HEADER)
        for _, row in table.rows + [(None, table.total)]:
            cells = format_analysis_row(row).split(" / ")
            cells += [str(row.total_unannotated), str(row.conflicts)]
            writer.writerow([row.label] + cells)


def render_count_markdown(table: CountTable) -> str:
    lines = [
        "| WordNet Relation | QP | Problems |",
        "|---|---|---|",
    ]
    for kind, count in table.rows:
        group, name = QP_LABELS[kind]
        lines.append(f"| {group} | {name} | {count} |")
    lines.append(f"| Total | - | {table.total} |")
    return "\n".join(lines) + "\n"


def write_count_csv(table: CountTable, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("relation", "qp", "problems"))
        for kind, count in table.rows:
            group, name = QP_LABELS[kind]
            writer.writerow((group, name, count))
        writer.writerow(("Total", "-", table.total))


@dataclass(frozen=True)
class MisalignmentFinding:
    cq_id: str
    confirmed: bool
    synsets: tuple[str, str]
    terms: tuple[str, str]
    reason: str


def taxonomic_reason(cq: CompetencyQuestion, index: OntologyIndex) -> str:
    """Human-readable taxonomic cause of an incompatible classification."""
    try:
        shape = qp_shape(cq.truth)
    except Exception:
        return ""
    a = shape.antecedent.args[1].name
    b = shape.consequent.args[1].name
    if shape.kind == "inclusion":
        witness = disjointness_witness(index, a, b)
        if witness:
            return f"{a} and {b} are disjoint via declared pair ({witness[0]}, {witness[1]})"
    elif shape.kind == "exclusion":
        if is_subclass_of(index, a, b):
            return f"{a} is subsumed by {b}"
        if is_subclass_of(index, b, a):
            return f"{b} is subsumed by {a}"
    return ""


def detect_misalignments(
    records: Sequence[EvaluationRecord],
    cqs_by_id: Optional[Mapping[str, CompetencyQuestion]] = None,
    index: Optional[OntologyIndex] = None,
) -> list[MisalignmentFinding]:
    """Every incompatible record, flagged confirmed when its annotation
    says the mapping is correct (the contradiction then sits between the
    two knowledge resources, not in the mapping)."""
    findings: list[MisalignmentFinding] = []
    for record in records:
        if record.classification is not Classification.INCOMPATIBLE:
            continue
        ann = record.annotation
        confirmed = ann is not None and ann.mapping_quality in (
            MappingQuality.CORRECT_PRECISE,
            MappingQuality.ONLY_CORRECT,
        )
        synsets: tuple[str, str] = ("", "")
        terms: tuple[str, str] = ("", "")
        reason = ""
        if cqs_by_id and record.cq_id in cqs_by_id:
            cq = cqs_by_id[record.cq_id]
            synsets = cq.synsets
            terms = cq.terms
            if index is not None:
                reason = taxonomic_reason(cq, index)
        findings.append(
            MisalignmentFinding(
                cq_id=record.cq_id,
                confirmed=confirmed,
                synsets=synsets,
                terms=terms,
                reason=reason,
            )
        )
    return findings


def write_misalignments_csv(findings: Sequence[MisalignmentFinding], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ("cq_id", "status", "synset_a", "synset_b", "term_a", "term_b", "reason")
        )
        for f in findings:
            writer.writerow(
                (
                    f.cq_id,
                    "confirmed" if f.confirmed else "candidate",
                    f.synsets[0],
                    f.synsets[1],
                    f.terms[0],
                    f.terms[1],
                    f.reason,
                )
            )
