"""WordNet-to-SUMO mapping reader and statement translation.

The mapping files annotate each WordNet data line with ``&%Term=``,
``&%Term+`` or ``&%Term@`` suffixes (equivalence, subsumption,
instantiation). Each entry is translated into a one-free-variable SUMO
statement whose shape follows the kind of the target term: classes give
an instance statement, attributes an attribute statement, and object
instances an equality.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .kif import OntologyIndex, TermKind, term_kind
from .wordnet import synset_id

EQUIVALENCE = "="
SUBSUMPTION = "+"
INSTANTIATION = "@"
RELATION_SYMBOLS = (EQUIVALENCE, SUBSUMPTION, INSTANTIATION)


class MappingFormatError(Exception):
    """Malformed mapping annotation; message carries file and line."""


class UntranslatableEntryError(Exception):
    """The mapped term is a relation or unknown, so no statement exists."""

    def __init__(self, entry: "MappingEntry", kind: TermKind):
        self.entry = entry
        self.kind = kind
        super().__init__(
            f"mapping {entry.synset} -> {entry.suffix()} targets a"
            f" {kind.name} term and has no statement translation"
        )


class StatementShape(Enum):
    INSTANCE_OF = "instance"
    HAS_ATTRIBUTE = "attribute"
    EQUAL_TO = "equal"


@dataclass(frozen=True)
class MappingEntry:
    synset: str
    sumo_term: str
    relation: str  # one of = + @

    def suffix(self) -> str:
        """The annotation as it appears in the file, byte-exact."""
        return f"&%{self.sumo_term}{self.relation}"


@dataclass(frozen=True)
class MappingStatement:
    shape: StatementShape
    term: str
    entry: MappingEntry


_ANNOTATION = re.compile(r"&%([A-Za-z0-9_.-]+)(.)")


def parse_mapping_file(
    text: str, pos: str, fname: str = "<mapping>"
) -> tuple[dict[str, list[MappingEntry]], list[str]]:
    """Parse one per-POS mapping file into synset -> entries, file order.

    Returns the entry map and a diagnostics list (lines without any
    annotation are skipped with a diagnostic). An annotation whose suffix
    symbol is not one of = + @ is an error naming its location.
    """
    entries: dict[str, list[MappingEntry]] = {}
    diagnostics: list[str] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith(" "):
            continue
        offset = line.split(None, 1)[0]
        if len(offset) != 8 or not offset.isdigit():
            raise MappingFormatError(f"{fname}:{lineno}: bad synset offset {offset!r}")
        sid = synset_id(offset, pos)
        found = False
        for match in _ANNOTATION.finditer(line):
            term, symbol = match.group(1), match.group(2)
            if symbol not in RELATION_SYMBOLS:
                raise MappingFormatError(
                    f"{fname}:{lineno}: unknown mapping suffix {symbol!r}"
                    f" after &%{term}"
                )
            entries.setdefault(sid, []).append(
                MappingEntry(synset=sid, sumo_term=term, relation=symbol)
            )
            found = True
        if not found:
            diagnostics.append(f"{fname}:{lineno}: no &% annotation, line skipped")
    return entries, diagnostics


def parse_mapping(
    files: Mapping[str, tuple[str, str]]
) -> tuple[dict[str, list[MappingEntry]], list[str]]:
    """Parse several mapping files; ``files`` maps label -> (pos, text)."""
    merged: dict[str, list[MappingEntry]] = {}
    diagnostics: list[str] = []
    for fname, (pos, text) in files.items():
        entries, diags = parse_mapping_file(text, pos, fname)
        diagnostics.extend(diags)
        for sid, ents in entries.items():
            merged.setdefault(sid, []).extend(ents)
    return merged, diagnostics


def load_mapping_dir(path) -> tuple[dict[str, list[MappingEntry]], list[str]]:
    """Read the per-POS mapping files from a directory.

    Accepts the stock WordNetMappings30-<pos>.txt names as well as plain
    mapping.<pos> names.
    """
    from pathlib import Path

    base = Path(path)
    candidates = {
        "n": ("WordNetMappings30-noun.txt", "mapping.noun"),
        "v": ("WordNetMappings30-verb.txt", "mapping.verb"),
        "a": ("WordNetMappings30-adj.txt", "mapping.adj"),
    }
    files: dict[str, tuple[str, str]] = {}
    for pos, names in candidates.items():
        for name in names:
            fp = base / name
            if fp.exists():
                files[name] = (pos, fp.read_text(encoding="utf-8"))
                break
    if not files:
        raise FileNotFoundError(f"no mapping files under {base}")
    return parse_mapping(files)


def translate_entry(entry: MappingEntry, index: OntologyIndex) -> MappingStatement:
    """Statement template for one mapping entry.

    Class targets become instance statements and attribute targets
    attribute statements; object-instance targets become equalities.
    Instantiation entries to a class keep the instance shape: the mapped
    synset denotes some member of the class, and the class is the best
    statement recoverable from the mapping file alone. Relation and
    unknown targets raise UntranslatableEntryError.
    """
    kind = term_kind(index, entry.sumo_term)
    if kind is TermKind.CLASS:
        return MappingStatement(StatementShape.INSTANCE_OF, entry.sumo_term, entry)
    if kind is TermKind.ATTRIBUTE:
        return MappingStatement(StatementShape.HAS_ATTRIBUTE, entry.sumo_term, entry)
    if kind is TermKind.OBJECT_INSTANCE:
        return MappingStatement(StatementShape.EQUAL_TO, entry.sumo_term, entry)
    raise UntranslatableEntryError(entry, kind)
