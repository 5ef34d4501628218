"""WordNet 3.0 database reader.

Reads the ``data.noun`` / ``data.verb`` / ``data.adj`` files plus the
morphosemantic-links CSV and exposes the three relation streams the
question patterns are built from: direct hyponym pairs, synset-level
antonym pairs, and verb-noun morphosemantic links (agent, instrument,
result only). The store is immutable after loading and every stream is
deterministic given identical input bytes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Mapping, Optional

MORPH_ROLES = ("agent", "instrument", "result")

_SS_TYPE_NUM = {"n": 1, "v": 2, "a": 3, "r": 4, "s": 5}


class WordNetFormatError(Exception):
    """Malformed database line; message carries file name and line number."""


def synset_id(offset: str, pos: str) -> str:
    """Canonical synset id: 8-digit offset, dash, part-of-speech tag."""
    return f"{offset}-{pos}"


@dataclass(frozen=True)
class Synset:
    id: str
    pos: str
    offset: str
    lemmas: tuple[tuple[str, int], ...]  # (word, lex_id) in file order
    gloss: str

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(w for w, _ in self.lemmas)


@dataclass(frozen=True)
class HyponymEdge:
    hypo: str
    hyper: str
    pos: str


@dataclass(frozen=True)
class AntonymPair:
    a: str
    b: str
    lemma_a: str
    lemma_b: str


@dataclass(frozen=True)
class MorphLink:
    verb: str
    noun: str
    role: str


@dataclass
class _RawPointer:
    symbol: str
    target_offset: str
    target_pos: str
    source_word: int
    target_word: int


@dataclass
class SynsetStore:
    synsets: dict[str, Synset] = field(default_factory=dict)
    hypernyms: list[HyponymEdge] = field(default_factory=list)
    antonyms: list[AntonymPair] = field(default_factory=list)
    sense_index: dict[str, str] = field(default_factory=dict)
    diagnostics: list[str] = field(default_factory=list)

    def resolve_sense_key(self, key: str) -> Optional[str]:
        """Synset id for a WordNet sense key, matching on lemma:type:lexfile:lexid."""
        prefix = _sense_key_prefix(key)
        if prefix is None:
            return None
        return self.sense_index.get(prefix)


def _sense_key_prefix(key: str) -> Optional[str]:
    if "%" not in key:
        return None
    lemma, rest = key.split("%", 1)
    parts = rest.split(":")
    if len(parts) < 3:
        return None
    return f"{lemma.lower()}%{parts[0]}:{parts[1]}:{parts[2]}"


def _normalize_pos(pos: str) -> str:
    # Adjective satellites behave as adjectives for every purpose here.
    return "a" if pos == "s" else pos


def _parse_data_line(
    line: str, fname: str, lineno: int
) -> tuple[Synset, list[_RawPointer], dict[str, str]]:
    head, sep, gloss = line.partition("|")
    if not sep:
        raise WordNetFormatError(f"{fname}:{lineno}: missing '|' gloss separator")
    tokens = head.split()
    try:
        offset = tokens[0]
        if len(offset) != 8 or not offset.isdigit():
            raise ValueError(f"bad synset offset {offset!r}")
        lex_filenum = int(tokens[1])
        ss_type = tokens[2]
        if ss_type not in _SS_TYPE_NUM:
            raise ValueError(f"bad ss_type {ss_type!r}")
        w_cnt = int(tokens[3], 16)
        if w_cnt < 1:
            raise ValueError("synset with no words")
        pos_tok = 4
        lemmas: list[tuple[str, int]] = []
        for _ in range(w_cnt):
            word = tokens[pos_tok]
            lex_id = int(tokens[pos_tok + 1], 16)
            lemmas.append((word, lex_id))
            pos_tok += 2
        p_cnt = int(tokens[pos_tok])
        pos_tok += 1
        pointers: list[_RawPointer] = []
        for _ in range(p_cnt):
            symbol = tokens[pos_tok]
            target_offset = tokens[pos_tok + 1]
            target_pos = tokens[pos_tok + 2]
            st = tokens[pos_tok + 3]
            pointers.append(
                _RawPointer(
                    symbol=symbol,
                    target_offset=target_offset,
                    target_pos=_normalize_pos(target_pos),
                    source_word=int(st[:2], 16),
                    target_word=int(st[2:], 16),
                )
            )
            pos_tok += 4
        # Verb frames (``f_cnt  + f_num w_num ...``) follow; nothing here uses them.
    except (IndexError, ValueError) as exc:
        raise WordNetFormatError(f"{fname}:{lineno}: {exc}") from exc

    pos = _normalize_pos(ss_type)
    syn = Synset(
        id=synset_id(offset, pos),
        pos=pos,
        offset=offset,
        lemmas=tuple(lemmas),
        gloss=gloss.strip(),
    )
    # Sense keys are reconstructible from the data line alone (head_word
    # fields of satellites are not needed for the first three fields).
    prefixes = {
        f"{word.lower()}%{_SS_TYPE_NUM[ss_type]}:{lex_filenum:02d}:{lex_id:02d}": syn.id
        for word, lex_id in lemmas
    }
    return syn, pointers, prefixes


def parse_wordnet_data(files: Mapping[str, str]) -> SynsetStore:
    """Build a SynsetStore from the contents of WordNet 3.0 data files.

    ``files`` maps a label (used in error messages) to file content.
    Header lines starting with two spaces are skipped, as in the stock
    distribution. Hypernym pointers ('@' and '@i') and antonym pointers
    ('!') are captured; a pointer to a synset that is not in the store
    is dropped with a diagnostic.
    """
    store = SynsetStore()
    pending: list[tuple[str, _RawPointer]] = []
    for fname in files:
        for lineno, line in enumerate(files[fname].splitlines(), start=1):
            if not line.strip() or line.startswith(" "):
                continue
            syn, pointers, prefixes = _parse_data_line(line, fname, lineno)
            if syn.id in store.synsets:
                raise WordNetFormatError(f"{fname}:{lineno}: duplicate synset {syn.id}")
            store.synsets[syn.id] = syn
            store.sense_index.update(prefixes)
            for ptr in pointers:
                if ptr.symbol in ("@", "@i", "!"):
                    pending.append((syn.id, ptr))

    seen_antonyms: set[tuple[str, str]] = set()
    for source_id, ptr in pending:
        target_id = synset_id(ptr.target_offset, ptr.target_pos)
        if target_id not in store.synsets:
            store.diagnostics.append(
                f"dropped {ptr.symbol!r} pointer {source_id} -> {target_id}:"
                f" target not in store"
            )
            continue
        if ptr.symbol in ("@", "@i"):
            store.hypernyms.append(
                HyponymEdge(
                    hypo=source_id,
                    hyper=target_id,
                    pos=store.synsets[source_id].pos,
                )
            )
        else:
            a, b = sorted((source_id, target_id))
            if (a, b) in seen_antonyms or a == b:
                continue
            seen_antonyms.add((a, b))
            src = store.synsets[source_id]
            tgt = store.synsets[target_id]
            lemma_src = _word_at(src, ptr.source_word)
            lemma_tgt = _word_at(tgt, ptr.target_word)
            if source_id == a:
                pair = AntonymPair(a=a, b=b, lemma_a=lemma_src, lemma_b=lemma_tgt)
            else:
                pair = AntonymPair(a=a, b=b, lemma_a=lemma_tgt, lemma_b=lemma_src)
            store.antonyms.append(pair)

    store.hypernyms.sort(key=lambda e: (e.hypo, e.hyper))
    store.antonyms.sort(key=lambda p: (p.a, p.b))
    return store


def _word_at(syn: Synset, word_number: int) -> str:
    # Word numbers are 1-based; 0 marks a synset-level pointer.
    if 1 <= word_number <= len(syn.lemmas):
        return syn.lemmas[word_number - 1][0]
    return syn.lemmas[0][0]


def load_wordnet_dir(path) -> SynsetStore:
    """Read data.noun / data.verb / data.adj from a directory path."""
    from pathlib import Path

    base = Path(path)
    files = {}
    for name in ("data.noun", "data.verb", "data.adj"):
        fp = base / name
        if fp.exists():
            files[name] = fp.read_text(encoding="utf-8")
    if not files:
        raise FileNotFoundError(f"no WordNet data files under {base}")
    return parse_wordnet_data(files)


def hyponym_pairs(
    store: SynsetStore, pos: str, transitive: bool = False
) -> list[HyponymEdge]:
    """Direct hyponym pairs for the given part of speech.

    ``transitive=True`` additionally expands the closure; the benchmark
    counts are only approachable with direct edges, so that is the default.
    """
    if pos not in ("n", "v"):
        raise ValueError(f"hyponymy is defined for 'n' and 'v', not {pos!r}")
    direct = [e for e in store.hypernyms if e.pos == pos]
    if not transitive:
        return direct
    parents: dict[str, set[str]] = {}
    for e in direct:
        parents.setdefault(e.hypo, set()).add(e.hyper)
    out: set[tuple[str, str]] = set()
    for start in parents:
        frontier = list(parents[start])
        seen: set[str] = set()
        while frontier:
            t = frontier.pop()
            if t in seen or t == start:
                continue
            seen.add(t)
            out.add((start, t))
            frontier.extend(parents.get(t, ()))
    return [HyponymEdge(h, p, pos) for h, p in sorted(out)]


def antonym_pairs(store: SynsetStore) -> list[AntonymPair]:
    """Synset-level antonym pairs, canonical order, deduplicated."""
    return list(store.antonyms)


def parse_morphosemantic_links(text: str, store: SynsetStore) -> list[MorphLink]:
    """Parse the morphosemantic-links CSV against a loaded store.

    Rows are (verb sense key, relation, noun sense key). Relations other
    than agent / instrument / result are filtered silently by design;
    rows whose sense keys do not resolve are dropped with a diagnostic.
    """
    links: list[MorphLink] = []
    for row_no, row in enumerate(csv.reader(text.splitlines()), start=1):
        if not row or not "".join(row).strip():
            continue
        if len(row) != 3:
            store.diagnostics.append(
                f"morphosemantic row {row_no}: expected 3 columns, got {len(row)}"
            )
            continue
        verb_key, relation, noun_key = (c.strip() for c in row)
        if relation not in MORPH_ROLES:
            continue
        verb_id = store.resolve_sense_key(verb_key)
        noun_id = store.resolve_sense_key(noun_key)
        if verb_id is None or noun_id is None:
            missing = verb_key if verb_id is None else noun_key
            store.diagnostics.append(
                f"morphosemantic row {row_no}: unresolvable sense key {missing!r}"
            )
            continue
        if store.synsets[verb_id].pos != "v" or store.synsets[noun_id].pos != "n":
            store.diagnostics.append(
                f"morphosemantic row {row_no}: {verb_id}/{noun_id} have wrong"
                f" parts of speech"
            )
            continue
        links.append(MorphLink(verb=verb_id, noun=noun_id, role=relation))
    return links
