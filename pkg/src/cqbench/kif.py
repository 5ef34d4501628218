"""SUO-KIF reader and taxonomy index.

Parses SUO-KIF text into s-expressions and distils the taxonomic core
(subclass / subAttribute / subrelation / instance plus disjointness
declarations) into an immutable index that answers subsumption and
disjointness queries. General rules (=> / <=>) are kept verbatim in a
side list and never interpreted here; downstream consumers that need
full first-order reasoning work from a prebuilt TPTP axiom file instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Optional, Sequence


class KifParseError(Exception):
    """Raised on malformed SUO-KIF input; message carries line/column."""


class OntologyError(Exception):
    """Raised when the taxonomy violates a structural requirement."""


@dataclass(frozen=True)
class KifAtom:
    """A bare token. Tokens starting with '?' are variables."""

    symbol: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    @property
    def is_variable(self) -> bool:
        return self.symbol.startswith("?")

    def to_kif(self) -> str:
        return self.symbol


@dataclass(frozen=True)
class KifList:
    """A parenthesized expression; child order is preserved."""

    children: tuple["KifExpression", ...]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    def head(self) -> Optional[str]:
        if self.children and isinstance(self.children[0], KifAtom):
            return self.children[0].symbol
        return None

    def to_kif(self) -> str:
        return "(" + " ".join(c.to_kif() for c in self.children) + ")"


KifExpression = KifAtom | KifList


def _tokenize(text: str) -> Iterator[tuple[str, int, int]]:
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            col += 1
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch, line, col
            col += 1
            i += 1
        elif ch == '"':
            start_line, start_col = line, col
            j = i + 1
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n:
                    j += 1
                if text[j] == "\n":
                    line += 1
                    col = 0
                j += 1
                col += 1
            if j >= n:
                raise KifParseError(
                    f"unterminated string starting at line {start_line}, column {start_col}"
                )
            yield text[i : j + 1], start_line, start_col
            col += 2
            i = j + 1
        else:
            start_line, start_col = line, col
            j = i
            while j < n and text[j] not in ' \t\r\n();"':
                j += 1
            yield text[i:j], start_line, start_col
            col += j - i
            i = j


def parse_kif(text: str) -> list[KifExpression]:
    """Parse SUO-KIF text into its top-level expressions, in order.

    ';' starts a comment running to end of line. Strings and quoted
    tokens are kept verbatim as atoms. Unbalanced parentheses and the
    empty list '()' are errors that name their location.
    """
    stack: list[list[KifExpression]] = []
    open_positions: list[tuple[int, int]] = []
    top: list[KifExpression] = []
    for token, line, col in _tokenize(text):
        if token == "(":
            stack.append([])
            open_positions.append((line, col))
        elif token == ")":
            if not stack:
                raise KifParseError(f"unmatched ')' at line {line}, column {col}")
            children = stack.pop()
            oline, ocol = open_positions.pop()
            if not children:
                raise KifParseError(f"empty list '()' at line {oline}, column {ocol}")
            expr = KifList(tuple(children), line=oline, column=ocol)
            (stack[-1] if stack else top).append(expr)
        else:
            atom = KifAtom(token, line=line, column=col)
            (stack[-1] if stack else top).append(atom)
    if stack:
        oline, ocol = open_positions[-1]
        raise KifParseError(f"unclosed '(' at line {oline}, column {ocol}")
    return top


def print_kif(exprs: Iterable[KifExpression]) -> str:
    """Render expressions one per line; parse(print(parse(x))) is a fixed point."""
    return "\n".join(e.to_kif() for e in exprs) + "\n"


class TermKind(Enum):
    """Nature of a SUMO term, mirroring the o/c/r/a subscript convention."""

    OBJECT_INSTANCE = "o"
    CLASS = "c"
    RELATION = "r"
    ATTRIBUTE = "a"
    UNKNOWN = "?"


# Hierarchy roots used to tell attribute and relation instances apart
# from plain object instances.
ATTRIBUTE_ROOT = "Attribute"
RELATION_ROOT = "Relation"

_TAXONOMIC_ARITY = {
    "subclass": 3,
    "subAttribute": 3,
    "subrelation": 3,
    "instance": 3,
    "disjoint": 3,
}


@dataclass
class OntologyIndex:
    """Immutable-after-build view of the taxonomy.

    Edges are stored child -> parents. ``disjoint_pairs`` holds declared
    class-level exclusions, ``contrary_pairs`` attribute-level ones;
    queries propagate both downwards through the respective hierarchy.
    """

    classes: set[str] = field(default_factory=set)
    subclass: dict[str, set[str]] = field(default_factory=dict)
    subattribute: dict[str, set[str]] = field(default_factory=dict)
    subrelation: dict[str, set[str]] = field(default_factory=dict)
    instances: dict[str, set[str]] = field(default_factory=dict)
    disjoint_pairs: set[tuple[str, str]] = field(default_factory=set)
    contrary_pairs: set[tuple[str, str]] = field(default_factory=set)
    kinds: dict[str, TermKind] = field(default_factory=dict)
    rules: list[KifList] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)
    vacuous_terms: list[str] = field(default_factory=list)

    def parents_of(self, term: str) -> set[str]:
        up = self.subclass.get(term, set()) | self.subattribute.get(term, set())
        return up

    def ancestors_of(self, term: str) -> set[str]:
        """Reflexive-transitive up-set over subclass and subAttribute edges."""
        seen = {term}
        frontier = [term]
        while frontier:
            t = frontier.pop()
            for parent in self.parents_of(t):
                if parent not in seen:
                    seen.add(parent)
                    frontier.append(parent)
        return seen


def _check_arity(expr: KifList) -> None:
    head = expr.head()
    want = _TAXONOMIC_ARITY.get(head or "")
    if want is not None and len(expr.children) != want:
        raise OntologyError(
            f"'{head}' expects {want - 1} arguments, got {len(expr.children) - 1}"
            f" at line {expr.line}, column {expr.column}"
        )
    if head in ("partition", "disjointDecomposition") and len(expr.children) < 3:
        raise OntologyError(
            f"'{head}' expects a class and at least one part"
            f" at line {expr.line}, column {expr.column}"
        )
    if head == "contraryAttribute" and len(expr.children) < 3:
        raise OntologyError(
            f"'contraryAttribute' expects at least two attributes"
            f" at line {expr.line}, column {expr.column}"
        )


def _symbol_args(expr: KifList) -> list[str]:
    args = []
    for child in expr.children[1:]:
        if not isinstance(child, KifAtom) or child.is_variable:
            raise OntologyError(
                f"'{expr.head()}' takes plain term arguments"
                f" at line {expr.line}, column {expr.column}"
            )
        args.append(child.symbol)
    return args


def _find_cycle(edges: dict[str, set[str]]) -> Optional[list[str]]:
    WHITE, GREY, BLACK = 0, 1, 2
    color: dict[str, int] = {}
    path: list[str] = []

    def visit(node: str) -> Optional[list[str]]:
        color[node] = GREY
        path.append(node)
        for parent in sorted(edges.get(node, ())):
            c = color.get(parent, WHITE)
            if c == GREY:
                return path[path.index(parent) :] + [parent]
            if c == WHITE:
                found = visit(parent)
                if found:
                    return found
        path.pop()
        color[node] = BLACK
        return None

    for start in sorted(edges):
        if color.get(start, WHITE) == WHITE:
            found = visit(start)
            if found:
                return found
    return None


def build_index(exprs: Sequence[KifExpression]) -> OntologyIndex:
    """Extract the taxonomic fragment into an OntologyIndex.

    Recognized forms: instance, subclass, subAttribute, subrelation,
    disjoint, partition, disjointDecomposition, contraryAttribute.
    Rules (any expression whose head is => or <=>) are retained opaque.
    Everything else is ignored. Deterministic: same expressions in, same
    index and diagnostics out.
    """
    index = OntologyIndex()
    attribute_evidence: dict[str, list[str]] = {}
    relation_evidence: dict[str, list[str]] = {}
    class_evidence: dict[str, list[str]] = {}
    object_evidence: dict[str, list[str]] = {}

    def note(kind: dict[str, list[str]], term: str, why: str) -> None:
        kind.setdefault(term, []).append(why)

    for expr in exprs:
        if not isinstance(expr, KifList):
            continue
        head = expr.head()
        if head in ("=>", "<=>"):
            index.rules.append(expr)
            continue
        if head not in (
            "instance",
            "subclass",
            "subAttribute",
            "subrelation",
            "disjoint",
            "partition",
            "disjointDecomposition",
            "contraryAttribute",
        ):
            continue
        _check_arity(expr)
        if any(isinstance(c, KifAtom) and c.is_variable for c in expr.children[1:]):
            # Quantified taxonomic statements only occur inside rules;
            # a bare one is treated as a rule fragment and kept opaque.
            index.rules.append(expr)
            continue
        args = _symbol_args(expr)
        if head == "subclass":
            child, parent = args
            index.subclass.setdefault(child, set()).add(parent)
            index.classes.update(args)
            note(class_evidence, child, f"(subclass {child} {parent})")
            note(class_evidence, parent, f"(subclass {child} {parent})")
        elif head == "subAttribute":
            child, parent = args
            index.subattribute.setdefault(child, set()).add(parent)
            note(attribute_evidence, child, f"(subAttribute {child} {parent})")
            note(attribute_evidence, parent, f"(subAttribute {child} {parent})")
        elif head == "subrelation":
            child, parent = args
            index.subrelation.setdefault(child, set()).add(parent)
            note(relation_evidence, child, f"(subrelation {child} {parent})")
            note(relation_evidence, parent, f"(subrelation {child} {parent})")
        elif head == "instance":
            term, cls = args
            index.instances.setdefault(term, set()).add(cls)
            index.classes.add(cls)
            note(class_evidence, cls, f"(instance {term} {cls})")
            # The term's own kind depends on where cls sits; resolved below.
        elif head == "disjoint":
            a, b = args
            index.disjoint_pairs.add((a, b))
            index.classes.update(args)
            note(class_evidence, a, f"(disjoint {a} {b})")
            note(class_evidence, b, f"(disjoint {a} {b})")
        elif head in ("partition", "disjointDecomposition"):
            whole, *parts = args
            index.classes.add(whole)
            index.classes.update(parts)
            note(class_evidence, whole, f"({head} ...)")
            for i, a in enumerate(parts):
                note(class_evidence, a, f"({head} {whole} ...)")
                for b in parts[i + 1 :]:
                    if a != b:
                        index.disjoint_pairs.add((a, b))
        elif head == "contraryAttribute":
            group = args
            for i, a in enumerate(group):
                note(attribute_evidence, a, f"(contraryAttribute ...)")
                for b in group[i + 1 :]:
                    if a != b:
                        index.contrary_pairs.add((a, b))

    cycle = _find_cycle(index.subclass)
    if cycle:
        raise OntologyError("subclass cycle: " + " -> ".join(cycle))
    cycle = _find_cycle(index.subattribute)
    if cycle:
        raise OntologyError("subAttribute cycle: " + " -> ".join(cycle))

    # Instance assertions contribute kind evidence once the class side
    # of the hierarchy is known.
    for term in sorted(index.instances):
        for cls in sorted(index.instances[term]):
            up = index.ancestors_of(cls)
            if ATTRIBUTE_ROOT in up:
                note(attribute_evidence, term, f"(instance {term} {cls})")
            elif RELATION_ROOT in up:
                note(relation_evidence, term, f"(instance {term} {cls})")
            else:
                note(object_evidence, term, f"(instance {term} {cls})")

    all_terms = (
        set(index.classes)
        | set(attribute_evidence)
        | set(relation_evidence)
        | set(object_evidence)
        | set(index.instances)
        | set(index.subrelation)
    )
    for term in sorted(all_terms):
        buckets = []
        if term in relation_evidence:
            buckets.append((TermKind.RELATION, relation_evidence[term]))
        if term in attribute_evidence:
            buckets.append((TermKind.ATTRIBUTE, attribute_evidence[term]))
        if term in class_evidence:
            buckets.append((TermKind.CLASS, class_evidence[term]))
        if term in object_evidence:
            buckets.append((TermKind.OBJECT_INSTANCE, object_evidence[term]))
        if not buckets:
            continue
        index.kinds[term] = buckets[0][0]
        if len(buckets) > 1:
            sources = "; ".join(
                f"{kind.name}: {', '.join(evidence[:2])}" for kind, evidence in buckets
            )
            index.diagnostics.append(
                f"term '{term}' has conflicting kind evidence ({sources});"
                f" using {buckets[0][0].name}"
            )

    _flag_vacuous(index)
    return index


def _flag_vacuous(index: OntologyIndex) -> None:
    """Flag terms forced empty: below both sides of a disjoint pair."""
    all_terms = set(index.subclass) | set(index.subattribute) | set(index.classes)
    for term in sorted(all_terms):
        up = index.ancestors_of(term)
        for a, b in sorted(index.disjoint_pairs | index.contrary_pairs):
            if a in up and b in up:
                index.vacuous_terms.append(term)
                index.diagnostics.append(
                    f"term '{term}' is vacuous: below both '{a}' and '{b}'"
                    f" which are declared disjoint"
                )
                break


def is_subclass_of(index: OntologyIndex, a: str, b: str) -> bool:
    """True iff a == b or a reaches b via subclass / subAttribute edges.

    Unknown terms are legal and compare false except reflexively.
    """
    if a == b:
        return True
    return b in index.ancestors_of(a)


def are_disjoint(index: OntologyIndex, a: str, b: str) -> bool:
    """True iff (a, b) lies in the downward-propagated disjointness closure."""
    return disjointness_witness(index, a, b) is not None


def disjointness_witness(
    index: OntologyIndex, a: str, b: str
) -> Optional[tuple[str, str]]:
    """The declared disjoint pair that makes (a, b) disjoint, if any.

    Propagation: disjoint(A, B) plus a <= A and b <= B gives disjoint(a, b);
    contraryAttribute groups propagate the same way through subAttribute.
    The result is symmetric in a and b.
    """
    up_a = index.ancestors_of(a)
    up_b = index.ancestors_of(b)
    for pair in sorted(index.disjoint_pairs | index.contrary_pairs):
        x, y = pair
        if (x in up_a and y in up_b) or (x in up_b and y in up_a):
            return pair
    return None


def instance_classes(index: OntologyIndex, term: str) -> set[str]:
    """Directly declared classes of an instance term."""
    return set(index.instances.get(term, set()))


def is_instance_of(index: OntologyIndex, term: str, cls: str) -> bool:
    """True iff term is declared in some class reaching cls."""
    return any(is_subclass_of(index, c, cls) for c in index.instances.get(term, ()))


def term_kind(index: OntologyIndex, term: str) -> TermKind:
    """Kind of a SUMO term; Unknown for terms absent from the index."""
    return index.kinds.get(term, TermKind.UNKNOWN)
