"""Conjecture ASTs and their TPTP FOF form.

The AST covers exactly what the question patterns need: universal and
existential quantifiers, implication, conjunction, negation, and atoms
over instance / attribute / the three morphosemantic roles / equality.
``to_fof`` renders byte-deterministic FOF text; ``parse_fof_document``
reads it back (and doubles as the well-formedness check used by tests
and the bundled stub prover).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional, Union

ROLE_PREDICATES = ("agent", "instrument", "result")


class FofSyntaxError(Exception):
    pass


@dataclass(frozen=True)
class Term:
    name: str
    is_var: bool


def var(name: str) -> Term:
    return Term(name, True)


def const(name: str) -> Term:
    return Term(name, False)


@dataclass(frozen=True)
class Atom:
    pred: str  # instance | attribute | agent | instrument | result | =
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    parts: tuple["Formula", ...]


@dataclass(frozen=True)
class Implies:
    antecedent: "Formula"
    consequent: "Formula"


@dataclass(frozen=True)
class Forall:
    variables: tuple[str, ...]
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    variables: tuple[str, ...]
    body: "Formula"


Formula = Union[Atom, Not, And, Implies, Forall, Exists]


def instance_atom(v: str, term: str) -> Atom:
    return Atom("instance", (var(v), const(term)))


def attribute_atom(v: str, term: str) -> Atom:
    return Atom("attribute", (var(v), const(term)))


def equal_atom(v: str, term: str) -> Atom:
    return Atom("=", (var(v), const(term)))


def role_atom(role: str, event_var: str, participant_var: str) -> Atom:
    if role not in ROLE_PREDICATES:
        raise ValueError(f"unknown role predicate {role!r}")
    return Atom(role, (var(event_var), var(participant_var)))


def free_variables(formula: Formula, bound: frozenset[str] = frozenset()) -> set[str]:
    if isinstance(formula, Atom):
        return {t.name for t in formula.args if t.is_var and t.name not in bound}
    if isinstance(formula, Not):
        return free_variables(formula.body, bound)
    if isinstance(formula, And):
        out: set[str] = set()
        for part in formula.parts:
            out |= free_variables(part, bound)
        return out
    if isinstance(formula, Implies):
        return free_variables(formula.antecedent, bound) | free_variables(
            formula.consequent, bound
        )
    if isinstance(formula, (Forall, Exists)):
        return free_variables(formula.body, bound | frozenset(formula.variables))
    raise TypeError(f"not a formula: {formula!r}")


def quantified_names(formula: Formula) -> list[str]:
    if isinstance(formula, Atom):
        return []
    if isinstance(formula, Not):
        return quantified_names(formula.body)
    if isinstance(formula, And):
        return [n for p in formula.parts for n in quantified_names(p)]
    if isinstance(formula, Implies):
        return quantified_names(formula.antecedent) + quantified_names(
            formula.consequent
        )
    if isinstance(formula, (Forall, Exists)):
        return list(formula.variables) + quantified_names(formula.body)
    raise TypeError(f"not a formula: {formula!r}")


def check_closed(formula: Formula) -> None:
    """Raise if the formula has free variables or reused quantifier names."""
    free = free_variables(formula)
    if free:
        raise ValueError(f"formula has free variables: {sorted(free)}")
    names = quantified_names(formula)
    if len(names) != len(set(names)):
        raise ValueError(f"quantifier variable names reused: {names}")


_LOWER_WORD = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


def render_symbol(name: str, prefix: str = "") -> str:
    """Constant/predicate symbol in FOF; quoted unless it is a lower word."""
    symbol = prefix + name
    if _LOWER_WORD.match(symbol):
        return symbol
    escaped = symbol.replace("\\", "\\\\").replace("'", "\\'")
    return f"'{escaped}'"


def _render_term(t: Term, prefix: str) -> str:
    if t.is_var:
        return t.name.upper()
    return render_symbol(t.name, prefix)


def to_fof(formula: Formula, prefix: str = "") -> str:
    """Deterministic single-line FOF rendering of a formula."""
    if isinstance(formula, Atom):
        if formula.pred == "=":
            lhs, rhs = formula.args
            return f"{_render_term(lhs, prefix)} = {_render_term(rhs, prefix)}"
        args = ",".join(_render_term(t, prefix) for t in formula.args)
        return f"{render_symbol(formula.pred, prefix)}({args})"
    if isinstance(formula, Not):
        body = to_fof(formula.body, prefix)
        if isinstance(formula.body, Atom) and formula.body.pred != "=":
            return f"~ {body}"
        return f"~ ({body})"
    if isinstance(formula, And):
        return "(" + " & ".join(to_fof(p, prefix) for p in formula.parts) + ")"
    if isinstance(formula, Implies):
        return (
            "("
            + to_fof(formula.antecedent, prefix)
            + " => "
            + to_fof(formula.consequent, prefix)
            + ")"
        )
    if isinstance(formula, Forall):
        return f"! [{','.join(v.upper() for v in formula.variables)}] : " + to_fof(
            formula.body, prefix
        )
    if isinstance(formula, Exists):
        return f"? [{','.join(v.upper() for v in formula.variables)}] : " + to_fof(
            formula.body, prefix
        )
    raise TypeError(f"not a formula: {formula!r}")


class FormulaShapeError(Exception):
    """The formula is not one of the three question-pattern shapes."""


@dataclass(frozen=True)
class QpShape:
    """Decomposition of a truth conjecture into its QP pieces.

    kind is 'inclusion' (forall X: A -> B), 'exclusion'
    (forall X: A -> ~B) or 'morph' (forall Y: A -> exists X: (B & role(X, Y))).
    ``antecedent`` / ``consequent`` are the two statement atoms.
    """

    kind: str
    antecedent: Atom
    consequent: Atom
    role: Optional[str] = None


def _is_statement_atom(f: Formula, v: str) -> bool:
    return (
        isinstance(f, Atom)
        and f.pred in ("instance", "attribute", "=")
        and len(f.args) == 2
        and f.args[0] == Term(v, True)
        and not f.args[1].is_var
    )


def qp_shape(formula: Formula) -> QpShape:
    """Classify a truth formula as inclusion / exclusion / morph.

    Raises FormulaShapeError for anything outside the three shapes.
    """
    if not (
        isinstance(formula, Forall)
        and len(formula.variables) == 1
        and isinstance(formula.body, Implies)
    ):
        raise FormulaShapeError("expected a single-variable universal implication")
    outer = formula.variables[0]
    ante = formula.body.antecedent
    cons = formula.body.consequent
    if not _is_statement_atom(ante, outer):
        raise FormulaShapeError("antecedent is not a one-variable statement atom")
    if isinstance(cons, Atom) and _is_statement_atom(cons, outer):
        return QpShape("inclusion", ante, cons)
    if (
        isinstance(cons, Not)
        and isinstance(cons.body, Atom)
        and _is_statement_atom(cons.body, outer)
    ):
        return QpShape("exclusion", ante, cons.body)
    if isinstance(cons, Exists) and len(cons.variables) == 1:
        inner = cons.variables[0]
        body = cons.body
        if (
            isinstance(body, And)
            and len(body.parts) == 2
            and _is_statement_atom(body.parts[0], inner)
            and isinstance(body.parts[1], Atom)
            and body.parts[1].pred in ROLE_PREDICATES
            and body.parts[1].args == (Term(inner, True), Term(outer, True))
        ):
            return QpShape("morph", ante, body.parts[0], role=body.parts[1].pred)
    raise FormulaShapeError("consequent fits no question-pattern shape")


@dataclass(frozen=True)
class AnnotatedFormula:
    name: str
    role: str
    formula: Formula


@dataclass(frozen=True)
class ProblemDocument:
    includes: tuple[str, ...]
    formulas: tuple[AnnotatedFormula, ...]

    def conjecture(self) -> AnnotatedFormula:
        for f in self.formulas:
            if f.role == "conjecture":
                return f
        raise FofSyntaxError("document has no conjecture")


_TOKEN = re.compile(
    r"""
      (?P<ws>\s+|%[^\n]*)
    | (?P<quoted>'(?:[^'\\]|\\.)*')
    | (?P<op><=>|=>|[()\[\],.:&|~!?=])
    | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


def _tokens(text: str) -> Iterator[str]:
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FofSyntaxError(f"bad character {text[pos]!r} at offset {pos}")
        pos = m.end()
        if m.lastgroup == "ws":
            continue
        yield m.group(0)


class _Parser:
    def __init__(self, text: str, prefix: str = ""):
        self.toks = list(_tokens(text))
        self.i = 0
        self.prefix = prefix

    def peek(self) -> Optional[str]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> str:
        if self.i >= len(self.toks):
            raise FofSyntaxError("unexpected end of input")
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.next()
        if got != tok:
            raise FofSyntaxError(f"expected {tok!r}, got {got!r}")

    def _symbol(self, tok: str) -> str:
        if tok.startswith("'"):
            name = tok[1:-1].replace("\\'", "'").replace("\\\\", "\\")
        else:
            name = tok
        if self.prefix and name.startswith(self.prefix):
            name = name[len(self.prefix) :]
        return name

    def document(self) -> ProblemDocument:
        includes: list[str] = []
        formulas: list[AnnotatedFormula] = []
        while self.peek() is not None:
            head = self.next()
            if head == "include":
                self.expect("(")
                target = self.next()
                if not target.startswith("'"):
                    raise FofSyntaxError("include target must be quoted")
                includes.append(target[1:-1])
                self.expect(")")
                self.expect(".")
            elif head == "fof":
                self.expect("(")
                name = self.next()
                if name.startswith("'"):
                    name = name[1:-1]
                self.expect(",")
                role = self.next()
                self.expect(",")
                formula = self.formula()
                self.expect(")")
                self.expect(".")
                check_closed(formula)
                formulas.append(AnnotatedFormula(name, role, formula))
            else:
                raise FofSyntaxError(f"expected 'include' or 'fof', got {head!r}")
        return ProblemDocument(tuple(includes), tuple(formulas))

    def formula(self) -> Formula:
        left = self.unit()
        nxt = self.peek()
        if nxt == "=>":
            self.next()
            right = self.unit()
            return Implies(left, right)
        if nxt == "&":
            parts = [left]
            while self.peek() == "&":
                self.next()
                parts.append(self.unit())
            return And(tuple(parts))
        if nxt in ("|", "<=>"):
            raise FofSyntaxError(f"connective {nxt!r} is outside the QP fragment")
        return left

    def unit(self) -> Formula:
        tok = self.peek()
        if tok == "~":
            self.next()
            return Not(self.unit())
        if tok in ("!", "?"):
            quant = self.next()
            self.expect("[")
            names = [self.next()]
            while self.peek() == ",":
                self.next()
                names.append(self.next())
            self.expect("]")
            self.expect(":")
            body = self.unit()
            cls = Forall if quant == "!" else Exists
            return cls(tuple(names), body)
        if tok == "(":
            self.next()
            inner = self.formula()
            self.expect(")")
            return inner
        return self.atom()

    def _term(self) -> Term:
        tok = self.next()
        if tok.startswith("'"):
            return const(self._symbol(tok))
        if not re.match(r"[A-Za-z_]", tok):
            raise FofSyntaxError(f"expected a term, got {tok!r}")
        if tok[0].isupper() or tok[0] == "_":
            return var(tok)
        return const(self._symbol(tok))

    def atom(self) -> Formula:
        first = self._term()
        if self.peek() == "(" and not first.is_var:
            self.next()
            args = [self._term()]
            while self.peek() == ",":
                self.next()
                args.append(self._term())
            self.expect(")")
            pred = first.name
            return Atom(pred, tuple(args))
        if self.peek() == "=":
            self.next()
            rhs = self._term()
            return Atom("=", (first, rhs))
        raise FofSyntaxError(f"dangling term {first.name!r}")


def parse_fof_document(text: str, prefix: str = "") -> ProblemDocument:
    """Parse a FOF problem document emitted by this package.

    ``prefix`` is the symbol prefix used at emission time; it is stripped
    from every constant and predicate symbol so callers recover the
    original SUMO names.
    """
    return _Parser(text, prefix).document()


def parse_fof_formula(text: str, prefix: str = "") -> Formula:
    """Parse a bare FOF formula (used by tests)."""
    parser = _Parser(text, prefix)
    formula = parser.formula()
    if parser.peek() is not None:
        raise FofSyntaxError(f"trailing tokens after formula: {parser.peek()!r}")
    return formula
