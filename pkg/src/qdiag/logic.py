"""Propositional sentences, parsing, CNF conversion, and a DPLL-backed reasoner."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

__all__ = [
    "Formula",
    "Atom",
    "Not",
    "And",
    "Or",
    "Implies",
    "KnowledgeBase",
    "FormulaSyntaxError",
    "InconsistentKBError",
    "EntailmentType",
    "InferenceCounter",
    "Reasoner",
    "parse_formula",
    "format_formula",
    "atoms_of",
    "kb_atoms",
    "clausify",
    "kb_clauses",
    "literal_cost",
    "cnf_satisfiable",
]

_ATOM_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class FormulaSyntaxError(ValueError):
    """Malformed formula text; ``position`` is the 0-based offset of the problem."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class InconsistentKBError(ValueError):
    """Entailment enumeration was asked to run over an unsatisfiable KB."""


class Formula:
    """Immutable propositional sentence; subclasses form the AST."""

    __slots__ = ()

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str

    def __post_init__(self) -> None:
        if not _ATOM_RE.match(self.name):
            raise ValueError(f"invalid atom name: {self.name!r}")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Not(Formula):
    operand: Formula

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return format_formula(self)


KnowledgeBase = frozenset[Formula]


# ---------------------------------------------------------------------------
# Parsing.  Grammar (whitespace insignificant, ASCII only):
#   impl  := or ('->' impl)?          right-associative
#   or    := and ('|' and)*
#   and   := unary ('&' unary)*
#   unary := '!' unary | atom | '(' impl ')'
# Precedence: ! > & > | > ->
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"(?P<ws>\s+)|(?P<atom>[A-Za-z_][A-Za-z0-9_]*)|(?P<arrow>->)|(?P<punct>[!&|()])")


def _tokenize(text: str) -> Iterator[tuple[str, str, int]]:
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        pos = m.end()
        if m.lastgroup == "ws":
            continue
        yield m.lastgroup, m.group(), m.start()
    yield "end", "", len(text)


class _Parser:
    def __init__(self, text: str):
        self._tokens = list(_tokenize(text))
        self._index = 0

    def _peek(self) -> tuple[str, str, int]:
        return self._tokens[self._index]

    def _next(self) -> tuple[str, str, int]:
        tok = self._tokens[self._index]
        self._index += 1
        return tok

    def parse(self) -> Formula:
        expr = self._implication()
        kind, value, pos = self._peek()
        if kind != "end":
            raise FormulaSyntaxError(f"unexpected token {value!r}", pos)
        return expr

    def _implication(self) -> Formula:
        left = self._disjunction()
        kind, _, _ = self._peek()
        if kind == "arrow":
            self._next()
            return Implies(left, self._implication())
        return left

    def _disjunction(self) -> Formula:
        expr = self._conjunction()
        while self._peek()[1] == "|":
            self._next()
            expr = Or(expr, self._conjunction())
        return expr

    def _conjunction(self) -> Formula:
        expr = self._unary()
        while self._peek()[1] == "&":
            self._next()
            expr = And(expr, self._unary())
        return expr

    def _unary(self) -> Formula:
        kind, value, pos = self._next()
        if value == "!":
            return Not(self._unary())
        if kind == "atom":
            return Atom(value)
        if value == "(":
            expr = self._implication()
            kind, value, pos = self._next()
            if value != ")":
                raise FormulaSyntaxError("expected ')'", pos)
            return expr
        if kind == "end":
            raise FormulaSyntaxError("unexpected end of input", pos)
        raise FormulaSyntaxError(f"unexpected token {value!r}", pos)


def parse_formula(text: str) -> Formula:
    """Parse a sentence in the ASCII grammar (atoms, ``!``, ``&``, ``|``, ``->``)."""
    if not text.isascii():
        offset = next(i for i, ch in enumerate(text) if not ch.isascii())
        raise FormulaSyntaxError("non-ASCII input", offset)
    if not text.strip():
        raise FormulaSyntaxError("empty input", 0)
    return _Parser(text).parse()


def format_formula(formula: Formula) -> str:
    """Render with minimal parentheses; ``parse_formula`` inverts this exactly."""
    return _format(formula, 0)


def _format(f: Formula, need: int) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        text, prec = "!" + _format(f.operand, 4), 4
    elif isinstance(f, And):
        text, prec = _format(f.left, 3) + " & " + _format(f.right, 4), 3
    elif isinstance(f, Or):
        text, prec = _format(f.left, 2) + " | " + _format(f.right, 3), 2
    elif isinstance(f, Implies):
        text, prec = _format(f.left, 2) + " -> " + _format(f.right, 1), 1
    else:  # pragma: no cover - exhaustive over subclasses
        raise TypeError(f"not a formula: {f!r}")
    return f"({text})" if prec < need else text


def atoms_of(formula: Formula) -> frozenset[str]:
    """All atom names occurring in the formula."""
    out: set[str] = set()
    stack = [formula]
    while stack:
        f = stack.pop()
        if isinstance(f, Atom):
            out.add(f.name)
        elif isinstance(f, Not):
            stack.append(f.operand)
        else:
            stack.append(f.left)  # type: ignore[attr-defined]
            stack.append(f.right)  # type: ignore[attr-defined]
    return frozenset(out)


def kb_atoms(kb: Iterable[Formula]) -> frozenset[str]:
    out: set[str] = set()
    for f in kb:
        out |= atoms_of(f)
    return frozenset(out)


# ---------------------------------------------------------------------------
# Clausal form.  Literals are (atom, positive) pairs; a clause is a frozenset
# of literals.  Conversion is plain NNF + distribution, no renaming, so the
# clausal form of a sentence is a deterministic function of its AST.
# ---------------------------------------------------------------------------

Literal = tuple[str, bool]
Clause = frozenset[Literal]


def clausify(formula: Formula) -> frozenset[Clause]:
    return frozenset(_cnf(formula, True))


def _cnf(f: Formula, polarity: bool) -> set[Clause]:
    if isinstance(f, Atom):
        return {frozenset([(f.name, polarity)])}
    if isinstance(f, Not):
        return _cnf(f.operand, not polarity)
    if isinstance(f, Implies):
        f = Or(Not(f.left), f.right)
    conjunctive = isinstance(f, And) if polarity else isinstance(f, Or)
    left = _cnf(f.left, polarity)
    right = _cnf(f.right, polarity)
    if conjunctive:
        return left | right
    return {a | b for a in left for b in right}


def kb_clauses(kb: Iterable[Formula]) -> frozenset[Clause]:
    out: set[Clause] = set()
    for f in kb:
        out |= clausify(f)
    return frozenset(out)


def literal_cost(formula: Formula) -> int:
    """Number of distinct literals in the clausal form (always >= 1)."""
    return len({lit for clause in clausify(formula) for lit in clause})


def cnf_satisfiable(clauses: Iterable[Clause]) -> bool:
    """DPLL satisfiability over a clause set; complete at this scale."""
    work = [c for c in clauses if not _tautological(c)]
    return _dpll(work, {})


def _tautological(clause: Clause) -> bool:
    return any((name, not pos) in clause for name, pos in clause)


def _dpll(clauses: list[Clause], assignment: dict[str, bool]) -> bool:
    while True:
        simplified: list[Clause] = []
        unit: Literal | None = None
        for clause in clauses:
            reduced = _reduce(clause, assignment)
            if reduced is None:
                continue
            if not reduced:
                return False
            if len(reduced) == 1 and unit is None:
                unit = next(iter(reduced))
            simplified.append(reduced)
        if not simplified:
            return True
        if unit is None:
            break
        assignment = dict(assignment)
        assignment[unit[0]] = unit[1]
        clauses = simplified

    # Pure literal elimination.
    polarity: dict[str, set[bool]] = {}
    for clause in simplified:
        for name, pos in clause:
            polarity.setdefault(name, set()).add(pos)
    pures = {name: signs.pop() for name, signs in polarity.items() if len(signs) == 1}
    if pures:
        assignment = dict(assignment)
        assignment.update(pures)
        remaining = [c for c in simplified if not any(pures.get(n) == p for n, p in c)]
        if not remaining:
            return True
        simplified = remaining

    name, _ = min((lit for lit in min(simplified, key=len)), key=lambda l: l[0])
    for value in (True, False):
        branch = dict(assignment)
        branch[name] = value
        if _dpll(simplified, branch):
            return True
    return False


def _reduce(clause: Clause, assignment: dict[str, bool]) -> Clause | None:
    """None if satisfied; otherwise the clause with falsified literals removed."""
    if not assignment:
        return clause
    kept: list[Literal] = []
    for name, pos in clause:
        value = assignment.get(name)
        if value is None:
            kept.append((name, pos))
        elif value == pos:
            return None
    return frozenset(kept)


# ---------------------------------------------------------------------------
# Reasoner: consistency, entailment, and typed entailment enumeration, with
# every satisfiability check counted.
# ---------------------------------------------------------------------------


class EntailmentType(Enum):
    """Candidate spaces for typed entailment enumeration."""

    ATOMS = "atoms"
    SINGLETON_BODY_DEFINITE = "defclause"


class InferenceCounter:
    """Monotone count of satisfiability checks, resettable between phases."""

    __slots__ = ("calls",)

    def __init__(self) -> None:
        self.calls = 0

    def bump(self) -> None:
        self.calls += 1

    def reset(self) -> None:
        self.calls = 0


class Reasoner:
    """Sound and complete propositional inference with call instrumentation.

    Each session should own its reasoner; instances share no state.
    """

    def __init__(self, counter: InferenceCounter | None = None):
        self.counter = counter if counter is not None else InferenceCounter()

    @property
    def calls(self) -> int:
        return self.counter.calls

    def is_consistent(self, kb: Iterable[Formula]) -> bool:
        """True iff the KB is satisfiable (the empty KB is)."""
        self.counter.bump()
        return cnf_satisfiable(kb_clauses(kb))

    def entails(self, kb: Iterable[Formula], sentences: Iterable[Formula]) -> bool:
        """True iff the KB entails every member, by refutation (one check each)."""
        base = set(kb_clauses(kb))
        for sentence in sentences:
            self.counter.bump()
            if cnf_satisfiable(base | clausify(Not(sentence))):
                return False
        return True

    def enumerate_entailments(
        self,
        kb: Iterable[Formula],
        entailment_types: Iterable[EntailmentType],
        vocabulary: Iterable[str] | None = None,
    ) -> frozenset[Formula]:
        """All entailed sentences of the requested shapes over the vocabulary.

        The vocabulary defaults to the atoms occurring in the KB.  Candidate
        generation plus one entailment test per candidate keeps the operator
        monotone in the KB for a fixed vocabulary.
        """
        kb = frozenset(kb)
        if not self.is_consistent(kb):
            raise InconsistentKBError("cannot enumerate entailments of an inconsistent KB")
        vocab = sorted(vocabulary) if vocabulary is not None else sorted(kb_atoms(kb))
        base = set(kb_clauses(kb))
        found: set[Formula] = set()
        types = set(entailment_types)
        if EntailmentType.ATOMS in types:
            for name in vocab:
                if self._entailed(base, Atom(name)):
                    found.add(Atom(name))
        if EntailmentType.SINGLETON_BODY_DEFINITE in types:
            for body in vocab:
                for head in vocab:
                    candidate = Implies(Atom(body), Atom(head))
                    if self._entailed(base, candidate):
                        found.add(candidate)
        return frozenset(found)

    def _entailed(self, base_clauses: set[Clause], sentence: Formula) -> bool:
        self.counter.bump()
        return not cnf_satisfiable(base_clauses | clausify(Not(sentence)))
