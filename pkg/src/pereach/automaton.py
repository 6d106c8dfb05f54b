"""Regular path patterns and their query automata.

Pattern grammar (whitespace separates tokens, juxtaposition is
concatenation)::

    expr   := concat ('|' concat)*
    concat := repeat+
    repeat := atom '*'?
    atom   := LABEL | '_' | '(' expr ')' | '()'

``_`` matches any label, ``()`` is the empty word. The automaton is the
position construction: start and final states plus one state per
label/wildcard occurrence, no epsilon states in between. Start and final
are matched against the query endpoints by identity, interior states
against node labels; a direct start-to-final transition records that the
empty word lies in the language.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass


class RegexParseError(ValueError):
    """A pattern does not conform to the grammar."""


@dataclass(frozen=True)
class Epsilon:
    pass


@dataclass(frozen=True)
class Atom:
    label: str


@dataclass(frozen=True)
class Wildcard:
    pass


@dataclass(frozen=True)
class Concat:
    left: "RegexAst"
    right: "RegexAst"


@dataclass(frozen=True)
class Union:
    left: "RegexAst"
    right: "RegexAst"


@dataclass(frozen=True)
class Star:
    inner: "RegexAst"


RegexAst = Epsilon | Atom | Wildcard | Concat | Union | Star

_PUNCT = "|*()"


def _tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    word = ""
    for ch in text:
        if ch.isspace() or ch in _PUNCT:
            if word:
                tokens.append(word)
                word = ""
            if ch in _PUNCT:
                tokens.append(ch)
        else:
            word += ch
    if word:
        tokens.append(word)
    return tokens


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise RegexParseError("unexpected end of pattern")
        self.pos += 1
        return tok

    def parse_expr(self) -> RegexAst:
        node = self.parse_concat()
        while self.peek() == "|":
            self.take()
            node = Union(node, self.parse_concat())
        return node

    def parse_concat(self) -> RegexAst:
        items = []
        while self.peek() is not None and self.peek() not in ("|", ")", "*"):
            items.append(self.parse_repeat())
        if not items:
            tok = self.peek()
            if tok is None or tok == "|" or tok == ")":
                raise RegexParseError("empty alternation branch or group")
            raise RegexParseError(f"stray operator {tok!r}")
        node = items[0]
        for item in items[1:]:
            node = Concat(node, item)
        return node

    def parse_repeat(self) -> RegexAst:
        node = self.parse_atom()
        if self.peek() == "*":
            self.take()
            node = Star(node)
        return node

    def parse_atom(self) -> RegexAst:
        tok = self.take()
        if tok == "(":
            if self.peek() == ")":
                self.take()
                return Epsilon()
            node = self.parse_expr()
            if self.peek() != ")":
                raise RegexParseError("unbalanced parentheses")
            self.take()
            return node
        if tok == "_":
            return Wildcard()
        if tok in _PUNCT:
            raise RegexParseError(f"stray operator {tok!r}")
        return Atom(tok)


def parse_regex(text: str) -> RegexAst:
    tokens = _tokenize(text)
    if not tokens:
        raise RegexParseError("empty pattern")
    parser = _Parser(tokens)
    node = parser.parse_expr()
    if parser.peek() is not None:
        raise RegexParseError(f"stray operator {parser.peek()!r}")
    return node


def format_regex(ast: RegexAst) -> str:
    """Render an AST back to pattern text; parses to an equal AST."""
    if isinstance(ast, Epsilon):
        return "()"
    if isinstance(ast, Atom):
        return ast.label
    if isinstance(ast, Wildcard):
        return "_"
    if isinstance(ast, Star):
        inner = format_regex(ast.inner)
        if isinstance(ast.inner, (Atom, Wildcard, Epsilon)):
            return inner + "*"
        return "(" + inner + ")*"
    if isinstance(ast, Concat):
        # parenthesize so the left-associative reparse rebuilds this shape
        left = format_regex(ast.left)
        if isinstance(ast.left, Union):
            left = "(" + left + ")"
        right = format_regex(ast.right)
        if isinstance(ast.right, (Union, Concat)):
            right = "(" + right + ")"
        return left + " " + right
    if isinstance(ast, Union):
        right = format_regex(ast.right)
        if isinstance(ast.right, Union):
            right = "(" + right + ")"
        return format_regex(ast.left) + " | " + right
    raise TypeError(f"not a regex AST node: {ast!r}")


StateId = int

#: States 0 and 1 are reserved for start and final.
START: StateId = 0
FINAL: StateId = 1


@dataclass(frozen=True)
class QueryAutomaton:
    """Epsilon-free position automaton for a pattern.

    ``state_label`` maps interior states to the label they match, with
    None standing for the wildcard. Start and final carry no label; a
    (START, FINAL) transition means the empty word is accepted.
    """

    states: tuple[StateId, ...]
    transitions: frozenset[tuple[StateId, StateId]]
    state_label: Mapping[StateId, str | None]
    start: StateId = START
    final: StateId = FINAL

    def __post_init__(self) -> None:
        out: dict[StateId, list[StateId]] = {u: [] for u in self.states}
        for p, v in sorted(self.transitions):
            out[p].append(v)
        object.__setattr__(self, "_out", {u: tuple(vs) for u, vs in out.items()})

    def successor_states(self, u: StateId) -> tuple[StateId, ...]:
        return self._out[u]  # type: ignore[attr-defined]


def _analyze(ast: RegexAst, labels: list[str | None]) -> tuple[bool, list[int], list[int], set[tuple[int, int]]]:
    """Nullable/first/last/follow with positions numbered left to right."""
    if isinstance(ast, Epsilon):
        return True, [], [], set()
    if isinstance(ast, (Atom, Wildcard)):
        labels.append(ast.label if isinstance(ast, Atom) else None)
        p = len(labels) - 1 + 2  # interior states start at 2
        return False, [p], [p], set()
    if isinstance(ast, Star):
        n, first, last, follow = _analyze(ast.inner, labels)
        follow = follow | {(p, q) for p in last for q in first}
        return True, first, last, follow
    if isinstance(ast, Concat):
        ln, lf, ll, lfol = _analyze(ast.left, labels)
        rn, rf, rl, rfol = _analyze(ast.right, labels)
        follow = lfol | rfol | {(p, q) for p in ll for q in rf}
        first = lf + rf if ln else lf
        last = rl + ll if rn else rl
        return ln and rn, first, last, follow
    if isinstance(ast, Union):
        ln, lf, ll, lfol = _analyze(ast.left, labels)
        rn, rf, rl, rfol = _analyze(ast.right, labels)
        return ln or rn, lf + rf, ll + rl, lfol | rfol
    raise TypeError(f"not a regex AST node: {ast!r}")


def build_query_automaton(ast: RegexAst) -> QueryAutomaton:
    labels: list[str | None] = []
    nullable, first, last, follow = _analyze(ast, labels)
    transitions = {(START, p) for p in first}
    transitions |= set(follow)
    transitions |= {(p, FINAL) for p in last}
    if nullable:
        transitions.add((START, FINAL))
    states = (START, FINAL) + tuple(range(2, 2 + len(labels)))
    state_label = {p + 2: lbl for p, lbl in enumerate(labels)}
    return QueryAutomaton(states, frozenset(transitions), state_label)


def step_states(a: QueryAutomaton, current: frozenset[StateId], label: str) -> frozenset[StateId]:
    """One simulation step: interior successors whose label matches."""
    nxt = set()
    for u in current:
        for v in a.successor_states(u):
            if v == a.final:
                continue
            lbl = a.state_label[v]
            if lbl is None or lbl == label:
                nxt.add(v)
    return frozenset(nxt)


def is_accepting(a: QueryAutomaton, current: frozenset[StateId]) -> bool:
    return any((u, a.final) in a.transitions for u in current)


def accepts(a: QueryAutomaton, labels: list[str] | tuple[str, ...]) -> bool:
    """Simulate the automaton on a label sequence."""
    current = frozenset({a.start})
    for label in labels:
        current = step_states(a, current, label)
        if not current:
            return False
    return is_accepting(a, current)
