"""CTL* formulas: AST, parser, classification, normalization, printing.

Concrete syntax (ASCII; the Unicode aliases ``¬ ∧ ∨ →`` are accepted on
input only)::

    formula  := implies
    implies  := or ( "->" implies )?
    or       := and ( "|" and )*
    and      := untilR ( "&" untilR )*
    untilR   := unary ( ("U" | "R") untilR )?
    unary    := ("!" | "A" | "E" | "X" | "F" | "G") unary
              | "(" formula ")" | "true" | "false" | atom
    atom     := IDENT ( "=" IDENT )?

``A E X F G U R`` are reserved operator letters.  A bare word composed
solely of the unary ones is read as a stacked prefix, so ``AG p`` means
``A(G p)``.  Words mixing in ``U`` or ``R`` (which are binary) are
rejected rather than silently treated as atom names.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional


class FormulaSyntaxError(ValueError):
    """Parse failure with a 1-based character position.

    ``expected`` holds a frozenset of token descriptions that would have
    been acceptable at ``position``.
    """

    def __init__(self, message: str, position: int, expected: frozenset[str] = frozenset()):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.expected = expected


@dataclass(frozen=True)
class Formula:
    """Base class for CTL* AST nodes.  Instances are immutable and hashable."""

    __slots__ = ()


@dataclass(frozen=True)
class Atom(Formula):
    """Atomic proposition: a bare name ``p`` or an equality ``var=VALUE``."""

    value: str
    variable: Optional[str] = None

    def __post_init__(self):
        for part in (self.value, self.variable):
            if part is None:
                continue
            if not part or any(c.isspace() for c in part):
                raise ValueError(f"atom part must be a nonempty identifier: {part!r}")

    def text(self) -> str:
        if self.variable is None:
            return self.value
        return f"{self.variable}={self.value}"


@dataclass(frozen=True)
class TrueLit(Formula):
    pass


@dataclass(frozen=True)
class FalseLit(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    """Path quantifier E: some path from the current state satisfies the body."""

    operand: Formula


@dataclass(frozen=True)
class ForAll(Formula):
    """Path quantifier A: every path from the current state satisfies the body."""

    operand: Formula


@dataclass(frozen=True)
class Next(Formula):
    operand: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    operand: Formula


@dataclass(frozen=True)
class Always(Formula):
    operand: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Release(Formula):
    left: Formula
    right: Formula


TRUE = TrueLit()
FALSE = FalseLit()

_UNARY_CLASSES = (Not, Exists, ForAll, Next, Eventually, Always)
_BINARY_CLASSES = (And, Or, Implies, Until, Release)


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, _UNARY_CLASSES):
        return (f.operand,)
    if isinstance(f, _BINARY_CLASSES):
        return (f.left, f.right)
    return ()


def atom_from_text(text: str) -> Atom:
    """Parse a label string, either ``p`` or ``var=VALUE``."""
    if "=" in text:
        var, _, value = text.partition("=")
        return Atom(value=value.strip(), variable=var.strip())
    return Atom(value=text.strip())


# -- classification ----------------------------------------------------------

class Classification(Enum):
    STATE = "StateFormula"
    PATH = "PathFormula"
    ILLFORMED = "Illformed"


def classify(f: Formula) -> Classification:
    """State/path status of a formula.

    Every state formula is also a path formula; ``STATE`` is reported for
    those.  ``ILLFORMED`` only arises for hand-built trees with non-formula
    children.
    """
    if _is_state(f):
        return Classification.STATE
    if _is_path(f):
        return Classification.PATH
    return Classification.ILLFORMED


def _is_state(f: Formula) -> bool:
    if isinstance(f, (Atom, TrueLit, FalseLit)):
        return True
    if isinstance(f, Not):
        return _is_state(f.operand)
    if isinstance(f, (And, Or, Implies)):
        return _is_state(f.left) and _is_state(f.right)
    if isinstance(f, (Exists, ForAll)):
        return _is_path(f.operand)
    return False


def _is_path(f: Formula) -> bool:
    if isinstance(f, (Atom, TrueLit, FalseLit)):
        return True
    if isinstance(f, (Not, Next, Eventually, Always)):
        return _is_path(f.operand)
    if isinstance(f, (And, Or, Implies, Until, Release)):
        return _is_path(f.left) and _is_path(f.right)
    if isinstance(f, (Exists, ForAll)):
        return _is_path(f.operand)
    return False


def is_ctl(f: Formula) -> bool:
    """True when f lies in the CTL fragment: every temporal operator is
    immediately under a path quantifier and quantifies state operands."""
    return _ctl_state(f)


def _ctl_state(f: Formula) -> bool:
    if isinstance(f, (Atom, TrueLit, FalseLit)):
        return True
    if isinstance(f, Not):
        return _ctl_state(f.operand)
    if isinstance(f, (And, Or, Implies)):
        return _ctl_state(f.left) and _ctl_state(f.right)
    if isinstance(f, (Exists, ForAll)):
        body = f.operand
        if isinstance(body, (Next, Eventually, Always)):
            return _ctl_state(body.operand)
        if isinstance(body, (Until, Release)):
            return _ctl_state(body.left) and _ctl_state(body.right)
        return False
    return False


# -- normalization -----------------------------------------------------------

def _neg(f: Formula) -> Formula:
    # builds !f, cancelling a leading negation so !!g never appears
    if isinstance(f, Not):
        return f.operand
    return Not(f)


def normalize(f: Formula) -> Formula:
    """Rewrite into the core basis {atom, true, !, &, E, X, U}.

    Derived operators are expanded (F g = true U g, G g = !(true U !g),
    g R h = !(!g U !h), A g = !E!g, or/implies via De Morgan) and double
    negations are removed.
    """
    if isinstance(f, (Atom, TrueLit)):
        return f
    if isinstance(f, FalseLit):
        return Not(TRUE)
    if isinstance(f, Not):
        return _neg(normalize(f.operand))
    if isinstance(f, And):
        return And(normalize(f.left), normalize(f.right))
    if isinstance(f, Or):
        return _neg(And(_neg(normalize(f.left)), _neg(normalize(f.right))))
    if isinstance(f, Implies):
        return _neg(And(normalize(f.left), _neg(normalize(f.right))))
    if isinstance(f, Exists):
        return Exists(normalize(f.operand))
    if isinstance(f, ForAll):
        return _neg(Exists(_neg(normalize(f.operand))))
    if isinstance(f, Next):
        return Next(normalize(f.operand))
    if isinstance(f, Until):
        return Until(normalize(f.left), normalize(f.right))
    if isinstance(f, Eventually):
        return Until(TRUE, normalize(f.operand))
    if isinstance(f, Always):
        return _neg(Until(TRUE, _neg(normalize(f.operand))))
    if isinstance(f, Release):
        return _neg(Until(_neg(normalize(f.left)), _neg(normalize(f.right))))
    raise TypeError(f"not a formula: {f!r}")


# -- printing ----------------------------------------------------------------

_LEVEL_IMPLIES = 1
_LEVEL_OR = 2
_LEVEL_AND = 3
_LEVEL_UNTIL = 4
_LEVEL_UNARY = 5
_LEVEL_ATOM = 6


def _level(f: Formula) -> int:
    if isinstance(f, (Atom, TrueLit, FalseLit)):
        return _LEVEL_ATOM
    if isinstance(f, _UNARY_CLASSES):
        return _LEVEL_UNARY
    if isinstance(f, (Until, Release)):
        return _LEVEL_UNTIL
    if isinstance(f, And):
        return _LEVEL_AND
    if isinstance(f, Or):
        return _LEVEL_OR
    return _LEVEL_IMPLIES


def pretty(f: Formula) -> str:
    """Minimal-parenthesis rendering that reparses to an equal AST.

    Path quantifiers always parenthesize their body (``E(F p)``); other
    chains rely on precedence and associativity.
    """
    return _fmt(f, 0)


def _fmt(f: Formula, min_level: int) -> str:
    text = _fmt_bare(f)
    if _level(f) < min_level:
        return f"({text})"
    return text


def _fmt_bare(f: Formula) -> str:
    if isinstance(f, Atom):
        return f.text()
    if isinstance(f, TrueLit):
        return "true"
    if isinstance(f, FalseLit):
        return "false"
    if isinstance(f, Not):
        return "!" + _fmt(f.operand, _LEVEL_UNARY)
    if isinstance(f, Exists):
        return f"E({_fmt(f.operand, 0)})"
    if isinstance(f, ForAll):
        return f"A({_fmt(f.operand, 0)})"
    if isinstance(f, Next):
        return "X " + _fmt(f.operand, _LEVEL_UNARY)
    if isinstance(f, Eventually):
        return "F " + _fmt(f.operand, _LEVEL_UNARY)
    if isinstance(f, Always):
        return "G " + _fmt(f.operand, _LEVEL_UNARY)
    if isinstance(f, Until):
        return _fmt(f.left, _LEVEL_UNARY) + " U " + _fmt(f.right, _LEVEL_UNTIL)
    if isinstance(f, Release):
        return _fmt(f.left, _LEVEL_UNARY) + " R " + _fmt(f.right, _LEVEL_UNTIL)
    if isinstance(f, And):
        return _fmt(f.left, _LEVEL_AND) + " & " + _fmt(f.right, _LEVEL_AND + 1)
    if isinstance(f, Or):
        return _fmt(f.left, _LEVEL_OR) + " | " + _fmt(f.right, _LEVEL_OR + 1)
    if isinstance(f, Implies):
        return _fmt(f.left, _LEVEL_IMPLIES + 1) + " -> " + _fmt(f.right, _LEVEL_IMPLIES)
    raise TypeError(f"not a formula: {f!r}")


# -- parsing -----------------------------------------------------------------

_UNARY_LETTERS = "AEXFG"
_OPERATOR_LETTERS = set("AEXFGUR")

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<arrow>->|→)"
    r"|(?P<not>!|¬)"
    r"|(?P<and>&|∧)"
    r"|(?P<or>\||∨)"
    r"|(?P<lparen>\()"
    r"|(?P<rparen>\))"
    r"|(?P<eq>=)"
    r"|(?P<word>[A-Za-z_][A-Za-z0-9_.]*)"
)

_OPERAND_EXPECTED = frozenset(
    {"(", "!", "A", "E", "X", "F", "G", "true", "false", "identifier"}
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    pos: int  # 1-based offset of the first character


def _lex(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[i]!r}", i + 1)
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), i + 1))
        i = m.end()
    tokens.append(_Token("end", "", len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self._tokens = tokens
        self._index = 0

    def _peek(self) -> _Token:
        return self._tokens[self._index]

    def _advance(self) -> _Token:
        tok = self._tokens[self._index]
        self._index += 1
        return tok

    def _fail(self, message: str, expected: frozenset[str]) -> FormulaSyntaxError:
        tok = self._peek()
        shown = tok.text if tok.kind != "end" else "end of input"
        return FormulaSyntaxError(f"{message}, found {shown!r}" if tok.kind != "end"
                                  else f"{message}, found end of input",
                                  tok.pos, expected)

    def formula(self) -> Formula:
        left = self.disjunction()
        if self._peek().kind == "arrow":
            self._advance()
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        node = self.conjunction()
        while self._peek().kind == "or":
            self._advance()
            node = Or(node, self.conjunction())
        return node

    def conjunction(self) -> Formula:
        node = self.until_release()
        while self._peek().kind == "and":
            self._advance()
            node = And(node, self.until_release())
        return node

    def until_release(self) -> Formula:
        left = self.unary()
        tok = self._peek()
        if tok.kind == "word" and tok.text in ("U", "R"):
            self._advance()
            right = self.until_release()
            return Until(left, right) if tok.text == "U" else Release(left, right)
        return left

    def unary(self) -> Formula:
        tok = self._peek()
        if tok.kind == "not":
            self._advance()
            return Not(self.unary())
        if tok.kind == "lparen":
            self._advance()
            inner = self.formula()
            if self._peek().kind != "rparen":
                raise self._fail("expected ')'", frozenset({")"}))
            self._advance()
            return inner
        if tok.kind == "word":
            if tok.text == "true":
                self._advance()
                return TRUE
            if tok.text == "false":
                self._advance()
                return FALSE
            if all(c in _UNARY_LETTERS for c in tok.text):
                self._advance()
                node = self.unary()
                for letter in reversed(tok.text):
                    node = _UNARY_BY_LETTER[letter](node)
                return node
            if all(c in _OPERATOR_LETTERS for c in tok.text):
                # contains U or R, which are binary and cannot open an operand
                raise self._fail(
                    f"operator letters {tok.text!r} cannot start an operand",
                    _OPERAND_EXPECTED,
                )
            return self.atom()
        raise self._fail("expected an operand", _OPERAND_EXPECTED)

    def atom(self) -> Atom:
        name = self._advance()
        if self._peek().kind == "eq":
            self._advance()
            value = self._peek()
            if value.kind != "word":
                raise self._fail("expected a value after '='", frozenset({"identifier"}))
            self._advance()
            return Atom(value=value.text, variable=name.text)
        return Atom(value=name.text)

    def expect_end(self) -> None:
        if self._peek().kind != "end":
            raise self._fail("trailing input after formula", frozenset({"end of input"}))


_UNARY_BY_LETTER = {
    "A": ForAll,
    "E": Exists,
    "X": Next,
    "F": Eventually,
    "G": Always,
}


def parse_formula(text: str) -> Formula:
    """Parse concrete syntax into an AST; raises FormulaSyntaxError."""
    parser = _Parser(_lex(text))
    node = parser.formula()
    parser.expect_end()
    return node


def subformulas(f: Formula) -> Iterator[Formula]:
    """Yield f and all descendants, preorder."""
    yield f
    for child in children(f):
        yield from subformulas(child)
