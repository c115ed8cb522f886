"""Lexing, parsing, and printing of first-order logic over nine operators.

The operator alphabet is fixed: and, or, not, implies, iff, forall, exists,
equality, and exclusive-or.  Formulas are immutable trees; all functions here
are pure.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class LexError(ValueError):
    """Unrecognized glyph in the source text."""

    def __init__(self, message: str, span: tuple[int, int]):
        super().__init__(f"{message} at bytes {span[0]}..{span[1]}")
        self.message = message
        self.span = span


class ParseError(ValueError):
    def __init__(self, message: str, span: tuple[int, int] | None = None,
                 expected: frozenset[str] = frozenset()):
        detail = message
        if span is not None:
            detail += f" at bytes {span[0]}..{span[1]}"
        if expected:
            detail += f" (expected one of: {', '.join(sorted(expected))})"
        super().__init__(detail)
        self.message = message
        self.span = span
        self.expected = expected


class UnbalancedParens(ParseError):
    pass


class DanglingQuantifier(ParseError):
    """Quantifier with no parseable body."""


class TokenKind(enum.Enum):
    QUANTIFIER = "quantifier"
    CONNECTIVE = "connective"
    NEGATION = "negation"
    EQUALITY = "equality"
    XOR = "xor"
    IDENTIFIER = "identifier"
    VARIABLE = "variable"
    CONSTANT = "constant"
    LPAREN = "lparen"
    RPAREN = "rparen"
    COMMA = "comma"


WORD_KINDS = (TokenKind.IDENTIFIER, TokenKind.VARIABLE, TokenKind.CONSTANT)


@dataclass(frozen=True, slots=True)
class Token:
    kind: TokenKind
    text: str
    span: tuple[int, int]  # byte offsets into the utf-8 source


class Operator(enum.Enum):
    """The nine operator kinds, with their unicode and ascii spellings."""

    FORALL = ("∀", "forall")
    EXISTS = ("∃", "exists")
    NOT = ("¬", "~")
    AND = ("∧", "&")
    OR = ("∨", "|")
    IMPLIES = ("→", "->")
    IFF = ("↔", "<->")
    XOR = ("⊕", "xor")
    EQUALS = ("=", "=")

    @property
    def glyph(self) -> str:
        return self.value[0]

    @property
    def ascii_text(self) -> str:
        return self.value[1]


_UNICODE_OPS = {
    "∀": (TokenKind.QUANTIFIER, Operator.FORALL),
    "∃": (TokenKind.QUANTIFIER, Operator.EXISTS),
    "¬": (TokenKind.NEGATION, Operator.NOT),
    "∧": (TokenKind.CONNECTIVE, Operator.AND),
    "∨": (TokenKind.CONNECTIVE, Operator.OR),
    "→": (TokenKind.CONNECTIVE, Operator.IMPLIES),
    "↔": (TokenKind.CONNECTIVE, Operator.IFF),
    "⊕": (TokenKind.XOR, Operator.XOR),
}

_ASCII_KEYWORDS = {
    "forall": (TokenKind.QUANTIFIER, Operator.FORALL),
    "exists": (TokenKind.QUANTIFIER, Operator.EXISTS),
    "xor": (TokenKind.XOR, Operator.XOR),
}

# lexeme -> operator, for every spelling the lexer can emit
OPERATOR_OF_LEXEME = {op.glyph: op for op in Operator}
OPERATOR_OF_LEXEME.update({op.ascii_text: op for op in Operator})


def _is_word_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_word_char(ch: str) -> bool:
    return ch.isalnum() or ch in "_'"


def _classify_word(word: str) -> TokenKind:
    # Single lowercase letter (optionally digit-suffixed) lexes as a variable;
    # final variable/constant status is settled by the parser's binding rule.
    if word[0].islower() and (len(word) == 1 or word[1:].isdigit()):
        return TokenKind.VARIABLE
    return TokenKind.IDENTIFIER


def tokenize(source: str, notation: str = "mixed") -> list[Token]:
    """Split FOL source text into tokens.

    ``notation`` selects which operator spellings are recognized: "unicode"
    (glyphs only), "ascii" (keywords and punctuation aliases only), or "mixed"
    (both, the default).  Anything else in operator position is a LexError.
    """
    if notation not in ("unicode", "ascii", "mixed"):
        raise ValueError(f"unknown notation: {notation!r}")
    allow_uni = notation in ("unicode", "mixed")
    allow_ascii = notation in ("ascii", "mixed")

    tokens: list[Token] = []
    i = 0
    byte_pos = 0
    n = len(source)

    def push(kind: TokenKind, text: str, start_b: int, end_b: int) -> None:
        tokens.append(Token(kind, text, (start_b, end_b)))

    while i < n:
        ch = source[i]
        blen = len(ch.encode("utf-8"))
        if ch.isspace():
            i += 1
            byte_pos += blen
            continue
        start_b = byte_pos
        if ch == "(":
            push(TokenKind.LPAREN, ch, start_b, start_b + 1)
            i += 1
            byte_pos += 1
            continue
        if ch == ")":
            push(TokenKind.RPAREN, ch, start_b, start_b + 1)
            i += 1
            byte_pos += 1
            continue
        if ch == ",":
            push(TokenKind.COMMA, ch, start_b, start_b + 1)
            i += 1
            byte_pos += 1
            continue
        if ch == "=":
            push(TokenKind.EQUALITY, ch, start_b, start_b + 1)
            i += 1
            byte_pos += 1
            continue
        if ch in _UNICODE_OPS:
            if not allow_uni:
                raise LexError(f"unicode operator {ch!r} not allowed under ascii notation",
                               (start_b, start_b + blen))
            kind, _op = _UNICODE_OPS[ch]
            push(kind, ch, start_b, start_b + blen)
            i += 1
            byte_pos += blen
            continue
        if allow_ascii and ch == "-" and source.startswith("->", i):
            push(TokenKind.CONNECTIVE, "->", start_b, start_b + 2)
            i += 2
            byte_pos += 2
            continue
        if allow_ascii and ch == "<" and source.startswith("<->", i):
            push(TokenKind.CONNECTIVE, "<->", start_b, start_b + 3)
            i += 3
            byte_pos += 3
            continue
        if allow_ascii and ch in "&|~":
            kind = TokenKind.NEGATION if ch == "~" else TokenKind.CONNECTIVE
            push(kind, ch, start_b, start_b + 1)
            i += 1
            byte_pos += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            word = source[i:j]
            push(TokenKind.CONSTANT, word, start_b, start_b + len(word))
            i = j
            byte_pos += len(word)
            continue
        if _is_word_start(ch):
            j = i
            while j < n and _is_word_char(source[j]):
                j += 1
            word = source[i:j]
            wbytes = len(word.encode("utf-8"))
            if allow_ascii and word in _ASCII_KEYWORDS:
                kind, _op = _ASCII_KEYWORDS[word]
                push(kind, word, start_b, start_b + wbytes)
            else:
                push(_classify_word(word), word, start_b, start_b + wbytes)
            i = j
            byte_pos += wbytes
            continue
        raise LexError(f"unrecognized glyph {ch!r}", (start_b, start_b + blen))
    return tokens


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

class Term:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str


@dataclass(frozen=True, slots=True)
class Const(Term):
    name: str


@dataclass(frozen=True, slots=True)
class Func(Term):
    name: str
    args: tuple[Term, ...]


class Formula:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True, slots=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True, slots=True)
class Iff(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True, slots=True)
class Xor(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True, slots=True)
class Equals(Formula):
    lhs: Term
    rhs: Term


@dataclass(frozen=True, slots=True)
class ForAll(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class Exists(Formula):
    var: str
    body: Formula


BINARY_TYPES = (And, Or, Implies, Iff, Xor)
QUANTIFIER_TYPES = (ForAll, Exists)

OPERATOR_OF_NODE = {
    ForAll: Operator.FORALL,
    Exists: Operator.EXISTS,
    Not: Operator.NOT,
    And: Operator.AND,
    Or: Operator.OR,
    Implies: Operator.IMPLIES,
    Iff: Operator.IFF,
    Xor: Operator.XOR,
    Equals: Operator.EQUALS,
}


def children(f: Formula) -> tuple[Formula, ...]:
    """Direct subformulas of ``f`` (terms are not formulas)."""
    if isinstance(f, BINARY_TYPES):
        return (f.lhs, f.rhs)
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, QUANTIFIER_TYPES):
        return (f.body,)
    return ()


def subformulas(f: Formula):
    """Pre-order iterator over ``f`` and every subformula."""
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def atoms(f: Formula) -> list[Atom]:
    """All Atom nodes of ``f`` in left-to-right (pre-order) order."""
    return [g for g in subformulas(f) if isinstance(g, Atom)]


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_SINGLE_LOWER = _classify_word  # reuse: VARIABLE iff single lowercase letter


def _is_free_variable_name(name: str) -> bool:
    return name[0].islower() and (len(name) == 1 or name[1:].isdigit())


class _Parser:
    """Recursive-descent parser.

    Precedence, loosest to tightest: implies/iff (right-assoc), or/xor
    (left-assoc), and (left-assoc), negation and quantifiers, atoms.
    Equality applies to terms only and never competes with connectives.
    """

    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.bound: list[str] = []

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self._end_span())
        self.pos += 1
        return tok

    def expect(self, kind: TokenKind, what: str) -> Token:
        tok = self.peek()
        if tok is None or tok.kind is not kind:
            span = tok.span if tok else self._end_span()
            if kind is TokenKind.RPAREN:
                raise UnbalancedParens("missing closing parenthesis", span)
            raise ParseError(f"expected {what}", span, frozenset({what}))
        self.pos += 1
        return tok

    def _end_span(self) -> tuple[int, int]:
        if self.tokens:
            end = self.tokens[-1].span[1]
            return (end, end)
        return (0, 0)

    def parse(self) -> Formula:
        if not self.tokens:
            raise ParseError("empty input", (0, 0))
        f = self.formula()
        trailing = self.peek()
        if trailing is not None:
            if trailing.kind is TokenKind.RPAREN:
                raise UnbalancedParens("unmatched closing parenthesis", trailing.span)
            raise ParseError(f"trailing input {trailing.text!r}", trailing.span)
        return f

    def formula(self) -> Formula:
        lhs = self.or_level()
        tok = self.peek()
        if tok is not None and tok.kind is TokenKind.CONNECTIVE:
            op = OPERATOR_OF_LEXEME[tok.text]
            if op in (Operator.IMPLIES, Operator.IFF):
                self.take()
                rhs = self.formula()  # right-associative
                return Implies(lhs, rhs) if op is Operator.IMPLIES else Iff(lhs, rhs)
        return lhs

    def or_level(self) -> Formula:
        lhs = self.and_level()
        while True:
            tok = self.peek()
            if tok is None:
                return lhs
            if tok.kind is TokenKind.XOR:
                self.take()
                lhs = Xor(lhs, self.and_level())
                continue
            if tok.kind is TokenKind.CONNECTIVE and OPERATOR_OF_LEXEME[tok.text] is Operator.OR:
                self.take()
                lhs = Or(lhs, self.and_level())
                continue
            return lhs

    def and_level(self) -> Formula:
        lhs = self.unary()
        while True:
            tok = self.peek()
            if (tok is not None and tok.kind is TokenKind.CONNECTIVE
                    and OPERATOR_OF_LEXEME[tok.text] is Operator.AND):
                self.take()
                lhs = And(lhs, self.unary())
                continue
            return lhs

    def unary(self) -> Formula:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self._end_span())
        if tok.kind is TokenKind.NEGATION:
            self.take()
            return Not(self.unary())
        if tok.kind is TokenKind.QUANTIFIER:
            return self.quantified(tok)
        return self.primary()

    def quantified(self, tok: Token) -> Formula:
        self.take()
        var_tok = self.peek()
        if var_tok is None or var_tok.kind not in WORD_KINDS:
            raise DanglingQuantifier("quantifier without a bound variable",
                                     var_tok.span if var_tok else self._end_span())
        self.take()
        nxt = self.peek()
        if nxt is None or nxt.kind is TokenKind.RPAREN:
            raise DanglingQuantifier("quantifier with no body",
                                     nxt.span if nxt else self._end_span())
        self.bound.append(var_tok.text)
        try:
            body = self.unary()
        finally:
            self.bound.pop()
        op = OPERATOR_OF_LEXEME[tok.text]
        return ForAll(var_tok.text, body) if op is Operator.FORALL else Exists(var_tok.text, body)

    def primary(self) -> Formula:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self._end_span())
        if tok.kind is TokenKind.LPAREN:
            self.take()
            inner = self.formula()
            self.expect(TokenKind.RPAREN, ")")
            return inner
        if tok.kind in WORD_KINDS:
            return self.atom_or_equality()
        raise ParseError(f"unexpected token {tok.text!r}", tok.span,
                         frozenset({"formula"}))

    def atom_or_equality(self) -> Formula:
        head = self.take()
        args: tuple[Term, ...] = ()
        applied = False
        if self.peek() is not None and self.peek().kind is TokenKind.LPAREN:
            applied = True
            args = self.arg_list()
        nxt = self.peek()
        if nxt is not None and nxt.kind is TokenKind.EQUALITY:
            self.take()
            lhs = Func(head.text, args) if applied else self.classify_term_name(head)
            rhs = self.term()
            return Equals(lhs, rhs)
        return Atom(head.text, args)

    def arg_list(self) -> tuple[Term, ...]:
        self.expect(TokenKind.LPAREN, "(")
        args: list[Term] = []
        if self.peek() is not None and self.peek().kind is TokenKind.RPAREN:
            self.take()
            return ()
        while True:
            args.append(self.term())
            nxt = self.peek()
            if nxt is None:
                raise UnbalancedParens("missing closing parenthesis", self._end_span())
            if nxt.kind is TokenKind.COMMA:
                self.take()
                continue
            if nxt.kind is TokenKind.RPAREN:
                self.take()
                return tuple(args)
            raise ParseError(f"unexpected token {nxt.text!r} in argument list",
                             nxt.span, frozenset({",", ")"}))

    def term(self) -> Term:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input, expected a term", self._end_span())
        if tok.kind not in WORD_KINDS:
            raise ParseError(f"expected a term, found {tok.text!r}", tok.span,
                             frozenset({"term"}))
        self.take()
        if self.peek() is not None and self.peek().kind is TokenKind.LPAREN:
            return Func(tok.text, self.arg_list())
        return self.classify_term_name(tok)

    def classify_term_name(self, tok: Token) -> Term:
        # Bound names and single lowercase letters are variables; everything
        # else in term position is a constant.
        if tok.text in self.bound or _is_free_variable_name(tok.text):
            return Var(tok.text)
        return Const(tok.text)


def parse(tokens: list[Token]) -> Formula:
    """Parse a token sequence into a Formula."""
    return _Parser(tokens).parse()


def parse_text(source: str, notation: str = "mixed") -> Formula:
    return parse(tokenize(source, notation))


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

_PREC_IMPL = 1   # implies, iff (right-assoc)
_PREC_OR = 2     # or, xor (left-assoc)
_PREC_AND = 3    # and (left-assoc)
_PREC_UNARY = 4  # not, quantifiers
_PREC_ATOM = 5   # atoms, equality


def _prec(f: Formula) -> int:
    if isinstance(f, (Implies, Iff)):
        return _PREC_IMPL
    if isinstance(f, (Or, Xor)):
        return _PREC_OR
    if isinstance(f, And):
        return _PREC_AND
    if isinstance(f, (Not,) + QUANTIFIER_TYPES):
        return _PREC_UNARY
    return _PREC_ATOM


def _op_text(op: Operator, notation: str) -> str:
    return op.glyph if notation == "unicode" else op.ascii_text


def print_term(t: Term) -> str:
    if isinstance(t, Func):
        return f"{t.name}({', '.join(print_term(a) for a in t.args)})"
    return t.name


def print_formula(f: Formula, notation: str = "unicode", parens: str = "minimal") -> str:
    """Render a formula with canonical spacing.

    ``parens`` is "minimal" (omit every parenthesis that precedence and
    associativity make redundant; quantifier bodies stay parenthesized) or
    "full" (parenthesize every compound subformula).
    """
    if notation not in ("unicode", "ascii"):
        raise ValueError(f"unknown notation: {notation!r}")
    if parens not in ("minimal", "full"):
        raise ValueError(f"unknown parens mode: {parens!r}")
    full = parens == "full"

    def wrap(child: Formula, min_prec: int) -> str:
        text = render(child)
        if full:
            return text if isinstance(child, (Atom,)) else f"({text})"
        return f"({text})" if _prec(child) < min_prec else text

    def render(g: Formula) -> str:
        if isinstance(g, Atom):
            if not g.args:
                return g.name
            return f"{g.name}({', '.join(print_term(a) for a in g.args)})"
        if isinstance(g, Equals):
            return f"{print_term(g.lhs)} = {print_term(g.rhs)}"
        if isinstance(g, Not):
            neg = _op_text(Operator.NOT, notation)
            return f"{neg}{wrap(g.body, _PREC_UNARY)}"
        if isinstance(g, QUANTIFIER_TYPES):
            op = OPERATOR_OF_NODE[type(g)]
            body = render(g.body)
            if notation == "unicode":
                return f"{op.glyph}{g.var} ({body})"
            return f"{op.ascii_text} {g.var} ({body})"
        op = OPERATOR_OF_NODE[type(g)]
        mine = _prec(g)
        if mine == _PREC_IMPL:
            lhs = wrap(g.lhs, mine + 1)   # same level on the left needs parens
            rhs = wrap(g.rhs, mine)       # right-assoc
        else:
            lhs = wrap(g.lhs, mine)       # left-assoc
            rhs = wrap(g.rhs, mine + 1)
        return f"{lhs} {_op_text(op, notation)} {rhs}"

    return render(f)


# ---------------------------------------------------------------------------
# Operator profile
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OperatorProfile:
    counts: dict[Operator, int]
    total: int


def profile(f: Formula) -> OperatorProfile:
    """Count operator nodes by kind; atoms contribute nothing."""
    counts: dict[Operator, int] = {}
    for node in subformulas(f):
        op = OPERATOR_OF_NODE.get(type(node))
        if op is not None:
            counts[op] = counts.get(op, 0) + 1
    return OperatorProfile(counts, sum(counts.values()))
