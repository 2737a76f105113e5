"""Terms, formulas and abstractions: AST, parser and canonical printer.

Surface syntax::

    terms     x   #c   g(t)   [s, t]   iota x. F   iota@ x. F   rest(t, F)
    atoms     P(t1, ..., tn)   s = t   s != t   s < t   (also > <= >=)   E(t)
    formulas  !F   F & G   F or G   F -> G   F <-> G
              forall x. F   exists x. F   forall@ x. F   exists@ x. F

``!`` binds tighter than ``&``, then ``or``, ``->`` (right-associative) and
``<->``.  Quantifier and description bodies extend as far right as possible.
``->`` and ``<->`` are sugar and never appear in the AST.
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass
from typing import Union

from .errors import ParseError


class Comparator(enum.Enum):
    EQ = "="
    NEQ = "!="
    LT = "<"
    GT = ">"
    LE = "<="
    GE = ">="

    @property
    def symbol(self) -> str:
        return self.value

    @property
    def ordering(self) -> bool:
        return self in (Comparator.LT, Comparator.GT, Comparator.LE, Comparator.GE)

    @classmethod
    def parse(cls, text: str) -> "Comparator":
        for c in cls:
            if text == c.value or text.upper() == c.name or text.capitalize() == c.name.capitalize():
                return c
        raise ParseError(f"unknown comparator {text!r}", expected=[c.value for c in cls])


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class FnRef:
    """A function named in application position, resolved at evaluation time."""

    name: str


@dataclass(frozen=True)
class Pair:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Iota:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class IotaActual:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Restrict:
    term: "Term"
    guard: "Formula"


Term = Union[Var, Const, FnRef, Pair, App, Iota, IotaActual, Restrict]
TERM_TYPES = (Var, Const, FnRef, Pair, App, Iota, IotaActual, Restrict)

# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Pred:
    name: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Cmp:
    """A comparison other than equality; equality is always :class:`Eq`."""

    op: Comparator
    left: Term
    right: Term

    def __post_init__(self):
        if self.op is Comparator.EQ:
            raise ValueError("use Eq for equality")


@dataclass(frozen=True)
class Exist:
    term: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ForallH:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ForallU:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ExistsH:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ExistsU:
    var: str
    body: "Formula"


Formula = Union[Pred, Eq, Cmp, Exist, Not, And, Or, ForallH, ForallU, ExistsH, ExistsU]
FORMULA_TYPES = (Pred, Eq, Cmp, Exist, Not, And, Or, ForallH, ForallU, ExistsH, ExistsU)
QUANTIFIERS = (ForallH, ForallU, ExistsH, ExistsU)
BINDERS = QUANTIFIERS + (Iota, IotaActual)


@dataclass(frozen=True)
class Abstraction:
    """``{var | body}``: a query operand with one distinguished variable."""

    var: str
    body: Formula


def implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return And(implies(a, b), implies(b, a))


def theta_atom(op: Comparator, left: Term, right: Term) -> Formula:
    if op is Comparator.EQ:
        return Eq(left, right)
    return Cmp(op, left, right)


# ---------------------------------------------------------------------------
# Free variables and substitution


def free_vars(node) -> frozenset[str]:
    if isinstance(node, Var):
        return frozenset([node.name])
    if isinstance(node, (Const, FnRef)):
        return frozenset()
    if isinstance(node, (Pair, App, And, Or, Eq, Cmp)):
        a, b = _children2(node)
        return free_vars(a) | free_vars(b)
    if isinstance(node, BINDERS) or isinstance(node, Abstraction):
        return free_vars(node.body) - {node.var}
    if isinstance(node, Restrict):
        return free_vars(node.term) | free_vars(node.guard)
    if isinstance(node, Pred):
        out = frozenset()
        for a in node.args:
            out |= free_vars(a)
        return out
    if isinstance(node, Exist):
        return free_vars(node.term)
    if isinstance(node, Not):
        return free_vars(node.body)
    raise TypeError(f"not an AST node: {node!r}")


def _children2(node):
    if isinstance(node, App):
        return node.fn, node.arg
    return node.left, node.right


def _all_names(node, acc):
    if isinstance(node, (Var, Const, FnRef)):
        acc.add(node.name)
    elif isinstance(node, (Pair, App, And, Or, Eq, Cmp)):
        for c in _children2(node):
            _all_names(c, acc)
    elif isinstance(node, BINDERS):
        acc.add(node.var)
        _all_names(node.body, acc)
    elif isinstance(node, Restrict):
        _all_names(node.term, acc)
        _all_names(node.guard, acc)
    elif isinstance(node, Pred):
        for a in node.args:
            _all_names(a, acc)
    elif isinstance(node, Exist):
        _all_names(node.term, acc)
    elif isinstance(node, Not):
        _all_names(node.body, acc)
    return acc


def fresh_var(avoid, base="y") -> str:
    avoid = set(avoid)
    if base not in avoid:
        return base
    for n in itertools.count(1):
        cand = f"{base}{n}"
        if cand not in avoid:
            return cand


def substitute(node, var: str, term: Term):
    """Capture-avoiding replacement of free ``var`` by ``term``."""
    if isinstance(node, Var):
        return term if node.name == var else node
    if isinstance(node, (Const, FnRef)):
        return node
    if isinstance(node, Pair):
        return Pair(substitute(node.left, var, term), substitute(node.right, var, term))
    if isinstance(node, App):
        return App(substitute(node.fn, var, term), substitute(node.arg, var, term))
    if isinstance(node, Restrict):
        return Restrict(substitute(node.term, var, term), substitute(node.guard, var, term))
    if isinstance(node, Pred):
        return Pred(node.name, tuple(substitute(a, var, term) for a in node.args))
    if isinstance(node, Eq):
        return Eq(substitute(node.left, var, term), substitute(node.right, var, term))
    if isinstance(node, Cmp):
        return Cmp(node.op, substitute(node.left, var, term), substitute(node.right, var, term))
    if isinstance(node, Exist):
        return Exist(substitute(node.term, var, term))
    if isinstance(node, Not):
        return Not(substitute(node.body, var, term))
    if isinstance(node, (And, Or)):
        return type(node)(substitute(node.left, var, term), substitute(node.right, var, term))
    if isinstance(node, BINDERS):
        if node.var == var or var not in free_vars(node.body):
            return node
        binder, body = node.var, node.body
        if binder in free_vars(term):
            new = fresh_var(_all_names(body, set()) | free_vars(term) | {var}, binder)
            body = substitute(body, binder, Var(new))
            binder = new
        return type(node)(binder, substitute(body, var, term))
    raise TypeError(f"not an AST node: {node!r}")


# ---------------------------------------------------------------------------
# Lexer

KEYWORDS = frozenset({"forall", "exists", "iota", "rest", "or", "E"})
_QUANT_WORDS = {
    "forall": ForallH,
    "exists": ExistsH,
    "forall@": ForallU,
    "exists@": ExistsU,
}
_CMP_TOKENS = {"=": Comparator.EQ, "!=": Comparator.NEQ, "<": Comparator.LT,
               ">": Comparator.GT, "<=": Comparator.LE, ">=": Comparator.GE}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<kwat>(?:forall|exists|iota)@)
  | (?P<const>\#[A-Za-z0-9_]+)
  | (?P<name>[A-Za-z0-9_]+)
  | (?P<op><->|->|<=|>=|!=|[<>=!&()\[\],.{}|:])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "name", "const", "op", "eof"
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos=pos)
        kind = m.lastgroup
        if kind != "ws":
            if kind == "kwat":
                kind = "name"
            tokens.append(Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


# ---------------------------------------------------------------------------
# Parser


class Parser:
    """Recursive-descent parser over a token list.

    The cursor API (``peek``/``accept``/``expect``) is shared with the script
    command parser in :mod:`eventua.cli`.
    """

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        # packrat memo: backtracking over "(" would otherwise be exponential
        self._memo: dict = {}

    # cursor helpers

    def peek(self, k: int = 0) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def at_end(self) -> bool:
        return self.peek().kind == "eof"

    def next(self) -> Token:
        tok = self.peek()
        self.i = min(self.i + 1, len(self.tokens) - 1)
        return tok

    def accept(self, text: str) -> bool:
        tok = self.peek()
        if tok.kind in ("op", "name") and tok.text == text:
            self.next()
            return True
        return False

    def expect(self, *texts: str) -> Token:
        tok = self.peek()
        if tok.kind in ("op", "name") and tok.text in texts:
            return self.next()
        self.fail(list(texts))

    def fail(self, expected, message=None):
        tok = self.peek()
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError(message or f"unexpected {found}", pos=tok.pos, expected=expected)

    def name(self) -> str:
        tok = self.peek()
        if tok.kind == "name" and tok.text not in KEYWORDS and "@" not in tok.text:
            return self.next().text
        self.fail(["<name>"])

    def expect_end(self):
        if not self.at_end():
            self.fail(["<end>"])

    def _memoized(self, kind, parse):
        key = (kind, self.i)
        hit = self._memo.get(key)
        if hit is None:
            try:
                hit = (True, parse(), self.i)
            except ParseError as exc:
                hit = (False, exc, self.i)
            self._memo[key] = hit
        ok, value, end = hit
        if not ok:
            raise value
        self.i = end
        return value

    # formulas

    def formula(self) -> Formula:
        return self._memoized("formula", self._formula)

    def _formula(self) -> Formula:
        left = self._implication()
        while self.accept("<->"):
            left = iff(left, self._implication())
        return left

    def _implication(self) -> Formula:
        left = self._disjunction()
        if self.accept("->"):
            return implies(left, self._implication())
        return left

    def _disjunction(self) -> Formula:
        left = self._conjunction()
        while self.accept("or"):
            left = Or(left, self._conjunction())
        return left

    def _conjunction(self) -> Formula:
        left = self._unary()
        while self.accept("&"):
            left = And(left, self._unary())
        return left

    def _unary(self) -> Formula:
        if self.accept("!"):
            return Not(self._unary())
        tok = self.peek()
        if tok.kind == "name" and tok.text in _QUANT_WORDS:
            self.next()
            var = self.name()
            self.expect(".")
            return _QUANT_WORDS[tok.text](var, self.formula())
        return self._atom()

    def _atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "(":
            start = self.i
            try:
                self.next()
                inner = self.formula()
                self.expect(")")
                if self.peek().text not in _CMP_TOKENS or self.peek().kind != "op":
                    return inner
                first_error = None
            except ParseError as exc:
                first_error = exc
            self.i = start
            try:
                return self._comparison()
            except ParseError as exc:
                if first_error is not None and (first_error.pos or 0) >= (exc.pos or 0):
                    raise first_error from None
                raise
        if tok.kind == "name" and tok.text == "E" and self.peek(1).text == "(":
            self.next()
            self.expect("(")
            term = self.term()
            self.expect(")")
            return Exist(term)
        if (
            tok.kind == "name"
            and tok.text not in KEYWORDS
            and "@" not in tok.text
            and self.peek(1).text == "("
        ):
            start = self.i
            self.next()
            self.next()
            args = [self.term()]
            while self.accept(","):
                args.append(self.term())
            self.expect(")", ",")
            nxt = self.peek()
            if nxt.kind == "op" and nxt.text in _CMP_TOKENS:
                # function application on the left of a comparison
                self.i = start
                return self._comparison()
            if len(args) == 1 and isinstance(args[0], Pair):
                args = [args[0].left, args[0].right]
            return Pred(tok.text, tuple(args))
        return self._comparison()

    def _comparison(self) -> Formula:
        left = self.term()
        tok = self.peek()
        if tok.kind == "op" and tok.text in _CMP_TOKENS:
            self.next()
            right = self.term()
            return theta_atom(_CMP_TOKENS[tok.text], left, right)
        self.fail(sorted(_CMP_TOKENS))

    # terms

    def term(self) -> Term:
        return self._memoized("term", self._term)

    def _term(self) -> Term:
        tok = self.peek()
        if tok.kind == "const":
            self.next()
            return Const(tok.text[1:])
        if tok.kind == "op" and tok.text == "[":
            self.next()
            left = self.term()
            self.expect(",")
            right = self.term()
            self.expect("]")
            return Pair(left, right)
        if tok.kind == "op" and tok.text == "(":
            self.next()
            inner = self.term()
            self.expect(")")
            return inner
        if tok.kind == "name" and tok.text in ("iota", "iota@"):
            self.next()
            var = self.name()
            self.expect(".")
            body = self.formula()
            return Iota(var, body) if tok.text == "iota" else IotaActual(var, body)
        if tok.kind == "name" and tok.text == "rest":
            self.next()
            self.expect("(")
            term = self.term()
            self.expect(",")
            guard = self.formula()
            self.expect(")")
            return Restrict(term, guard)
        if tok.kind == "name" and tok.text not in KEYWORDS and "@" not in tok.text:
            self.next()
            if self.accept("("):
                arg = self.term()
                self.expect(")")
                return App(FnRef(tok.text), arg)
            return Var(tok.text)
        self.fail(["#<name>", "(", "<name>", "[", "iota", "iota@", "rest"])

    def abstraction(self) -> Abstraction:
        self.expect("{")
        var = self.name()
        self.expect("|")
        body = self.formula()
        self.expect("}")
        return Abstraction(var, body)


def parse_formula(source: str) -> Formula:
    p = Parser(source)
    f = p.formula()
    p.expect_end()
    return f


def parse_term(source: str) -> Term:
    p = Parser(source)
    t = p.term()
    p.expect_end()
    return t


def parse_abstraction(source: str) -> Abstraction:
    p = Parser(source)
    a = p.abstraction()
    p.expect_end()
    return a


# ---------------------------------------------------------------------------
# Printer

_QUANT_KEYWORD = {ForallH: "forall", ForallU: "forall@", ExistsH: "exists", ExistsU: "exists@"}
_PREC_OR, _PREC_AND, _PREC_NOT, _PREC_ATOM = 1, 2, 3, 4


def _prec(f) -> int:
    if isinstance(f, Or):
        return _PREC_OR
    if isinstance(f, And):
        return _PREC_AND
    return _PREC_NOT if isinstance(f, Not) else _PREC_ATOM


def _fmt_formula(f, min_prec: int, tail: bool) -> str:
    # a quantifier body runs to the end, so one that is followed by more
    # text must be parenthesized
    wrap = _prec(f) < min_prec or (isinstance(f, QUANTIFIERS) and not tail)
    if wrap:
        tail = True
    if isinstance(f, Or):
        s = f"{_fmt_formula(f.left, _PREC_OR, False)} or {_fmt_formula(f.right, _PREC_AND, tail)}"
    elif isinstance(f, And):
        s = f"{_fmt_formula(f.left, _PREC_AND, False)} & {_fmt_formula(f.right, _PREC_NOT, tail)}"
    elif isinstance(f, Not):
        s = "!" + _fmt_formula(f.body, _PREC_NOT, tail)
    elif isinstance(f, QUANTIFIERS):
        s = f"{_QUANT_KEYWORD[type(f)]} {f.var}. {_fmt_formula(f.body, 0, True)}"
    elif isinstance(f, Pred):
        s = f"{f.name}({', '.join(_fmt_term(a) for a in f.args)})"
    elif isinstance(f, Eq):
        s = f"{_fmt_operand(f.left)} = {_fmt_operand(f.right)}"
    elif isinstance(f, Cmp):
        s = f"{_fmt_operand(f.left)} {f.op.symbol} {_fmt_operand(f.right)}"
    elif isinstance(f, Exist):
        s = f"E({_fmt_term(f.term)})"
    else:
        raise TypeError(f"not a formula: {f!r}")
    return f"({s})" if wrap else s


def _fmt_operand(t) -> str:
    text = _fmt_term(t)
    return f"({text})" if isinstance(t, (Iota, IotaActual)) else text


def _fmt_term(t) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return "#" + t.name
    if isinstance(t, FnRef):
        return t.name
    if isinstance(t, Pair):
        return f"[{_fmt_term(t.left)}, {_fmt_term(t.right)}]"
    if isinstance(t, App):
        if not isinstance(t.fn, FnRef):
            raise ValueError("only named functions can be printed in head position")
        return f"{t.fn.name}({_fmt_term(t.arg)})"
    if isinstance(t, Iota):
        return f"iota {t.var}. {_fmt_formula(t.body, 0, True)}"
    if isinstance(t, IotaActual):
        return f"iota@ {t.var}. {_fmt_formula(t.body, 0, True)}"
    if isinstance(t, Restrict):
        return f"rest({_fmt_term(t.term)}, {_fmt_formula(t.guard, 0, True)})"
    raise TypeError(f"not a term: {t!r}")


def print_ast(node) -> str:
    if isinstance(node, Abstraction):
        return f"{{{node.var} | {_fmt_formula(node.body, 0, True)}}}"
    if isinstance(node, TERM_TYPES):
        return _fmt_term(node)
    return _fmt_formula(node, 0, True)
