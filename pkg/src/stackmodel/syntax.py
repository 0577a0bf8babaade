"""Core syntax of the type theory: terms, the `.tt` surface parser, name
resolution to de Bruijn indices and a round-tripping pretty printer.

Raw (parsed) terms reuse the core dataclasses with ``Var`` holding a name;
``resolve`` turns those names into indices or global constants.  Binder
nodes remember the surface name only for display; it takes no part in
equality, so alpha-equivalent raw terms resolve to equal terms.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class ScopeError(Exception):
    def __init__(self, name: str):
        super().__init__(f"unbound identifier {name!r}")
        self.name = name


@dataclass(frozen=True)
class Term:
    def __str__(self):
        return pretty(self)


@dataclass(frozen=True)
class Var(Term):
    index: Union[int, str]


@dataclass(frozen=True)
class Const(Term):
    """Reference to an earlier top-level declaration."""

    name: str


@dataclass(frozen=True)
class Pi(Term):
    domain: Term
    codomain: Term
    name: str = field(default="_", compare=False)


@dataclass(frozen=True)
class Lambda(Term):
    body: Term
    name: str = field(default="_", compare=False)


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Sigma(Term):
    first: Term
    second: Term
    name: str = field(default="_", compare=False)


@dataclass(frozen=True)
class Pair(Term):
    fst: Term
    snd: Term


@dataclass(frozen=True)
class ProjL(Term):
    pair: Term


@dataclass(frozen=True)
class ProjR(Term):
    pair: Term


@dataclass(frozen=True)
class IdType(Term):
    type: Term
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Refl(Term):
    point: Term


@dataclass(frozen=True)
class IdElim(Term):
    motive: Term
    base: Term
    target: Term


@dataclass(frozen=True)
class Nat(Term):
    pass


@dataclass(frozen=True)
class Zero(Term):
    pass


@dataclass(frozen=True)
class Succ(Term):
    pred: Term


@dataclass(frozen=True)
class NatElim(Term):
    motive: Term
    zcase: Term
    scase: Term
    target: Term


@dataclass(frozen=True)
class Universe(Term):
    pass


@dataclass(frozen=True)
class Trunc(Term):
    type: Term


@dataclass(frozen=True)
class TruncIn(Term):
    point: Term


@dataclass(frozen=True)
class TruncElim(Term):
    motive: Term
    fn: Term
    prop_witness: Term
    target: Term


@dataclass(frozen=True)
class UnivalenceAx(Term):
    type_a: Term
    type_b: Term
    equiv: Term


@dataclass(frozen=True)
class Enum(Term):
    cardinality: int


@dataclass(frozen=True)
class EnumLit(Term):
    cardinality: int
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.cardinality:
            raise ValueError(f"#{self.index}:{self.cardinality} out of range")


@dataclass(frozen=True)
class EnumElim(Term):
    motive: Term
    cases: tuple
    target: Term


# fields that sit under one extra binder
BINDERS = {Pi: "codomain", Lambda: "body", Sigma: "second"}


@dataclass(frozen=True)
class Declaration:
    name: str
    annotation: Term
    body: Term | None = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Context:
    """Telescope of types, outermost first; entry k lives under entries < k."""

    telescope: tuple = ()

    def extend(self, ty: Term) -> "Context":
        return Context(self.telescope + (ty,))

    def __len__(self):
        return len(self.telescope)


def Bool() -> Enum:
    return Enum(2)


def Unit() -> Enum:
    return Enum(1)


def Empty() -> Enum:
    return Enum(0)


def numeral(n: int) -> Term:
    t: Term = Zero()
    for _ in range(n):
        t = Succ(t)
    return t


def arrow(a: Term, b: Term) -> Pi:
    """Non-dependent function type; ``b`` is given in the outer scope."""
    return Pi(a, shift(b, 1))


# ---------------------------------------------------------------------------
# traversal, shifting and substitution


def map_children(t: Term, fn) -> Term:
    """Rebuild ``t`` applying ``fn(child, binders)`` to each direct subterm."""
    if not dataclasses.is_dataclass(t):
        return t
    changes = {}
    binder_field = BINDERS.get(type(t))
    for f in dataclasses.fields(t):
        v = getattr(t, f.name)
        extra = 1 if f.name == binder_field else 0
        if isinstance(v, Term):
            changes[f.name] = fn(v, extra)
        elif isinstance(v, tuple):
            changes[f.name] = tuple(fn(c, extra) for c in v)
    return dataclasses.replace(t, **changes) if changes else t


def children(t: Term) -> list:
    out = []
    map_children(t, lambda c, _: out.append(c) or c)
    return out


def shift(t: Term, d: int, cutoff: int = 0) -> Term:
    if isinstance(t, Var):
        if isinstance(t.index, int) and t.index >= cutoff:
            return Var(t.index + d)
        return t
    return map_children(t, lambda c, b: shift(c, d, cutoff + b))


def subst(t: Term, s: Term, j: int = 0) -> Term:
    """Replace variable ``j`` by ``s`` and lower the variables above it."""
    if isinstance(t, Var):
        if not isinstance(t.index, int):
            return t
        if t.index == j:
            return shift(s, j)
        if t.index > j:
            return Var(t.index - 1)
        return t
    return map_children(t, lambda c, b: subst(c, s, j + b))


def instantiate(body: Term, arg: Term) -> Term:
    """``body`` lives under one binder; plug ``arg`` in for it."""
    return subst(body, arg, 0)


def free_indices(t: Term, depth: int = 0) -> set:
    if isinstance(t, Var):
        return {t.index - depth} if isinstance(t.index, int) and t.index >= depth else set()
    out: set = set()
    map_children(t, lambda c, b: out.update(free_indices(c, depth + b)) or c)
    return out


# ---------------------------------------------------------------------------
# resolution


def resolve(raw: Term, scope: Sequence[str] = (), globals: Iterable[str] = ()) -> Term:
    """Replace named variables by de Bruijn indices (or ``Const`` for globals).

    ``scope`` lists local names outermost first.
    """
    return _resolve(raw, list(scope), frozenset(globals))


def _resolve(t: Term, scope: list, globs: frozenset) -> Term:
    if isinstance(t, Var):
        if isinstance(t.index, int):
            return t
        name = t.index
        if name != "_":
            for pos in range(len(scope) - 1, -1, -1):
                if scope[pos] == name:
                    return Var(len(scope) - 1 - pos)
            if name in globs:
                return Const(name)
        raise ScopeError(name)
    binder = getattr(t, "name", None) if type(t) in BINDERS else None

    def go(c, extra):
        return _resolve(c, scope + [binder] * extra, globs)

    return map_children(t, go)


# ---------------------------------------------------------------------------
# pretty printing


def pretty(t: Term, names: Sequence[str] = ()) -> str:
    """Render ``t`` in surface syntax; bound variables are named by depth."""
    return _pp(t, list(names), 0)


def _paren(s: str, inner: int, outer: int) -> str:
    return f"({s})" if inner < outer else s


def _pp(t: Term, ctx: list, prec: int) -> str:
    d = len(ctx)
    match t:
        case Var(i):
            if isinstance(i, str):
                return i
            if i >= d:
                raise ValueError(f"free variable {i} with only {d} names")
            return ctx[d - 1 - i]
        case Const(name):
            return name
        case Lambda(body):
            x = f"x{d}"
            return _paren(f"\\{x}. {_pp(body, ctx + [x], 0)}", 0, prec)
        case Pi(a, b):
            x = f"x{d}"
            return _paren(f"({x} : {_pp(a, ctx, 0)}) -> {_pp(b, ctx + [x], 0)}", 0, prec)
        case Sigma(a, b):
            x = f"x{d}"
            return _paren(f"({x} : {_pp(a, ctx, 0)}) * {_pp(b, ctx + [x], 0)}", 0, prec)
        case App(f, a):
            return _paren(f"{_pp(f, ctx, 1)} {_pp(a, ctx, 2)}", 1, prec)
        case Pair(a, b):
            return f"({_pp(a, ctx, 0)} , {_pp(b, ctx, 0)})"
        case ProjL(p):
            return _paren(f"fst {_pp(p, ctx, 2)}", 1, prec)
        case ProjR(p):
            return _paren(f"snd {_pp(p, ctx, 2)}", 1, prec)
        case IdType(a, x, y):
            return _paren(f"Id {_pp(a, ctx, 2)} {_pp(x, ctx, 2)} {_pp(y, ctx, 2)}", 1, prec)
        case Refl(a):
            return _paren(f"refl {_pp(a, ctx, 2)}", 1, prec)
        case IdElim(p, b, e):
            return f"J({_pp(p, ctx, 0)}, {_pp(b, ctx, 0)}, {_pp(e, ctx, 0)})"
        case Nat():
            return "Nat"
        case Zero():
            return "zero"
        case Succ(n):
            return _paren(f"suc {_pp(n, ctx, 2)}", 1, prec)
        case NatElim(p, z, s, n):
            args = ", ".join(_pp(x, ctx, 0) for x in (p, z, s, n))
            return f"natrec({args})"
        case Universe():
            return "U"
        case Trunc(a):
            return _paren(f"||{_pp(a, ctx, 0)}||", 1, prec)
        case TruncIn(a):
            return _paren(f"tin {_pp(a, ctx, 2)}", 1, prec)
        case TruncElim(p, f, w, e):
            args = ", ".join(_pp(x, ctx, 0) for x in (p, f, w, e))
            return f"trec({args})"
        case UnivalenceAx(a, b, e):
            args = ", ".join(_pp(x, ctx, 0) for x in (a, b, e))
            return f"ua({args})"
        case Enum(k):
            return _paren(f"Enum {k}", 1, prec)
        case EnumLit(k, i):
            return f"#{i}:{k}"
        case EnumElim(p, cases, e):
            cs = ", ".join(_pp(c, ctx, 0) for c in cases)
            return f"case({_pp(p, ctx, 0)}, [{cs}], {_pp(e, ctx, 0)})"
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# lexing and parsing

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>--[^\n]*)
  | (?P<sym>->|\|\||[\\()\[\],:.*=\#])
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)

KEYWORDS = {
    "U", "Nat", "zero", "suc", "refl", "Id", "tin", "trec", "J", "natrec",
    "case", "ua", "Enum", "fst", "snd",
}
_PREFIX_ARITY = {"Id": 3, "refl": 1, "suc": 1, "tin": 1, "fst": 1, "snd": 1}
_CALL_ARITY = {"J": 3, "natrec": 4, "trec": 4, "ua": 3}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], eof: tuple[int, int]):
        self.toks = tokens
        self.i = 0
        self.eof = eof

    def peek(self, k: int = 0) -> Token | None:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def error(self, msg: str):
        tok = self.peek()
        line, col = (tok.line, tok.col) if tok else self.eof
        raise ParseError(msg, line, col)

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind in ("sym", "ident") and tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            tok = self.peek()
            self.error(f"expected {text!r}, found {tok.text if tok else 'end of input'!r}")
        return self.advance()

    def advance(self) -> Token:
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of input")
        self.i += 1
        return tok

    def ident(self) -> str:
        tok = self.peek()
        if tok is None or tok.kind != "ident" or tok.text in KEYWORDS:
            self.error("expected identifier")
        self.i += 1
        return tok.text

    def number(self) -> int:
        tok = self.peek()
        if tok is None or tok.kind != "num":
            self.error("expected number")
        self.i += 1
        return int(tok.text)

    def done(self) -> bool:
        return self.i >= len(self.toks)

    # term := '\' names '.' term | telescope ('->'|'*') term | app [('->'|'*') term]
    def term(self) -> Term:
        if self.at("\\"):
            self.advance()
            names = [self.ident()]
            while not self.at("."):
                names.append(self.ident())
            self.advance()
            body = self.term()
            for x in reversed(names):
                body = Lambda(body, x)
            return body
        if self.at("(") and self._telescope_ahead():
            groups = []
            while self.at("("):
                self.advance()
                names = [self.ident()]
                while not self.at(":"):
                    names.append(self.ident())
                self.advance()
                ty = self.term()
                self.expect(")")
                groups.extend((x, ty) for x in names)
            if self.at("->"):
                ctor = Pi
            elif self.at("*"):
                ctor = Sigma
            else:
                self.error("expected '->' or '*' after binder")
            self.advance()
            body = self.term()
            for x, ty in reversed(groups):
                body = ctor(ty, body, x)
            return body
        lhs = self.app()
        if self.at("->"):
            self.advance()
            return Pi(lhs, self.term(), "_")
        if self.at("*"):
            self.advance()
            return Sigma(lhs, self.term(), "_")
        return lhs

    def _telescope_ahead(self) -> bool:
        k = 1
        while True:
            tok = self.peek(k)
            if tok is None:
                return False
            if tok.kind == "ident" and tok.text not in KEYWORDS:
                k += 1
                continue
            return k > 1 and tok.kind == "sym" and tok.text == ":"

    def app(self) -> Term:
        tok = self.peek()
        if tok is None:
            self.error("expected a term")
        if tok.kind == "ident" and tok.text in _PREFIX_ARITY:
            self.advance()
            args = [self.atom() for _ in range(_PREFIX_ARITY[tok.text])]
            head = {
                "Id": lambda a, x, y: IdType(a, x, y),
                "refl": Refl, "suc": Succ, "tin": TruncIn, "fst": ProjL, "snd": ProjR,
            }[tok.text](*args)
        elif tok.kind == "ident" and tok.text == "Enum":
            self.advance()
            head = Enum(self.number())
        elif self.at("||"):
            self.advance()
            inner = self.term()
            self.expect("||")
            head = Trunc(inner)
        else:
            head = self.atom()
        while self._atom_ahead():
            head = App(head, self.atom())
        return head

    def _atom_ahead(self) -> bool:
        tok = self.peek()
        if tok is None:
            return False
        if tok.kind == "ident":
            return tok.text not in _PREFIX_ARITY and tok.text != "Enum"
        return tok.kind == "sym" and tok.text in ("(", "#")

    def atom(self) -> Term:
        tok = self.peek()
        if tok is None:
            self.error("expected a term")
        if tok.kind == "sym" and tok.text == "(":
            self.advance()
            first = self.term()
            if self.at(","):
                self.advance()
                second = self.term()
                self.expect(")")
                return Pair(first, second)
            self.expect(")")
            return first
        if tok.kind == "sym" and tok.text == "||":
            # only reached where an argument is mandatory, so no ambiguity
            self.advance()
            inner = self.term()
            self.expect("||")
            return Trunc(inner)
        if tok.kind == "sym" and tok.text == "#":
            self.advance()
            i = self.number()
            self.expect(":")
            k = self.number()
            if i >= k:
                raise ParseError(f"enum literal #{i}:{k} out of range", tok.line, tok.col)
            return EnumLit(k, i)
        if tok.kind != "ident":
            self.error(f"unexpected {tok.text!r}")
        name = tok.text
        if name == "U":
            self.advance()
            return Universe()
        if name == "Nat":
            self.advance()
            return Nat()
        if name == "zero":
            self.advance()
            return Zero()
        if name in _CALL_ARITY:
            self.advance()
            self.expect("(")
            args = [self.term()]
            for _ in range(_CALL_ARITY[name] - 1):
                self.expect(",")
                args.append(self.term())
            self.expect(")")
            return {"J": IdElim, "natrec": NatElim, "trec": TruncElim, "ua": UnivalenceAx}[name](*args)
        if name == "case":
            self.advance()
            self.expect("(")
            motive = self.term()
            self.expect(",")
            self.expect("[")
            cases = []
            if not self.at("]"):
                cases.append(self.term())
                while self.at(","):
                    self.advance()
                    cases.append(self.term())
            self.expect("]")
            self.expect(",")
            target = self.term()
            self.expect(")")
            return EnumElim(motive, tuple(cases), target)
        return Var(self.ident())


def _eof_position(text: str) -> tuple[int, int]:
    lines = text.split("\n")
    return len(lines), len(lines[-1]) + 1


def parse_term(text: str) -> Term:
    """Parse a single (named) term."""
    p = _Parser(tokenize(text), _eof_position(text))
    t = p.term()
    if not p.done():
        p.error("trailing input")
    return t


def parse_file(text: str) -> list[Declaration]:
    """Parse a `.tt` file into named declarations, in source order.

    A declaration starts with an identifier in column 1 followed by ``:``
    (signature) or ``=`` (definition); indented lines continue it.
    """
    tokens = tokenize(text)
    groups: list[list[Token]] = []
    for tok in tokens:
        if tok.col == 1 or not groups:
            groups.append([])
        groups[-1].append(tok)

    decls: dict[str, Declaration] = {}
    defined: set[str] = set()
    for group in groups:
        head = group[0]
        if head.kind != "ident" or head.text in KEYWORDS or len(group) < 2:
            raise ParseError("expected 'name :' or 'name ='", head.line, head.col)
        sep = group[1]
        if sep.text not in (":", "="):
            raise ParseError("expected ':' or '='", sep.line, sep.col)
        end = group[-1]
        p = _Parser(group[2:], (end.line, end.col + len(end.text)))
        t = p.term()
        if not p.done():
            p.error("trailing input")
        name = head.text
        if sep.text == ":":
            if name in decls:
                raise ParseError(f"duplicate declaration {name!r}", head.line, head.col)
            decls[name] = Declaration(name, t, None, head.line)
        else:
            if name not in decls:
                raise ParseError(f"definition of {name!r} without a signature", head.line, head.col)
            if name in defined:
                raise ParseError(f"duplicate definition {name!r}", head.line, head.col)
            defined.add(name)
            decls[name] = dataclasses.replace(decls[name], body=t)
    return list(decls.values())


def resolve_declarations(decls: Iterable[Declaration]) -> list[Declaration]:
    """Resolve each declaration against the names declared before it."""
    seen: list[str] = []
    out = []
    for d in decls:
        ann = resolve(d.annotation, (), seen)
        # definitions may not refer to themselves
        body = resolve(d.body, (), seen) if d.body is not None else None
        out.append(Declaration(d.name, ann, body, d.line))
        seen.append(d.name)
    return out


def load(text: str) -> list[Declaration]:
    return resolve_declarations(parse_file(text))
