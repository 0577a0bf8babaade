"""Bounded Kripke-Joyal forcing over the built-in sites, with re-checkable certificates.

Atoms talk about the generic point of the site: ``alpha(n) = b`` on Cantor
space and ``within(q, n)``, read as ``|r - q| < 1/n``, on the interval.
Quantifiers over opens range over those generated within the depth budget,
and every negative answer is reported as ``NotForcedUpTo`` its bounds.  The
built-in sites have no empty covers, so ``F`` is never forced.
"""

from __future__ import annotations

import itertools
import math
import random
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Union

from .site import (
    CantorOpen, Cover, IntervalOpen, Site, SiteError, open_from_json, open_to_json,
)


class FormulaError(ValueError):
    pass


# ---------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Atom:
    name: str
    args: tuple


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class ForallNat:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ExistsNatTrunc:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ExistsRatTrunc:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class SigmaSectionExists:
    """An untruncated section of a named witness family, glued along the cover."""

    family: str
    args: tuple


Formula = Union[Top, Bot, Atom, And, Or, Implies, Not, ForallNat, ExistsNatTrunc,
                ExistsRatTrunc, SigmaSectionExists]

BINDERS = (ForallNat, ExistsNatTrunc, ExistsRatTrunc)


def substitute(phi: Formula, var: str, value) -> Formula:
    match phi:
        case Atom(name, args):
            return Atom(name, tuple(value if a == var else a for a in args))
        case SigmaSectionExists(fam, args):
            return SigmaSectionExists(fam, tuple(value if a == var else a for a in args))
        case And(l, r) | Or(l, r) | Implies(l, r):
            return type(phi)(substitute(l, var, value), substitute(r, var, value))
        case Not(b):
            return Not(substitute(b, var, value))
        case ForallNat(v, b) | ExistsNatTrunc(v, b) | ExistsRatTrunc(v, b):
            return phi if v == var else type(phi)(v, substitute(b, var, value))
    return phi


def free_vars(phi: Formula) -> set:
    match phi:
        case Atom(_, args) | SigmaSectionExists(_, args):
            return {a for a in args if isinstance(a, str)}
        case And(l, r) | Or(l, r) | Implies(l, r):
            return free_vars(l) | free_vars(r)
        case Not(b):
            return free_vars(b)
        case ForallNat(v, b) | ExistsNatTrunc(v, b) | ExistsRatTrunc(v, b):
            return free_vars(b) - {v}
    return set()


def _arg(a) -> str:
    return str(a)


def show(phi: Formula) -> str:
    match phi:
        case Top():
            return "T"
        case Bot():
            return "F"
        case Atom("alpha", (n, b)):
            return f"alpha({_arg(n)}) = {_arg(b)}"
        case Atom(name, args):
            return f"{name}({','.join(map(_arg, args))})"
        case SigmaSectionExists(fam, args):
            return f"sect {fam}({','.join(map(_arg, args))})"
        case And(l, r):
            return f"({show(l)} & {show(r)})"
        case Or(l, r):
            return f"({show(l)} | {show(r)})"
        case Implies(l, r):
            return f"({show(l)} -> {show(r)})"
        case Not(b):
            return f"~{show(b)}"
        case ForallNat(v, b):
            return f"(A {v}. {show(b)})"
        case ExistsNatTrunc(v, b):
            return f"(Etrunc {v}:N. {show(b)})"
        case ExistsRatTrunc(v, b):
            return f"(Etrunc {v}:Q. {show(b)})"
    raise FormulaError(f"not a formula: {phi!r}")


_TOKEN = re.compile(r"\s*(->|Etrunc\b|[A-Za-z_][A-Za-z0-9_]*|\d+/\d+|\d+|[~&|().,:=])")


def parse_formula(text: str) -> Formula:
    """Parse the prefix formula syntax, e.g. ``Etrunc q. within(q,3)``."""
    toks, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        toks.append(m.group(1))
        pos = m.end()
    p = _FormulaParser(toks)
    phi = p.formula()
    if p.i != len(toks):
        raise FormulaError(f"trailing input: {' '.join(toks[p.i:])}")
    if free_vars(phi):
        raise FormulaError(f"unbound variables: {', '.join(sorted(free_vars(phi)))}")
    return phi


class _FormulaParser:
    def __init__(self, toks):
        self.toks, self.i = toks, 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected=None):
        t = self.peek()
        if t is None or (expected is not None and t != expected):
            raise FormulaError(f"expected {expected or 'more input'}, found {t or 'end of input'}")
        self.i += 1
        return t

    def formula(self):
        if self.peek() in ("A", "E", "Etrunc"):
            return self.quantifier()
        left = self.disj()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.formula())
        return left

    def quantifier(self):
        q = self.take()
        var = self.take()
        if not re.fullmatch(r"[a-z_][A-Za-z0-9_]*", var):
            raise FormulaError(f"bad variable name {var!r}")
        sort = None
        if self.peek() == ":":
            self.take()
            sort = self.take()
            if sort not in ("N", "Q"):
                raise FormulaError(f"unknown sort {sort!r}; use N or Q")
        self.take(".")
        body = self.formula()
        if q == "A":
            if sort == "Q":
                raise FormulaError("universal quantification ranges over naturals only")
            return ForallNat(var, body)
        sort = sort or _infer_sort(body, var)
        return ExistsRatTrunc(var, body) if sort == "Q" else ExistsNatTrunc(var, body)

    def disj(self):
        left = self.conj()
        while self.peek() == "|":
            self.take()
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.peek() == "&":
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self):
        t = self.peek()
        if t == "~":
            self.take()
            return Not(self.unary())
        if t in ("A", "E", "Etrunc"):
            return self.quantifier()
        if t == "(":
            self.take()
            phi = self.formula()
            self.take(")")
            return phi
        if t == "T":
            self.take()
            return Top()
        if t == "F":
            self.take()
            return Bot()
        if t == "alpha":
            self.take()
            self.take("(")
            n = self.term()
            self.take(")")
            self.take("=")
            b = self.term()
            if b not in (0, 1):
                raise FormulaError("alpha(n) is compared with 0 or 1")
            return Atom("alpha", (n, b))
        if t == "within":
            self.take()
            self.take("(")
            q = self.term()
            self.take(",")
            n = self.term()
            self.take(")")
            if isinstance(n, int) and n < 1:
                raise FormulaError("within(q, n) needs n >= 1")
            return Atom("within", (q, n))
        if t == "sect":
            self.take()
            fam = self.take()
            args = []
            self.take("(")
            while self.peek() != ")":
                args.append(self.term())
                if self.peek() == ",":
                    self.take()
            self.take(")")
            return SigmaSectionExists(fam, tuple(args))
        raise FormulaError(f"unexpected token {t or 'end of input'}")

    def term(self):
        t = self.take()
        if re.fullmatch(r"\d+/\d+", t):
            if int(t.split("/")[1]) == 0:
                raise FormulaError("zero denominator")
            return Fraction(t)
        if t.isdigit():
            return int(t)
        if re.fullmatch(r"[a-z_][A-Za-z0-9_]*", t):
            return t
        raise FormulaError(f"expected a term, found {t!r}")


def _infer_sort(body: Formula, var: str) -> str:
    match body:
        case Atom("within", (q, _)) if q == var:
            return "Q"
        case And(l, r) | Or(l, r) | Implies(l, r):
            return "Q" if "Q" in (_infer_sort(l, var), _infer_sort(r, var)) else "N"
        case Not(b):
            return _infer_sort(b, var)
        case ForallNat(v, b) | ExistsNatTrunc(v, b) | ExistsRatTrunc(v, b) if v != var:
            return _infer_sort(b, var)
    return "N"


# ---------------------------------------------------------------------------
# atoms

FORCED_EVERYWHERE = "ForcedEverywhere"
REFUTED_SOMEWHERE = "RefutedSomewhere"
UNDETERMINED = "Undetermined"


def _ball(q: Fraction, n: int) -> tuple[Fraction, Fraction]:
    return q - Fraction(1, n), q + Fraction(1, n)


def atom_holds_everywhere(u, atom: Atom) -> bool:
    match atom, u:
        case Atom("alpha", (n, b)), CantorOpen(s):
            return n < len(s) and int(s[n]) == b
        case Atom("within", (q, n)), IntervalOpen(lo, hi):
            a, z = _ball(Fraction(q), n)
            return a <= lo and hi <= z
    raise FormulaError(f"atom {show(atom)} does not apply to the open {u}")


def atom_fails_everywhere(u, atom: Atom) -> bool:
    match atom, u:
        case Atom("alpha", (n, b)), CantorOpen(s):
            return n < len(s) and int(s[n]) != b
        case Atom("within", (q, n)), IntervalOpen(lo, hi):
            a, z = _ball(Fraction(q), n)
            return hi <= a or lo >= z
    raise FormulaError(f"atom {show(atom)} does not apply to the open {u}")


def atom_status(u, atom: Atom) -> str:
    """Three-valued decision of a closed atom on an open."""
    if atom_holds_everywhere(u, atom):
        return FORCED_EVERYWHERE
    match atom, u:
        case Atom("alpha", _), CantorOpen():
            # either already false, or an extension fixes that bit the other way
            return REFUTED_SOMEWHERE
        case Atom("within", (q, n)), IntervalOpen(lo, hi):
            a, z = _ball(Fraction(q), n)
            if lo < a or hi > z:
                return REFUTED_SOMEWHERE
    return UNDETERMINED


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class Bounds:
    depth: int = 3
    nat_bound: int = 32
    den_bound: int = 1_000_000

    def as_dict(self) -> dict:
        return {"coverDepth": self.depth, "natBound": self.nat_bound,
                "ratDenominatorBound": self.den_bound}


@dataclass
class Forced:
    certificate: dict

    forced = True


@dataclass
class NotForcedUpTo:
    bounds: Bounds
    obstruction: list = field(default_factory=list)

    forced = False


ForcingResult = Union[Forced, NotForcedUpTo]


def result_to_json(r: ForcingResult) -> dict:
    if r.forced:
        return {"status": "Forced", "certificate": r.certificate}
    return {"status": "NotForcedUpTo", "bounds": r.bounds.as_dict(),
            "obstruction": [open_to_json(u) for u in r.obstruction]}


def _wit(w):
    return str(w) if isinstance(w, Fraction) else w


def _unwit(w):
    return Fraction(w) if isinstance(w, str) else w


def simplest_between(a: Fraction, b: Fraction) -> Fraction:
    """The rational of least denominator in the closed interval [a, b]."""
    if a > b:
        raise ValueError("empty interval")
    if math.ceil(a) <= b:
        # integers all have denominator 1; take the one nearest zero
        if a <= 0 <= b:
            return Fraction(0)
        return Fraction(math.ceil(a) if a > 0 else math.floor(b))
    fl = math.floor(a)
    return fl + 1 / simplest_between(1 / (b - fl), 1 / (a - fl))


def _windows(phi: Formula, var: str, u: IntervalOpen) -> list:
    out = []
    match phi:
        case Atom("within", (q, n)) if q == var and isinstance(n, int):
            out.append((u.hi - Fraction(1, n), u.lo + Fraction(1, n)))
        case And(l, r) | Or(l, r) | Implies(l, r):
            out += _windows(l, var, u) + _windows(r, var, u)
        case Not(b):
            out += _windows(b, var, u)
        case ForallNat(v, b) | ExistsNatTrunc(v, b) | ExistsRatTrunc(v, b) if v != var:
            out += _windows(b, var, u)
    return out


def rational_candidates(u, body: Formula, var: str, den_bound: int) -> list:
    """Midpoint first, then least-denominator points of each atom window, then small rationals."""
    cands = []
    if isinstance(u, IntervalOpen):
        cands.append((u.lo + u.hi) / 2)
        wins = _windows(body, var, u)
        for a, b in wins:
            if a <= b:
                cands.append(simplest_between(a, b))
        both = [w for w in wins if w[0] <= w[1]]
        if len(both) > 1:
            a, b = max(w[0] for w in both), min(w[1] for w in both)
            if a <= b:
                cands.append(simplest_between(a, b))
    small = sorted({Fraction(p, q) for q in range(1, min(den_bound, 8) + 1) for p in range(q + 1)},
                   key=lambda r: (r.denominator, r))
    seen, out = set(), []
    for c in cands + small:
        if c.denominator <= den_bound and c not in seen:
            seen.add(c)
            out.append(c)
    return out


# ---------------------------------------------------------------------------
# section families


FAMILIES = {
    "within": ("interval", 1),     # within(n): a constant q with |r - q| < 1/n
    "withinUpTo": ("interval", 1),  # withinUpTo(N): q_1..q_N with |r - q_n| < 1/n
    "alphaOne": ("cantor", 0),     # alphaOne(): an index n with alpha(n) = 1
}


def _family_atoms(family: str, args: tuple, witness) -> list[Atom]:
    match family, args:
        case "within", (n,):
            return [Atom("within", (witness, n))]
        case "withinUpTo", (N,):
            return [Atom("within", (q, n)) for n, q in zip(range(1, N + 1), witness)]
        case "alphaOne", ():
            return [Atom("alpha", (witness, 1))]
    raise FormulaError(f"unknown section family {family}{args}")


def _family_witness(family: str, args: tuple, pieces: list, bounds: Bounds):
    """A witness valid on every piece, or None."""
    match family, args:
        case "within" | "withinUpTo", _:
            ns = [args[0]] if family == "within" else list(range(1, args[0] + 1))
            qs = []
            for n in ns:
                a = max(p.hi for p in pieces) - Fraction(1, n)
                b = min(p.lo for p in pieces) + Fraction(1, n)
                if a > b:
                    return None
                q = simplest_between(a, b)
                if q.denominator > bounds.den_bound:
                    return None
                qs.append(q)
            return qs[0] if family == "within" else tuple(qs)
        case "alphaOne", ():
            for n in range(bounds.nat_bound + 1):
                if all(atom_holds_everywhere(p, Atom("alpha", (n, 1))) for p in pieces):
                    return n
            return None
    raise FormulaError(f"unknown section family {family}{args}")


def _components(site: Site, pieces: tuple) -> list[list[int]]:
    n = len(pieces)
    comp = list(range(n))

    def find(i):
        while comp[i] != i:
            i = comp[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if site.meet(pieces[i], pieces[j]) is not None:
                comp[find(i)] = find(j)
    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


# ---------------------------------------------------------------------------
# the forcing relation


def budget_window(site: Site, u, depth: int) -> list:
    """``u`` and the opens generated from the root within ``depth`` that lie below it.

    Measured from the root, so the window of a smaller open is a subset of the window
    of a larger one; that keeps Not and Implies monotone at a fixed budget.
    """
    key = (u, depth)
    cache = site.__dict__.setdefault("_windows", {})
    if key not in cache:
        grid = cache.get(depth)
        if grid is None:
            grid = cache[depth] = site.opens(depth)
        cache[key] = [u] + [w for w in grid if w != u and site.leq(w, u)]
    return cache[key]


class Forcing:
    """One evaluation session: a site, bounds, and a memo table."""

    def __init__(self, site: Site, bounds: Bounds = Bounds()):
        self.site = site
        self.bounds = bounds
        self._memo: dict = {}

    def window(self, u) -> list:
        return budget_window(self.site, u, self.bounds.depth)

    def forces(self, u, phi: Formula) -> ForcingResult:
        key = (u, phi)
        if key not in self._memo:
            self._memo[key] = self._forces(u, phi)
        return self._memo[key]

    def _no(self, *path) -> NotForcedUpTo:
        return NotForcedUpTo(self.bounds, list(path))

    def _forces(self, u, phi: Formula) -> ForcingResult:
        b = self.bounds
        match phi:
            case Top():
                return Forced({"rule": "top"})
            case Bot():
                return self._no(u)
            case Atom():
                if atom_holds_everywhere(u, phi):
                    return Forced({"rule": "atom"})
                return self._no(u)
            case And(l, r):
                rl = self.forces(u, l)
                if not rl.forced:
                    return rl
                rr = self.forces(u, r)
                if not rr.forced:
                    return rr
                return Forced({"rule": "and", "left": rl.certificate, "right": rr.certificate})
            case Or(l, r):
                def piece(p):
                    for side, psi in (("left", l), ("right", r)):
                        res = self.forces(p, psi)
                        if res.forced:
                            return {"open": open_to_json(p), "side": side, "cert": res.certificate}
                    return None
                return self._cover_search(u, piece, "or")
            case ExistsNatTrunc(v, body):
                def piece(p):
                    for n in range(b.nat_bound + 1):
                        res = self.forces(p, substitute(body, v, n))
                        if res.forced:
                            return {"open": open_to_json(p), "witness": n, "cert": res.certificate}
                    return None
                return self._cover_search(u, piece, "exists")
            case ExistsRatTrunc(v, body):
                def piece(p):
                    for q in rational_candidates(p, body, v, b.den_bound):
                        res = self.forces(p, substitute(body, v, q))
                        if res.forced:
                            return {"open": open_to_json(p), "witness": str(q), "cert": res.certificate}
                    return None
                return self._cover_search(u, piece, "exists")
            case ForallNat(v, body):
                certs = []
                for n in range(b.nat_bound + 1):
                    res = self.forces(u, substitute(body, v, n))
                    if not res.forced:
                        return res
                    certs.append(res.certificate)
                return Forced({"rule": "forall", "natBound": b.nat_bound, "instances": certs})
            case Implies(l, r):
                cases = []
                for w in self.window(u):
                    if self.forces(w, l).forced:
                        res = self.forces(w, r)
                        if not res.forced:
                            return self._no(u, *res.obstruction)
                        cases.append({"open": open_to_json(w), "conclusion": res.certificate})
                    else:
                        cases.append({"open": open_to_json(w), "premise": "notForced"})
                return Forced({"rule": "implies", "depth": b.depth, "cases": cases})
            case Not(body):
                cases = []
                for w in self.window(u):
                    entry = self._refuted_below(w, body)
                    if entry is None:
                        if self.forces(w, body).forced:
                            return self._no(u, w)
                        entry = {"open": open_to_json(w), "notForced": True}
                    cases.append(entry)
                return Forced({"rule": "not", "depth": b.depth, "cases": cases})
            case SigmaSectionExists(fam, args):
                return self._section(u, fam, args)
        raise FormulaError(f"cannot force {phi!r}")

    def _cover_search(self, u, piece_fn, rule: str) -> ForcingResult:
        path = []
        for k in range(self.bounds.depth + 1):
            for c in self.site.covers(u, k):
                entries, failed = [], None
                for p in c.pieces:
                    e = piece_fn(p)
                    if e is None:
                        failed = p
                        break
                    entries.append(e)
                if failed is None:
                    return Forced({"rule": rule, "level": k, "pieces": entries})
            path.append(failed)
        return NotForcedUpTo(self.bounds, path)

    def _section(self, u, fam: str, args: tuple) -> ForcingResult:
        path = []
        for k in range(self.bounds.depth + 1):
            c = self.site.covers(u, k)[0]
            entries = [None] * len(c.pieces)
            failed = None
            for comp in _components(self.site, c.pieces):
                w = _family_witness(fam, args, [c.pieces[i] for i in comp], self.bounds)
                if w is None:
                    failed = c.pieces[comp[0]]
                    break
                for i in comp:
                    entries[i] = {"open": open_to_json(c.pieces[i]),
                                  "witness": [str(x) for x in w] if isinstance(w, tuple) else _wit(w)}
            if failed is None:
                return Forced({"rule": "section", "family": fam, "args": [_wit(a) for a in args],
                               "level": k, "pieces": entries})
            path.append(failed)
        return NotForcedUpTo(self.bounds, path)

    def refutation(self, w, phi: Formula) -> dict | None:
        """Exact evidence that ``w`` forces the negation of ``phi``, if one is found."""
        match phi:
            case Bot():
                return {"rule": "bot"}
            case Atom():
                return {"rule": "atom-false"} if atom_fails_everywhere(w, phi) else None
            case And(l, r):
                for side, psi in (("left", l), ("right", r)):
                    ev = self.refutation(w, psi)
                    if ev is not None:
                        return {"rule": side, "refutation": ev}
                return None
            case Or(l, r):
                el, er = self.refutation(w, l), self.refutation(w, r)
                if el is not None and er is not None:
                    return {"rule": "both", "left": el, "right": er}
                return None
            case ForallNat(v, body):
                for n in range(self.bounds.nat_bound + 1):
                    ev = self.refutation(w, substitute(body, v, n))
                    if ev is not None:
                        return {"rule": "instance", "n": n, "refutation": ev}
                return None
            case Not(body):
                res = self.forces(w, body)
                return {"rule": "forced", "cert": res.certificate} if res.forced else None
            case Implies(l, r):
                rl, er = self.forces(w, l), self.refutation(w, r)
                if rl.forced and er is not None:
                    return {"rule": "counter", "premise": rl.certificate, "refutation": er}
                return None
        return None

    def _refuted_below(self, v, phi: Formula) -> dict | None:
        for w in self.window(v):
            ev = self.refutation(w, phi)
            if ev is not None:
                return {"open": open_to_json(v), "refutedAt": open_to_json(w), "refutation": ev}
        return None


def forces(site: Site, u, phi: Formula, bounds: Bounds = Bounds()) -> ForcingResult:
    return Forcing(site, bounds).forces(u, phi)


# ---------------------------------------------------------------------------
# independent certificate checking


def check_certificate(site: Site, u, phi: Formula, cert: dict, bounds: Bounds = Bounds()) -> bool:
    """Re-validate a certificate from scratch: covers, leaf atoms, witnesses and ranges."""
    try:
        return _check(site, u, phi, cert, bounds)
    except (KeyError, TypeError, ValueError, IndexError, SiteError, FormulaError):
        return False


def _pieces_cover(site: Site, u, entries: list):
    pieces = [open_from_json(site, e["open"]) for e in entries]
    if not pieces or not site.is_cover(Cover(u, tuple(pieces))):
        return None
    return pieces


def _check(site: Site, u, phi: Formula, cert: dict, bounds: Bounds) -> bool:
    rule = cert["rule"]
    if rule == "local" and isinstance(phi, SigmaSectionExists):
        return _check_glued_sections(site, u, phi, cert, bounds)
    if rule == "local":
        pieces = _pieces_cover(site, u, cert["pieces"])
        return pieces is not None and all(
            _check(site, p, phi, e["cert"], bounds) for p, e in zip(pieces, cert["pieces"]))
    match phi:
        case Top():
            return rule == "top"
        case Bot():
            return False
        case Atom():
            return rule == "atom" and atom_holds_everywhere(u, phi)
        case And(l, r):
            return rule == "and" and _check(site, u, l, cert["left"], bounds) and \
                _check(site, u, r, cert["right"], bounds)
        case Or(l, r):
            pieces = _pieces_cover(site, u, cert["pieces"]) if rule == "or" else None
            if pieces is None:
                return False
            return all(_check(site, p, l if e["side"] == "left" else r, e["cert"], bounds)
                       for p, e in zip(pieces, cert["pieces"]) if e["side"] in ("left", "right")) \
                and all(e["side"] in ("left", "right") for e in cert["pieces"])
        case ExistsNatTrunc(v, body) | ExistsRatTrunc(v, body):
            pieces = _pieces_cover(site, u, cert["pieces"]) if rule == "exists" else None
            if pieces is None:
                return False
            for p, e in zip(pieces, cert["pieces"]):
                w = _unwit(e["witness"])
                if isinstance(phi, ExistsNatTrunc):
                    if not isinstance(w, int) or not 0 <= w <= bounds.nat_bound:
                        return False
                elif not isinstance(w, Fraction) or w.denominator > bounds.den_bound:
                    return False
                if not _check(site, p, substitute(body, v, w), e["cert"], bounds):
                    return False
            return True
        case ForallNat(v, body):
            inst = cert["instances"]
            return rule == "forall" and len(inst) == bounds.nat_bound + 1 and all(
                _check(site, u, substitute(body, v, n), c, bounds) for n, c in enumerate(inst))
        case Implies(l, r):
            if rule != "implies":
                return False
            cases = {json_key(c["open"]): c for c in cert["cases"]}
            ev = Forcing(site, bounds)
            for w in budget_window(site, u, bounds.depth):
                c = cases.get(json_key(open_to_json(w)))
                if c is None:
                    return False
                if "conclusion" in c:
                    if not _check(site, w, r, c["conclusion"], bounds):
                        return False
                elif ev.forces(w, l).forced:
                    return False
            return True
        case Not(body):
            if rule != "not":
                return False
            cases = {json_key(c["open"]): c for c in cert["cases"]}
            ev = Forcing(site, bounds)
            for v in budget_window(site, u, bounds.depth):
                c = cases.get(json_key(open_to_json(v)))
                if c is None:
                    return False
                if "refutedAt" in c:
                    w = open_from_json(site, c["refutedAt"])
                    if w not in budget_window(site, v, bounds.depth) or not _check_refutation(site, w, body, c["refutation"], bounds):
                        return False
                elif ev.forces(v, body).forced:
                    return False
            return True
        case SigmaSectionExists(fam, args):
            pieces = _pieces_cover(site, u, cert["pieces"]) if rule == "section" else None
            if pieces is None:
                return False
            wits = []
            for p, e in zip(pieces, cert["pieces"]):
                w = e["witness"]
                w = tuple(Fraction(x) for x in w) if isinstance(w, list) else _unwit(w)
                if not all(atom_holds_everywhere(p, a) for a in _family_atoms(fam, tuple(args), w)):
                    return False
                wits.append(w)
            for i, j in ((i, j) for i in range(len(pieces)) for j in range(i + 1, len(pieces))):
                if site.meet(pieces[i], pieces[j]) is not None and wits[i] != wits[j]:
                    return False
            return True
    return False


def _section_leaves(site: Site, cert: dict) -> list:
    if cert["rule"] == "local":
        return [leaf for e in cert["pieces"] for leaf in _section_leaves(site, e["cert"])]
    return [(open_from_json(site, e["open"]), e["witness"]) for e in cert["pieces"]]


def _check_glued_sections(site: Site, u, phi: SigmaSectionExists, cert: dict, bounds: Bounds) -> bool:
    """A tree of section certificates glues only if all leaf witnesses agree on overlaps."""
    pieces = _pieces_cover(site, u, cert["pieces"])
    if pieces is None or not all(
            _check(site, p, phi, e["cert"], bounds) for p, e in zip(pieces, cert["pieces"])):
        return False
    leaves = _section_leaves(site, cert)
    return all(a[1] == b[1] for a, b in itertools.combinations(leaves, 2)
               if site.meet(a[0], b[0]) is not None)


def _check_refutation(site: Site, w, phi: Formula, ev: dict, bounds: Bounds) -> bool:
    rule = ev["rule"]
    match phi:
        case Bot():
            return rule == "bot"
        case Atom():
            return rule == "atom-false" and atom_fails_everywhere(w, phi)
        case And(l, r):
            return rule in ("left", "right") and _check_refutation(
                site, w, l if rule == "left" else r, ev["refutation"], bounds)
        case Or(l, r):
            return rule == "both" and _check_refutation(site, w, l, ev["left"], bounds) and \
                _check_refutation(site, w, r, ev["right"], bounds)
        case ForallNat(v, body):
            n = ev["n"]
            return rule == "instance" and isinstance(n, int) and 0 <= n <= bounds.nat_bound and \
                _check_refutation(site, w, substitute(body, v, n), ev["refutation"], bounds)
        case Not(body):
            return rule == "forced" and _check(site, w, body, ev["cert"], bounds)
        case Implies(l, r):
            return rule == "counter" and _check(site, w, l, ev["premise"], bounds) and \
                _check_refutation(site, w, r, ev["refutation"], bounds)
    return False


def json_key(x) -> str:
    return repr(x)


# ---------------------------------------------------------------------------
# forcing laws as property suites


SAMPLE_FORMULAS = {
    "cantor": [
        "alpha(0) = 0", "alpha(1) = 1", "alpha(2) = 0", "alpha(0) = 1 & alpha(1) = 0",
        "alpha(0) = 0 | alpha(0) = 1", "alpha(1) = 0 | alpha(2) = 1", "Etrunc n. alpha(n) = 1",
        "Etrunc n. alpha(n) = 0", "~A n. alpha(n) = 0", "~alpha(1) = 1", "alpha(0) = 1 -> alpha(1) = 1",
        "A n. alpha(n) = 0 | alpha(n) = 1", "~~Etrunc n. alpha(n) = 1", "sect alphaOne()", "T",
    ],
    "interval": [
        "within(1/2, 2)", "within(1/3, 3)", "within(1/4, 4) | within(3/4, 4)",
        "Etrunc q. within(q, 2)", "Etrunc q. within(q, 3)", "Etrunc q. within(q, 4)",
        "Etrunc q. within(q, 3) & within(1/2, 1)", "~within(0, 8)", "~~Etrunc q. within(q, 5)",
        "within(1/2, 1) -> Etrunc q. within(q, 6)", "sect within(2)", "sect within(3)",
        "sect withinUpTo(4)", "T", "Etrunc q:Q. ~within(q, 4)",
    ],
}


@dataclass
class LawReport:
    law: str
    site: str
    samples: int
    exercised: int
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {"check": self.law, "parameters": {"site": self.site, "samples": self.samples},
                "status": "pass" if self.ok else "fail", "exercised": self.exercised,
                "counterexample": self.violations[0] if self.violations else None}


def negation_free(phi: Formula) -> bool:
    match phi:
        case Not() | Implies():
            return False
        case And(l, r) | Or(l, r):
            return negation_free(l) and negation_free(r)
        case ForallNat(_, b) | ExistsNatTrunc(_, b) | ExistsRatTrunc(_, b):
            return negation_free(b)
    return True


def _sample_pair(site: Site, rng: random.Random, depth: int):
    opens = site.opens(depth)
    u = rng.choice(opens)
    v = rng.choice([w for w in opens if site.leq(w, u)])
    return u, v


def monotonicity_suite(site: Site, samples: int = 200, seed: int = 0,
                       bounds: Bounds = Bounds(depth=3, nat_bound=8),
                       formulas: list | None = None) -> LawReport:
    """Forced at U implies Forced at every sampled V <= U, with a checking certificate."""
    rng = random.Random(seed)
    ev = Forcing(site, bounds)
    phis = [parse_formula(f) for f in (formulas or SAMPLE_FORMULAS[site.name])]
    violations, exercised = [], 0
    for _ in range(samples):
        phi = rng.choice(phis)
        u, v = _sample_pair(site, rng, 2)
        if not ev.forces(u, phi).forced:
            continue
        exercised += 1
        rv = ev.forces(v, phi)
        if not rv.forced or not check_certificate(site, v, phi, rv.certificate, bounds):
            violations.append({"formula": show(phi), "U": open_to_json(u), "V": open_to_json(v)})
    return LawReport("monotonicity", site.name, samples, exercised, violations)


def local_character_suite(site: Site, samples: int = 200, seed: int = 0,
                          bounds: Bounds = Bounds(depth=2, nat_bound=8),
                          formulas: list | None = None) -> LawReport:
    """If every piece of a cover of U is Forced, the assembled certificate forces U.

    Only propositions are sampled: untruncated sections glue just when their
    witnesses agree, which is the point of the choice countermodel.  Negation-free
    formulas are also re-derived at U with the cover depth added to the budget;
    bounded Not and Implies can lose a verdict when the budget grows, so for them
    the assembled certificate is the whole check.
    """
    rng = random.Random(seed)
    ev = Forcing(site, bounds)
    phis = [parse_formula(f) for f in (formulas or SAMPLE_FORMULAS[site.name])]
    phis = [phi for phi in phis if not isinstance(phi, SigmaSectionExists)]
    violations, exercised = [], 0
    for _ in range(samples):
        phi = rng.choice(phis)
        u = rng.choice(site.opens(2))
        k = rng.randint(1, 2)
        c = site.covers(u, k)[0]
        results = [ev.forces(p, phi) for p in c.pieces]
        if not all(r.forced for r in results):
            continue
        exercised += 1
        cert = {"rule": "local", "level": k,
                "pieces": [{"open": open_to_json(p), "cert": r.certificate} for p, r in zip(c.pieces, results)]}
        assembled = check_certificate(site, u, phi, cert, bounds)
        direct = None
        if negation_free(phi):
            direct = Forcing(site, replace(bounds, depth=bounds.depth + k)).forces(u, phi).forced
        if not assembled or direct is False:
            violations.append({"formula": show(phi), "U": open_to_json(u), "level": k,
                               "assembled": assembled, "direct": direct})
    return LawReport("local-character", site.name, samples, exercised, violations)


def negation_soundness_suite(site: Site, samples: int = 200, seed: int = 0,
                             bounds: Bounds = Bounds(depth=2, nat_bound=8),
                             formulas: list | None = None) -> LawReport:
    """Not(phi) at U and phi at some V <= U are never both Forced."""
    rng = random.Random(seed)
    ev = Forcing(site, bounds)
    phis = [parse_formula(f) for f in (formulas or SAMPLE_FORMULAS[site.name])]
    violations, exercised = [], 0
    for _ in range(samples):
        phi = rng.choice(phis)
        u, v = _sample_pair(site, rng, bounds.depth)
        if ev.forces(u, Not(phi)).forced:
            exercised += 1
            if ev.forces(v, phi).forced:
                violations.append({"formula": show(phi), "U": open_to_json(u), "V": open_to_json(v)})
    return LawReport("negation-soundness", site.name, samples, exercised, violations)
