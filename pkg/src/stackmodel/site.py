"""Posets of basic opens with covering families: a rational interval base and Cantor space."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator


class SiteError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class IntervalOpen:
    """The open interval (lo, hi) of the unit interval."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if not 0 <= self.lo < self.hi <= 1:
            raise SiteError(f"not an interval in [0,1]: ({self.lo}, {self.hi})")
        object.__setattr__(self, "_hash", hash((self.lo, self.hi)))

    def __hash__(self):
        return self._hash

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def __str__(self):
        return f"({self.lo},{self.hi})"


@dataclass(frozen=True, order=True)
class CantorOpen:
    """The cylinder of sequences extending ``prefix``."""

    prefix: str

    def __post_init__(self):
        if set(self.prefix) - {"0", "1"}:
            raise SiteError(f"not a binary string: {self.prefix!r}")

    def __len__(self):
        return len(self.prefix)

    def __str__(self):
        return "[" + (self.prefix or "ε") + "]"


@dataclass(frozen=True)
class Cover:
    target: object
    pieces: tuple

    def __post_init__(self):
        if not self.pieces:
            raise SiteError("a cover needs at least one piece")
        object.__setattr__(self, "_hash", hash((self.target, self.pieces)))

    def __hash__(self):
        return self._hash


class Site:
    name = "site"
    root: object

    def leq(self, v, u) -> bool:
        raise NotImplementedError

    def meet(self, u, v):
        raise NotImplementedError

    def covers(self, u, level: int) -> list[Cover]:
        raise NotImplementedError

    def is_cover(self, c: Cover) -> bool:
        raise NotImplementedError

    def parse_open(self, text: str):
        raise NotImplementedError

    def iter_opens_below(self, u, depth: int) -> Iterator:
        """``u`` and every piece of its covers up to ``depth``, in canonical order."""
        seen = {u}
        yield u
        for k in range(1, depth + 1):
            for c in self.covers(u, k):
                for p in c.pieces:
                    if p not in seen:
                        seen.add(p)
                        yield p

    def opens_below(self, u, depth: int) -> list:
        return list(self.iter_opens_below(u, depth))

    def opens(self, depth: int) -> list:
        return self.opens_below(self.root, depth)

    def refines(self, fine: Cover, coarse: Cover) -> bool:
        return all(any(self.leq(p, q) for q in coarse.pieces) for p in fine.pieces)

    def refine(self, c1: Cover, c2: Cover) -> Cover:
        if c1.target != c2.target:
            raise SiteError("covers of different opens")
        pieces = []
        for p in c1.pieces:
            for q in c2.pieces:
                r = self.meet(p, q)
                if r is not None and r not in pieces:
                    pieces.append(r)
        # a meet inside another meet adds nothing to the union; dropping it keeps refine(c, c) == c
        kept = [p for p in pieces if not any(q != p and self.leq(p, q) for q in pieces)]
        return Cover(c1.target, tuple(kept))


class IntervalSite(Site):
    name = "interval"
    root = IntervalOpen(Fraction(0), Fraction(1))

    def leq(self, v: IntervalOpen, u: IntervalOpen) -> bool:
        return u.lo <= v.lo and v.hi <= u.hi

    def meet(self, u: IntervalOpen, v: IntervalOpen) -> IntervalOpen | None:
        lo, hi = max(u.lo, v.lo), min(u.hi, v.hi)
        return IntervalOpen(lo, hi) if lo < hi else None

    def piece(self, u: IntervalOpen, level: int, i: int) -> IntervalOpen:
        L = u.length
        step, pad = L / 2**level, L / 2 ** (level + 2)
        lo = max(u.lo, u.lo + i * step - pad)
        hi = min(u.hi, u.lo + (i + 1) * step + pad)
        return IntervalOpen(lo, hi)

    def covers(self, u: IntervalOpen, level: int) -> list[Cover]:
        return [Cover(u, tuple(self.piece(u, level, i) for i in range(2**level)))]

    def is_cover(self, c: Cover) -> bool:
        if not all(self.leq(p, c.target) for p in c.pieces):
            return False
        # union of open intervals equals the target: sweep, overlapping strictly
        ps = sorted(c.pieces)
        if ps[0].lo != c.target.lo:
            return False
        reach = ps[0].hi
        for p in ps[1:]:
            if p.lo >= reach:
                return False
            reach = max(reach, p.hi)
        return reach == c.target.hi

    def parse_open(self, text: str) -> IntervalOpen:
        m = re.fullmatch(r"\s*\(?\s*([0-9/]+)\s*,\s*([0-9/]+)\s*\)?\s*", text)
        if not m:
            raise SiteError(f"cannot parse interval {text!r}; expected (lo,hi)")
        try:
            return IntervalOpen(Fraction(m[1]), Fraction(m[2]))
        except (ValueError, ZeroDivisionError) as e:
            raise SiteError(str(e)) from None


class CantorSite(Site):
    name = "cantor"
    root = CantorOpen("")

    def leq(self, v: CantorOpen, u: CantorOpen) -> bool:
        return v.prefix.startswith(u.prefix)

    def meet(self, u: CantorOpen, v: CantorOpen) -> CantorOpen | None:
        if u.prefix.startswith(v.prefix):
            return u
        if v.prefix.startswith(u.prefix):
            return v
        return None

    def covers(self, u: CantorOpen, level: int) -> list[Cover]:
        return [Cover(u, tuple(CantorOpen(u.prefix + "".join(bits)) for bits in _words(level)))]

    def is_cover(self, c: Cover) -> bool:
        if not all(self.leq(p, c.target) for p in c.pieces):
            return False
        # every point of [target] lies in a piece: check all extensions to the deepest length
        depth = max(len(p) for p in c.pieces)
        base = c.target.prefix
        return all(
            any((base + w).startswith(p.prefix) for p in c.pieces)
            for w in ("".join(b) for b in _words(depth - len(base)))
        )

    def parse_open(self, text: str) -> CantorOpen:
        t = text.strip().strip("[]")
        if t in ("", "e", "ε", "eps"):
            t = ""
        return CantorOpen(t)


def _words(k: int) -> Iterator[tuple]:
    if k == 0:
        yield ()
        return
    for w in _words(k - 1):
        yield w + ("0",)
        yield w + ("1",)


def interval_site() -> IntervalSite:
    return IntervalSite()


def cantor_site() -> CantorSite:
    return CantorSite()


SITES = {"interval": interval_site, "cantor": cantor_site}


def get_site(name: str) -> Site:
    try:
        return SITES[name]()
    except KeyError:
        raise SiteError(f"unknown site {name!r}; choose from {', '.join(SITES)}") from None


def is_chain_connected(c: Cover, site: Site | None = None) -> bool:
    """Connectivity of the overlap graph of an interval cover."""
    if not all(isinstance(p, IntervalOpen) for p in c.pieces):
        raise SiteError("chain connectivity is defined for interval covers")
    site = site or IntervalSite()
    n = len(c.pieces)
    reached, frontier = {0}, [0]
    while frontier:
        i = frontier.pop()
        for j in range(n):
            if j not in reached and site.meet(c.pieces[i], c.pieces[j]) is not None:
                reached.add(j)
                frontier.append(j)
    return len(reached) == n


def open_to_json(u) -> object:
    if isinstance(u, IntervalOpen):
        return [str(u.lo), str(u.hi)]
    return u.prefix


def open_from_json(site: Site, data) -> object:
    if isinstance(site, IntervalSite):
        return IntervalOpen(Fraction(data[0]), Fraction(data[1]))
    return CantorOpen(data)


def cover_to_json(c: Cover) -> dict:
    return {"target": open_to_json(c.target), "pieces": [open_to_json(p) for p in c.pieces]}



def grid_cover(site: Site, u, depth: int) -> tuple[Cover, tuple]:
    """``u`` cut by the fixed global grid ``covers(root, depth)``, with a grid key per piece.

    Relative covers of nested opens need not nest on the interval and
    compound in depth on both sites; cutting every open by one global grid
    makes restriction a matter of matching keys.  On Cantor space the cut of
    ``[s]`` is its own cover at level ``depth - |s|`` (or ``[s]`` alone).
    """
    keyed = [(j, site.meet(u, q)) for j, q in enumerate(site.covers(site.root, depth)[0].pieces)]
    keyed = [(j, p) for j, p in keyed if p is not None]
    return Cover(u, tuple(p for _, p in keyed)), tuple(j for j, _ in keyed)
