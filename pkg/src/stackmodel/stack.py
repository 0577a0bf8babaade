"""Prestacks of finite groupoids over a site, descent data and stackification."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from .groupoid import (
    BoundExceeded, FiniteGroupoid, Functor, Mor, codiscrete, discrete, ident,
    is_ident, validate_groupoid,
)
from .site import (
    CantorOpen, CantorSite, Cover, IntervalSite, Site, cover_to_json, grid_cover,
    open_to_json,
)

DEFAULT_BUDGET = 20_000


class MalformedDatum(ValueError):
    pass


class RestrictionUndefined(ValueError):
    pass


@dataclass(eq=False)
class Prestack:
    """A strict groupoid-valued presheaf: fibers plus restriction along ``V <= U``."""

    name: str
    site: Site
    fiber: Callable
    restrict_obj: Callable = lambda v, u, x: x
    restrict_mor: Callable = lambda v, u, f: f
    _cache: dict = field(default_factory=dict, repr=False)  # fibers and restrictions

    def at(self, u) -> FiniteGroupoid:
        if u not in self._cache:
            self._cache[u] = self.fiber(u)
        return self._cache[u]

    def res(self, v, u, x):
        if v == u:
            return x
        key = ("obj", v, u, x)
        if key not in self._cache:
            self._cache[key] = self.restrict_obj(v, u, x)
        return self._cache[key]

    def res_mor(self, v, u, f):
        if v == u:
            return f
        key = ("mor", v, u, f)
        if key not in self._cache:
            self._cache[key] = self.restrict_mor(v, u, f)
        return self._cache[key]

    def restrict(self, v, u) -> Functor:
        if not self.site.leq(v, u):
            raise RestrictionUndefined(f"{v} is not below {u}")
        return Functor(self.at(u), self.at(v), lambda x: self.res(v, u, x),
                       lambda f: self.res_mor(v, u, f))


@dataclass(frozen=True)
class DescentDatum:
    cover: Cover
    sections: tuple
    transitions: tuple  # sorted ((i, j), morphism) pairs

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.cover, self.sections, self.transitions)))

    def __hash__(self):
        return self._hash

    def transition_map(self) -> dict:
        return dict(self.transitions)


def _meets(site: Site, cover: Cover) -> dict:
    ps = cover.pieces
    return {(i, j): m for i in range(len(ps)) for j in range(len(ps))
            if (m := site.meet(ps[i], ps[j])) is not None}


def transition(F: Prestack, d: DescentDatum, i: int, j: int, meets: dict | None = None):
    """``phi_ij : x_i|ij -> x_j|ij``, from the stored entry or derived for ``i >= j``."""
    meets = meets if meets is not None else _meets(F.site, d.cover)
    table = d.transition_map()
    if (i, j) in table:
        return table[(i, j)]
    m = meets[(i, j)]
    if i == j:
        return F.at(m).identity(F.res(m, d.cover.pieces[i], d.sections[i]))
    if (j, i) in table:
        return F.at(m).inverse(table[(j, i)])
    raise MalformedDatum(f"missing transition for pieces {i}, {j}")


def check_cocycle(F: Prestack, d: DescentDatum) -> bool:
    """Identity on the diagonal and the cocycle law on every defined triple overlap."""
    site, ps = F.site, d.cover.pieces
    meets = _meets(site, d.cover)
    for (i, j) in meets:
        if i < j and (i, j) not in d.transition_map() and (j, i) not in d.transition_map():
            raise MalformedDatum(f"missing transition for pieces {i}, {j}")
    phi = {k: transition(F, d, *k, meets=meets) for k in meets}
    for (i, j), f in phi.items():
        m = meets[(i, j)]
        src = F.res(m, ps[i], d.sections[i])
        dst = F.res(m, ps[j], d.sections[j])
        if f not in F.at(m).hom(src, dst):
            return False
        if i == j and f != F.at(m).identity(src):
            return False
    for i, j, k in itertools.product(range(len(ps)), repeat=3):
        if (i, j) not in meets or (j, k) not in meets:
            continue
        t = site.meet(meets[(i, j)], ps[k])
        if t is None:
            continue
        lhs = F.at(t).compose(F.res_mor(t, meets[(j, k)], phi[(j, k)]),
                              F.res_mor(t, meets[(i, j)], phi[(i, j)]))
        if lhs != F.res_mor(t, meets[(i, k)], phi[(i, k)]):
            return False
    return True


def descent_data(F: Prestack, cover: Cover, budget: int = DEFAULT_BUDGET) -> Iterator[DescentDatum]:
    """Every cocycle-valid datum on ``cover``, by backtracking over pieces."""
    site, ps = F.site, cover.pieces
    n = len(ps)
    meets = _meets(site, cover)
    count = 0

    def rec(i, secs, trans):
        nonlocal count
        if i == n:
            count += 1
            if count > budget:
                raise BoundExceeded(f"more than {budget} descent data on {len(ps)} pieces")
            yield DescentDatum(cover, tuple(secs), tuple(sorted(trans.items())))
            return
        earlier = [j for j in range(i) if (j, i) in meets]
        for x in F.at(ps[i]).objects:
            options = []
            for j in earlier:
                m = meets[(j, i)]
                options.append(F.at(m).hom(F.res(m, ps[j], secs[j]), F.res(m, ps[i], x)))
            for choice in itertools.product(*options):
                new = dict(trans)
                new.update({(j, i): f for j, f in zip(earlier, choice)})
                if _cocycle_upto(F, ps, meets, new, i):
                    yield from rec(i + 1, secs + [x], new)

    yield from rec(0, [], {})


def _cocycle_upto(F, ps, meets, trans, i) -> bool:
    site = F.site
    for j, k in itertools.combinations(range(i), 2):
        if (j, k) not in meets or (j, i) not in meets or (k, i) not in meets:
            continue
        t = site.meet(meets[(j, k)], ps[i])
        if t is None:
            continue
        lhs = F.at(t).compose(F.res_mor(t, meets[(k, i)], trans[(k, i)]),
                              F.res_mor(t, meets[(j, k)], trans[(j, k)]))
        if lhs != F.res_mor(t, meets[(j, i)], trans[(j, i)]):
            return False
    return True


def _descent_hom(F: Prestack, meets: dict, d1: DescentDatum, d2: DescentDatum) -> list:
    ps = d1.cover.pieces
    t1, t2 = d1.transition_map(), d2.transition_map()
    out = []

    def rec(i, comps):
        if i == len(ps):
            label = tuple(comps)
            out.append(ident(d1) if d1 == d2 and all(is_ident(c) for c in comps)
                       else Mor(d1, d2, label))
            return
        for psi in F.at(ps[i]).hom(d1.sections[i], d2.sections[i]):
            ok = True
            for j in range(i):
                if (j, i) not in meets:
                    continue
                m = meets[(j, i)]
                G = F.at(m)
                a = G.compose(t2[(j, i)], F.res_mor(m, ps[j], comps[j]))
                b = G.compose(F.res_mor(m, ps[i], psi), t1[(j, i)])
                if a != b:
                    ok = False
                    break
            if ok:
                rec(i + 1, comps + [psi])

    rec(0, [])
    return out


def descent_groupoid(F: Prestack, cover: Cover, budget: int = DEFAULT_BUDGET) -> FiniteGroupoid:
    """Lazy groupoid of descent data on ``cover`` and their morphisms."""
    meets = _meets(F.site, cover)
    ps = cover.pieces

    def parts(f: Mor, d: DescentDatum):
        if f.label is None:
            return [F.at(p).identity(x) for p, x in zip(ps, d.sections)]
        return list(f.label)

    def comp(g, f):
        comps = [F.at(p).compose(b, a) for p, a, b in zip(ps, parts(f, f.src), parts(g, g.src))]
        if f.src == g.dst and all(is_ident(c) for c in comps):
            return ident(f.src)
        return Mor(f.src, g.dst, tuple(comps))

    D = FiniteGroupoid(lambda: descent_data(F, cover, budget),
                       lambda a, b: _descent_hom(F, meets, a, b), comp,
                       name=f"descent({F.name})")
    # families of unique morphisms: descent over propositions is a proposition
    D.prop_hint = all(F.at(p).prop_hint for p in ps)
    return D


def effective_datum(F: Prestack, cover: Cover, a) -> DescentDatum:
    """The datum induced by a section over the whole target."""
    meets = _meets(F.site, cover)
    secs = tuple(F.res(p, cover.target, a) for p in cover.pieces)
    trans = {(i, j): F.at(m).identity(F.res(m, cover.target, a))
             for (i, j), m in meets.items() if i < j}
    return DescentDatum(cover, secs, tuple(sorted(trans.items())))


def comparison(F: Prestack, cover: Cover, budget: int = DEFAULT_BUDGET) -> Functor:
    D = descent_groupoid(F, cover, budget)
    ps = cover.pieces

    def mor(f):
        src, dst = effective_datum(F, cover, f.src), effective_datum(F, cover, f.dst)
        comps = tuple(F.res_mor(p, cover.target, f) for p in ps)
        return ident(src) if src == dst and all(is_ident(c) for c in comps) else Mor(src, dst, comps)

    return Functor(F.at(cover.target), D, lambda a: effective_datum(F, cover, a), mor)


def is_datum_valid(F: Prestack, d: DescentDatum) -> bool:
    if len(d.sections) != len(d.cover.pieces):
        return False
    if any(x not in F.at(p).objects for p, x in zip(d.cover.pieces, d.sections)):
        return False
    try:
        return check_cocycle(F, d)
    except MalformedDatum:
        return False


# ---------------------------------------------------------------------------
# the stack condition


@dataclass
class CoverRecord:
    open: object
    level: int
    cover: Cover
    fullyFaithful: bool
    essentiallySurjective: bool
    counterexample: dict | None = None

    def as_dict(self) -> dict:
        out = {"open": open_to_json(self.open), "level": self.level, "cover": cover_to_json(self.cover),
               "fullyFaithful": self.fullyFaithful, "essentiallySurjective": self.essentiallySurjective}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass
class StackReport:
    prestack: str
    site: str
    depth: int
    records: list

    @property
    def is_stack(self) -> bool:
        return all(r.fullyFaithful and r.essentiallySurjective for r in self.records)

    def as_dict(self) -> dict:
        return {"check": "stack", "parameters": {"prestack": self.prestack, "site": self.site,
                                                 "depth": self.depth},
                "status": "pass" if self.is_stack else "fail",
                "records": [r.as_dict() for r in self.records]}


def datum_to_json(d: DescentDatum) -> dict:
    return {"cover": cover_to_json(d.cover), "sections": [repr(x) for x in d.sections],
            "transitions": [[i, j, repr(f)] for (i, j), f in d.transitions]}


def check_cover(F: Prestack, cover: Cover, level: int, budget: int = DEFAULT_BUDGET) -> CoverRecord:
    C = comparison(F, cover, budget)
    A, D = C.src, C.dst
    counter = None
    ff = True
    for a, b in itertools.product(A.objects, repeat=2):
        image = [C.mor(f) for f in A.hom(a, b)]
        target = D.hom(C.obj(a), C.obj(b))
        if len(set(image)) != len(image) or set(image) != set(target):
            ff = False
            counter = {"objects": [repr(a), repr(b)], "sourceHom": len(image), "descentHom": len(target)}
            break
    es = True
    images = [C.obj(a) for a in A.objects]
    for d in D.objects:
        if not any(D.hom(c, d) for c in images):
            es = False
            counter = counter or {"unglued": datum_to_json(d)}
            break
    return CoverRecord(cover.target, level, cover, ff, es, counter)


def is_stack(F: Prestack, depth: int, budget: int = DEFAULT_BUDGET, opens=None) -> StackReport:
    site = F.site
    records = []
    for u in (opens if opens is not None else site.opens(depth)):
        for k in range(depth + 1):
            for c in site.covers(u, k):
                records.append(check_cover(F, c, k, budget))
    return StackReport(F.name, site.name, depth, records)


# ---------------------------------------------------------------------------
# stackification


def _container(site: Site, piece, key, coarse: Cover, coarse_keys: tuple) -> int:
    if key in coarse_keys:
        i = coarse_keys.index(key)
        if site.leq(piece, coarse.pieces[i]):
            return i
    for i, q in enumerate(coarse.pieces):
        if site.leq(piece, q):
            return i
    raise RestrictionUndefined(f"piece {piece} lies in no piece of the cover of {coarse.target}")


def pull_datum(F: Prestack, d: DescentDatum, keys: tuple, fine: Cover, fine_keys: tuple) -> DescentDatum:
    """Restrict a datum to a cover whose pieces each lie in a piece of ``d.cover``."""
    site = F.site
    coarse = d.cover
    owner = [_container(site, p, k, coarse, keys) for p, k in zip(fine.pieces, fine_keys)]
    cmeets = _meets(site, coarse)
    secs = tuple(F.res(p, coarse.pieces[a], d.sections[a]) for p, a in zip(fine.pieces, owner))
    trans = {}
    for (i, j), m in _meets(site, fine).items():
        if i < j:
            a, b = owner[i], owner[j]
            phi = transition(F, d, a, b, cmeets)
            trans[(i, j)] = F.res_mor(m, cmeets[(a, b)], phi)
    return DescentDatum(fine, secs, tuple(sorted(trans.items())))


def pull_morphism(F: Prestack, f: Mor, keys: tuple, fine: Cover, fine_keys: tuple) -> Mor:
    site = F.site
    coarse = f.src.cover
    src = pull_datum(F, f.src, keys, fine, fine_keys)
    dst = pull_datum(F, f.dst, keys, fine, fine_keys)
    owner = [_container(site, p, k, coarse, keys) for p, k in zip(fine.pieces, fine_keys)]
    if f.label is None:
        parts = [F.at(p).identity(x) for p, x in zip(coarse.pieces, f.src.sections)]
    else:
        parts = list(f.label)
    comps = tuple(F.res_mor(p, coarse.pieces[a], parts[a]) for p, a in zip(fine.pieces, owner))
    return ident(src) if src == dst and all(is_ident(c) for c in comps) else Mor(src, dst, comps)


def stackify(F: Prestack, depth: int, budget: int = DEFAULT_BUDGET) -> Prestack:
    """Descent data over the depth-``depth`` stackification cover of each open."""
    site = F.site
    covers: dict = {}

    def cover_of(u):
        if u not in covers:
            covers[u] = grid_cover(site, u, depth)
        return covers[u]

    def fiber(u):
        return descent_groupoid(F, cover_of(u)[0], budget)

    def res_obj(v, u, d):
        fine, fkeys = cover_of(v)
        return pull_datum(F, d, cover_of(u)[1], fine, fkeys)

    def res_mor(v, u, f):
        fine, fkeys = cover_of(v)
        return pull_morphism(F, f, cover_of(u)[1], fine, fkeys)

    return Prestack(f"stackify({F.name},{depth})", site, fiber, res_obj, res_mor)


def codiscrete_replacement(F: Prestack) -> Prestack:
    return Prestack(f"codiscrete({F.name})", F.site,
                    lambda u: codiscrete(lambda: F.at(u).objects, "codiscrete"),
                    F.restrict_obj,
                    lambda v, u, f: Mor(F.restrict_obj(v, u, f.src), F.restrict_obj(v, u, f.dst), None))


def trunc_stack(F: Prestack, depth: int, budget: int = DEFAULT_BUDGET) -> Prestack:
    """Propositional truncation: stackify the objectwise codiscrete replacement."""
    G = stackify(codiscrete_replacement(F), depth, budget)
    G.name = f"trunc({F.name},{depth})"
    return G


def has_section(F: Prestack, u) -> bool:
    return not F.at(u).is_empty()


def depth_comparison(F: Prestack, u, depth: int) -> Functor:
    """Refinement from the depth-``d`` stackified fiber to the depth-``d+1`` one."""
    site = F.site
    coarse, ckeys = grid_cover(site, u, depth)
    fine, fkeys = grid_cover(site, u, depth + 1)
    fkeys_local = tuple(("fine", k) for k in fkeys)  # never match coarse keys: use containment
    A = stackify(F, depth).at(u)
    B = stackify(F, depth + 1).at(u)
    return Functor(A, B, lambda d: pull_datum(F, d, ckeys, fine, fkeys_local),
                   lambda f: pull_morphism(F, f, ckeys, fine, fkeys_local))


# ---------------------------------------------------------------------------
# catalog of built-in prestacks


def _bz2() -> FiniteGroupoid:
    e, t = ident("*"), Mor("*", "*", "flip")
    table = {(e, e): e, (e, t): t, (t, e): t, (t, t): e}
    return FiniteGroupoid.from_tables(["*"], {("*", "*"): (e, t)}, table, {"*": e}, "BZ2")


def _rationals_in(lo: Fraction, hi: Fraction, den: int) -> list:
    out = set()
    for q in range(1, den + 1):
        for p in range(int(lo * q) - 1, int(hi * q) + 2):
            r = Fraction(p, q)
            if lo <= r <= hi:
                out.add(r)
    return sorted(out)


def constant(site: Site, G: FiniteGroupoid, name: str) -> Prestack:
    return Prestack(name, site, lambda u: G)


def within_witnesses(u, n: int, den: int) -> list:
    """Rationals q with denominator at most ``den`` and ``u`` inside the 1/n-ball around q."""
    return _rationals_in(u.hi - Fraction(1, n), u.lo + Fraction(1, n), den)


def alpha_witnesses(u: CantorOpen, nat_bound: int) -> list:
    return [i for i in range(min(len(u), nat_bound + 1)) if u.prefix[i] == "1"]


def _halves(site: IntervalSite):
    left, right = site.covers(site.root, 1)[0].pieces

    def fiber(u):
        return discrete([lab for lab, h in (("L", left), ("R", right)) if site.leq(u, h)], "halves")

    return fiber


CATALOG = {
    "interval": ["terminal", "const-discrete-2", "const-codiscrete-2", "const-bz2",
                 "rational-bounded-4", "halves", "within-witness-2-4", "within-witness-3-6"],
    "cantor": ["terminal", "const-discrete-2", "const-codiscrete-2", "const-bz2",
               "deep-only", "alpha-witness-8"],
}


def get_prestack(name: str, site: Site) -> Prestack:
    """Look up a catalog prestack; numeric suffixes are parameters."""
    if name == "terminal":
        return constant(site, discrete([()], "terminal"), name)
    if m := re.fullmatch(r"const-discrete-(\d+)", name):
        return constant(site, discrete(range(int(m[1]))), name)
    if m := re.fullmatch(r"const-codiscrete-(\d+)", name):
        return constant(site, codiscrete(range(int(m[1]))), name)
    if name == "const-bz2":
        return constant(site, _bz2(), name)
    if isinstance(site, IntervalSite):
        if m := re.fullmatch(r"rational-bounded-(\d+)", name):
            return constant(site, discrete(_rationals_in(Fraction(0), Fraction(1), int(m[1]))), name)
        if name == "halves":
            return Prestack(name, site, _halves(site))
        if m := re.fullmatch(r"within-witness-(\d+)-(\d+)", name):
            n, den = int(m[1]), int(m[2])
            if n < 1 or den < 1:
                raise KeyError(name)
            return Prestack(name, site, lambda u: discrete(within_witnesses(u, n, den), name))
    if isinstance(site, CantorSite):
        if name == "deep-only":
            return Prestack(name, site, lambda u: discrete([()] if len(u) >= 1 else [], name))
        if m := re.fullmatch(r"alpha-witness-(\d+)", name):
            bound = int(m[1])
            return Prestack(name, site, lambda u: discrete(alpha_witnesses(u, bound), name))
    raise KeyError(f"no prestack {name!r} on the {site.name} site; "
                   f"available: {', '.join(CATALOG[site.name])}")


def check_restrictions(F: Prestack, opens: list) -> str | None:
    """Strict functoriality of restriction on every comparable pair and triple among ``opens``."""
    site = F.site
    for u in opens:
        for x in F.at(u).objects:
            if F.restrict(u, u).obj(x) != x:
                return f"restriction to {u} itself moves {x!r}"
        for v in opens:
            if not site.leq(v, u):
                continue
            for w in opens:
                if not site.leq(w, v):
                    continue
                for x in F.at(u).objects:
                    if F.res(w, v, F.res(v, u, x)) != F.res(w, u, x):
                        return f"restriction {u} -> {v} -> {w} is not strict on {x!r}"
    return None


def validate_fibers(F: Prestack, opens: list) -> str | None:
    for u in opens:
        report = validate_groupoid(F.at(u))
        if report["status"] != "valid":
            return f"fiber at {u}: {report['counterexample']}"
    return None
