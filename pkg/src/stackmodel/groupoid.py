"""Finite groupoids, functors between them, and exhaustive law checking.

Built-in constructions use ``Mor(src, dst, label)`` morphisms with the
convention that ``label is None`` together with ``src == dst`` marks the
identity; every composite is normalized back to that form.  Groupoids given
by explicit tables (``FiniteGroupoid.from_tables``) may use any hashable ids.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, NamedTuple


class MalformedGroupoid(Exception):
    pass


class BoundExceeded(Exception):
    pass


class Mor(NamedTuple):
    src: Hashable
    dst: Hashable
    label: Hashable = None


def ident(x) -> Mor:
    return Mor(x, x, None)


def is_ident(f: Mor) -> bool:
    return f.label is None and f.src == f.dst


class FiniteGroupoid:
    """A finite groupoid presented by (possibly lazy) hom and compose functions."""

    def __init__(self, objects, hom: Callable, compose: Callable,
                 identity: Callable = ident, src: Callable | None = None,
                 dst: Callable | None = None, name: str = ""):
        self._objects = objects
        self._hom = hom
        self._compose = compose
        self._identity = identity
        self._src = src or (lambda f: f.src)
        self._dst = dst or (lambda f: f.dst)
        self._hom_cache: dict = {}
        self._inv_cache: dict = {}
        self.name = name
        # set when the construction guarantees every hom-set is a singleton
        self.prop_hint = False

    @property
    def objects(self) -> tuple:
        if callable(self._objects):
            self._objects = tuple(self._objects())
        return self._objects

    def is_empty(self) -> bool:
        """Emptiness without materializing a lazy object list."""
        if callable(self._objects):
            return next(iter(self._objects()), None) is None
        return not self._objects

    def hom(self, a, b) -> tuple:
        key = (a, b)
        if key not in self._hom_cache:
            self._hom_cache[key] = tuple(self._hom(a, b))
        return self._hom_cache[key]

    def compose(self, g, f):
        """``g`` after ``f``."""
        return self._compose(g, f)

    def identity(self, a):
        return self._identity(a)

    def src(self, f):
        return self._src(f)

    def dst(self, f):
        return self._dst(f)

    def morphisms(self) -> Iterable:
        for a in self.objects:
            for b in self.objects:
                yield from self.hom(a, b)

    def inverse(self, f):
        if f in self._inv_cache:
            return self._inv_cache[f]
        a, b = self.src(f), self.dst(f)
        if isinstance(f, Mor) and f.label is None:
            inv = Mor(b, a, None)
        else:
            ida = self.identity(a)
            for g in self.hom(b, a):
                if self.compose(g, f) == ida:
                    inv = g
                    break
            else:
                raise MalformedGroupoid(f"no inverse for {f!r}")
        self._inv_cache[f] = inv
        return inv

    @property
    def homs(self) -> dict:
        return {(a, b): self.hom(a, b) for a in self.objects for b in self.objects}

    @property
    def compose_table(self) -> dict:
        table = {}
        for a, b, c in itertools.product(self.objects, repeat=3):
            for f in self.hom(a, b):
                for g in self.hom(b, c):
                    table[(g, f)] = self.compose(g, f)
        return table

    @property
    def identities(self) -> dict:
        return {a: self.identity(a) for a in self.objects}

    def size(self) -> tuple[int, int]:
        return len(self.objects), sum(1 for _ in self.morphisms())

    def __repr__(self):
        n = len(self.objects) if not callable(self._objects) else "?"
        return f"FiniteGroupoid({self.name or 'anonymous'}, objects={n})"

    @classmethod
    def from_tables(cls, objects: Iterable, homs: dict, compose: dict,
                    identities: dict, name: str = "") -> "FiniteGroupoid":
        objects = tuple(objects)
        src, dst = {}, {}
        for (a, b), ms in homs.items():
            for m in ms:
                src[m], dst[m] = a, b

        def comp(g, f):
            try:
                return compose[(g, f)]
            except KeyError:
                raise MalformedGroupoid(f"composition of {g!r} after {f!r} is undefined") from None

        return cls(objects, lambda a, b: homs.get((a, b), ()), comp,
                   identities.__getitem__, src.__getitem__, dst.__getitem__, name)


def discrete(objects: Iterable, name: str = "discrete") -> FiniteGroupoid:
    objs = tuple(objects)
    return FiniteGroupoid(
        objs,
        lambda a, b: (ident(a),) if a == b else (),
        lambda g, f: f,
        name=name,
    )


def codiscrete(objects: Iterable, name: str = "codiscrete") -> FiniteGroupoid:
    objs = objects if callable(objects) else tuple(objects)
    G = FiniteGroupoid(
        objs,
        lambda a, b: (Mor(a, b, None),),
        lambda g, f: Mor(f.src, g.dst, None),
        name=name,
    )
    G.prop_hint = True
    return G


def empty() -> FiniteGroupoid:
    return discrete((), "empty")


def perm_apply(f: Mor, i: int) -> int:
    return i if f.label is None else f.label[i]


def finite_sets(max_card: int) -> FiniteGroupoid:
    """Skeletal groupoid of finite sets {0..k-1}, k <= max_card, with bijections."""

    def hom(a, b):
        if a != b:
            return ()
        out = []
        for p in itertools.permutations(range(a)):
            out.append(ident(a) if p == tuple(range(a)) else Mor(a, a, p))
        return out

    def comp(g, f):
        if f.label is None:
            return g
        if g.label is None:
            return f
        p = tuple(g.label[f.label[i]] for i in range(f.src))
        return ident(f.src) if p == tuple(range(f.src)) else Mor(f.src, g.dst, p)

    return FiniteGroupoid(tuple(range(max_card + 1)), hom, comp, name="finite-sets")


# ---------------------------------------------------------------------------
# validation


def validate_groupoid(G: FiniteGroupoid) -> dict:
    """Check the groupoid axioms exhaustively; report the first violation.

    Raises ``MalformedGroupoid`` when composition is not total.
    """
    objs = G.objects
    params = {"objects": len(objs), "morphisms": sum(1 for _ in G.morphisms())}

    def fail(law, **witness):
        return {"check": "groupoid", "parameters": params, "status": "invalid",
                "counterexample": {"law": law, **{k: repr(v) for k, v in witness.items()}}}

    for a in objs:
        if G.identity(a) not in G.hom(a, a):
            return fail("identity", object=a)
    for a, b in itertools.product(objs, repeat=2):
        for f in G.hom(a, b):
            if G.compose(f, G.identity(a)) != f or G.compose(G.identity(b), f) != f:
                return fail("unit", morphism=f)
            for c in objs:
                for g in G.hom(b, c):
                    if G.compose(g, f) not in G.hom(a, c):
                        return fail("typing", pair=(g, f))
    for a, b, c, d in itertools.product(objs, repeat=4):
        for f in G.hom(a, b):
            for g in G.hom(b, c):
                gf = G.compose(g, f)
                for h in G.hom(c, d):
                    if G.compose(h, gf) != G.compose(G.compose(h, g), f):
                        return fail("associativity", triple=(h, g, f))
    for a, b in itertools.product(objs, repeat=2):
        for f in G.hom(a, b):
            if not any(G.compose(g, f) == G.identity(a) and G.compose(f, g) == G.identity(b)
                       for g in G.hom(b, a)):
                return fail("inverse", morphism=f)
    return {"check": "groupoid", "parameters": params, "status": "valid"}


def is_prop_groupoid(G: FiniteGroupoid, exhaustive: bool = False) -> bool:
    """All objects uniquely isomorphic: every hom-set is a singleton.

    A nonempty hom-set of a groupoid is a torsor for the automorphisms of its
    source, so the hom-sets out of one object decide the question; pass
    ``exhaustive`` to inspect every pair instead.
    """
    objs = G.objects
    if exhaustive:
        return all(len(G.hom(a, b)) == 1 for a in objs for b in objs)
    return not objs or all(len(G.hom(objs[0], b)) == 1 for b in objs)


def components(G: FiniteGroupoid) -> list[list]:
    objs = list(G.objects)
    parent = {a: a for a in objs}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a in objs:
        for b in objs:
            if find(a) != find(b) and G.hom(a, b):
                parent[find(a)] = find(b)
    groups: dict = {}
    for a in objs:
        groups.setdefault(find(a), []).append(a)
    return list(groups.values())


# ---------------------------------------------------------------------------
# functors and equivalences


@dataclass
class Functor:
    src: FiniteGroupoid
    dst: FiniteGroupoid
    obj: Callable
    mor: Callable


def identity_functor(G: FiniteGroupoid) -> Functor:
    return Functor(G, G, lambda x: x, lambda f: f)


def check_functor(F: Functor) -> str | None:
    """Return a description of the first violated functor law, or None."""
    G, H = F.src, F.dst
    for a in G.objects:
        if F.obj(a) not in H.objects:
            return f"object {a!r} maps outside the target"
        if F.mor(G.identity(a)) != H.identity(F.obj(a)):
            return f"identity at {a!r} not preserved"
    for a, b in itertools.product(G.objects, repeat=2):
        for f in G.hom(a, b):
            if F.mor(f) not in H.hom(F.obj(a), F.obj(b)):
                return f"morphism {f!r} mapped to the wrong hom-set"
            for c in G.objects:
                for g in G.hom(b, c):
                    if F.mor(G.compose(g, f)) != H.compose(F.mor(g), F.mor(f)):
                        return f"composite {g!r} after {f!r} not preserved"
    return None


@dataclass
class Equivalence:
    forward: Functor
    backward: Functor
    unit: dict = field(default_factory=dict)    # a -> (a -> G F a)
    counit: dict = field(default_factory=dict)  # b -> (F G b -> b)


def check_equivalence(e: Equivalence) -> str | None:
    F, G = e.forward, e.backward
    A, B = F.src, F.dst
    for law in (check_functor(F), check_functor(G)):
        if law:
            return law
    for a in A.objects:
        eta = e.unit[a]
        if eta not in A.hom(a, G.obj(F.obj(a))):
            return f"unit at {a!r} has the wrong type"
        for a2 in A.objects:
            for f in A.hom(a, a2):
                if A.compose(e.unit[a2], f) != A.compose(G.mor(F.mor(f)), eta):
                    return f"unit not natural at {f!r}"
        # triangle: eps_{Fa} . F(eta_a) = id_{Fa}
        if B.compose(e.counit[F.obj(a)], F.mor(eta)) != B.identity(F.obj(a)):
            return f"triangle identity fails at {a!r}"
    for b in B.objects:
        eps = e.counit[b]
        if eps not in B.hom(F.obj(G.obj(b)), b):
            return f"counit at {b!r} has the wrong type"
        for b2 in B.objects:
            for f in B.hom(b, b2):
                if B.compose(f, eps) != B.compose(e.counit[b2], F.mor(G.mor(f))):
                    return f"counit not natural at {f!r}"
        if A.compose(G.mor(eps), e.unit[G.obj(b)]) != A.identity(G.obj(b)):
            return f"triangle identity fails at {b!r}"
    return None


def _group_isomorphic(G: FiniteGroupoid, a, H: FiniteGroupoid, b) -> bool:
    ga, hb = list(G.hom(a, a)), list(H.hom(b, b))
    if len(ga) != len(hb):
        return False

    def order(K, x, g):
        k, cur, e = 1, g, K.identity(x)
        while cur != e:
            cur, k = K.compose(g, cur), k + 1
        return k

    og = {g: order(G, a, g) for g in ga}
    oh = {h: order(H, b, h) for h in hb}
    if sorted(og.values()) != sorted(oh.values()):
        return False
    phi: dict = {G.identity(a): H.identity(b)}
    rest = [g for g in ga if g != G.identity(a)]

    def consistent():
        for g1, h1 in phi.items():
            for g2, h2 in phi.items():
                g12 = G.compose(g1, g2)
                if g12 in phi and phi[g12] != H.compose(h1, h2):
                    return False
        return True

    def search(i):
        if i == len(rest):
            return True
        g = rest[i]
        used = set(phi.values())
        for h in hb:
            if h in used or oh[h] != og[g]:
                continue
            phi[g] = h
            if consistent() and search(i + 1):
                return True
            del phi[g]
        return False

    return search(0)


def groupoids_equivalent(G: FiniteGroupoid, H: FiniteGroupoid) -> bool:
    """Decide equivalence by matching components with isomorphic automorphism groups.

    A functor is an equivalence iff it is fully faithful and essentially
    surjective; on skeleta this is a bijection of components together with
    group isomorphisms, which is what the search builds.  Two propositions
    are equivalent exactly when both are empty or both are inhabited.
    """
    if G.prop_hint and H.prop_hint:
        return G.is_empty() == H.is_empty()
    cg, ch = components(G), components(H)
    if len(cg) != len(ch):
        return False
    reps_h = [c[0] for c in ch]
    used = [False] * len(reps_h)

    def search(i):
        if i == len(cg):
            return True
        a = cg[i][0]
        for j, b in enumerate(reps_h):
            if not used[j] and _group_isomorphic(G, a, H, b):
                used[j] = True
                if search(i + 1):
                    return True
                used[j] = False
        return False

    return search(0)


# ---------------------------------------------------------------------------
# univalence for the universe of finite sets


def bijections_brute_force(m: int, n: int) -> list[tuple]:
    """All bijections {0..m-1} -> {0..n-1}, by filtering every function."""
    out = []
    for f in itertools.product(range(n), repeat=m):
        if len(set(f)) == m and set(f) == set(range(n)):
            out.append(f)
    return out


def _el(k: int) -> FiniteGroupoid:
    return discrete(range(k), f"El {k}")


def id_to_equiv(p: Mor) -> Equivalence:
    """Turn a path in the universe (a bijection) into an equivalence of El-fibers."""
    X, Y = _el(p.src), _el(p.dst)
    inv = {perm_apply(p, i): i for i in range(p.src)}
    fwd = Functor(X, Y, lambda i: perm_apply(p, i), lambda f: ident(perm_apply(p, f.src)))
    bwd = Functor(Y, X, lambda j: inv[j], lambda f: ident(inv[f.src]))
    return Equivalence(fwd, bwd,
                       unit={i: ident(i) for i in X.objects},
                       counit={j: ident(j) for j in Y.objects})


def equivalences_between(m: int, n: int) -> list[tuple]:
    """Equivalences El m -> El n, enumerated as mutually inverse function pairs.

    Discrete groupoids admit only identity natural transformations, so an
    equivalence is a pair of functions composing to the identity both ways.
    """
    found = []
    for f in itertools.product(range(n), repeat=m):
        for g in itertools.product(range(m), repeat=n):
            if all(g[f[i]] == i for i in range(m)) and all(f[g[j]] == j for j in range(n)):
                found.append(f)
    return found


def check_univalence_set_universe(max_card: int) -> dict:
    """Compare paths in the finite-set universe with equivalences of their decodings."""
    if max_card < 1:
        raise ValueError("max_card must be at least 1")
    U = finite_sets(max_card)
    table = []
    status = "pass"
    counterexample = None
    for m in U.objects:
        for n in U.objects:
            paths = U.hom(m, n)
            equivs = equivalences_between(m, n) if max(m, n) <= 4 else bijections_brute_force(m, n)
            images = []
            for p in paths:
                e = id_to_equiv(p)
                if check_equivalence(e) is not None:
                    status, counterexample = "fail", {"path": repr(p)}
                images.append(tuple(e.forward.obj(i) for i in range(m)))
            bijective = len(set(images)) == len(images) and set(images) == set(equivs)
            row = {"X": m, "Y": n, "paths": len(paths), "equivalences": len(equivs),
                   "idToEquivBijective": bijective}
            table.append(row)
            if len(paths) != len(equivs) or not bijective:
                status = "fail"
                counterexample = counterexample or row
    report = {"check": "univalence", "parameters": {"maxCard": max_card},
              "status": status, "table": table}
    if counterexample:
        report["counterexample"] = counterexample
    return report

