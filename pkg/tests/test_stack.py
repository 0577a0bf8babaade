import itertools
import random
from fractions import Fraction as F

import pytest

from stackmodel import stack
from stackmodel.groupoid import codiscrete, discrete, groupoids_equivalent, is_prop_groupoid
from stackmodel.site import CantorOpen, Cover, IntervalOpen, cantor_site, interval_site
from stackmodel.stack import (
    CATALOG, DescentDatum, MalformedDatum, _descent_hom, _meets, check_cocycle, comparison,
    depth_comparison, descent_groupoid, effective_datum, get_prestack, has_section, is_stack,
    stackify, trunc_stack,
)

I, C = interval_site(), cantor_site()
SITES = {"interval": I, "cantor": C}
CASES = [(s, name) for s, names in CATALOG.items() for name in names]


def fully_faithful(functor) -> bool:
    A, B = functor.src, functor.dst
    for a, b in itertools.product(A.objects, repeat=2):
        image = [functor.mor(f) for f in A.hom(a, b)]
        if len(set(image)) != len(image) or set(image) != set(B.hom(functor.obj(a), functor.obj(b))):
            return False
    return True


@pytest.mark.parametrize("site,name", CASES)
def test_effective_data_glue(site, name):
    S = SITES[site]
    P = get_prestack(name, S)
    for u in S.opens(2):
        for k in range(3):
            for c in S.covers(u, k):
                for a in P.at(u).objects:
                    d = effective_datum(P, c, a)
                    assert check_cocycle(P, d)
                    assert comparison(P, c).obj(a) == d
                    assert any(f.src == d for f in _descent_hom(P, _meets(S, c), d, d))


@pytest.mark.parametrize("site,name", CASES)
def test_catalog_prestacks_are_well_formed(site, name):
    S = SITES[site]
    P = get_prestack(name, S)
    opens = S.opens(2)
    assert stack.check_restrictions(P, opens) is None
    assert stack.validate_fibers(P, opens) is None


def random_datum(P, S, rng):
    u = rng.choice(S.opens(2))
    c = S.covers(u, rng.randint(0, 3))[0]
    secs = []
    for p in c.pieces:
        objs = P.at(p).objects
        if not objs:
            return None
        secs.append(rng.choice(objs))
    trans = {}
    for (i, j), m in _meets(S, c).items():
        if i < j:
            homs = P.at(m).hom(P.res(m, c.pieces[i], secs[i]), P.res(m, c.pieces[j], secs[j]))
            if not homs:
                return None
            trans[(i, j)] = rng.choice(homs)
    return DescentDatum(c, tuple(secs), tuple(sorted(trans.items())))


def test_random_transitions_on_propositions_always_satisfy_the_cocycle():
    rng = random.Random(0)
    props = [(I, get_prestack("const-codiscrete-2", I)), (C, get_prestack("const-codiscrete-2", C)),
             (I, stack.codiscrete_replacement(get_prestack("within-witness-3-6", I))),
             (C, stack.codiscrete_replacement(get_prestack("alpha-witness-8", C)))]
    done = 0
    while done < 1000:
        S, P = props[done % len(props)]
        d = random_datum(P, S, rng)
        if d is None:
            continue
        assert check_cocycle(P, d)
        done += 1


def random_cover(rng):
    """A cover of (0,1) by 3 or 4 intervals with endpoints in twelfths."""
    while True:
        pieces = set()
        for _ in range(rng.randint(3, 4)):
            a, b = sorted(rng.sample(range(13), 2))
            pieces.add(IntervalOpen(F(a, 12), F(b, 12)))
        c = Cover(I.root, tuple(sorted(pieces)))
        if len(pieces) >= 3 and I.is_cover(c):
            return c


def test_bz2_cocycle_matches_parity_oracle():
    rng = random.Random(1)
    P = get_prestack("const-bz2", I)
    e, t = P.at(I.root).hom("*", "*")
    outcomes = set()
    for _ in range(300):
        c = random_cover(rng)
        pairs = [(i, j) for (i, j) in _meets(I, c) if i < j]
        flips = {k: rng.random() < 0.5 for k in pairs}
        d = DescentDatum(c, ("*",) * len(c.pieces), tuple(sorted((k, t if f else e) for k, f in flips.items())))
        # oracle: on every triple overlap the flips of the three sides must have even parity
        ok = all((flips[i, j] + flips[j, k] + flips[i, k]) % 2 == 0
                 for i, j, k in itertools.combinations(range(len(c.pieces)), 3)
                 if (i, j) in flips and (j, k) in flips and (i, k) in flips
                 and I.meet(I.meet(c.pieces[i], c.pieces[j]), c.pieces[k]) is not None)
        assert check_cocycle(P, d) == ok
        outcomes.add(ok)
    assert outcomes == {True, False}


def test_chain_covers_impose_no_triple_condition():
    P = get_prestack("const-bz2", I)
    rng = random.Random(2)
    for _ in range(50):
        d = random_datum(P, I, rng)
        assert d is None or check_cocycle(P, d)


def test_three_piece_chain_cocycle():
    P = get_prestack("const-bz2", I)
    e, t = P.at(I.root).hom("*", "*")
    # every pair meets and the triple overlap (1/2, 3/4) is defined
    tight = Cover(I.root, (IntervalOpen(0, F(3, 4)), IntervalOpen(F(1, 4), 1), IntervalOpen(F(1, 2), 1)))
    for a, b, c in itertools.product((e, t), repeat=3):
        d = DescentDatum(tight, ("*",) * 3, (((0, 1), a), ((0, 2), c), ((1, 2), b)))
        parity = sum(x == t for x in (a, b)) % 2 == (c == t)
        assert check_cocycle(P, d) == parity
    # the outer pieces do not meet: no triple condition at all
    loose = Cover(I.root, (IntervalOpen(0, F(1, 2)), IntervalOpen(F(1, 3), F(2, 3)), IntervalOpen(F(1, 2), 1)))
    for a, b in itertools.product((e, t), repeat=2):
        assert check_cocycle(P, DescentDatum(loose, ("*",) * 3, (((0, 1), a), ((1, 2), b))))
    with pytest.raises(MalformedDatum):
        check_cocycle(P, DescentDatum(tight, ("*",) * 3, (((0, 1), e),)))


def test_single_piece_cover_always_satisfies_the_cocycle():
    for name in CATALOG["cantor"]:
        P = get_prestack(name, C)
        c = Cover(CantorOpen("1"), (CantorOpen("1"),))
        for x in P.at(CantorOpen("1")).objects:
            assert check_cocycle(P, DescentDatum(c, (x,), ()))


def test_descent_groupoid_examples():
    P = get_prestack("const-codiscrete-2", I)
    D = descent_groupoid(P, I.covers(I.root, 1)[0])
    assert groupoids_equivalent(D, codiscrete(range(2)))
    for n in (1, 2, 3):
        Q = stack.constant(I, discrete(range(n)), f"d{n}")
        for k in (1, 2):
            assert len(descent_groupoid(Q, I.covers(I.root, k)[0]).objects) == n


def test_is_stack_examples():
    for S in (I, C):
        assert is_stack(get_prestack("terminal", S), 2).is_stack
    assert is_stack(get_prestack("rational-bounded-4", I), 2).is_stack
    rep = is_stack(get_prestack("deep-only", C), 1)
    root = [r for r in rep.records if r.open == C.root and r.level == 1]
    assert root and not root[0].essentiallySurjective
    assert rep.as_dict()["status"] == "fail"


@pytest.mark.parametrize("site,name", [("interval", "terminal"), ("interval", "rational-bounded-4"),
                                       ("interval", "const-codiscrete-2"), ("cantor", "const-codiscrete-2")])
def test_stackify_of_a_stack_is_equivalent(site, name):
    S = SITES[site]
    P = get_prestack(name, S)
    for d in (0, 1):
        Q = stackify(P, d)
        for u in S.opens(2):
            assert groupoids_equivalent(Q.at(u), P.at(u))


@pytest.mark.parametrize("site,name", CASES)
def test_depth_zero_stackify_is_the_identity(site, name):
    S = SITES[site]
    P = get_prestack(name, S)
    Q = stackify(P, 0)
    for u in S.opens(2):
        assert groupoids_equivalent(Q.at(u), P.at(u))


def embeds(functor) -> bool:
    """Faithful and injective on isomorphism classes."""
    A, B = functor.src, functor.dst
    for a, b in itertools.product(A.objects, repeat=2):
        image = [functor.mor(f) for f in A.hom(a, b)]
        if len(set(image)) != len(image):
            return False
        if not A.hom(a, b) and B.hom(functor.obj(a), functor.obj(b)):
            return False
    return True


@pytest.mark.parametrize("site,name", CASES)
def test_stackify_is_monotone_in_depth(site, name):
    S = SITES[site]
    P = get_prestack(name, S)
    for d in (0, 1):
        for u in S.opens(1):
            assert embeds(depth_comparison(P, u, d))


@pytest.mark.parametrize("site,name", [("interval", n) for n in CATALOG["interval"]]
                         + [("cantor", "terminal"), ("cantor", "const-codiscrete-2")])
def test_stackify_depth_comparison_is_fully_faithful_for_stacks(site, name):
    S = SITES[site]
    P = get_prestack(name, S)
    for u in S.opens(1):
        assert fully_faithful(depth_comparison(P, u, 1))


def test_bz2_gains_automorphisms_over_disjoint_covers():
    P = get_prestack("const-bz2", C)
    functor = depth_comparison(P, C.root, 0)
    (x,) = functor.src.objects
    assert len(functor.src.hom(x, x)) == 2
    assert len(functor.dst.hom(functor.obj(x), functor.obj(x))) == 4


@pytest.mark.parametrize("site,name", CASES)
def test_truncation_is_fiberwise_propositional(site, name):
    S = SITES[site]
    T = trunc_stack(get_prestack(name, S), 2)
    for u in S.opens(2):
        assert is_prop_groupoid(T.at(u))


def test_markov_witnesses_gain_sections_where_every_refinement_has_one():
    P = get_prestack("alpha-witness-8", C)
    for d in range(4):
        T = trunc_stack(P, d)
        for u in C.opens(3):
            ext = ["".join(w) for w in itertools.product("01", repeat=max(d - len(u), 0))]
            expected = all("1" in u.prefix + w for w in ext)
            assert has_section(T, u) == expected, (d, u)


def test_truncation_examples():
    assert has_section(trunc_stack(get_prestack("terminal", I), 1), I.root)
    halves = get_prestack("halves", I)
    assert not has_section(halves, I.root)
    assert has_section(trunc_stack(halves, 1), I.root)
    alpha = get_prestack("alpha-witness-8", C)
    assert not has_section(trunc_stack(alpha, 2), CantorOpen("00"))


def test_unknown_prestack():
    with pytest.raises(KeyError):
        get_prestack("halves", C)
