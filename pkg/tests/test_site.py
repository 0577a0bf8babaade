import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from stackmodel.site import (
    CantorOpen, Cover, IntervalOpen, SiteError, cantor_site, get_site, interval_site,
    is_chain_connected,
)
from oracles import cylinder, grid_cells

I, C = interval_site(), cantor_site()


def test_interval_cover_examples():
    assert [c.pieces for c in I.covers(I.root, 0)] == [(I.root,)]
    (c,) = I.covers(I.root, 1)
    assert c.pieces == (IntervalOpen(0, F(5, 8)), IntervalOpen(F(3, 8), 1))
    assert I.meet(*c.pieces) == IntervalOpen(F(3, 8), F(5, 8))
    assert I.meet(IntervalOpen(0, F(1, 2)), IntervalOpen(F(1, 2), 1)) is None


def test_cantor_examples():
    assert C.covers(C.root, 1)[0].pieces == (CantorOpen("0"), CantorOpen("1"))
    assert C.meet(CantorOpen("01"), CantorOpen("0")) == CantorOpen("01")
    assert C.meet(CantorOpen("01"), CantorOpen("00")) is None


def _interval_den(*us):
    d = 1
    for u in us:
        for x in (u.lo, u.hi):
            d = math.lcm(d, x.denominator)
    return d


OPENS = I.opens(3)


@pytest.mark.parametrize("u", OPENS[:8], ids=str)
@pytest.mark.parametrize("k", range(4))
def test_interval_covers_are_exact_unions(u, k):
    (c,) = I.covers(u, k)
    den = _interval_den(u, *c.pieces)
    union = set().union(*(grid_cells(p.lo, p.hi, den) for p in c.pieces))
    assert union == grid_cells(u.lo, u.hi, den)
    assert I.is_cover(c) and is_chain_connected(c)


@pytest.mark.parametrize("prefix", ["", "0", "10", "011"])
@pytest.mark.parametrize("k", range(4))
def test_cantor_covers_are_exact_unions(prefix, k):
    (c,) = C.covers(CantorOpen(prefix), k)
    L = len(prefix) + k
    assert set().union(*(cylinder(p.prefix, L) for p in c.pieces)) == cylinder(prefix, L)
    assert C.is_cover(c)


@pytest.mark.parametrize("site", [I, C], ids=["interval", "cantor"])
def test_refinement_chain(site):
    for u in site.opens(2):
        for k in range(4):
            for k2 in range(k + 1, 5):
                fine, coarse = site.covers(u, k2)[0], site.covers(u, k)[0]
                assert site.refines(fine, coarse)


def test_meet_matches_interval_arithmetic_oracle():
    rng = random.Random(7)
    for _ in range(200):
        a, b = sorted(rng.sample(range(25), 2))
        c, d = sorted(rng.sample(range(25), 2))
        u, v = IntervalOpen(F(a, 24), F(b, 24)), IntervalOpen(F(c, 24), F(d, 24))
        cells = grid_cells(u.lo, u.hi, 24) & grid_cells(v.lo, v.hi, 24)
        m = I.meet(u, v)
        assert (grid_cells(m.lo, m.hi, 24) if m is not None else set()) == cells


def test_meet_matches_prefix_oracle():
    rng = random.Random(8)
    for _ in range(200):
        s = "".join(rng.choice("01") for _ in range(rng.randint(0, 4)))
        t = "".join(rng.choice("01") for _ in range(rng.randint(0, 4)))
        m = C.meet(CantorOpen(s), CantorOpen(t))
        expect = cylinder(s, 5) & cylinder(t, 5)
        assert (cylinder(m.prefix, 5) if m is not None else set()) == expect


def test_refine_examples():
    c1, c2 = I.covers(I.root, 1)[0], I.covers(I.root, 2)[0]
    assert I.refine(c1, c1) == c1
    r = I.refine(c1, c2)
    assert I.refines(r, c1) and I.refines(r, c2) and I.is_cover(r)
    d1, d2 = C.covers(C.root, 1)[0], C.covers(C.root, 2)[0]
    assert C.refine(d1, d2) == d2


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(OPENS), st.integers(0, 3), st.integers(0, 3))
def test_refine_is_a_common_refinement(u, j, k):
    c1, c2 = I.covers(u, j)[0], I.covers(u, k)[0]
    r = I.refine(c1, c2)
    assert I.is_cover(r) and I.refines(r, c1) and I.refines(r, c2)


def test_non_covers_are_rejected():
    assert not I.is_cover(Cover(I.root, (IntervalOpen(0, F(1, 2)), IntervalOpen(F(1, 2), 1))))
    assert not C.is_cover(Cover(C.root, (CantorOpen("0"), CantorOpen("10"))))
    with pytest.raises(SiteError):
        is_chain_connected(C.covers(C.root, 1)[0])


def test_parsing_and_lookup():
    assert I.parse_open("(1/4, 3/4)") == IntervalOpen(F(1, 4), F(3, 4))
    assert C.parse_open("[01]") == CantorOpen("01")
    for bad in ("(3/4,1/4)", "(0,2)", "x"):
        with pytest.raises(SiteError):
            I.parse_open(bad)
    with pytest.raises(SiteError):
        get_site("moon")
