from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from stackmodel.forcing import (
    And, Atom, Bot, Bounds, ExistsNatTrunc, ExistsRatTrunc, ForallNat, Forcing, Implies, Not,
    Or, SigmaSectionExists, Top, check_certificate, forces, local_character_suite,
    monotonicity_suite, negation_soundness_suite, parse_formula, show, simplest_between,
)
from stackmodel.site import CantorOpen, IntervalOpen, cantor_site, interval_site, open_to_json

C = cantor_site()
I = interval_site()


def test_cantor_prefix_decides_its_bits():
    r = forces(C, C.parse_open("01"), parse_formula("alpha(1) = 1"))
    assert r.forced and r.certificate == {"rule": "atom"}
    assert not forces(C, C.parse_open("01"), parse_formula("alpha(1) = 0")).forced


def test_markov_conclusion_obstruction_is_the_zero_chain():
    r = forces(C, C.root, parse_formula("Etrunc n. alpha(n) = 1"), Bounds(depth=3))
    assert not r.forced
    assert r.obstruction[-1] == CantorOpen("000")
    assert r.obstruction == [CantorOpen("0" * k) for k in range(4)]


def test_within_three_forced_with_checking_certificate():
    phi = parse_formula("Etrunc q. within(q, 3)")
    b = Bounds(depth=2)
    r = forces(I, I.root, phi, b)
    assert r.forced
    assert check_certificate(I, I.root, phi, r.certificate, b)


def _midpoint_certificate(level):
    pieces = I.covers(I.root, level)[0].pieces
    return {"rule": "exists", "level": level,
            "pieces": [{"open": open_to_json(p), "witness": str((p.lo + p.hi) / 2),
                        "cert": {"rule": "atom"}} for p in pieces]}


def test_hand_built_four_piece_certificate():
    phi = parse_formula("Etrunc q. within(q, 3)")
    cert = _midpoint_certificate(2)
    assert len(cert["pieces"]) == 4
    assert check_certificate(I, I.root, phi, cert, Bounds(depth=2))


def test_tampered_witness_is_rejected():
    phi = parse_formula("Etrunc q. within(q, 3)")
    cert = _midpoint_certificate(2)
    cert["pieces"][0]["witness"] = "9/10"
    assert not check_certificate(I, I.root, phi, cert, Bounds(depth=2))


def test_pieces_that_do_not_cover_are_rejected():
    phi = parse_formula("Etrunc q. within(q, 3)")
    cert = _midpoint_certificate(2)
    cert["pieces"] = cert["pieces"][1:]
    assert not check_certificate(I, I.root, phi, cert, Bounds(depth=2))


def test_witness_above_denominator_bound_is_rejected():
    phi = parse_formula("Etrunc q. within(q, 3)")
    cert = _midpoint_certificate(2)
    assert not check_certificate(I, I.root, phi, cert, Bounds(depth=2, den_bound=8))


def test_wrong_rule_for_atom():
    assert not check_certificate(C, C.parse_open("1"), parse_formula("alpha(0) = 1"), {"rule": "top"})


@pytest.mark.parametrize("u", ["", "0", "101"])
def test_bot_never_forced_on_cantor(u):
    assert not forces(C, C.parse_open(u), Bot()).forced


@pytest.mark.parametrize("u", ["(0,1)", "(1/4,1/2)", "(0,1/16)"])
def test_bot_never_forced_on_interval(u):
    assert not forces(I, I.parse_open(u), Bot()).forced


def test_top_forced_everywhere():
    for u in C.opens(2):
        assert forces(C, u, Top()).forced


def test_excluded_middle_on_a_decided_bit():
    phi = parse_formula("alpha(0) = 0 | alpha(0) = 1")
    r = forces(C, C.root, phi, Bounds(depth=1))
    assert r.forced and check_certificate(C, C.root, phi, r.certificate, Bounds(depth=1))


def test_negated_forall_zero_at_root():
    phi = parse_formula("~A n. alpha(n) = 0")
    b = Bounds(depth=3, nat_bound=8)
    r = forces(C, C.root, phi, b)
    assert r.forced and check_certificate(C, C.root, phi, r.certificate, b)


def test_monotonicity_examples():
    phi = parse_formula("Etrunc n. alpha(n) = 1")
    b = Bounds(depth=2, nat_bound=8)
    assert forces(C, C.parse_open("1"), phi, b).forced
    for v in ["10", "11", "101"]:
        r = forces(C, C.parse_open(v), phi, b)
        assert r.forced and check_certificate(C, C.parse_open(v), phi, r.certificate, b)
    within = parse_formula("within(1/2, 2)")
    assert forces(I, IntervalOpen(Fraction(1, 4), Fraction(3, 4)), within).forced
    assert forces(I, IntervalOpen(Fraction(1, 3), Fraction(1, 2)), within).forced


@pytest.mark.parametrize("site", [C, I], ids=["cantor", "interval"])
@pytest.mark.parametrize("suite", [monotonicity_suite, local_character_suite, negation_soundness_suite],
                         ids=["monotonicity", "local", "negation"])
def test_law_suites(site, suite):
    rep = suite(site, samples=120, seed=3)
    assert rep.ok, rep.violations[:3]
    assert rep.exercised > 0


def test_section_family_needs_short_interval():
    ev = Forcing(I, Bounds(depth=3))
    assert ev.forces(IntervalOpen(Fraction(0), Fraction(1, 2)), SigmaSectionExists("within", (4,))).forced
    assert not ev.forces(IntervalOpen(Fraction(0), Fraction(3, 4)), SigmaSectionExists("within", (4,))).forced


# ---------------------------------------------------------------------------
# surface syntax


def _formulas(nat_vars=(), rat_vars=()):
    nat = st.integers(0, 9) | (st.sampled_from(nat_vars) if nat_vars else st.nothing())
    rat = st.fractions(min_value=0, max_value=1, max_denominator=12) | (
        st.sampled_from(rat_vars) if rat_vars else st.nothing())
    atoms = st.one_of(
        st.builds(lambda n, b: Atom("alpha", (n, b)), nat, st.integers(0, 1)),
        st.builds(lambda q, n: Atom("within", (q, n)), rat, st.integers(1, 9)),
        st.just(Top()), st.just(Bot()),
    )

    def extend(inner):
        return st.one_of(
            st.builds(And, inner, inner), st.builds(Or, inner, inner),
            st.builds(Implies, inner, inner), st.builds(Not, inner))

    base = st.recursive(atoms, extend, max_leaves=6)
    if len(nat_vars) + len(rat_vars) >= 2:
        return base
    k = len(nat_vars) + len(rat_vars)
    return st.one_of(
        base,
        st.builds(ForallNat, st.just(f"n{k}"), st.deferred(lambda: _formulas(nat_vars + (f"n{k}",), rat_vars))),
        st.builds(ExistsNatTrunc, st.just(f"n{k}"),
                  st.deferred(lambda: _formulas(nat_vars + (f"n{k}",), rat_vars))),
        st.builds(ExistsRatTrunc, st.just(f"q{k}"),
                  st.deferred(lambda: _formulas(nat_vars, rat_vars + (f"q{k}",)))),
    )


@settings(max_examples=200, deadline=None)
@given(_formulas())
def test_show_parse_round_trip(phi):
    assert parse_formula(show(phi)) == phi


@pytest.mark.parametrize("text", ["alpha(0) =", "Etrunc . T", "within(1/2, 2", "(T", "T T"])
def test_parse_errors(text):
    with pytest.raises(ValueError):
        parse_formula(text)


def _least_denominator(a, b):
    d = 1
    while True:
        for k in range(-4 * d, 4 * d + 1):
            if a <= Fraction(k, d) <= b:
                return d
        d += 1


@settings(max_examples=300, deadline=None)
@given(st.fractions(min_value=-3, max_value=3, max_denominator=40),
       st.fractions(min_value=0, max_value=1, max_denominator=40))
def test_simplest_between_matches_brute_force(a, width):
    b = a + width
    s = simplest_between(a, b)
    assert a <= s <= b
    assert s.denominator == _least_denominator(a, b)


def test_simplest_between_empty():
    with pytest.raises(ValueError):
        simplest_between(Fraction(1), Fraction(0))
