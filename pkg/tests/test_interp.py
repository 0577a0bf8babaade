import pytest

from stackmodel import interp
from stackmodel.groupoid import is_ident, is_prop_groupoid, validate_groupoid
from stackmodel.syntax import Enum, EnumLit, IdType, Lambda, Pi, Refl, Sigma, Trunc, Var
from corpus import run_corpus
from oracles import count_functions, count_pairs
from soundness import DISTINCT_PAIRS, EQUAL_PAIRS, FRAGMENT_TYPES, TRUNC_PAIRS, elaborate, sections


@pytest.fixture(scope="module")
def prelude():
    return run_corpus()[2]


def closed_fiber(ty, **kw):
    return interp.GroupoidModel(**kw).interp_type(ty).fiber(())


def test_identity_type_of_distinct_points_is_empty():
    G = closed_fiber(IdType(Enum(2), EnumLit(2, 0), EnumLit(2, 1)))
    assert G.size() == (0, 0)


def test_truncation_is_codiscrete():
    G = closed_fiber(Trunc(Enum(2)))
    assert G.size() == (2, 4) and is_prop_groupoid(G)


@pytest.mark.parametrize("m", range(4))
@pytest.mark.parametrize("n", range(4))
def test_pi_and_sigma_cardinalities(m, n):
    P = closed_fiber(Pi(Enum(m), Enum(n)))
    assert len(P.objects) == count_functions(m, n)
    assert all(is_ident(f) for f in P.morphisms())
    S = closed_fiber(Sigma(Enum(m), Enum(n)))
    assert len(S.objects) == count_pairs(m, n)


def test_term_examples():
    M = interp.GroupoidModel()
    assert M.interp_term(EnumLit(3, 1), Enum(3)).on_objects == {(): 1}
    refl = M.interp_term(Refl(EnumLit(2, 0)), IdType(Enum(2), EnumLit(2, 0), EnumLit(2, 0)))
    assert is_ident(refl.on_objects[()])
    f = M.interp_term(Lambda(Var(0)), Pi(Enum(3), Enum(3))).on_objects[()]
    assert f.obj == {0: 0, 1: 1, 2: 2}


@pytest.mark.parametrize("tel,ty", FRAGMENT_TYPES, ids=[t for _, t in FRAGMENT_TYPES])
def test_families_are_functorial_and_truncations_propositional(prelude, tel, ty):
    scope, (A,) = elaborate(prelude, tel, ty)
    M = interp.GroupoidModel(prelude, max_card=2)
    fam = M.interp_type(A, scope)
    assert interp.check_family(fam) is None
    tfam = M.interp_type(Trunc(A), scope)
    assert interp.check_family(tfam) is None
    for env in fam.base.objects:
        assert validate_groupoid(fam.fiber(env))["status"] == "valid"
        assert is_prop_groupoid(tfam.fiber(env), exhaustive=True)


@pytest.mark.parametrize("case", EQUAL_PAIRS, ids=[c[2] for c in EQUAL_PAIRS])
def test_convertible_terms_have_identical_sections(prelude, case):
    conv, fam, s, t = sections(prelude, *case)
    assert conv
    assert interp.check_section(fam, s) is None and interp.check_section(fam, t) is None
    assert s.on_objects == t.on_objects and s.on_morphisms == t.on_morphisms


@pytest.mark.parametrize("case", TRUNC_PAIRS, ids=[c[2] for c in TRUNC_PAIRS])
def test_truncated_terms_agree_up_to_the_unique_isomorphism(prelude, case):
    conv, fam, s, t = sections(prelude, *case)
    assert conv
    for env in fam.base.objects:
        assert len(fam.fiber(env).hom(s.on_objects[env], t.on_objects[env])) == 1


@pytest.mark.parametrize("case", DISTINCT_PAIRS, ids=[f"{c[2]} vs {c[3]}" for c in DISTINCT_PAIRS])
def test_inconvertible_finite_terms_differ(prelude, case):
    conv, _, s, t = sections(prelude, *case)
    assert not conv
    assert s.on_objects != t.on_objects


def test_nat_cutoff_is_reported(prelude):
    from stackmodel.groupoid import BoundExceeded
    from stackmodel.syntax import Nat, numeral
    M = interp.GroupoidModel(prelude, nat_cutoff=4)
    with pytest.raises(BoundExceeded):
        M.interp_term(numeral(5), Nat())


def test_univalence_axiom_is_outside_the_fragment(prelude):
    entry = prelude.globals["uaNot"]
    with pytest.raises(interp.FragmentUnsupported):
        interp.GroupoidModel(prelude).interp_term(entry.body_term, entry.type_term)
