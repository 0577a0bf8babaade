import pytest
from hypothesis import given, settings

from stackmodel.syntax import (
    Lambda, Pi, ParseError, ScopeError, Trunc, Nat, Universe, Var, parse_file, parse_term, pretty,
    resolve,
)
from strategies import GLOBALS, terms, to_named


def roundtrip(t):
    return resolve(parse_term(pretty(t)), (), GLOBALS)


@settings(max_examples=400, deadline=None)
@given(terms(6))
def test_pretty_parse_resolve_roundtrip(t):
    assert roundtrip(t) == t


@settings(max_examples=200, deadline=None)
@given(terms(5))
def test_bound_names_do_not_matter(t):
    a = to_named(t, lambda d: f"a{d}")
    b = to_named(t, lambda d: f"zz_{d}'")
    assert resolve(a, (), GLOBALS) == resolve(b, (), GLOBALS) == t


def test_parse_polymorphic_identity():
    decls = parse_file("id : (A : U) -> A -> A\nid = \\A x. x")
    assert len(decls) == 1
    d = decls[0]
    assert isinstance(d.annotation, Pi) and isinstance(d.body, Lambda)
    assert resolve(d.body) == Lambda(Lambda(Var(0)))


def test_empty_file():
    assert parse_file("") == []


def test_duplicate_declaration():
    with pytest.raises(ParseError, match="duplicate"):
        parse_file("f : U\nf : U")


def test_resolve_indices():
    assert resolve(parse_term("\\A x. x")) == Lambda(Lambda(Var(0)))
    assert resolve(parse_term("\\A x. A")) == Lambda(Lambda(Var(1)))
    with pytest.raises(ScopeError):
        resolve(parse_term("\\x. y"))


def test_pretty_examples():
    assert pretty(Lambda(Var(0))) == "\\x0. x0"
    assert pretty(Pi(Universe(), Var(0))) == "(x0 : U) -> x0"
    assert pretty(Trunc(Nat())) == "||Nat||"


def test_parse_error_position():
    with pytest.raises(ParseError) as e:
        parse_file("x : (A : U\n")
    assert e.value.line >= 1
