"""Hypothesis generators shared by the property tests."""

from hypothesis import strategies as st

from stackmodel.syntax import (
    App, Const, Enum, EnumElim, EnumLit, IdElim, IdType, Lambda, Nat, NatElim, Pair, Pi,
    ProjL, ProjR, Refl, Sigma, Succ, Trunc, TruncElim, TruncIn, UnivalenceAx, Universe, Var, Zero,
)

GLOBALS = ("g", "h")


def _leaf(depth: int):
    opts = [st.just(Nat()), st.just(Zero()), st.just(Universe()),
            st.sampled_from([Const(g) for g in GLOBALS]),
            st.integers(0, 3).map(Enum),
            st.integers(1, 3).flatmap(lambda k: st.integers(0, k - 1).map(lambda i: EnumLit(k, i)))]
    if depth:
        opts.append(st.integers(0, depth - 1).map(Var))
    return st.one_of(opts)


def terms(size: int = 6, depth: int = 0):
    """Raw, scope-correct terms of height at most ``size`` under ``depth`` binders."""
    if size <= 1:
        return _leaf(depth)
    sub = terms(size - 1, depth)
    under = terms(size - 1, depth + 1)
    return st.one_of(
        _leaf(depth),
        under.map(Lambda),
        st.builds(Pi, sub, under),
        st.builds(Sigma, sub, under),
        st.builds(App, sub, sub),
        st.builds(Pair, sub, sub),
        sub.map(ProjL), sub.map(ProjR),
        st.builds(IdType, sub, sub, sub),
        sub.map(Refl), sub.map(Succ), sub.map(Trunc), sub.map(TruncIn),
        st.builds(IdElim, sub, sub, sub),
        st.builds(NatElim, sub, sub, sub, sub),
        st.builds(TruncElim, sub, sub, sub, sub),
        st.builds(UnivalenceAx, sub, sub, sub),
        st.builds(lambda p, cs, e: EnumElim(p, tuple(cs), e), sub, st.lists(sub, max_size=3), sub),
    )


def to_named(t, scheme, ctx=()):
    """The same term with named variables; ``scheme(depth)`` names the binder at that depth."""
    import dataclasses
    from stackmodel.syntax import BINDERS
    if isinstance(t, Var):
        return Var(ctx[len(ctx) - 1 - t.index])
    if not dataclasses.is_dataclass(t):
        return t
    binder = BINDERS.get(type(t))
    changes = {}
    for f in dataclasses.fields(t):
        v = getattr(t, f.name)
        inner = ctx + (scheme(len(ctx)),) if f.name == binder else ctx
        if isinstance(v, tuple):
            changes[f.name] = tuple(to_named(c, scheme, inner) for c in v)
        elif hasattr(v, "__dataclass_fields__"):
            changes[f.name] = to_named(v, scheme, inner)
    if binder:
        changes["name"] = scheme(len(ctx))
    return dataclasses.replace(t, **changes)
