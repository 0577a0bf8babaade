"""Interpretation of a fragment of the type theory into finite groupoids.

A context is interpreted as its total groupoid: objects are tuples of
elements (outermost first) and a morphism ``CMor(src, dst, comps)`` carries,
for each position k, a morphism ``T_k(m_<k)(src_k) -> dst_k`` in the fiber
over ``dst_<k``.  A type is a strictly functorial family over that groupoid,
a term a section of it.

Function types are the groupoids of functorial sections with natural
transformations; sigma types are total groupoids; ``Id A a b`` is the
discrete groupoid on ``hom(a, b)``; ``||A||`` is codiscrete on the objects
of ``A``; ``U`` is the groupoid of finite sets and bijections.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

from . import kernel
from .groupoid import (
    BoundExceeded, FiniteGroupoid, Functor, Mor, codiscrete, discrete,
    finite_sets, ident, is_ident, perm_apply,
)
from .syntax import (
    App, Const, Context, Enum, EnumElim, EnumLit, IdElim, IdType, Lambda, Nat,
    NatElim, Pair, Pi, ProjL, ProjR, Refl, Sigma, Succ, Term, Trunc, TruncElim,
    TruncIn, Universe, Var, Zero, free_indices, instantiate, shift,
)


class FragmentUnsupported(Exception):
    pass


class CMor(NamedTuple):
    src: tuple
    dst: tuple
    comps: tuple

    def prefix(self, k: int) -> "CMor":
        return CMor(self.src[:k], self.dst[:k], self.comps[:k])

    def extend(self, x, y, f) -> "CMor":
        return CMor(self.src + (x,), self.dst + (y,), self.comps + (f,))


def cmor_is_identity(m: CMor) -> bool:
    return m.src == m.dst and all(is_ident(f) for f in m.comps)


class Fun:
    """An object of a function-type groupoid: a functorial section."""

    __slots__ = ("obj", "mor", "_key")

    def __init__(self, obj: dict, mor: dict):
        self.obj = obj
        self.mor = mor
        self._key = (frozenset(obj.items()), frozenset(mor.items()))

    def __eq__(self, other):
        return isinstance(other, Fun) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        items = sorted(self.obj.items(), key=repr)
        return "Fun{" + ", ".join(f"{k!r}->{v!r}" for k, v in items) + "}"


def components_of(f: Mor, s: Fun) -> dict:
    """Components of a natural transformation out of ``s``."""
    if f.label is None:
        return {x: ident(v) for x, v in s.obj.items()}
    return dict(f.label)


def sigma_parts(f: Mor) -> tuple:
    if f.label is None:
        a, b = f.src
        return ident(a), ident(b)
    return f.label


@dataclass
class GroupoidFamily:
    base: FiniteGroupoid
    fiber: object      # base object -> FiniteGroupoid
    transport: object  # base morphism -> Functor


@dataclass
class Section:
    on_objects: dict
    on_morphisms: dict


class GroupoidModel:
    """Evaluator for the groupoid interpretation, bound to one checking session."""

    def __init__(self, checker: kernel.Checker | None = None, nat_cutoff: int = 32,
                 max_card: int = 4, budget: int = 200_000):
        self.checker = checker or kernel.Checker()
        self.nat_cutoff = nat_cutoff
        self.max_card = max_card
        self.budget = budget
        self.universe = finite_sets(max_card)
        self._fibers: dict = {}
        self._norm: dict = {}
        self._infer: dict = {}

    # -- kernel bridges
    def norm(self, scope: tuple, t: Term) -> Term:
        key = (scope, t)
        if key not in self._norm:
            self._norm[key] = kernel.normalize(Context(scope), t, self.checker)
        return self._norm[key]

    def infer(self, scope: tuple, t: Term) -> Term:
        key = (scope, t)
        if key not in self._infer:
            self._infer[key] = kernel.infer(Context(scope), t, self.checker)
        return self._infer[key]

    # -- context groupoid
    def ctx_identity(self, env: tuple) -> CMor:
        return CMor(env, env, tuple(ident(x) for x in env))

    def ctx_compose(self, scope: tuple, m2: CMor, m1: CMor) -> CMor:
        comps = []
        for k, ty in enumerate(scope):
            moved = self.tmor(scope[:k], ty, m2.prefix(k), m1.comps[k])
            comps.append(self.fiber(scope[:k], ty, m2.dst[:k]).compose(m2.comps[k], moved))
        return CMor(m1.src, m2.dst, tuple(comps))

    def ctx_inverse(self, scope: tuple, m: CMor) -> CMor:
        inv = CMor((), (), ())
        for k, ty in enumerate(scope):
            back = self.fiber(scope[:k], ty, m.dst[:k]).inverse(m.comps[k])
            f = self.tmor(scope[:k], ty, inv, back)
            inv = inv.extend(m.dst[k], m.src[k], f)
        return inv

    def ctx_groupoid(self, scope: tuple) -> FiniteGroupoid:
        def objects():
            envs = [()]
            for k, ty in enumerate(scope):
                envs = [e + (x,) for e in envs for x in self.fiber(scope[:k], ty, e).objects]
                self._guard(len(envs))
            return envs

        def hom(a, b):
            ms = [CMor((), (), ())]
            for k, ty in enumerate(scope):
                nxt = []
                for m in ms:
                    pm = CMor(a[:k], b[:k], m.comps)
                    moved = self.tobj(scope[:k], ty, pm, a[k])
                    for f in self.fiber(scope[:k], ty, b[:k]).hom(moved, b[k]):
                        nxt.append(CMor(a[:k + 1], b[:k + 1], m.comps + (f,)))
                ms = nxt
            return [CMor(a, b, m.comps) for m in ms]

        return FiniteGroupoid(objects, hom, lambda g, f: self.ctx_compose(scope, g, f),
                              self.ctx_identity, name="context")

    def _guard(self, n: int):
        if n > self.budget:
            raise BoundExceeded(f"enumeration exceeds the size budget {self.budget}")

    # -- fibers
    def fiber(self, scope: tuple, ty: Term, env: tuple) -> FiniteGroupoid:
        key = (scope, ty, env)
        if key not in self._fibers:
            self._fibers[key] = self._fiber(scope, self.norm(scope, ty), env)
        return self._fibers[key]

    def _fiber(self, scope: tuple, ty: Term, env: tuple) -> FiniteGroupoid:
        match ty:
            case Enum(n):
                return discrete(range(n), f"Enum {n}")
            case Nat():
                return discrete(range(self.nat_cutoff), "Nat")
            case Universe():
                return self.universe
            case Pi(a, b):
                return self._pi_fiber(scope, a, b, env)
            case Sigma(a, b):
                return self._sigma_fiber(scope, a, b, env)
            case IdType(a, x, y):
                ga = self.fiber(scope, a, env)
                return discrete(ga.hom(self.val(scope, x, a, env), self.val(scope, y, a, env)), "Id")
            case Trunc(a):
                return codiscrete(self.fiber(scope, a, env).objects, "Trunc")
        k = self.val(scope, ty, Universe(), env)
        return discrete(range(k), f"El {k}")

    def _pi_fiber(self, scope, a, b, env) -> FiniteGroupoid:
        ga = self.fiber(scope, a, env)
        inner = scope + (a,)
        xs = ga.objects
        ident_env = self.ctx_identity(env)
        fibers = {x: self.fiber(inner, b, env + (x,)) for x in xs}

        def move(f, z):
            return self.tobj(inner, b, ident_env.extend(f.src, f.dst, f), z)

        def move_mor(f, g):
            return self.tmor(inner, b, ident_env.extend(f.src, f.dst, f), g)

        arrows = [f for f in ga.morphisms() if not is_ident(f)]

        def objects():
            out = []
            count = 1
            for x in xs:
                count *= max(1, len(fibers[x].objects))
            self._guard(count)
            for choice in itertools.product(*(fibers[x].objects for x in xs)):
                s_obj = dict(zip(xs, choice))
                options = [fibers[f.dst].hom(move(f, s_obj[f.src]), s_obj[f.dst]) for f in arrows]
                for picks in itertools.product(*options):
                    s_mor = {x: ident(s_obj[x]) for x in xs}
                    s_mor = {ga.identity(x): ident(s_obj[x]) for x in xs}
                    s_mor.update(zip(arrows, picks))
                    if self._functorial(ga, fibers, s_obj, s_mor, move_mor):
                        out.append(Fun(s_obj, s_mor))
                        self._guard(len(out))
            return out

        def hom(s, t):
            out = []
            opts = [fibers[x].hom(s.obj[x], t.obj[x]) for x in xs]
            for comps in itertools.product(*opts):
                alpha = dict(zip(xs, comps))
                natural = all(
                    fibers[f.dst].compose(alpha[f.dst], s.mor[f])
                    == fibers[f.dst].compose(t.mor[f], move_mor(f, alpha[f.src]))
                    for f in arrows
                )
                if natural:
                    out.append(self._nat(s, t, alpha))
            return out

        def comp(g, f):
            s, t = f.src, g.dst
            af, ag = components_of(f, s), components_of(g, f.dst)
            return self._nat(s, t, {x: fibers[x].compose(ag[x], af[x]) for x in xs})

        return FiniteGroupoid(objects, hom, comp, name="Pi")

    @staticmethod
    def _nat(s: Fun, t: Fun, alpha: dict) -> Mor:
        if s == t and all(is_ident(c) for c in alpha.values()):
            return ident(s)
        return Mor(s, t, frozenset(alpha.items()))

    @staticmethod
    def _functorial(ga, fibers, s_obj, s_mor, move_mor) -> bool:
        for f, sf in s_mor.items():
            for h in ga.morphisms():
                if h.src != f.dst:
                    continue
                hf = ga.compose(h, f)
                lhs = s_mor[hf]
                rhs = fibers[h.dst].compose(s_mor[h], move_mor(h, sf))
                if lhs != rhs:
                    return False
        return True

    def _sigma_fiber(self, scope, a, b, env) -> FiniteGroupoid:
        ga = self.fiber(scope, a, env)
        inner = scope + (a,)
        ident_env = self.ctx_identity(env)

        def fb(x):
            return self.fiber(inner, b, env + (x,))

        def along(f):
            return ident_env.extend(f.src, f.dst, f)

        def objects():
            out = [(x, y) for x in ga.objects for y in fb(x).objects]
            self._guard(len(out))
            return out

        def hom(p, q):
            out = []
            for f in ga.hom(p[0], q[0]):
                moved = self.tobj(inner, b, along(f), p[1])
                for g in fb(q[0]).hom(moved, q[1]):
                    out.append(ident(p) if p == q and is_ident(f) and is_ident(g)
                               else Mor(p, q, (f, g)))
            return out

        def comp(m2, m1):
            f1, g1 = sigma_parts(m1)
            f2, g2 = sigma_parts(m2)
            f = ga.compose(f2, f1)
            g = fb(f2.dst).compose(g2, self.tmor(inner, b, along(f2), g1))
            p, q = m1.src, m2.dst
            return ident(p) if p == q and is_ident(f) and is_ident(g) else Mor(p, q, (f, g))

        return FiniteGroupoid(objects, hom, comp, name="Sigma")

    # -- transport along context morphisms
    def tobj(self, scope: tuple, ty: Term, m: CMor, x):
        if cmor_is_identity(m):
            return x
        ty = self.norm(scope, ty)
        match ty:
            case Enum() | Nat() | Universe():
                return x
            case Pi(a, b):
                return self._pi_move(scope, a, b, m, x)
            case Sigma(a, b):
                a2 = self.tobj(scope, a, m, x[0])
                return (a2, self.tobj(scope + (a,), b, m.extend(x[0], a2, ident(a2)), x[1]))
            case IdType(a, l, r):
                ga = self.fiber(scope, a, m.dst)
                lm = self.mval(scope, l, a, m)
                rm = self.mval(scope, r, a, m)
                return ga.compose(rm, ga.compose(self.tmor(scope, a, m, x), ga.inverse(lm)))
            case Trunc(a):
                return self.tobj(scope, a, m, x)
        return perm_apply(self.mval(scope, ty, Universe(), m), x)

    def tmor(self, scope: tuple, ty: Term, m: CMor, f):
        if cmor_is_identity(m):
            return f
        ty = self.norm(scope, ty)
        match ty:
            case Enum() | Nat() | Universe():
                return f
            case Pi(a, b):
                s, t = self._pi_move(scope, a, b, m, f.src), self._pi_move(scope, a, b, m, f.dst)
                alpha = components_of(f, f.src)
                minv = self.ctx_inverse(scope, m)
                moved = {}
                for x2 in self.fiber(scope, a, m.dst).objects:
                    x = self.tobj(scope, a, minv, x2)
                    moved[x2] = self.tmor(scope + (a,), b, m.extend(x, x2, ident(x2)), alpha[x])
                return self._nat(s, t, moved)
            case Sigma(a, b):
                fa, g = sigma_parts(f)
                p, q = self.tobj(scope, ty, m, f.src), self.tobj(scope, ty, m, f.dst)
                fa2 = self.tmor(scope, a, m, fa)
                g2 = self.tmor(scope + (a,), b, m.extend(fa.dst, q[0], ident(q[0])), g)
                return ident(p) if p == q and is_ident(fa2) and is_ident(g2) else Mor(p, q, (fa2, g2))
            case Trunc(a):
                return Mor(self.tobj(scope, a, m, f.src), self.tobj(scope, a, m, f.dst), None)
        return ident(self.tobj(scope, ty, m, f.src))

    def _pi_move(self, scope, a, b, m: CMor, s: Fun) -> Fun:
        minv = self.ctx_inverse(scope, m)
        inner = scope + (a,)
        ga2 = self.fiber(scope, a, m.dst)
        obj, mor = {}, {}
        for x2 in ga2.objects:
            x = self.tobj(scope, a, minv, x2)
            obj[x2] = self.tobj(inner, b, m.extend(x, x2, ident(x2)), s.obj[x])
        for f2 in ga2.morphisms():
            f = self.tmor(scope, a, minv, f2)
            y2 = f2.dst
            mor[f2] = self.tmor(inner, b, m.extend(f.dst, y2, ident(y2)), s.mor[f])
        return Fun(obj, mor)

    # -- terms
    def val(self, scope: tuple, t: Term, ty: Term, env: tuple):
        """The element ``t(env)`` of the fiber of ``ty`` over ``env``."""
        ty = self.norm(scope, ty)
        match t:
            case Var(i):
                return env[len(env) - 1 - i]
            case Const(name):
                entry = self.checker.globals.get(name)
                if entry is None or entry.body_term is None:
                    raise FragmentUnsupported(f"postulate {name!r} has no interpretation")
                return self.val((), entry.body_term, entry.type_term, ())
            case Lambda(body):
                if not isinstance(ty, Pi):
                    raise FragmentUnsupported("lambda at a non-function type")
                return self._lam(scope, body, ty, env)
            case App():
                return self._val_app(scope, t, ty, env)
            case ProjL(Pair(a, _)):
                return self.val(scope, a, ty, env)
            case ProjR(Pair(_, b)):
                return self.val(scope, b, ty, env)
            case Pair(a, b):
                return (self.val(scope, a, ty.first, env),
                        self.val(scope, b, instantiate(ty.second, a), env))
            case ProjL(p) | ProjR(p):
                pty = self.norm(scope, self.infer(scope, p))
                v = self.val(scope, p, pty, env)
                return v[0] if isinstance(t, ProjL) else v[1]
            case Zero():
                return 0
            case Succ(n):
                k = self.val(scope, n, Nat(), env) + 1
                if k >= self.nat_cutoff:
                    raise BoundExceeded(f"numeral {k} reaches the Nat cutoff {self.nat_cutoff}")
                return k
            case EnumLit(_, i):
                return i
            case Refl(a):
                lhs, rhs = self.val(scope, ty.lhs, ty.type, env), self.val(scope, ty.rhs, ty.type, env)
                if lhs == rhs:
                    return ident(lhs)
                # endpoints convertible only through truncation: the unique morphism between them
                homs = self.fiber(scope, ty.type, env).hom(lhs, rhs)
                if len(homs) != 1:
                    raise FragmentUnsupported("refl between distinct points of a non-propositional type")
                return homs[0]
            case TruncIn(a):
                return self.val(scope, a, ty.type, env)
            case Enum(n) if isinstance(ty, Universe):
                if n > self.max_card:
                    raise BoundExceeded(f"Enum {n} exceeds the universe bound {self.max_card}")
                return n
            case EnumElim(p, cases, e):
                n = len(cases)
                i = self.val(scope, e, Enum(n), env)
                return self.val(scope, cases[i], App(p, EnumLit(n, i)), env)
            case NatElim(p, z, s, n):
                k = self.val(scope, n, Nat(), env)
                acc = self.val(scope, z, App(p, Zero()), env)
                step = Pi(Nat(), Pi(App(shift(p, 1), Var(0)), App(shift(p, 2), Succ(Var(1)))))
                step = self.norm(scope, step)
                for j in range(k):
                    acc = self._call(scope, s, step, env, [j, acc])
                return acc
            case TruncElim(p, f, _, e):
                fty = self.norm(scope, Pi(self._trunc_inner(scope, e), shift(p, 1)))
                return self._call(scope, f, fty, env, [self.val(scope, e, Trunc(fty.domain), env)])
            case IdElim(p, d, e):
                ety = self.norm(scope, self.infer(scope, e))
                path = self.val(scope, e, ety, env)
                if not is_ident(path):
                    raise FragmentUnsupported("J along a non-identity path")
                return self.val(scope, d, App(App(p, ety.lhs), Refl(ety.lhs)), env)
        raise FragmentUnsupported(f"{type(t).__name__} is outside the interpreted fragment")

    # Application is evaluated pointwise: a lambda or a global body is entered
    # with the argument values bound, which is the substitution clause of the
    # model.  Building the whole function object first would enumerate every
    # input, and on Nat that runs into the cutoff.

    def _val_app(self, scope, t: App, ty: Term, env):
        head, args = t, []
        while isinstance(head, App):
            args.append(head.arg)
            head = head.fn
        args.reverse()
        if isinstance(head, Lambda):
            a = args[0]
            dom = self.norm(scope, self.infer(scope, a))
            rest = head.body
            for b in args[1:]:
                rest = App(rest, shift(b, 1))
            return self.val(scope + (dom,), rest, shift(ty, 1), env + (self.val(scope, a, dom, env),))
        if isinstance(head, Const) and (entry := self.checker.globals.get(head.name)) and entry.body_term:
            fty = self.norm((), entry.type_term)
            vals = []
            for a in args:
                vals.append(self.val(scope, a, fty.domain, env))
                fty = self.norm(scope, instantiate(fty.codomain, a))
            return self._call((), entry.body_term, self.norm((), entry.type_term), (), vals)
        fty = self.norm(scope, self.infer(scope, t.fn))
        s = self.val(scope, t.fn, fty, env)
        return s.obj[self.val(scope, t.arg, fty.domain, env)]

    def _call(self, scope, f: Term, fty: Term, env, vals: list):
        """``f`` of type ``fty`` applied to the already interpreted ``vals``."""
        while vals and isinstance(f, Lambda):
            fty = self.norm(scope, fty)
            scope, env = scope + (fty.domain,), env + (vals[0],)
            f, fty, vals = f.body, fty.codomain, vals[1:]
        if isinstance(f, Const) and vals:
            entry = self.checker.globals.get(f.name)
            if entry is not None and entry.body_term is not None:
                return self._call((), entry.body_term, entry.type_term, (), vals)
        v = self.val(scope, f, self.norm(scope, fty), env)
        for x in vals:
            v = v.obj[x]
        return v

    def _trunc_inner(self, scope, e: Term) -> Term:
        if isinstance(e, TruncIn):
            return self.norm(scope, self.infer(scope, e.point))
        ety = self.norm(scope, self.infer(scope, e))
        if not isinstance(ety, Trunc):
            raise FragmentUnsupported("truncation eliminator on a non-truncated target")
        return ety.type

    def _lam(self, scope, body, ty: Pi, env):
        a, b = ty.domain, ty.codomain
        inner = scope + (a,)
        ga = self.fiber(scope, a, env)
        ident_env = self.ctx_identity(env)
        obj = {x: self.val(inner, body, b, env + (x,)) for x in ga.objects}
        mor = {}
        for f in ga.morphisms():
            if is_ident(f):
                mor[f] = ident(obj[f.src])
            else:
                mor[f] = self.mval(inner, body, b, ident_env.extend(f.src, f.dst, f))
        return Fun(obj, mor)

    def mval(self, scope: tuple, t: Term, ty: Term, m: CMor):
        """The morphism ``t(m) : ty(m)(t(src)) -> t(dst)``."""
        if cmor_is_identity(m):
            return ident(self.val(scope, t, ty, m.dst))
        ty = self.norm(scope, ty)
        if not free_indices(t) and not free_indices(ty):
            return ident(self.val(scope, t, ty, m.dst))
        match ty:
            case Enum() | Nat() | IdType():
                return ident(self.val(scope, t, ty, m.dst))
            case Trunc():
                return Mor(self.tobj(scope, ty, m, self.val(scope, t, ty, m.src)),
                           self.val(scope, t, ty, m.dst), None)
            case Pi() | Sigma() | Universe():
                pass
            case _:
                return ident(self.val(scope, t, ty, m.dst))
        match t:
            case Var(i):
                return m.comps[len(m.comps) - 1 - i]
            case Lambda(body):
                a, b = ty.domain, ty.codomain
                minv = self.ctx_inverse(scope, m)
                alpha = {}
                for x2 in self.fiber(scope, a, m.dst).objects:
                    x = self.tobj(scope, a, minv, x2)
                    alpha[x2] = self.mval(scope + (a,), body, b, m.extend(x, x2, ident(x2)))
                src = self.tobj(scope, ty, m, self.val(scope, t, ty, m.src))
                return self._nat(src, self.val(scope, t, ty, m.dst), alpha)
            case App(Lambda(body), a):
                dom = self.norm(scope, self.infer(scope, a))
                ext = m.extend(self.val(scope, a, dom, m.src), self.val(scope, a, dom, m.dst),
                               self.mval(scope, a, dom, m))
                return self.mval(scope + (dom,), body, shift(ty, 1), ext)
            case ProjL(Pair(a, _)):
                return self.mval(scope, a, ty, m)
            case ProjR(Pair(_, b)):
                return self.mval(scope, b, ty, m)
            case App(f, a):
                fty = self.norm(scope, self.infer(scope, f))
                s_moved = self.tobj(scope, fty, m, self.val(scope, f, fty, m.src))
                am = self.mval(scope, a, fty.domain, m)
                alpha = components_of(self.mval(scope, f, fty, m), s_moved)
                at = self.val(scope, a, fty.domain, m.dst)
                return self.fiber(scope, ty, m.dst).compose(alpha[at], s_moved.mor[am])
            case Pair(a, b):
                fa = self.mval(scope, a, ty.first, m)
                g = self.mval(scope, b, instantiate(ty.second, a), m)
                p = self.tobj(scope, ty, m, self.val(scope, t, ty, m.src))
                q = self.val(scope, t, ty, m.dst)
                return ident(p) if p == q and is_ident(fa) and is_ident(g) else Mor(p, q, (fa, g))
            case ProjL(p) | ProjR(p):
                pty = self.norm(scope, self.infer(scope, p))
                parts = sigma_parts(self.mval(scope, p, pty, m))
                return parts[0] if isinstance(t, ProjL) else parts[1]
        raise FragmentUnsupported(f"{type(t).__name__} along a non-identity context morphism")

    # -- public surface
    def interp_type(self, ty: Term, scope: tuple = ()) -> GroupoidFamily:
        scope = tuple(scope)
        base = self.ctx_groupoid(scope)

        def transport(m: CMor) -> Functor:
            return Functor(self.fiber(scope, ty, m.src), self.fiber(scope, ty, m.dst),
                           lambda x: self.tobj(scope, ty, m, x),
                           lambda f: self.tmor(scope, ty, m, f))

        return GroupoidFamily(base, lambda env: self.fiber(scope, ty, env), transport)

    def interp_term(self, t: Term, ty: Term, scope: tuple = ()) -> Section:
        scope = tuple(scope)
        base = self.ctx_groupoid(scope)
        on_obj = {env: self.val(scope, t, ty, env) for env in base.objects}
        on_mor = {m: self.mval(scope, t, ty, m) for m in base.morphisms()}
        return Section(on_obj, on_mor)


def check_family(fam: GroupoidFamily) -> str | None:
    """Exhaustive strict functoriality of transport; first violation or None."""
    from .groupoid import check_functor
    B = fam.base
    for a in B.objects:
        F = fam.transport(B.identity(a))
        for x in fam.fiber(a).objects:
            if F.obj(x) != x:
                return f"transport(identity at {a!r}) moves {x!r}"
        for f in fam.fiber(a).morphisms():
            if F.mor(f) != f:
                return f"transport(identity at {a!r}) moves {f!r}"
    for a, b in itertools.product(B.objects, repeat=2):
        for f in B.hom(a, b):
            law = check_functor(fam.transport(f))
            if law:
                return f"transport({f!r}): {law}"
            for c in B.objects:
                for g in B.hom(b, c):
                    Fg, Ff, Fgf = fam.transport(g), fam.transport(f), fam.transport(B.compose(g, f))
                    for x in fam.fiber(a).objects:
                        if Fgf.obj(x) != Fg.obj(Ff.obj(x)):
                            return f"transport not composition-preserving on {x!r}"
                    for h in fam.fiber(a).morphisms():
                        if Fgf.mor(h) != Fg.mor(Ff.mor(h)):
                            return f"transport not composition-preserving on {h!r}"
    return None


def check_section(fam: GroupoidFamily, sec: Section) -> str | None:
    """Naturality of a section: typing of each component and compatibility with composition."""
    B = fam.base
    for a in B.objects:
        if sec.on_objects[a] not in fam.fiber(a).objects:
            return f"section value at {a!r} outside the fiber"
    for a, b in itertools.product(B.objects, repeat=2):
        for f in B.hom(a, b):
            moved = fam.transport(f).obj(sec.on_objects[a])
            if sec.on_morphisms[f] not in fam.fiber(b).hom(moved, sec.on_objects[b]):
                return f"section morphism at {f!r} mistyped"
            for c in B.objects:
                for g in B.hom(b, c):
                    gf = B.compose(g, f)
                    rhs = fam.fiber(c).compose(sec.on_morphisms[g], fam.transport(g).mor(sec.on_morphisms[f]))
                    if sec.on_morphisms[gf] != rhs:
                        return f"section not functorial at {g!r} after {f!r}"
    return None
