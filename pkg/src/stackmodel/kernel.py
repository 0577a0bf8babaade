"""Bidirectional type checker with normalization by evaluation.

Terms are evaluated into closures-based values, read back into beta/iota
normal terms, and compared by a type-directed conversion that performs eta
for functions and pairs and identifies any two elements of a truncation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .syntax import (
    App, Const, Context, Declaration, Enum, EnumElim, EnumLit, IdElim, IdType,
    Lambda, Nat, NatElim, Pair, Pi, ProjL, ProjR, Refl, Sigma, Succ, Term,
    Trunc, TruncElim, TruncIn, UnivalenceAx, Universe, Var, Zero, pretty,
)


class ErrorKind(str, enum.Enum):
    Mismatch = "Mismatch"
    NotAFunction = "NotAFunction"
    NotAPair = "NotAPair"
    UniverseExpected = "UniverseExpected"
    PropWitnessInvalid = "PropWitnessInvalid"
    Unbound = "Unbound"
    IllFormedContext = "IllFormedContext"
    CannotInfer = "CannotInfer"


class TypingError(Exception):
    def __init__(self, kind: ErrorKind, location: tuple = (), message: str = "",
                 expected: Term | None = None, actual: Term | None = None):
        if (kind is ErrorKind.Mismatch) != (expected is not None and actual is not None):
            raise ValueError("expected/actual are carried exactly by Mismatch errors")
        self.kind = kind
        self.location = tuple(location)
        self.expected = expected
        self.actual = actual
        self.message = message or kind.value
        where = "/".join(self.location) or "<root>"
        super().__init__(f"{kind.value} at {where}: {self.message}")


# ---------------------------------------------------------------------------
# values


@dataclass(frozen=True)
class Closure:
    env: tuple
    body: Term
    globals: "Globals" = field(compare=False)

    def __call__(self, arg: "Value") -> "Value":
        return evaluate((arg,) + self.env, self.body, self.globals)


class Value:
    __slots__ = ()


@dataclass(frozen=True)
class VPi(Value):
    dom: Value
    cod: Closure


@dataclass(frozen=True)
class VLam(Value):
    body: Closure


@dataclass(frozen=True)
class VSigma(Value):
    dom: Value
    cod: Closure


@dataclass(frozen=True)
class VPair(Value):
    fst: Value
    snd: Value


@dataclass(frozen=True)
class VId(Value):
    ty: Value
    lhs: Value
    rhs: Value


@dataclass(frozen=True)
class VRefl(Value):
    point: Value


@dataclass(frozen=True)
class VNat(Value):
    pass


@dataclass(frozen=True)
class VZero(Value):
    pass


@dataclass(frozen=True)
class VSucc(Value):
    pred: Value


@dataclass(frozen=True)
class VU(Value):
    pass


@dataclass(frozen=True)
class VTrunc(Value):
    ty: Value


@dataclass(frozen=True)
class VTruncIn(Value):
    point: Value


@dataclass(frozen=True)
class VEnum(Value):
    n: int


@dataclass(frozen=True)
class VEnumLit(Value):
    n: int
    i: int


# neutral heads
@dataclass(frozen=True)
class HVar:
    level: int


@dataclass(frozen=True)
class HConst:
    name: str


@dataclass(frozen=True)
class HUa:
    a: Value
    b: Value
    e: Value


# eliminator frames
@dataclass(frozen=True)
class FApp:
    arg: Value


@dataclass(frozen=True)
class FFst:
    pass


@dataclass(frozen=True)
class FSnd:
    pass


@dataclass(frozen=True)
class FJ:
    motive: Value
    base: Value


@dataclass(frozen=True)
class FNatElim:
    motive: Value
    zcase: Value
    scase: Value


@dataclass(frozen=True)
class FTruncElim:
    motive: Value
    fn: Value
    witness: Value


@dataclass(frozen=True)
class FEnumElim:
    motive: Value
    cases: tuple


@dataclass(frozen=True)
class VNeutral(Value):
    head: object
    spine: tuple = ()

    def push(self, frame) -> "VNeutral":
        return VNeutral(self.head, self.spine + (frame,))


def var(level: int) -> VNeutral:
    return VNeutral(HVar(level))


@dataclass
class Entry:
    type: Value
    type_term: Term
    value: Value | None = None
    body_term: Term | None = None


Globals = dict  # name -> Entry


# ---------------------------------------------------------------------------
# evaluation


def evaluate(env: tuple, t: Term, globs: Globals) -> Value:
    match t:
        case Var(i):
            return env[i]
        case Const(name):
            entry = globs[name]
            return entry.value if entry.value is not None else VNeutral(HConst(name))
        case Pi(a, b):
            return VPi(evaluate(env, a, globs), Closure(env, b, globs))
        case Lambda(b):
            return VLam(Closure(env, b, globs))
        case App(f, a):
            return apply(evaluate(env, f, globs), evaluate(env, a, globs))
        case Sigma(a, b):
            return VSigma(evaluate(env, a, globs), Closure(env, b, globs))
        case Pair(a, b):
            return VPair(evaluate(env, a, globs), evaluate(env, b, globs))
        case ProjL(p):
            return vfst(evaluate(env, p, globs))
        case ProjR(p):
            return vsnd(evaluate(env, p, globs))
        case IdType(a, x, y):
            return VId(evaluate(env, a, globs), evaluate(env, x, globs), evaluate(env, y, globs))
        case Refl(a):
            return VRefl(evaluate(env, a, globs))
        case IdElim(p, d, e):
            return vj(evaluate(env, p, globs), evaluate(env, d, globs), evaluate(env, e, globs))
        case Nat():
            return VNat()
        case Zero():
            return VZero()
        case Succ(n):
            return VSucc(evaluate(env, n, globs))
        case NatElim(p, z, s, n):
            return vnatrec(*(evaluate(env, x, globs) for x in (p, z, s, n)))
        case Universe():
            return VU()
        case Trunc(a):
            return VTrunc(evaluate(env, a, globs))
        case TruncIn(a):
            return VTruncIn(evaluate(env, a, globs))
        case TruncElim(p, f, w, e):
            return vtrec(*(evaluate(env, x, globs) for x in (p, f, w, e)))
        case UnivalenceAx(a, b, e):
            return VNeutral(HUa(*(evaluate(env, x, globs) for x in (a, b, e))))
        case Enum(n):
            return VEnum(n)
        case EnumLit(n, i):
            return VEnumLit(n, i)
        case EnumElim(p, cases, e):
            return vcase(evaluate(env, p, globs), tuple(evaluate(env, c, globs) for c in cases),
                         evaluate(env, e, globs))
    raise TypeError(f"cannot evaluate {t!r}")


def apply(f: Value, a: Value) -> Value:
    if isinstance(f, VLam):
        return f.body(a)
    if isinstance(f, VNeutral):
        return f.push(FApp(a))
    raise TypeError(f"applying a non-function {f!r}")


def vfst(p: Value) -> Value:
    if isinstance(p, VPair):
        return p.fst
    if isinstance(p, VNeutral):
        return p.push(FFst())
    raise TypeError("projection from a non-pair")


def vsnd(p: Value) -> Value:
    if isinstance(p, VPair):
        return p.snd
    if isinstance(p, VNeutral):
        return p.push(FSnd())
    raise TypeError("projection from a non-pair")


def vj(motive: Value, base: Value, e: Value) -> Value:
    if isinstance(e, VRefl):
        return base
    if isinstance(e, VNeutral):
        return e.push(FJ(motive, base))
    raise TypeError("J on a non-path")


def vnatrec(motive: Value, z: Value, s: Value, n: Value) -> Value:
    # iterate over the numeral prefix to avoid deep recursion
    preds = []
    while isinstance(n, VSucc):
        preds.append(n.pred)
        n = n.pred
    if isinstance(n, VZero):
        acc = z
    elif isinstance(n, VNeutral):
        acc = n.push(FNatElim(motive, z, s))
    else:
        raise TypeError("natrec on a non-number")
    for k in reversed(preds):
        acc = apply(apply(s, k), acc)
    return acc


def vtrec(motive: Value, f: Value, w: Value, e: Value) -> Value:
    if isinstance(e, VTruncIn):
        return apply(f, e.point)
    if isinstance(e, VNeutral):
        return e.push(FTruncElim(motive, f, w))
    raise TypeError("trec on a non-truncation")


def vcase(motive: Value, cases: tuple, e: Value) -> Value:
    if isinstance(e, VEnumLit):
        return cases[e.i]
    if isinstance(e, VNeutral):
        return e.push(FEnumElim(motive, cases))
    raise TypeError("case on a non-enum")


# ---------------------------------------------------------------------------
# readback


def quote(level: int, v: Value) -> Term:
    """Untyped readback to a beta/iota normal term."""
    match v:
        case VPi(a, cl):
            return Pi(quote(level, a), quote(level + 1, cl(var(level))))
        case VLam(cl):
            return Lambda(quote(level + 1, cl(var(level))))
        case VSigma(a, cl):
            return Sigma(quote(level, a), quote(level + 1, cl(var(level))))
        case VPair(a, b):
            return Pair(quote(level, a), quote(level, b))
        case VId(a, x, y):
            return IdType(quote(level, a), quote(level, x), quote(level, y))
        case VRefl(a):
            return Refl(quote(level, a))
        case VNat():
            return Nat()
        case VZero():
            return Zero()
        case VSucc(n):
            return Succ(quote(level, n))
        case VU():
            return Universe()
        case VTrunc(a):
            return Trunc(quote(level, a))
        case VTruncIn(a):
            return TruncIn(quote(level, a))
        case VEnum(n):
            return Enum(n)
        case VEnumLit(n, i):
            return EnumLit(n, i)
        case VNeutral(head, spine):
            return _quote_neutral(level, head, spine)
    raise TypeError(f"cannot read back {v!r}")


def _quote_neutral(level: int, head, spine: tuple) -> Term:
    match head:
        case HVar(l):
            t: Term = Var(level - 1 - l)
        case HConst(name):
            t = Const(name)
        case HUa(a, b, e):
            t = UnivalenceAx(quote(level, a), quote(level, b), quote(level, e))
    for fr in spine:
        match fr:
            case FApp(a):
                t = App(t, quote(level, a))
            case FFst():
                t = ProjL(t)
            case FSnd():
                t = ProjR(t)
            case FJ(p, d):
                t = IdElim(quote(level, p), quote(level, d), t)
            case FNatElim(p, z, s):
                t = NatElim(quote(level, p), quote(level, z), quote(level, s), t)
            case FTruncElim(p, f, w):
                t = TruncElim(quote(level, p), quote(level, f), quote(level, w), t)
            case FEnumElim(p, cases):
                t = EnumElim(quote(level, p), tuple(quote(level, c) for c in cases), t)
    return t


# ---------------------------------------------------------------------------
# derived type values built from fixed term templates

# env (B, A): quasi-inverse data between A and B
_EQUIV = Sigma(
    Pi(Var(1), Var(1)),
    Sigma(
        Pi(Var(1), Var(3)),
        Sigma(
            Pi(Var(3), IdType(Var(4), App(Var(1), App(Var(2), Var(0))), Var(0))),
            Pi(Var(3), IdType(Var(4), App(Var(3), App(Var(2), Var(0))), Var(0))),
        ),
    ),
)
# env (a, A): (y : A) -> Id A a y -> U
_J_MOTIVE = Pi(Var(1), Pi(IdType(Var(2), Var(1), Var(0)), Universe()))
# env (P,): (k : Nat) -> P k -> P (suc k)
_NAT_STEP = Pi(Nat(), Pi(App(Var(1), Var(0)), App(Var(2), Succ(Var(1)))))
# env (P,): (x y : P) -> Id P x y
_IS_PROP = Pi(Var(0), Pi(Var(1), IdType(Var(2), Var(1), Var(0))))
# env (P, A): A -> P
_ARROW = Pi(Var(1), Var(1))
# env (): Nat -> U
_NAT_MOTIVE = Pi(Nat(), Universe())


def equiv_type(a: Value, b: Value, globs: Globals | None = None) -> Value:
    return evaluate((b, a), _EQUIV, globs or {})


def equiv_term(a: Term, b: Term) -> Term:
    """The equivalence-record type between two closed type terms."""
    from .syntax import subst
    return subst(subst(_EQUIV, b, 0), a, 0)


def is_prop_type(p: Value, globs: Globals) -> Value:
    return evaluate((p,), _IS_PROP, globs)


# ---------------------------------------------------------------------------
# conversion


def conv(level: int, ty: Value, a: Value, b: Value, types: tuple, globs: Globals) -> bool:
    """Type-directed definitional equality of ``a`` and ``b`` at ``ty``."""
    match ty:
        case VPi(_, cl):
            x = var(level)
            return conv(level + 1, cl(x), apply(a, x), apply(b, x), types + (ty.dom,), globs)
        case VSigma(dom, cl):
            a1, b1 = vfst(a), vfst(b)
            return conv(level, dom, a1, b1, types, globs) and conv(
                level, cl(a1), vsnd(a), vsnd(b), types, globs)
        case VTrunc():
            return True
        case VU():
            return conv_type(level, a, b, types, globs)
    match a, b:
        case VZero(), VZero():
            return True
        case VSucc(m), VSucc(n):
            return conv(level, VNat(), m, n, types, globs)
        case VEnumLit(_, i), VEnumLit(_, j):
            return i == j
        case VRefl(x), VRefl(y):
            return isinstance(ty, VId) and conv(level, ty.ty, x, y, types, globs)
        case VNeutral(), VNeutral():
            return conv_neutral(level, a, b, types, globs) is not None
    return False


def conv_type(level: int, a: Value, b: Value, types: tuple, globs: Globals) -> bool:
    match a, b:
        case (VPi(d1, c1), VPi(d2, c2)) | (VSigma(d1, c1), VSigma(d2, c2)):
            if type(a) is not type(b) or not conv_type(level, d1, d2, types, globs):
                return False
            x = var(level)
            return conv_type(level + 1, c1(x), c2(x), types + (d1,), globs)
        case VId(t1, x1, y1), VId(t2, x2, y2):
            return (conv_type(level, t1, t2, types, globs)
                    and conv(level, t1, x1, x2, types, globs)
                    and conv(level, t1, y1, y2, types, globs))
        case VTrunc(t1), VTrunc(t2):
            return conv_type(level, t1, t2, types, globs)
        case (VNat(), VNat()) | (VU(), VU()):
            return True
        case VEnum(m), VEnum(n):
            return m == n
        case VNeutral(), VNeutral():
            return conv_neutral(level, a, b, types, globs) is not None
    return False


def _head_type(head, types: tuple, globs: Globals) -> Value:
    match head:
        case HVar(l):
            return types[l]
        case HConst(name):
            return globs[name].type
        case HUa(a, b, _):
            return VId(VU(), a, b)


def conv_neutral(level: int, n1: VNeutral, n2: VNeutral, types: tuple, globs: Globals):
    """Compare two neutrals; return their common type, or None."""
    h1, h2 = n1.head, n2.head
    if type(h1) is not type(h2):
        return None
    if isinstance(h1, HUa):
        ok = (conv_type(level, h1.a, h2.a, types, globs)
              and conv_type(level, h1.b, h2.b, types, globs)
              and conv(level, equiv_type(h1.a, h1.b, globs), h1.e, h2.e, types, globs))
        if not ok:
            return None
    elif h1 != h2:
        return None
    if len(n1.spine) != len(n2.spine):
        return None
    ty = _head_type(h1, types, globs)
    cur = VNeutral(h1)
    for f1, f2 in zip(n1.spine, n2.spine):
        if type(f1) is not type(f2):
            return None
        match f1:
            case FApp(x):
                if not isinstance(ty, VPi) or not conv(level, ty.dom, x, f2.arg, types, globs):
                    return None
                ty = ty.cod(x)
            case FFst():
                ty = ty.dom
            case FSnd():
                ty = ty.cod(vfst(cur))
            case FJ(p, d):
                a_ty, a, b = ty.ty, ty.lhs, ty.rhs
                mty = evaluate((a, a_ty), _J_MOTIVE, globs)
                if not conv(level, mty, p, f2.motive, types, globs):
                    return None
                if not conv(level, apply(apply(p, a), VRefl(a)), d, f2.base, types, globs):
                    return None
                ty = apply(apply(p, b), cur)
            case FNatElim(p, z, s):
                if not (conv(level, evaluate((), _NAT_MOTIVE, globs), p, f2.motive, types, globs)
                        and conv(level, apply(p, VZero()), z, f2.zcase, types, globs)
                        and conv(level, evaluate((p,), _NAT_STEP, globs), s, f2.scase, types, globs)):
                    return None
                ty = apply(p, cur)
            case FTruncElim(p, f, w):
                inner = ty.ty
                if not (conv_type(level, p, f2.motive, types, globs)
                        and conv(level, evaluate((p, inner), _ARROW, globs), f, f2.fn, types, globs)
                        and conv(level, is_prop_type(p, globs), w, f2.witness, types, globs)):
                    return None
                ty = p
            case FEnumElim(p, cases):
                n = ty.n
                mty = VPi(VEnum(n), Closure((), Universe(), globs))
                if len(cases) != len(f2.cases) or not conv(level, mty, p, f2.motive, types, globs):
                    return None
                for i, (c1, c2) in enumerate(zip(cases, f2.cases)):
                    if not conv(level, apply(p, VEnumLit(n, i)), c1, c2, types, globs):
                        return None
                ty = apply(p, cur)
        cur = cur.push(f1)
    return ty


# ---------------------------------------------------------------------------
# checking


@dataclass(frozen=True)
class Ctx:
    """Internal context: types as values, outermost first, plus the identity env."""

    types: tuple = ()
    env: tuple = ()

    @property
    def level(self) -> int:
        return len(self.types)

    def bind(self, ty: Value) -> "Ctx":
        return Ctx(self.types + (ty,), (var(self.level),) + self.env)


@dataclass
class DeclResult:
    name: str
    status: str
    errorKind: str | None = None
    message: str = ""
    normalizedType: str | None = None

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "errorKind": self.errorKind,
            "message": self.message,
            "normalizedType": self.normalizedType,
        }


class Checker:
    """One checking session: owns the global declarations seen so far."""

    def __init__(self):
        self.globals: Globals = {}

    # -- helpers
    def eval(self, ctx: Ctx, t: Term) -> Value:
        return evaluate(ctx.env, t, self.globals)

    def quote(self, ctx: Ctx, v: Value) -> Term:
        return quote(ctx.level, v)

    def conv(self, ctx: Ctx, ty: Value, a: Value, b: Value) -> bool:
        return conv(ctx.level, ty, a, b, ctx.types, self.globals)

    def conv_type(self, ctx: Ctx, a: Value, b: Value) -> bool:
        return conv_type(ctx.level, a, b, ctx.types, self.globals)

    def mismatch(self, ctx: Ctx, path, expected: Value, actual: Value, what: str = ""):
        e, a = self.quote(ctx, expected), self.quote(ctx, actual)
        names = [f"x{i}" for i in range(ctx.level)]
        msg = f"expected {pretty(e, names)}, got {pretty(a, names)}"
        if what:
            msg = f"{what}: {msg}"
        return TypingError(ErrorKind.Mismatch, path, msg, e, a)

    def elaborate_context(self, context: Context) -> Ctx:
        ctx = Ctx()
        for k, ty in enumerate(context.telescope):
            try:
                self.check_type(ctx, ty, (f"ctx[{k}]",))
            except TypingError as err:
                raise TypingError(ErrorKind.IllFormedContext, err.location, err.message) from err
            ctx = ctx.bind(self.eval(ctx, ty))
        return ctx

    # -- judgments
    def check_type(self, ctx: Ctx, t: Term, path: tuple = ()) -> None:
        match t:
            case Universe() | Nat() | Enum():
                return
            case Pi(a, b) | Sigma(a, b):
                self.check_type(ctx, a, path + ("domain",))
                self.check_type(ctx.bind(self.eval(ctx, a)), b, path + ("codomain",))
            case IdType(a, x, y):
                self.check_type(ctx, a, path + ("type",))
                av = self.eval(ctx, a)
                self.check(ctx, x, av, path + ("lhs",))
                self.check(ctx, y, av, path + ("rhs",))
            case Trunc(a):
                self.check_type(ctx, a, path + ("type",))
            case _:
                self.check(ctx, t, VU(), path)

    def check(self, ctx: Ctx, t: Term, ty: Value, path: tuple = ()) -> None:
        match t:
            case Lambda(body):
                if not isinstance(ty, VPi):
                    raise TypingError(ErrorKind.NotAFunction, path,
                                      "lambda checked against a non-function type")
                self.check(ctx.bind(ty.dom), body, ty.cod(var(ctx.level)), path + ("body",))
                return
            case Pair(a, b):
                if not isinstance(ty, VSigma):
                    raise TypingError(ErrorKind.NotAPair, path, "pair checked against a non-sigma type")
                self.check(ctx, a, ty.dom, path + ("fst",))
                self.check(ctx, b, ty.cod(self.eval(ctx, a)), path + ("snd",))
                return
            case TruncIn(a):
                if isinstance(ty, VTrunc):
                    self.check(ctx, a, ty.ty, path + ("point",))
                    return
                inner = self.infer(ctx, a, path + ("point",))
                raise self.mismatch(ctx, path, ty, VTrunc(inner))
            case Refl(a) if isinstance(ty, VId):
                self.check(ctx, a, ty.ty, path + ("point",))
                av = self.eval(ctx, a)
                if not (self.conv(ctx, ty.ty, av, ty.lhs) and self.conv(ctx, ty.ty, av, ty.rhs)):
                    raise self.mismatch(ctx, path, ty, VId(ty.ty, av, av))
                return
        actual = self.infer(ctx, t, path)
        if not self.conv_type(ctx, ty, actual):
            raise self.mismatch(ctx, path, ty, actual)

    def infer(self, ctx: Ctx, t: Term, path: tuple = ()) -> Value:
        g = self.globals
        match t:
            case Var(i):
                if not isinstance(i, int) or not 0 <= i < ctx.level:
                    raise TypingError(ErrorKind.Unbound, path, f"unbound variable {i}")
                return ctx.types[ctx.level - 1 - i]
            case Const(name):
                if name not in g:
                    raise TypingError(ErrorKind.Unbound, path, f"unknown constant {name!r}")
                return g[name].type
            case App(f, a):
                fty = self.infer(ctx, f, path + ("fn",))
                if not isinstance(fty, VPi):
                    raise TypingError(ErrorKind.NotAFunction, path, "applying a non-function")
                self.check(ctx, a, fty.dom, path + ("arg",))
                return fty.cod(self.eval(ctx, a))
            case ProjL(p) | ProjR(p):
                pty = self.infer(ctx, p, path + ("pair",))
                if not isinstance(pty, VSigma):
                    raise TypingError(ErrorKind.NotAPair, path, "projection from a non-pair")
                if isinstance(t, ProjL):
                    return pty.dom
                return pty.cod(vfst(self.eval(ctx, p)))
            case Pi(a, b) | Sigma(a, b):
                self.check(ctx, a, VU(), path + ("domain",))
                self.check(ctx.bind(self.eval(ctx, a)), b, VU(), path + ("codomain",))
                return VU()
            case IdType(a, x, y):
                self.check(ctx, a, VU(), path + ("type",))
                av = self.eval(ctx, a)
                self.check(ctx, x, av, path + ("lhs",))
                self.check(ctx, y, av, path + ("rhs",))
                return VU()
            case Trunc(a):
                self.check(ctx, a, VU(), path + ("type",))
                return VU()
            case Nat() | Enum():
                return VU()
            case Universe():
                raise TypingError(ErrorKind.UniverseExpected, path,
                                  "U is a type but has no type (U : U is rejected)")
            case Zero():
                return VNat()
            case Succ(n):
                self.check(ctx, n, VNat(), path + ("pred",))
                return VNat()
            case EnumLit(n, _):
                return VEnum(n)
            case Refl(a):
                aty = self.infer(ctx, a, path + ("point",))
                av = self.eval(ctx, a)
                return VId(aty, av, av)
            case IdElim(p, d, e):
                ety = self.infer(ctx, e, path + ("target",))
                if not isinstance(ety, VId):
                    raise self.mismatch(ctx, path + ("target",),
                                        VId(var_named("?A"), var_named("?a"), var_named("?b")), ety)
                self.check(ctx, p, evaluate((ety.lhs, ety.ty), _J_MOTIVE, g), path + ("motive",))
                pv = self.eval(ctx, p)
                self.check(ctx, d, apply(apply(pv, ety.lhs), VRefl(ety.lhs)), path + ("base",))
                return apply(apply(pv, ety.rhs), self.eval(ctx, e))
            case NatElim(p, z, s, n):
                self.check(ctx, p, evaluate((), _NAT_MOTIVE, g), path + ("motive",))
                pv = self.eval(ctx, p)
                self.check(ctx, z, apply(pv, VZero()), path + ("zcase",))
                self.check(ctx, s, evaluate((pv,), _NAT_STEP, g), path + ("scase",))
                self.check(ctx, n, VNat(), path + ("target",))
                return apply(pv, self.eval(ctx, n))
            case TruncElim(p, f, w, e):
                self.check_type(ctx, p, path + ("motive",))
                pv = self.eval(ctx, p)
                if isinstance(e, TruncIn):
                    inner = self.infer(ctx, e.point, path + ("target", "point"))
                else:
                    ety = self.infer(ctx, e, path + ("target",))
                    if not isinstance(ety, VTrunc):
                        raise self.mismatch(ctx, path + ("target",), VTrunc(var_named("?A")), ety)
                    inner = ety.ty
                self.check(ctx, f, evaluate((pv, inner), _ARROW, g), path + ("fn",))
                try:
                    self.check(ctx, w, is_prop_type(pv, g), path + ("propWitness",))
                except TypingError as err:
                    raise TypingError(
                        ErrorKind.PropWitnessInvalid, err.location,
                        f"eliminator target is not shown to be a proposition ({err.message})",
                    ) from err
                return pv
            case EnumElim(p, cases, e):
                ety = self.infer(ctx, e, path + ("target",))
                if not isinstance(ety, VEnum):
                    raise self.mismatch(ctx, path + ("target",), VEnum(len(cases)), ety)
                if len(cases) != ety.n:
                    raise self.mismatch(ctx, path + ("cases",), ety, VEnum(len(cases)),
                                        "case count does not match the enum")
                self.check(ctx, p, VPi(ety, Closure((), Universe(), g)), path + ("motive",))
                pv = self.eval(ctx, p)
                for i, c in enumerate(cases):
                    self.check(ctx, c, apply(pv, VEnumLit(ety.n, i)), path + (f"case{i}",))
                return apply(pv, self.eval(ctx, e))
            case UnivalenceAx(a, b, e):
                self.check(ctx, a, VU(), path + ("typeA",))
                self.check(ctx, b, VU(), path + ("typeB",))
                av, bv = self.eval(ctx, a), self.eval(ctx, b)
                self.check(ctx, e, equiv_type(av, bv, g), path + ("equiv",))
                return VId(VU(), av, bv)
            case Lambda():
                raise TypingError(ErrorKind.NotAFunction, path,
                                  "cannot infer the type of an unannotated lambda")
            case Pair():
                raise TypingError(ErrorKind.NotAPair, path, "cannot infer the type of a pair")
            case TruncIn():
                raise TypingError(ErrorKind.CannotInfer, path,
                                  "truncation introduction is checked, not inferred")
        raise TypingError(ErrorKind.CannotInfer, path, f"cannot infer {type(t).__name__}")

    # -- declarations
    def declare(self, decl: Declaration) -> DeclResult:
        ctx = Ctx()
        try:
            self.check_type(ctx, decl.annotation, ("annotation",))
            ty = self.eval(ctx, decl.annotation)
            value = None
            if decl.body is not None:
                self.check(ctx, decl.body, ty, ("body",))
                value = self.eval(ctx, decl.body)
        except TypingError as err:
            return DeclResult(decl.name, "error", err.kind.value, str(err))
        self.globals[decl.name] = Entry(ty, decl.annotation, value, decl.body)
        return DeclResult(decl.name, "ok", normalizedType=pretty(quote(0, ty)))

    def check_declarations(self, decls) -> list[DeclResult]:
        return [self.declare(d) for d in decls]


def var_named(name: str) -> VNeutral:
    """Placeholder neutral used only to render schematic expected types."""
    return VNeutral(HConst(name))


# ---------------------------------------------------------------------------
# term-level API over syntactic contexts


def _session(checker: Checker | None) -> Checker:
    return checker if checker is not None else Checker()


def infer(ctx: Context, t: Term, checker: Checker | None = None) -> Term:
    """Infer the type of ``t``; the result is in normal form."""
    ch = _session(checker)
    ic = ch.elaborate_context(ctx)
    return ch.quote(ic, ch.infer(ic, t))


def check(ctx: Context, t: Term, ty: Term, checker: Checker | None = None) -> None:
    ch = _session(checker)
    ic = ch.elaborate_context(ctx)
    ch.check_type(ic, ty, ("type",))
    ch.check(ic, t, ch.eval(ic, ty))


def check_is_type(ctx: Context, ty: Term, checker: Checker | None = None) -> None:
    ch = _session(checker)
    ch.check_type(ch.elaborate_context(ctx), ty)


def normalize(ctx: Context, t: Term, checker: Checker | None = None) -> Term:
    ch = _session(checker)
    ic = ch.elaborate_context(ctx)
    return ch.quote(ic, ch.eval(ic, t))


def conv_terms(ctx: Context, t: Term, u: Term, ty: Term, checker: Checker | None = None) -> bool:
    """Definitional equality of ``t`` and ``u`` at type ``ty``."""
    ch = _session(checker)
    ic = ch.elaborate_context(ctx)
    return ch.conv(ic, ch.eval(ic, ty), ch.eval(ic, t), ch.eval(ic, u))


def check_source(text: str, checker: Checker | None = None) -> list[DeclResult]:
    """Parse, resolve and check every declaration of a `.tt` source.

    Syntax errors abort the whole file (``ParseError``); an unbound name only
    fails its own declaration.
    """
    from .syntax import ScopeError, parse_file, resolve
    ch = _session(checker)
    results = []
    seen: list[str] = list(ch.globals)
    for d in parse_file(text):
        try:
            ann = resolve(d.annotation, (), seen)
            body = resolve(d.body, (), seen) if d.body is not None else None
        except ScopeError as err:
            results.append(DeclResult(d.name, "error", ErrorKind.Unbound.value, str(err)))
            seen.append(d.name)
            continue
        results.append(ch.declare(Declaration(d.name, ann, body, d.line)))
        seen.append(d.name)
    return results
