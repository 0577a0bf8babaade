"""Acceptance criteria, one test each, with a runtime limit per criterion.

Each test prints a single ``PASS``/``FAIL`` line; ``python tests/test_acceptance.py``
runs them without pytest.
"""

import itertools
import json
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from corpus import run_corpus, verdict  # noqa: E402
from oracles import (  # noqa: E402
    UNIVALENCE_DIAGONAL_4, count_bijections, mp_obstruction, within_section_exists,
)
from soundness import EQUAL_PAIRS, FRAGMENT_TYPES, TRUNC_PAIRS, elaborate, sections  # noqa: E402
from stackmodel import interp, stack  # noqa: E402
from stackmodel.countermodels import cc_countermodel, default_grid, emit_report, mp_countermodel  # noqa: E402
from stackmodel.forcing import (  # noqa: E402
    Bounds, forces, local_character_suite, monotonicity_suite, negation_soundness_suite,
    parse_formula,
)
from stackmodel.groupoid import check_univalence_set_universe, groupoids_equivalent, is_prop_groupoid  # noqa: E402
from stackmodel.site import cantor_site, interval_site  # noqa: E402
from stackmodel.syntax import Trunc, parse_term, resolve  # noqa: E402

RESULTS: list[str] = []
I, C = interval_site(), cantor_site()
SITES = {"interval": I, "cantor": C}


def report(name: str, limit: float, body):
    start = time.perf_counter()
    ok, detail = body()
    elapsed = time.perf_counter() - start
    passed = ok and elapsed < limit
    line = f"{'PASS' if passed else 'FAIL'}  {name}: {detail} ({elapsed:.2f}s, limit {limit:g}s)"
    RESULTS.append(line)
    print(line)
    assert ok, detail
    assert elapsed < limit, f"{name} took {elapsed:.2f}s"


# ---------------------------------------------------------------------------


def kernel_corpus():
    results, expected, ch = run_corpus()
    got = {r.name: verdict(r) for r in results}
    prop = ch.globals.get("truncIsProp")
    from stackmodel import kernel
    from stackmodel.syntax import Context
    ty = resolve(parse_term("(A : U)(x y : ||A||) -> Id ||A|| x y"))
    kernel.check(Context(), prop.body_term, ty, ch)
    agree = sum(got[k] == v for k, v in expected.items())
    ok = len(results) >= 40 and agree == len(expected) == len(got)
    return ok, f"{agree}/{len(expected)} verdicts agree over {len(results)} declarations"


def test_kernel_corpus():
    report("kernel corpus", 5, kernel_corpus)


def groupoid_soundness():
    ch = run_corpus()[2]
    identical = 0
    for case in EQUAL_PAIRS:
        conv, fam, s, t = sections(ch, *case)
        if conv and s.on_objects == t.on_objects and s.on_morphisms == t.on_morphisms:
            identical += 1
    unique_iso = 0
    for case in TRUNC_PAIRS:
        conv, fam, s, t = sections(ch, *case)
        if conv and all(len(fam.fiber(e).hom(s.on_objects[e], t.on_objects[e])) == 1
                        for e in fam.base.objects):
            unique_iso += 1
    props = 0
    for tel, ty in FRAGMENT_TYPES:
        scope, (A,) = elaborate(ch, tel, ty)
        fam = interp.GroupoidModel(ch, max_card=2).interp_type(Trunc(A), scope)
        if all(is_prop_groupoid(fam.fiber(e), exhaustive=True) for e in fam.base.objects):
            props += 1
    ok = identical == len(EQUAL_PAIRS) >= 30 and unique_iso == len(TRUNC_PAIRS) and props == len(FRAGMENT_TYPES)
    return ok, (f"{identical}/{len(EQUAL_PAIRS)} pairs identical, {unique_iso}/{len(TRUNC_PAIRS)} truncated pairs"
                f" joined by the unique iso, {props}/{len(FRAGMENT_TYPES)} truncation families propositional")


def test_groupoid_soundness():
    report("groupoid soundness", 10, groupoid_soundness)


def univalence():
    rep = check_univalence_set_universe(4)
    table = {(r["X"], r["Y"]): r["paths"] for r in rep["table"]}
    exact = sum(table[x, y] == count_bijections(x, y) for x, y in itertools.product(range(1, 5), repeat=2))
    diag = [table[k, k] for k in range(5)]
    ok = exact == 16 and diag == UNIVALENCE_DIAGONAL_4 and rep["status"] == "pass"
    return ok, f"{exact}/16 cardinality pairs exact, diagonal {diag}"


def test_univalence():
    report("univalence", 30, univalence)


def descent():
    glued = 0
    for s, names in stack.CATALOG.items():
        S = SITES[s]
        for name in names:
            P = stack.get_prestack(name, S)
            for u in S.opens(1):
                for k in range(4):
                    for c in S.covers(u, k):
                        for a in P.at(u).objects:
                            d = stack.effective_datum(P, c, a)
                            assert stack.check_cocycle(P, d)
                            glued += 1
    rng = random.Random(0)
    props = [(I, stack.get_prestack("const-codiscrete-2", I)), (C, stack.get_prestack("const-codiscrete-2", C)),
             (I, stack.codiscrete_replacement(stack.get_prestack("within-witness-3-6", I))),
             (C, stack.codiscrete_replacement(stack.get_prestack("alpha-witness-8", C)))]
    cocycles = 0
    done = 0
    while done < 1000:
        S, P = props[done % len(props)]
        d = _random_datum(P, S, rng)
        if d is None:
            continue
        cocycles += stack.check_cocycle(P, d)
        done += 1
    idem, total = 0, 0
    for s, names in stack.CATALOG.items():
        S = SITES[s]
        for name in names:
            P = stack.get_prestack(name, S)
            for d in range(3):
                Q = stack.stackify(P, d)
                R = stack.stackify(Q, d)
                total += 1
                idem += all(groupoids_equivalent(R.at(u), Q.at(u)) for u in S.opens(1))
    ok = cocycles == 1000 and idem == total
    return ok, f"{glued} effective data glue, cocycle {cocycles}/1000, stackify idempotent {idem}/{total}"


def _random_datum(P, S, rng):
    u = rng.choice(S.opens(2))
    c = S.covers(u, rng.randint(0, 3))[0]
    secs = []
    for p in c.pieces:
        objs = P.at(p).objects
        if not objs:
            return None
        secs.append(rng.choice(objs))
    meets = stack._meets(S, c)
    trans = {}
    for (i, j), m in meets.items():
        if i < j:
            homs = P.at(m).hom(P.res(m, c.pieces[i], secs[i]), P.res(m, c.pieces[j], secs[j]))
            if not homs:
                return None
            trans[(i, j)] = rng.choice(homs)
    return stack.DescentDatum(c, tuple(secs), tuple(sorted(trans.items())))


def test_descent():
    report("descent and stackification", 60, descent)


def forcing_laws():
    reps = [suite(S, samples=200, seed=11) for S in (C, I)
            for suite in (monotonicity_suite, local_character_suite, negation_soundness_suite)]
    ok = all(r.ok and r.exercised > 0 for r in reps)
    return ok, ", ".join(f"{r.law}@{r.site} {len(r.violations)} violations/{r.exercised} exercised"
                         for r in reps)


def test_forcing_laws():
    report("forcing laws", 30, forcing_laws)


def countable_choice():
    rep = cc_countermodel(8, depth=4, grid=default_grid(50, seed=0))
    oracle = sum(ok == within_section_exists(u.lo, u.hi, n) for u, n, ok in rep.grid_verdicts)
    mesh = cc_countermodel(16, depth=4, grid=[])
    bounds = [mesh.conclusion_obstruction[n]["maxLength"] for n in range(2, 17)]
    verified = all(mesh.conclusion_obstruction[n]["atMax"] and mesh.conclusion_obstruction[n]["beyondMax"]
                   for n in range(2, 17))
    decreasing = all(a > b for a, b in zip(bounds, bounds[1:]))
    checks = sum(rep.premise_checks.values())
    ok = rep.ok and checks == 8 and oracle == len(rep.grid_verdicts) == 400 and decreasing and verified
    return ok, (f"{checks}/8 premise certificates, grid {oracle}/{len(rep.grid_verdicts)} agree with the oracle,"
                f" mesh 2..16 {'strictly decreasing' if decreasing else 'NOT decreasing'}")


def test_countable_choice():
    report("countable choice countermodel", 60, countable_choice)


def markov():
    reps = [mp_countermodel(d) for d in range(1, 11)]
    good = sum(r.ok and r.obstruction == mp_obstruction(r.depth) for r in reps)
    stable = all(b.obstruction.startswith(a.obstruction) for a, b in zip(reps, reps[1:]))
    json.loads(emit_report(reps[-1], "json"))
    return good == 10 and stable, f"{good}/10 depths verified, prefix-stable {stable}"


def test_markov():
    report("Markov countermodel", 30, markov)


CROSS_CANTOR = [("", 8, 0), ("", 8, 3), ("1", 8, 0), ("01", 1, 1), ("001", 1, 0), ("001", 8, 2),
                ("0001", 8, 1), ("0001", 2, 1), ("10", 0, 2), ("000", 8, 2)]
CROSS_INTERVAL = [(2, 4, 0), (2, 4, 2), (3, 6, 0), (3, 6, 1), (3, 2, 1), (4, 8, 1),
                  (4, 8, 2), (5, 10, 2), (3, 1, 2), (6, 12, 2)]


def cross_module():
    agree, rows = 0, []
    for s, b, k in CROSS_CANTOR:
        u = C.parse_open(s)
        f = forces(C, u, parse_formula("Etrunc n. alpha(n) = 1"), Bounds(depth=k, nat_bound=b)).forced
        h = stack.has_section(stack.trunc_stack(stack.get_prestack(f"alpha-witness-{b}", C), len(s) + k), u)
        agree += f == h
        rows.append(f)
    for n, b, k in CROSS_INTERVAL:
        f = forces(I, I.root, parse_formula(f"Etrunc q. within(q, {n})"), Bounds(depth=k, den_bound=b)).forced
        h = stack.has_section(stack.trunc_stack(stack.get_prestack(f"within-witness-{n}-{b}", I), k), I.root)
        agree += f == h
        rows.append(f)
    total = len(CROSS_CANTOR) + len(CROSS_INTERVAL)
    return agree == total == 20, f"{agree}/{total} agree ({sum(rows)} forced, {total - sum(rows)} not)"


def test_cross_module():
    report("forcing versus truncated stacks", 30, cross_module)


if __name__ == "__main__":
    failed = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
