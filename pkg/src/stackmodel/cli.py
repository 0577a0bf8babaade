"""Command-line entry point: ``stackmodel <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from . import countermodels, forcing, groupoid, interp, kernel, site, stack
from .syntax import ParseError

SCHEMA_VERSION = countermodels.SCHEMA_VERSION


class UsageError(Exception):
    pass


def prelude_text() -> str:
    return resources.files("stackmodel").joinpath("data/prelude.tt").read_text()


def _positive(name: str, value: int, minimum: int = 1) -> int:
    if value < minimum:
        raise UsageError(f"{name} must be at least {minimum}, got {value}")
    return value


def _read(path: str) -> str:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    return p.read_text()


def _session(args) -> tuple[kernel.Checker, list]:
    ch = kernel.Checker()
    if args.prelude:
        pre = kernel.check_source(prelude_text(), ch)
        if any(r.status != "ok" for r in pre):
            raise RuntimeError("the shipped prelude does not check")
    return ch, kernel.check_source(_read(args.file), ch)


# ---------------------------------------------------------------------------
# subcommands; each returns (exit code, document, text)


def cmd_check(args):
    try:
        _, results = _session(args)
    except ParseError as err:
        doc = {"check": "kernel", "file": args.file, "status": "fail", "parseError": str(err)}
        return 1, doc, f"{args.file}: {err}"
    ok = all(r.status == "ok" for r in results)
    doc = {"check": "kernel", "file": args.file, "status": "pass" if ok else "fail",
           "declarations": [r.as_dict() for r in results]}
    lines = []
    for r in results:
        if r.status == "ok":
            lines.append(f"ok     {r.name} : {r.normalizedType}")
        else:
            lines.append(f"error  {r.name} [{r.errorKind}] {r.message}")
    lines.append(f"{sum(r.status == 'ok' for r in results)}/{len(results)} declarations ok")
    return (0 if ok else 1), doc, "\n".join(lines)


def _describe(G: groupoid.FiniteGroupoid, limit: int = 64) -> dict:
    objs = G.objects
    out = {"objects": len(objs), "morphisms": G.size()[1], "isProp": groupoid.is_prop_groupoid(G),
           "components": len(groupoid.components(G))}
    if len(objs) <= limit:
        out["objectList"] = [repr(x) for x in objs]
    return out


def cmd_eval_groupoid(args):
    try:
        ch, results = _session(args)
    except ParseError as err:
        return 1, {"check": "groupoid-interpretation", "status": "fail", "parseError": str(err)}, str(err)
    res = next((r for r in results if r.name == args.decl), None)
    if res is None:
        raise UsageError(f"no declaration named {args.decl!r} in {args.file}")
    params = {"file": args.file, "decl": args.decl, "maxCard": args.max_card, "natCutoff": args.nat_cutoff}
    doc = {"check": "groupoid-interpretation", "parameters": params}
    if res.status != "ok":
        doc |= {"status": "fail", "counterexample": {"kernel": res.as_dict()}}
        return 1, doc, f"{args.decl} does not typecheck: {res.message}"
    entry = ch.globals[args.decl]
    model = interp.GroupoidModel(ch, nat_cutoff=args.nat_cutoff, max_card=args.max_card, budget=args.budget)
    try:
        fam = model.interp_type(entry.type_term)
        G = fam.fiber(())
        problem = groupoid.validate_groupoid(G)
        doc["type"] = _describe(G) | {"valid": problem["status"] == "valid"}
        status = "pass" if problem["status"] == "valid" else "fail"
        if status == "fail":
            doc["counterexample"] = {"groupoid": problem}
        text = [f"{args.decl} : {res.normalizedType}",
                f"  type: {doc['type']['objects']} objects, {doc['type']['morphisms']} morphisms"
                f"{', a proposition' if doc['type']['isProp'] else ''}"]
        if entry.body_term is not None:
            sec = model.interp_term(entry.body_term, entry.type_term)
            err = interp.check_section(fam, sec)
            value = sec.on_objects[()]
            doc["value"] = {"object": repr(value), "sectionOk": err is None}
            if err is not None:
                status = "fail"
                doc["counterexample"] = {"section": err}
            text.append(f"  value: {value!r}")
        else:
            text.append("  postulate: no value to interpret")
    except (interp.FragmentUnsupported, groupoid.BoundExceeded) as err:
        doc |= {"status": "fail", "counterexample": {"unsupported": str(err)}}
        return 1, doc, f"{args.decl}: outside the interpreted fragment: {err}"
    doc["status"] = status
    text.append(f"status: {status}")
    return (0 if status == "pass" else 1), doc, "\n".join(text)


def cmd_univalence(args):
    _positive("--max-card", args.max_card)
    rep = groupoid.check_univalence_set_universe(args.max_card)
    K = args.max_card
    counts = {(r["X"], r["Y"]): r["paths"] for r in rep["table"]}
    width = max(3, len(str(max(counts.values()))) + 1)
    lines = ["paths in U between cardinalities (rows X, columns Y)",
             "   " + "".join(f"{y:>{width}}" for y in range(K + 1))]
    for x in range(K + 1):
        lines.append(f"{x:>3}" + "".join(f"{counts[x, y]:>{width}}" for y in range(K + 1)))
    lines.append(f"status: {rep['status']}")
    return (0 if rep["status"] == "pass" else 1), rep, "\n".join(lines)


def _site(args) -> site.Site:
    try:
        return site.get_site(args.site)
    except site.SiteError as err:
        raise UsageError(str(err)) from None


def cmd_stack_check(args):
    _positive("--depth", args.depth, 0)
    S = _site(args)
    try:
        F = stack.get_prestack(args.prestack, S)
    except (KeyError, ValueError) as err:
        raise UsageError(str(err).strip("'\"")) from None
    rep = stack.is_stack(F, args.depth, args.budget)
    doc = rep.as_dict()
    bad = [r for r in rep.records if not (r.fullyFaithful and r.essentiallySurjective)]
    lines = [f"{args.prestack} on {args.site} up to depth {args.depth}: "
             f"{len(rep.records) - len(bad)}/{len(rep.records)} covers satisfy descent"]
    for r in bad[:5]:
        lines.append(f"  fails at {r.open} level {r.level}: fully faithful {r.fullyFaithful},"
                     f" essentially surjective {r.essentiallySurjective}")
    lines.append(f"status: {doc['status']}")
    return (0 if rep.is_stack else 1), doc, "\n".join(lines)


def cmd_force(args):
    S = _site(args)
    b = forcing.Bounds(depth=_positive("--depth", args.depth, 0),
                       nat_bound=_positive("--nat-bound", args.nat_bound, 0),
                       den_bound=_positive("--den-bound", args.den_bound))
    try:
        u = S.parse_open(args.open)
        phi = forcing.parse_formula(args.formula)
    except (site.SiteError, forcing.FormulaError) as err:
        raise UsageError(str(err)) from None
    res = forcing.Forcing(S, b).forces(u, phi)
    doc = {"query": {"site": S.name, "open": site.open_to_json(u), "formula": forcing.show(phi)},
           **countermodels.forcing_json(res)}
    if res.forced:
        valid = forcing.check_certificate(S, u, phi, res.certificate, b)
        doc["certificateChecks"] = valid
        text = f"{u} forces {forcing.show(phi)}" + ("" if valid else " (certificate FAILED to check)")
        return (0 if valid else 1), doc, text
    path = " > ".join(str(p) for p in res.obstruction)
    return 0, doc, f"{u} does not force {forcing.show(phi)} up to {b.as_dict()}; obstruction {path}"


def cmd_demo_cc(args):
    _positive("--n", args.n, 2)
    _positive("--depth", args.depth, 0)
    rep = countermodels.cc_countermodel(args.n, args.depth, countermodels.default_grid(seed=args.seed))
    return (0 if rep.ok else 1), json.loads(countermodels.emit_report(rep, "json")), \
        countermodels.emit_report(rep, "text")


def cmd_demo_mp(args):
    _positive("--depth", args.depth)
    rep = countermodels.mp_countermodel(args.depth)
    return (0 if rep.ok else 1), json.loads(countermodels.emit_report(rep, "json")), \
        countermodels.emit_report(rep, "text")


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    def globals_parser(defaults: bool) -> argparse.ArgumentParser:
        g = _Parser(add_help=False)
        # after the subcommand the flags only override what was given before it
        kw = (lambda v: {"default": v}) if defaults else (lambda v: {"default": argparse.SUPPRESS})
        g.add_argument("--output", choices=("text", "json"), **kw("text"))
        g.add_argument("--seed", type=int, help="seed for sampled grids (default 0)", **kw(0))
        g.add_argument("--budget", type=int, help="enumeration budget", **kw(200_000))
        return g

    common = globals_parser(False)
    p = _Parser(prog="stackmodel", parents=[globals_parser(True)],
                description="Type checking, groupoid semantics and forcing over stacks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", parents=[common], help="typecheck a .tt file")
    c.add_argument("file")
    c.add_argument("--prelude", action="store_true", help="check the shipped prelude first")
    c.set_defaults(run=cmd_check)

    e = sub.add_parser("eval-groupoid", parents=[common], help="interpret a declaration in groupoids")
    e.add_argument("file")
    e.add_argument("--decl", required=True)
    e.add_argument("--prelude", action="store_true")
    e.add_argument("--max-card", type=int, default=2)
    e.add_argument("--nat-cutoff", type=int, default=32)
    e.set_defaults(run=cmd_eval_groupoid)

    u = sub.add_parser("univalence", parents=[common], help="paths in U versus bijections")
    u.add_argument("--max-card", type=int, required=True)
    u.set_defaults(run=cmd_univalence)

    s = sub.add_parser("stack-check", parents=[common], help="descent for a catalog prestack")
    s.add_argument("--site", required=True)
    s.add_argument("--depth", type=int, default=2)
    s.add_argument("--prestack", required=True,
                   help="; ".join(f"{k}: {', '.join(v)}" for k, v in stack.CATALOG.items()))
    s.set_defaults(run=cmd_stack_check)

    f = sub.add_parser("force", parents=[common], help="evaluate U ⊩ φ")
    f.add_argument("--site", required=True)
    f.add_argument("--open", default=None, help="(lo,hi) or a binary prefix; default the whole space")
    f.add_argument("--formula", required=True)
    f.add_argument("--depth", type=int, default=3)
    f.add_argument("--nat-bound", type=int, default=32)
    f.add_argument("--den-bound", type=int, default=1_000_000)
    f.set_defaults(run=cmd_force)

    cc = sub.add_parser("demo-cc", parents=[common], help="countable choice fails over the interval")
    cc.add_argument("--n", type=int, default=8)
    cc.add_argument("--depth", type=int, default=4)
    cc.set_defaults(run=cmd_demo_cc)

    mp = sub.add_parser("demo-mp", parents=[common], help="Markov's principle fails over Cantor space")
    mp.add_argument("--depth", type=int, default=3)
    mp.set_defaults(run=cmd_demo_mp)
    return p


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "open", "x") is None:
            args.open = "(0,1)" if args.site == "interval" else ""
        code, doc, text = args.run(args)
    except UsageError as e:
        print(f"stackmodel: usage error: {e}", file=err)
        return 2
    except SystemExit as e:  # --help
        return int(e.code or 0)
    if args.output == "json":
        print(json.dumps({"schemaVersion": SCHEMA_VERSION, **doc}, indent=2, sort_keys=True), file=out)
    else:
        print(text, file=out)
    return code


def main() -> None:
    sys.exit(run())
