"""Certificates for the failure of countable choice (interval) and Markov's principle (Cantor)."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .forcing import (
    Atom, Bounds, ExistsNatTrunc, ExistsRatTrunc, ForallNat, Forcing, Not,
    SigmaSectionExists, atom_holds_everywhere, check_certificate, result_to_json, show,
)
from .site import CantorOpen, IntervalOpen, cantor_site, interval_site, open_to_json

SCHEMA_VERSION = 1


def premise_formula(n: int) -> ExistsRatTrunc:
    """||exists q. |r - q| < 1/n||"""
    return ExistsRatTrunc("q", Atom("within", ("q", n)))


def default_grid(count: int = 50, seed: int = 0) -> list[IntervalOpen]:
    """``count`` distinct intervals with endpoints in twelfths, chosen reproducibly."""
    pts = [Fraction(k, 12) for k in range(13)]
    every = [IntervalOpen(a, b) for a in pts for b in pts if a < b]
    return sorted(random.Random(seed).sample(every, count))


@dataclass
class CCReport:
    nat_cutoff: int
    depth: int
    premise_certificates: dict        # n -> certificate or None
    premise_checks: dict              # n -> bool
    conclusion_obstruction: dict      # n -> {"maxLength", "atMax", "beyondMax"}
    mesh: dict                        # n -> 2/n
    grid: list = field(default_factory=list)
    grid_verdicts: list = field(default_factory=list)  # (interval, n, section exists)
    simultaneous: list = field(default_factory=list)   # (interval, section for all n <= N)

    @property
    def mesh_decreasing(self) -> bool:
        vals = [self.mesh[n] for n in sorted(self.mesh)]
        return all(a > b for a, b in zip(vals, vals[1:]))

    @property
    def grid_exact(self) -> bool:
        return all(ok == (u.length <= Fraction(2, n)) for u, n, ok in self.grid_verdicts) and \
            all(ok == (u.length <= Fraction(2, self.nat_cutoff)) for u, ok in self.simultaneous)

    @property
    def ok(self) -> bool:
        return (all(self.premise_checks.values()) and self.mesh_decreasing and self.grid_exact
                and all(o["atMax"] and o["beyondMax"] for o in self.conclusion_obstruction.values()))


def cc_countermodel(N: int, depth: int = 4, grid: list | None = None) -> CCReport:
    """Premises forced at the whole interval; sections of the untruncated family need mesh 2/n."""
    if N < 2:
        raise ValueError("the choice countermodel needs N >= 2")
    site = interval_site()
    bounds = Bounds(depth=depth)
    ev = Forcing(site, bounds)
    certs, checks, obstruction = {}, {}, {}
    for n in range(1, N + 1):
        res = ev.forces(site.root, premise_formula(n))
        certs[n] = res.certificate if res.forced else None
        checks[n] = res.forced and check_certificate(site, site.root, premise_formula(n),
                                                     res.certificate, bounds)
        bound = Fraction(2, n)
        at_max = ev.forces(IntervalOpen(0, min(bound, 1)), SigmaSectionExists("within", (n,))).forced
        beyond = bound + Fraction(1, 4 * n)
        # past the bound no section exists; vacuous when the longer interval does not fit in (0,1)
        beyond_ok = beyond > 1 or not ev.forces(IntervalOpen(0, beyond),
                                                SigmaSectionExists("within", (n,))).forced
        obstruction[n] = {"maxLength": bound, "atMax": at_max, "beyondMax": beyond_ok}
    grid = default_grid() if grid is None else grid
    verdicts = [(u, n, ev.forces(u, SigmaSectionExists("within", (n,))).forced)
                for u in grid for n in range(1, N + 1)]
    simultaneous = [(u, ev.forces(u, SigmaSectionExists("withinUpTo", (N,))).forced) for u in grid]
    mesh = {n: Fraction(2, n) for n in range(1, N + 1)}
    return CCReport(N, depth, certs, checks, obstruction, mesh, grid, verdicts, simultaneous)


@dataclass
class MPReport:
    depth: int
    nat_bound: int
    neg_premise_certificate: dict | None
    neg_premise_check: bool
    obstruction: str | None
    obstruction_path: list
    witness_free: bool
    first_bit_witness: int | None

    @property
    def ok(self) -> bool:
        return (self.neg_premise_check and self.obstruction == "0" * self.depth
                and self.witness_free and self.first_bit_witness == 0)


NEG_PREMISE = Not(ForallNat("n", Atom("alpha", ("n", 0))))
MP_CONCLUSION = ExistsNatTrunc("n", Atom("alpha", ("n", 1)))


def mp_countermodel(depth: int, nat_bound: int | None = None) -> MPReport:
    """Not everywhere zero is forced at the root, yet no cover up to ``depth`` yields a witness."""
    if depth < 1:
        raise ValueError("the Markov countermodel needs depth >= 1")
    site = cantor_site()
    bounds = Bounds(depth=depth, nat_bound=nat_bound if nat_bound is not None else max(depth, 8))
    ev = Forcing(site, bounds)
    neg = ev.forces(site.root, NEG_PREMISE)
    neg_ok = neg.forced and check_certificate(site, site.root, NEG_PREMISE, neg.certificate, bounds)
    concl = ev.forces(site.root, MP_CONCLUSION)
    if concl.forced:
        obstruction, path, free = None, [], False
    else:
        path = concl.obstruction
        obstruction = path[-1].prefix if path else None
        # the failing piece at every level is the all-zeros cylinder, and it determines no witness
        free = all(p == CantorOpen("0" * k) for k, p in enumerate(path)) and not any(
            atom_holds_everywhere(path[-1], Atom("alpha", (n, 1))) for n in range(bounds.nat_bound + 1))
    one = ev.forces(CantorOpen("1"), MP_CONCLUSION)
    first = one.certificate["pieces"][0]["witness"] if one.forced else None
    return MPReport(depth, bounds.nat_bound, neg.certificate if neg.forced else None, neg_ok,
                    obstruction, path, free, first)


# ---------------------------------------------------------------------------
# rendering


def _frac(x) -> str:
    return str(x)


def cc_to_json(r: CCReport) -> dict:
    return {
        "schemaVersion": SCHEMA_VERSION,
        "report": "countable-choice",
        "status": "pass" if r.ok else "fail",
        "natCutoff": r.nat_cutoff,
        "coverDepth": r.depth,
        "premiseCertificates": [
            {"n": n, "formula": show(premise_formula(n)), "checks": r.premise_checks[n],
             "certificate": r.premise_certificates[n]} for n in sorted(r.premise_certificates)],
        "conclusionObstruction": [
            {"n": n, "maxLength": _frac(o["maxLength"]), "sectionAtMax": o["atMax"],
             "noSectionBeyond": o["beyondMax"]} for n, o in sorted(r.conclusion_obstruction.items())],
        "meshFunction": [_frac(r.mesh[n]) for n in sorted(r.mesh)],
        "meshStrictlyDecreasing": r.mesh_decreasing,
        "grid": {"intervals": len(r.grid), "exact": r.grid_exact,
                 "simultaneousSections": [open_to_json(u) for u, ok in r.simultaneous if ok]},
    }


def mp_to_json(r: MPReport) -> dict:
    return {
        "schemaVersion": SCHEMA_VERSION,
        "report": "markov-principle",
        "status": "pass" if r.ok else "fail",
        "depth": r.depth,
        "natBound": r.nat_bound,
        "negPremise": {"formula": show(NEG_PREMISE), "checks": r.neg_premise_check,
                       "certificate": r.neg_premise_certificate},
        "conclusion": {"formula": show(MP_CONCLUSION), "status": "NotForcedUpTo",
                       "obstruction": r.obstruction,
                       "obstructionPath": [open_to_json(u) for u in r.obstruction_path],
                       "witnessFree": r.witness_free},
        "firstBitWitness": r.first_bit_witness,
    }


def _cc_text(r: CCReport) -> str:
    lines = [f"countable choice over the interval: N = {r.nat_cutoff}, cover depth {r.depth}"]
    for n in sorted(r.premise_checks):
        cert = r.premise_certificates[n]
        how = f"cover level {cert['level']}, {len(cert['pieces'])} pieces" if cert else "not forced"
        lines.append(f"  premise n={n}: {'ok' if r.premise_checks[n] else 'FAIL'} ({how})")
    for n, o in sorted(r.conclusion_obstruction.items()):
        good = o["atMax"] and o["beyondMax"]
        lines.append(f"  sections for n={n} need length <= {o['maxLength']}: {'ok' if good else 'FAIL'}")
    lines.append("  mesh 2/n: " + ", ".join(_frac(r.mesh[n]) for n in sorted(r.mesh))
                 + (" (strictly decreasing)" if r.mesh_decreasing else " (NOT decreasing)"))
    lines.append(f"  grid of {len(r.grid)} intervals: {'exact' if r.grid_exact else 'MISMATCH'}")
    lines.append(f"status: {'pass' if r.ok else 'fail'}")
    return "\n".join(lines)


def _mp_text(r: MPReport) -> str:
    lines = [f"Markov's principle over Cantor space: depth {r.depth}, natBound {r.nat_bound}",
             f"  not (forall n. alpha(n) = 0) forced at the root: {'ok' if r.neg_premise_check else 'FAIL'}",
             f"  exists n. alpha(n) = 1 not forced up to depth {r.depth}; obstruction [{r.obstruction}]"
             f" {'witness-free' if r.witness_free else 'NOT witness-free'}",
             f"  [1] forces the conclusion with witness {r.first_bit_witness}",
             f"status: {'pass' if r.ok else 'fail'}"]
    return "\n".join(lines)


def emit_report(r: CCReport | MPReport, fmt: str) -> str:
    if fmt not in ("text", "json"):
        raise ValueError(f"unknown output format {fmt!r}; use text or json")
    if fmt == "json":
        doc = cc_to_json(r) if isinstance(r, CCReport) else mp_to_json(r)
        return json.dumps(doc, indent=2)
    return _cc_text(r) if isinstance(r, CCReport) else _mp_text(r)


def forcing_json(result) -> dict:
    return {"schemaVersion": SCHEMA_VERSION, **result_to_json(result)}
