"""Golden corpus loader: the shipped prelude followed by tests/data/corpus.tt."""

import re
from pathlib import Path

from stackmodel import kernel
from stackmodel.cli import prelude_text

CORPUS = Path(__file__).parent / "data" / "corpus.tt"


def expectations(text: str) -> dict:
    """``--@ expect VERDICT`` pragmas keyed by the declaration that follows."""
    out, pending = {}, None
    for line in text.splitlines():
        if m := re.match(r"--@ expect (\w+)", line):
            pending = m[1]
        elif pending and (m := re.match(r"([A-Za-z_][\w']*)\s*:", line)):
            out[m[1]] = pending
            pending = None
    return out


def run_corpus():
    """(results, expected verdicts); every prelude declaration is expected ok."""
    ch = kernel.Checker()
    pre = kernel.check_source(prelude_text(), ch)
    text = CORPUS.read_text()
    rest = kernel.check_source(text, ch)
    expected = {r.name: "ok" for r in pre} | expectations(text)
    return pre + rest, expected, ch


def verdict(r) -> str:
    return "ok" if r.status == "ok" else r.errorKind
