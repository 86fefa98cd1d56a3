"""Seed files, scripts and the text formats used at the command-line boundary.

Indices are 1-based in every external format and 0-based inside the library;
conversion happens only here.

Seed file (YAML)::

    format: seed/1
    n: 2
    unfrozen: [1, 2]
    d: [1, 1]
    B:
      - [0, -2]
      - [2, 0]
    labels: [a, b]      # optional

Frozen x frozen entries may be written as strings such as ``"1/2"``.
"""

from __future__ import annotations

import os
from fractions import Fraction
from typing import Iterable, Sequence

import yaml

from .errors import ClusterError, ParseError
from .lattice import IntMat
from .seeds import Seed

SEED_FORMAT = "seed/1"
SCRIPT_FORMAT = "script/1"


# ---------------------------------------------------------------------------
# seeds

def _entry(x, where: str):
    if isinstance(x, bool):
        raise ParseError(f"{where}: boolean is not a number")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError:
            raise ParseError(f"{where}: cannot read {x!r} as a rational number") from None
    raise ParseError(f"{where}: expected an integer or a rational string, got {x!r}")


def seed_from_mapping(doc) -> Seed:
    if not isinstance(doc, dict):
        raise ParseError("seed document must be a mapping")
    fmt = doc.get("format", SEED_FORMAT)
    if fmt != SEED_FORMAT:
        raise ParseError(f"unsupported seed format {fmt!r} (expected {SEED_FORMAT})")
    unknown = set(doc) - {"format", "n", "unfrozen", "d", "B", "labels"}
    if unknown:
        raise ParseError(f"unknown seed fields: {', '.join(sorted(unknown))}")
    for key in ("n", "B"):
        if key not in doc:
            raise ParseError(f"seed document lacks field {key!r}")
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError("n must be a positive integer")
    rows = doc["B"]
    if not isinstance(rows, list) or len(rows) != n:
        raise ParseError(f"B must be a list of {n} rows")
    b = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise ParseError(f"row {i + 1} of B must have {n} entries")
        b.append([_entry(x, f"B[{i + 1},{j + 1}]") for j, x in enumerate(row)])
    unfrozen = doc.get("unfrozen", list(range(1, n + 1)))
    if not isinstance(unfrozen, list) or any(
            not isinstance(k, int) or isinstance(k, bool) or not 1 <= k <= n for k in unfrozen):
        raise ParseError(f"unfrozen must list vertex numbers between 1 and {n}")
    d = doc.get("d", [1] * n)
    if not isinstance(d, list) or len(d) != n or any(
            not isinstance(x, int) or isinstance(x, bool) for x in d):
        raise ParseError(f"d must be a list of {n} integers")
    labels = doc.get("labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != n):
        raise ParseError(f"labels must be a list of {n} names")
    return Seed(IntMat(b), tuple(k - 1 for k in unfrozen), tuple(d), labels)


def parse_seed(document: str) -> Seed:
    try:
        doc = yaml.safe_load(document)
    except yaml.YAMLError as exc:
        raise ParseError(f"malformed seed document: {exc}") from None
    return seed_from_mapping(doc)


def load_seed(path: str) -> Seed:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_seed(fh.read())
    except OSError as exc:
        raise ParseError(f"cannot read seed file {path}: {exc.strerror}") from None


def _num(x) -> str:
    return str(x)


def serialize_seed(s: Seed) -> str:
    lines = [f"format: {SEED_FORMAT}", f"n: {s.n}",
             f"unfrozen: [{', '.join(str(k + 1) for k in s.unfrozen)}]",
             f"d: [{', '.join(map(str, s.d))}]", "B:"]
    for row in s.b.entries:
        cells = [str(x) if isinstance(x, int) else f'"{x}"' for x in row]
        lines.append(f"  - [{', '.join(cells)}]")
    if s.labels is not None:
        lines.append(f"labels: [{', '.join(s.labels)}]")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# vectors, paths, sets

def parse_vector(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.replace("(", "").replace(")", "").split(",") if x.strip())
    except ValueError:
        raise ParseError(f"cannot read vector {text!r}") from None


def parse_path(text: str, s: Seed) -> tuple:
    """Comma-separated 1-based vertices to 0-based mutation steps."""
    if not text.strip():
        return ()
    steps = parse_vector(text)
    for k in steps:
        if not 1 <= k <= s.n:
            raise ParseError(f"vertex {k} out of range 1..{s.n}")
    return tuple(k - 1 for k in steps)


def format_vector(v: Iterable) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


def format_set(vs: Iterable) -> str:
    return "{" + ", ".join(format_vector(v) for v in sorted(vs)) + "}"


def format_path(steps: Sequence[int]) -> str:
    return " ".join(str(k + 1) for k in steps) if steps else "(empty)"


def format_matrix(M: IntMat) -> str:
    cells = [[str(x) for x in r] for r in M.entries]
    if not cells:
        return ""
    w = max(len(c) for r in cells for c in r)
    return "\n".join(" ".join(c.rjust(w) for c in r) for r in cells)


def error_record(exc: BaseException) -> str:
    kind = exc.kind if isinstance(exc, ClusterError) else "internal"
    msg = str(exc).replace("\n", " ")
    return yaml.safe_dump({"error": kind, "message": msg}, default_flow_style=True,
                          sort_keys=True, width=10 ** 6).strip()


# ---------------------------------------------------------------------------
# scripts

def parse_script(document: str, base_dir: str = ".") -> dict:
    """A script names seeds and lists commands that refer to them.

    ::

        format: script/1
        seeds:
          k: {n: 2, B: [[0, -2], [2, 0]]}     # inline, or a seed file path relative to base_dir
        commands:
          - {run: g2r, seed: k, max-depth: 4}
          - {run: defactor, seed: k, g: "2,-2"}
    """
    try:
        doc = yaml.safe_load(document)
    except yaml.YAMLError as exc:
        raise ParseError(f"malformed script: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != SCRIPT_FORMAT:
        raise ParseError(f"script must be a mapping with format: {SCRIPT_FORMAT}")
    seeds = doc.get("seeds") or {}
    cmds = doc.get("commands") or []
    if not isinstance(seeds, dict) or not isinstance(cmds, list):
        raise ParseError("script needs a 'seeds' mapping and a 'commands' list")
    resolved = {}
    for name, entry in seeds.items():
        resolved[str(name)] = load_seed(os.path.join(base_dir, entry)) if isinstance(entry, str) else seed_from_mapping(entry)
    for i, c in enumerate(cmds):
        if not isinstance(c, dict) or "run" not in c or "seed" not in c:
            raise ParseError(f"command {i + 1} needs 'run' and 'seed'")
        if str(c["seed"]) not in resolved:
            raise ParseError(f"command {i + 1} refers to undeclared seed {c['seed']!r}")
    return {"seeds": resolved, "commands": cmds}
