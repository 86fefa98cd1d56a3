"""Truncated multivariate power series in nonnegative exponents.

A series is a plain ``dict`` mapping exponent tuples (entries >= 0) to
nonzero exact coefficients (int or Fraction).  Every function takes the
truncation degree ``N`` and drops terms of total degree above it.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict

Series = Dict[tuple, object]


def _clean(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    return c


def one(m: int) -> Series:
    return {(0,) * m: 1}


def truncate(a: Series, N: int) -> Series:
    return {k: v for k, v in a.items() if sum(k) <= N}


def add(a: Series, b: Series, scale=1) -> Series:
    out = dict(a)
    for k, v in b.items():
        c = out.get(k, 0) + scale * v
        if c:
            out[k] = _clean(c)
        else:
            out.pop(k, None)
    return out


def mul(a: Series, b: Series, N: int) -> Series:
    out: Series = {}
    bl = [(k, sum(k), v) for k, v in b.items()]
    for ka, va in a.items():
        da = sum(ka)
        if da > N:
            continue
        for kb, db, vb in bl:
            if da + db > N:
                continue
            k = tuple(x + y for x, y in zip(ka, kb))
            out[k] = out.get(k, 0) + va * vb
    return {k: _clean(v) for k, v in out.items() if v}


def graded(a: Series) -> dict:
    g: dict = {}
    for k, v in a.items():
        g.setdefault(sum(k), {})[k] = v
    return g


def inverse(a: Series, N: int) -> Series:
    """Inverse of a series with constant term 1."""
    m = len(next(iter(a)))
    if a.get((0,) * m) != 1:
        raise ValueError("series inverse needs constant term 1")
    ga = graded(a)
    gr = {0: one(m)}
    for d in range(1, N + 1):
        acc: Series = {}
        for j in range(1, d + 1):
            if j not in ga or (d - j) not in gr:
                continue
            acc = add(acc, mul(ga[j], gr[d - j], N), -1)
        if acc:
            gr[d] = acc
    out: Series = {}
    for piece in gr.values():
        out.update(piece)
    return out


def power(a: Series, e: int, N: int) -> Series:
    """``a**e`` for integer ``e``; negative powers need constant term 1."""
    if e < 0:
        a = inverse(a, N)
        e = -e
    m = len(next(iter(a)))
    result = one(m)
    base = truncate(a, N)
    while e:
        if e & 1:
            result = mul(result, base, N)
        e >>= 1
        if e:
            base = mul(base, base, N)
    return result


def exp(u: Series, N: int) -> Series:
    """exp(u) for u without constant term."""
    m = len(next(iter(u))) if u else 0
    if not u:
        return one(m) if m else {(): 1}
    if u.get((0,) * m):
        raise ValueError("exp needs a series without constant term")
    out = one(m)
    term = one(m)
    for j in range(1, N + 1):
        term = {k: Fraction(v) / j for k, v in mul(term, u, N).items()}
        if not term:
            break
        out = add(out, term)
    return out


def log(f: Series, N: int) -> Series:
    """log(f) for f with constant term 1."""
    m = len(next(iter(f)))
    if f.get((0,) * m) != 1:
        raise ValueError("log needs constant term 1")
    w = add(f, one(m), -1)  # f - 1
    out: Series = {}
    term = one(m)
    for j in range(1, N + 1):
        term = mul(term, w, N)
        if not term:
            break
        out = add(out, {k: Fraction(v) / j for k, v in term.items()}, 1 if j % 2 else -1)
    return out
