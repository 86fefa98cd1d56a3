"""Sparse Laurent polynomials, truncated series, and transport between seeds."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence

from . import series as ys
from .errors import InexactDivision, InvariantViolation, ParseError, UsageError
from .lattice import (
    IntMat,
    level_functional,
    solve_dominance,
    vadd,
    vsub,
)
from .seeds import Coreach, Seed, TrackedPath, g_vectors, mutate_sequence, psi_matrix


def _clean(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    return c


class LaurentPoly:
    """Finite map from exponent tuples to nonzero coefficients.

    Instances are treated as immutable. ``seed_id`` is an optional tag naming
    the seed whose variables the exponents refer to; it is informational and
    does not take part in equality.
    """

    __slots__ = ("_t", "n", "seed_id", "_hash")

    def __init__(self, terms: Mapping | Iterable = (), n: Optional[int] = None, seed_id=None):
        t = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for e, c in items:
            e = tuple(int(x) for x in e)
            c = t.get(e, 0) + c
            if c:
                t[e] = _clean(c)
            else:
                t.pop(e, None)
        if n is None:
            if not t:
                raise UsageError("cannot infer variable count of an empty polynomial")
            n = len(next(iter(t)))
        if any(len(e) != n for e in t):
            raise UsageError(f"exponent vectors must have length {n}")
        self._t = t
        self.n = n
        self.seed_id = seed_id
        self._hash = None

    # constructors -----------------------------------------------------------
    @classmethod
    def monomial(cls, e: Sequence[int], c=1, seed_id=None) -> "LaurentPoly":
        return cls({tuple(e): c}, len(e), seed_id)

    @classmethod
    def constant(cls, c, n: int) -> "LaurentPoly":
        return cls({(0,) * n: c}, n)

    @classmethod
    def zero(cls, n: int) -> "LaurentPoly":
        return cls({}, n)

    @classmethod
    def variable(cls, i: int, n: int) -> "LaurentPoly":
        return cls.monomial(tuple(1 if j == i else 0 for j in range(n)))

    # container protocol -----------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._t)

    def items(self):
        return self._t.items()

    def support(self) -> list:
        return sorted(self._t, reverse=True)

    def coeff(self, e: Sequence[int]):
        return self._t.get(tuple(e), 0)

    def __len__(self) -> int:
        return len(self._t)

    def __bool__(self) -> bool:
        return bool(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def is_monomial(self) -> bool:
        return len(self._t) == 1

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentPoly.constant(other, self.n)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.n == other.n and self._t == other._t

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._t.items())))
        return self._hash

    # arithmetic -------------------------------------------------------------
    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other.n != self.n:
                raise UsageError("polynomials live in different variable sets")
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentPoly.constant(other, self.n)
        raise TypeError(f"cannot combine LaurentPoly with {type(other).__name__}")

    def __add__(self, other) -> "LaurentPoly":
        other = self._coerce(other)
        t = dict(self._t)
        for e, c in other._t.items():
            v = t.get(e, 0) + c
            if v:
                t[e] = v
            else:
                del t[e]
        return LaurentPoly(t, self.n, self.seed_id)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self._t.items()}, self.n, self.seed_id)

    def __sub__(self, other) -> "LaurentPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "LaurentPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return LaurentPoly.zero(self.n)
            return LaurentPoly({e: c * other for e, c in self._t.items()}, self.n, self.seed_id)
        other = self._coerce(other)
        t: dict = {}
        for e1, c1 in self._t.items():
            for e2, c2 in other._t.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return LaurentPoly({e: c for e, c in t.items() if c}, self.n, self.seed_id)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            if not self.is_monomial():
                raise UsageError("negative power of a non-monomial")
            (e, c), = self._t.items()
            if c not in (1, -1):
                raise UsageError("negative power of a monomial with coefficient other than +-1")
            return LaurentPoly({tuple(k * x for x in e): c ** (-k)}, self.n, self.seed_id)
        result = LaurentPoly.constant(1, self.n)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift(self, e: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial x^e."""
        return LaurentPoly({vadd(k, e): c for k, c in self._t.items()}, self.n, self.seed_id)

    def divide_exact(self, d: "LaurentPoly") -> "LaurentPoly":
        """Exact quotient ``self / d``; raises InexactDivision when it is not a Laurent polynomial."""
        d = self._coerce(d)
        if not d:
            raise ZeroDivisionError("division by the zero polynomial")
        if not self:
            return LaurentPoly.zero(self.n)
        if d.is_monomial():
            (e, c), = d._t.items()
            if any(v % c for v in self._t.values()):
                raise InexactDivision("coefficients not divisible by the monomial coefficient")
            return LaurentPoly({vsub(k, e): v // c for k, v in self._t.items()}, self.n)
        lt_d = max(d._t)
        c_d = d._t[lt_d]
        lowest = vsub(min(self._t), min(d._t))
        # coordinatewise bounds from Newton polytopes
        lo = [min(e[i] for e in self._t) - min(e[i] for e in d._t) for i in range(self.n)]
        hi = [max(e[i] for e in self._t) - max(e[i] for e in d._t) for i in range(self.n)]
        r = dict(self._t)
        q: dict = {}
        dterms = list(d._t.items())
        while r:
            e = max(r)
            c = r[e]
            qe = vsub(e, lt_d)
            if qe < lowest or any(not a <= x <= b for a, x, b in zip(lo, qe, hi)):
                raise InexactDivision("remainder does not vanish")
            if isinstance(c, int) and isinstance(c_d, int):
                if c % c_d:
                    raise InexactDivision("leading coefficients not divisible")
                qc = c // c_d
            else:
                qc = _clean(Fraction(c) / c_d)
            q[qe] = qc
            for de, dc in dterms:
                k = vadd(qe, de)
                v = r.get(k, 0) - qc * dc
                if v:
                    r[k] = v
                else:
                    r.pop(k, None)
        return LaurentPoly(q, self.n, self.seed_id)

    def substitute(self, images: Sequence["LaurentPoly"]) -> "LaurentPoly":
        """Replace x_i by ``images[i]``; negative powers need monomial images."""
        n = images[0].n
        out = LaurentPoly.zero(n)
        for e, c in self._t.items():
            term = LaurentPoly.constant(c, n)
            for i, k in enumerate(e):
                if k:
                    term = term * images[i] ** k
            out = out + term
        return out

    def coefficients_nonnegative(self) -> bool:
        return all(c > 0 for c in self._t.values())

    # text -------------------------------------------------------------------
    def to_text(self) -> str:
        return format_poly(self)

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"LaurentPoly({format_poly(self)!r}, n={self.n})"


# ---------------------------------------------------------------------------
# canonical text form

def _format_monomial(e: Sequence[int]) -> str:
    parts = []
    for i, k in enumerate(e):
        if k == 1:
            parts.append(f"x{i + 1}")
        elif k:
            parts.append(f"x{i + 1}^{k}")
    return "*".join(parts)


def format_poly(z: LaurentPoly) -> str:
    """Terms in descending lexicographic order of exponents, e.g. ``x1*x2 + 2*x1^-1 - 3``."""
    if not z:
        return "0"
    out = []
    for e in z.support():
        c = z.coeff(e)
        neg = c < 0
        a = -c if neg else c
        mono = _format_monomial(e)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


_FACTOR = re.compile(r"^x(\d+)(?:\^(-?\d+))?$")
_NUMBER = re.compile(r"^\d+(?:/\d+)?$")


def parse_poly(text: str, n: Optional[int] = None) -> LaurentPoly:
    """Inverse of :func:`format_poly`; accepts ``*`` or ``·`` between factors."""
    s = text.replace("·", "*").replace(" ", "")
    if not s:
        raise ParseError("empty polynomial text")
    terms, cur, sign = [], "", 1
    for i, ch in enumerate(s):
        if ch in "+-" and not (i > 0 and s[i - 1] == "^"):
            if cur:
                terms.append((sign, cur))
            elif i > 0:
                raise ParseError(f"dangling operator at position {i}")
            cur, sign = "", (1 if ch == "+" else -1)
        else:
            cur += ch
    if not cur:
        raise ParseError("polynomial text ends with an operator")
    terms.append((sign, cur))
    parsed = []
    maxvar = 0
    for sign, body in terms:
        coeff = Fraction(sign)
        exps: dict = {}
        for factor in body.split("*"):
            if _NUMBER.match(factor):
                coeff *= Fraction(factor)
                continue
            m = _FACTOR.match(factor)
            if not m:
                raise ParseError(f"cannot parse factor {factor!r}")
            i = int(m.group(1))
            if i < 1:
                raise ParseError("variables are numbered from 1")
            exps[i] = exps.get(i, 0) + int(m.group(2) or 1)
            maxvar = max(maxvar, i)
        parsed.append((coeff, exps))
    if n is None:
        n = maxvar
    if maxvar > n:
        raise ParseError(f"variable x{maxvar} exceeds declared count {n}")
    if n == 0:
        raise ParseError("cannot infer the number of variables")
    out = {}
    for coeff, exps in parsed:
        e = tuple(exps.get(i + 1, 0) for i in range(n))
        out[e] = out.get(e, 0) + coeff
    return LaurentPoly(out, n)


# ---------------------------------------------------------------------------
# dominance analysis

def _levels(exps, Bt: IntMat):
    ell = level_functional(Bt)
    return {e: sum(a * b for a, b in zip(ell, e)) for e in exps}


def maximal_degrees(z: LaurentPoly, s) -> set:
    """Dominance-maximal exponents of the support of ``z`` (s is a Seed or an I x I_uf matrix)."""
    Bt = s.Bt if isinstance(s, Seed) else s
    exps = list(z._t)
    if not exps:
        return set()
    lev = _levels(exps, Bt)
    exps.sort(key=lambda e: lev[e])
    out = []
    for e in exps:
        if not any(lev[f] < lev[e] and solve_dominance(e, f, Bt) is not None for f in out):
            out.append(e)
    return set(out)


def minimal_degrees(z: LaurentPoly, s) -> set:
    Bt = s.Bt if isinstance(s, Seed) else s
    exps = list(z._t)
    if not exps:
        return set()
    lev = _levels(exps, Bt)
    exps.sort(key=lambda e: -lev[e])
    out = []
    for e in exps:
        if not any(lev[f] > lev[e] and solve_dominance(f, e, Bt) is not None for f in out):
            out.append(e)
    return set(out)


def degree(z: LaurentPoly, s) -> Optional[tuple]:
    m = maximal_degrees(z, s)
    return next(iter(m)) if len(m) == 1 else None


def codegree(z: LaurentPoly, s) -> Optional[tuple]:
    m = minimal_degrees(z, s)
    return next(iter(m)) if len(m) == 1 else None


def is_pointed(z: LaurentPoly, s, at: Optional[Sequence[int]] = None) -> bool:
    g = degree(z, s)
    if g is None or z.coeff(g) != 1:
        return False
    return at is None or tuple(at) == g


def is_copointed(z: LaurentPoly, s, at: Optional[Sequence[int]] = None) -> bool:
    g = codegree(z, s)
    if g is None or z.coeff(g) != 1:
        return False
    return at is None or tuple(at) == g


def is_bipointed(z: LaurentPoly, s) -> bool:
    return is_pointed(z, s) and is_copointed(z, s)


@dataclass(frozen=True)
class Bidegree:
    deg: tuple
    codeg: tuple
    supp_dim: tuple


def bidegree_of(z: LaurentPoly, s) -> Optional[Bidegree]:
    Bt = s.Bt if isinstance(s, Seed) else s
    if not is_bipointed(z, Bt):
        return None
    g, eta = degree(z, Bt), codegree(z, Bt)
    n = solve_dominance(eta, g, Bt)
    if n is None:
        raise InvariantViolation("codegree not dominated by degree")
    return Bidegree(g, eta, n)


def y_variable(s: Seed, k: int) -> LaurentPoly:
    return LaurentPoly.monomial(s.Bt.column(s.position(k)))


def y_split(z: LaurentPoly, g: Sequence[int], Bt: IntMat) -> dict:
    """Write z = x^g * P(y); return P as a dict n -> coeff (requires every term dominated by g)."""
    out = {}
    for e, c in z.items():
        n = solve_dominance(e, g, Bt)
        if n is None:
            raise InvariantViolation(f"exponent {e} is not dominated by {tuple(g)}")
        out[n] = c
    return out


# ---------------------------------------------------------------------------
# cluster variables

@lru_cache(maxsize=2048)
def _cluster(base: Seed, steps: tuple) -> tuple:
    n = base.n
    if not steps:
        return tuple(LaurentPoly.variable(i, n) for i in range(n)), ()
    prev, hist = _cluster(base, steps[:-1])
    s = mutate_sequence(base, steps[:-1])
    k = steps[-1]
    plus = LaurentPoly.constant(1, n)
    minus = LaurentPoly.constant(1, n)
    for j in range(n):
        bjk = s.b[j, k]
        if bjk > 0:
            plus = plus * prev[j] ** bjk
        elif bjk < 0:
            minus = minus * prev[j] ** (-bjk)
    try:
        new = (plus + minus).divide_exact(prev[k])
    except InexactDivision as exc:
        raise InexactDivision(
            f"exchange relation at step {len(steps)} (vertex {k + 1}) is not a Laurent polynomial"
        ) from exc
    cur = list(prev)
    cur[k] = new
    return tuple(cur), hist + (new,)


def cluster_variables_along(p: TrackedPath) -> list:
    """Cluster variables of the endpoint of ``p``, expanded in the base seed's variables."""
    return list(_cluster(p.base, tuple(p.steps))[0])


def cluster_history(p: TrackedPath) -> list:
    """The new cluster variable produced at each step of ``p``."""
    return list(_cluster(p.base, tuple(p.steps))[1])


def cluster_monomial(p: TrackedPath, exps: Sequence[int]) -> LaurentPoly:
    """Product of endpoint cluster variables with the given exponents.

    Negative exponents are only allowed on frozen vertices (localized monomials).
    """
    X = cluster_variables_along(p)
    out = LaurentPoly.constant(1, p.base.n)
    for i, a in enumerate(exps):
        if a < 0 and i in p.base.unfrozen:
            raise UsageError("negative exponent on an unfrozen cluster variable")
        if a:
            out = out * X[i] ** a
    return out


# ---------------------------------------------------------------------------
# transport between seeds

class TruncatedSeries:
    """An element of the completed Laurent ring, truncated at a level cut.

    Terms are kept when ``level(e) - level(anchor) <= order`` where ``level``
    is a rational functional with ``level(Bt e_k) = 1``. ``frontier_touched``
    records whether any kept term lies in the top band (order - 1, order].
    """

    def __init__(self, terms: dict, Bt: IntMat, anchor: tuple, order: int,
                 frontier_touched: bool, seed_id=None):
        self.terms = {e: c for e, c in terms.items() if c}
        self.Bt = Bt
        self.anchor = tuple(anchor)
        self.order = order
        self.frontier_touched = frontier_touched
        self.seed_id = seed_id
        self.n = Bt.shape[0]

    @property
    def exact(self) -> bool:
        return not self.frontier_touched

    def relative_level(self, e) -> Fraction:
        ell = level_functional(self.Bt)
        return sum(a * (x - y) for a, x, y in zip(ell, e, self.anchor))

    def as_poly(self) -> LaurentPoly:
        """The kept terms as a polynomial (regardless of exactness)."""
        return LaurentPoly(self.terms, self.n, self.seed_id)

    def to_laurent(self) -> LaurentPoly:
        if self.frontier_touched:
            raise UsageError("series is not certified exact; raise the truncation order")
        return self.as_poly()

    def degree(self) -> Optional[tuple]:
        return degree(self.as_poly(), self.Bt) if self.terms else None

    def is_pointed(self, at=None) -> bool:
        return bool(self.terms) and is_pointed(self.as_poly(), self.Bt, at)

    def __repr__(self) -> str:
        flag = "exact" if self.exact else "truncated"
        return f"TruncatedSeries({format_poly(self.as_poly())!r}, order={self.order}, {flag})"


def _f_polys(p: TrackedPath) -> tuple:
    X = cluster_variables_along(p)
    G = g_vectors(p)
    Bt = p.base.Bt
    return tuple(y_split(x, g, Bt) for x, g in zip(X, G)), G


def transport(z: LaurentPoly, p: TrackedPath, order: int) -> TruncatedSeries:
    """Expand ``z`` (in the endpoint's variables) as a series in the base seed's variables."""
    if order < 0:
        raise UsageError("truncation order must be nonnegative")
    base = p.base
    Bt = base.Bt
    m = len(base.unfrozen)
    if not z:
        return TruncatedSeries({}, Bt, (0,) * base.n, order, False)
    P, G = _f_polys(p)
    ell = level_functional(Bt)

    def lev(e):
        return sum(a * b for a, b in zip(ell, e))

    anchors = {}
    for e in z._t:
        a = tuple(sum(G[i][r] * e[i] for i in range(base.n)) for r in range(base.n))
        anchors[e] = a
    tops = maximal_degrees(LaurentPoly({a: 1 for a in anchors.values()}, base.n), Bt)
    anchor = min(tops, key=lambda a: (lev(a), tuple(-x for x in a)))
    cut = lev(anchor) + order

    cache: dict = {}

    def ppow(i, k, T):
        key = (i, k, T)
        if key not in cache:
            cache[key] = ys.power(P[i], k, T)
        return cache[key]

    acc: dict = {}
    for e, c in z._t.items():
        a = anchors[e]
        T = math.floor(cut - lev(a))
        if T < 0:
            continue
        S = ys.one(m)
        for i, k in enumerate(e):
            if k and len(P[i]) > 1:
                S = ys.mul(S, ppow(i, k, T), T)
        for nvec, v in S.items():
            x = vadd(a, Bt @ nvec)
            acc[x] = acc.get(x, 0) + c * v
    acc = {x: _clean(v) for x, v in acc.items() if v}
    frontier = any(order - 1 < lev(x) - lev(anchor) <= order for x in acc)
    return TruncatedSeries(acc, Bt, anchor, order, frontier, seed_id=id(base))


def transport_laurent(z: LaurentPoly, p: TrackedPath) -> LaurentPoly:
    """Exact transport of ``z`` to the base seed; raises InexactDivision if not Laurent there."""
    n = p.base.n
    X = cluster_variables_along(p)
    if not z:
        return LaurentPoly.zero(n)
    shift = [max(0, max(-e[i] for e in z._t)) for i in range(n)]
    num = LaurentPoly.zero(n)
    for e, c in z._t.items():
        term = LaurentPoly.constant(c, n)
        for i, k in enumerate(e):
            if k + shift[i]:
                term = term * X[i] ** (k + shift[i])
        num = num + term
    for i, a in enumerate(shift):
        for _ in range(a):
            num = num.divide_exact(X[i])
    return num


def default_order(supp_dim: Sequence[int], slack: int = 2) -> int:
    return sum(supp_dim) + slack


def codeg_deg_swap_check(z: LaurentPoly, coreach: Coreach, order: int = 4) -> bool:
    """deg at t[-1] of the transported z equals psi(codeg at t of z).

    Elements that are not Laurent at t[-1] are compared through their
    truncated series, whose degree is visible at any order.
    """
    t = coreach.t
    eta = codegree(z, t)
    if eta is None:
        return False
    target = tuple(psi_matrix(coreach.back) @ eta)
    try:
        w = transport_laurent(z, coreach.path)
    except InexactDivision:
        return transport(z, coreach.path, order).degree() == target
    return degree(w, coreach.t_minus) == target
