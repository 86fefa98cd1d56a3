"""Rank-2 cluster scattering diagrams with exact truncated wall-crossing.

Degrees m live in Z^2; a wall sits on a ray (or, for incoming walls, a full
line) orthogonal to a primitive normal n0 >= 0 and carries a power series in
``t = y^{n0} = x^{B n0}``. Crossing with sign eps acts on monomials by
``x^m -> x^m * f^(eps * <m, n0>)`` where f is the multiplicative wall function.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import series as ys
from .errors import InvariantViolation, UnsupportedRegion, UsageError
from .laurent import LaurentPoly, TruncatedSeries, format_poly
from .lattice import IntMat, dot, level_functional, solve_dominance, vadd
from .seeds import Seed, g_vectors, opposite_seed, track
from .seeds import _words


def _primitive(v: Sequence[int]) -> tuple:
    g = math.gcd(*v)
    if g == 0:
        raise UsageError("zero vector has no direction")
    return tuple(x // g for x in v)


def _half(v) -> int:
    return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1


def _cross(u, v) -> int:
    return u[0] * v[1] - u[1] * v[0]


def _angle_cmp(u, v) -> int:
    hu, hv = _half(u), _half(v)
    if hu != hv:
        return -1 if hu < hv else 1
    c = _cross(u, v)
    return -1 if c > 0 else (1 if c < 0 else 0)


angle_key = functools.cmp_to_key(_angle_cmp)


def _same_direction(u, v) -> bool:
    return _cross(u, v) == 0 and dot(u, v) > 0


# ---------------------------------------------------------------------------
# walls and diagrams

@dataclass(frozen=True)
class Wall2:
    ray: tuple
    normal: tuple
    logfn: tuple  # ((j, c_j), ...) with u = sum c_j t^j
    line: bool = False

    def __post_init__(self):
        ray = _primitive(self.ray)
        if self.line and _half(ray) == 1:
            ray = tuple(-x for x in ray)
        normal = _primitive(self.normal)
        if any(x < 0 for x in normal):
            raise UsageError(f"wall normal {normal} must be nonnegative")
        if dot(ray, normal) != 0:
            raise UsageError(f"ray {ray} is not orthogonal to normal {normal}")
        logfn = tuple(sorted((int(j), Fraction(c)) for j, c in self.logfn if c))
        object.__setattr__(self, "ray", ray)
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "logfn", logfn)

    def function(self, order: int) -> list:
        """Coefficients of the multiplicative wall function in t = y^normal.

        Only powers t^j with total y-degree j*|normal| <= order are meaningful
        and returned.
        """
        return _wall_function(self.logfn, order // sum(self.normal))

    def crossing_points(self) -> list:
        return [self.ray, tuple(-x for x in self.ray)] if self.line else [self.ray]


@functools.lru_cache(maxsize=None)
def _wall_function(logfn: tuple, order: int) -> list:
    # f = exp(sum_j j c_j t^j)
    u = {(j,): j * c for j, c in logfn if j <= order}
    f = ys.exp(u, order) if u else {(0,): 1}
    out = [Fraction(0)] * (order + 1)
    for (j,), c in f.items():
        out[j] = Fraction(c)
    return [int(c) if c.denominator == 1 else c for c in out]


@dataclass(frozen=True)
class ScatterDiagram2:
    walls: tuple
    order: int
    seed: Seed

    @property
    def B(self) -> IntMat:
        return self.seed.B

    def sorted_walls(self) -> list:
        return sorted(self.walls, key=lambda w: angle_key(w.ray))

    def wall_on(self, ray: Sequence[int]) -> Optional[Wall2]:
        r = _primitive(ray)
        for w in self.walls:
            if w.ray == r or (w.line and w.ray == tuple(-x for x in r)):
                return w
        return None

    def crossings(self) -> list:
        """All (point, wall) pairs; lines contribute both half-rays."""
        return [(pt, w) for w in self.walls for pt in w.crossing_points()]


def _check_rank2(s: Seed) -> None:
    if s.n != 2 or s.unfrozen != (0, 1):
        raise UsageError("scattering diagrams are implemented for rank 2 without frozen vertices")
    if not s.is_skew_symmetric() or s.d != (1, 1):
        raise UsageError("scattering diagrams need a skew-symmetric seed with d = (1, 1)")


def dilog_terms(order: int) -> tuple:
    """-Li2(-t) = sum_{j>=1} (-1)^(j-1) t^j / j^2."""
    return tuple((j, Fraction((-1) ** (j - 1), j * j)) for j in range(1, order + 1))


def incoming_diagram(s: Seed, order: int) -> ScatterDiagram2:
    _check_rank2(s)
    if order < 1:
        raise UsageError("order must be at least 1")
    walls = (
        Wall2((0, 1), (1, 0), dilog_terms(order), line=True),
        Wall2((1, 0), (0, 1), dilog_terms(order), line=True),
    )
    return ScatterDiagram2(walls, order, s)


# ---------------------------------------------------------------------------
# crossing

def _series_power(coeffs: Tuple, k: int, T: int) -> dict:
    f = {(j,): c for j, c in enumerate(coeffs) if c and j <= T}
    return ys.power(f, k, T)


def monomial_series(m: Sequence[int], B: IntMat, order: int, c=1) -> TruncatedSeries:
    return TruncatedSeries({tuple(m): c}, B, tuple(m), order, False)


def _finish(acc: dict, B: IntMat, anchor, order) -> TruncatedSeries:
    ell = level_functional(B)
    base = dot(ell, anchor)
    acc = {e: (int(c) if isinstance(c, Fraction) and c.denominator == 1 else c)
           for e, c in acc.items() if c}
    frontier = any(order - 1 < dot(ell, e) - base <= order for e in acc)
    return TruncatedSeries(acc, B, anchor, order, frontier)


def cross(w: Wall2, eps: int, z: TruncatedSeries, order: int) -> TruncatedSeries:
    """Apply the wall-crossing automorphism of ``w`` with sign ``eps`` to ``z``."""
    if z.order != order:
        raise UsageError(f"series truncated at order {z.order}, diagram at order {order}")
    if eps not in (1, -1):
        raise UsageError("crossing sign must be +1 or -1")
    B = z.Bt
    ell = level_functional(B)
    cut = dot(ell, z.anchor) + order
    n0 = w.normal
    step = B @ n0
    width = sum(n0)
    f = tuple(w.function(order))
    cache: dict = {}
    acc: dict = {}
    for e, c in z.terms.items():
        k = eps * dot(e, n0)
        if k == 0:
            acc[e] = acc.get(e, 0) + c
            continue
        T = math.floor((cut - dot(ell, e)) / width)
        if T < 0:
            continue
        key = (k, T)
        if key not in cache:
            cache[key] = _series_power(f, k, T)
        for (j,), v in cache[key].items():
            x = tuple(a + j * b for a, b in zip(e, step))
            acc[x] = acc.get(x, 0) + c * v
    return _finish(acc, B, z.anchor, order)


# ---------------------------------------------------------------------------
# paths

@dataclass(frozen=True)
class PathOp:
    crossings: tuple  # ((wall, eps, point), ...) in crossing order
    order: int

    def __len__(self) -> int:
        return len(self.crossings)


def _ccw_between(a, b, pts):
    """Points met going counterclockwise from direction a to direction b."""
    ka = angle_key(a)

    def rel(v):
        kv = angle_key(v)
        return (0, kv) if kv > ka else (1, kv)

    rb = rel(b) if not _same_direction(a, b) else (2, None)
    out = []
    for item in pts:
        v = item[0]
        if _same_direction(v, a):
            continue
        rv = rel(v)
        if rb[0] == 2 or rv < rb:
            out.append((rv, item))
    out.sort(key=lambda t: t[0])
    return [item for _, item in out]


def _crossing_sign(point, n0, ccw: bool) -> int:
    r = point
    tangent = (-r[1], r[0]) if ccw else (r[1], -r[0])
    v = dot(tangent, n0)
    if v == 0:
        raise InvariantViolation("path runs along a wall")
    return -1 if v > 0 else 1


def path_product(d: ScatterDiagram2, start: Sequence[int], end: Sequence[int],
                 direction: str = "short") -> PathOp:
    """Arc from the direction ``start`` to the direction ``end`` around the origin.

    ``direction`` is "ccw", "cw", or "short" (the shorter arc, counterclockwise
    on ties). Endpoints must avoid walls.
    """
    start, end = tuple(start), tuple(end)
    pts = d.crossings()
    for pt, _ in pts:
        if _same_direction(pt, start) or _same_direction(pt, end):
            raise UsageError("path endpoints must not lie on a wall")
    if _same_direction(start, end):
        return PathOp((), d.order)
    if direction == "short":
        direction = "cw" if _cross(start, end) < 0 else "ccw"
    if direction == "ccw":
        met = _ccw_between(start, end, pts)
        ccw = True
    elif direction == "cw":
        # clockwise from start to end = counterclockwise from end to start, reversed
        met = list(reversed(_ccw_between(end, start, pts)))
        ccw = False
    else:
        raise UsageError(f"unknown direction {direction!r}")
    out = tuple((w, _crossing_sign(pt, w.normal, ccw), pt) for pt, w in met)
    return PathOp(out, d.order)


def loop_op(d: ScatterDiagram2, base: Sequence[int] = None) -> PathOp:
    """A full counterclockwise loop starting just below the positive m1-axis."""
    pts = sorted(d.crossings(), key=lambda t: angle_key(t[0]))
    return PathOp(tuple((w, _crossing_sign(pt, w.normal, True), pt) for pt, w in pts), d.order)


def apply(op: PathOp, z: TruncatedSeries) -> TruncatedSeries:
    for w, eps, _ in op.crossings:
        z = cross(w, eps, z, op.order)
    return z


def apply_monomial(op: PathOp, m: Sequence[int], B: IntMat) -> TruncatedSeries:
    return apply(op, monomial_series(m, B, op.order))


# ---------------------------------------------------------------------------
# consistency completion

def _loop_defect(d: ScatterDiagram2, order: int) -> Dict[tuple, Fraction]:
    """Coefficients c_n (|n| == order) of the loop's leading deviation from the identity."""
    B = d.B
    sub = ScatterDiagram2(d.walls, order, d.seed)
    op = loop_op(sub)
    F = []
    for i in range(2):
        e = tuple(1 if j == i else 0 for j in range(2))
        res = apply_monomial(op, e, B)
        Fi = {}
        for x, c in res.terms.items():
            n = solve_dominance(x, e, B)
            if n is None:
                raise InvariantViolation(f"loop produced a term {x} not above {e}")
            if n == (0, 0):
                if c != 1:
                    raise InvariantViolation("loop changed the leading coefficient")
                continue
            if sum(n) < order:
                raise InvariantViolation(f"loop not consistent below order {order} (term y^{n})")
            Fi[n] = Fraction(c)
        F.append(Fi)
    out = {}
    for n in set(F[0]) | set(F[1]):
        a1, a2 = F[0].get(n, 0), F[1].get(n, 0)
        vals = []
        if n[0]:
            vals.append(Fraction(a1) / n[0])
        elif a1:
            raise InvariantViolation(f"defect y^{n} has a nonzero x1 part but n1 = 0")
        if n[1]:
            vals.append(Fraction(a2) / n[1])
        elif a2:
            raise InvariantViolation(f"defect y^{n} has a nonzero x2 part but n2 = 0")
        if len(set(vals)) != 1:
            raise InvariantViolation(f"loop defect at y^{n} is not of wall-crossing form")
        if vals[0]:
            out[n] = vals[0]
    return out


def complete(d: ScatterDiagram2) -> ScatterDiagram2:
    """Add outgoing walls order by order until the loop is the identity up to ``d.order``."""
    if any(not w.line for w in d.walls):
        raise UsageError("complete() expects a diagram of incoming walls only")
    B = d.B
    incoming = list(d.walls)
    logs: Dict[tuple, Dict[int, Fraction]] = {}
    normals: Dict[tuple, tuple] = {}

    def build(order):
        ws = list(incoming)
        for r in sorted(logs, key=angle_key):
            terms = tuple((j, c) for j, c in sorted(logs[r].items()) if c)
            if terms:
                ws.append(Wall2(r, normals[r], terms))
        return ScatterDiagram2(tuple(ws), order, d.seed)

    for k in range(1, d.order + 1):
        defect = _loop_defect(build(k), k)
        for n, c in sorted(defect.items()):
            j = math.gcd(*n)
            n0 = tuple(x // j for x in n)
            r = _primitive(tuple(-x for x in (B @ n0)))
            for w in incoming:
                if _cross(r, w.ray) == 0:
                    raise InvariantViolation(f"correction y^{n} lands on incoming line {w.ray}")
            eps = _crossing_sign(r, n0, True)
            normals[r] = n0
            slot = logs.setdefault(r, {})
            slot[j] = slot.get(j, Fraction(0)) - eps * c
    out = build(d.order)
    if not loop_is_identity(out):
        raise InvariantViolation("completed diagram is not consistent")
    return out


def loop_is_identity(d: ScatterDiagram2) -> bool:
    op = loop_op(d)
    for i in range(2):
        e = tuple(1 if j == i else 0 for j in range(2))
        res = apply_monomial(op, e, d.B)
        if res.terms != {e: 1}:
            return False
    return True


def cluster_diagram(s: Seed, order: int) -> ScatterDiagram2:
    return complete(incoming_diagram(s, order))


# ---------------------------------------------------------------------------
# chambers and theta functions

@dataclass(frozen=True)
class Chamber:
    generators: tuple  # two g-vectors, counterclockwise
    steps: tuple

    @property
    def interior(self) -> tuple:
        return vadd(*self.generators)

    def contains(self, g: Sequence[int]) -> bool:
        a, b = self.generators
        return _cross(a, g) >= 0 and _cross(g, b) >= 0

    def __str__(self) -> str:
        a, b = self.generators
        return f"cone(({a[0]},{a[1]}),({b[0]},{b[1]}))"


def cluster_chambers(s: Seed, depth: int = 8) -> List[Chamber]:
    _check_rank2(s)
    seen, out = set(), []
    for L in range(depth + 1):
        for w in _words(s.unfrozen, L):
            p = track(s, w)
            a, b = g_vectors(p)
            if _cross(a, b) < 0:
                a, b = b, a
            key = (a, b)
            if key in seen:
                continue
            seen.add(key)
            out.append(Chamber(key, tuple(w)))
    return out


def chamber_of(g: Sequence[int], chambers: Sequence[Chamber]) -> Chamber:
    g = tuple(g)
    for c in chambers:
        if c.contains(g):
            return c
    raise UnsupportedRegion(f"degree {g} lies outside the computed cluster chambers")


def positive_chamber(s: Seed) -> Chamber:
    return Chamber(((1, 0), (0, 1)), ())


def theta(d: ScatterDiagram2, g: Sequence[int], at: Sequence[int] = (1, 1),
          chambers: Optional[Sequence[Chamber]] = None) -> TruncatedSeries:
    """x^g placed in the chamber containing g, transported to the point ``at``."""
    g = tuple(g)
    if chambers is None:
        chambers = cluster_chambers(d.seed)
    if g == (0, 0):
        return monomial_series(g, d.B, d.order)
    home = chamber_of(g, chambers)
    op = path_product(d, home.interior, at, "short")
    return apply_monomial(op, g, d.B)


# ---------------------------------------------------------------------------
# opposite diagram

def opposite_diagram(d: ScatterDiagram2) -> ScatterDiagram2:
    walls = tuple(Wall2(tuple(-x for x in w.ray), w.normal, w.logfn, w.line) for w in d.walls)
    return ScatterDiagram2(walls, d.order, opposite_seed(d.seed))


def kappa(z: TruncatedSeries, B_op: IntMat) -> TruncatedSeries:
    """x^m -> x^{-m}, landing in the opposite seed's completion."""
    terms = {tuple(-x for x in e): c for e, c in z.terms.items()}
    return TruncatedSeries(terms, B_op, tuple(-x for x in z.anchor), z.order, z.frontier_touched)


def negate_path(op: PathOp, d_op: ScatterDiagram2) -> PathOp:
    """The path kappa(gamma) in the opposite diagram."""
    out = []
    for w, eps, pt in op.crossings:
        mpt = tuple(-x for x in pt)
        w_op = d_op.wall_on(mpt)
        if w_op is None:
            raise InvariantViolation(f"opposite diagram has no wall at {mpt}")
        # the tangent of -gamma at -pt is minus the original tangent
        out.append((w_op, -eps, mpt))
    return PathOp(tuple(out), op.order)


def same_walls(a: ScatterDiagram2, b: ScatterDiagram2) -> bool:
    key = lambda d: sorted((w.ray, w.normal, w.logfn, w.line) for w in d.walls)
    return key(a) == key(b)


def opposite_identity(d: ScatterDiagram2, d_op: ScatterDiagram2, op: PathOp,
                      m: Sequence[int]) -> bool:
    """Check p^op_{kappa gamma}(kappa x^m) == kappa(p_gamma x^m) exactly at the diagram order."""
    B, B_op = d.B, d_op.B
    lhs = apply(negate_path(op, d_op), kappa(monomial_series(m, B, d.order), B_op))
    rhs = kappa(apply(op, monomial_series(m, B, d.order)), B_op)
    return lhs.terms == rhs.terms


# ---------------------------------------------------------------------------
# dump

def _format_wall_function(w: Wall2, order: int) -> str:
    coeffs = w.function(order)
    terms = {tuple(j * x for x in w.normal): c for j, c in enumerate(coeffs) if c}
    return format_poly(LaurentPoly(terms, 2)).replace("x", "y")


def _vec(v) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


def dump(d: ScatterDiagram2) -> str:
    b = d.seed.b
    rows = ";".join(",".join(str(x) for x in r) for r in b.entries)
    lines = [f"# scatter order={d.order} B={rows} walls={len(d.walls)}"]
    for w in d.sorted_walls():
        kind = "line" if w.line else "ray"
        lines.append(
            f"wall ray={_vec(w.ray)} kind={kind} normal={_vec(w.normal)} "
            f"f={_format_wall_function(w, d.order)}"
        )
    return "\n".join(lines) + "\n"
