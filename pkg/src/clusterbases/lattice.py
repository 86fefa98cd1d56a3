"""Exact integer/rational linear algebra on exponent lattices.

Vectors are plain tuples of ints. Matrices are :class:`IntMat`, an immutable
dense matrix that carries row and column labels so that submatrix extraction
by index set is explicit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .errors import ConfigurationError, InvariantViolation, UsageError

Vec = tuple


def vec(xs: Iterable) -> tuple:
    return tuple(int(x) for x in xs)


def vadd(a: Sequence[int], b: Sequence[int]) -> tuple:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def vsub(a: Sequence[int], b: Sequence[int]) -> tuple:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def vscale(c: int, a: Sequence[int]) -> tuple:
    return tuple(c * x for x in a)


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b, strict=True))


def pos(x):
    """The positive part ``[x]_+``."""
    return x if x > 0 else 0


def _normalize(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x.numerator)
    if isinstance(x, bool):
        raise UsageError("boolean matrix entry")
    if isinstance(x, (int, Fraction)):
        return x
    raise UsageError(f"non-exact matrix entry {x!r}")


@dataclass(frozen=True)
class IntMat:
    """Immutable dense matrix with integer (or exact rational) entries.

    ``rows`` and ``cols`` are label tuples; by default ``0..n-1``.
    """

    entries: tuple
    rows: tuple = field(default=None)
    cols: tuple = field(default=None)

    def __post_init__(self):
        ents = tuple(tuple(_normalize(x) for x in r) for r in self.entries)
        nr = len(ents)
        nc = len(ents[0]) if nr else (len(self.cols) if self.cols is not None else 0)
        if any(len(r) != nc for r in ents):
            raise UsageError("ragged matrix rows")
        rows = tuple(range(nr)) if self.rows is None else tuple(self.rows)
        cols = tuple(range(nc)) if self.cols is None else tuple(self.cols)
        if len(rows) != nr or len(cols) != nc:
            raise UsageError(
                f"declared index sets {len(rows)}x{len(cols)} do not match entries {nr}x{nc}"
            )
        object.__setattr__(self, "entries", ents)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)

    # construction -----------------------------------------------------------
    @classmethod
    def identity(cls, n: int, labels: Optional[Sequence] = None) -> "IntMat":
        ents = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        return cls(ents, labels, labels)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows=None, cols=None) -> "IntMat":
        if not columns:
            return cls((), rows, cols)
        ents = [list(r) for r in zip(*columns)]
        return cls(ents, rows, cols)

    # shape / access ---------------------------------------------------------
    @property
    def shape(self) -> tuple:
        return (len(self.rows), len(self.cols))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple:
        return self.entries[i]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list:
        return [self.column(j) for j in range(len(self.cols))]

    def tolist(self) -> list:
        return [list(r) for r in self.entries]

    def is_integer(self) -> bool:
        return all(isinstance(x, int) for r in self.entries for x in r)

    def submatrix(self, row_labels: Sequence, col_labels: Sequence) -> "IntMat":
        ri = [self._index(self.rows, lab) for lab in row_labels]
        ci = [self._index(self.cols, lab) for lab in col_labels]
        ents = [[self.entries[i][j] for j in ci] for i in ri]
        return IntMat(ents, tuple(row_labels), tuple(col_labels))

    @staticmethod
    def _index(labels, lab):
        try:
            return labels.index(lab)
        except ValueError:
            raise UsageError(f"label {lab!r} not in index set {labels}") from None

    # algebra ----------------------------------------------------------------
    def transpose(self) -> "IntMat":
        return IntMat([list(c) for c in zip(*self.entries)] if self.entries else (),
                      self.cols, self.rows)

    @property
    def T(self) -> "IntMat":
        return self.transpose()

    def __matmul__(self, other):
        if isinstance(other, IntMat):
            if len(self.cols) != len(other.rows):
                raise UsageError(f"shape mismatch {self.shape} @ {other.shape}")
            ocols = other.columns()
            ents = [[dot(r, c) for c in ocols] for r in self.entries]
            return IntMat(ents, self.rows, other.cols)
        v = tuple(other)
        if len(v) != len(self.cols):
            raise UsageError(f"shape mismatch {self.shape} @ vector of length {len(v)}")
        return tuple(_normalize(dot(r, v)) for r in self.entries)

    def __neg__(self) -> "IntMat":
        return IntMat([[-x for x in r] for r in self.entries], self.rows, self.cols)

    def __add__(self, other: "IntMat") -> "IntMat":
        if self.shape != other.shape:
            raise UsageError("shape mismatch in addition")
        ents = [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)]
        return IntMat(ents, self.rows, self.cols)

    def __sub__(self, other: "IntMat") -> "IntMat":
        return self + (-other)

    def same_entries(self, other: "IntMat") -> bool:
        return self.entries == other.entries

    def __repr__(self) -> str:
        return f"IntMat({self.tolist()})"


# ---------------------------------------------------------------------------
# elimination

def _rref(rows: list) -> tuple:
    """Row-reduce a Fraction matrix in place; return (matrix, pivot columns)."""
    m = [list(map(Fraction, r)) for r in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    pivots = []
    r = 0
    for c in range(nc):
        p = next((i for i in range(r, nr) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nr):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return m, pivots


def rank(M: IntMat) -> int:
    if not M.entries:
        return 0
    return len(_rref(M.tolist())[1])


def determinant(M: IntMat) -> Fraction:
    n, k = M.shape
    if n != k:
        raise UsageError("determinant of non-square matrix")
    m = [list(map(Fraction, r)) for r in M.entries]
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return det


def rational_inverse(M: IntMat) -> list:
    n, k = M.shape
    if n != k:
        raise UsageError("inverse of non-square matrix")
    aug = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(M.entries)]
    red, piv = _rref(aug)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ConfigurationError("matrix is singular")
    return [r[n:] for r in red]


def int_inverse(M: IntMat) -> IntMat:
    """Exact integer inverse of a unimodular matrix."""
    n, k = M.shape
    if n != k:
        raise UsageError("inverse of non-square matrix")
    if n == 0:
        return M
    det = determinant(M)
    if det not in (1, -1):
        raise InvariantViolation(f"matrix is not unimodular (determinant {det})")
    inv = rational_inverse(M)
    return IntMat(inv, M.cols, M.rows)


@dataclass(frozen=True)
class _Solver:
    pivot_rows: tuple
    adj: tuple  # det * inverse of the pivot-row submatrix, integer
    det: int
    entries: tuple


@lru_cache(maxsize=4096)
def _solver_for(entries: tuple) -> _Solver:
    nr = len(entries)
    nc = len(entries[0]) if nr else 0
    # pivot rows = pivot columns of the transpose
    tr = [list(c) for c in zip(*entries)] if nc else []
    _, piv = _rref(tr) if tr else ([], [])
    if len(piv) != nc:
        raise ConfigurationError(
            f"exchange matrix has rank {len(piv)} < {nc} unfrozen columns (full rank required)"
        )
    sub = IntMat([entries[i] for i in piv])
    det = determinant(sub)
    inv = rational_inverse(sub)
    adj = tuple(tuple(int(x * det) for x in r) for r in inv)
    det = int(det)
    if det < 0:
        adj = tuple(tuple(-x for x in r) for r in adj)
        det = -det
    return _Solver(tuple(piv), adj, det, entries)


def check_full_column_rank(Bt: IntMat) -> None:
    _solver_for(Bt.entries)


def _solve_scaled(diff: Sequence[int], Bt: IntMat):
    """Return (det * n, det) for the unique rational n with Bt @ n == diff, or None."""
    if len(diff) != Bt.shape[0]:
        raise UsageError("vector length does not match matrix rows")
    sol = _solver_for(Bt.entries)
    rhs = [diff[i] for i in sol.pivot_rows]
    num = [sum(a * b for a, b in zip(r, rhs)) for r in sol.adj]
    det = sol.det
    for i, row in enumerate(Bt.entries):
        if sum(a * b for a, b in zip(row, num)) != det * diff[i]:
            return None
    return num, det


def solve_linear(diff: Sequence[int], Bt: IntMat) -> Optional[tuple]:
    """Unique rational n with ``Bt @ n == diff``, or None if there is none."""
    res = _solve_scaled(diff, Bt)
    if res is None:
        return None
    num, det = res
    return tuple(_normalize(Fraction(x, det)) for x in num)


def solve_dominance(g_from: Sequence[int], g_to: Sequence[int], Bt: IntMat) -> Optional[tuple]:
    """Return n >= 0 integral with ``g_from = g_to + Bt @ n``, or None.

    ``g_from`` is dominated by ``g_to`` exactly when the result is not None.
    """
    res = _solve_scaled(vsub(g_from, g_to), Bt)
    if res is None:
        return None
    num, det = res
    if any(x < 0 or x % det for x in num):
        return None
    return tuple(x // det for x in num)


def dominated(g_low: Sequence[int], g_high: Sequence[int], Bt: IntMat) -> bool:
    """``g_low`` is dominated by (or equal to) ``g_high``."""
    return solve_dominance(g_low, g_high, Bt) is not None


def strictly_dominated(g_low, g_high, Bt: IntMat) -> bool:
    return tuple(g_low) != tuple(g_high) and dominated(g_low, g_high, Bt)


def box(n: Sequence[int]):
    """All integer vectors m with 0 <= m <= n componentwise."""
    return itertools.product(*(range(k + 1) for k in n))


def interval(eta: Sequence[int], g: Sequence[int], Bt: IntMat) -> set:
    """The dominance interval between ``eta`` (bottom) and ``g`` (top)."""
    n = solve_dominance(eta, g, Bt)
    if n is None:
        return set()
    g = tuple(g)
    return {vadd(g, Bt @ m) for m in box(n)}


def level_functional(Bt: IntMat) -> tuple:
    """A rational row vector l with ``l @ Bt == (1, ..., 1)``.

    ``l(g + Bt n) = l(g) + |n|``, so the level grades dominance: strictly
    dominated degrees sit at strictly higher level.
    """
    sol = _solver_for(Bt.entries)
    m = len(sol.adj)
    ell = [Fraction(0)] * Bt.shape[0]
    for r, i in enumerate(sol.pivot_rows):
        ell[i] = Fraction(sum(sol.adj[c][r] for c in range(m)), sol.det)
    return tuple(ell)
