"""Seeds, matrix mutation, C/G tracking and tropical transformations.

Vertices are indexed 0..n-1 internally. ``Seed.unfrozen`` lists the mutable
vertices; C-matrices and F-matrices are indexed by *positions* in that list,
while E-matrices and extended G-matrices are indexed by vertices.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .errors import ConfigurationError, InvariantViolation, UsageError
from .lattice import IntMat, check_full_column_rank, int_inverse, pos


def sign(x) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class Seed:
    """Exchange data of a seed.

    ``b`` is the full n x n matrix. Entries outside the frozen x frozen block
    must be integers and ``d[i] * b[i][j] == -d[j] * b[j][i]`` must hold.
    The I x I_uf block must have full column rank unless ``check_rank`` is
    False (useful for search-only work on degenerate matrices).
    """

    b: IntMat
    unfrozen: tuple
    d: tuple
    labels: Optional[tuple] = None
    check_rank: bool = field(default=True, compare=False)

    def __post_init__(self):
        b = self.b if isinstance(self.b, IntMat) else IntMat(self.b)
        n = b.shape[0]
        if b.shape != (n, n):
            raise ConfigurationError(f"exchange matrix must be square, got {b.shape}")
        b = IntMat(b.entries)
        unfrozen = tuple(sorted(int(k) for k in self.unfrozen))
        if len(set(unfrozen)) != len(unfrozen) or any(not 0 <= k < n for k in unfrozen):
            raise ConfigurationError(f"invalid unfrozen index set {self.unfrozen}")
        d = tuple(int(x) for x in self.d)
        if len(d) != n or any(x <= 0 for x in d):
            raise ConfigurationError("weights d must be n positive integers")
        uf = set(unfrozen)
        for i in range(n):
            for j in range(n):
                bij = b[i, j]
                if (i in uf or j in uf) and not isinstance(bij, int):
                    raise ConfigurationError(
                        f"entry b[{i + 1},{j + 1}] = {bij} must be an integer"
                    )
                if d[i] * bij != -d[j] * b[j, i]:
                    raise ConfigurationError(
                        f"skew-symmetrizability fails at pair ({i + 1},{j + 1}): "
                        f"d_i*b_ij = {d[i] * bij}, -d_j*b_ji = {-d[j] * b[j, i]}"
                    )
        labels = None if self.labels is None else tuple(str(x) for x in self.labels)
        if labels is not None and len(labels) != n:
            raise ConfigurationError("labels must have one entry per vertex")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "unfrozen", unfrozen)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "labels", labels)
        if self.check_rank and unfrozen:
            check_full_column_rank(self.Bt)

    @property
    def n(self) -> int:
        return self.b.shape[0]

    @property
    def frozen(self) -> tuple:
        uf = set(self.unfrozen)
        return tuple(i for i in range(self.n) if i not in uf)

    @property
    def Bt(self) -> IntMat:
        """The I x I_uf extended exchange matrix."""
        return self.b.submatrix(range(self.n), self.unfrozen)

    @property
    def B(self) -> IntMat:
        """The principal I_uf x I_uf part."""
        return self.b.submatrix(self.unfrozen, self.unfrozen)

    def position(self, k: int) -> int:
        """Position of unfrozen vertex ``k`` in ``unfrozen``."""
        try:
            return self.unfrozen.index(k)
        except ValueError:
            raise UsageError(f"vertex {k + 1} is not mutable") from None

    def is_skew_symmetric(self) -> bool:
        return all(self.b[i, j] == -self.b[j, i] for i in range(self.n) for j in range(self.n))

    def with_matrix(self, b) -> "Seed":
        return Seed(b, self.unfrozen, self.d, self.labels, self.check_rank)


def seed(b, unfrozen=None, d=None, **kw) -> Seed:
    """Convenience constructor; defaults to all vertices unfrozen and d = 1."""
    m = b if isinstance(b, IntMat) else IntMat(b)
    n = m.shape[0]
    if unfrozen is None:
        unfrozen = range(n)
    if d is None:
        d = (1,) * n
    return Seed(m, tuple(unfrozen), tuple(d), **kw)


def kronecker() -> Seed:
    return seed([[0, -2], [2, 0]])


def a2() -> Seed:
    return seed([[0, -1], [1, 0]])


# ---------------------------------------------------------------------------
# mutation

def mutate_matrix(s: Seed, k: int, eps: int = 1) -> Seed:
    """Matrix mutation at unfrozen vertex ``k``; the result does not depend on ``eps``."""
    if k not in s.unfrozen:
        raise UsageError(f"cannot mutate at frozen or unknown vertex {k + 1}")
    if eps not in (1, -1):
        raise UsageError("sign must be +1 or -1")
    n = s.n
    b = s.b
    new = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == k or j == k:
                row.append(-b[i, j])
            else:
                row.append(b[i, j] + b[i, k] * pos(eps * b[k, j]) + pos(-eps * b[i, k]) * b[k, j])
        new.append(row)
    return s.with_matrix(IntMat(new))


def mutate_sequence(s: Seed, steps: Sequence[int]) -> Seed:
    for k in steps:
        s = mutate_matrix(s, k)
    return s


def ef_matrices(s: Seed, k: int, eps: int) -> tuple:
    """The matrices E (I x I) and F (I_uf x I_uf) of mutation at ``k`` with sign ``eps``."""
    if k not in s.unfrozen:
        raise UsageError(f"cannot mutate at frozen or unknown vertex {k + 1}")
    if eps not in (1, -1):
        raise UsageError("sign must be +1 or -1")
    n = s.n
    E = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for i in range(n):
        E[i][k] = -1 if i == k else pos(-eps * s.b[i, k])
    uf = s.unfrozen
    m = len(uf)
    p = s.position(k)
    F = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    for jj, j in enumerate(uf):
        F[p][jj] = -1 if j == k else pos(eps * s.b[k, j])
    return IntMat(E), IntMat(F, uf, uf)


# ---------------------------------------------------------------------------
# tracked paths

@dataclass(frozen=True)
class TrackedPath:
    """A mutation sequence from ``base`` with its C-matrix and extended G-matrix."""

    base: Seed
    steps: tuple = ()
    seeds: tuple = ()
    C: IntMat = None
    Gext: IntMat = None
    signs: tuple = ()

    @property
    def current(self) -> Seed:
        return self.seeds[-1]

    @property
    def G(self) -> IntMat:
        """Principal I_uf x I_uf block of the G-matrix."""
        uf = self.base.unfrozen
        return self.Gext.submatrix(uf, uf)

    def __len__(self) -> int:
        return len(self.steps)


def start_path(s: Seed) -> TrackedPath:
    m = len(s.unfrozen)
    C = IntMat.identity(m, s.unfrozen)
    return TrackedPath(s, (), (s,), C, IntMat.identity(s.n), ())


def extend_path(p: TrackedPath, k: int) -> TrackedPath:
    cur = p.current
    col = p.C.column(cur.position(k))
    if all(x >= 0 for x in col) and any(x > 0 for x in col):
        eps = 1
    elif all(x <= 0 for x in col) and any(x < 0 for x in col):
        eps = -1
    else:
        raise InvariantViolation(
            f"c-vector at vertex {k + 1} is not sign-coherent or zero: {col}"
        )
    E, F = ef_matrices(cur, k, eps)
    C = p.C @ F
    Gext = p.Gext @ E
    return TrackedPath(p.base, p.steps + (k,), p.seeds + (mutate_matrix(cur, k),),
                       IntMat(C.entries, cur.unfrozen, cur.unfrozen), Gext,
                       p.signs + (eps,))


def track(s: Seed, steps: Sequence[int]) -> TrackedPath:
    p = start_path(s)
    for k in steps:
        p = extend_path(p, k)
    return p


def g_vectors(p: TrackedPath) -> list:
    return p.Gext.columns()


def c_vectors(p: TrackedPath) -> list:
    return p.C.columns()


def reverse_path(p: TrackedPath) -> TrackedPath:
    """The path from the endpoint of ``p`` back to its base."""
    return track(p.current, tuple(reversed(p.steps)))


# ---------------------------------------------------------------------------
# tropical transformations

def tropical_transform(g: Sequence[int], s: Seed, k: int) -> tuple:
    if k not in s.unfrozen:
        raise UsageError(f"cannot transform at frozen or unknown vertex {k + 1}")
    gk = g[k]
    out = []
    for i, gi in enumerate(g):
        if i == k:
            out.append(-gk)
        else:
            bik = s.b[i, k]
            out.append(gi + pos(bik) * pos(gk) - pos(-bik) * pos(-gk))
    return tuple(out)


def phi(g: Sequence[int], p: TrackedPath) -> tuple:
    """Compose tropical transformations along ``p``: base degrees to endpoint degrees."""
    g = tuple(g)
    for s, k in zip(p.seeds, p.steps):
        g = tropical_transform(g, s, k)
    return g


def phi_steps(g: Sequence[int], s: Seed, steps: Sequence[int]) -> tuple:
    g = tuple(g)
    for k in steps:
        g = tropical_transform(g, s, k)
        s = mutate_matrix(s, k)
    return g


def psi_matrix(p: TrackedPath) -> IntMat:
    n = p.base.n
    cols = [phi(tuple(1 if i == j else 0 for i in range(n)), p) for j in range(n)]
    M = IntMat.from_columns(cols)
    int_inverse(M)  # raises if not unimodular
    return M


# ---------------------------------------------------------------------------
# permutations and green-to-red sequences

@dataclass(frozen=True)
class Permutation:
    """Bijection on positions 0..m-1 of the unfrozen vertices."""

    images: tuple

    def __post_init__(self):
        imgs = tuple(int(x) for x in self.images)
        if sorted(imgs) != list(range(len(imgs))):
            raise UsageError(f"not a permutation: {imgs}")
        object.__setattr__(self, "images", imgs)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def matrix(self) -> IntMat:
        m = len(self.images)
        return IntMat([[1 if i == self.images[k] else 0 for k in range(m)] for i in range(m)])

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def cycles(self) -> list:
        seen, out = set(), []
        for i in range(len(self.images)):
            if i in seen:
                continue
            cyc, j = [], i
            while j not in seen:
                seen.add(j)
                cyc.append(j)
                j = self.images[j]
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def __str__(self) -> str:
        if self.is_identity():
            return "id"
        return "".join("(" + " ".join(str(i + 1) for i in c) + ")" for c in self.cycles())


def green_to_red_check(p: TrackedPath) -> Optional[Permutation]:
    """Return sigma when C(p) = -P_sigma, else None."""
    m = len(p.base.unfrozen)
    images = []
    for k in range(m):
        col = p.C.column(k)
        nz = [i for i, x in enumerate(col) if x != 0]
        if len(nz) != 1 or col[nz[0]] != -1:
            return None
        images.append(nz[0])
    if len(set(images)) != m:
        return None
    sigma = Permutation(tuple(images))
    d = [p.base.d[i] for i in p.base.unfrozen]
    for k in range(m):
        if d[k] != d[sigma(k)]:
            raise InvariantViolation(
                f"weights differ under sigma: d_{k + 1} = {d[k]}, d_{sigma(k) + 1} = {d[sigma(k)]}"
            )
    return sigma


def _is_green(p: TrackedPath, k: int) -> bool:
    return all(x >= 0 for x in p.C.column(p.current.position(k)))


def _dfs(p: TrackedPath, depth: int, last: Optional[int]) -> Optional[TrackedPath]:
    if len(p) == depth:
        return p if green_to_red_check(p) is not None else None
    cands = [k for k in p.base.unfrozen if k != last]
    cands.sort(key=lambda k: (not _is_green(p, k), k))
    for k in cands:
        hit = _dfs(extend_path(p, k), depth, k)
        if hit is not None:
            return hit
    return None


def find_green_to_red(s: Seed, max_depth: int) -> Optional[TrackedPath]:
    """Iterative-deepening search for a green-to-red sequence.

    Returns None when nothing is found up to ``max_depth``; that does not
    prove that no such sequence exists.
    """
    if max_depth < 1:
        raise UsageError("max_depth must be at least 1")
    root = start_path(s)
    for depth in range(1, max_depth + 1):
        hit = _dfs(root, depth, None)
        if hit is not None:
            return hit
    return None


def _words(letters: Sequence[int], length: int) -> Iterator[tuple]:
    """Words of the given length with no letter repeated twice in a row."""
    if length == 0:
        yield ()
        return
    for w in itertools.product(letters, repeat=length):
        if all(a != b for a, b in zip(w, w[1:])):
            yield w


def find_coreachable(s: Seed, max_depth: int) -> Optional[TrackedPath]:
    """Find t_- = s[-1] together with a path from t_- to s whose C-matrix is -P_sigma.

    The returned path has base t_-; its steps nu satisfy mu_nu(t_-) = s.
    """
    for length in range(1, max_depth + 1):
        for w in _words(s.unfrozen, length):
            t_minus = mutate_sequence(s, w)
            p = track(t_minus, tuple(reversed(w)))
            if green_to_red_check(p) is not None:
                return p
    return None


@dataclass(frozen=True)
class Coreach:
    """Data attached to an injective-reachable seed t: its t[-1] and the maps between them."""

    path: TrackedPath  # from t[-1] to t, C = -P_sigma
    sigma: Permutation

    @property
    def t(self) -> Seed:
        return self.path.current

    @property
    def t_minus(self) -> Seed:
        return self.path.base

    @property
    def back(self) -> TrackedPath:
        """The path from t to t[-1]."""
        return reverse_path(self.path)

    def phi(self, g: Sequence[int]) -> tuple:
        return phi(g, self.back)

    def psi(self) -> IntMat:
        return psi_matrix(self.back)


def coreach_of(s: Seed, max_depth: int = 8) -> Coreach:
    p = find_coreachable(s, max_depth)
    if p is None:
        raise ConfigurationError(f"no t[-1] found within depth {max_depth}")
    return Coreach(p, green_to_red_check(p))


def verified_coreach(p: TrackedPath) -> Coreach:
    sigma = green_to_red_check(p)
    if sigma is None:
        raise UsageError("path is not green-to-red; it does not realize t = t[-1][1]")
    return Coreach(p, sigma)


# ---------------------------------------------------------------------------
# derived seeds

def extend_full_matrix(Bt: IntMat, d_uf: Sequence[int]) -> Seed:
    """Complete an I x I_uf matrix to a full exchange matrix.

    The first ``len(d_uf)`` rows are the unfrozen vertices; the remaining
    rows are frozen and receive the weight lcm(d_uf).
    """
    n, m = Bt.shape
    d_uf = tuple(int(x) for x in d_uf)
    if len(d_uf) != m or n < m:
        raise UsageError("weights must match the unfrozen columns")
    L = math.lcm(*d_uf) if d_uf else 1
    d = d_uf + (L,) * (n - m)
    b = [[0] * n for _ in range(n)]
    for i in range(n):
        for k in range(m):
            b[i][k] = Bt[i, k]
    for f in range(m, n):
        for k in range(m):
            val = Fraction(-L * Bt[f, k], d_uf[k])
            if val.denominator != 1:
                raise ConfigurationError("extension produced a non-integer entry")
            b[k][f] = int(val)
    return Seed(IntMat(b), tuple(range(m)), d)


def opposite_seed(s: Seed) -> Seed:
    return s.with_matrix(-s.b)


def langlands_dual(s: Seed) -> Seed:
    L = math.lcm(*s.d)
    n = s.n
    b = [[-s.b[j, i] for j in range(n)] for i in range(n)]
    return Seed(IntMat(b), s.unfrozen, tuple(L // x for x in s.d), s.labels, s.check_rank)


def principal_framing(s: Seed, excluded: Optional[int] = None) -> Seed:
    """Append a frozen copy i' of each unfrozen i (except ``excluded``)."""
    copies = [i for i in s.unfrozen if i != excluded]
    n = s.n
    N = n + len(copies)
    b = [[0] * N for _ in range(N)]
    for i in range(n):
        for j in range(n):
            b[i][j] = s.b[i, j]
    d = list(s.d)
    for r, i in enumerate(copies):
        f = n + r
        b[f][i] = 1
        b[i][f] = -1
        d.append(s.d[i])
    labels = None
    if s.labels is not None:
        labels = s.labels + tuple(s.labels[i] + "'" for i in copies)
    return Seed(IntMat(b), s.unfrozen, tuple(d), labels)


def relabel(s: Seed, perm: Sequence[int]) -> Seed:
    """The seed with vertex i renamed perm[i]."""
    n = s.n
    perm = tuple(perm)
    if sorted(perm) != list(range(n)):
        raise UsageError("relabel needs a permutation of all vertices")
    b = [[0] * n for _ in range(n)]
    d = [0] * n
    for i in range(n):
        d[perm[i]] = s.d[i]
        for j in range(n):
            b[perm[i]][perm[j]] = s.b[i, j]
    labels = None
    if s.labels is not None:
        labels = [None] * n
        for i in range(n):
            labels[perm[i]] = s.labels[i]
    return Seed(IntMat(b), tuple(perm[i] for i in s.unfrozen), tuple(d), labels, s.check_rank)
