"""Support dimensions, deformation factors, pointed families and basis checks."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence

from .errors import (
    DeformationError,
    FamilyContractError,
    InexactDivision,
    InvariantViolation,
    UsageError,
)
from .laurent import (
    LaurentPoly,
    bidegree_of,
    cluster_variables_along,
    degree,
    is_pointed,
    maximal_degrees,
    transport,
    transport_laurent,
)
from .lattice import (
    IntMat,
    int_inverse,
    interval,
    solve_dominance,
    solve_linear,
    strictly_dominated,
    vadd,
)
from .seeds import (
    Coreach,
    Seed,
    TrackedPath,
    _words,
    phi,
    reverse_path,
    track,
)


# ---------------------------------------------------------------------------
# support dimensions and intervals

def support_dimension_of_degree(g: Sequence[int], coreach: Coreach) -> tuple:
    t = coreach.t
    g = tuple(g)
    image = coreach.phi(g)
    eta = int_inverse(coreach.psi()) @ image
    n = solve_linear(tuple(a - b for a, b in zip(eta, g)), t.Bt)
    if n is None or any(not isinstance(x, int) for x in n):
        raise InvariantViolation(f"support dimension of {g} is not an integer vector: {n}")
    if any(x < 0 for x in n):
        raise InvariantViolation(f"support dimension of {g} has a negative entry: {n}")
    return n


def bidegree_interval(g: Sequence[int], coreach: Coreach) -> set:
    t = coreach.t
    n = support_dimension_of_degree(g, coreach)
    eta = vadd(g, t.Bt @ n)
    return interval(eta, g, t.Bt)


def pair_deformation_factor(g: Sequence[int], coreach: Coreach) -> set:
    """Degrees strictly below g both at t and (after phi) at t[-1]."""
    g = tuple(g)
    t, tm = coreach.t, coreach.t_minus
    top = coreach.phi(g)
    out = set()
    for h in bidegree_interval(g, coreach):
        if strictly_dominated(h, g, t.Bt) and strictly_dominated(coreach.phi(h), top, tm.Bt):
            out.add(h)
    return out


def deformation_factor(g: Sequence[int], coreach: Coreach, depth: Optional[int] = None,
                       patience: int = 3, max_depth: int = 16) -> set:
    """Degrees strictly below g at every seed, compared through phi.

    Seeds are those reached from t by paths of bounded length (always
    including t[-1]). With ``depth=None`` the length grows until the set has
    not changed for ``patience`` consecutive lengths.
    """
    g = tuple(g)
    t = coreach.t
    cands = pair_deformation_factor(g, coreach)
    stable = 0
    L = 0
    while cands:
        L += 1
        if depth is not None and L > depth:
            break
        if depth is None and (stable >= patience or L > max_depth):
            break
        before = len(cands)
        for w in _words(t.unfrozen, L):
            p = track(t, w)
            top = phi(g, p)
            Bt = p.current.Bt
            cands = {h for h in cands if strictly_dominated(phi(h, p), top, Bt)}
        stable = stable + 1 if len(cands) == before else 0
    return cands


# ---------------------------------------------------------------------------
# compatibly pointed

class Verdict(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    def __bool__(self) -> bool:
        return self is Verdict.YES


def pointed_verdict(z: LaurentPoly, p: TrackedPath, order: int) -> Verdict:
    """Is z (at the base of p) pointed at the endpoint of p, at the phi-image of its degree?"""
    t0 = p.base
    if not is_pointed(z, t0):
        return Verdict.NO
    target = phi(degree(z, t0), p)
    back = reverse_path(p)
    try:
        w = transport_laurent(z, back)
        return Verdict.YES if is_pointed(w, p.current, target) else Verdict.NO
    except InexactDivision:
        pass
    s = transport(z, back, order)
    Bt = s.Bt
    if any(solve_dominance(e, target, Bt) is None for e in s.terms):
        return Verdict.NO
    if s.relative_level(target) <= order and s.terms.get(target, 0) != 1:
        return Verdict.NO
    return Verdict.UNKNOWN


def is_compatibly_pointed(z: LaurentPoly, paths: Sequence[TrackedPath], order: int = 8) -> Verdict:
    """YES if pointed at every path endpoint with phi-tracked degree; NO on a visible
    violation; UNKNOWN when truncation hides the answer."""
    verdicts = [pointed_verdict(z, p, order) for p in paths]
    if any(v is Verdict.NO for v in verdicts):
        return Verdict.NO
    if all(v is Verdict.YES for v in verdicts):
        return Verdict.YES
    return Verdict.UNKNOWN


# ---------------------------------------------------------------------------
# pointed families

class PointedFamily:
    """Lazily evaluated degree-indexed family of pointed elements.

    ``provider(g)`` returns the element at degree g, or None when g is
    outside the family's domain. Every element is checked on access.
    """

    def __init__(self, seed: Seed, provider: Callable[[tuple], Optional[LaurentPoly]],
                 name: str = "family", domain: str = "Z^I"):
        self.seed = seed
        self._provider = provider
        self.name = name
        self.domain = domain
        self._memo: Dict[tuple, Optional[LaurentPoly]] = {}

    def get(self, g: Sequence[int]) -> Optional[LaurentPoly]:
        g = tuple(g)
        if g not in self._memo:
            z = self._provider(g)
            if z is not None and not is_pointed(z, self.seed, g):
                raise FamilyContractError(f"{self.name}: element at {g} is not pointed there")
            self._memo[g] = z
        return self._memo[g]

    def __call__(self, g: Sequence[int]) -> LaurentPoly:
        z = self.get(g)
        if z is None:
            raise FamilyContractError(f"{self.name}: degree {tuple(g)} is outside the domain")
        return z

    def covers(self, g: Sequence[int]) -> bool:
        return self.get(g) is not None


@dataclass(frozen=True)
class Cone:
    path: TrackedPath
    Ginv: IntMat

    def coordinates(self, g: Sequence[int]) -> tuple:
        return self.Ginv @ tuple(g)


def cluster_cones(s: Seed, depth: int) -> List[Cone]:
    """Distinct clusters reachable by paths of length <= depth (no immediate repeats)."""
    seen, out = set(), []
    for length in range(depth + 1):
        for w in _words(s.unfrozen, length):
            p = track(s, w)
            key = frozenset(p.Gext.column(i) for i in s.unfrozen)
            if key in seen:
                continue
            seen.add(key)
            out.append(Cone(p, int_inverse(p.Gext)))
    return out


def _cone_lookup(cones: Sequence[Cone], g: Sequence[int], unfrozen) -> Optional[tuple]:
    for c in cones:
        a = c.coordinates(g)
        if all(a[i] >= 0 for i in unfrozen):
            return c, a
    return None


def _monomial_from_cone(cone: Cone, a: Sequence[int]) -> LaurentPoly:
    X = cluster_variables_along(cone.path)
    n = len(X)
    out = LaurentPoly.constant(1, n)
    for i, k in enumerate(a):
        if k:
            out = out * X[i] ** k
    return out


def cluster_monomial_family(s: Seed, depth: int = 6) -> PointedFamily:
    """Localized cluster monomials whose g-vector cone (within ``depth``) contains the degree."""
    cones = cluster_cones(s, depth)

    def provider(g):
        hit = _cone_lookup(cones, g, s.unfrozen)
        return None if hit is None else _monomial_from_cone(*hit)

    return PointedFamily(s, provider, "cluster-monomials", f"g-vector fan to depth {depth}")


def kronecker_z(n: int = 2) -> LaurentPoly:
    return LaurentPoly({(1, -1): 1, (-1, -1): 1, (-1, 1): 1}, n)


def _delta_multiple(g: Sequence[int]) -> int:
    a, b = g
    return a if a >= 1 and b == -a else 0


def kronecker_generic_family(t0: Seed, depth: int = 12) -> PointedFamily:
    if t0.b.entries != ((0, -2), (2, 0)) or t0.unfrozen != (0, 1):
        raise UsageError("the generic family is defined for the Kronecker seed [[0,-2],[2,0]]")
    cones = cluster_cones(t0, depth)
    z = kronecker_z()

    def provider(g):
        d = _delta_multiple(g)
        if d:
            return z ** d
        hit = _cone_lookup(cones, g, t0.unfrozen)
        if hit is None:
            raise FamilyContractError(
                f"kronecker-generic: degree {tuple(g)} lies in no cone within depth {depth}"
            )
        return _monomial_from_cone(*hit)

    return PointedFamily(t0, provider, "kronecker-generic", "Z^2")


def deformed_family(base: PointedFamily, deformation: Mapping, coreach: Coreach) -> PointedFamily:
    """s_g = base(g) + sum_{g'} b_{g,g'} base(g') with keys checked against the deformation factor."""
    deformation = {tuple(g): {tuple(h): int(b) for h, b in m.items()}
                   for g, m in deformation.items()}
    for g, m in deformation.items():
        factor = deformation_factor(g, coreach)
        for h in m:
            if h not in factor:
                raise DeformationError(f"{h} is not in the deformation factor of {g}")

    def provider(g):
        z = base.get(g)
        if z is None:
            return None
        for h, b in deformation.get(g, {}).items():
            if b:
                z = z + base(h) * b
        return z

    return PointedFamily(base.seed, provider, f"deformed {base.name}", base.domain)


def replaced_family(base: PointedFamily, overrides: Mapping) -> PointedFamily:
    """The family with some elements swapped out (no checks beyond pointedness)."""
    overrides = {tuple(g): z for g, z in overrides.items()}

    def provider(g):
        return overrides[g] if g in overrides else base.get(g)

    return PointedFamily(base.seed, provider, f"modified {base.name}", base.domain)


def transported_family(fam: PointedFamily, p: TrackedPath) -> PointedFamily:
    """The family moved from the base of p to its endpoint, reindexed through phi."""
    back = reverse_path(p)

    def provider(h):
        g = phi(h, back)
        z = fam.get(g)
        return None if z is None else transport_laurent(z, back)

    return PointedFamily(p.current, provider, f"{fam.name} transported", fam.domain)


# ---------------------------------------------------------------------------
# decomposition

@dataclass
class DecompResult:
    coefficients: Dict[tuple, int]
    residual: LaurentPoly
    iterations: int
    gap: Optional[tuple] = None

    @property
    def complete(self) -> bool:
        return self.residual.is_zero()


def dominance_decompose(z: LaurentPoly, fam: PointedFamily, max_iter: int = 1000) -> DecompResult:
    if max_iter < 1:
        raise UsageError("max_iter must be at least 1")
    Bt = fam.seed.Bt
    tops = maximal_degrees(z, Bt)
    r = z
    alpha: Dict[tuple, int] = {}
    it = 0
    gap = None
    while r and it < max_iter:
        for g in sorted(maximal_degrees(r, Bt)):
            if not any(solve_dominance(g, top, Bt) is not None for top in tops):
                raise InvariantViolation(f"peeled degree {g} lies below no maximal degree of the input")
            s = fam.get(g)
            if s is None:
                gap = g
                break
            c = r.coeff(g)
            alpha[g] = alpha.get(g, 0) + c
            r = r - s * c
        it += 1
        if gap is not None:
            break
    alpha = {g: c for g, c in alpha.items() if c}
    return DecompResult(alpha, r, it, gap)


def reconstruct(res: DecompResult, fam: PointedFamily) -> LaurentPoly:
    out = res.residual
    for g, c in res.coefficients.items():
        out = out + fam(g) * c
    return out


def decomposition_seed_independence(z: LaurentPoly, fam: PointedFamily, p: TrackedPath,
                                    max_iter: int = 1000) -> bool:
    a = dominance_decompose(z, fam, max_iter)
    if not a.complete:
        return False
    moved = transport_laurent(z, reverse_path(p))
    b = dominance_decompose(moved, transported_family(fam, p), max_iter)
    if not b.complete:
        return False
    return {phi(g, p): c for g, c in a.coefficients.items()} == b.coefficients


# ---------------------------------------------------------------------------
# basis verification

@dataclass
class DegreeRecord:
    degree: tuple
    checks: Dict[str, object] = field(default_factory=dict)
    witness: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v is True or v is Verdict.YES or v is None for v in self.checks.values())


@dataclass
class BasisReport:
    records: List[DegreeRecord]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def failures(self) -> List[tuple]:
        return [r.degree for r in self.records if not r.passed]

    def lines(self) -> List[str]:
        out = []
        for r in self.records:
            checks = " ".join(f"{k}={_fmt_check(v)}" for k, v in r.checks.items())
            out.append(f"degree=({','.join(map(str, r.degree))}) "
                       f"result={'pass' if r.passed else 'fail'} {checks}")
        return out


def _fmt_check(v) -> str:
    if isinstance(v, Verdict):
        return v.value
    if v is None:
        return "n/a"
    return "pass" if v else "fail"


def window_box(lo: int, hi: int, n: int):
    return itertools.product(range(lo, hi + 1), repeat=n)


def verify_basis_candidate(fam: PointedFamily, window: Sequence[int], coreach: Coreach,
                           sample_depth: int = 4, delta_plus_depth: int = 0,
                           order: int = 8) -> BasisReport:
    """Check each degree of the box ``window = (lo, hi)``.

    Checks: pointed at g, bipointed, supp_dim(s_g) = suppDim(g), pointed at t[-1]
    at phi(g); and s_g equals the cluster monomial when g is a sampled g-vector
    combination. ``delta_plus_depth > 0`` adds compatible pointedness along all
    paths of that length bound.
    """
    t = coreach.t
    if fam.seed != t:
        raise UsageError("family and coreach path live at different seeds")
    lo, hi = window
    cones = cluster_cones(t, sample_depth)
    paths = [track(t, w) for L in range(1, delta_plus_depth + 1) for w in _words(t.unfrozen, L)]
    records = []
    for g in window_box(lo, hi, t.n):
        rec = DegreeRecord(g)
        try:
            s = fam(g)
        except FamilyContractError as exc:
            rec.checks["pointed"] = False
            rec.witness["error"] = str(exc)
            records.append(rec)
            continue
        rec.checks["pointed"] = True
        bd = bidegree_of(s, t)
        rec.checks["bipointed"] = bd is not None
        expected = support_dimension_of_degree(g, coreach)
        rec.witness["suppDim(g)"] = expected
        if bd is not None:
            rec.witness["supp_dim"] = bd.supp_dim
            rec.checks["supp_dim"] = bd.supp_dim == expected
        else:
            rec.checks["supp_dim"] = False
        try:
            w = transport_laurent(s, coreach.path)
            rec.checks["t[-1]"] = is_pointed(w, coreach.t_minus, coreach.phi(g))
        except InexactDivision:
            rec.checks["t[-1]"] = False
        hit = _cone_lookup(cones, g, t.unfrozen)
        rec.checks["cluster_monomial"] = None if hit is None else (s == _monomial_from_cone(*hit))
        if paths:
            rec.checks["delta_plus"] = is_compatibly_pointed(s, paths, order)
        records.append(rec)
    return BasisReport(records)
