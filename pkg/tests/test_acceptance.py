"""Acceptance criteria 1-10; one summary line per criterion is printed at session end."""

from __future__ import annotations

import random
import time

import pytest

from clusterbases.bases import (
    cluster_monomial_family,
    decomposition_seed_independence,
    deformation_factor,
    deformed_family,
    kronecker_generic_family,
    replaced_family,
    verify_basis_candidate,
)
from clusterbases.laurent import (
    LaurentPoly,
    cluster_history,
    cluster_variables_along,
    codeg_deg_swap_check,
    codegree,
    degree,
    format_poly,
    is_bipointed,
    parse_poly,
)
from clusterbases.lattice import IntMat, solve_dominance
from clusterbases.scatter import (
    apply_monomial,
    cluster_diagram,
    opposite_diagram,
    opposite_identity,
    path_product,
    theta,
)
from clusterbases.seeds import (
    _words,
    a2,
    coreach_of,
    ef_matrices,
    find_green_to_red,
    green_to_red_check,
    kronecker,
    mutate_matrix,
    relabel,
    seed,
    track,
)

# Every criterion is exact: no numeric tolerance anywhere. Wall-clock limits in seconds.
EXACT = 0
RUNTIME_LIMIT = {1: 1.0, 2: 5.0, 3: 10.0, 5: 60.0}
CRIT5_PATHS, CRIT5_MAX_RANK, CRIT5_MAX_ENTRY, CRIT5_MAX_LEN = 500, 3, 2, 10
CRIT6_DEPTH = 6
CRIT7_MAX_LEN = 10
CRIT8_ELEMENTS, CRIT8_MAX_FACTORS = 50, 3
CRIT9_WINDOW = (-4, 4)
CRIT3_MULTIPLES = range(1, 9)
CRIT2_ORDER = 6

CPLUS, CMINUS = (1, 1), (-1, -1)


def dd(d):
    return (d, -d)


def timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def alternating_words(max_len):
    for L in range(max_len + 1):
        yield from _words((0, 1), L)


def test_criterion_01_a2_wall_crossing_golden():
    def run():
        d = cluster_diagram(a2(), 2)
        op = path_product(d, CPLUS, CMINUS, "ccw")
        return d, apply_monomial(op, (1, 0), d.B), apply_monomial(op, (0, 1), d.B)

    (d, px1, px2), elapsed = timed(run)
    assert elapsed < RUNTIME_LIMIT[1]
    for order in (2, 3, 6):
        assert len(cluster_diagram(a2(), order).walls) == 3
    x1, x2 = parse_poly("x1", 2), parse_poly("x2", 2)
    want1 = x1 * parse_poly("1 + x2 + x1^-1*x2", 2)
    want2 = x2 * parse_poly("1 + x1^-1", 2)
    assert format_poly(px1.as_poly()) == format_poly(want1) == "x1*x2 + x1 + x2"
    assert format_poly(px2.as_poly()) == format_poly(want2) == "x2 + x1^-1*x2"


def test_criterion_02_opposite_diagram_identity():
    ms = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1)]

    def run():
        results = []
        for s in (a2(), kronecker()):
            d = cluster_diagram(s, CRIT2_ORDER)
            d_op = opposite_diagram(d)
            for how in ("ccw", "cw"):
                op = path_product(d, CPLUS, CMINUS, how)
                results += [opposite_identity(d, d_op, op, m) for m in ms]
        return results

    results, elapsed = timed(run)
    assert elapsed < RUNTIME_LIMIT[2]
    assert len(results) == 2 * 2 * len(ms) and all(results)


def test_criterion_03_kronecker_deformation_factors():
    kc = coreach_of(kronecker())
    factors, elapsed = timed(lambda: {d: deformation_factor(dd(d), kc) for d in CRIT3_MULTIPLES})
    assert elapsed < RUNTIME_LIMIT[3]
    for d, f in factors.items():
        assert len(f) == d // 2
        assert f == {dd(d - 2 * k) for k in range(1, d // 2 + 1)}


def test_criterion_04_kronecker_green_to_red():
    K = kronecker()
    p = find_green_to_red(K, 2)
    assert p is not None and len(p) == 2
    assert p.C.tolist() == [[-1, 0], [0, -1]]
    sigma = green_to_red_check(p)
    assert sigma is not None
    minus_p = [[-x for x in row] for row in sigma.matrix().tolist()]
    assert p.G.tolist() == minus_p


def _random_skew(rng, n):
    b = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = rng.randint(-CRIT5_MAX_ENTRY, CRIT5_MAX_ENTRY)
            b[i][j], b[j][i] = v, -v
    return seed(b, check_rank=False)


def test_criterion_05_sign_coherence_and_duality():
    rng = random.Random(5)

    def run():
        checked = 0
        for _ in range(CRIT5_PATHS):
            n = rng.randint(2, CRIT5_MAX_RANK)
            s = _random_skew(rng, n)
            L = rng.randint(0, CRIT5_MAX_LEN)
            w = []
            while len(w) < L:
                k = rng.randrange(n)
                if not w or k != w[-1]:
                    w.append(k)
            p = track(s, [])
            for k in w:
                cur = p.current
                for eps in (1, -1):
                    E, F = ef_matrices(cur, k, eps)
                    assert (E @ cur.Bt @ F).tolist() == mutate_matrix(cur, k).Bt.tolist()
                p = track(s, p.steps + (k,))
                for col in p.C.columns():
                    assert all(x >= 0 for x in col) or all(x <= 0 for x in col)
                assert (p.G.T @ p.C).tolist() == IntMat.identity(n).tolist()
            checked += 1
        return checked

    checked, elapsed = timed(run)
    assert checked == CRIT5_PATHS
    assert elapsed < RUNTIME_LIMIT[5]


def test_criterion_06_order_reversal_and_swap():
    for s in (a2(), kronecker()):
        c = coreach_of(s)
        psi = c.psi()
        P = c.sigma.matrix()
        seen = {}
        for w in alternating_words(CRIT6_DEPTH):
            for x in cluster_variables_along(track(s, w)):
                seen[format_poly(x)] = x
        for x in seen.values():
            assert codeg_deg_swap_check(x, c)
            g, eta = degree(x, s), codegree(x, s)
            n = solve_dominance(eta, g, s.Bt)
            assert n is not None
            assert solve_dominance(psi @ g, psi @ eta, c.t_minus.Bt) == tuple(P @ n)


RANK2_SEEDS = {
    "A2": seed([[0, -1], [1, 0]]),
    "B2": seed([[0, -2], [1, 0]], d=[1, 2]),
    "G2": seed([[0, -3], [1, 0]], d=[1, 3]),
    "Kronecker": seed([[0, -2], [2, 0]]),
}


@pytest.mark.parametrize("name", sorted(RANK2_SEEDS))
def test_criterion_07_laurent_positivity_bipointed(name):
    s = RANK2_SEEDS[name]
    for w in alternating_words(CRIT7_MAX_LEN):
        for x in cluster_history(track(s, w)) or cluster_variables_along(track(s, w)):
            assert all(isinstance(e, int) for exp in x.terms for e in exp)
            assert all(isinstance(c, int) for c in x.terms.values())
            assert x.coefficients_nonnegative()
            assert is_bipointed(x, s)


def test_criterion_08_decomposition_seed_independence():
    rng = random.Random(8)
    fams = [(a2(), cluster_monomial_family(a2())),
            (kronecker(), kronecker_generic_family(kronecker()))]
    for i in range(CRIT8_ELEMENTS):
        s, fam = fams[i % 2]
        z = LaurentPoly.constant(1, 2)
        for _ in range(rng.randint(1, CRIT8_MAX_FACTORS)):
            w = list(rng.choice(list(alternating_words(4))))
            z = z * cluster_variables_along(track(s, w))[rng.randrange(2)]
        assert decomposition_seed_independence(z, fam, track(s, [rng.randrange(2)]))


def test_criterion_09_basis_verification():
    K = kronecker()
    kc = coreach_of(K)
    kfam = kronecker_generic_family(K)
    rep = verify_basis_candidate(kfam, CRIT9_WINDOW, kc)
    assert rep.passed, rep.failures
    assert len(rep.records) == (CRIT9_WINDOW[1] - CRIT9_WINDOW[0] + 1) ** 2

    deformation = {dd(2): {(0, 0): 5}, dd(3): {dd(1): -2},
                   dd(4): {dd(2): 1, (0, 0): -3}}
    for g, m in deformation.items():
        assert set(m) <= deformation_factor(g, kc)
    fam = deformed_family(kfam, deformation, kc)
    assert verify_basis_candidate(fam, CRIT9_WINDOW, kc).passed

    z = kfam(dd(2))
    bad = replaced_family(kfam, {dd(2): z + LaurentPoly.monomial((-4, 4))})
    rep = verify_basis_candidate(bad, CRIT9_WINDOW, kc)
    assert rep.failures == [dd(2)]
    rec = next(r for r in rep.records if r.degree == dd(2))
    assert rec.checks["supp_dim"] is False


def test_criterion_10_theta_cluster_agreement():
    A = a2()
    d = cluster_diagram(A, 6)
    w = [0, 1, 0, 1, 0]
    hist = cluster_history(track(A, w))
    gs = [track(A, w[:i + 1]).Gext.column(w[i]) for i in range(5)]
    assert len(set(gs)) == 5
    for g, x in zip(gs, hist):
        th = theta(d, g)
        assert th.exact and th.as_poly() == x
    end = track(A, w)
    assert cluster_variables_along(end) == [parse_poly("x2", 2), parse_poly("x1", 2)]
    assert end.current == relabel(A, (1, 0))
