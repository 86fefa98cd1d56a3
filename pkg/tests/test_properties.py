from __future__ import annotations

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import oracles
from conftest import skew_seeds, skewsym_seeds, words
from clusterbases.bases import (
    bidegree_interval,
    cluster_monomial_family,
    decomposition_seed_independence,
    deformation_factor,
    deformed_family,
    dominance_decompose,
    kronecker_generic_family,
    pair_deformation_factor,
    reconstruct,
)
from clusterbases.laurent import (
    LaurentPoly,
    bidegree_of,
    cluster_monomial,
    cluster_variables_along,
    codegree,
    degree,
    is_bipointed,
    maximal_degrees,
    minimal_degrees,
    transport,
    y_variable,
)
from clusterbases.lattice import IntMat, int_inverse, interval, solve_dominance, strictly_dominated
from clusterbases.seeds import (
    a2,
    coreach_of,
    ef_matrices,
    kronecker,
    mutate_matrix,
    phi,
    psi_matrix,
    reverse_path,
    seed,
    track,
)

KC = coreach_of(kronecker())
AC = coreach_of(a2())
KFAM = kronecker_generic_family(kronecker())
AFAM = cluster_monomial_family(a2())

vec2 = st.tuples(st.integers(-4, 4), st.integers(-4, 4))
small_terms = st.dictionaries(st.tuples(st.integers(-3, 3), st.integers(-3, 3)),
                              st.integers(-5, 5), max_size=5)
rank2 = st.sampled_from([a2(), kronecker(), seed([[0, 1], [-1, 0]]), seed([[0, 2], [-2, 0]])])


def diag(d, rows, cols):
    return IntMat([[d[i] if i == j else 0 for j in cols] for i in rows])


# ---------------------------------------------------------------------------
# mutation and E/F matrices

@given(skewsym_seeds(), st.data())
def test_mutation_involution(s, data):
    k = data.draw(st.sampled_from(s.unfrozen))
    assert mutate_matrix(mutate_matrix(s, k), k) == s


@given(skewsym_seeds(), st.data())
def test_mutation_matches_oracle(s, data):
    k = data.draw(st.sampled_from(s.unfrozen))
    eps = data.draw(st.sampled_from([1, -1]))
    assert mutate_matrix(s, k, eps).b.tolist() == oracles.mutate(s.b.tolist(), k, eps)


@given(skewsym_seeds(), st.data())
def test_ef_conjugation_both_signs(s, data):
    k = data.draw(st.sampled_from(s.unfrozen))
    for eps in (1, -1):
        E, F = ef_matrices(s, k, eps)
        assert (E @ s.Bt @ F).tolist() == mutate_matrix(s, k).Bt.tolist()


@given(skewsym_seeds(), st.data())
def test_ef_preserve_weights(s, data):
    k = data.draw(st.sampled_from(s.unfrozen))
    D = diag(s.d, range(s.n), s.unfrozen)
    for eps in (1, -1):
        E, F = ef_matrices(s, k, eps)
        assert (E.T @ D @ F).tolist() == D.tolist()


# ---------------------------------------------------------------------------
# tracked paths

@given(skewsym_seeds(), st.data())
def test_sign_coherence_every_prefix(s, data):
    w = data.draw(words(s.n, 8))
    p = track(s, w)
    for j in range(len(w) + 1):
        q = track(s, w[:j])
        for col in q.C.columns():
            assert all(x >= 0 for x in col) or all(x <= 0 for x in col)
    assert mutate_matrix_seq(s, w) == p.current


def mutate_matrix_seq(s, w):
    for k in w:
        s = mutate_matrix(s, k)
    return s


@given(skew_seeds(), st.data())
def test_duality(s, data):
    p = track(s, data.draw(words(s.n, 8)))
    assert (p.G.T @ p.C).tolist() == IntMat.identity(s.n).tolist()


@given(skew_seeds(), st.data())
def test_g_matrix_tropical_compatibility(s, data):
    w1 = data.draw(words(s.n, 5))
    w2 = data.draw(words(s.n, 5))
    to_t = track(s, w1)
    rel = track(to_t.current, tuple(reversed(w1)) + tuple(w2))
    absolute = track(s, w2)
    for j in range(s.n):
        assert rel.Gext.column(j) == phi(absolute.Gext.column(j), to_t)


@given(skewsym_seeds(), st.data())
def test_psi_unimodular_and_phi_invertible(s, data):
    p = track(s, data.draw(words(s.n, 6)))
    int_inverse(psi_matrix(p))
    g = data.draw(st.lists(st.integers(-5, 5), min_size=s.n, max_size=s.n))
    assert phi(phi(g, p), reverse_path(p)) == tuple(g)


@given(skew_seeds(n_min=2, n_max=2, bound=3), st.data())
def test_phi_matches_oracle(s, data):
    w = data.draw(words(2, 6))
    g = data.draw(vec2)
    assert phi(g, track(s, w)) == oracles.phi(g, s.b.tolist(), w)


# ---------------------------------------------------------------------------
# ring and degree laws

@given(small_terms, small_terms, small_terms)
def test_ring_laws(a, b, c):
    x, y, z = (LaurentPoly(t, 2) for t in (a, b, c))
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert x * (y + z) == x * y + x * z
    assert (x * y).terms == oracles.poly_mul(a, b)


@st.composite
def pointed(draw, Bt):
    g = draw(vec2)
    tail = draw(st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 2)),
                                st.integers(-3, 3), max_size=4))
    terms = {g: 1}
    for n, c in tail.items():
        if any(n) and c:
            e = tuple(g[i] + sum(Bt[i, k] * n[k] for k in range(2)) for i in range(2))
            terms[e] = c
    return g, LaurentPoly(terms, 2)


@given(st.sampled_from([a2(), kronecker()]), st.data())
def test_pointed_times_pointed(s, data):
    g1, z1 = data.draw(pointed(s.Bt))
    g2, z2 = data.draw(pointed(s.Bt))
    assert degree(z1, s) == g1 and degree(z2, s) == g2
    assert degree(z1 * z2, s) == (g1[0] + g2[0], g1[1] + g2[1])


@given(st.sampled_from([a2(), kronecker()]), st.data())
def test_unitriangular_sums(s, data):
    elems = data.draw(st.lists(pointed(s.Bt), min_size=1, max_size=4, unique_by=lambda e: e[0]))
    degs = [g for g, _ in elems]
    tops = [g for g in degs if not any(strictly_dominated(g, h, s.Bt) for h in degs)]
    assume(len(tops) == 1)
    total = LaurentPoly.zero(2)
    for _, z in elems:
        total = total + z
    assert degree(total, s) == tops[0]


@given(st.sampled_from([KC, AC]), vec2, st.tuples(st.integers(0, 3), st.integers(0, 3)))
@settings(max_examples=200)
def test_order_reversal(c, g, n):
    Bt = c.t.Bt
    eta = tuple(g[i] + sum(Bt[i, k] * n[k] for k in range(2)) for i in range(2))
    psi = c.psi()
    pg, peta = psi @ g, psi @ eta
    Pn = c.sigma.matrix() @ n
    minus = c.t_minus.Bt
    assert tuple(peta) == tuple(pg[i] - sum(minus[i, k] * Pn[k] for k in range(2)) for i in range(2))
    assert solve_dominance(pg, peta, minus) == tuple(Pn)


def test_c_vector_y_degree_law():
    for s in (a2(), kronecker()):
        for L in range(7):
            for w in _all_words(L):
                p = track(s, w)
                for k in range(2):
                    moved = transport(y_variable(p.current, k), p, 3)
                    assert moved.degree() == tuple(s.Bt @ p.C.column(k))


def _all_words(L):
    if L == 0:
        return [()]
    return [(a,) + tuple((a + 1 + i) % 2 for i in range(L - 1)) for a in (0, 1)]


# ---------------------------------------------------------------------------
# cluster monomials and decomposition

@given(rank2, st.data())
@settings(max_examples=40)
def test_cluster_monomials_bipointed_and_positive(s, data):
    w = data.draw(words(2, 8))
    a = data.draw(st.tuples(st.integers(0, 2), st.integers(0, 2)))
    p = track(s, w)
    z = cluster_monomial(p, a)
    assert is_bipointed(z, s)
    assert z.coefficients_nonnegative()


@given(skew_seeds(n_min=3, n_max=3), st.data())
@settings(max_examples=30)
def test_positivity_rank3(s, data):
    for x in cluster_variables_along(track(s, data.draw(words(3, 4)))):
        assert x.coefficients_nonnegative()


@given(small_terms, st.integers(1, 6))
def test_decomposition_reconstructs(terms, max_iter):
    # arbitrary Laurent polynomials need not lie in the algebra, so the peeling may not end
    z = LaurentPoly(terms, 2)
    res = dominance_decompose(z, AFAM, max_iter=max_iter)
    assert reconstruct(res, AFAM) == z
    tops = maximal_degrees(z, a2().Bt)
    for g in tops:
        assert res.coefficients.get(g, 0) == z.coeff(g)
    for g in res.coefficients:
        if g not in tops:
            assert any(strictly_dominated(g, h, a2().Bt) for h in tops)


@given(st.sampled_from([(a2(), AFAM), (kronecker(), KFAM)]), st.data())
@settings(max_examples=40)
def test_decomposition_finite_in_algebra(sf, data):
    s, fam = sf
    z = LaurentPoly.zero(2)
    for _ in range(data.draw(st.integers(1, 3))):
        w = data.draw(words(2, 4))
        x = cluster_variables_along(track(s, w))[data.draw(st.integers(0, 1))]
        z = z + x * data.draw(st.integers(-3, 3)) * x
    res = dominance_decompose(z, fam)
    assert res.complete and reconstruct(res, fam) == z
    if z:
        top = maximal_degrees(z, s.Bt)
        bound = sum(len(interval(minimal, g, s.Bt)) for g in top
                    for minimal in minimal_degrees(z, s) if solve_dominance(minimal, g, s.Bt))
        assert res.iterations <= max(bound, 1)


@given(st.sampled_from([(a2(), AFAM), (kronecker(), KFAM)]), st.data())
@settings(max_examples=30)
def test_seed_independence_of_products(sf, data):
    s, fam = sf
    factors = data.draw(st.lists(words(2, 4), min_size=1, max_size=3))
    z = LaurentPoly.constant(1, 2)
    for w in factors:
        z = z * cluster_variables_along(track(s, w))[data.draw(st.integers(0, 1))]
    k = data.draw(st.sampled_from([0, 1]))
    assert decomposition_seed_independence(z, fam, track(s, [k]))


# ---------------------------------------------------------------------------
# deformation factors and bidegrees

@given(vec2)
def test_inclusion_description(g):
    Ig = bidegree_interval(g, KC)
    for h in Ig:
        assert (h in pair_deformation_factor(g, KC)) == (bidegree_interval(h, KC) < Ig)


@given(vec2, st.data())
@settings(max_examples=100)
def test_deformed_bidegree(g, data):
    factor = sorted(deformation_factor(g, KC))
    coeffs = data.draw(st.lists(st.integers(-3, 3), min_size=len(factor), max_size=len(factor)))
    fam = deformed_family(KFAM, {g: dict(zip(factor, coeffs))}, KC)
    z = fam(g)
    bd = bidegree_of(z, kronecker())
    expected = int_inverse(KC.psi()) @ KC.phi(g)
    assert bd.deg == g
    assert bd.codeg == tuple(expected)
    assert codegree(z, kronecker()) == tuple(expected)


@pytest.mark.parametrize("d", range(1, 7))
def test_deformation_factor_closed_form(d):
    g = (d, -d)
    assert deformation_factor(g, KC) == {(d - 2 * k, -(d - 2 * k)) for k in range(1, d // 2 + 1)}
