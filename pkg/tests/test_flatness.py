import random

import pytest
from hypothesis import given, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from qcatfib.contractible import (
    CONTRACTIBLE,
    NOT_CONTRACTIBLE,
    UNKNOWN,
    Budgets,
    collapse_to_point,
    is_weakly_contractible,
    replay_collapses,
)
from qcatfib.constructions import slice_under
from qcatfib.core import (
    Simplex,
    SimplicialMap,
    boundary,
    disjoint_union,
    from_faces,
    identity_map,
    standard_simplex,
)
from qcatfib.corpus import complexes, flatness_counterexample
from qcatfib.fibrations import (
    check_fibration,
    is_cartesian_fibration,
    is_cocartesian_fibration,
    is_trivial_fibration,
)
from qcatfib.flatness import factorization_space, is_flat, pullback_to_triangle
from qcatfib.homology import euler_characteristic, homology, smith_invariants

D0, D1, D2 = (standard_simplex(n) for n in range(3))


def _loop():
    """One vertex and one nondegenerate edge from it to itself."""
    v = Simplex((0, 0), (0,))
    return from_faces([1, 1], {(1, 0): (v, v)})


def _dunce_hat():
    """One vertex, one loop a, one triangle with all three faces equal to a."""
    v = Simplex((0, 0), (0,))
    a = Simplex((1, 0), (0, 1))
    return from_faces([1, 1, 1], {(1, 0): (v, v), (2, 0): (a, a, a)})


# ---------------------------------------------------------------------------
# homology


def test_homology_examples():
    assert all(g.is_zero for g in homology(D2).values())
    H = homology(boundary(2)[0])
    assert H[1].betti == 1 and not H[1].torsion
    assert all(g.is_zero for n, g in H.items() if n != 1)
    H = homology(disjoint_union(D0, D0)[0])
    assert H[0].betti == 1 and H[1 if 1 in H else 0].betti in (0, 1)


@pytest.mark.parametrize("n", range(1, 5))
def test_homology_of_sphere_boundaries(n):
    H = homology(boundary(n)[0])
    for k, g in H.items():
        assert (g.betti, g.torsion) == ((1, []) if k == n - 1 else (0, [])), k


def test_homology_of_loop_and_dunce_hat():
    assert homology(_loop())[1].betti == 1
    assert all(g.is_zero for g in homology(_dunce_hat()).values())


def _sympy_invariants(M):
    if not M or not M[0]:
        return []
    S = smith_normal_form(Matrix(M), domain=ZZ)
    return sorted(abs(S[i, i]) for i in range(min(S.shape)) if S[i, i] != 0)


@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 10_000))
def test_smith_invariants_match_sympy(r, c, seed):
    rng = random.Random(seed)
    M = [[rng.randint(-4, 4) for _ in range(c)] for _ in range(r)]
    assert sorted(smith_invariants(M)) == _sympy_invariants(M)


def test_euler_consistency_on_corpus():
    for name, X in complexes().items():
        if not X.exact:
            continue
        H = homology(X)
        reduced = sum((-1) ** n * g.betti for n, g in H.items())
        # the reduced Euler characteristic is chi - 1
        assert reduced == euler_characteristic(X) - 1, name


# ---------------------------------------------------------------------------
# contractibility


@pytest.mark.parametrize("n", range(4))
def test_simplices_contractible(n):
    v = is_weakly_contractible(standard_simplex(n))
    assert v.status == CONTRACTIBLE and v.evidence["kind"] == "collapse"
    assert v.replay()


def test_boundary_triangle_not_contractible():
    v = is_weakly_contractible(boundary(2)[0])
    assert v.status == NOT_CONTRACTIBLE
    assert v.evidence["kind"] == "homology" and v.evidence["degree"] == 1
    assert v.replay()


def test_two_points_not_contractible():
    v = is_weakly_contractible(boundary(1)[0])
    assert v.status == NOT_CONTRACTIBLE and v.evidence["degree"] == 0
    assert v.replay()


def test_empty_not_contractible():
    v = is_weakly_contractible(boundary(0)[0])
    assert v.status == NOT_CONTRACTIBLE and v.evidence["kind"] == "empty"


def test_loop_not_contractible():
    v = is_weakly_contractible(_loop())
    assert v.status == NOT_CONTRACTIBLE and v.replay()


def test_dunce_hat_contractible_without_collapse():
    K = _dunce_hat()
    assert collapse_to_point(K) is None
    v = is_weakly_contractible(K)
    assert v.status == CONTRACTIBLE and v.evidence["kind"] == "pi1-trivial"
    assert v.replay()


def test_collapse_replay_rejects_tampering():
    K = standard_simplex(2)
    seq = collapse_to_point(K)
    assert replay_collapses(K, seq)
    assert not replay_collapses(K, seq[1:])


def test_tiny_budget_never_claims_contractible():
    v = is_weakly_contractible(_dunce_hat(), Budgets(collapse_states=1, tietze_passes=0))
    assert v.status in (CONTRACTIBLE, UNKNOWN)
    if v.status == CONTRACTIBLE:
        assert v.replay()


def test_no_unknown_on_corpus():
    for name, X in complexes().items():
        assert is_weakly_contractible(X).status != UNKNOWN, name


# ---------------------------------------------------------------------------
# factorization spaces and flatness


def test_factorization_space_identity():
    q = identity_map(D2)
    F = factorization_space(q, D2.named((0, 2)))
    assert F.counts == (1,)
    assert is_weakly_contractible(F).status == CONTRACTIBLE


def test_factorization_space_missing_filler_is_empty():
    p = flatness_counterexample()
    sigma = p.target.nondegenerate(2)[0]
    q = pullback_to_triangle(p, sigma)
    long_edges = [e for e in q.source.nondegenerate(1)]
    assert len(long_edges) == 1
    assert factorization_space(q, long_edges[0]).is_empty


def test_flatness_counterexample():
    p = flatness_counterexample()
    assert check_fibration(p, "inner", 3).holds
    v = is_flat(p, 3)
    assert v.fails
    assert v.witness.verdict.evidence["kind"] == "empty"
    assert v.witness.replay()


def test_factorization_space_rejects_non_edges():
    with pytest.raises(ValueError):
        factorization_space(identity_map(D2), D2.vertices()[0])


def test_cocartesian_and_cartesian_maps_are_flat(corpus_maps):
    seen = 0
    for name, p in corpus_maps.items():
        if not check_fibration(p, "inner", 3).holds:
            continue
        if is_cocartesian_fibration(p, 3).holds or is_cartesian_fibration(p, 3).holds:
            seen += 1
            assert is_flat(p, 3).holds, name
    assert seen >= 10


def test_inner_fibrations_over_one_skeletal_bases_are_flat(corpus_maps):
    seen = 0
    for name, p in corpus_maps.items():
        if p.target.nondegenerate(2) or not check_fibration(p, "inner", 3).holds:
            continue
        seen += 1
        v = is_flat(p, 3)
        assert v.holds and v.detail["spaces"] == 0, name
    assert seen >= 3


def test_flat_verdicts_never_unknown(corpus_maps):
    for name, p in corpus_maps.items():
        if check_fibration(p, "inner", 3).holds:
            assert is_flat(p, 3).status != UNKNOWN, name


def _components(X):
    return homology(X)[0].betti + 1 if not X.is_empty else 0


def test_triangle_criterion_agrees_with_certified_comparisons(corpus_maps):
    """Where each pullback to a 2-simplex is a trivial fibration the criterion holds;
    where the horn part has a different number of components it fails."""
    for name, p in corpus_maps.items():
        if not check_fibration(p, "inner", 3).holds:
            continue
        for sigma in p.target.nondegenerate(2):
            q = pullback_to_triangle(p, sigma)
            if is_trivial_fibration(q, 3).holds:
                for e in q.source.simplices(1):
                    if q(e) == D2.named((0, 2)):
                        assert is_weakly_contractible(factorization_space(q, e)), name
    p = flatness_counterexample()
    q = pullback_to_triangle(p, p.target.nondegenerate(2)[0])
    horn_part = [v for v in q.source.vertices()]
    # over the horn every vertex is isolated, over Delta^2 the long edge joins two
    assert _components(q.source) < len(horn_part)
    assert is_flat(p, 3).fails


# ---------------------------------------------------------------------------
# slices of flat fibrations


def _induced_slice(p, x, bound):
    """X_{x/} -> S_{p(x)/} induced by p."""
    X, S = p.source, p.target
    SX = slice_under(X, x, bound).total
    SS = slice_under(S, p(x), bound).total
    lookup = {}
    for n in range(bound + 1):
        for t in SS.simplices(n):
            raw = S.act(SS.labels[t.base], (0,) + tuple(i + 1 for i in t.op))
            lookup[raw] = t
    return SimplicialMap(SX, SS, {k: lookup[p(SX.labels[k])] for k in SX.keys()})


def test_slices_of_flat_fibrations_are_flat(corpus_maps):
    seen = 0
    for name, p in corpus_maps.items():
        if p.source.num_nondegenerate() > 20 or not check_fibration(p, "inner", 3).holds:
            continue
        if not is_flat(p, 3).holds:
            continue
        for x in p.source.vertices():
            f = _induced_slice(p, x, 3)
            assert check_fibration(f, "inner", 3).holds, (name, x)
            seen += 1
            assert is_flat(f, 3).holds, (name, x)
    assert seen >= 10
