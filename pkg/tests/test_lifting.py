import random
from math import comb

import pytest
from hypothesis import given, strategies as st

from qcatfib.category import nerve, grid_poset
from qcatfib.core import (
    SimplicialMap,
    boundary,
    horn,
    identity_map,
    simplex_map,
    standard_simplex,
    terminal_map,
)
from qcatfib.fibrations import check_fibration
from qcatfib.lifting import (
    FAILS,
    HOLDS,
    LiftingProblem,
    count_maps,
    enumerate_maps,
    extend,
    has_rlp,
)
from qcatfib.category import poset_nerve

from conftest import leq, monotone_count, small_posets


def _top(A, inc, X, images_by_vertices):
    """A map A -> X given by the images of the included simplices' vertex tuples."""
    B = inc.target
    return SimplicialMap(A, X, {a: images_by_vertices[B.label(inc.on_key(a).base)] for a in A.keys()})


def _to_point_of(p, B):
    """B -> the (one-vertex) target of p."""
    T = p.target
    return SimplicialMap(B, T, {k: T.constant(T.vertices()[0], k[0]) for k in B.keys()})


def test_enumerate_maps_examples():
    D0, D1, D2 = (standard_simplex(n) for n in range(3))
    assert len(enumerate_maps(D0, D1)) == 2
    assert len(enumerate_maps(D1, D1)) == 3
    assert len(enumerate_maps(D2, D1)) == 4


@pytest.mark.parametrize("m,n", [(0, 0), (1, 2), (2, 2), (3, 1), (2, 3)])
def test_maps_between_simplices_count_monotone_maps(m, n):
    assert count_maps(standard_simplex(m), standard_simplex(n)) == comb(m + n + 1, m + 1)


@given(small_posets(3), small_posets(3))
def test_map_counts_between_poset_nerves(P, Q):
    (n, s1), (m, s2) = P, Q
    NP = poset_nerve(list(range(n)), leq(s1))
    NQ = poset_nerve(list(range(m)), leq(s2))
    assert count_maps(NP, NQ) == monotone_count(n, s1, m, s2)


def test_extend_identity_lift():
    A, inc = horn(2, 1)
    D2 = inc.target
    prob = LiftingProblem(inc, inc, identity_map(D2), identity_map(D2))
    lift = extend(prob)
    assert lift is not None
    assert all(lift.on_key(k) == D2.point(k) for k in D2.keys())


def test_extend_no_lift_needs_backwards_edge():
    A, inc = horn(2, 0)
    D1 = standard_simplex(1)
    v0, v1 = D1.vertices()
    e = D1.nondegenerate(1)[0]
    top = _top(A, inc, D1, {(0,): v0, (1,): v1, (2,): v0, (0, 1): e, (0, 2): D1.constant(v0, 1)})
    p = terminal_map(D1)
    prob = LiftingProblem(inc, top, _to_point_of(p, inc.target), p)
    assert prob.commutes()
    assert extend(prob) is None


def test_extend_boundary_of_edge():
    A, inc = boundary(1)
    D1 = standard_simplex(1)
    v0, v1 = D1.vertices()
    top = _top(A, inc, D1, {(0,): v0, (1,): v1})
    p = terminal_map(D1)
    lift = extend(LiftingProblem(inc, top, _to_point_of(p, inc.target), p))
    assert lift is not None and lift.on_key((1, 0)) == D1.nondegenerate(1)[0]


def test_has_rlp_examples():
    D2 = standard_simplex(2)
    assert has_rlp(identity_map(D2), "kan", 4).status == HOLDS
    v = has_rlp(terminal_map(standard_simplex(1)), "left", 3)
    assert v.status == FAILS
    assert v.witness.label == "Lambda^2_0" and v.witness.replay()
    assert has_rlp(terminal_map(nerve(grid_poset(), 4)), "inner", 4).status == HOLDS


def test_every_fails_witness_is_unliftable(corpus_maps):
    for name, p in corpus_maps.items():
        for kind in ("left", "right", "inner"):
            v = has_rlp(p, kind, 3)
            if v.fails:
                assert v.witness.commutes(), name
                assert extend(v.witness) is None, name


@given(st.integers(0, 10_000))
def test_extension_existence_independent_of_order(seed):
    rng = random.Random(seed)
    D2 = standard_simplex(2)
    N = nerve(grid_poset(), 3)
    for k in range(3):
        A, inc = horn(2, k)
        for top_map in enumerate_maps(A, N)[:6]:
            p = terminal_map(N)
            prob = LiftingProblem(inc, top_map, _to_point_of(p, D2), p)
            shuffled = extend(prob, order=lambda c: rng.sample(c, len(c)))
            assert (extend(prob) is None) == (shuffled is None)


def test_kan_family_implies_inner(corpus_maps):
    for name, p in corpus_maps.items():
        if has_rlp(p, "kan", 3).holds:
            assert has_rlp(p, "inner", 3).holds, name


def test_holds_verdicts_reproducible():
    p = identity_map(standard_simplex(2))
    a, b = check_fibration(p, "kan", 3), check_fibration(p, "kan", 3)
    assert (a.status, a.squares, a.bound) == (b.status, b.squares, b.bound)


def test_simplex_map_bottom():
    D2 = standard_simplex(2)
    s = D2.nondegenerate(2)[0]
    f = simplex_map(D2, s)
    assert f(f.source.nondegenerate(2)[0]) == s
