import itertools
from math import comb

import pytest
from hypothesis import given, strategies as st

from qcatfib.category import (
    Functor,
    grid_poset,
    linear_order,
    monoid_category,
    nerve,
    nerve_map,
    poset_nerve,
)
from qcatfib.core import (
    Simplex,
    boundary,
    compose_ops,
    coface,
    codegeneracy,
    disjoint_union,
    empty,
    from_vertex_sets,
    horn,
    identity_map,
    is_isomorphic,
    join,
    monotone_maps,
    op_to_word,
    opposite,
    product,
    pullback,
    standard_simplex,
    subcomplex_generated,
    validate,
)
from qcatfib.corpus import complexes, poset_nerves

from conftest import leq, poset_cat, small_posets


def counts(X):
    return tuple(len(X.keys(d)) for d in range(X.dim + 1))


# ---------------------------------------------------------------------------
# standard simplices, horns, boundaries


def test_standard_simplex_counts():
    assert counts(standard_simplex(0)) == (1,)
    assert counts(standard_simplex(2)) == (3, 3, 1)
    assert counts(standard_simplex(3)) == (4, 6, 4, 1)


@pytest.mark.parametrize("n", range(5))
def test_standard_simplex_counts_binomial(n):
    # nondegenerate k-simplices = monotone injections [k] -> [n]
    injections = lambda k: sum(1 for t in itertools.combinations(range(n + 1), k + 1))
    assert counts(standard_simplex(n)) == tuple(injections(k) for k in range(n + 1))


@pytest.mark.parametrize("m", range(4))
def test_all_simplices_are_monotone_maps(m):
    # |(Delta^n)_m| = C(m + n + 1, m + 1)
    for n in range(4):
        assert len(standard_simplex(n).simplices(m)) == comb(m + n + 1, m + 1)


def test_horn_examples():
    A, inc = horn(1, 0)
    assert counts(A) == (1,)
    assert inc(A.vertices()[0]) == standard_simplex(1).vertices()[0]

    A, inc = horn(2, 0)
    D2 = inc.target
    assert counts(A) == (3, 2)
    assert {inc(e) for e in A.nondegenerate(1)} == {D2.named((0, 1)), D2.named((0, 2))}

    A, inc = horn(2, 1)
    assert {inc(e) for e in A.nondegenerate(1)} == {D2.named((0, 1)), D2.named((1, 2))}


def test_boundary_examples():
    assert boundary(0)[0].is_empty
    assert counts(boundary(1)[0]) == (2,)
    B2 = boundary(2)[0]
    assert counts(B2) == (3, 3)


# ---------------------------------------------------------------------------
# nerves


def test_nerve_of_linear_order_is_simplex():
    assert is_isomorphic(nerve(linear_order(2), 3), standard_simplex(2))


def test_nerve_of_grid():
    N = nerve(grid_poset(), 3)
    assert counts(N) == (4, 5, 2)
    assert N.exact


def test_nerve_of_idempotent_monoid_is_truncated():
    M = monoid_category(["1", "e"], lambda g, f: "e" if "e" in (g, f) else "1", "1")
    N = nerve(M, 3)
    assert counts(N) == (1, 1, 1, 1)
    assert not N.exact


@given(small_posets())
def test_nerve_simplex_counts_match_chains(P):
    n, strict = P
    N = poset_nerve(list(range(n)), leq(strict))
    le = leq(strict)
    for m in range(3):
        chains = sum(1 for c in itertools.product(range(n), repeat=m + 1)
                     if all(le(c[i], c[i + 1]) for i in range(m)))
        assert len(N.simplices(m)) == chains


def test_nerve_is_functorial():
    C, D = linear_order(2), linear_order(1)
    E = linear_order(1)
    F = Functor(C, D, {0: 0, 1: 1, 2: 1}, {(a, b): (min(a, 1), min(b, 1)) for (a, b) in C.morphisms})
    G = Functor(D, E, {0: 0, 1: 0}, {m: (0, 0) for m in D.morphisms})
    NC, ND, NE = nerve(C, 3), nerve(D, 3), nerve(E, 3)
    lhs = nerve_map(G.compose(F), NC, NE)
    rhs = nerve_map(G, ND, NE).compose(nerve_map(F, NC, ND))
    for m in range(4):
        for s in NC.simplices(m):
            assert lhs(s) == rhs(s)


# ---------------------------------------------------------------------------
# products, pullbacks, opposites, joins


def test_product_square_counts():
    P = product(standard_simplex(1), standard_simplex(1))[0]
    assert counts(P) == (4, 5, 2)


@pytest.mark.parametrize("a,b", [(1, 1), (1, 2), (2, 2)])
def test_product_counts_shuffle(a, b):
    # nondegenerate top simplices of Delta^a x Delta^b number C(a + b, a)
    P = product(standard_simplex(a), standard_simplex(b))[0]
    assert counts(P)[-1] == comb(a + b, a)
    assert len(P.simplices(2)) == len(standard_simplex(a).simplices(2)) * len(standard_simplex(b).simplices(2))


def test_pullback_of_identities():
    D1 = standard_simplex(1)
    P = pullback(identity_map(D1), identity_map(D1))[0]
    assert is_isomorphic(P, D1)


def test_opposite():
    L0 = horn(2, 0)[0]
    assert is_isomorphic(opposite(opposite(L0)), L0)
    assert is_isomorphic(opposite(L0), horn(2, 2)[0])


@pytest.mark.parametrize("n", [2, 3])
def test_opposite_exchanges_horns(n):
    for k in range(n + 1):
        assert is_isomorphic(opposite(horn(n, k)[0]), horn(n, n - k)[0])


def test_join_examples():
    D0, D1 = standard_simplex(0), standard_simplex(1)
    assert is_isomorphic(join(D1, D0)[0], standard_simplex(2))
    J = join(D0, boundary(1)[0])[0]
    assert counts(J) == (3, 2)
    assert is_isomorphic(J, horn(2, 0)[0])
    assert is_isomorphic(join(empty(), D1)[0], D1)


@pytest.mark.parametrize("a,b,c", [(0, 0, 0), (0, 1, 0), (1, 0, 1), (1, 1, 0)])
def test_join_associative_on_simplices(a, b, c):
    J = join(join(standard_simplex(a), standard_simplex(b))[0], standard_simplex(c))[0]
    assert is_isomorphic(J, standard_simplex(a + b + c + 2))


def test_disjoint_union():
    U = disjoint_union(standard_simplex(0), standard_simplex(0))[0]
    assert counts(U) == (2,)


# ---------------------------------------------------------------------------
# subcomplexes and validation


def test_subcomplex_generated():
    D2 = standard_simplex(2)
    X, _ = subcomplex_generated(D2, [(2, 0)])
    assert is_isomorphic(X, D2)
    X, _ = subcomplex_generated(D2, [D2.key_of((0, 1)), D2.key_of((0, 2))])
    assert is_isomorphic(X, horn(2, 0)[0])


def test_validate_simplex():
    assert validate(standard_simplex(3)) == []


def test_validate_all_corpus_complexes():
    for name, X in complexes().items():
        assert validate(X) == [], name


def test_validate_reports_broken_faces():
    X = from_vertex_sets([(0, 1), (1, 2)])
    X._faces[(1, 0)] = (X.vertices()[0], X.vertices()[0], X.vertices()[0])
    assert validate(X)


# ---------------------------------------------------------------------------
# normal forms and simplicial identities


@given(st.integers(0, 3), st.data())
def test_simplicial_identities(n, data):
    X = standard_simplex(3)
    s = data.draw(st.sampled_from(X.simplices(n + 1)))
    m = s.dim
    if m >= 2:
        i = data.draw(st.integers(0, m - 1))
        j = data.draw(st.integers(i + 1, m))
        assert X.face(X.face(s, j), i) == X.face(X.face(s, i), j - 1)
    i = data.draw(st.integers(0, m))
    assert X.face(X.degen(s, i), i) == s
    assert X.face(X.degen(s, i), i + 1) == s


@given(st.integers(0, 3), st.integers(0, 3))
def test_normal_form_word_strictly_decreasing(k, extra):
    X = standard_simplex(3)
    for s in X.simplices(k + extra)[:20]:
        w = op_to_word(tuple(sorted(set(s.op)).index(v) for v in s.op))
        assert list(w) == sorted(w, reverse=True) and len(set(w)) == len(w)
        assert s.base[0] + len(w) == s.dim
        assert (len(w) == 0) == s.nondegenerate


def test_monotone_operator_composition():
    a, b, c = coface(3, 1), codegeneracy(2, 0), coface(2, 2)
    assert compose_ops(compose_ops(a, b), c) == compose_ops(a, compose_ops(b, c))
    assert len(monotone_maps(2, 1)) == 4


def test_map_composition_laws():
    D = {name: N for name, _, N in poset_nerves(3)}
    X = next(iter(D.values()))
    f = identity_map(X)
    for s in X.simplices(2):
        assert f.compose(f)(s) == f(s) == s
