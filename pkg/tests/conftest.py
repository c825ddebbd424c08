import itertools
import random
from functools import lru_cache

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from qcatfib.category import poset_from_relation
from qcatfib.core import identity_map, product
from qcatfib.corpus import simplex, std_face, std_operator, to_point, vertex_inclusion
from qcatfib.patterns import MarkedMap, MarkedSimplicialSet, Span

settings.register_profile("qcatfib", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qcatfib")


def transitive_closure(rel):
    rel = set(rel)
    while True:
        extra = {(a, d) for a, b in rel for c, d in rel if b == c} - rel
        if not extra:
            return rel
        rel |= extra


@st.composite
def small_posets(draw, max_size=4):
    """Posets on {0..n-1} compatible with the usual order (a linear extension)."""
    n = draw(st.integers(1, max_size))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    strict = transitive_closure(chosen)
    return n, frozenset(strict)


def poset_cat(n, strict, name=None):
    return poset_from_relation(list(range(n)), strict, name=name)


def leq(strict):
    return lambda a, b: a == b or (a, b) in strict


def monotone_count(n, s1, m, s2):
    """Brute-force count of order-preserving maps between two finite posets."""
    le1, le2 = leq(s1), leq(s2)
    total = 0
    for f in itertools.product(range(m), repeat=n):
        if all(le2(f[a], f[b]) for a in range(n) for b in range(n) if le1(a, b)):
            total += 1
    return total


@pytest.fixture(scope="session")
def corpus_maps():
    from qcatfib.corpus import maps

    return maps()


# ---------------------------------------------------------------------------
# random marked instances over small simplices


def map_pool():
    """Small maps between Delta^0, Delta^1, Delta^2 and the square."""
    D0, D1, D2 = simplex(0), simplex(1), simplex(2)
    P, p1, p2 = _square()
    return [identity_map(D0), identity_map(D1), identity_map(D2), identity_map(P),
            to_point(D1), to_point(D2), vertex_inclusion(D1, D1.vertices()[0]),
            vertex_inclusion(D1, D1.vertices()[1]), std_face(2, (0, 1)), std_face(2, (1, 2)),
            std_face(2, (0, 2)), std_operator(1, (0, 0, 1)), std_operator(1, (0, 1, 1)), p1, p2]


@lru_cache(maxsize=None)
def _square():
    return product(simplex(1), simplex(1))


def maps_into(T):
    return [m for m in map_pool() if m.target is T]


def maps_out_of(S):
    return [m for m in map_pool() if m.source is S]


def random_marking(X, rng, p=0.6):
    return {e for e in X.simplices(1) if rng.random() < p}


def random_marked_over(f, target_marked, rng, p=0.7):
    """f with a random source marking compatible with the target marking."""
    E = {e for e in f.source.simplices(1) if f(e) in target_marked and rng.random() < p}
    return MarkedMap(f, MarkedSimplicialSet(f.source, E), MarkedSimplicialSet(f.target, target_marked))


def adjunction_instance(seed):
    """(pi, A over S, B over T, C over S) for pi: S -> T with random markings."""
    rng = random.Random(seed)
    f = rng.choice(map_pool())
    S, T = f.source, f.target
    M = random_marking(S, rng)
    N = {f(e) for e in M} | random_marking(T, rng)
    pi = MarkedMap(f, MarkedSimplicialSet(S, M), MarkedSimplicialSet(T, N))
    A = random_marked_over(rng.choice(maps_into(S)), pi.source.marked, rng)
    B = random_marked_over(rng.choice(maps_into(T)), pi.target.marked, rng)
    C = random_marked_over(rng.choice(maps_into(S)), pi.source.marked, rng)
    return pi, A, B, C


def span_pair_instance(seed):
    """Two composable marked spans C0 <- D0 -> C1 <- D1 -> C2 and W over D1."""
    rng = random.Random(seed)
    C1 = rng.choice([simplex(0), simplex(1), simplex(2)])
    MC1 = random_marking(C1, rng)
    rho0 = random_marked_over(rng.choice(maps_into(C1)), MC1, rng)
    f0 = rng.choice(maps_out_of(rho0.map.source))
    pi0 = MarkedMap(f0, rho0.source, MarkedSimplicialSet.sharp(f0.target))
    pi1 = random_marked_over(rng.choice(maps_into(C1)), MC1, rng)
    g1 = rng.choice(maps_out_of(pi1.map.source))
    rho1 = MarkedMap(g1, pi1.source, MarkedSimplicialSet.sharp(g1.target))
    W = random_marked_over(rng.choice(maps_into(pi1.map.source)), pi1.source.marked, rng)
    return Span(pi0, rho0), Span(pi1, rho1), W
