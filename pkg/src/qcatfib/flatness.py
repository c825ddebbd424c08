"""Flatness of inner fibrations, checked one 2-simplex of the base at a time.

For a nondegenerate 2-simplex sigma of the base, pull p back to Delta^2.  For
each edge e: x -> y over the long edge, the factorization space consists of
the simplices of the pullback that start at x, end at y, have long edge e and
whose interior lies over the middle vertex.  p is flat when every such space
is weakly contractible; degenerate 2-simplices impose nothing.
"""

from __future__ import annotations

from dataclasses import dataclass

from .contractible import (
    CONTRACTIBLE,
    NOT_CONTRACTIBLE,
    Budgets,
    ContractibilityVerdict,
    is_weakly_contractible,
)
from .core import (
    Simplex,
    SimplicialMap,
    SimplicialSet,
    base_change,
    build_degreewise,
    simplex_map,
    std_simplex,
)
from .lifting import FAILS, HOLDS, UNKNOWN, Verdict


def pullback_to_triangle(p: SimplicialMap, sigma: Simplex) -> SimplicialMap:
    """p_sigma: X x_S Delta^2 -> Delta^2."""
    _, to_k, _ = base_change(p, simplex_map(p.target, sigma))
    return to_k


def factorization_space(q: SimplicialMap, e: Simplex, middle: int = 1,
                        dim_bound: int | None = None) -> SimplicialSet:
    """Factorizations of the edge e of a fibration q: X -> Delta^2 through the fiber over ``middle``.

    An n-simplex is an (n+2)-simplex t of X with t|{0} = x, t|{n+2} = y,
    t|{0, n+2} = e and t|{1..n+1} over the middle vertex.
    """
    X = q.source
    if e.dim != 1:
        raise ValueError("not an edge")
    if middle not in (0, 1, 2) or q.target.dim != 2:
        raise ValueError("middle must be a vertex of Delta^2")
    x, y = X.vertex(e, 0), X.vertex(e, 1)
    top = max(X.dim - 2, 0)
    exact = X.exact
    if dim_bound is not None and dim_bound < top:
        top, exact = dim_bound, False
    if not X.exact and X.truncation is not None:
        top = min(top, X.truncation - 2)

    def raws(n):
        want = std_simplex(2, (0,) + (middle,) * (n + 1) + (2,))
        return [t for t in X.simplices(n + 2)
                if q(t) == want and X.act(t, (0, n + 2)) == e]

    def act(t, th):
        n = t.dim - 2
        return X.act(t, (0,) + tuple(v + 1 for v in th) + (n + 2,))

    F = build_degreewise(max(top, 0), raws, act, exact=exact, name="factorizations")
    return F


@dataclass
class NotFlatWitness:
    """A 2-simplex of the base and an edge whose factorization space is not contractible."""

    projection: SimplicialMap
    sigma: Simplex
    edge: Simplex  # edge of the pullback to Delta^2
    verdict: ContractibilityVerdict

    def replay(self) -> bool:
        q = pullback_to_triangle(self.projection, self.sigma)
        F = factorization_space(q, self.edge)
        v = is_weakly_contractible(F)
        return v.status == NOT_CONTRACTIBLE and v.replay()


def is_flat(p: SimplicialMap, dim_bound: int | None = None, budgets: Budgets | None = None,
            check_inner: bool = True) -> Verdict:
    """2-simplex criterion for flatness of an inner fibration."""
    from .fibrations import check_fibration

    S = p.target
    if check_inner:
        inner = check_fibration(p, "inner", dim_bound)
        if not inner:
            return inner
    spaces = 0
    unknown = None
    for sigma in S.nondegenerate(2):
        q = pullback_to_triangle(p, sigma)
        X = q.source
        long_edge = std_simplex(2, (0, 2))
        for e in X.simplices(1):
            if q(e) != long_edge:
                continue
            F = factorization_space(q, e)
            v = is_weakly_contractible(F, budgets)
            spaces += 1
            if v.status == NOT_CONTRACTIBLE:
                return Verdict(FAILS, dim_bound, spaces, witness=NotFlatWitness(p, sigma, e, v),
                               reason=f"factorization space not contractible ({v.evidence['kind']})")
            if v.status != CONTRACTIBLE and unknown is None:
                unknown = (sigma, e, v)
    if unknown is not None:
        return Verdict(UNKNOWN, dim_bound, spaces, reason="contractibility undecided",
                       detail={"sigma": unknown[0], "edge": unknown[1]})
    return Verdict(HOLDS, dim_bound, spaces, detail={"spaces": spaces})
