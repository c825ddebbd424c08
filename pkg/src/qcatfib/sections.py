"""Degreewise section spaces.

Given ``pi: R -> T``, ``rho: R -> U`` and ``q: Y -> U``, the complex ``Z`` over
``T`` has as n-simplices the pairs ``(sigma, f)`` with ``sigma`` an n-simplex
of T and ``f: Delta^n x_T R -> Y`` a map with ``q f = rho pr_R``.  Optional
markings restrict ``f``: edges whose Delta^n component is degenerate and whose
R component is marked must go to marked edges of Y.

Relative function complexes, right Kan extension fibrations, the space of
sections functor and the composite of the two-sided constructions are all
instances.
"""

from __future__ import annotations

from .core import (
    FiberedComplex,
    Simplex,
    SimplicialMap,
    SimplicialSet,
    build_degreewise,
    pullback,
    simplex_map,
    standard_simplex,
    std_simplex,
    std_vertices,
)
from .lifting import search


def degenerate_edges(X: SimplicialSet) -> set:
    return {X.constant(v, 1) for v in X.vertices()}


class SectionSpace:
    """Builder for Z; see the module docstring.

    Parameters
    ----------
    pi, rho, q : SimplicialMap
        ``pi: R -> T``, ``rho: R -> U``, ``q: Y -> U``.
    r_marked, y_marked : set of edges, optional
        Markings on R and Y.  When ``r_marked`` is None no constraint applies.
    t_marked : set of edges, optional
        Marking on T, used for the induced marking of Z.
    """

    def __init__(self, pi: SimplicialMap, rho: SimplicialMap, q: SimplicialMap,
                 r_marked=None, y_marked=None, t_marked=None):
        if pi.source is not rho.source:
            raise ValueError("pi and rho need a common source")
        if rho.target is not q.target:
            raise ValueError("rho and q need a common target")
        self.pi, self.rho, self.q = pi, rho, q
        self.R, self.T, self.Y = pi.source, pi.target, q.source
        self.r_marked = r_marked
        self.y_marked = y_marked
        self.t_marked = t_marked
        self._fibers: dict = {}

    def fiber_over(self, sigma: Simplex):
        """(P, pr_Delta, pr_R) for P = Delta^n x_T R."""
        hit = self._fibers.get(sigma)
        if hit is None:
            hit = pullback(simplex_map(self.T, sigma), self.pi)
            self._fibers[sigma] = hit
        return hit

    def _accept(self, P):
        if self.r_marked is None:
            return None
        rm, ym = self.r_marked, self.y_marked

        def ok(key, c):
            if key[0] != 1:
                return True
            t, r = P.labels[key]
            if t.nondegenerate or r not in rm:
                return True
            return ym is None or c in ym

        return ok

    def maps_over(self, sigma: Simplex) -> list[tuple]:
        """All admissible f over sigma, as image tuples indexed by P.keys()."""
        P, _, _ = self.fiber_over(sigma)
        keys = P.keys()
        rho = self.rho
        target = {k: rho(P.labels[k][1]) for k in keys}
        out = []
        for m in search(P, self.Y, over=(self.q, target.__getitem__), accept=self._accept(P)):
            out.append(tuple(m[k] for k in keys))
        return out

    def act(self, raw, theta):
        sigma, imgs = raw
        n = sigma.dim
        P, _, _ = self.fiber_over(sigma)
        sigma2 = self.T.act(sigma, theta)
        P2, _, _ = self.fiber_over(sigma2)
        m = len(theta) - 1
        f = dict(zip(P.keys(), imgs))
        out = []
        for k in P2.keys():
            t, r = P2.labels[k]
            t_up = std_simplex(n, [theta[v] for v in std_vertices(m, t)])
            s = P.normal((t_up, r))
            base = f[s.base]
            out.append(Simplex(base.base, tuple(base.op[j] for j in s.op)))
        return sigma2, tuple(out)

    def build(self, top: int, name=None) -> FiberedComplex:
        T = self.T
        Z = build_degreewise(
            top,
            lambda n: [(s, f) for s in T.simplices(n) for f in self.maps_over(s)],
            self.act, exact=False, name=name)
        proj = SimplicialMap(Z, T, {k: Z.labels[k][0] for k in Z.keys()})
        fc = FiberedComplex(proj, builder=self)
        if self.t_marked is not None:
            fc.marked = self.induced_marking(Z)
        return fc

    def induced_marking(self, Z: SimplicialSet) -> set:
        """Edges (eta, f) with eta marked and f carrying marked R-edges to marked Y-edges."""
        marked = degenerate_edges(Z)
        for k in Z.keys(1):
            eta, imgs = Z.labels[k]
            if eta not in self.t_marked:
                continue
            P, _, _ = self.fiber_over(eta)
            f = SimplicialMap(P, self.Y, dict(zip(P.keys(), imgs)))
            good = all(self._y_ok(f(e)) for e in P.simplices(1)
                       if self.r_marked is None or _r_part(P, e) in self.r_marked)
            if good:
                marked.add(Z.point(k))
        return marked

    def _y_ok(self, e: Simplex) -> bool:
        return self.y_marked is None or e in self.y_marked


def _r_part(P: SimplicialSet, e: Simplex) -> Simplex:
    t, r = P.labels[e.base]
    return Simplex(r.base, tuple(r.op[j] for j in e.op))
