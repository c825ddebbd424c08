"""Explicit constructions: slices, mapping spaces, twisted arrows, function
complexes, lax pullbacks, relative function complexes and right Kan extension
fibrations.

Degreewise constructions are computed up to a dimension bound.  The result
is flagged exact when no nondegenerate simplex can occur above the bound.
"""

from __future__ import annotations

from .category import CatDiagram, Functor, category_of_elements, grothendieck, nerve, nerve_map
from .core import (
    FiberedComplex,
    Simplex,
    SimplicialMap,
    SimplicialSet,
    build_degreewise,
    fiber,
    identity_op,
    opposite,
    product,
    pullback,
    simplex_map,
    standard_simplex,
    std_simplex,
    std_vertices,
    terminal_map,
)
from .lifting import search
from .sections import SectionSpace

DEFAULT_BOUND = 3


class PreconditionError(ValueError):
    """A construction was asked for on inputs that fail its hypotheses."""


def _bound_for(C: SimplicialSet, dim_bound):
    """(top, exact) for constructions whose dimension is at most dim C."""
    if dim_bound is None:
        dim_bound = max(C.dim, 0)
    if not C.exact and C.truncation is not None:
        return min(dim_bound, C.truncation - 1), False
    return dim_bound, dim_bound >= C.dim


def _check_vertex(C: SimplicialSet, x: Simplex):
    if x.dim != 0 or x.base[0] != 0 or x.base[1] >= (C.counts[0] if C.counts else 0):
        raise ValueError(f"{x!r} is not a vertex")


# ---------------------------------------------------------------------------
# slices


def slice_under(C: SimplicialSet, x: Simplex, dim_bound: int | None = None) -> FiberedComplex:
    """C_{x/} -> C.

    An n-simplex is an (n+1)-simplex of C with initial vertex x, i.e. a map
    Delta^0 * Delta^n -> C; the projection forgets the cone point.
    """
    _check_vertex(C, x)
    top, exact = _bound_for(C, dim_bound)

    def raws(n):
        return [s for s in C.simplices(n + 1) if C.vertex(s, 0) == x]

    def act(s, th):
        return C.act(s, (0,) + tuple(t + 1 for t in th))

    Sl = build_degreewise(top, raws, act, exact=exact, name="slice_under")
    proj = SimplicialMap(Sl, C, {k: C.act(Sl.labels[k], tuple(range(1, k[0] + 2)))
                                 for k in Sl.keys()})
    return FiberedComplex(proj, apex=x)


def slice_over(C: SimplicialSet, x: Simplex, dim_bound: int | None = None) -> FiberedComplex:
    """C_{/x} -> C: (n+1)-simplices with final vertex x."""
    _check_vertex(C, x)
    top, exact = _bound_for(C, dim_bound)

    def raws(n):
        return [s for s in C.simplices(n + 1) if C.vertex(s, n + 1) == x]

    def act(s, th):
        return C.act(s, tuple(th) + (s.dim,))

    Sl = build_degreewise(top, raws, act, exact=exact, name="slice_over")
    proj = SimplicialMap(Sl, C, {k: C.act(Sl.labels[k], tuple(range(k[0] + 1)))
                                 for k in Sl.keys()})
    return FiberedComplex(proj, apex=x)


def hom_left(C: SimplicialSet, x: Simplex, y: Simplex, dim_bound: int | None = None) -> SimplicialSet:
    """Fiber of C_{x/} -> C over y."""
    F, _ = fiber(slice_under(C, x, dim_bound).projection, y)
    return F


def hom_right(C: SimplicialSet, x: Simplex, y: Simplex, dim_bound: int | None = None) -> SimplicialSet:
    """Fiber of C_{/y} -> C over x."""
    F, _ = fiber(slice_over(C, y, dim_bound).projection, x)
    return F


# ---------------------------------------------------------------------------
# twisted arrows


def _twist(theta, n):
    """[2m+1] -> [2n+1] induced by theta^op * theta."""
    m = len(theta) - 1
    return tuple(n - theta[m - j] for j in range(m + 1)) + tuple(n + 1 + t for t in theta)


def twisted_arrow(C: SimplicialSet, dim_bound: int | None = None) -> FiberedComplex:
    """The twisted arrow complex with its map (s, t) to C^op x C.

    An n-simplex is a (2n+1)-simplex of C read as Delta^{n,op} * Delta^n; vertex
    i of Delta^{n,op} sits at position n - i.
    """
    top, exact = _bound_for(C, dim_bound)

    def raws(n):
        return C.simplices(2 * n + 1)

    def act(s, th):
        return C.act(s, _twist(th, (s.dim - 1) // 2))

    Tw = build_degreewise(top, raws, act, exact=exact, name="twisted_arrow")
    Cop = opposite(C)
    P, _, _ = product(Cop, C, top=max(Cop.dim + C.dim, top))
    from .core import op_simplex

    imgs = {}
    for k in Tw.keys():
        s, n = Tw.labels[k], k[0]
        src = op_simplex(C.act(s, tuple(range(n + 1))))
        tgt = C.act(s, tuple(range(n + 1, 2 * n + 2)))
        imgs[k] = P.normal((src, tgt))
    proj = SimplicialMap(Tw, P, imgs)
    return FiberedComplex(proj, opposite=Cop)


# ---------------------------------------------------------------------------
# function complexes


class FunComplex:
    """Degreewise data of Fun(A, B): n-simplices are maps A x Delta^n -> B."""

    def __init__(self, A: SimplicialSet, B: SimplicialSet):
        self.A, self.B = A, B
        self._prods: dict = {}
        self._raws: dict = {}

    def prod(self, n):
        hit = self._prods.get(n)
        if hit is None:
            hit = product(self.A, standard_simplex(n), top=self.A.dim + n)[0]
            self._prods[n] = hit
        return hit

    def raws(self, n):
        hit = self._raws.get(n)
        if hit is None:
            P = self.prod(n)
            keys = P.keys()
            hit = [(n, tuple(m[k] for k in keys)) for m in search(P, self.B)]
            self._raws[n] = hit
        return hit

    def act(self, raw, theta):
        n, imgs = raw
        m = len(theta) - 1
        P, P2 = self.prod(n), self.prod(m)
        f = dict(zip(P.keys(), imgs))
        out = []
        for k in P2.keys():
            a, t = P2.labels[k]
            t_up = std_simplex(n, [theta[v] for v in std_vertices(m, t)])
            s = P.normal((a, t_up))
            b = f[s.base]
            out.append(Simplex(b.base, tuple(b.op[j] for j in s.op)))
        return m, tuple(out)

    def evaluate(self, raw, a: Simplex) -> Simplex:
        """The n-simplex f|{a} x Delta^n of B, for a vertex a of A."""
        n, imgs = raw
        P = self.prod(n)
        s = P.normal((self.A.constant(a, n), Simplex((n, 0), identity_op(n))))
        b = dict(zip(P.keys(), imgs))[s.base]
        return Simplex(b.base, tuple(b.op[j] for j in s.op))


def fun_complex(A: SimplicialSet, B: SimplicialSet, dim_bound: int | None = None,
                cap: int = 6) -> SimplicialSet:
    """Fun(A, B).

    With ``dim_bound=None`` degrees are added until one has no nondegenerate
    simplices or ``cap`` is reached.  When B is vertex-determined so is Fun(A, B),
    and an empty degree then proves exactness.  The result carries ``fun`` (the
    degreewise data) for evaluation maps.
    """
    F = FunComplex(A, B)
    det = B.exact and B.is_vertex_determined()
    if dim_bound is not None:
        X = build_degreewise(dim_bound, F.raws, F.act, name="Fun")
        if det and len(X.counts) <= dim_bound:
            X.exact, X.truncation = True, None
        else:
            X.exact, X.truncation = False, dim_bound
    else:
        for n in range(1, cap + 1):
            X = build_degreewise(n, F.raws, F.act, name="Fun")
            if len(X.counts) <= n:
                break
        if det and len(X.counts) <= n:
            X.exact, X.truncation = True, None
        else:
            X.exact, X.truncation = False, n
    X.fun = F
    return X


def evaluation(X: SimplicialSet, a: Simplex) -> SimplicialMap:
    """ev_a: Fun(A, B) -> B."""
    F = X.fun
    return SimplicialMap(X, F.B, {k: F.evaluate(X.labels[k], a) for k in X.keys()})


def arrow_category(C: SimplicialSet, dim_bound: int | None = None):
    """O(C) = Fun(Delta^1, C) with s = ev_0 and t = ev_1."""
    D1 = standard_simplex(1)
    O = fun_complex(D1, C, dim_bound)
    v0, v1 = D1.vertices()
    return O, evaluation(O, v0), evaluation(O, v1)


# ---------------------------------------------------------------------------
# Grothendieck constructions


def grothendieck_fibration(D: CatDiagram, dim_bound: int = 3):
    """Nerve of the Grothendieck construction with its projection to the nerve of the index."""
    G, proj = grothendieck(D)
    NG, NC = nerve(G, dim_bound), nerve(D.index, dim_bound)
    return FiberedComplex(nerve_map(proj, NG, NC), category=G, functor=proj)


def elements_fibration(index, sets, functions, dim_bound: int = 3):
    G, proj = category_of_elements(index, sets, functions)
    NG, NC = nerve(G, dim_bound), nerve(index, dim_bound)
    return FiberedComplex(nerve_map(proj, NG, NC), category=G, functor=proj)


# ---------------------------------------------------------------------------
# lax pullbacks


def lax_pullback(f: SimplicialMap, g: SimplicialMap, dim_bound: int | None = None,
                 arrows=None) -> FiberedComplex:
    """M |_S N = M x_S O(S) x_S N with projections to M and N.

    The result's projection goes to M x N; ``info`` carries ``to_m``, ``to_n``
    and ``to_o``.  ``arrows`` may pass a precomputed ``arrow_category(S)``.
    """
    if f.target is not g.target:
        raise ValueError("lax pullback needs a common codomain")
    S = f.target
    O, s, t = arrows if arrows is not None else arrow_category(S, dim_bound)
    top = None
    if dim_bound is not None:
        top = dim_bound
    P1, to_m, to_o1 = pullback(f, s, top=top)
    t1 = t.compose(to_o1)
    L, to_p1, to_n = pullback(t1, g, top=top)
    to_m = to_m.compose(to_p1)
    to_o = to_o1.compose(to_p1)
    Pmn, pm, pn = product(f.source, g.source)
    proj = SimplicialMap(L, Pmn, {k: Pmn.normal((to_m.on_key(k), to_n.on_key(k))) for k in L.keys()})
    return FiberedComplex(proj, to_m=to_m, to_n=to_n, to_o=to_o, arrows=(O, s, t), p1=P1)


# ---------------------------------------------------------------------------
# relative function complexes and right Kan extension fibrations


def relative_fun(p: SimplicialMap, q: SimplicialMap, dim_bound: int = DEFAULT_BOUND,
                 check: bool = True) -> FiberedComplex:
    """Fun~_S(X, Y) -> S for p: X -> S cartesian and q: Y -> S cocartesian.

    An n-simplex over sigma is a map Delta^n x_S X -> Y over S.
    """
    from .fibrations import is_cartesian_fibration, is_cocartesian_fibration

    if p.target is not q.target:
        raise ValueError("relative_fun needs a common base")
    if check:
        vp = is_cartesian_fibration(p, dim_bound)
        vq = is_cocartesian_fibration(q, dim_bound)
        if not vp:
            raise PreconditionError(f"p is not cartesian: {vp!r}")
        if not vq:
            raise PreconditionError(f"q is not cocartesian: {vq!r}")
    builder = SectionSpace(p, p, q)
    return builder.build(dim_bound, name="Fun~")


def right_kan_fibration(phi: SimplicialMap, p: SimplicialMap, dim_bound: int = DEFAULT_BOUND,
                        check: bool = True) -> FiberedComplex:
    """Y -> B with n-simplices over sigma the maps Delta^n |_B A -> X over A.

    Edges of Delta^n |_B A whose Delta^n component is degenerate must go to
    p-cocartesian edges.
    """
    from .fibrations import cocartesian_edges, is_cocartesian_fibration

    if p.target is not phi.source:
        raise ValueError("p must live over the source of phi")
    if check:
        v = is_cocartesian_fibration(p, dim_bound)
        if not v:
            raise PreconditionError(f"p is not cocartesian: {v!r}")
    A, B, X = phi.source, phi.target, p.source
    arrows = arrow_category(B)
    cocart = cocartesian_edges(p, dim_bound)
    cache: dict = {}

    def lax(sigma):
        hit = cache.get(sigma)
        if hit is None:
            hit = lax_pullback(simplex_map(B, sigma), phi, arrows=arrows)
            cache[sigma] = hit
        return hit

    def raws(n):
        out = []
        for sigma in B.simplices(n):
            L = lax(sigma)
            to_d, to_a = L.info["to_m"], L.info["to_n"]
            Lx = L.total
            keys = Lx.keys()
            target = {k: to_a.on_key(k) for k in keys}

            def ok(key, c, to_d=to_d):
                if key[0] != 1 or to_d.on_key(key).nondegenerate:
                    return True
                return c in cocart

            for m in search(Lx, X, over=(p, target.__getitem__), accept=ok):
                out.append((sigma, tuple(m[k] for k in keys)))
        return out

    def act(raw, theta):
        sigma, imgs = raw
        n, m = sigma.dim, len(theta) - 1
        L = lax(sigma)
        sigma2 = B.act(sigma, theta)
        L2 = lax(sigma2)
        f = dict(zip(L.total.keys(), imgs))
        d2, a2, o2 = L2.info["to_m"], L2.info["to_n"], L2.info["to_o"]
        Lx = L.total
        out = []
        for k in L2.total.keys():
            t = d2.on_key(k)
            t_up = std_simplex(n, [theta[v] for v in std_vertices(m, t)])
            s = _lax_normal(L, t_up, o2.on_key(k), a2.on_key(k))
            b = f[s.base]
            out.append(Simplex(b.base, tuple(b.op[j] for j in s.op)))
        return sigma2, tuple(out)

    Y = build_degreewise(dim_bound, raws, act, exact=False, name="RKan")
    q = SimplicialMap(Y, B, {k: Y.labels[k][0] for k in Y.keys()})
    return FiberedComplex(q, phi=phi, p=p, lax=lax)


def _lax_normal(L: FiberedComplex, t: Simplex, o: Simplex, a: Simplex) -> Simplex:
    """Normal form in a lax pullback from its three components."""
    P1 = L.info["p1"]
    return L.total.normal((P1.normal((t, o)), a))
