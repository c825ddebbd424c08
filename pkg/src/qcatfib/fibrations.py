"""Fibration classifiers: left, right, Kan, inner, iso, (co)cartesian, trivial.

All verdicts are bounded: horn (or boundary) inclusions are checked up to the
verdict's ``bound``.  Cartesian notions are computed as cocartesian notions of
the opposite map.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .category import FiniteCategory
from .core import (
    Simplex,
    SimplicialMap,
    SimplicialSet,
    _subcomplex,
    base_change,
    fiber,
    op_simplex,
    opposite,
    opposite_map,
    simplex_map,
    standard_simplex,
    terminal_map,
)
from .lifting import (
    FAILS,
    HOLDS,
    UNKNOWN,
    LiftingProblem,
    Verdict,
    _Cell,
    effective_bound,
    has_rlp,
    solve_cell,
)

KINDS = ("left", "right", "kan", "inner")


class NotAQuasicategory(ValueError):
    pass


class InconsistentComposition(RuntimeError):
    pass


def _cache(obj, name) -> dict:
    c = obj.__dict__.get(name)
    if c is None:
        c = {}
        obj.__dict__[name] = c
    return c


def check_fibration(p: SimplicialMap, kind: str, dim_bound: int | None = None) -> Verdict:
    """Lifting check against the horn family of ``kind``."""
    kind = kind.lower()
    if kind not in KINDS:
        raise ValueError(f"unknown fibration kind {kind!r}")
    if dim_bound is None:
        dim_bound = max(p.source.dim, p.target.dim) + 2
    cache = _cache(p, "_rlp_cache")
    ck = (kind, dim_bound)
    if ck not in cache:
        cache[ck] = has_rlp(p, kind, dim_bound)
    return cache[ck]


def is_quasicategory(X: SimplicialSet, dim_bound: int = 3) -> Verdict:
    return check_fibration(_to_point(X), "inner", dim_bound)


def _to_point(X: SimplicialSet) -> SimplicialMap:
    t = X.__dict__.get("_to_point")
    if t is None:
        t = terminal_map(X)
        X._to_point = t
    return t


def _opposite_map(p: SimplicialMap) -> SimplicialMap:
    q = p.__dict__.get("_op")
    if q is None:
        q = opposite_map(p)
        p._op = q
        q._op = p
    return q


def is_trivial_fibration(p: SimplicialMap, dim_bound: int | None = None) -> Verdict:
    """Right lifting against every boundary inclusion up to the bound."""
    if dim_bound is None:
        dim_bound = max(p.source.dim, p.target.dim) + 2
    return has_rlp(p, "boundary", dim_bound)


# ---------------------------------------------------------------------------
# homotopy category and equivalences


@dataclass
class HomotopyCategory:
    category: FiniteCategory
    edge_class: dict  # 1-simplex of X -> morphism name

    def is_iso(self, e: Simplex) -> bool:
        return self.category.is_iso(self.edge_class[e])


def homotopy_category(X: SimplicialSet, dim_bound: int = 3) -> HomotopyCategory:
    """The homotopy category of a quasicategory.

    Morphisms are edges up to the relation witnessed by 2-simplices
    ``(f, g, s_0 y)``; composites are read off from 2-simplices.
    """
    hit = X.__dict__.get("_hcat")
    if hit is not None:
        return hit
    if not is_quasicategory(X, min(max(dim_bound, 3), effective_bound(max(dim_bound, 3), X))):
        raise NotAQuasicategory("homotopy category needs inner horn fillers")
    edges = X.simplices(1)
    parent = {e: e for e in edges}

    def find(e):
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            lo, hi = sorted((ra, rb))
            parent[hi] = lo

    tris = X.simplices(2)
    for s in tris:
        d0, d1, d2 = X.all_faces(s)
        if not d0.nondegenerate and d0.base[0] == 0:
            union(d2, d1)
    cls = {e: find(e) for e in edges}
    comp = {}
    for s in tris:
        d0, d1, d2 = X.all_faces(s)
        key = (cls[d0], cls[d2])
        val = cls[d1]
        if comp.setdefault(key, val) != val:
            raise InconsistentComposition(f"two composites for {key}")
    objects = [v.base for v in X.vertices()]
    morphisms = {r: (X.vertex(r, 0).base, X.vertex(r, 1).base) for r in set(cls.values())}
    ids = {v.base: cls[X.constant(v, 1)] for v in X.vertices()}
    C = FiniteCategory(objects, morphisms, ids, comp, name="h", check=False)
    bad = C.violations()
    if bad:
        raise InconsistentComposition(bad[0])
    H = HomotopyCategory(C, cls)
    X._hcat = H
    return H


def is_equivalence_edge(X: SimplicialSet, e: Simplex, dim_bound: int = 3) -> bool:
    if e.dim != 1:
        raise ValueError("not an edge")
    return homotopy_category(X, dim_bound).is_iso(e)


def equivalence_edges(X: SimplicialSet, dim_bound: int = 3) -> set:
    H = homotopy_category(X, dim_bound)
    return {e for e in X.simplices(1) if H.is_iso(e)}


def core(X: SimplicialSet, dim_bound: int = 3):
    """Largest sub-Kan complex: simplices all of whose edges are equivalences."""
    eq = equivalence_edges(X, dim_bound)
    keep = set()
    for key in X.keys():
        s = X.point(key)
        n = key[0]
        if all(X.act(s, (i, j)) in eq for i in range(n + 1) for j in range(i + 1, n + 1)):
            keep.add(key)
    return _subcomplex(X, keep, name=f"core({X.name})" if X.name else None)


@dataclass
class NoEquivalenceLift:
    """An object x and a base equivalence out of p(x) with no equivalence lift."""

    projection: SimplicialMap
    vertex: Simplex
    base_edge: Simplex
    bound: int = 3

    def replay(self) -> bool:
        p = self.projection
        X, S = p.source, p.target
        if not is_equivalence_edge(S, self.base_edge, self.bound):
            return False
        return not any(X.vertex(e, 0) == self.vertex and p(e) == self.base_edge
                       and is_equivalence_edge(X, e, self.bound) for e in X.simplices(1))


def is_isofibration(p: SimplicialMap, dim_bound: int | None = None) -> Verdict:
    """Inner fibration into a quasicategory that lifts equivalences."""
    X, S = p.source, p.target
    if dim_bound is None:
        dim_bound = max(X.dim, S.dim) + 2
    inner = check_fibration(p, "inner", dim_bound)
    if not inner:
        return inner
    base = is_quasicategory(S, dim_bound)
    if not base:
        return Verdict(UNKNOWN, inner.bound, inner.squares, reason="base is not a quasicategory")
    eqS = equivalence_edges(S, dim_bound)
    eqX = equivalence_edges(X, dim_bound)
    out = _out_edges(X)
    for x in X.vertices():
        for f in S.simplices(1):
            if f not in eqS or S.vertex(f, 0) != p(x):
                continue
            if not any(p(e) == f and e in eqX for e in out.get(x, ())):
                return Verdict(FAILS, inner.bound, inner.squares,
                               witness=NoEquivalenceLift(p, x, f, dim_bound),
                               reason="equivalence without lift")
    return Verdict(HOLDS, inner.bound, inner.squares)


def _out_edges(X: SimplicialSet) -> dict:
    hit = X.__dict__.get("_out_edges")
    if hit is None:
        hit = {}
        for e in X.simplices(1):
            hit.setdefault(X.vertex(e, 0), []).append(e)
        X._out_edges = hit
    return hit


# ---------------------------------------------------------------------------
# initial objects


@dataclass
class CompositeWitness:
    """A family of witnesses that must all still fail."""

    parts: list = field(default_factory=list)
    label: str = ""

    def replay(self) -> bool:
        return bool(self.parts) and all(w.replay() for w in self.parts)


def is_initial(X: SimplicialSet, x: Simplex, dim_bound: int = 3) -> Verdict:
    """Every boundary sphere starting at x fills, for 1 <= n <= bound."""
    p = _to_point(X)
    S = p.target
    bound = effective_bound(dim_bound, X)
    squares = 0
    for n in range(1, bound + 1):
        cell = _Cell("boundary", n)
        sigma = S.constant(S.vertices()[0], n)
        fixed = {cell.B.key_of((0,)): x}
        for top, lift in solve_cell(cell, X, S, p, sigma, fixed=fixed):
            squares += 1
            if lift is None:
                return Verdict(FAILS, bound, squares, witness=cell.problem(X, S, p, sigma, top),
                               reason=f"boundary of Delta^{n} at the vertex does not fill")
    return Verdict(HOLDS, bound, squares)


def is_terminal(X: SimplicialSet, x: Simplex, dim_bound: int = 3) -> Verdict:
    return is_initial(opposite(X), x, dim_bound)


def is_corepresentable(p: SimplicialMap, dim_bound: int = 3) -> Verdict:
    """A left fibration whose total space has an initial object."""
    left = check_fibration(p, "left", dim_bound)
    if not left:
        return left
    parts, squares = [], 0
    for x in p.source.vertices():
        v = is_initial(p.source, x, dim_bound)
        squares += v.squares
        if v:
            return Verdict(HOLDS, v.bound, squares, detail={"initial": x})
        parts.append(v.witness)
    return Verdict(FAILS, effective_bound(dim_bound, p.source), squares,
                   witness=CompositeWitness(parts, "no initial vertex"), reason="no initial object")


# ---------------------------------------------------------------------------
# cocartesian edges and fibrations


def _edge_fixed(cell: _Cell, X: SimplicialSet, f: Simplex) -> dict:
    B = cell.B
    return {B.key_of((0,)): X.vertex(f, 0), B.key_of((1,)): X.vertex(f, 1), B.key_of((0, 1)): f}


def cocartesian_edge_witness(p: SimplicialMap, f: Simplex, dim_bound: int = 3):
    """(squares, failing LiftingProblem or None) for the Lambda^n_0 test of f."""
    X, S = p.source, p.target
    bound = effective_bound(dim_bound, X, S)
    pf = p(f)
    squares = 0
    for n in range(2, bound + 1):
        cell = _Cell("horn", n, 0)
        fixed = _edge_fixed(cell, X, f)
        for sigma in S.simplices(n):
            if S.act(sigma, (0, 1)) != pf:
                continue
            for top, lift in solve_cell(cell, X, S, p, sigma, fixed=fixed):
                squares += 1
                if lift is None:
                    return squares, cell.problem(X, S, p, sigma, top)
    return squares, None


def is_cocartesian_edge(p: SimplicialMap, f: Simplex, dim_bound: int = 3) -> Verdict:
    if f.dim != 1:
        raise ValueError("not an edge of the source")
    cache = _cache(p, "_cocart_edges")
    ck = (f, dim_bound)
    if ck not in cache:
        bound = effective_bound(dim_bound, p.source, p.target)
        sq, w = cocartesian_edge_witness(p, f, dim_bound)
        if w is None:
            cache[ck] = Verdict(HOLDS, bound, sq)
        else:
            cache[ck] = Verdict(FAILS, bound, sq, witness=w, reason=f"no lift for {w.label}")
    return cache[ck]


def is_cartesian_edge(p: SimplicialMap, f: Simplex, dim_bound: int = 3) -> Verdict:
    return is_cocartesian_edge(_opposite_map(p), op_simplex(f), dim_bound)


@dataclass
class NoCocartesianLift:
    """A base edge and a vertex over its source with no cocartesian lift.

    ``candidates`` pairs every edge over the base edge starting at the vertex
    with a lifting problem showing it is not cocartesian.
    """

    projection: SimplicialMap
    base_edge: Simplex
    vertex: Simplex
    candidates: list

    def replay(self) -> bool:
        p = self.projection
        X = p.source
        lifts = [e for e in X.simplices(1) if X.vertex(e, 0) == self.vertex and p(e) == self.base_edge]
        listed = {e for e, _ in self.candidates}
        if set(lifts) != listed:
            return False
        for e, prob in self.candidates:
            if _first_edge_image(prob) != e or not prob.replay():
                return False
        return True


def _first_edge_image(prob) -> Simplex | None:
    """Image under the top map of the horn edge going to {0, 1} of the simplex."""
    A, B = prob.inclusion.source, prob.inclusion.target
    for a in A.keys(1):
        b = prob.inclusion.on_key(a)
        if b.nondegenerate and tuple(f.base for f in B.faces_of(b.base)) == ((0, 1), (0, 0)):
            return prob.top.on_key(a)
    return None


def cocartesian_lifts(p: SimplicialMap, eta: Simplex, x: Simplex, dim_bound: int = 3):
    """(first cocartesian lift or None, list of (candidate, verdict))."""
    X = p.source
    tried = []
    for e in _out_edges(X).get(x, ()):
        if p(e) != eta:
            continue
        v = is_cocartesian_edge(p, e, dim_bound)
        tried.append((e, v))
        if v:
            return e, tried
    return None, tried


def is_cocartesian_fibration(p: SimplicialMap, dim_bound: int | None = None) -> Verdict:
    """Inner fibration where every base edge and source lift admit a cocartesian lift."""
    X, S = p.source, p.target
    if dim_bound is None:
        dim_bound = max(X.dim, S.dim) + 2
    inner = check_fibration(p, "inner", dim_bound)
    if not inner:
        return inner
    squares = inner.squares
    for eta in S.simplices(1):
        s = S.vertex(eta, 0)
        for x in X.vertices():
            if p(x) != s:
                continue
            e, tried = cocartesian_lifts(p, eta, x, dim_bound)
            squares += sum(v.squares for _, v in tried)
            if e is None:
                w = NoCocartesianLift(p, eta, x, [(c, v.witness) for c, v in tried])
                return Verdict(FAILS, inner.bound, squares, witness=w,
                               reason="edge without cocartesian lift")
    return Verdict(HOLDS, inner.bound, squares)


def is_cartesian_fibration(p: SimplicialMap, dim_bound: int | None = None) -> Verdict:
    return is_cocartesian_fibration(_opposite_map(p), dim_bound)


def cocartesian_transport(p: SimplicialMap, eta: Simplex, dim_bound: int = 3):
    """Vertex map between fibers along a base edge, with the chosen lifts.

    Returns ``{x: (target vertex, chosen edge)}`` for every x over the source.
    """
    X, S = p.source, p.target
    out = {}
    for x in X.vertices():
        if p(x) != S.vertex(eta, 0):
            continue
        e, _ = cocartesian_lifts(p, eta, x, dim_bound)
        if e is None:
            raise RuntimeError(f"no cocartesian lift of {eta} at {x}")
        out[x] = (X.vertex(e, 1), e)
    return out


def edge_pullback(p: SimplicialMap, eta: Simplex):
    """p_eta: X x_S Delta^1 -> Delta^1, plus the map to X."""
    return simplex_pullback(p, eta)


def simplex_pullback(p: SimplicialMap, sigma: Simplex):
    """p_sigma: X x_S Delta^n -> Delta^n, plus the map to X (cached per simplex)."""
    cache = _cache(p, "_simplex_pullbacks")
    hit = cache.get(sigma)
    if hit is None:
        P, to_k, to_x = base_change(p, simplex_map(p.target, sigma))
        hit = cache[sigma] = (to_k, to_x)
    return hit


def lift_to_pullback(pk: SimplicialMap, to_x: SimplicialMap, e: Simplex, t: Simplex) -> Simplex:
    """The simplex (e, t) of a pullback X x_S K from its two components."""
    P = pk.source
    return P.normal((t, e))


def is_locally_cocartesian_edge(p: SimplicialMap, e: Simplex, dim_bound: int = 3) -> Verdict:
    """e is cocartesian for the pullback of p along its own image."""
    pk, to_x = edge_pullback(p, p(e))
    D1 = pk.target
    return is_cocartesian_edge(pk, lift_to_pullback(pk, to_x, e, D1.named((0, 1))), dim_bound)


def is_locally_cartesian_edge(p: SimplicialMap, e: Simplex, dim_bound: int = 3) -> Verdict:
    pk, to_x = edge_pullback(p, p(e))
    D1 = pk.target
    return is_cartesian_edge(pk, lift_to_pullback(pk, to_x, e, D1.named((0, 1))), dim_bound)


def is_locally_cartesian(p: SimplicialMap, dim_bound: int | None = None) -> Verdict:
    """Cartesian after pulling back along every edge of the base."""
    if dim_bound is None:
        dim_bound = max(p.source.dim, p.target.dim) + 2
    squares, bound = 0, dim_bound
    for eta in p.target.simplices(1):
        pk, _ = edge_pullback(p, eta)
        v = is_cartesian_fibration(pk, dim_bound)
        squares += v.squares
        bound = v.bound
        if not v:
            v.detail = {**v.detail, "base_edge": eta}
            return Verdict(v.status, v.bound, squares, witness=v.witness,
                           reason=f"pullback along {eta}: {v.reason}")
    return Verdict(HOLDS, bound, squares)


def is_locally_cocartesian(p: SimplicialMap, dim_bound: int | None = None) -> Verdict:
    if dim_bound is None:
        dim_bound = max(p.source.dim, p.target.dim) + 2
    squares, bound = 0, dim_bound
    for eta in p.target.simplices(1):
        pk, _ = edge_pullback(p, eta)
        v = is_cocartesian_fibration(pk, dim_bound)
        squares += v.squares
        bound = v.bound
        if not v:
            return Verdict(v.status, v.bound, squares, witness=v.witness,
                           reason=f"pullback along {eta}: {v.reason}")
    return Verdict(HOLDS, bound, squares)


def fibers(p: SimplicialMap) -> dict:
    """Fiber over each vertex of the base (with its inclusion)."""
    return {v: fiber(p, v) for v in p.target.vertices()}


def fibers_are_kan(p: SimplicialMap, dim_bound: int = 3) -> bool:
    return all(check_fibration(terminal_map(F), "kan", dim_bound) for F, _ in fibers(p).values())


def cocartesian_edges(p: SimplicialMap, dim_bound: int = 3) -> set:
    """All p-cocartesian edges of the source, degenerate ones included."""
    return {e for e in p.source.simplices(1) if is_cocartesian_edge(p, e, dim_bound)}


def cartesian_edges(p: SimplicialMap, dim_bound: int = 3) -> set:
    return {e for e in p.source.simplices(1) if is_cartesian_edge(p, e, dim_bound)}
