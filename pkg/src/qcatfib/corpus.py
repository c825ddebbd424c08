"""Fixture corpus: small complexes, maps, functors and spans used by the tests and the CLI.

Everything is built on demand and cached, so repeated calls return the same
objects (maps that should share a base really do share it).
"""

from __future__ import annotations

from functools import lru_cache

from .category import (
    CatDiagram,
    FiniteCategory,
    Functor,
    discrete_category,
    grid_poset,
    grothendieck,
    identity_functor,
    linear_order,
    monoid_category,
    nerve,
    nerve_map,
    poset_category,
    poset_from_relation,
    posets_up_to_iso,
    set_diagram,
)
from .constructions import arrow_category, slice_over, slice_under, twisted_arrow
from .core import (
    SimplicialMap,
    SimplicialSet,
    boundary,
    from_vertex_sets,
    horn,
    identity_map,
    product,
    simplex_map,
    standard_simplex,
)


@lru_cache(maxsize=None)
def simplex(n: int) -> SimplicialSet:
    return standard_simplex(n)


def point() -> SimplicialSet:
    return simplex(0)


def to_point(X: SimplicialSet) -> SimplicialMap:
    """The unique map to the shared Delta^0."""
    pt = point()
    v = pt.vertices()[0]
    return SimplicialMap(X, pt, {k: pt.constant(v, k[0]) for k in X.keys()})


def vertex_inclusion(X: SimplicialSet, v) -> SimplicialMap:
    pt = point()
    return SimplicialMap(pt, X, {(0, 0): v})


def std_face(n: int, verts) -> SimplicialMap:
    """Delta^k -> Delta^n onto the face with the given vertices."""
    D = simplex(n)
    return simplex_map(D, D.named(tuple(verts)))


def std_operator(n: int, theta) -> SimplicialMap:
    """Delta^m -> Delta^n induced by a monotone map given as its vertex images."""
    D = simplex(n)
    return simplex_map(D, D.act(D.point((n, 0)), tuple(theta)))


# ---------------------------------------------------------------------------
# categories and functors


def poset_functor(E: FiniteCategory, B: FiniteCategory, on_objects: dict, name=None) -> Functor:
    """Functor between poset categories determined by an order-preserving map."""
    f = dict(on_objects)
    return Functor(E, B, f, {(a, b): (f[a], f[b]) for (a, b) in E.morphisms})


@lru_cache(maxsize=None)
def posets(max_size: int = 4) -> tuple:
    """(name, category) for every poset on 1..max_size elements up to isomorphism."""
    out = []
    for n in range(1, max_size + 1):
        for i, (els, rel) in enumerate(posets_up_to_iso(n)):
            out.append((f"poset{n}_{i}", poset_from_relation(els, rel, name=f"poset{n}_{i}")))
    return tuple(out)


@lru_cache(maxsize=None)
def poset_nerves(max_size: int = 4) -> tuple:
    return tuple((name, C, nerve(C, 4)) for name, C in posets(max_size))


@lru_cache(maxsize=None)
def chain(n: int) -> FiniteCategory:
    return linear_order(n)


def _walking_iso() -> FiniteCategory:
    mors = {"1a": ("a", "a"), "1b": ("b", "b"), "f": ("a", "b"), "g": ("b", "a")}
    comp = {("1a", "1a"): "1a", ("1b", "1b"): "1b", ("f", "1a"): "f", ("1b", "f"): "f",
            ("g", "1b"): "g", ("1a", "g"): "g", ("g", "f"): "1a", ("f", "g"): "1b"}
    return FiniteCategory(["a", "b"], mors, {"a": "1a", "b": "1b"}, comp, name="iso")


def _z2() -> FiniteCategory:
    return monoid_category(["e", "t"], lambda g, f: "e" if g == f else "t", "e", name="Z/2")


def _const_functor(C: FiniteCategory, D: FiniteCategory, d) -> Functor:
    return Functor(C, D, {o: d for o in C.objects}, {m: D.identities[d] for m in C.morphisms})


def _diagram_1(F0: FiniteCategory, F1: FiniteCategory, T: Functor) -> CatDiagram:
    I = chain(1)
    return CatDiagram(I, {0: F0, 1: F1},
                      {(0, 0): identity_functor(F0), (1, 1): identity_functor(F1), (0, 1): T})


def _diagram_2(F0, F1, F2, T01: Functor, T12: Functor) -> CatDiagram:
    I = chain(2)
    return CatDiagram(I, {0: F0, 1: F1, 2: F2},
                      {(0, 0): identity_functor(F0), (1, 1): identity_functor(F1),
                       (2, 2): identity_functor(F2), (0, 1): T01, (1, 2): T12,
                       (0, 2): T12.compose(T01)})


@lru_cache(maxsize=None)
def grothendieck_corpus() -> tuple:
    """(name, functor p: E -> [1] or [2]) with opfibrations and non-opfibrations."""
    out = []
    I1, I2 = chain(1), chain(2)
    pt, c1 = linear_order(0), linear_order(1)

    def groth(name, D):
        G, proj = grothendieck(D)
        out.append((name, proj))

    groth("sets_2to1", set_diagram(I1, {0: ["x", "y"], 1: ["z"]}, {(0, 1): {"x": "z", "y": "z"}}))
    groth("sets_1to2", set_diagram(I1, {0: ["x"], 1: ["y", "z"]}, {(0, 1): {"x": "y"}}))
    groth("sets_chain", set_diagram(I2, {0: ["a", "b"], 1: ["c", "d"], 2: ["e"]},
                                    {(0, 1): {"a": "c", "b": "d"}, (1, 2): {"c": "e", "d": "e"},
                                     (0, 2): {"a": "e", "b": "e"}}))
    groth("collapse_arrow", _diagram_1(c1, pt, _const_functor(c1, pt, 0)))
    groth("include_source", _diagram_1(pt, c1, Functor(pt, c1, {0: 0}, {(0, 0): (0, 0)})))
    groth("identity_arrow", _diagram_1(c1, c1, identity_functor(c1)))
    groth("point_arrow_arrow", _diagram_2(pt, c1, c1, Functor(pt, c1, {0: 1}, {(0, 0): (1, 1)}),
                                          identity_functor(c1)))
    Z = _z2()
    groth("group_to_point", _diagram_1(Z, terminal_like(), _const_functor(Z, terminal_like(), "*")))

    G = grid_poset()
    out.append(("grid_projection", poset_functor(G, I1, {o: o[1] for o in G.objects})))
    out.append(("identity_chain2", identity_functor(I2)))

    # non-opfibrations
    out.append(("endpoints", poset_functor(c1, I2, {0: 0, 1: 2})))
    span = poset_from_relation(["a", "b", "c"], {("a", "b"), ("a", "c")}, name="span")
    out.append(("span_over_arrow", poset_functor(span, I1, {"a": 0, "b": 1, "c": 1})))
    out.append(("span_over_chain", poset_functor(span, I2, {"a": 0, "b": 1, "c": 2})))
    loose = poset_from_relation(["a", "b", "c"], {("a", "c")}, name="loose")
    out.append(("missing_lift", poset_functor(loose, I1, {"a": 0, "b": 0, "c": 1})))
    out.append(("grid_sum", poset_functor(G, I2, {o: o[0] + o[1] for o in G.objects})))
    return tuple(out)


@lru_cache(maxsize=None)
def terminal_like() -> FiniteCategory:
    from .category import terminal_category

    return terminal_category()


@lru_cache(maxsize=None)
def grothendieck_nerve_maps(dim_bound: int = 3) -> tuple:
    """(name, functor, nerve map) for the Grothendieck corpus."""
    out = []
    nerves: dict = {}
    for name, p in grothendieck_corpus():
        for C in (p.source, p.target):
            if id(C) not in nerves:
                nerves[id(C)] = nerve(C, dim_bound)
        out.append((name, p, nerve_map(p, nerves[id(p.source)], nerves[id(p.target)])))
    return tuple(out)


# ---------------------------------------------------------------------------
# named complexes and maps


@lru_cache(maxsize=None)
def flatness_counterexample() -> SimplicialMap:
    """Delta^{02} plus an isolated vertex over 1, included in Delta^2: inner but not flat."""
    X = from_vertex_sets([(0, 2), (1,)], name="missing_filler")
    D2 = simplex(2)
    return SimplicialMap(X, D2, {k: D2.named(X.labels[k]) for k in X.keys()})


@lru_cache(maxsize=None)
def prop_6_5_phi() -> SimplicialMap:
    """phi: {1} -> Delta^1."""
    D1 = simplex(1)
    return vertex_inclusion(D1, D1.vertices()[1])


@lru_cache(maxsize=None)
def complexes() -> dict:
    out = {}
    for n in range(4):
        out[f"simplex{n}"] = simplex(n)
    for n in (1, 2, 3):
        out[f"boundary{n}"] = boundary(n)[0]
        for k in range(n + 1):
            out[f"horn{n}_{k}"] = horn(n, k)[0]
    for name, C, N in poset_nerves(4):
        out[name] = N
    out["grid"] = nerve(grid_poset(), 4)
    out["walking_iso"] = nerve(_walking_iso(), 4)
    out["missing_filler"] = flatness_counterexample().source
    return out


@lru_cache(maxsize=None)
def maps() -> dict:
    """At least thirty named maps covering every verdict of every classifier."""
    D0, D1, D2, D3 = (simplex(n) for n in range(4))
    out = {}
    for n in range(4):
        out[f"id_simplex{n}"] = identity_map(simplex(n))
    for n in (1, 2, 3):
        out[f"simplex{n}_to_point"] = to_point(simplex(n))
    for n in (2, 3):
        for k in range(n + 1):
            A, inc = horn(n, k)
            out[f"horn{n}_{k}_inclusion"] = SimplicialMap(A, simplex(n), inc.images)
    for n in (1, 2):
        A, inc = boundary(n)
        out[f"boundary{n}_inclusion"] = SimplicialMap(A, simplex(n), inc.images)
    out["boundary1_to_point"] = to_point(boundary(1)[0])
    out["boundary2_to_point"] = to_point(boundary(2)[0])
    out["horn2_1_to_point"] = to_point(horn(2, 1)[0])
    out["vertex0_in_simplex1"] = vertex_inclusion(D1, D1.vertices()[0])
    out["vertex1_in_simplex1"] = vertex_inclusion(D1, D1.vertices()[1])
    for verts in ((1, 2), (0, 2), (0, 1)):
        out[f"face{''.join(map(str, verts))}_in_simplex2"] = std_face(2, verts)
    out["s0_simplex2_to_simplex1"] = std_operator(1, (0, 0, 1))
    out["s1_simplex2_to_simplex1"] = std_operator(1, (0, 1, 1))
    P, _, p2 = product(D1, D1)
    out["square_projection"] = SimplicialMap(P, D1, p2.images)
    grid = nerve(grid_poset(), 4)
    out["grid_projection"] = nerve_map(poset_functor(grid_poset(), chain(1), {o: o[1] for o in grid_poset().objects}),
                                       grid, nerve(chain(1), 4))
    out["walking_iso_to_point"] = to_point(nerve(_walking_iso(), 4))
    out["slice_under_simplex1_at_0"] = slice_under(D1, D1.vertices()[0]).projection
    out["slice_under_simplex2_at_0"] = slice_under(D2, D2.vertices()[0]).projection
    out["slice_over_simplex2_at_2"] = slice_over(D2, D2.vertices()[2]).projection
    out["twisted_arrow_simplex1"] = twisted_arrow(D1).projection
    O, s, t = arrow_category(D1)
    out["arrow_source_simplex1"] = s
    out["arrow_target_simplex1"] = t
    for name, p, Np in grothendieck_nerve_maps(3)[:4]:
        out[f"groth_{name}"] = Np
    out["groth_endpoints"] = dict((n, m) for n, _, m in grothendieck_nerve_maps(3))["endpoints"]
    out["missing_filler_inclusion"] = flatness_counterexample()
    return out


def slice_fixture() -> SimplicialMap:
    return maps()["slice_under_simplex2_at_0"]


@lru_cache(maxsize=None)
def quasicategories(max_nondegenerate: int = 10) -> tuple:
    """(name, nerve) for corpus poset nerves with few nondegenerate simplices."""
    return tuple((name, N) for name, C, N in poset_nerves(4)
                 if N.num_nondegenerate() <= max_nondegenerate)


__all__ = [
    "chain", "complexes", "flatness_counterexample", "grothendieck_corpus", "grothendieck_nerve_maps",
    "maps", "point", "poset_functor", "poset_nerves", "posets", "prop_6_5_phi", "quasicategories",
    "simplex", "slice_fixture", "std_face", "std_operator", "to_point", "vertex_inclusion",
]
