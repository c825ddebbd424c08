"""Finite categories, functors between them, and their nerves."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product as iproduct

from .core import Simplex, SimplicialMap, SimplicialSet, build_degreewise, from_vertex_sets


class CategoryError(ValueError):
    pass


class FiniteCategory:
    """A finite category presented by a composition table.

    ``morphisms`` maps a morphism name to ``(source, target)``; ``identities``
    maps each object to its identity morphism; ``compose[(g, f)]`` is ``g o f``
    for every composable pair (``target(f) == source(g)``).
    """

    def __init__(self, objects, morphisms, identities, compose, name=None, check=True):
        self.objects = list(objects)
        self.morphisms = dict(morphisms)
        self.identities = dict(identities)
        self.compose_table = dict(compose)
        self.name = name
        self._out: dict = {}
        for m, (a, b) in self.morphisms.items():
            self._out.setdefault(a, []).append(m)
        if check:
            problems = self.violations()
            if problems:
                raise CategoryError(problems[0])

    def src(self, m):
        return self.morphisms[m][0]

    def tgt(self, m):
        return self.morphisms[m][1]

    def compose(self, g, f):
        """g o f."""
        return self.compose_table[(g, f)]

    def hom(self, a, b) -> list:
        return [m for m in self._out.get(a, []) if self.morphisms[m][1] == b]

    def out_of(self, a) -> list:
        return list(self._out.get(a, []))

    def is_identity(self, m) -> bool:
        return self.identities[self.src(m)] == m

    def nonidentity(self) -> list:
        return [m for m in self.morphisms if not self.is_identity(m)]

    def is_iso(self, m) -> bool:
        a, b = self.morphisms[m]
        return any(self.compose(g, m) == self.identities[a] and self.compose(m, g) == self.identities[b]
                   for g in self.hom(b, a))

    def violations(self) -> list[str]:
        out = []
        for o in self.objects:
            i = self.identities.get(o)
            if i is None or self.morphisms.get(i) != (o, o):
                out.append(f"bad identity at {o!r}")
        if out:
            return out
        for f, (a, b) in self.morphisms.items():
            for g in self.out_of(b):
                if (g, f) not in self.compose_table:
                    out.append(f"missing composite {g!r} o {f!r}")
                    continue
                h = self.compose_table[(g, f)]
                if self.morphisms.get(h) != (a, self.tgt(g)):
                    out.append(f"composite {g!r} o {f!r} has wrong endpoints")
            if self.compose_table.get((f, self.identities[a])) != f:
                out.append(f"right unit fails at {f!r}")
            if self.compose_table.get((self.identities[b], f)) != f:
                out.append(f"left unit fails at {f!r}")
        if out:
            return out
        for f, (a, b) in self.morphisms.items():
            for g in self.out_of(b):
                for h in self.out_of(self.tgt(g)):
                    if self.compose(h, self.compose(g, f)) != self.compose(self.compose(h, g), f):
                        out.append(f"associativity fails at {h!r}, {g!r}, {f!r}")
                        return out
        return out

    def opposite(self) -> "FiniteCategory":
        return FiniteCategory(
            self.objects,
            {m: (b, a) for m, (a, b) in self.morphisms.items()},
            self.identities,
            {(f, g): h for (g, f), h in self.compose_table.items()},
            name=f"{self.name}^op" if self.name else None,
            check=False,
        )

    def __repr__(self):
        return f"<FiniteCategory {self.name or ''} |ob|={len(self.objects)} |mor|={len(self.morphisms)}>"


@dataclass
class Functor:
    source: FiniteCategory
    target: FiniteCategory
    on_objects: dict
    on_morphisms: dict

    def __call__(self, m):
        return self.on_morphisms[m]

    def ob(self, o):
        return self.on_objects[o]

    def violations(self) -> list[str]:
        C, D = self.source, self.target
        out = []
        for m, (a, b) in C.morphisms.items():
            fm = self.on_morphisms.get(m)
            if fm is None or D.morphisms.get(fm) != (self.on_objects[a], self.on_objects[b]):
                out.append(f"{m!r} not sent to a morphism between the images")
        for o in C.objects:
            if self.on_morphisms.get(C.identities[o]) != D.identities[self.on_objects[o]]:
                out.append(f"identity at {o!r} not preserved")
        if out:
            return out
        for (g, f), h in C.compose_table.items():
            if D.compose(self(g), self(f)) != self(h):
                out.append(f"composite {g!r} o {f!r} not preserved")
        return out

    def compose(self, other: "Functor") -> "Functor":
        """self o other."""
        return Functor(other.source, self.target,
                       {o: self.ob(v) for o, v in other.on_objects.items()},
                       {m: self(v) for m, v in other.on_morphisms.items()})


def identity_functor(C: FiniteCategory) -> Functor:
    return Functor(C, C, {o: o for o in C.objects}, {m: m for m in C.morphisms})


# ---------------------------------------------------------------------------
# standard examples


def poset_category(elements, leq, name=None) -> FiniteCategory:
    """Category of a finite poset; morphisms are the pairs (a, b) with a <= b."""
    elements = list(elements)
    mors = {(a, b): (a, b) for a in elements for b in elements if leq(a, b)}
    comp = {((b, c), (a, b)): (a, c) for (a, b) in mors for (b2, c) in mors if b2 == b}
    return FiniteCategory(elements, mors, {a: (a, a) for a in elements}, comp, name=name)


def linear_order(n: int) -> FiniteCategory:
    return poset_category(range(n + 1), lambda a, b: a <= b, name=f"[{n}]")


def grid_poset() -> FiniteCategory:
    """The product poset [1] x [1]."""
    els = [(0, 0), (0, 1), (1, 0), (1, 1)]
    return poset_category(els, lambda a, b: a[0] <= b[0] and a[1] <= b[1], name="[1]x[1]")


def monoid_category(elements, mult, unit, name=None) -> FiniteCategory:
    """One-object category of a finite monoid."""
    return FiniteCategory(["*"], {e: ("*", "*") for e in elements}, {"*": unit},
                          {(g, f): mult(g, f) for g in elements for f in elements}, name=name)


def terminal_category() -> FiniteCategory:
    return FiniteCategory(["*"], {"id": ("*", "*")}, {"*": "id"}, {("id", "id"): "id"}, name="1")


def discrete_category(objects) -> FiniteCategory:
    objects = list(objects)
    return FiniteCategory(objects, {("id", o): (o, o) for o in objects},
                          {o: ("id", o) for o in objects},
                          {(("id", o), ("id", o)): ("id", o) for o in objects})


def product_category(C: FiniteCategory, D: FiniteCategory) -> FiniteCategory:
    objs = [(a, b) for a in C.objects for b in D.objects]
    mors = {(f, g): ((C.src(f), D.src(g)), (C.tgt(f), D.tgt(g)))
            for f in C.morphisms for g in D.morphisms}
    comp = {((f2, g2), (f1, g1)): (C.compose(f2, f1), D.compose(g2, g1))
            for (f2, f1) in C.compose_table for (g2, g1) in D.compose_table}
    return FiniteCategory(objs, mors, {(a, b): (C.identities[a], D.identities[b]) for a, b in objs},
                          comp, check=False)


def posets_up_to_iso(n: int) -> list[tuple[tuple, frozenset]]:
    """All partial orders on {0..n-1} up to isomorphism, as (elements, strict relation)."""
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    seen, out = set(), []
    for bits in iproduct((0, 1), repeat=len(pairs)):
        rel = frozenset(p for p, bit in zip(pairs, bits) if bit)
        if any((b, a) in rel for (a, b) in rel):
            continue
        if any((a, c) not in rel for (a, b) in rel for (b2, c) in rel if b2 == b and a != c):
            continue
        canon = min(tuple(sorted((perm[a], perm[b]) for a, b in rel)) for perm in permutations(range(n)))
        if canon in seen:
            continue
        seen.add(canon)
        out.append((tuple(range(n)), frozenset(canon)))
    return out


def poset_from_relation(elements, strict, name=None) -> FiniteCategory:
    return poset_category(elements, lambda a, b: a == b or (a, b) in strict, name=name)


# ---------------------------------------------------------------------------
# nerves


def is_poset(C: FiniteCategory) -> bool:
    return all(len(C.hom(a, b)) <= 1 and (a == b or not C.hom(b, a) or not C.hom(a, b))
               for a in C.objects for b in C.objects)


def nerve(C: FiniteCategory, dim_bound: int = 3) -> SimplicialSet:
    """Nerve of C truncated at ``dim_bound``.

    Raw n-simplices are ``(objects, morphisms)`` chains.  The result is flagged
    exact when no chain of n + 1 nonidentity morphisms exists, i.e. when the
    full nerve has no nondegenerate simplices above the bound.
    """
    exact = not _has_nonidentity_chain(C, dim_bound + 1)

    def chains(n):
        out = []

        def rec(objs, mors):
            if len(mors) == n:
                out.append((tuple(objs), tuple(mors)))
                return
            for m in C.out_of(objs[-1]):
                objs.append(C.tgt(m))
                mors.append(m)
                rec(objs, mors)
                objs.pop()
                mors.pop()

        for o in C.objects:
            rec([o], [])
        return out

    def act(raw, th):
        objs, mors = raw
        new_objs = tuple(objs[t] for t in th)
        new_mors = []
        for j in range(1, len(th)):
            a, b = th[j - 1], th[j]
            m = C.identities[objs[a]]
            for k in range(a, b):
                m = C.compose(mors[k], m)
            new_mors.append(m)
        return (new_objs, tuple(new_mors))

    top = dim_bound
    if exact:
        top = min(dim_bound, _longest_nonidentity_chain(C, dim_bound))
    N = build_degreewise(top, chains, act, exact=exact, name=f"N({C.name})" if C.name else None)
    if not exact:
        N.truncation = dim_bound

    def reduce(raw):
        objs, mors = raw
        tau, keep = [0], [0]
        for j, m in enumerate(mors):
            if C.is_identity(m):
                tau.append(tau[-1])
            else:
                tau.append(tau[-1] + 1)
                keep.append(j + 1)
        base = N._normal[act(raw, tuple(keep))]
        return Simplex(base.base, tuple(base.op[t] for t in tau))

    N._reduce = reduce
    N.category = C
    return N


def _has_nonidentity_chain(C: FiniteCategory, length: int) -> bool:
    non = [m for m in C.morphisms if not C.is_identity(m)]
    by_src: dict = {}
    for m in non:
        by_src.setdefault(C.src(m), []).append(m)
    # reach[o] = True if a chain of the remaining length starts at o
    reach = {o: True for o in C.objects}
    for _ in range(length):
        reach = {o: any(reach[C.tgt(m)] for m in by_src.get(o, [])) for o in C.objects}
    return any(reach.values())


def _longest_nonidentity_chain(C: FiniteCategory, cap: int) -> int:
    k = 0
    while k < cap and _has_nonidentity_chain(C, k + 1):
        k += 1
    return k


def poset_nerve(elements, leq, name=None) -> SimplicialSet:
    """Nerve of a poset as an ordered simplicial complex on strict chains."""
    elements = list(elements)
    order = {e: i for i, e in enumerate(_linear_extension(elements, leq))}
    chains = []

    def rec(chain):
        chains.append(tuple(chain))
        for e in elements:
            if e != chain[-1] and leq(chain[-1], e):
                rec(chain + [e])

    for e in elements:
        rec([e])
    # vertex tuples must be strictly increasing: relabel through a linear extension
    enc = [tuple(order[e] for e in ch) for ch in chains]
    X = from_vertex_sets(enc, name=name)
    back = {i: e for e, i in order.items()}
    X.labels = {k: tuple(back[i] for i in v) for k, v in X.labels.items()}
    X._by_label = {lab: k for k, lab in X.labels.items()}
    return X


def _linear_extension(elements, leq):
    rest, out = list(elements), []
    while rest:
        m = next(e for e in rest if not any(o != e and leq(o, e) for o in rest))
        out.append(m)
        rest.remove(m)
    return out


def nerve_map(F: Functor, NC: SimplicialSet, ND: SimplicialSet) -> SimplicialMap:
    """N(F): N(C) -> N(D) for nerves built by :func:`nerve`."""
    def fn(raw):
        objs, mors = raw
        return (tuple(F.ob(o) for o in objs), tuple(F(m) for m in mors))
    return SimplicialMap(NC, ND, {k: ND.normal(fn(NC.labels[k])) for k in NC.keys()})


# ---------------------------------------------------------------------------
# diagrams of categories and the Grothendieck construction


@dataclass
class CatDiagram:
    """A functor from an index category into finite categories."""

    index: FiniteCategory
    fibers: dict  # object -> FiniteCategory
    transition: dict = field(default_factory=dict)  # morphism -> Functor

    def __call__(self, m) -> Functor:
        return self.transition[m]

    def violations(self) -> list[str]:
        C, out = self.index, []
        for m, (a, b) in C.morphisms.items():
            F = self.transition.get(m)
            if F is None or F.source is not self.fibers[a] or F.target is not self.fibers[b]:
                out.append(f"transition for {m!r} missing or mistyped")
                continue
            out.extend(F.violations())
        if out:
            return out
        for (g, f), h in C.compose_table.items():
            if self(g).compose(self(f)).on_morphisms != self(h).on_morphisms:
                out.append(f"F({g!r}) o F({f!r}) != F({h!r})")
        for o in C.objects:
            if self(C.identities[o]).on_morphisms != {m: m for m in self.fibers[o].morphisms}:
                out.append(f"F(id_{o!r}) is not the identity")
        return out


def set_diagram(index: FiniteCategory, sets: dict, functions: dict) -> CatDiagram:
    """A functor into finite sets, viewed as a diagram of discrete categories."""
    fibers = {o: discrete_category(sets[o]) for o in index.objects}
    trans = {}
    for m, (a, b) in index.morphisms.items():
        fn = functions.get(m)
        if fn is None and index.is_identity(m):
            fn = {x: x for x in sets[a]}
        trans[m] = Functor(fibers[a], fibers[b], dict(fn),
                           {("id", x): ("id", fn[x]) for x in sets[a]})
    return CatDiagram(index, fibers, trans)


def grothendieck(D: CatDiagram):
    """Covariant Grothendieck construction with its projection functor.

    Objects are pairs ``(c, x)``; a morphism ``(c, x) -> (d, y)`` is ``(f, phi)``
    with ``f: c -> d`` and ``phi: F(f)(x) -> y`` in ``F(d)``.
    """
    C = D.index
    objs = [(c, x) for c in C.objects for x in D.fibers[c].objects]
    mors, comp = {}, {}
    for f, (c, d) in C.morphisms.items():
        Ff = D(f)
        Fd = D.fibers[d]
        for x in D.fibers[c].objects:
            for phi in Fd.out_of(Ff.ob(x)):
                mors[(f, phi, x)] = ((c, x), (d, Fd.tgt(phi)))
    for (f, phi, x), (a, b) in mors.items():
        for (g, psi, y), (b2, e) in mors.items():
            if b2 != b or y != b[1]:
                continue
            gf = C.compose(g, f)
            Fe = D.fibers[C.tgt(g)]
            comp[((g, psi, y), (f, phi, x))] = (gf, Fe.compose(psi, D(g)(phi)), x)
    ids = {(c, x): (C.identities[c], D.fibers[c].identities[x], x) for c, x in objs}
    G = FiniteCategory(objs, mors, ids, comp, name="Groth")
    proj = Functor(G, C, {o: o[0] for o in objs}, {m: m[0] for m in mors})
    return G, proj


def category_of_elements(index: FiniteCategory, sets: dict, functions: dict):
    return grothendieck(set_diagram(index, sets, functions))


# ---------------------------------------------------------------------------
# 1-categorical fibration predicates


def is_cocartesian_morphism(p: Functor, phi) -> bool:
    """Strong (Grothendieck) cocartesian property of a morphism of the source."""
    E, B = p.source, p.target
    x, y = E.morphisms[phi]
    for psi in E.out_of(x):
        z = E.tgt(psi)
        for g in B.hom(p.ob(y), p.ob(z)):
            if B.compose(g, p(phi)) != p(psi):
                continue
            sols = [chi for chi in E.hom(y, z) if p(chi) == g and E.compose(chi, phi) == psi]
            if len(sols) != 1:
                return False
    return True


def is_opfibration(p: Functor) -> bool:
    """Every morphism of the base and lift of its source has a cocartesian lift."""
    E, B = p.source, p.target
    for f in B.morphisms:
        for x in E.objects:
            if p.ob(x) != B.src(f):
                continue
            if not any(p(phi) == f and is_cocartesian_morphism(p, phi) for phi in E.out_of(x)):
                return False
    return True


def is_discrete_opfibration(p: Functor) -> bool:
    E, B = p.source, p.target
    for f in B.morphisms:
        for x in E.objects:
            if p.ob(x) != B.src(f):
                continue
            if sum(1 for phi in E.out_of(x) if p(phi) == f) != 1:
                return False
    return True


def find_category_isomorphism(C: FiniteCategory, D: FiniteCategory) -> Functor | None:
    """Brute-force isomorphism search for small categories."""
    if len(C.objects) != len(D.objects) or len(C.morphisms) != len(D.morphisms):
        return None
    for perm in permutations(D.objects):
        om = dict(zip(C.objects, perm))
        if any(len(C.hom(a, b)) != len(D.hom(om[a], om[b])) for a in C.objects for b in C.objects):
            continue
        hom_pairs = [(a, b) for a in C.objects for b in C.objects if C.hom(a, b)]
        choices = [list(permutations(D.hom(om[a], om[b]))) for a, b in hom_pairs]
        for pick in iproduct(*choices):
            mm = {}
            for (a, b), img in zip(hom_pairs, pick):
                mm.update(zip(C.hom(a, b), img))
            F = Functor(C, D, om, mm)
            if not F.violations():
                return F
    return None
