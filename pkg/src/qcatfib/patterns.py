"""Marked simplicial sets, categorical patterns and fibred objects.

A pattern on S is a triple (M, T, P): marked edges, scaled 2-simplices and a
list of cone maps ``K^< -> S``.  The checker for fibred objects covers the
inner-fibration, locally cocartesian, marking and scaled-simplex conditions;
the two limit conditions attached to cones are reported Unknown unless there
are no cones.

The functors pi_!, pi^* and pi_* between marked complexes over a base are
computed degreewise, the last through :class:`SectionSpace`.  The auditors
check the hypotheses of the two-sided construction item by item.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .constructions import arrow_category
from .core import (
    FiberedComplex,
    Simplex,
    SimplicialMap,
    SimplicialSet,
    base_change,
    find_isomorphism,
    identity_map,
    join,
    pullback,
    standard_simplex,
)
from .fibrations import (
    check_fibration,
    cocartesian_edges,
    edge_pullback,
    equivalence_edges,
    is_cartesian_fibration,
    is_cocartesian_edge,
    is_cocartesian_fibration,
    is_equivalence_edge,
    is_isofibration,
    is_locally_cartesian,
    is_locally_cartesian_edge,
    is_locally_cocartesian_edge,
    is_quasicategory,
    lift_to_pullback,
    simplex_pullback,
)
from .flatness import is_flat
from .lifting import FAILS, HOLDS, UNKNOWN, Verdict, search
from .sections import SectionSpace, degenerate_edges


class AuditFailure(ValueError):
    """Raised when a construction is requested on data failing its hypotheses."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


# ---------------------------------------------------------------------------
# marked simplicial sets


@dataclass
class MarkedSimplicialSet:
    underlying: SimplicialSet
    marked: set

    def __post_init__(self):
        self.marked = set(self.marked) | degenerate_edges(self.underlying)

    @classmethod
    def flat(cls, X: SimplicialSet) -> "MarkedSimplicialSet":
        return cls(X, set())

    @classmethod
    def sharp(cls, X: SimplicialSet) -> "MarkedSimplicialSet":
        return cls(X, set(X.simplices(1)))

    @classmethod
    def natural(cls, p: SimplicialMap, dim_bound: int = 3) -> "MarkedSimplicialSet":
        """The source of p with its p-cocartesian edges marked."""
        return cls(p.source, cocartesian_edges(p, dim_bound))

    def violations(self) -> list[str]:
        X = self.underlying
        out = [f"{e} is not an edge" for e in self.marked if e.dim != 1]
        out += [f"degenerate edge {e} is not marked" for e in degenerate_edges(X) - self.marked]
        return out


@dataclass
class MarkedMap:
    """A map of simplicial sets together with markings on both ends."""

    map: SimplicialMap
    source: MarkedSimplicialSet
    target: MarkedSimplicialSet

    @classmethod
    def of(cls, f: SimplicialMap, source_marked=(), target_marked=None) -> "MarkedMap":
        """Wrap f; the target defaults to the sharp marking."""
        src = MarkedSimplicialSet(f.source, set(source_marked))
        if target_marked is None:
            tgt = MarkedSimplicialSet.sharp(f.target)
        else:
            tgt = MarkedSimplicialSet(f.target, set(target_marked))
        return cls(f, src, tgt)

    def violations(self) -> list[str]:
        out = self.source.violations() + self.target.violations()
        out += [f"marked edge {e} goes to unmarked {self.map(e)}"
                for e in sorted(self.source.marked) if self.map(e) not in self.target.marked]
        return out

    def __call__(self, s: Simplex) -> Simplex:
        return self.map(s)


def marked_identity(X: MarkedSimplicialSet) -> MarkedMap:
    return MarkedMap(identity_map(X.underlying), X, X)


# ---------------------------------------------------------------------------
# categorical patterns


@dataclass
class Cone:
    """A cone map f: Delta^0 * K -> S; ``cone`` is the join with its apex first."""

    K: SimplicialSet
    map: SimplicialMap

    @property
    def cone(self) -> SimplicialSet:
        return self.map.source


def make_cone(K: SimplicialSet, S: SimplicialSet, images: dict) -> Cone:
    """Build a cone from images of the nondegenerate simplices of Delta^0 * K."""
    J = join(standard_simplex(0), K)[0]
    return Cone(K, SimplicialMap(J, S, images))


@dataclass
class CategoricalPattern:
    base: SimplicialSet
    marked: set
    scaled: set
    cones: list = field(default_factory=list)

    def __post_init__(self):
        # degenerate edges and 2-simplices always belong to M and T
        self.marked = set(self.marked) | degenerate_edges(self.base)
        self.scaled = set(self.scaled) | {t for t in self.base.simplices(2) if not t.nondegenerate}

    @classmethod
    def cocartesian(cls, S: SimplicialSet, marked=None) -> "CategoricalPattern":
        """(M, S_2, empty); M defaults to all edges."""
        M = set(S.simplices(1)) if marked is None else set(marked) | degenerate_edges(S)
        return cls(S, M, set(S.simplices(2)), [])


def validate_pattern(pat: CategoricalPattern) -> list[str]:
    """Violations of the pattern invariants; empty when valid."""
    S = pat.base
    out = []
    for e in degenerate_edges(S):
        if e not in pat.marked:
            out.append(f"degenerate edge {e} not marked")
    for t in S.simplices(2):
        if not t.nondegenerate and t not in pat.scaled:
            out.append(f"degenerate 2-simplex {t} not scaled")
    for i, c in enumerate(pat.cones):
        f = c.map
        if f.target is not S:
            out.append(f"cone {i}: target is not the base")
            continue
        out += [f"cone {i}: {v}" for v in f.violations()]
        J = f.source
        out += [f"cone {i}: edge {e} not sent to a marked edge"
                for e in J.nondegenerate(1) if f(e) not in pat.marked]
        out += [f"cone {i}: 2-simplex {t} not sent to a scaled 2-simplex"
                for t in J.nondegenerate(2) if f(t) not in pat.scaled]
    return out


# ---------------------------------------------------------------------------
# witnesses for marking conditions


@dataclass
class MarkingMismatch:
    """An edge whose marking disagrees with being locally cocartesian over M."""

    projection: SimplicialMap
    edge: Simplex
    marked: bool
    base_marked: bool
    bound: int = 3

    def replay(self) -> bool:
        local = bool(is_locally_cocartesian_edge(self.projection, self.edge, self.bound))
        return self.marked != (self.base_marked and local)


@dataclass
class ScaledEdgeWitness:
    """A marked edge over the first edge of a scaled 2-simplex that is not cocartesian there."""

    projection: SimplicialMap
    sigma: Simplex
    edge: Simplex
    bound: int = 3

    def replay(self) -> bool:
        pk, to_x = simplex_pullback(self.projection, self.sigma)
        D2 = pk.target
        e = lift_to_pullback(pk, to_x, self.edge, D2.named((0, 1)))
        return not is_cocartesian_edge(pk, e, self.bound)


def _unmarked_image(s, f, source_marked, target_marked):
    return s in source_marked and f(s) not in target_marked


def _unmarked_equivalence(s, X, marked, bound):
    return is_equivalence_edge(X, s, bound) and s not in marked


def _composition(t, X, marked):
    return X.face(t, 2) in marked and X.face(t, 0) in marked and X.face(t, 1) not in marked


def _unscaled(t, S, scaled, bound):
    return is_equivalence_edge(S, S.edge(t, 0, 1), bound) and t not in scaled


def _phi_chi(t, pi, E, M, bound):
    X, S = pi.source, pi.target
    phi, chi, psi = X.face(t, 2), X.face(t, 1), X.face(t, 0)
    if not is_equivalence_edge(S, pi(phi), bound):
        return False
    if M is not None and pi(psi) not in M:
        return False
    if not is_locally_cartesian_edge(pi, psi, bound):
        return False
    return (phi in E) != (chi in E)


def _cone_psi_chi(t, pk, to_x, E, bound):
    P, K = pk.source, pk.target
    phi, chi, psi = P.face(t, 2), P.face(t, 1), P.face(t, 0)
    if not is_equivalence_edge(K, pk(psi), bound) or not is_cocartesian_edge(pk, phi, bound):
        return False
    return (to_x(psi) in E) != (to_x(chi) in E)


def _rho_scaled(t, pi, rho, scaled, scaled2):
    return pi(t) in scaled and rho(t) not in scaled2


def _criterion(z, r, marked, bound):
    return bool(is_cocartesian_edge(r, z, bound)) != (z in marked)


CONDITIONS = {
    "unmarked-image": _unmarked_image,
    "unmarked-equivalence": _unmarked_equivalence,
    "composition": _composition,
    "unscaled": _unscaled,
    "phi-chi": _phi_chi,
    "cone-psi-chi": _cone_psi_chi,
    "rho-scaled": _rho_scaled,
    "cocartesian-criterion": _criterion,
}


@dataclass
class EdgeCondition:
    """A named finite condition failing on a specific simplex.

    ``kind`` selects a predicate from :data:`CONDITIONS`; ``data`` holds its
    remaining arguments.  ``replay`` returns True while the condition still fails.
    """

    kind: str
    simplex: Simplex
    data: dict = field(default_factory=dict)
    description: str = ""

    def replay(self) -> bool:
        return bool(CONDITIONS[self.kind](self.simplex, **self.data))


@dataclass
class ConeSectionWitness:
    """A cocartesian section over a cone whose composite is not among the target cones."""

    composite: SimplicialMap
    cones: list

    def replay(self) -> bool:
        return not any(_same_cone(self.composite, c) for c in self.cones)


# ---------------------------------------------------------------------------
# fibred objects


def _combine(bullets: dict) -> Verdict:
    squares = sum(v.squares for v in bullets.values())
    bound = max((v.bound for v in bullets.values() if v.bound is not None), default=None)
    for name, v in bullets.items():
        if v.fails:
            return Verdict(FAILS, bound, squares, witness=v.witness,
                           reason=f"{name}: {v.reason}", detail={"bullets": bullets, "failed": name})
    for name, v in bullets.items():
        if v.status == UNKNOWN:
            return Verdict(UNKNOWN, bound, squares, reason=f"{name}: {v.reason}",
                           detail={"bullets": bullets})
    return Verdict(HOLDS, bound, squares, detail={"bullets": bullets})


def is_pattern_fibered(q: MarkedMap, pat: CategoricalPattern, dim_bound: int = 3) -> Verdict:
    """Check whether (X, E) -> (S, M) is fibred for the pattern (M, T, P).

    Returns a combined verdict whose ``detail["bullets"]`` holds one verdict
    per condition, keyed "marked map", "inner", "locally cocartesian",
    "marking", "scaled", "limits" and "limit sections".
    """
    p = q.map
    X, S = p.source, p.target
    if S is not pat.base:
        raise ValueError("pattern and map have different bases")
    E, M = q.source.marked, pat.marked
    bullets: dict = {}

    bad = [e for e in sorted(E) if p(e) not in M]
    if bad:
        bullets["marked map"] = Verdict(FAILS, dim_bound, witness=EdgeCondition(
            "unmarked-image", bad[0], {"f": p, "source_marked": E, "target_marked": M},
            "marked edge over an unmarked edge"),
            reason=f"{bad[0]} lies over an unmarked edge")
        return _combine(bullets)
    bullets["marked map"] = Verdict(HOLDS, dim_bound)

    inner = check_fibration(p, "inner", dim_bound)
    bullets["inner"] = inner
    if not inner:
        return _combine(bullets)

    squares, status, witness, reason = 0, HOLDS, None, ""
    for eta in sorted(M):
        pk, _ = edge_pullback(p, eta)
        v = is_cocartesian_fibration(pk, dim_bound)
        squares += v.squares
        if not v:
            status, witness, reason = v.status, v.witness, f"pullback along {eta}: {v.reason}"
            break
    bullets["locally cocartesian"] = Verdict(status, inner.bound, squares, witness=witness,
                                             reason=reason)
    if status != HOLDS:
        return _combine(bullets)

    # marked exactly when locally cocartesian over a marked edge
    mismatch = None
    for e in X.simplices(1):
        over_m = p(e) in M
        local = over_m and bool(is_locally_cocartesian_edge(p, e, dim_bound))
        if (e in E) != local:
            mismatch = MarkingMismatch(p, e, e in E, over_m, dim_bound)
            break
    if mismatch is not None:
        why = "marked but not locally cocartesian" if mismatch.marked else \
            "locally cocartesian over a marked edge but not marked"
        bullets["marking"] = Verdict(FAILS, inner.bound, witness=mismatch,
                                     reason=f"{mismatch.edge}: {why}")
        return _combine(bullets)
    bullets["marking"] = Verdict(HOLDS, inner.bound)

    checked, failed = 0, None
    for sigma in sorted(pat.scaled):
        first = S.edge(sigma, 0, 1)
        for e in E:
            if p(e) != first:
                continue
            checked += 1
            w = ScaledEdgeWitness(p, sigma, e, dim_bound)
            if w.replay():
                failed = w
                break
        if failed:
            break
    bullets["scaled"] = Verdict(FAILS if failed else HOLDS, inner.bound, checked, witness=failed,
                                reason=f"{failed.edge} not cocartesian over {failed.sigma}"
                                if failed else "")
    if failed:
        return _combine(bullets)

    if pat.cones:
        why = "limit conditions for cones are outside the finite checker"
        bullets["limits"] = Verdict(UNKNOWN, inner.bound, reason=why)
        bullets["limit sections"] = Verdict(UNKNOWN, inner.bound, reason=why)
    else:
        bullets["limits"] = Verdict(HOLDS, inner.bound, reason="no cones")
        bullets["limit sections"] = Verdict(HOLDS, inner.bound, reason="no cones")
    return _combine(bullets)


# ---------------------------------------------------------------------------
# pi_!, pi^*, pi_*


def pi_shriek(pi: MarkedMap, X: MarkedMap) -> MarkedMap:
    """Composition with pi."""
    if X.map.target is not pi.map.source:
        raise ValueError("object does not lie over the source of pi")
    return MarkedMap(pi.map.compose(X.map), X.source, pi.target)


def pi_pullback(pi: MarkedMap, Y: MarkedMap) -> MarkedMap:
    """Y x_T S, an edge being marked when both of its components are."""
    if Y.map.target is not pi.map.target:
        raise ValueError("object does not lie over the target of pi")
    P, to_y, to_s = pullback(Y.map, pi.map)
    F, M = Y.source.marked, pi.source.marked
    marked = {e for e in P.simplices(1) if to_y(e) in F and to_s(e) in M}
    return MarkedMap(to_s, MarkedSimplicialSet(P, marked), pi.source)


def pi_star_sections(pi: MarkedMap, X: MarkedMap, dim_bound: int = 3) -> MarkedMap:
    """Space of marked sections, truncated at ``dim_bound``."""
    if X.map.target is not pi.map.source:
        raise ValueError("object does not lie over the source of pi")
    S = pi.map.source
    builder = SectionSpace(pi.map, identity_map(S), X.map, r_marked=pi.source.marked,
                           y_marked=X.source.marked, t_marked=pi.target.marked)
    fc = builder.build(dim_bound, name="sections")
    return MarkedMap(fc.projection, MarkedSimplicialSet(fc.total, fc.marked), pi.target)


def marked_maps_over(A: MarkedMap, B: MarkedMap):
    """Marked maps A -> B over a common base, as image dicts."""
    if A.map.target is not B.map.target:
        raise ValueError("objects over different bases")
    src, dst = A.source.underlying, B.source.underlying
    EA, EB = A.source.marked, B.source.marked

    def ok(key, c):
        return key[0] != 1 or src.point(key) not in EA or c in EB

    return search(src, dst, over=(B.map, A.map.on_key), accept=ok)


def count_marked_maps(A: MarkedMap, B: MarkedMap) -> int:
    return sum(1 for _ in marked_maps_over(A, B))


def marked_isomorphism_over(A: MarkedMap, B: MarkedMap) -> SimplicialMap | None:
    """An isomorphism of total spaces over the common base, preserving and reflecting markings."""
    if A.map.target is not B.map.target:
        return None
    X, Y = A.source.underlying, B.source.underlying
    EA, EB = A.source.marked, B.source.marked

    def ok(key, c):
        if A.map.on_key(key) != B.map(c):
            return False
        return key[0] != 1 or (X.point(key) in EA) == (c in EB)

    return find_isomorphism(X, Y, accept=ok)


# ---------------------------------------------------------------------------
# audits


@dataclass
class AuditReport:
    """Ordered hypothesis items, each with its own verdict."""

    title: str
    items: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        vals = list(self.items.values())
        if any(v.fails for v in vals):
            return FAILS
        if any(v.status == UNKNOWN for v in vals):
            return UNKNOWN
        return HOLDS

    @property
    def all_hold(self) -> bool:
        return self.status == HOLDS

    def first_failure(self):
        return next(((k, v) for k, v in self.items.items() if v.fails), None)

    def lines(self) -> list[str]:
        return [f"{v.status:8s} {k}" + (f"  ({v.reason})" if v.reason else "")
                for k, v in self.items.items()]


def _holds(bound, **kw) -> Verdict:
    return Verdict(HOLDS, bound, **kw)


def _first_bad(simplices, kind, data, description, bound) -> Verdict:
    test = CONDITIONS[kind]
    checked = 0
    for s in simplices:
        checked += 1
        if test(s, **data):
            return Verdict(FAILS, bound, checked,
                           witness=EdgeCondition(kind, s, data, description),
                           reason=f"{description}: {s}")
    return Verdict(HOLDS, bound, checked)


def equivalences_marked(X: SimplicialSet, marked: set, dim_bound: int = 3) -> Verdict:
    return _first_bad(X.simplices(1), "unmarked-equivalence",
                      {"X": X, "marked": marked, "bound": dim_bound},
                      "unmarked equivalence", dim_bound)


def closed_under_composition(X: SimplicialSet, marked: set, dim_bound: int = 3) -> Verdict:
    """Every 2-simplex with marked d2 and d0 has marked d1."""
    return _first_bad(X.simplices(2), "composition", {"X": X, "marked": marked},
                      "composite of marked edges not marked", dim_bound)


def _phi_chi_condition(pi: SimplicialMap, E: set, M: set | None, dim_bound: int) -> Verdict:
    """phi marked iff chi marked, for 2-simplices with pi(phi) an equivalence and psi
    locally pi-cartesian (and pi(psi) marked when M is given)."""
    return _first_bad(pi.source.simplices(2), "phi-chi",
                      {"pi": pi, "E": E, "M": M, "bound": dim_bound},
                      "phi and chi marked differently", dim_bound)


def _cone_sections(pk: SimplicialMap, dim_bound: int):
    """Sections of pk sending every edge to a pk-cocartesian edge."""
    K, P = pk.target, pk.source
    coc = cocartesian_edges(pk, dim_bound)

    def ok(key, c):
        return key[0] != 1 or c in coc

    ident = {k: K.point(k) for k in K.keys()}
    for m in search(K, P, over=(pk, ident.__getitem__), accept=ok):
        yield SimplicialMap(K, P, m)


def _same_cone(f: SimplicialMap, cone: Cone) -> bool:
    g = cone.map
    if f.source is g.source:
        return f.images == g.images
    A, B = f.source, g.source
    if A.counts != B.counts or A._faces != B._faces:
        return False
    return all(f.on_key(k) == g.on_key(k) for k in A.keys())


def audit_theorem_6_2(pi: MarkedMap, rho: MarkedMap, pat: CategoricalPattern,
                      pat2: CategoricalPattern, dim_bound: int = 3, budgets=None) -> AuditReport:
    """Itemized hypothesis check for the span S <- (X, E) -> S'."""
    X, S, S2 = pi.map.source, pi.map.target, rho.map.target
    E, M, T = pi.source.marked, pat.marked, pat.scaled
    b = dim_bound
    rep = AuditReport("span hypotheses")
    it = rep.items

    for name, Y in (("S", S), ("X", X), ("S'", S2)):
        v = is_quasicategory(Y, b)
        if not v:
            it[f"{name} is a quasicategory"] = v

    flat = is_isofibration(pi.map, b)
    if flat:
        flat = is_flat(pi.map, b, budgets, check_inner=False)
    it["pi is a flat isofibration"] = flat

    squares, verdict = 0, None
    for eta in sorted(M):
        pk, _ = edge_pullback(pi.map, eta)
        v = is_cartesian_fibration(pk, b)
        squares += v.squares
        if not v:
            verdict = Verdict(v.status, v.bound, squares, witness=v.witness,
                              reason=f"pullback along {eta}: {v.reason}")
            break
    it["pi_eta cartesian for marked eta"] = verdict or _holds(b, squares=squares)

    cone_verdict, cone_two, cone_rho = _holds(b), _holds(b), _holds(b)
    for i, c in enumerate(pat.cones):
        qk = is_quasicategory(c.K, b)
        if not qk:
            cone_verdict = Verdict(qk.status, b, witness=qk.witness, reason=f"cone {i}: K not a quasicategory")
            break
        _, pk, to_x = base_change(pi.map, c.map)
        v = is_cocartesian_fibration(pk, b)
        if not v:
            cone_verdict = Verdict(v.status, b, witness=v.witness, reason=f"cone {i}: {v.reason}")
            break
        w = _first_bad(pk.source.simplices(2), "cone-psi-chi",
                       {"pk": pk, "to_x": to_x, "E": E, "bound": b},
                       f"cone {i}: psi and chi marked differently", b)
        if w.fails and not cone_two.fails:
            cone_two = w
        for s in _cone_sections(pk, b):
            comp = rho.map.compose(to_x.compose(s))
            if not any(_same_cone(comp, c2) for c2 in pat2.cones):
                cone_rho = Verdict(FAILS, b, witness=ConeSectionWitness(comp, pat2.cones),
                                   reason=f"cone {i}: composite not in P'")
                break
    it["cone pullbacks cocartesian"] = cone_verdict
    it["2-simplex marking condition"] = _phi_chi_condition(pi.map, E, M, b)
    it["cone 2-simplex marking condition"] = cone_two

    it["pi is a marked map"] = _first_bad(
        sorted(E), "unmarked-image", {"f": pi.map, "source_marked": E, "target_marked": M},
        "marked edge over an unmarked edge", b)
    it["equivalences of S marked"] = equivalences_marked(S, M, b)
    it["equivalences of X marked"] = equivalences_marked(X, E, b)
    it["marked edges of S closed under composition"] = closed_under_composition(S, M, b)
    it["marked edges of X closed under composition"] = closed_under_composition(X, E, b)
    it["2-simplices with invertible first edge scaled"] = _first_bad(
        S.simplices(2), "unscaled", {"S": S, "scaled": T, "bound": b},
        "2-simplex with invertible first edge not scaled", b)

    it["rho is a marked map"] = _first_bad(
        sorted(E), "unmarked-image", {"f": rho.map, "source_marked": E, "target_marked": pat2.marked},
        "marked edge sent to an unmarked edge", b)
    it["rho respects scaled 2-simplices"] = _first_bad(
        X.simplices(2), "rho-scaled",
        {"pi": pi.map, "rho": rho.map, "scaled": T, "scaled2": pat2.scaled},
        "2-simplex over a scaled simplex sent outside T'", b)
    it["cocartesian cone sections land in P'"] = cone_rho
    return rep


def audit_cor_6_2_1(pi: SimplicialMap, rho: SimplicialMap, E: set, dim_bound: int = 3,
                    budgets=None) -> AuditReport:
    """Hypotheses for the sharp-marked version of the span S <- (X, E) -> T."""
    X = pi.source
    E = set(E) | degenerate_edges(X)
    b = dim_bound
    rep = AuditReport("sharp span hypotheses")
    it = rep.items
    for name, Y in (("S", pi.target), ("X", X), ("T", rho.target)):
        v = is_quasicategory(Y, b)
        if not v:
            it[f"{name} is a quasicategory"] = v
    it["equivalences of X marked"] = equivalences_marked(X, E, b)
    it["marked edges of X closed under composition"] = closed_under_composition(X, E, b)
    flat = is_locally_cartesian(pi, b)
    if flat:
        flat = is_flat(pi, b, budgets)
    it["pi is a flat locally cartesian fibration"] = flat
    it["2-simplex marking condition"] = _phi_chi_condition(pi, E, None, b)
    return rep


def cor_6_2_1_space(pi: SimplicialMap, rho: SimplicialMap, E: set, q: SimplicialMap,
                    dim_bound: int = 3) -> FiberedComplex:
    """Z over S: n-simplices are maps Delta^n x_S X -> Y over T sending
    marked edges with degenerate Delta^n part to q-cocartesian edges."""
    X = pi.source
    E = set(E) | degenerate_edges(X)
    Y_marked = cocartesian_edges(q, dim_bound)
    builder = SectionSpace(pi, rho, q, r_marked=E, y_marked=Y_marked,
                           t_marked=set(pi.target.simplices(1)))
    return builder.build(dim_bound, name="Z")


def check_cor_6_2_1(pi: SimplicialMap, rho: SimplicialMap, E: set, q: SimplicialMap,
                    dim_bound: int = 3, audit: bool = True, budgets=None):
    """Build r: Z -> S and check that it is a cocartesian fibration.

    Returns ``(fc, verdict, criterion)`` where ``criterion`` is a Verdict for
    the edge description: an edge of Z is r-cocartesian exactly when its map
    sends edges with marked X-part to q-cocartesian edges.
    """
    if audit:
        rep = audit_cor_6_2_1(pi, rho, E, dim_bound, budgets)
        if not rep.all_hold:
            raise AuditFailure("span hypotheses fail", rep)
        if not is_cocartesian_fibration(q, dim_bound):
            raise AuditFailure("q is not a cocartesian fibration")
    fc = cor_6_2_1_space(pi, rho, E, q, dim_bound)
    r = fc.projection
    verdict = is_cocartesian_fibration(r, dim_bound)
    Z = fc.total
    crit = _first_bad(Z.simplices(1), "cocartesian-criterion",
                      {"r": r, "marked": fc.marked, "bound": dim_bound},
                      "cocartesian edge criterion disagrees", dim_bound)
    return fc, verdict, crit


def prop_6_5_span(phi: SimplicialMap, dim_bound: int | None = None):
    """The span B <- (O(B) x_B A)^sharp -> A as (pi, rho, marked edges)."""
    B = phi.target
    arrows = arrow_category(B, dim_bound)
    O, s, t = arrows
    P, to_o, to_a = pullback(t, phi)
    pi = s.compose(to_o)
    return pi, to_a, set(P.simplices(1))


def right_kan_via_sections(phi: SimplicialMap, p: SimplicialMap, dim_bound: int = 3) -> FiberedComplex:
    """The right Kan extension fibration obtained from the sharp span."""
    pi, rho, E = prop_6_5_span(phi)
    return cor_6_2_1_space(pi, rho, E, p, dim_bound)


# ---------------------------------------------------------------------------
# base change


@dataclass
class Span:
    """C <- D -> C' with markings on all three."""

    pi: MarkedMap
    rho: MarkedMap

    def __post_init__(self):
        if self.pi.map.source is not self.rho.map.source:
            raise ValueError("legs need a common source")


def span_pattern_audit(span: Span, dim_bound: int = 3) -> AuditReport:
    """Hypothesis audit using the patterns (M, all 2-simplices, empty) on both ends."""
    pat = CategoricalPattern(span.pi.map.target, span.pi.target.marked,
                             set(span.pi.map.target.simplices(2)))
    pat2 = CategoricalPattern(span.rho.map.target, span.rho.target.marked,
                              set(span.rho.map.target.simplices(2)))
    return audit_theorem_6_2(span.pi, span.rho, pat, pat2, dim_bound)


def base_change_sides(span0: Span, span1: Span, W: MarkedMap, dim_bound: int = 3):
    """Both sides of rho_0^* pi_{1,*} W = pr_{0,*} pr_1^* W for W over D_1."""
    if span0.rho.map.target is not span1.pi.map.target:
        raise ValueError("spans do not compose")
    if W.map.target is not span1.pi.map.source:
        raise ValueError("input must lie over the apex of the second span")
    lhs = pi_pullback(span0.rho, pi_star_sections(span1.pi, W, dim_bound))

    P, pr0, pr1 = pullback(span0.rho.map, span1.pi.map)
    M0, M1 = span0.rho.source.marked, span1.pi.source.marked
    PM = MarkedSimplicialSet(P, {e for e in P.simplices(1) if pr0(e) in M0 and pr1(e) in M1})
    pr0m = MarkedMap(pr0, PM, span0.rho.source)
    pr1m = MarkedMap(pr1, PM, span1.pi.source)
    rhs = pi_star_sections(pr0m, pi_pullback(pr1m, W), dim_bound)
    return lhs, rhs


def base_change_check(span0: Span, span1: Span, W: MarkedMap, dim_bound: int = 3,
                      audit: bool = False) -> bool:
    """Compare both composites degreewise (up to the bound) as marked complexes over D_0."""
    if audit:
        for sp in (span0, span1):
            rep = span_pattern_audit(sp, dim_bound)
            if not rep.all_hold:
                raise AuditFailure("span hypotheses fail", rep)
    lhs, rhs = base_change_sides(span0, span1, W, dim_bound)
    return marked_isomorphism_over(lhs, rhs) is not None


__all__ = [
    "AuditFailure", "AuditReport", "CONDITIONS", "CategoricalPattern", "Cone", "ConeSectionWitness",
    "EdgeCondition", "MarkedMap",
    "MarkedSimplicialSet", "MarkingMismatch", "ScaledEdgeWitness", "Span", "audit_cor_6_2_1",
    "audit_theorem_6_2", "base_change_check", "base_change_sides", "check_cor_6_2_1",
    "closed_under_composition", "cor_6_2_1_space", "count_marked_maps", "equivalences_marked",
    "is_pattern_fibered", "make_cone", "marked_identity", "marked_isomorphism_over",
    "marked_maps_over", "pi_pullback", "pi_shriek", "pi_star_sections", "prop_6_5_span",
    "right_kan_via_sections", "span_pattern_audit", "validate_pattern",
]
