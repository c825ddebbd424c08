"""Finite simplicial sets in Eilenberg-Zilber normal form.

A simplex is a pair ``(base, op)``.  ``base`` is the key ``(dim, index)`` of a
nondegenerate simplex and ``op`` is a monotone surjection ``[m] -> [dim]``
stored as a tuple of length ``m + 1``.  The degeneracy word of the normal form
``s_{i1} ... s_{ir}`` (``i1 > ... > ir``) lists the positions ``j`` where
``op[j] == op[j + 1]``; see :func:`op_to_word` and :func:`word_to_op`.

Simplicial operators act contravariantly: a monotone map ``theta: [m] -> [n]``
sends an ``n``-simplex ``x`` to the ``m``-simplex ``theta^* x``.  The face
``d_i`` is the coface ``delta_i`` (skip ``i``) and the degeneracy ``s_i`` is the
codegeneracy ``sigma_i`` (repeat ``i``).
"""

from __future__ import annotations

from collections import defaultdict
from itertools import combinations
from math import comb
from typing import Callable, Hashable, Iterable, NamedTuple, Sequence

Key = tuple  # (dim, index)
Op = tuple  # monotone map as a tuple of images


class Simplex(NamedTuple):
    base: Key
    op: Op

    @property
    def dim(self) -> int:
        return len(self.op) - 1

    @property
    def nondegenerate(self) -> bool:
        return len(self.op) == self.base[0] + 1

    def __repr__(self):
        if self.nondegenerate:
            return f"<{self.base[0]}:{self.base[1]}>"
        return f"<{self.base[0]}:{self.base[1]}|{''.join(map(str, self.op))}>"


def identity_op(n: int) -> Op:
    return tuple(range(n + 1))


def coface(n: int, i: int) -> Op:
    """delta_i: [n-1] -> [n] skipping i."""
    return tuple(j if j < i else j + 1 for j in range(n))


def codegeneracy(n: int, i: int) -> Op:
    """sigma_i: [n+1] -> [n] hitting i twice."""
    return tuple(j if j <= i else j - 1 for j in range(n + 2))


def compose_ops(outer: Op, inner: Op) -> Op:
    """The monotone map ``outer o inner``."""
    return tuple(outer[j] for j in inner)


def op_to_word(op: Op) -> tuple[int, ...]:
    """Strictly decreasing degeneracy indices of a surjection."""
    return tuple(j for j in range(len(op) - 2, -1, -1) if op[j] == op[j + 1])


def word_to_op(word: Sequence[int], base_dim: int) -> Op:
    op = identity_op(base_dim)
    for i in reversed(word):
        # s_{i1} ... s_{ir} x = (sigma_ir ... sigma_i1)^* ... applied right to left
        op = compose_ops(op, codegeneracy(len(op) - 1, i))
    return op


def _epi_mono(rho: Op) -> tuple[Op, Op]:
    image = sorted(set(rho))
    pos = {v: k for k, v in enumerate(image)}
    return tuple(pos[v] for v in rho), tuple(image)


def monotone_maps(m: int, n: int) -> list[Op]:
    """All monotone maps [m] -> [n] in lexicographic order."""
    out = []

    def rec(prefix, lo):
        if len(prefix) == m + 1:
            out.append(tuple(prefix))
            return
        for v in range(lo, n + 1):
            prefix.append(v)
            rec(prefix, v)
            prefix.pop()

    rec([], 0)
    return out


def surjections(m: int, d: int) -> list[Op]:
    """Monotone surjections [m] -> [d]."""
    out = []
    for cuts in combinations(range(1, m + 1), d):
        op, level = [], 0
        for j in range(m + 1):
            if level < d and j == cuts[level]:
                level += 1
            op.append(level)
        out.append(tuple(op))
    return out


class SimplicialSet:
    """A finite simplicial set given by its nondegenerate simplices and faces.

    Parameters
    ----------
    counts : sequence of int
        Number of nondegenerate simplices in each dimension.
    faces : dict
        For every key ``(n, i)`` with ``n >= 1`` the tuple ``(d_0 x, ..., d_n x)``
        of :class:`Simplex` values.
    labels : dict, optional
        Hashable label per key (names for serialization, raw data for
        degreewise constructions).
    exact : bool
        False when the object is a truncation of an infinite (or unknown)
        simplicial set; ``truncation`` then records the last computed dimension.
    """

    def __init__(self, counts, faces, labels=None, exact=True, truncation=None, name=None):
        counts = list(counts)
        while counts and counts[-1] == 0:
            counts.pop()
        self.counts = tuple(counts)
        self._faces = dict(faces)
        self.labels = dict(labels) if labels else {}
        self._by_label = {lab: k for k, lab in self.labels.items()}
        self.exact = exact
        self.truncation = truncation
        self.name = name
        self._restrict_cache: dict = {}
        self._simplices: dict = {}
        self._face_index: dict = {}
        self._normal: dict | None = None
        self._reduce = None

    # -- structure -----------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.counts) - 1

    @property
    def is_empty(self) -> bool:
        return not self.counts

    def keys(self, n: int | None = None) -> list[Key]:
        if n is None:
            return [(d, i) for d, c in enumerate(self.counts) for i in range(c)]
        if n < 0 or n >= len(self.counts):
            return []
        return [(n, i) for i in range(self.counts[n])]

    def nondegenerate(self, n: int) -> list[Simplex]:
        return [Simplex(k, identity_op(n)) for k in self.keys(n)]

    def vertices(self) -> list[Simplex]:
        return self.nondegenerate(0)

    def num_nondegenerate(self) -> int:
        return sum(self.counts)

    def faces_of(self, key: Key) -> tuple:
        return self._faces[key]

    def key_of(self, label) -> Key:
        return self._by_label[label]

    def has_label(self, label) -> bool:
        return label in self._by_label

    def label(self, key: Key):
        return self.labels.get(key, key)

    def point(self, key: Key) -> Simplex:
        """The nondegenerate simplex with the given key."""
        return Simplex(key, identity_op(key[0]))

    def named(self, label) -> Simplex:
        """The nondegenerate simplex with the given label."""
        key = self._by_label[label]
        return Simplex(key, identity_op(key[0]))

    # -- simplicial operators ------------------------------------------
    def restrict_base(self, key: Key, inj: Op) -> Simplex:
        """Face of a nondegenerate simplex along an injective monotone map."""
        d = key[0]
        if len(inj) == d + 1:
            return Simplex(key, inj)
        ck = (key, inj)
        hit = self._restrict_cache.get(ck)
        if hit is not None:
            return hit
        present = set(inj)
        i = next(j for j in range(d + 1) if j not in present)
        f = self._faces[key][i]
        rest = tuple(v - 1 if v > i else v for v in inj)
        out = self.act(f, rest)
        self._restrict_cache[ck] = out
        return out

    def act(self, s: Simplex, theta: Op) -> Simplex:
        """theta^* s for a monotone theta: [m] -> [dim s]."""
        rho = tuple(s.op[j] for j in theta)
        d = s.base[0]
        if len(set(rho)) == d + 1:
            return Simplex(s.base, rho)
        tau, iota = _epi_mono(rho)
        f = self.restrict_base(s.base, iota)
        return Simplex(f.base, tuple(f.op[j] for j in tau))

    def face(self, s: Simplex, i: int) -> Simplex:
        return self.act(s, coface(s.dim, i))

    def degen(self, s: Simplex, i: int) -> Simplex:
        return Simplex(s.base, compose_ops(s.op, codegeneracy(s.dim, i)))

    def vertex(self, s: Simplex, j: int) -> Simplex:
        return self.act(s, (j,))

    def vertex_tuple(self, s: Simplex) -> tuple:
        return tuple(self.act(s, (j,)).base for j in range(s.dim + 1))

    def all_faces(self, s: Simplex) -> tuple:
        n = s.dim
        return tuple(self.act(s, coface(n, i)) for i in range(n + 1))

    def constant(self, v: Simplex, n: int) -> Simplex:
        """The totally degenerate n-simplex on a vertex."""
        return Simplex(v.base, (0,) * (n + 1))

    def edge(self, s: Simplex, i: int, j: int) -> Simplex:
        return self.act(s, (i, j))

    # -- enumeration ---------------------------------------------------
    def simplices(self, n: int) -> list[Simplex]:
        """All n-simplices, degenerate ones included."""
        hit = self._simplices.get(n)
        if hit is not None:
            return hit
        out = []
        for d in range(min(n, self.dim) + 1):
            sur = surjections(n, d)
            for key in self.keys(d):
                out.extend(Simplex(key, op) for op in sur)
        self._simplices[n] = out
        return out

    def count_simplices(self, n: int) -> int:
        return sum(c * comb(n, d) for d, c in enumerate(self.counts) if d <= n)

    def face_index(self, n: int) -> dict:
        """Map from face tuples to the n-simplices having exactly those faces."""
        hit = self._face_index.get(n)
        if hit is not None:
            return hit
        idx = defaultdict(list)
        for s in self.simplices(n):
            idx[self.all_faces(s)].append(s)
        idx = dict(idx)
        self._face_index[n] = idx
        return idx

    def simplices_with_faces(self, faces: tuple) -> list[Simplex]:
        return self.face_index(len(faces) - 1).get(faces, [])

    def normal(self, raw) -> Simplex:
        """Normal form of a raw simplex (degreewise-built sets only)."""
        hit = self._normal.get(raw)
        if hit is None and self._reduce is not None:
            return self._reduce(raw)
        if hit is None:
            raise KeyError(raw)
        return hit

    def has_raw(self, raw) -> bool:
        return self._normal is not None and raw in self._normal

    def is_vertex_determined(self) -> bool:
        """True when every simplex is determined by its vertex sequence."""
        seen = set()
        for key in self.keys():
            vt = self.vertex_tuple(self.point(key))
            if any(vt[j] == vt[j + 1] for j in range(len(vt) - 1)) or vt in seen:
                return False
            seen.add(vt)
        return True

    def __repr__(self):
        tag = "" if self.exact else f", truncated@{self.truncation}"
        nm = f"{self.name} " if self.name else ""
        return f"<SimplicialSet {nm}counts={self.counts}{tag}>"


# ---------------------------------------------------------------------------
# builders


def from_faces(counts, faces, labels=None, **kw) -> SimplicialSet:
    return SimplicialSet(counts, faces, labels, **kw)


def from_vertex_sets(simplices: Iterable[Sequence], name=None) -> SimplicialSet:
    """Ordered simplicial complex from strictly increasing vertex tuples.

    The face closure is taken automatically.  Labels are the vertex tuples.
    """
    closed = set()
    for s in simplices:
        s = tuple(s)
        for k in range(1, len(s) + 1):
            closed.update(combinations(s, k))
    by_dim = defaultdict(list)
    for s in closed:
        by_dim[len(s) - 1].append(s)
    counts, labels, keyof = [], {}, {}
    for d in range(max(by_dim) + 1 if by_dim else 0):
        items = sorted(by_dim[d])
        counts.append(len(items))
        for i, s in enumerate(items):
            labels[(d, i)] = s
            keyof[s] = (d, i)
    faces = {}
    for s, key in keyof.items():
        d = len(s) - 1
        if d >= 1:
            faces[key] = tuple(
                Simplex(keyof[s[:i] + s[i + 1:]], identity_op(d - 1)) for i in range(d + 1)
            )
    X = SimplicialSet(counts, faces, labels, name=name)
    return X


def build_degreewise(top: int, raw_by_dim: Callable[[int], Iterable[Hashable]],
                     act_raw: Callable[[Hashable, Op], Hashable], exact=True,
                     name=None, label_fn=None) -> SimplicialSet:
    """Build a simplicial set from all raw simplices up to dimension ``top``.

    ``raw_by_dim(n)`` must list every n-simplex (degenerate ones too) and
    ``act_raw(x, theta)`` must return the raw simplex ``theta^* x``.  Raw
    simplices that are not degeneracies of lower ones become the nondegenerate
    simplices; their labels are the raw values.
    """
    normal: dict = {}
    counts, faces, labels = [], {}, {}
    prev: list = []
    for n in range(top + 1):
        raws = list(dict.fromkeys(raw_by_dim(n)))
        if n > 0:
            for y in prev:
                ny = normal[y]
                for i in range(n):
                    z = act_raw(y, codegeneracy(n - 1, i))
                    if z not in normal:
                        normal[z] = Simplex(ny.base, compose_ops(ny.op, codegeneracy(n - 1, i)))
        idx = 0
        fresh = []
        for x in raws:
            if x in normal:
                continue
            key = (n, idx)
            idx += 1
            normal[x] = Simplex(key, identity_op(n))
            labels[key] = label_fn(x) if label_fn else x
            fresh.append((key, x))
        counts.append(idx)
        for key, x in fresh:
            if n >= 1:
                faces[key] = tuple(normal[act_raw(x, coface(n, i))] for i in range(n + 1))
        prev = raws
    X = SimplicialSet(counts, faces, labels, exact=exact,
                      truncation=None if exact else top, name=name)
    X._normal = normal
    return X


# ---------------------------------------------------------------------------
# maps


class SimplicialMap:
    """Map of simplicial sets determined by images of nondegenerate simplices."""

    def __init__(self, source: SimplicialSet, target: SimplicialSet, images: dict, name=None):
        self.source = source
        self.target = target
        self.images = dict(images)
        self.name = name

    def __call__(self, s: Simplex) -> Simplex:
        t = self.images[s.base]
        if s.nondegenerate:
            return t
        return Simplex(t.base, tuple(t.op[j] for j in s.op))

    def on_key(self, key: Key) -> Simplex:
        return self.images[key]

    def compose(self, other: "SimplicialMap") -> "SimplicialMap":
        """self o other."""
        return SimplicialMap(other.source, self.target,
                             {k: self(v) for k, v in other.images.items()})

    def violations(self) -> list[str]:
        out = []
        X, Y = self.source, self.target
        for key in X.keys():
            img = self.images.get(key)
            if img is None:
                out.append(f"missing image for {key}")
                continue
            if img.dim != key[0]:
                out.append(f"dimension mismatch at {key}")
                continue
            if key[0] >= 1:
                for i, f in enumerate(X.faces_of(key)):
                    if self.images.get(f.base) is None:
                        continue
                    if self(f) != Y.face(img, i):
                        out.append(f"d_{i} not preserved at {key}")
        return out

    def is_valid(self) -> bool:
        return not self.violations()

    def is_injective(self) -> bool:
        """Monomorphism test: nondegenerate simplices go to distinct nondegenerate ones."""
        imgs = list(self.images.values())
        return all(s.nondegenerate for s in imgs) and len(set(imgs)) == len(imgs)

    def __eq__(self, other):
        return (isinstance(other, SimplicialMap) and self.source is other.source
                and self.target is other.target and self.images == other.images)

    def __hash__(self):
        return hash(tuple(sorted(self.images.items())))

    def __repr__(self):
        return f"<SimplicialMap {self.source!r} -> {self.target!r}>"


def identity_map(X: SimplicialSet) -> SimplicialMap:
    return SimplicialMap(X, X, {k: X.point(k) for k in X.keys()})


def terminal_map(X: SimplicialSet) -> SimplicialMap:
    pt = standard_simplex(0)
    v = (0, 0)
    return SimplicialMap(X, pt, {k: Simplex(v, (0,) * (k[0] + 1)) for k in X.keys()})


def simplex_map(X: SimplicialSet, s: Simplex, n: int | None = None) -> SimplicialMap:
    """The map Delta^n -> X classifying the n-simplex s."""
    n = s.dim if n is None else n
    D = standard_simplex(n)
    return SimplicialMap(D, X, {k: X.act(s, D.labels[k]) for k in D.keys()})


def map_from_raw(source: SimplicialSet, target: SimplicialSet, fn, name=None) -> SimplicialMap:
    """Map between degreewise-built sets from a function on raw simplices."""
    return SimplicialMap(source, target,
                         {k: target.normal(fn(source.labels[k])) for k in source.keys()}, name)


# ---------------------------------------------------------------------------
# standard constructors

_STD: dict = {}


def standard_simplex(n: int) -> SimplicialSet:
    """Delta^n; labels are strictly increasing vertex tuples."""
    if n not in _STD:
        _STD[n] = from_vertex_sets([tuple(range(n + 1))], name=f"Delta^{n}")
    return _STD[n]


def subcomplex_generated(X: SimplicialSet, keys: Iterable[Key], name=None):
    """Smallest face-closed subcomplex containing ``keys``; returns (A, inclusion)."""
    keep = set()
    stack = list(keys)
    while stack:
        k = stack.pop()
        if k in keep:
            continue
        keep.add(k)
        if k[0] >= 1:
            stack.extend(f.base for f in X.faces_of(k))
    return _subcomplex(X, keep, name)


def _subcomplex(X: SimplicialSet, keep: set, name=None):
    renum, counts = {}, []
    for d in range(X.dim + 1):
        ks = [k for k in X.keys(d) if k in keep]
        counts.append(len(ks))
        for i, k in enumerate(ks):
            renum[k] = (d, i)
    faces = {}
    for k, nk in renum.items():
        if k[0] >= 1:
            faces[nk] = tuple(Simplex(renum[f.base], f.op) for f in X.faces_of(k))
    labels = {renum[k]: X.labels[k] for k in renum if k in X.labels}
    A = SimplicialSet(counts, faces, labels, name=name)
    inc = SimplicialMap(A, X, {nk: X.point(k) for k, nk in renum.items()})
    return A, inc


def horn(n: int, k: int):
    """Lambda^n_k with its inclusion into Delta^n."""
    if n < 1 or not 0 <= k <= n:
        raise ValueError(f"no horn Lambda^{n}_{k}")
    D = standard_simplex(n)
    full = tuple(range(n + 1))
    gens = [D.key_of(full[:i] + full[i + 1:]) for i in range(n + 1) if i != k]
    return subcomplex_generated(D, gens, name=f"Lambda^{n}_{k}")


def boundary(n: int):
    """The boundary of Delta^n with its inclusion (empty for n = 0)."""
    D = standard_simplex(n)
    full = tuple(range(n + 1))
    if n == 0:
        return subcomplex_generated(D, [], name="dDelta^0")
    gens = [D.key_of(full[:i] + full[i + 1:]) for i in range(n + 1)]
    return subcomplex_generated(D, gens, name=f"dDelta^{n}")


def empty() -> SimplicialSet:
    return SimplicialSet([], {}, name="empty")


def _top_dim(*Xs) -> int:
    return sum(max(X.dim, 0) for X in Xs)


def _exact(*Xs) -> bool:
    return all(X.exact for X in Xs)


def _min_trunc(*Xs):
    ts = [X.truncation for X in Xs if not X.exact]
    return min(ts) if ts else None


def _pair_reducer(P: SimplicialSet, X: SimplicialSet, Y: SimplicialSet):
    """Normal forms of pairs above the computed range: split off common degeneracies."""

    def red(raw):
        x, y = raw
        m = x.dim
        tau, keep = [0], [0]
        for j in range(m):
            if x.op[j] == x.op[j + 1] and y.op[j] == y.op[j + 1]:
                tau.append(tau[-1])
            else:
                tau.append(tau[-1] + 1)
                keep.append(j + 1)
        sec = tuple(keep)
        base = P._normal[(X.act(x, sec), Y.act(y, sec))]
        return Simplex(base.base, tuple(base.op[t] for t in tau))

    return red


def product(X: SimplicialSet, Y: SimplicialSet, top: int | None = None):
    """X x Y with its two projections.  Raw simplices are pairs of simplices."""
    if X.is_empty or Y.is_empty:
        E = empty()
        return E, SimplicialMap(E, X, {}), SimplicialMap(E, Y, {})
    if top is None:
        top = X.dim + Y.dim
        tr = _min_trunc(X, Y)
        if tr is not None:
            top = min(top, tr)
    P = build_degreewise(
        top,
        lambda n: [(x, y) for x in X.simplices(n) for y in Y.simplices(n)],
        lambda r, th: (X.act(r[0], th), Y.act(r[1], th)),
        exact=_exact(X, Y) and top >= X.dim + Y.dim,
    )
    P._reduce = _pair_reducer(P, X, Y)
    p1 = SimplicialMap(P, X, {k: P.labels[k][0] for k in P.keys()})
    p2 = SimplicialMap(P, Y, {k: P.labels[k][1] for k in P.keys()})
    return P, p1, p2


def pullback(f: SimplicialMap, g: SimplicialMap, top: int | None = None):
    """X x_S Y for f: X -> S, g: Y -> S, with its two projections."""
    if f.target is not g.target:
        raise ValueError("pullback needs a common codomain")
    X, Y = f.source, g.source
    if X.is_empty or Y.is_empty:
        E = empty()
        return E, SimplicialMap(E, X, {}), SimplicialMap(E, Y, {})
    if top is None:
        top = X.dim + Y.dim
        tr = _min_trunc(X, Y)
        if tr is not None:
            top = min(top, tr)

    def raws(n):
        by_img = defaultdict(list)
        for y in Y.simplices(n):
            by_img[g(y)].append(y)
        return [(x, y) for x in X.simplices(n) for y in by_img.get(f(x), ())]

    P = build_degreewise(top, raws, lambda r, th: (X.act(r[0], th), Y.act(r[1], th)),
                         exact=_exact(X, Y) and top >= X.dim + Y.dim)
    P._reduce = _pair_reducer(P, X, Y)
    p1 = SimplicialMap(P, X, {k: P.labels[k][0] for k in P.keys()})
    p2 = SimplicialMap(P, Y, {k: P.labels[k][1] for k in P.keys()})
    return P, p1, p2


def fiber(p: SimplicialMap, v: Simplex):
    """Fiber of p over a vertex v, with its inclusion."""
    pt = standard_simplex(0)
    vmap = SimplicialMap(pt, p.target, {(0, 0): v})
    P, pr, _ = pullback(p, vmap)
    return P, pr


def base_change(p: SimplicialMap, sigma: SimplicialMap, top: int | None = None):
    """Pullback of p along sigma: K -> S, returned as (P, projection to K, map to X)."""
    P, to_k, to_x = pullback(sigma, p, top)
    return P, to_k, to_x


def op_simplex(s: Simplex) -> Simplex:
    """The simplex of X^op corresponding to s."""
    d, m = s.base[0], len(s.op) - 1
    return Simplex(s.base, tuple(d - s.op[m - j] for j in range(m + 1)))


def opposite(X: SimplicialSet) -> SimplicialSet:
    """X^op: same simplices, face d_i becomes d_{n-i}."""
    faces = {}
    for k, fs in X._faces.items():
        faces[k] = tuple(op_simplex(f) for f in reversed(fs))
    Xo = SimplicialSet(X.counts, faces, X.labels, exact=X.exact, truncation=X.truncation,
                       name=f"{X.name}^op" if X.name else None)
    return Xo


def opposite_map(f: SimplicialMap, src_op=None, tgt_op=None) -> SimplicialMap:
    src_op = src_op or opposite(f.source)
    tgt_op = tgt_op or opposite(f.target)
    return SimplicialMap(src_op, tgt_op, {k: op_simplex(v) for k, v in f.images.items()})


def disjoint_union(X: SimplicialSet, Y: SimplicialSet):
    """X + Y with both inclusions."""
    counts = [0] * (max(X.dim, Y.dim) + 1)
    faces, labels, mx, my = {}, {}, {}, {}
    for d in range(len(counts)):
        for k in X.keys(d):
            mx[k] = (d, counts[d])
            counts[d] += 1
        for k in Y.keys(d):
            my[k] = (d, counts[d])
            counts[d] += 1
    for src, m, tag in ((X, mx, 0), (Y, my, 1)):
        for k, nk in m.items():
            labels[nk] = (tag, src.label(k))
            if k[0] >= 1:
                faces[nk] = tuple(Simplex(m[f.base], f.op) for f in src.faces_of(k))
    U = SimplicialSet(counts, faces, labels, exact=_exact(X, Y), truncation=_min_trunc(X, Y))
    ix = SimplicialMap(X, U, {k: U.point(v) for k, v in mx.items()})
    iy = SimplicialMap(Y, U, {k: U.point(v) for k, v in my.items()})
    return U, ix, iy


def join(X: SimplicialSet, Y: SimplicialSet):
    """X * Y with its two canonical inclusions.

    Raw simplices: ('L', x), ('R', y) and ('M', x, y) with dim x + dim y + 1 = n.
    """
    top = (X.dim + 1) + (Y.dim + 1) - 1

    def raws(n):
        out = [("L", x) for x in X.simplices(n)] + [("R", y) for y in Y.simplices(n)]
        for i in range(n):
            j = n - 1 - i
            out.extend(("M", x, y) for x in X.simplices(i) for y in Y.simplices(j))
        return out

    def act(r, th):
        if r[0] == "L":
            return ("L", X.act(r[1], th))
        if r[0] == "R":
            return ("R", Y.act(r[1], th))
        x, y = r[1], r[2]
        i = x.dim
        a = sum(1 for v in th if v <= i)
        if a == 0:
            return ("R", Y.act(y, tuple(v - i - 1 for v in th)))
        if a == len(th):
            return ("L", X.act(x, th))
        return ("M", X.act(x, th[:a]), Y.act(y, tuple(v - i - 1 for v in th[a:])))

    J = build_degreewise(max(top, 0), raws, act, exact=_exact(X, Y))
    ix = SimplicialMap(X, J, {k: J.normal(("L", X.point(k))) for k in X.keys()})
    iy = SimplicialMap(Y, J, {k: J.normal(("R", Y.point(k))) for k in Y.keys()})
    return J, ix, iy


# ---------------------------------------------------------------------------
# validation and isomorphism


def validate(X: SimplicialSet) -> list[str]:
    """Check key references and the simplicial identities; returns findings."""
    out = []
    for k, fs in X._faces.items():
        n = k[0]
        if len(fs) != n + 1:
            out.append(f"{k}: expected {n + 1} faces, got {len(fs)}")
            continue
        for i, f in enumerate(fs):
            if f.base[0] > n - 1 or f.base[1] >= (X.counts[f.base[0]] if f.base[0] < len(X.counts) else 0):
                out.append(f"{k}: face {i} references missing simplex {f.base}")
            elif f.dim != n - 1:
                out.append(f"{k}: face {i} has dimension {f.dim}")
            elif list(f.op) != sorted(f.op) or set(f.op) != set(range(f.base[0] + 1)):
                out.append(f"{k}: face {i} is not in normal form")
    for d in range(1, len(X.counts)):
        for k in X.keys(d):
            if k not in X._faces:
                out.append(f"{k}: faces missing")
    if out:
        return out
    for k, fs in X._faces.items():
        n = k[0]
        if n < 2:
            continue
        for i in range(n + 1):
            for j in range(i + 1, n + 1):
                lhs = X.face(fs[j], i)
                rhs = X.face(fs[i], j - 1)
                if lhs != rhs:
                    out.append(f"{k}: d_{i} d_{j} != d_{j - 1} d_{i}")
                    return out
    return out


def find_isomorphism(X: SimplicialSet, Y: SimplicialSet, accept=None) -> SimplicialMap | None:
    """Backtracking search for an isomorphism X -> Y.

    ``accept(key, candidate)`` may veto individual assignments, for instance
    to require compatibility with projections or markings.
    """
    if X.counts != Y.counts:
        return None
    order = sorted(X.keys(), key=lambda k: (k[0], _profile(X, k)))
    yprof = {k: _profile(Y, k) for k in Y.keys()}
    used: set = set()
    img: dict = {}

    def apply(s):
        t = img[s.base]
        return Simplex(t.base, tuple(t.op[j] for j in s.op))

    def rec(i):
        if i == len(order):
            return True
        k = order[i]
        prof = _profile(X, k)
        if k[0] == 0:
            cands = Y.nondegenerate(0)
        else:
            fs = tuple(apply(f) for f in X.faces_of(k))
            cands = [c for c in Y.simplices_with_faces(fs) if c.nondegenerate]
        for c in cands:
            if c.base in used or yprof[c.base] != prof:
                continue
            if accept is not None and not accept(k, c):
                continue
            used.add(c.base)
            img[k] = c
            if rec(i + 1):
                return True
            used.discard(c.base)
            del img[k]
        return False

    if rec(0):
        return SimplicialMap(X, Y, img)
    return None


def _profile(X: SimplicialSet, key: Key):
    cof = getattr(X, "_coface_counts", None)
    if cof is None:
        cof = defaultdict(int)
        for k, fs in X._faces.items():
            for f in fs:
                cof[f.base] += 1
        X._coface_counts = cof
    return cof[key]


def is_isomorphic(X: SimplicialSet, Y: SimplicialSet) -> bool:
    return find_isomorphism(X, Y) is not None


def std_simplex(n: int, verts: Sequence[int]) -> Simplex:
    """The simplex of Delta^n with the given monotone vertex sequence."""
    D = standard_simplex(n)
    img = tuple(sorted(set(verts)))
    pos = {v: i for i, v in enumerate(img)}
    return Simplex(D.key_of(img), tuple(pos[v] for v in verts))


def std_vertices(n: int, s: Simplex) -> tuple:
    """Vertex sequence of a simplex of Delta^n."""
    lab = standard_simplex(n).labels[s.base]
    return tuple(lab[j] for j in s.op)


class FiberedComplex:
    """A map p: total -> base, with optional edge markings on the total space."""

    def __init__(self, projection: SimplicialMap, marked=None, **info):
        self.projection = projection
        self.marked = marked
        self.info = info

    @property
    def total(self) -> SimplicialSet:
        return self.projection.source

    @property
    def base(self) -> SimplicialSet:
        return self.projection.target

    def __repr__(self):
        return f"<FiberedComplex {self.total!r} -> {self.base!r}>"
