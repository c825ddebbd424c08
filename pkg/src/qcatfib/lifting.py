"""Map enumeration and lifting problems.

Every check in the package reduces to one backtracking search: assign images
to nondegenerate simplices in increasing dimension, taking candidates from the
target's face index (simplices with exactly the required faces), optionally
constrained to lie over prescribed simplices of a base.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .core import (
    Simplex,
    SimplicialMap,
    SimplicialSet,
    boundary,
    horn,
    identity_op,
    simplex_map,
    standard_simplex,
)

HOLDS, FAILS, UNKNOWN = "Holds", "Fails", "Unknown"


def search(A: SimplicialSet, X: SimplicialSet, fixed: dict | None = None,
           over: tuple | None = None, keys=None, order=None, accept=None) -> Iterator[dict]:
    """Yield assignments ``key -> Simplex of X`` extending ``fixed``.

    ``over = (p, target_of)`` restricts the image of each key ``a`` to the
    simplices ``c`` with ``p(c) == target_of(a)``.  ``keys`` limits which keys
    of A are assigned (they must be closed under taking faces together with
    ``fixed``).  ``order`` optionally permutes the candidate lists, as a
    function ``list -> list``.  ``accept(key, candidate)`` is an extra filter.
    """
    img = dict(fixed or {})
    todo = _schedule(A, [k for k in (A.keys() if keys is None else keys) if k not in img], img)
    p, target_of = over if over else (None, None)

    def apply(s: Simplex) -> Simplex:
        t = img[s.base]
        if s.nondegenerate:
            return t
        return Simplex(t.base, tuple(t.op[j] for j in s.op))

    def candidates(k):
        n = k[0]
        if n == 0:
            cands = X.nondegenerate(0)
        else:
            cands = X.simplices_with_faces(tuple(apply(f) for f in A.faces_of(k)))
        if p is not None:
            want = target_of(k)
            cands = [c for c in cands if p(c) == want]
        if accept is not None:
            cands = [c for c in cands if accept(k, c)]
        if order is not None:
            cands = order(cands)
        return cands

    def rec(i):
        if i == len(todo):
            yield dict(img)
            return
        k = todo[i]
        for c in candidates(k):
            img[k] = c
            yield from rec(i + 1)
        img.pop(k, None)

    yield from rec(0)


def _schedule(A: SimplicialSet, todo: list, fixed: dict) -> list:
    """Order keys so that each simplex comes right after the last of its faces.

    Face constraints are then checked as early as possible, which prunes the
    search far sooner than assigning all vertices first.
    """
    pending = set(todo)
    missing, waiting = {}, {}
    for k in todo:
        if k[0] == 0:
            continue
        fs = {f.base for f in A.faces_of(k)} & pending
        missing[k] = len(fs)
        for f in fs:
            waiting.setdefault(f, []).append(k)
    out = []

    def place(k):
        out.append(k)
        ready = []
        for d in waiting.get(k, ()):
            missing[d] -= 1
            if missing[d] == 0:
                ready.append(d)
        for d in sorted(ready):
            place(d)

    for k in sorted(k for k in todo if missing.get(k, 0) == 0):
        place(k)
    return out


def enumerate_maps(A: SimplicialSet, X: SimplicialSet, over=None, fixed=None) -> list[SimplicialMap]:
    """All simplicial maps A -> X (optionally over a base, extending ``fixed``).

    ``over = (p, q)`` with ``p: X -> S`` and ``q: A -> S`` restricts to maps
    ``f`` with ``p o f == q``.
    """
    ov = None
    if over is not None:
        p, q = over
        ov = (p, q.on_key)
    return [SimplicialMap(A, X, m) for m in search(A, X, fixed=fixed, over=ov)]


def count_maps(A: SimplicialSet, X: SimplicialSet, over=None) -> int:
    ov = None
    if over is not None:
        p, q = over
        ov = (p, q.on_key)
    return sum(1 for _ in search(A, X, over=ov))


@dataclass
class LiftingProblem:
    """Commutative square  A --top--> X ;  B --bottom--> S ;  A >-> B ;  p: X -> S."""

    inclusion: SimplicialMap
    top: SimplicialMap
    bottom: SimplicialMap
    projection: SimplicialMap
    label: str = ""

    def commutes(self) -> bool:
        i, t, b, p = self.inclusion, self.top, self.bottom, self.projection
        return all(p(t.on_key(k)) == b(i.on_key(k)) for k in i.source.keys())

    def replay(self) -> bool:
        """True when the square still commutes and still has no lift."""
        return self.commutes() and extend(self) is None


def extend(problem: LiftingProblem, order=None) -> SimplicialMap | None:
    """A lift B -> X of the square, or None after exhausting the search."""
    i, t, b, p = problem.inclusion, problem.top, problem.bottom, problem.projection
    B, X = i.target, t.target
    fixed = {}
    for k in i.source.keys():
        s = i.on_key(k)
        fixed[s.base] = t.on_key(k)
    for m in search(B, X, fixed=fixed, over=(p, b.on_key), order=order):
        return SimplicialMap(B, X, m)
    return None


# ---------------------------------------------------------------------------
# inclusion families


def horn_family(kind: str, n: int) -> list[int]:
    """Horn indices k for Lambda^n_k in a fibration class."""
    if kind == "left":
        return list(range(0, n))
    if kind == "right":
        return list(range(1, n + 1))
    if kind == "kan":
        return list(range(0, n + 1))
    if kind == "inner":
        return list(range(1, n))
    raise ValueError(f"unknown horn family {kind!r}")


@dataclass
class Verdict:
    """Three-valued outcome with evidence.

    ``squares`` counts the lifting problems checked and ``bound`` is the
    dimension bound reached.  A Fails verdict carries a ``witness`` with a
    ``replay()`` method returning True while the failure persists.
    """

    status: str
    bound: int | None = None
    squares: int = 0
    witness: object = None
    reason: str = ""
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return self.status == HOLDS

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    @property
    def fails(self) -> bool:
        return self.status == FAILS

    def __repr__(self):
        extra = f", reason={self.reason!r}" if self.reason else ""
        return f"Verdict({self.status}, bound={self.bound}, squares={self.squares}{extra})"


class _Cell:
    """Delta^n with a subcomplex A and key bookkeeping for fast square loops."""

    _cache: dict = {}

    def __new__(cls, kind, n, k=None):
        ck = (kind, n, k)
        if ck not in cls._cache:
            self = super().__new__(cls)
            self.kind, self.n, self.k = kind, n, k
            if kind == "horn":
                A, inc = horn(n, k)
            else:
                A, inc = boundary(n)
            self.A, self.inc = A, inc
            self.B = standard_simplex(n)
            self.a_keys = [inc.on_key(a).base for a in A.keys()]
            self.a_set = set(self.a_keys)
            self.rest = [b for b in self.B.keys() if b not in self.a_set]
            cls._cache[ck] = self
        return cls._cache[ck]

    def problem(self, X, S, p, sigma: Simplex, top_imgs: dict) -> LiftingProblem:
        top = SimplicialMap(self.A, X, {a: top_imgs[self.inc.on_key(a).base] for a in self.A.keys()})
        bot = simplex_map(S, sigma, self.n)
        return LiftingProblem(self.inc, top, bot, p,
                              label=f"{'Lambda' if self.kind == 'horn' else 'dDelta'}^{self.n}"
                              + (f"_{self.k}" if self.kind == "horn" else ""))


def effective_bound(bound: int, *sets: SimplicialSet) -> int:
    """Clamp a bound to the truncation level of truncated inputs."""
    for X in sets:
        if not X.exact and X.truncation is not None:
            bound = min(bound, X.truncation)
    return bound


def solve_cell(cell: _Cell, X, S, p, sigma: Simplex, fixed=None):
    """Iterate over the squares with bottom ``sigma``; yield (top, lift-or-None)."""
    B = cell.B
    bottom = {b: S.act(sigma, B.labels[b]) for b in B.keys()}
    for top in search(B, X, fixed=fixed, over=(p, bottom.__getitem__), keys=cell.a_keys):
        lift = None
        for full in search(B, X, fixed=top, over=(p, bottom.__getitem__)):
            lift = full
            break
        yield top, lift


def has_rlp(p: SimplicialMap, family, dim_bound: int | None = None) -> Verdict:
    """Right lifting property of p against horn or boundary inclusions.

    ``family`` is one of 'left', 'right', 'kan', 'inner' (horns) or
    'boundary'.  Squares are enumerated by dimension, then bottom simplex, then
    top map; the first unliftable square is returned as the witness.
    """
    X, S = p.source, p.target
    if dim_bound is None:
        dim_bound = max(X.dim, S.dim) + 2
    bound = effective_bound(dim_bound, X, S)
    squares = 0
    for n in range(0 if family == "boundary" else 1, bound + 1):
        cells = [_Cell("boundary", n)] if family == "boundary" else [
            _Cell("horn", n, k) for k in horn_family(family, n)]
        for sigma in S.simplices(n):
            for cell in cells:
                for top, lift in solve_cell(cell, X, S, p, sigma):
                    squares += 1
                    if lift is None:
                        w = cell.problem(X, S, p, sigma, top)
                        return Verdict(FAILS, bound, squares, witness=w,
                                       reason=f"no lift for {w.label}")
    return Verdict(HOLDS, bound, squares)


def lift_exists(X, S, p, B: SimplicialSet, fixed: dict, bottom: dict) -> bool:
    for _ in search(B, X, fixed=fixed, over=(p, bottom.__getitem__)):
        return True
    return False
