"""Reduced integral homology of finite simplicial sets.

The normalized chain complex has the nondegenerate simplices as basis; the
augmentation in degree -1 makes the homology reduced.  Invariant factors come
from a Smith normal form over Python integers, so there is no overflow.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import SimplicialSet


def boundary_matrix(K: SimplicialSet, n: int) -> list[list[int]]:
    """Matrix of d: C_n -> C_{n-1} (rows indexed by (n-1)-keys); n = 0 is the augmentation."""
    cols = K.keys(n)
    if n == 0:
        return [[1] * len(cols)]
    rows = {k: i for i, k in enumerate(K.keys(n - 1))}
    M = [[0] * len(cols) for _ in rows]
    for j, k in enumerate(cols):
        for i, f in enumerate(K.faces_of(k)):
            if f.nondegenerate:
                M[rows[f.base]][j] += -1 if i % 2 else 1
    return M


def smith_invariants(M: list[list[int]]) -> list[int]:
    """Nonzero invariant factors d_1 | d_2 | ... of an integer matrix."""
    A = [row[:] for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    out = []
    t = 0
    while t < min(m, n):
        piv = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (piv is None or abs(A[i][j]) < abs(A[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        i, j = piv
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        while True:
            p = A[t][t]
            done = True
            for i in range(t + 1, m):
                q = A[i][t] // p
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                if A[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = A[t][j] // p
                if q:
                    for row in A:
                        row[j] -= q * row[t]
                if A[t][j]:
                    done = False
            if not done:
                # move a smaller remainder into the pivot position
                best = min(((abs(A[i][t]), i, t) for i in range(t + 1, m) if A[i][t]),
                           default=None)
                bestc = min(((abs(A[t][j]), t, j) for j in range(t + 1, n) if A[t][j]),
                            default=None)
                cand = min(x for x in (best, bestc) if x is not None)
                _, i, j = cand
                if j == t:
                    A[t], A[i] = A[i], A[t]
                else:
                    for row in A:
                        row[t], row[j] = row[j], row[t]
                continue
            # divisibility of the remaining block
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % p), None)
            if bad is None:
                break
            A[t] = [a + b for a, b in zip(A[t], A[bad[0]])]
        out.append(abs(A[t][t]))
        t += 1
    return out


@dataclass
class HomologyGroup:
    betti: int = 0
    torsion: list = field(default_factory=list)

    @property
    def is_zero(self) -> bool:
        return self.betti == 0 and not self.torsion

    def __repr__(self):
        parts = ["Z" if self.betti == 1 else f"Z^{self.betti}"] if self.betti else []
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) or "0"


def homology(K: SimplicialSet) -> dict[int, HomologyGroup]:
    """Reduced homology groups in degrees -1 .. dim K."""
    top = K.dim
    ranks, invs = {}, {}
    for n in range(0, top + 1):
        d = smith_invariants(boundary_matrix(K, n))
        ranks[n], invs[n] = len(d), d
    ranks[top + 1], invs[top + 1] = 0, []
    out = {}
    # degree -1: C_{-1} = Z
    out[-1] = HomologyGroup(1 - ranks.get(0, 0) if top >= 0 else 1, [])
    for n in range(0, top + 1):
        dim_c = K.counts[n]
        betti = dim_c - ranks[n] - ranks[n + 1]
        tors = [x for x in invs[n + 1] if x > 1]
        out[n] = HomologyGroup(betti, tors)
    return out


def is_acyclic(K: SimplicialSet) -> bool:
    return all(g.is_zero for g in homology(K).values())


def first_nonzero(K: SimplicialSet):
    """(degree, group) of the lowest nonzero reduced homology group, or None."""
    for n, g in sorted(homology(K).items()):
        if not g.is_zero:
            return n, g
    return None


def euler_characteristic(K: SimplicialSet) -> int:
    return sum((-1) ** n * c for n, c in enumerate(K.counts))
