"""Three-valued weak contractibility.

Pipeline: empty complexes are refuted; an elementary collapse sequence to a
vertex certifies contractibility; nonzero reduced homology refutes it; for
acyclic complexes the fundamental group is presented from a spanning tree and
simplified by Tietze moves.  A trivial presentation certifies contractibility
(an acyclic simply connected complex is contractible), a nontrivial
permutation representation refutes it, and anything else is Unknown.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import permutations, product as iproduct

from .core import SimplicialSet
from .homology import homology

CONTRACTIBLE, NOT_CONTRACTIBLE, UNKNOWN = "Contractible", "NotContractible", "Unknown"


@dataclass
class Budgets:
    collapse_states: int = 100_000
    tietze_passes: int = 2000
    quotient_degree: int = 5
    quotient_assignments: int = 200_000


@dataclass
class ContractibilityVerdict:
    status: str
    evidence: dict = field(default_factory=dict)
    complex: SimplicialSet | None = None

    def __bool__(self):
        return self.status == CONTRACTIBLE

    def replay(self) -> bool:
        """Re-derive the verdict from its evidence."""
        K, ev = self.complex, self.evidence
        kind = ev.get("kind")
        if kind == "empty":
            return K.is_empty
        if kind == "collapse":
            return replay_collapses(K, ev["pairs"])
        if kind == "homology":
            g = homology(K)[ev["degree"]]
            return not g.is_zero
        if kind == "pi1-trivial":
            gens, rels = fundamental_group(K)
            return all(g.is_zero for g in homology(K).values()) and \
                not tietze(gens, rels, Budgets().tietze_passes)[0]
        if kind == "pi1-quotient":
            gens, rels = tietze(*fundamental_group(K), Budgets().tietze_passes)
            return check_representation(gens, rels, ev["images"])
        return False

    def __repr__(self):
        return f"ContractibilityVerdict({self.status}, {self.evidence.get('kind')})"


# ---------------------------------------------------------------------------
# collapses


def _cofaces(K: SimplicialSet, alive: set) -> Counter:
    c = Counter()
    for k in alive:
        if k[0] >= 1:
            for f in K.faces_of(k):
                c[f.base] += 1
    return c


def free_pairs(K: SimplicialSet, alive: set) -> list[tuple]:
    """(tau, sigma): tau occurs once among all faces, as a nondegenerate face of maximal sigma."""
    cof = _cofaces(K, alive)
    has_coface = set(cof)
    out = []
    for s in sorted(alive):
        if s[0] == 0 or s in has_coface:
            continue
        for f in K.faces_of(s):
            if f.nondegenerate and cof[f.base] == 1:
                out.append((f.base, s))
    return out


def collapse_to_point(K: SimplicialSet, budget: int = 100_000):
    """A collapse sequence reducing K to one vertex, or None (also on budget exhaustion)."""
    start = frozenset(K.keys())
    seen = set()
    states = 0

    def rec(alive, seq):
        nonlocal states
        if len(alive) == 1:
            return seq
        if alive in seen or states >= budget:
            return None
        seen.add(alive)
        states += 1
        for tau, sigma in free_pairs(K, alive):
            got = rec(alive - {tau, sigma}, seq + [(tau, sigma)])
            if got is not None:
                return got
        return None

    if not start:
        return None
    return rec(start, [])


def replay_collapses(K: SimplicialSet, pairs) -> bool:
    alive = set(K.keys())
    for tau, sigma in pairs:
        if (tau, sigma) not in free_pairs(K, alive):
            return False
        alive -= {tau, sigma}
    return len(alive) == 1


# ---------------------------------------------------------------------------
# fundamental group


def fundamental_group(K: SimplicialSet):
    """Edge-path presentation relative to a BFS spanning tree at the first vertex.

    Generators are the nondegenerate edges outside the tree; each nondegenerate
    2-simplex gives the relator d2 . d0 . d1^-1.
    """
    if K.is_empty:
        return [], []
    adj = {v.base: [] for v in K.vertices()}
    for k in K.keys(1):
        a, b = (f.base for f in reversed(K.faces_of(k)))
        adj[a].append((k, b))
        adj[b].append((k, a))
    root = K.keys(0)[0]
    tree, seen, queue = set(), {root}, [root]
    while queue:
        v = queue.pop(0)
        for k, w in adj[v]:
            if w not in seen:
                seen.add(w)
                tree.add(k)
                queue.append(w)
    gens = [k for k in K.keys(1) if k not in tree]
    gset = set(gens)

    def letter(f):
        if not f.nondegenerate or f.base not in gset:
            return []
        return [(f.base, 1)]

    rels = []
    for k in K.keys(2):
        d0, d1, d2 = K.faces_of(k)
        w = letter(d2) + letter(d0) + [(g, -e) for g, e in reversed(letter(d1))]
        w = _reduce(w)
        if w:
            rels.append(w)
    return gens, rels


def _reduce(w):
    out = []
    for x in w:
        if out and out[-1][0] == x[0] and out[-1][1] == -x[1]:
            out.pop()
        else:
            out.append(x)
    # cyclic reduction
    while len(out) >= 2 and out[0][0] == out[-1][0] and out[0][1] == -out[-1][1]:
        out = out[1:-1]
    return out


def _substitute(w, g, repl):
    out = []
    for x, e in w:
        if x == g:
            out.extend(repl if e == 1 else [(y, -f) for y, f in reversed(repl)])
        else:
            out.append((x, e))
    return _reduce(out)


def tietze(gens, rels, passes: int = 2000):
    """Eliminate generators occurring exactly once in some relator."""
    gens, rels = list(gens), [r for r in (_reduce(r) for r in rels) if r]
    for _ in range(passes):
        changed = False
        for r in rels:
            cnt = Counter(g for g, _ in r)
            solo = next((g for g in cnt if cnt[g] == 1), None)
            if solo is None:
                continue
            i = next(i for i, (g, _) in enumerate(r) if g == solo)
            e = r[i][1]
            # r = u g^e v = 1  =>  g^e = u^-1 v^-1 (cyclically: g^e = (v u)^-1)
            rest = r[i + 1:] + r[:i]
            inv = [(y, -f) for y, f in reversed(rest)]
            repl = inv if e == 1 else [(y, -f) for y, f in reversed(inv)]
            gens.remove(solo)
            rels = [s for s in (_substitute(x, solo, repl) for x in rels if x is not r) if s]
            changed = True
            break
        if not changed:
            break
    return gens, rels


def _perm_mul(a, b):
    return tuple(a[i] for i in b)


def _perm_inv(a):
    out = [0] * len(a)
    for i, v in enumerate(a):
        out[v] = i
    return tuple(out)


def _eval(word, images, n):
    acc = tuple(range(n))
    for g, e in word:
        p = images[g] if e == 1 else _perm_inv(images[g])
        acc = _perm_mul(acc, p)
    return acc


def check_representation(gens, rels, images) -> bool:
    """images satisfy every relator and are not all trivial."""
    if not images:
        return False
    n = len(next(iter(images.values())))
    ident = tuple(range(n))
    if set(images) != set(gens):
        return False
    return all(_eval(r, images, n) == ident for r in rels) and any(v != ident for v in images.values())


def small_quotient(gens, rels, max_degree: int = 5, max_assignments: int = 200_000):
    """A nontrivial homomorphism to some S_k (k <= max_degree), or None."""
    for n in range(2, max_degree + 1):
        perms = list(permutations(range(n)))
        if len(perms) ** len(gens) > max_assignments:
            return None
        for combo in iproduct(perms, repeat=len(gens)):
            images = dict(zip(gens, combo))
            if check_representation(gens, rels, images):
                return images
    return None


# ---------------------------------------------------------------------------


def is_weakly_contractible(K: SimplicialSet, budgets: Budgets | None = None) -> ContractibilityVerdict:
    b = budgets or Budgets()
    if K.is_empty:
        return ContractibilityVerdict(NOT_CONTRACTIBLE, {"kind": "empty", "degree": -1}, K)
    seq = collapse_to_point(K, b.collapse_states)
    if seq is not None:
        return ContractibilityVerdict(CONTRACTIBLE, {"kind": "collapse", "pairs": seq}, K)
    H = homology(K)
    for n, g in sorted(H.items()):
        if not g.is_zero:
            return ContractibilityVerdict(NOT_CONTRACTIBLE,
                                          {"kind": "homology", "degree": n, "group": repr(g)}, K)
    gens, rels = fundamental_group(K)
    g2, r2 = tietze(gens, rels, b.tietze_passes)
    if not g2:
        return ContractibilityVerdict(CONTRACTIBLE, {"kind": "pi1-trivial"}, K)
    img = small_quotient(g2, r2, b.quotient_degree, b.quotient_assignments)
    if img is not None:
        return ContractibilityVerdict(NOT_CONTRACTIBLE, {"kind": "pi1-quotient", "images": img}, K)
    return ContractibilityVerdict(UNKNOWN, {"kind": "budget", "generators": len(g2),
                                            "relators": len(r2)}, K)
