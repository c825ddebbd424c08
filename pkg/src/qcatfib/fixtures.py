"""Bundled JSON fixtures.

The files under ``qcatfib/fixtures/`` are generated from :mod:`qcatfib.corpus`
by :func:`write_fixtures`; the CLI resolves bare fixture names against them.
"""

from __future__ import annotations

import os
from importlib import resources

from . import corpus
from .core import SimplicialMap, identity_map
from .serialize import Bundle, dumps, load

FIXTURE_DIR = "fixtures"


def _single_complex(name, X) -> Bundle:
    b = Bundle()
    b.add_complex(X, name)
    return b


def _single_map(name, f: SimplicialMap, meta=None) -> Bundle:
    b = Bundle()
    b.add_complex(f.source, "source")
    b.add_complex(f.target, "target" if f.target is not f.source else "source")
    b.add_map(f, name)
    b.meta = {"map": name, **(meta or {})}
    return b


def prop_6_5_bundle() -> Bundle:
    """The span B <- O(B) x_B A -> A for {1} in Delta^1, with a cocartesian q over A."""
    from .patterns import prop_6_5_span

    phi = corpus.prop_6_5_phi()
    pi, rho, E = prop_6_5_span(phi)
    B, A, X = pi.target, rho.target, pi.source
    b = Bundle()
    b.add_complex(X, "X")
    b.add_complex(B, "S")
    b.add_complex(A, "T")
    b.add_map(pi, "pi")
    b.add_map(rho, "rho")
    # q: Delta^1 -> A, a cocartesian fibration over the point
    D1 = corpus.simplex(1)
    b.add_complex(D1, "Y")
    q = corpus.to_point(D1)
    assert q.target is A
    b.add_map(q, "q")
    b.add_map(phi, "phi")
    for n, Y in (("X", X), ("S", B), ("T", A)):
        b.marked[n] = set(Y.simplices(1))
        b.scaled[n] = set(Y.simplices(2))
    b.meta = {"span": {"pi": "pi", "rho": "rho", "q": "q"}}
    return b


def build_fixtures() -> dict:
    """name -> Bundle for every shipped fixture."""
    out = {}
    for name, X in corpus.complexes().items():
        out[name] = _single_complex(name, X)
    for name, f in corpus.maps().items():
        out[name] = _single_map(name, f)
    for name, _, Np in corpus.grothendieck_nerve_maps(3):
        out.setdefault(f"groth_{name}", _single_map(f"groth_{name}", Np))
    out["slice_projection"] = _single_map("slice_projection", corpus.slice_fixture())
    out["simplex1_over_point"] = _single_map("simplex1_over_point", corpus.to_point(corpus.simplex(1)))
    out["flatness_counterexample"] = _single_map("flatness_counterexample", corpus.flatness_counterexample())
    out["prop_6_5_span"] = prop_6_5_bundle()
    out["identity_simplex2_pattern"] = _pattern_bundle()
    return out


def _pattern_bundle() -> Bundle:
    """Identity of Delta^2 with all edges marked over the pattern (S_1, S_2, empty)."""
    D2 = corpus.simplex(2)
    b = _single_map("identity", identity_map(D2))
    b.marked["source"] = set(D2.simplices(1))
    b.scaled["source"] = set(D2.simplices(2))
    return b


def write_fixtures(directory) -> list[str]:
    os.makedirs(directory, exist_ok=True)
    written = []
    for name, b in build_fixtures().items():
        path = os.path.join(directory, f"{name}.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dumps(b.to_doc()) + "\n")
        written.append(path)
    return written


def fixture_names() -> list[str]:
    root = resources.files("qcatfib") / FIXTURE_DIR
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def fixture_path(name: str):
    return resources.files("qcatfib") / FIXTURE_DIR / f"{name}.json"


def resolve(ref: str) -> str:
    """A path for ``ref``: an existing file, or the name of a bundled fixture."""
    if os.path.exists(ref):
        return ref
    p = fixture_path(ref[:-5] if ref.endswith(".json") else ref)
    if p.is_file():
        return str(p)
    raise FileNotFoundError(ref)


def load_fixture(name: str) -> Bundle:
    return load(resolve(name))


if __name__ == "__main__":
    import sys

    target = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), FIXTURE_DIR)
    for p in write_fixtures(target):
        print(p)
