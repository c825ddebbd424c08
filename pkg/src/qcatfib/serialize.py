"""JSON format for complexes, maps, markings, verdicts and witnesses.

A complex is ``{"grades": [[names of vertices], [names of edges], ...],
"faces": {name: [expr of d_0, ..., expr of d_n]}}`` where an expression is a
simplex name optionally preceded by degeneracies, as in ``"s_1 s_0 a"``.
Maps are ``{"source": ref, "target": ref, "images": {name: expr}}``.

A bundle groups named complexes and maps; complexes may carry "marked",
"scaled" and "cones" arrays describing a marking or a categorical pattern.
Witness documents are self-contained bundles that can be replayed.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .core import (
    Simplex,
    SimplicialMap,
    SimplicialSet,
    from_faces,
    op_to_word,
    validate,
    word_to_op,
)

_NAME = re.compile(r"^[^\s\"]+$")
_DEGEN = re.compile(r"^s_\{?(\d+)\}?$")


class ParseError(ValueError):
    """Input error with a position in the source text (1-based, 0 when unknown)."""

    def __init__(self, message: str, line: int = 0, col: int = 0, path: str = ""):
        self.message, self.line, self.col, self.path = message, line, col, path
        where = f"{path}:" if path else ""
        super().__init__(f"{where}{line}:{col}: {message}")


def _locate(text: str | None, token) -> tuple[int, int]:
    """Position of the first occurrence of a JSON string literal in the text."""
    if not text:
        return 0, 0
    needle = json.dumps(token) if isinstance(token, str) else str(token)
    i = text.find(needle)
    if i < 0:
        return 0, 0
    line = text.count("\n", 0, i) + 1
    col = i - (text.rfind("\n", 0, i) + 1) + 1
    return line, col


class _Ctx:
    def __init__(self, text=None, path=""):
        self.text, self.path = text, path

    def error(self, message, token=None):
        line, col = _locate(self.text, token) if token is not None else (0, 0)
        return ParseError(message, line, col, self.path)


# ---------------------------------------------------------------------------
# names and expressions


def simplex_names(X: SimplicialSet) -> dict:
    """Name per nondegenerate key.

    String labels are reused when valid and unique, vertex-tuple labels become
    digit strings such as "012"; otherwise names are ``x{dim}_{index}``
    (dimension-lexicographic).
    """
    labs = [X.labels.get(k) for k in X.keys()]
    if all(isinstance(v, tuple) and v and all(isinstance(i, int) and 0 <= i < 10 for i in v)
           for v in labs):
        labs = ["".join(map(str, v)) for v in labs]
    if all(isinstance(v, str) and _NAME.match(v) and not _DEGEN.match(v) for v in labs) \
            and len(set(labs)) == len(labs):
        return dict(zip(X.keys(), labs))
    return {k: f"x{k[0]}_{k[1]}" for k in X.keys()}


def simplex_expr(s: Simplex, names: dict) -> str:
    word = op_to_word(s.op)
    return " ".join([f"s_{i}" for i in word] + [names[s.base]])


def parse_expr(expr, by_name: dict, dims: dict, ctx: _Ctx) -> Simplex:
    if not isinstance(expr, str):
        raise ctx.error(f"expected a simplex expression, got {expr!r}", expr)
    toks = expr.split()
    if not toks:
        raise ctx.error("empty simplex expression", expr)
    *degs, name = toks
    if name not in by_name:
        raise ctx.error(f"unknown simplex {name!r}", expr)
    key = by_name[name]
    word = []
    for t in degs:
        m = _DEGEN.match(t)
        if not m:
            raise ctx.error(f"bad degeneracy {t!r}", expr)
        word.append(int(m.group(1)))
    d = key[0]
    for i in reversed(word):
        if i > d:
            raise ctx.error(f"degeneracy s_{i} out of range in {expr!r}", expr)
        d += 1
    return Simplex(key, word_to_op(word, key[0]))


# ---------------------------------------------------------------------------
# complexes


def complex_to_doc(X: SimplicialSet, names: dict | None = None) -> dict:
    names = names or simplex_names(X)
    doc = {"grades": [[names[k] for k in X.keys(n)] for n in range(X.dim + 1)],
           "faces": {names[k]: [simplex_expr(f, names) for f in X.faces_of(k)]
                     for k in X.keys() if k[0] >= 1}}
    if not X.exact:
        doc["truncation"] = X.truncation
    if isinstance(X.name, str):
        doc["name"] = X.name
    return doc


def complex_from_doc(doc, ctx: _Ctx | None = None) -> SimplicialSet:
    ctx = ctx or _Ctx()
    if not isinstance(doc, dict) or "grades" not in doc:
        raise ctx.error("a complex needs a \"grades\" array", "grades")
    grades = doc["grades"]
    faces_doc = doc.get("faces", {})
    if not isinstance(grades, list) or not all(isinstance(g, list) for g in grades):
        raise ctx.error("\"grades\" must be an array of arrays of names", "grades")
    if not isinstance(faces_doc, dict):
        raise ctx.error("\"faces\" must be an object", "faces")
    by_name, labels, counts = {}, {}, []
    for n, g in enumerate(grades):
        counts.append(len(g))
        for i, name in enumerate(g):
            if not isinstance(name, str) or not _NAME.match(name) or _DEGEN.match(name):
                raise ctx.error(f"invalid simplex name {name!r}", name)
            if name in by_name:
                raise ctx.error(f"duplicate simplex name {name!r}", name)
            by_name[name] = (n, i)
            labels[(n, i)] = name
    dims = {nm: k[0] for nm, k in by_name.items()}
    faces = {}
    for name, key in by_name.items():
        if key[0] == 0:
            if name in faces_doc:
                raise ctx.error(f"vertex {name!r} cannot have faces", name)
            continue
        fl = faces_doc.get(name)
        if fl is None:
            raise ctx.error(f"missing faces for {name!r}", name)
        if not isinstance(fl, list) or len(fl) != key[0] + 1:
            raise ctx.error(f"{name!r} needs {key[0] + 1} faces", name)
        fs = []
        for e in fl:
            s = parse_expr(e, by_name, dims, ctx)
            if s.dim != key[0] - 1:
                raise ctx.error(f"face {e!r} of {name!r} has dimension {s.dim}", e)
            if s.base[0] >= key[0]:
                raise ctx.error(f"face {e!r} of {name!r} is not of lower dimension", e)
            fs.append(s)
        faces[key] = tuple(fs)
    extra = set(faces_doc) - set(by_name)
    if extra:
        bad = sorted(extra)[0]
        raise ctx.error(f"faces given for unknown simplex {bad!r}", bad)
    trunc = doc.get("truncation")
    X = from_faces(counts, faces, labels, exact=trunc is None, truncation=trunc,
                   name=doc.get("name"))
    problems = validate(X)
    if problems:
        raise ctx.error(f"simplicial identity violated: {problems[0]}")
    return X


# ---------------------------------------------------------------------------
# maps


def map_to_doc(f: SimplicialMap, src_ref, tgt_ref, src_names=None, tgt_names=None) -> dict:
    src_names = src_names or simplex_names(f.source)
    tgt_names = tgt_names or simplex_names(f.target)
    return {"source": src_ref, "target": tgt_ref,
            "images": {src_names[k]: simplex_expr(f.on_key(k), tgt_names) for k in f.source.keys()}}


def map_from_doc(doc, complexes: dict, ctx: _Ctx | None = None) -> SimplicialMap:
    ctx = ctx or _Ctx()
    if not isinstance(doc, dict):
        raise ctx.error("a map must be an object")
    for end in ("source", "target"):
        if doc.get(end) not in complexes:
            raise ctx.error(f"unknown {end} complex {doc.get(end)!r}", doc.get(end))
    X, Y = complexes[doc["source"]], complexes[doc["target"]]
    xs, ys = _index(X), _index(Y)
    images = doc.get("images", {})
    if not isinstance(images, dict):
        raise ctx.error("\"images\" must be an object", "images")
    out = {}
    for name, key in xs.items():
        if name not in images:
            raise ctx.error(f"missing image for {name!r}", name)
        s = parse_expr(images[name], ys, None, ctx)
        if s.dim != key[0]:
            raise ctx.error(f"image of {name!r} has dimension {s.dim}", images[name])
        out[key] = s
    extra = set(images) - set(xs)
    if extra:
        bad = sorted(extra)[0]
        raise ctx.error(f"image given for unknown simplex {bad!r}", bad)
    f = SimplicialMap(X, Y, out)
    v = f.violations()
    if v:
        raise ctx.error(f"not a simplicial map: {v[0]}")
    return f


def _index(X: SimplicialSet) -> dict:
    return {n: k for k, n in simplex_names(X).items()}


# ---------------------------------------------------------------------------
# bundles


@dataclass
class Bundle:
    """Named complexes and maps, with optional markings and patterns."""

    complexes: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    marked: dict = field(default_factory=dict)   # complex name -> set of edges
    scaled: dict = field(default_factory=dict)   # complex name -> set of 2-simplices
    cones: dict = field(default_factory=dict)    # complex name -> list of (K name, map name)
    meta: dict = field(default_factory=dict)

    def complex_name(self, X: SimplicialSet) -> str:
        for n, Y in self.complexes.items():
            if Y is X:
                return n
        raise KeyError("complex not in bundle")

    def add_complex(self, X: SimplicialSet, name: str | None = None) -> str:
        for n, Y in self.complexes.items():
            if Y is X:
                return n
        name = name or f"c{len(self.complexes)}"
        self.complexes[name] = X
        return name

    def add_map(self, f: SimplicialMap, name: str | None = None) -> str:
        self.add_complex(f.source)
        self.add_complex(f.target)
        name = name or f"m{len(self.maps)}"
        self.maps[name] = f
        return name

    def to_doc(self) -> dict:
        names = {n: simplex_names(X) for n, X in self.complexes.items()}
        cdocs = {}
        for n, X in self.complexes.items():
            d = complex_to_doc(X, names[n])
            if n in self.marked:
                d["marked"] = sorted(simplex_expr(e, names[n]) for e in self.marked[n] if e.nondegenerate)
            if n in self.scaled:
                d["scaled"] = sorted(simplex_expr(t, names[n]) for t in self.scaled[n] if t.nondegenerate)
            if n in self.cones:
                d["cones"] = [{"K": k, "map": m} for k, m in self.cones[n]]
            cdocs[n] = d
        mdocs = {}
        for n, f in self.maps.items():
            s, t = self.complex_name(f.source), self.complex_name(f.target)
            mdocs[n] = map_to_doc(f, s, t, names[s], names[t])
        doc = {"complexes": cdocs, "maps": mdocs}
        doc.update(self.meta)
        return doc


def bundle_from_doc(doc, ctx: _Ctx | None = None) -> Bundle:
    ctx = ctx or _Ctx()
    if isinstance(doc, dict) and "grades" in doc:
        doc = {"complexes": {"X": doc}}
    if not isinstance(doc, dict) or "complexes" not in doc:
        raise ctx.error("expected a complex or an object with \"complexes\"")
    b = Bundle()
    cdocs = doc["complexes"]
    if not isinstance(cdocs, dict):
        raise ctx.error("\"complexes\" must be an object", "complexes")
    for n, cd in cdocs.items():
        b.complexes[n] = complex_from_doc(cd, ctx)
    mdocs = doc.get("maps", {})
    if not isinstance(mdocs, dict):
        raise ctx.error("\"maps\" must be an object", "maps")
    for n, md in mdocs.items():
        b.maps[n] = map_from_doc(md, b.complexes, ctx)
    for n, cd in cdocs.items():
        X = b.complexes[n]
        idx = _index(X)
        if "marked" in cd:
            es = {parse_expr(e, idx, None, ctx) for e in cd["marked"]}
            bad = [e for e in es if e.dim != 1]
            if bad:
                raise ctx.error(f"marked simplex {bad[0]} is not an edge", "marked")
            b.marked[n] = es
        if "scaled" in cd:
            ts = {parse_expr(e, idx, None, ctx) for e in cd["scaled"]}
            bad = [t for t in ts if t.dim != 2]
            if bad:
                raise ctx.error(f"scaled simplex {bad[0]} is not a 2-simplex", "scaled")
            b.scaled[n] = ts
        if "cones" in cd:
            out = []
            for c in cd["cones"]:
                if not isinstance(c, dict) or c.get("K") not in b.complexes or c.get("map") not in b.maps:
                    raise ctx.error("a cone needs existing \"K\" complex and \"map\"", "cones")
                out.append((c["K"], c["map"]))
            b.cones[n] = out
    b.meta = {k: v for k, v in doc.items() if k not in ("complexes", "maps")}
    return b


def loads(text: str, path: str = "") -> Bundle:
    ctx = _Ctx(text, path)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno, path) from None
    return bundle_from_doc(doc, ctx)


def load(path) -> Bundle:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), str(path))


def dumps(obj, indent: int | None = 1) -> str:
    return json.dumps(obj, indent=indent, sort_keys=False)


def dump_complex(X: SimplicialSet) -> str:
    return dumps(complex_to_doc(X))


# ---------------------------------------------------------------------------
# values inside reports and witnesses


def _simplex_doc(s: Simplex) -> list:
    return [s.base[0], s.base[1], list(s.op)]


def _simplex_of(d) -> Simplex:
    return Simplex((d[0], d[1]), tuple(d[2]))


class _Encoder:
    """Turns nested witness data into JSON, collecting complexes and maps into a bundle."""

    def __init__(self):
        self.bundle = Bundle()

    def value(self, v):
        from .lifting import Verdict

        if isinstance(v, Simplex):
            return {"simplex": _simplex_doc(v)}
        if isinstance(v, SimplicialMap):
            for n, f in self.bundle.maps.items():
                if f is v:
                    return {"map": n}
            return {"map": self.bundle.add_map(v)}
        if isinstance(v, SimplicialSet):
            return {"complex": self.bundle.add_complex(v)}
        if isinstance(v, Verdict):
            return verdict_to_doc(v, self)
        if isinstance(v, (set, frozenset)):
            return {"set": sorted((self.value(x) for x in v), key=json.dumps)}
        if isinstance(v, (list, tuple)):
            return [self.value(x) for x in v]
        if isinstance(v, dict):
            return {str(k): self.value(x) for k, x in v.items()}
        if hasattr(v, "replay"):
            return witness_to_doc(v, self)
        if isinstance(v, (str, int, float, bool)) or v is None:
            return v
        return repr(v)


def _decode(v, b: Bundle):
    if isinstance(v, dict):
        if set(v) == {"simplex"}:
            return _simplex_of(v["simplex"])
        if set(v) == {"map"}:
            return b.maps[v["map"]]
        if set(v) == {"complex"}:
            return b.complexes[v["complex"]]
        if set(v) == {"set"}:
            return {_decode(x, b) for x in v["set"]}
        if "witness" in v and "fields" in v:
            return _witness_from(v, b)
        return {k: _decode(x, b) for k, x in v.items()}
    if isinstance(v, list):
        return [_decode(x, b) for x in v]
    return v


def _witness_classes() -> dict:
    from .contractible import ContractibilityVerdict
    from .fibrations import CompositeWitness, NoCocartesianLift, NoEquivalenceLift
    from .flatness import NotFlatWitness
    from .lifting import LiftingProblem
    from .patterns import ConeSectionWitness, EdgeCondition, MarkingMismatch, ScaledEdgeWitness

    classes = [LiftingProblem, NoEquivalenceLift, CompositeWitness, NoCocartesianLift,
               NotFlatWitness, MarkingMismatch, ScaledEdgeWitness, EdgeCondition,
               ConeSectionWitness, ContractibilityVerdict]
    return {c.__name__: c for c in classes}


def _fields(w) -> dict:
    from dataclasses import fields as dc_fields

    return {f.name: getattr(w, f.name) for f in dc_fields(w)}


def witness_to_doc(w, enc: _Encoder | None = None) -> dict:
    top = enc is None
    enc = enc or _Encoder()
    name = type(w).__name__
    if name not in _witness_classes():
        raise TypeError(f"cannot serialize witness of type {name}")
    if name == "ContractibilityVerdict":
        # kept for information only; replays recompute it
        fields = {"status": w.status, "evidence": {"kind": w.evidence.get("kind")}, "complex": None}
    else:
        fields = {k: enc.value(v) for k, v in _fields(w).items()}
    body = {"witness": name, "fields": fields}
    if top:
        return {"bundle": enc.bundle.to_doc(), **body}
    return body


def _witness_from(d, b: Bundle):
    cls = _witness_classes()[d["witness"]]
    kwargs = {k: _decode(v, b) for k, v in d["fields"].items()}
    if cls.__name__ == "NoCocartesianLift":
        kwargs["candidates"] = [tuple(c) for c in kwargs["candidates"]]
    return cls(**kwargs)


def witness_from_doc(doc):
    """Rebuild a witness (with its complexes and maps) from :func:`witness_to_doc` output."""
    b = bundle_from_doc(doc["bundle"])
    return _witness_from(doc, b)


def verdict_to_doc(v, enc: _Encoder | None = None) -> dict:
    """Structured form of a Verdict: one field per Verdict attribute."""
    top = enc is None
    enc = enc or _Encoder()
    out = {"status": v.status, "bound": v.bound, "squares": v.squares, "reason": v.reason,
           "detail": enc.value(v.detail) if v.detail else {},
           "witness": witness_to_doc(v.witness, enc) if v.witness is not None else None}
    if top and v.witness is not None:
        out["witness"] = {"bundle": enc.bundle.to_doc(), **out["witness"]}
    elif top and enc.bundle.complexes:
        out["bundle"] = enc.bundle.to_doc()
    return out


__all__ = [
    "Bundle", "ParseError", "bundle_from_doc", "complex_from_doc", "complex_to_doc", "dump_complex",
    "dumps", "load", "loads", "map_from_doc", "map_to_doc", "parse_expr", "simplex_expr",
    "simplex_names", "verdict_to_doc", "witness_from_doc", "witness_to_doc",
]
