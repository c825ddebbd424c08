"""Command line front end.

Exit status: 0 Holds or success, 1 Fails (witness emitted), 2 Unknown,
3 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time

from .contractible import Budgets
from .core import SimplicialMap, join, opposite, product, validate
from .lifting import FAILS, HOLDS, UNKNOWN
from .serialize import (
    Bundle,
    ParseError,
    dumps,
    load,
    simplex_names,
    verdict_to_doc,
    witness_from_doc,
)

BOUND_ENV = "QCATFIB_BOUND"
DEFAULT_BOUND = 3
EXIT = {HOLDS: 0, FAILS: 1, UNKNOWN: 2}
INPUT_ERROR = 3

FIBRATION_KINDS = ("left", "right", "kan", "inner")
KINDS = FIBRATION_KINDS + ("iso", "cocartesian", "cartesian", "flat", "pattern")
CONSTRUCTIONS = ("twisted-arrow", "slice-under", "slice-over", "join", "product", "opposite",
                 "arrow", "fun", "random-poset-nerve")


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# argument handling


def _default_bound() -> int:
    raw = os.environ.get(BOUND_ENV)
    if raw is None:
        return DEFAULT_BOUND
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{BOUND_ENV}={raw!r} is not an integer") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--bound", type=int, default=None,
                        help=f"dimension bound (default ${BOUND_ENV} or {DEFAULT_BOUND})")
    common.add_argument("--budget-collapse", type=int, default=None, metavar="N",
                        help="search budget for collapse sequences")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized jobs")
    common.add_argument("-o", "--output", default=None, help="write the report here instead of stdout")

    ap = argparse.ArgumentParser(prog="qcatfib", description="Fibrations of finite simplicial sets.")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", parents=[common], help="parse and validate a file")
    v.add_argument("file")

    c = sub.add_parser("construct", parents=[common], help="run a construction")
    c.add_argument("op", choices=CONSTRUCTIONS)
    c.add_argument("inputs", nargs="*")
    c.add_argument("--at", default=None, help="vertex name or index for slices")
    c.add_argument("--complex", default=None, help="complex to use from a bundle")
    c.add_argument("--size", type=int, default=3, help="poset size for random-poset-nerve")

    k = sub.add_parser("check", parents=[common], help="classify a map")
    k.add_argument("--kind", choices=KINDS, default=None)
    k.add_argument("--map", default=None, help="map to check from a bundle")
    k.add_argument("--replay", default=None, metavar="WITNESS",
                   help="replay a witness or a report carrying one")
    k.add_argument("inputs", nargs="*")

    a = sub.add_parser("audit", parents=[common], help="audit span hypotheses")
    a.add_argument("--theorem", choices=("6.2", "6.2.1"), required=True)
    a.add_argument("inputs", nargs="+")
    return ap


def _bound(args) -> int:
    b = args.bound if args.bound is not None else _default_bound()
    if b < 2:
        raise InputError(f"dimension bound must be at least 2, got {b}")
    return b


def _budgets(args) -> Budgets:
    b = Budgets()
    if args.budget_collapse is not None:
        if args.budget_collapse <= 0:
            raise InputError("--budget-collapse must be positive")
        b.collapse_states = args.budget_collapse
    return b


def _load(ref: str) -> Bundle:
    from .fixtures import resolve

    try:
        path = resolve(ref)
    except FileNotFoundError:
        raise InputError(f"{ref}: no such file or bundled fixture") from None
    return load(path)


def _pick_complex(b: Bundle, name: str | None, ref: str):
    if name is not None:
        if name not in b.complexes:
            raise InputError(f"{ref}: no complex named {name!r}")
        return b.complexes[name]
    if len(b.complexes) == 1 or not b.maps:
        return next(iter(b.complexes.values()))
    # a map bundle: use the source of its main map
    return _pick_map(b, None, ref)[1].source


def _pick_map(b: Bundle, name: str | None, ref: str) -> tuple[str, SimplicialMap]:
    name = name or b.meta.get("map")
    if name is None:
        if len(b.maps) != 1:
            raise InputError(f"{ref}: choose a map with --map ({', '.join(b.maps) or 'none present'})")
        name = next(iter(b.maps))
    if name not in b.maps:
        raise InputError(f"{ref}: no map named {name!r}")
    return name, b.maps[name]


def _vertex(X, at: str | None, ref: str):
    if at is None:
        raise InputError("this construction needs --at VERTEX")
    names = simplex_names(X)
    for k, n in names.items():
        if k[0] == 0 and n == at:
            return X.point(k)
    verts = X.vertices()
    if at.isdigit() and int(at) < len(verts):
        return verts[int(at)]
    raise InputError(f"{ref}: no vertex {at!r}")


# ---------------------------------------------------------------------------
# output


def _emit(args, text_lines: list[str], doc: dict):
    if args.format == "structured":
        out = dumps(doc, indent=1) + "\n"
    else:
        out = "\n".join(text_lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _verdict_lines(label: str, v, seconds: float) -> list[str]:
    lines = [f"{label}: {v.status} (bound {v.bound}, {v.squares} squares, {seconds:.3f} s)"]
    if v.reason:
        lines.append(f"  reason: {v.reason}")
    if v.witness is not None:
        lines.append(f"  witness: {type(v.witness).__name__} (replays: {bool(v.witness.replay())})")
    return lines


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args) -> int:
    from .patterns import MarkedSimplicialSet

    b = _load(args.file)
    lines, problems = [], []
    for n, X in b.complexes.items():
        problems += [f"{n}: {p}" for p in validate(X)]
        counts = [len(X.keys(d)) for d in range(X.dim + 1)] if not X.is_empty else []
        lines.append(f"complex {n}: nondegenerate counts {counts}")
        if n in b.marked:
            problems += [f"{n}: {p}" for p in MarkedSimplicialSet(X, b.marked[n]).violations()]
    for n, f in b.maps.items():
        problems += [f"{n}: {p}" for p in f.violations()]
        lines.append(f"map {n}: {b.complex_name(f.source)} -> {b.complex_name(f.target)}")
    status = "ok" if not problems else "invalid"
    lines += problems + [f"status: {status}"]
    doc = {"command": "validate", "input": args.file, "status": status,
           "complexes": {n: [len(X.keys(d)) for d in range(X.dim + 1)] for n, X in b.complexes.items()},
           "maps": sorted(b.maps), "problems": problems}
    _emit(args, lines, doc)
    return 0 if not problems else INPUT_ERROR


def cmd_construct(args) -> int:
    from . import constructions as cons
    from .category import nerve, poset_from_relation

    bound = _bound(args)
    op, ins = args.op, args.inputs
    need = {"join": 2, "product": 2, "fun": 2, "random-poset-nerve": 0}.get(op, 1)
    if len(ins) != need:
        raise InputError(f"{op} takes {need} input file(s), got {len(ins)}")
    Xs = [_pick_complex(_load(r), args.complex, r) for r in ins]
    out = Bundle()
    if op == "twisted-arrow":
        fc = cons.twisted_arrow(Xs[0], bound)
        out.add_complex(fc.total, "total")
        out.add_complex(fc.base, "base")
        out.add_map(fc.projection, "projection")
    elif op in ("slice-under", "slice-over"):
        x = _vertex(Xs[0], args.at, ins[0])
        fn = cons.slice_under if op == "slice-under" else cons.slice_over
        fc = fn(Xs[0], x, bound)
        out.add_complex(fc.total, "total")
        out.add_complex(fc.base, "base")
        out.add_map(fc.projection, "projection")
    elif op == "join":
        J = join(Xs[0], Xs[1])[0]
        out.add_complex(J, "join")
    elif op == "product":
        P, p1, p2 = product(Xs[0], Xs[1], bound)
        out.add_complex(P, "product")
        out.add_complex(Xs[0], "left")
        out.add_complex(Xs[1], "right")
        out.add_map(p1, "pr1")
        out.add_map(p2, "pr2")
    elif op == "opposite":
        out.add_complex(opposite(Xs[0]), "opposite")
    elif op == "arrow":
        O, s, t = cons.arrow_category(Xs[0], bound)
        out.add_complex(O, "arrows")
        out.add_complex(s.target, "base")
        out.add_map(s, "source")
        out.add_map(t, "target")
    elif op == "fun":
        F = cons.fun_complex(Xs[0], Xs[1], bound)
        out.add_complex(getattr(F, "total", F), "fun")
    elif op == "random-poset-nerve":
        rng = random.Random(args.seed)
        n = max(1, args.size)
        strict = {(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.5}
        closed = set(strict)
        changed = True
        while changed:
            extra = {(a, d) for a, b in closed for c, d in closed if b == c} - closed
            closed |= extra
            changed = bool(extra)
        C = poset_from_relation(list(range(n)), closed, name=f"random_poset_{args.seed}")
        out.add_complex(nerve(C, bound), "nerve")
    text = dumps(out.to_doc(), indent=1) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        if args.format == "text":
            for n, X in out.complexes.items():
                print(f"{n}: nondegenerate counts {[len(X.keys(d)) for d in range(X.dim + 1)]}")
    else:
        sys.stdout.write(text)
    return 0


def run_check(p: SimplicialMap, kind: str, bound: int, budgets: Budgets, bundle: Bundle | None = None):
    """The verdict for one classifier kind."""
    from . import fibrations as fib
    from .flatness import is_flat

    if kind in FIBRATION_KINDS:
        return fib.check_fibration(p, kind, bound)
    if kind == "iso":
        return fib.is_isofibration(p, bound)
    if kind == "cocartesian":
        return fib.is_cocartesian_fibration(p, bound)
    if kind == "cartesian":
        return fib.is_cartesian_fibration(p, bound)
    if kind == "flat":
        return is_flat(p, bound, budgets)
    if kind == "pattern":
        from .patterns import CategoricalPattern, MarkedMap, is_pattern_fibered

        b = bundle or Bundle()
        src, tgt = b.add_complex(p.source), b.add_complex(p.target)
        q = MarkedMap.of(p, b.marked.get(src, ()), None)
        if tgt in b.marked or tgt in b.scaled:
            pat = CategoricalPattern(p.target, set(q.target.marked if tgt not in b.marked else b.marked[tgt]),
                                     set(b.scaled.get(tgt, set())),
                                     [_cone(b, kk, mm) for kk, mm in b.cones.get(tgt, [])])
        else:
            pat = CategoricalPattern.cocartesian(p.target)
        return is_pattern_fibered(q, pat, bound)
    raise InputError(f"unknown kind {kind!r}")


def _cone(b: Bundle, K: str, m: str):
    from .patterns import Cone

    return Cone(b.complexes[K], b.maps[m])


def cmd_check(args) -> int:
    if args.replay:
        return _replay(args)
    if not args.kind:
        raise InputError("check needs --kind (or --replay)")
    if len(args.inputs) != 1:
        raise InputError("check takes exactly one input file")
    bound, budgets = _bound(args), _budgets(args)
    ref = args.inputs[0]
    b = _load(ref)
    name, p = _pick_map(b, args.map, ref)
    t0 = time.perf_counter()
    v = run_check(p, args.kind, bound, budgets, b)
    dt = time.perf_counter() - t0
    doc = {"command": "check", "kind": args.kind, "input": ref, "map": name, "bound": bound,
           "verdict": verdict_to_doc(v), "timing": {"seconds": dt}}
    lines = _verdict_lines(f"{args.kind} {name}", v, dt)
    _emit(args, lines, doc)
    return EXIT[v.status]


def _replay(args) -> int:
    ref = args.replay
    try:
        with open(ref, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError:
        raise InputError(f"{ref}: cannot read") from None
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno, ref) from None
    if isinstance(doc, dict) and "verdict" in doc:
        doc = doc["verdict"].get("witness")
    elif isinstance(doc, dict) and "items" in doc:
        doc = next((it["witness"] for it in doc["items"] if it.get("witness")), None)
    if not isinstance(doc, dict) or "witness" not in doc or "bundle" not in doc:
        raise InputError(f"{ref}: no witness found")
    try:
        w = witness_from_doc(doc)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise InputError(f"{ref}: malformed witness ({exc})") from None
    t0 = time.perf_counter()
    ok = bool(w.replay())
    dt = time.perf_counter() - t0
    status = FAILS if ok else "Invalid"
    doc = {"command": "replay", "input": ref, "witness": doc["witness"], "status": status,
           "timing": {"seconds": dt}}
    lines = [f"replay {doc['witness']}: " + ("failure reproduced" if ok else "witness does not replay")]
    _emit(args, lines, doc)
    return 1 if ok else INPUT_ERROR


def _audit_items(rep) -> list[dict]:
    return [{"item": k, **verdict_to_doc(v)} for k, v in rep.items.items()]


def cmd_audit(args) -> int:
    from .patterns import (
        AuditFailure,
        CategoricalPattern,
        MarkedMap,
        MarkedSimplicialSet,
        audit_cor_6_2_1,
        audit_theorem_6_2,
        check_cor_6_2_1,
    )
    from .sections import degenerate_edges

    bound, budgets = _bound(args), _budgets(args)
    if len(args.inputs) != 1:
        raise InputError("audit takes one span file")
    ref = args.inputs[0]
    b = _load(ref)
    span = b.meta.get("span", {"pi": "pi", "rho": "rho"})
    if not isinstance(span, dict):
        raise InputError(f"{ref}: \"span\" must name the maps pi and rho")
    for leg in ("pi", "rho"):
        if span.get(leg) not in b.maps:
            raise InputError(f"{ref}: span leg {leg!r} is not a map in the file")
    pi, rho = b.maps[span["pi"]], b.maps[span["rho"]]
    if pi.source is not rho.source:
        raise InputError(f"{ref}: span legs need a common source")
    names = {n: b.add_complex(Y) for n, Y in (("X", pi.source), ("S", pi.target), ("T", rho.target))}
    E = b.marked.get(names["X"], set())

    def pattern(Y, n):
        M = b.marked.get(n, set())
        T = b.scaled.get(n, set())
        return CategoricalPattern(Y, set(M) | degenerate_edges(Y),
                                  set(T), [_cone(b, kk, mm) for kk, mm in b.cones.get(n, [])])

    t0 = time.perf_counter()
    extra = {}
    if args.theorem == "6.2":
        pat, pat2 = pattern(pi.target, names["S"]), pattern(rho.target, names["T"])
        pim = MarkedMap(pi, MarkedSimplicialSet(pi.source, E), MarkedSimplicialSet(pi.target, pat.marked))
        rhom = MarkedMap(rho, MarkedSimplicialSet(rho.source, E), MarkedSimplicialSet(rho.target, pat2.marked))
        rep = audit_theorem_6_2(pim, rhom, pat, pat2, bound, budgets)
        status = rep.status
    else:
        rep = audit_cor_6_2_1(pi, rho, E, bound, budgets)
        status = rep.status
        qname = span.get("q")
        if qname is not None and rep.all_hold:
            if qname not in b.maps:
                raise InputError(f"{ref}: no map named {qname!r}")
            try:
                fc, v, crit = check_cor_6_2_1(pi, rho, E, b.maps[qname], bound, audit=False)
            except AuditFailure as exc:
                raise InputError(str(exc)) from None
            Z = fc.total
            extra = {"construction": {"counts": [len(Z.keys(d)) for d in range(Z.dim + 1)],
                                      "cocartesian": verdict_to_doc(v), "criterion": verdict_to_doc(crit)}}
            rep.items["r is a cocartesian fibration"] = v
            rep.items["cocartesian edge criterion"] = crit
            status = rep.status
    dt = time.perf_counter() - t0
    doc = {"command": "audit", "theorem": args.theorem, "input": ref, "bound": bound,
           "status": status, "items": _audit_items(rep), **extra, "timing": {"seconds": dt}}
    lines = [f"audit {args.theorem} on {ref}: {status} (bound {bound}, {dt:.3f} s)"]
    lines += ["  " + ln for ln in rep.lines()]
    if extra:
        lines.append(f"  Z nondegenerate counts {extra['construction']['counts']}")
    _emit(args, lines, doc)
    return EXIT[status]


COMMANDS = {"validate": cmd_validate, "construct": cmd_construct, "check": cmd_check, "audit": cmd_audit}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except (InputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except Exception as exc:  # preconditions raised by the library
        from .constructions import PreconditionError
        from .fibrations import NotAQuasicategory

        if isinstance(exc, (PreconditionError, NotAQuasicategory)):
            print(f"error: {exc}", file=sys.stderr)
            return INPUT_ERROR
        raise


if __name__ == "__main__":
    sys.exit(main())
