"""Command line entry point: ``khfloer <command> ...``.

Exit codes: 0 success, 2 parse or usage error, 3 precondition error,
4 integrity failure (d^2 != 0, a failed axiom, a broken invariant).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .errors import IntegrityError, KhError, ParseError, PreconditionError
from .f2core import F2Matrix

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_INTEGRITY = 0, 2, 3, 4
JOBS_ENV = "KHFLOER_JOBS"


# ---------------------------------------------------------------------------
# JSON helpers; every emitter has a parser with parse(emit(x)) == x


def dims_to_json(dims: dict[tuple[int, int], int]) -> dict[str, int]:
    return {f"({h},{q})": n for (h, q), n in sorted(dims.items())}


def dims_from_json(data: dict[str, int]) -> dict[tuple[int, int], int]:
    out = {}
    for k, n in data.items():
        h, q = k.strip("()").split(",")
        out[(int(h), int(q))] = int(n)
    return out


def matrix_to_json(m: F2Matrix, page: int, theory: str) -> dict:
    r, c = m.shape
    return {
        "theory": theory,
        "page": page,
        "shape": [r, c],
        "entries": sorted([i, j] for i, j in m.entries),
        "identity": r == c and m == F2Matrix.identity(r),
    }


def matrix_from_json(data: dict) -> F2Matrix:
    r, c = data["shape"]
    return F2Matrix(r, c, [tuple(e) for e in data["entries"]])


def _table(dims: dict[tuple[int, int], int]) -> str:
    if not dims:
        return "(zero)"
    hs = sorted({h for h, _ in dims})
    qs = sorted({q for _, q in dims}, reverse=True)
    w = max(3, *(len(str(x)) for x in hs + qs))
    lines = ["q\\h".rjust(w) + " " + " ".join(str(h).rjust(w) for h in hs)]
    for q in qs:
        cells = [str(dims.get((h, q), "")).rjust(w) for h in hs]
        lines.append(str(q).rjust(w) + " " + " ".join(cells))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# inputs


def read_diagram(text: str):
    """A diagram given inline, or as a path to a file (comment lines allowed)."""
    from .diagram import parse_diagram

    p = Path(text)
    if p.is_file():
        lines = [ln.split("#", 1)[0].strip() for ln in p.read_text().splitlines()]
        text = " ".join(ln for ln in lines if ln)
    return parse_diagram(text)


def _theory(text: str):
    from .theories import parse_theory, registered_theories

    try:
        return parse_theory(text)
    except ParseError:
        raise argparse.ArgumentTypeError(
            f"unknown theory {text!r}; registered theories: {', '.join(registered_theories())}"
        ) from None


def _jobs(args) -> int:
    if args.jobs is not None:
        return max(1, args.jobs)
    env = os.environ.get(JOBS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ParseError(f"{JOBS_ENV} must be an integer, got {env!r}") from None
    return 1


def _pool_map(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------------------
# commands; each returns (payload for json, text rendering)


def _kh_job(arg):
    from .invariants import kh_dims

    text, reduced = arg
    return kh_dims(read_diagram(text), reduced=reduced)


def cmd_kh(args):
    from .invariants import poincare_polynomial

    results = _pool_map(_kh_job, [(x, args.reduced) for x in args.diagrams], _jobs(args))
    out = []
    for dims in results:
        if args.format == "json":
            out.append(json.dumps(dims_to_json(dims)))
        elif args.format == "poincare":
            out.append(poincare_polynomial(dims))
        else:
            out.append(_table(dims))
    return "\n".join(out)


def _pages_job(arg):
    from .invariants import page_report

    text, theory = arg
    return page_report(read_diagram(text), theory)


def cmd_pages(args):
    from .invariants import poincare_polynomial

    t = args.theory
    reports = _pool_map(_pages_job, [(x, t.name) for x in args.diagrams], _jobs(args))
    out = []
    for r in reports:
        if args.max_page is not None:
            r.pages = r.pages[: args.max_page + 1]
            r.stabilization_index = min(r.stabilization_index, args.max_page)
        if args.format == "json":
            out.append(json.dumps(r.to_json()))
            continue
        lines = [f"theory {r.theory}, stabilizes at E_{r.stabilization_index}"]
        for i in range(len(r.pages)):
            dims = r.bigraded(i)
            body = poincare_polynomial(dims) if args.format == "poincare" else "\n" + _table(dims)
            lines.append(f"E_{i} (total {r.total(i)}): {body}")
        out.append("\n".join(lines))
    return "\n".join(out)


def cmd_s(args):
    from .invariants import s_invariant

    vals = []
    for text in args.diagrams:
        s = s_invariant(read_diagram(text))
        vals.append(json.dumps(s.to_json()) if args.format == "json" else str(s.value))
    return "\n".join(vals)


def cmd_movie(args):
    from .cobordism import movie_page_maps, parse_movie

    path = Path(args.movie)
    if not path.is_file():
        raise ParseError(f"movie file {path} not found")
    m = parse_movie(path.read_text())
    pages = None if args.page is None else [args.page]
    maps = movie_page_maps(m, args.theory, pages)
    items = [matrix_to_json(mat, i, args.theory.name) for i, mat in sorted(maps.items())]
    if args.format == "json":
        return "\n".join(json.dumps(x) for x in items)
    out = []
    for x, (i, mat) in zip(items, sorted(maps.items())):
        out.append(f"E_{i}: {x['shape'][0]}x{x['shape'][1]}{' (identity)' if x['identity'] else ''}")
        out.extend(" ".join(map(str, row)) for row in mat.to_dense())
    return "\n".join(out)


def _verify_job(arg):
    from .corpus import read_entry
    from .theories import verify_kf_axioms

    theory, path = arg
    return verify_kf_axioms(theory, [read_entry(path)])


def merge_reports(theory: str, parts: list[dict]) -> dict:
    axioms: dict[str, dict] = {}
    for p in parts:
        for name, r in p["axioms"].items():
            a = axioms.setdefault(name, {"passed": True, "failures": [], "notes": []})
            a["passed"] = a["passed"] and r["passed"]
            a["failures"] += r["failures"]
            a["notes"] += r["notes"]
    return {"theory": theory, "axioms": axioms}


def cmd_verify(args):
    from .corpus import load_corpus

    entries = load_corpus(args.corpus, max_crossings=args.max_crossings)
    report = merge_reports(
        args.theory.name,
        _pool_map(_verify_job, [(args.theory.name, e.path) for e in entries], _jobs(args)),
    )
    report["diagrams"] = len(entries)
    ok = all(a["passed"] for a in report["axioms"].values())
    if args.format == "json":
        text = json.dumps(report)
    else:
        lines = [f"theory {report['theory']} on {len(entries)} diagrams"]
        for name, a in report["axioms"].items():
            lines.append(f"  {name}: {'pass' if a['passed'] else 'FAIL'}")
            lines.extend(f"    {f}" for f in a["failures"])
        text = "\n".join(lines)
    if not ok:
        print(text)
        raise IntegrityError("axiom check failed")
    return text


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="khfloer", description="Filtered Khovanov-Floer theories over F2.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats=("json", "poincare", "table"), default="json"):
        sp.add_argument("--format", choices=formats, default=default)
        sp.add_argument("--jobs", "-j", type=int, default=None, help=f"worker processes (default ${JOBS_ENV} or 1)")

    sp = sub.add_parser("kh", help="bigraded Khovanov homology dimensions")
    sp.add_argument("diagrams", nargs="+", help="diagram text or file")
    sp.add_argument("--reduced", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_kh)

    sp = sub.add_parser("pages", help="page dimensions of a theory's spectral sequence")
    sp.add_argument("diagrams", nargs="+")
    sp.add_argument("--theory", type=_theory, default="kh")
    sp.add_argument("--max-page", type=int, default=None)
    common(sp)
    sp.set_defaults(func=cmd_pages)

    sp = sub.add_parser("s", help="s-invariant of a knot")
    sp.add_argument("diagrams", nargs="+")
    common(sp, ("text", "json"), "text")
    sp.set_defaults(func=cmd_s)

    sp = sub.add_parser("movie", help="maps induced by a movie on pages")
    sp.add_argument("movie", help="movie file")
    sp.add_argument("--theory", type=_theory, default="kh")
    sp.add_argument("--page", type=int, default=None)
    common(sp, ("json", "table"))
    sp.set_defaults(func=cmd_movie)

    sp = sub.add_parser("verify", help="check the axioms of a theory on a corpus directory")
    sp.add_argument("corpus", nargs="?", default=None, help="corpus directory (default: shipped corpus)")
    sp.add_argument("--theory", type=_theory, default="kh")
    sp.add_argument("--max-crossings", type=int, default=None)
    common(sp, ("json", "table"), "table")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors already print a message
        return int(exc.code or 0)
    try:
        print(args.func(args))
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except IntegrityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except KhError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
