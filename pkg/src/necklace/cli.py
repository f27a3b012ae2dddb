"""``necklace`` command line: JSON reports on stdout, SVG to ``--out``.

Exit status: 0 success (negative verdicts included), 1 usage error,
2 cap or resource limit, 3 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .errors import CapError, ExtractionError, MalformedInputError, NecklaceError, ParameterError

EXIT_OK, EXIT_USAGE, EXIT_CAP, EXIT_INPUT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _builtins():
    from .catalog import builtin_examples

    return builtin_examples()


def load_spec(ref):
    from .address import NecklaceSpec

    if ref.startswith("builtin:"):
        name = ref.split(":", 1)[1]
        entry = _builtins().get(name)
        if entry is None:
            raise MalformedInputError(f"unknown built-in {name!r}")
        return entry["spec"]
    path = Path(ref)
    if not path.is_file():
        raise MalformedInputError(f"{ref}: no such file")
    return NecklaceSpec.load(path)


def load_ifs(ref):
    from .geometry import GeometricIFS

    if ref.startswith("builtin:"):
        name = ref.split(":", 1)[1]
        entry = _builtins().get(name)
        if entry is None or entry["ifs"] is None:
            raise MalformedInputError(f"no geometric built-in {name!r}")
        return entry["ifs"]
    path = Path(ref)
    if not path.is_file():
        raise MalformedInputError(f"{ref}: no such file")
    return GeometricIFS.load(path)


def _emit(obj):
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _points(spec, texts):
    from .address import Address, as_point

    return [as_point(spec, Address.parse(t)) for t in texts]


# --- verbs ----------------------------------------------------------------------------


def cmd_validate(args):
    from .address import validate_spec

    spec = load_spec(args.spec)
    _emit({"label": spec.label, "n": spec.n, **validate_spec(spec, args.depth).to_json()})


def cmd_goodness(args):
    from .address import check_goodness

    spec = load_spec(args.spec)
    _emit({"label": spec.label, **check_goodness(spec, args.depth).to_json()})


def cmd_components(args):
    from .contact import components_minus, is_cut, ncp_closure

    spec = load_spec(args.spec)
    pts = _points(spec, args.points)
    comps = components_minus(spec, pts, args.m0, args.window, args.max_level)
    out = comps.to_json()
    for c, comp in zip(out["components"], comps.components):
        c["ncp"] = ncp_closure(spec, comp, args.window, args.max_level)
    out["is_cut"] = is_cut(spec, pts, args.window, args.max_level).cut
    _emit(out)


def cmd_survey(args):
    from .cuts import survey_extremal

    spec = load_spec(args.spec)
    _emit(survey_extremal(spec, args.level_cap, args.window, args.max_level, args.threads).to_json())


def cmd_theorems(args):
    from .cuts import verify_theorem_suite

    spec = load_spec(args.spec)
    report = verify_theorem_suite(spec, args.level_cap, args.copy_level, args.node_level, args.window,
                                  args.max_level, args.threads)
    _emit(report.to_json())


def cmd_rigid(args):
    from .rigidity import rigid_maps

    F, G = load_spec(args.source), load_spec(args.target)
    closure = rigid_maps(F, G, args.depth)
    out = closure.to_json(with_maps=False)
    if closure.finite:
        out["maps"] = [_table_json(t) for t in closure.tables(args.table_depth)]
    else:
        out["tables_at_depth"] = {str(d): len(closure.tables(d, limit=args.limit)) for d in range(1, args.table_depth + 1)}
        out["limit"] = args.limit
    _emit(out)


def _table_json(t):
    from .rigidity import table_to_json

    return table_to_json(t)


def cmd_uniqueness(args):
    from .rigidity import verify_nifs_uniqueness

    spec = load_spec(args.spec)
    report = verify_nifs_uniqueness(spec, args.level_cap, args.window, args.max_level, force=args.force)
    if report.skipped:
        sys.stderr.write("warning: spec is not good; uniqueness suite skipped\n")
    _emit(report.to_json())


def cmd_extract(args):
    from .geometry import spec_from_geometry

    ifs = load_ifs(args.ifs)
    result = spec_from_geometry(ifs, args.level_cap, args.tol, args.depth)
    if args.out and result.spec is not None:
        result.spec.dump(args.out)
    _emit(result.to_json())


def cmd_render(args):
    from .address import Address
    from .geometry import render_svg

    ifs = load_ifs(args.ifs)
    marks = [(m.split("=", 1)[0], Address.parse(m.split("=", 1)[1])) if "=" in m else (m, Address.parse(m))
             for m in args.mark]
    cuts = []
    for c in args.cut:
        a, _, b = c.partition(",")
        if not b:
            raise ParameterError(f"--cut expects ADDR,ADDR, got {c!r}")
        cuts.append((Address.parse(a), Address.parse(b)))
    svg = render_svg(ifs, args.level, marks, cuts)
    Path(args.out).write_text(svg)
    _emit({"out": str(args.out), "level": args.level, "cells": ifs.n**args.level, "marks": len(marks), "cuts": len(cuts)})


def cmd_catalog(args):
    entries = _builtins()
    out = []
    for name, e in entries.items():
        item = {"name": name, "n": e["spec"].n, "geometric": e["ifs"] is not None, "note": e["note"]}
        if args.write:
            d = Path(args.write)
            d.mkdir(parents=True, exist_ok=True)
            e["spec"].dump(d / f"{name}.json")
            item["spec_file"] = str(d / f"{name}.json")
            if e["ifs"] is not None:
                e["ifs"].dump(d / f"{name}.ifs.json")
                item["ifs_file"] = str(d / f"{name}.ifs.json")
        out.append(item)
    _emit({"v": 1, "entries": out})


def build_parser():
    from .contact import DEFAULT_MAX_LEVEL, DEFAULT_WINDOW

    p = _Parser(prog="necklace", description="Cut structure and rigidity of fractal necklaces.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def graph_opts(sp):
        sp.add_argument("--window", type=int, default=DEFAULT_WINDOW, help="stabilisation window (default %(default)s)")
        sp.add_argument("--max-level", type=int, default=DEFAULT_MAX_LEVEL, help="deepest graph level (default %(default)s)")
        sp.add_argument("--threads", type=int, default=1, help="worker cap (default %(default)s)")

    spec_help = "spec JSON path or builtin:NAME"
    sp = sub.add_parser("validate", help="check the level-1 contact pattern")
    sp.add_argument("spec", help=spec_help)
    sp.add_argument("--depth", type=int, default=6)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("goodness", help="goodness test with witnesses")
    sp.add_argument("spec", help=spec_help)
    sp.add_argument("--depth", type=int, default=12)
    sp.set_defaults(func=cmd_goodness)

    sp = sub.add_parser("components", help="components of F minus a finite point set")
    sp.add_argument("spec", help=spec_help)
    sp.add_argument("points", nargs="+", help="addresses such as 1(2)")
    sp.add_argument("--m0", type=int, default=None)
    graph_opts(sp)
    sp.set_defaults(func=cmd_components)

    sp = sub.add_parser("survey", help="extremal 2-cut survey")
    sp.add_argument("spec", help=spec_help)
    sp.add_argument("--level-cap", type=int, default=2)
    graph_opts(sp)
    sp.set_defaults(func=cmd_survey)

    sp = sub.add_parser("theorems", help="2-cut theorem and copy-complement checks")
    sp.add_argument("spec", help=spec_help)
    sp.add_argument("--level-cap", type=int, default=2)
    sp.add_argument("--copy-level", type=int, default=3)
    sp.add_argument("--node-level", type=int, default=3)
    graph_opts(sp)
    sp.set_defaults(func=cmd_theorems)

    sp = sub.add_parser("rigid", help="rigid-map automaton between two specs")
    sp.add_argument("source", help=spec_help)
    sp.add_argument("target", help=spec_help)
    sp.add_argument("--depth", type=int, default=6, help="closure depth before reporting open (default %(default)s)")
    sp.add_argument("--table-depth", type=int, default=2, help="word length of listed map tables (default %(default)s)")
    sp.add_argument("--limit", type=int, default=10_000)
    sp.set_defaults(func=cmd_rigid)

    sp = sub.add_parser("uniqueness", help="NIFS uniqueness suite over the dihedral group")
    sp.add_argument("spec", help=spec_help)
    sp.add_argument("--level-cap", type=int, default=2)
    sp.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    sp.add_argument("--max-level", type=int, default=DEFAULT_MAX_LEVEL)
    sp.add_argument("--force", action="store_true", help="run even when the spec is not good")
    sp.set_defaults(func=cmd_uniqueness)

    sp = sub.add_parser("extract", help="read a glue table off a planar IFS")
    sp.add_argument("ifs", help="IFS JSON path or builtin:NAME")
    sp.add_argument("--level-cap", type=int, default=24)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--depth", type=int, default=6)
    sp.add_argument("--out", help="write the extracted spec here")
    sp.set_defaults(func=cmd_extract)

    sp = sub.add_parser("render", help="SVG of level-m cells")
    sp.add_argument("ifs", help="IFS JSON path or builtin:NAME")
    sp.add_argument("--level", type=int, default=5)
    sp.add_argument("--mark", action="append", default=[], help="LABEL=ADDR or ADDR; repeatable")
    sp.add_argument("--cut", action="append", default=[], help="ADDR,ADDR; repeatable")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_render)

    sp = sub.add_parser("catalog", help="list built-in examples")
    sp.add_argument("--write", metavar="DIR", help="write spec/IFS JSON files into DIR")
    sp.set_defaults(func=cmd_catalog)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (CapError, ExtractionError) as exc:
        sys.stderr.write(f"necklace: cap reached: {exc}\n")
        return EXIT_CAP
    except MalformedInputError as exc:
        sys.stderr.write(f"necklace: malformed input: {exc}\n")
        return EXIT_INPUT
    except ParameterError as exc:
        sys.stderr.write(f"necklace: {exc}\n")
        return EXIT_USAGE
    except NecklaceError as exc:
        sys.stderr.write(f"necklace: {exc}\n")
        return EXIT_INPUT
    except OSError as exc:
        sys.stderr.write(f"necklace: {exc}\n")
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
