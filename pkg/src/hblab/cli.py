"""Command-line front end.

One subcommand per experiment kind plus ``suite``.  Every subcommand runs a
scenario: either the built-in default for that kind, or a JSON scenario
document given with ``--scenario``, with individual flags overriding fields
either way.  Exit codes: 0 success, 2 a documented hypothesis was violated
and the computation was refused, 1 internal error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from fractions import Fraction
from typing import Optional

from .circlesets import CircleSet
from .errors import RefusalError, ScenarioFormatError
from .scenarios import (
    KINDS,
    Scenario,
    load_scenario,
    run_scenario,
    run_suite,
    suite_table,
    write_outputs,
)
from .symbols import OuterProfile, SymbolSpec

_F = Fraction

_ARC_WEIGHT = SymbolSpec(
    outer=OuterProfile.arc_step(((_F(1, 10), _F(1, 4), 0.5),))
)
_SHIFT = SymbolSpec(zeros=((0.0, 1),))
_SMOOTH = SymbolSpec(outer=OuterProfile.smooth_dip(center=0.5, halfwidth=0.2, dip=0.75))
_BLASCHKE3 = SymbolSpec(
    zeros=((0.5 + 0.0j, 1), (-0.3 + 0.4j, 1), (0.2j, 1))
)


def _default_scenario(kind: str) -> Scenario:
    if kind == "symbol":
        return Scenario(name="arc-weight-symbol", kind=kind, symbol=_ARC_WEIGHT, grid=2048)
    if kind == "moments":
        return Scenario(
            name="shift-moments", kind=kind, symbol=_SHIFT, alpha=1.0,
            degrees=(8,), grid=1024,
        )
    if kind == "splitting":
        return Scenario(
            name="arc-splitting", kind=kind, symbol=_ARC_WEIGHT, alpha=1.0,
            degrees=(40, 60), grid=4096,
        )
    if kind == "cyclicity":
        return Scenario(
            name="shift-cyclicity", kind=kind, symbol=_SHIFT, alpha=2.0,
            degrees=(12,), grid=512,
        )
    if kind == "kernel-gram":
        return Scenario(
            name="mixed-kernel-gram", kind=kind,
            symbol=SymbolSpec(
                zeros=((0.5 + 0.0j, 1),),
                outer=OuterProfile.arc_step(((_F(1, 10), _F(1, 4), 0.5),)),
            ),
            grid=1024,
        )
    if kind == "embed":
        return Scenario(
            name="smooth-embed", kind=kind, symbol=_SMOOTH, grid=4096,
            lam=0.3 - 0.2j,
        )
    if kind == "division":
        return Scenario(
            name="blaschke-division", kind=kind, symbol=_BLASCHKE3, grid=2048,
            f_poly=(1.0 + 0.0j, 0.5 + 0.0j),
        )
    if kind == "bcset":
        return Scenario(
            name="middle-thirds-entropy", kind=kind, symbol=_SHIFT,
            circle_set=CircleSet.cantor((_F(0), _F(1)), ratio=_F(1, 3), depth=8),
            depth=40,
        )
    if kind == "classify":
        return Scenario(
            name="arc-weight-classify", kind=kind, symbol=_ARC_WEIGHT,
            alpha=1.0, grid=2048,
        )
    raise ScenarioFormatError(f"no default scenario for kind {kind!r}")


def _parse_complex(text: str, flag: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]))
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise ScenarioFormatError(f"{flag}: expected 're' or 're,im', got {text!r}")


def _parse_degrees(text: str) -> tuple:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise ScenarioFormatError(
            f"--degree: expected an int or comma list of ints, got {text!r}"
        )


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--scenario", help="JSON scenario document to run")
    sub.add_argument("--out", help="output path prefix for .json/.csv results")
    sub.add_argument("--alpha", type=float, help="smoothness index (> 0)")
    sub.add_argument(
        "--degree", help="moment degree, or comma list like 40,60", dest="degree"
    )
    sub.add_argument("--grid", type=int, help="boundary grid size (even)")
    sub.add_argument("--seed", type=int, help="seed for randomized point sets")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hblab",
        description="numerical experiments for contractive boundary symbols",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    helps = {
        "symbol": "evaluate a symbol on the boundary grid",
        "moments": "disk-moment diagonal and boundary Toeplitz moments",
        "splitting": "distance from a boundary target to weighted polynomials",
        "cyclicity": "distance from an inner factor to weighted polynomials",
        "kernel-gram": "positivity of the reproducing-kernel matrix",
        "embed": "solve the graph-pair embedding for a kernel section",
        "division": "anti-analytic remainder after dividing by an inner factor",
        "bcset": "complement entropy of a circle set",
        "classify": "density checklist verdict for a symbol",
    }
    for kind in KINDS:
        sub = subs.add_parser(kind, help=helps[kind])
        _add_common(sub)
        if kind == "embed":
            sub.add_argument("--lam", help="interior point 're,im'")
        if kind == "kernel-gram":
            sub.add_argument("--npoints", type=int, help="number of random points")
            sub.add_argument("--radius", type=float, help="max |point| (< 1)")
        if kind == "splitting":
            sub.add_argument(
                "--target", choices=("carrier", "one"),
                help="boundary target: carrier indicator or constant one",
            )
        if kind == "bcset":
            sub.add_argument("--depth", type=int, help="entropy partial-sum depth")
    suite = subs.add_parser("suite", help="run many scenario files, continue past failures")
    suite.add_argument("scenarios", nargs="*", help="scenario JSON files")
    suite.add_argument("--out", help="directory for per-scenario outputs")
    return parser


def _apply_overrides(sc: Scenario, args: argparse.Namespace) -> Scenario:
    updates = {}
    if getattr(args, "alpha", None) is not None:
        updates["alpha"] = args.alpha
    if getattr(args, "degree", None) is not None:
        updates["degrees"] = _parse_degrees(args.degree)
    if getattr(args, "grid", None) is not None:
        updates["grid"] = args.grid
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "out", None) is not None:
        updates["out"] = args.out
    if getattr(args, "lam", None) is not None:
        updates["lam"] = _parse_complex(args.lam, "--lam")
    if getattr(args, "npoints", None) is not None:
        updates["npoints"] = args.npoints
    if getattr(args, "radius", None) is not None:
        updates["radius"] = args.radius
    if getattr(args, "target", None) is not None:
        updates["target"] = args.target
    if getattr(args, "depth", None) is not None:
        updates["depth"] = args.depth
    return replace(sc, **updates) if updates else sc


def _print_table(table, limit: int = 12, stream=None) -> None:
    if stream is None:
        stream = sys.stdout  # resolved late so redirected stdout is honored
    rows = table.rows[:limit]
    widths = [len(str(h)) for h in table.header]
    rendered = []
    for row in rows:
        cells = [f"{c:.6g}" if isinstance(c, float) else str(c) for c in row]
        widths = [max(w, len(c)) for w, c in zip(widths, cells)]
        rendered.append(cells)
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    print(fmt.format(*map(str, table.header)), file=stream)
    for cells in rendered:
        print(fmt.format(*cells), file=stream)
    if len(table.rows) > limit:
        print(f"... ({len(table.rows)} rows total)", file=stream)


def _run_single(kind: str, args: argparse.Namespace) -> int:
    if args.scenario is not None:
        sc = load_scenario(args.scenario)
        if sc.kind != kind:
            raise ScenarioFormatError(
                f"scenario {sc.name!r} has kind {sc.kind!r}; "
                f"run it with 'hblab {sc.kind}' or 'hblab suite'"
            )
    else:
        sc = _default_scenario(kind)
    sc = _apply_overrides(sc, args).validate()
    run = run_scenario(sc)
    print(f"{sc.name}: {run.headline}")
    for table in run.tables:
        _print_table(table)
    out = sc.out
    if out is not None:
        for path in write_outputs(run, out):
            print(f"wrote {path}")
    return 0


def _run_suite_cmd(args: argparse.Namespace) -> int:
    entries, n_bad = run_suite(args.scenarios, out_dir=args.out)
    if not entries:
        print("suite: no scenarios given")
        return 0
    _print_table(suite_table(entries), limit=len(entries))
    print(f"suite: {len(entries) - n_bad}/{len(entries)} ok")
    return 1 if n_bad else 0


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "suite":
            return _run_suite_cmd(args)
        return _run_single(args.command, args)
    except RefusalError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
