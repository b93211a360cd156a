"""Sweep the density checklist over a grid of boundary weights and measures.

Crosses a family of outer profiles (arcs, dips, Cantor steps, deep notches)
with singular-measure attachments (none, an atom, divergent Cantor mass on
or off the carrier) and tabulates the classifier verdicts, the triggering
condition, and the carrier-size estimate for each combination.

Usage:
    python scripts/classifier_sweep.py
    python scripts/classifier_sweep.py --alpha 2 --grid 4096 --out runs/sweep
"""

from __future__ import annotations

import argparse
import csv
from fractions import Fraction as F

from hblab.circlesets import CantorMeasurePart, CircleSet, RatioSchedule, SingularMeasureSpec
from hblab.classify import corollary_classifier
from hblab.symbols import OuterProfile, SymbolSpec


def build_grid():
    thin = CircleSet.cantor((0, F(1, 3)), ratio=F(1, 3), depth=4)
    divergent = RatioSchedule(kind="power", c=0.5, p=1.0)
    div_inside = CircleSet.cantor((F(1, 8), F(1, 8)), schedule=divergent, depth=4)
    div_far = CircleSet.cantor((F(1, 2), F(1, 4)), schedule=divergent, depth=4)
    notch = CircleSet.cantor((0, 1), ratio=F(1, 3), depth=3)

    outers = [
        ("inner", OuterProfile.one()),
        ("const-0.9", OuterProfile.constant(0.9)),
        ("arc-0.5", OuterProfile.arc_step(((F(1, 10), F(1, 4), 0.5),))),
        ("arc-0.8", OuterProfile.arc_step(((F(1, 10), F(1, 4), 0.8),))),
        ("dip-deep", OuterProfile.smooth_dip(0.5, 0.2, 0.75)),
        ("dip-shallow", OuterProfile.smooth_dip(0.3, 0.1, 0.5)),
        ("cantor-step", OuterProfile.cantor_step(thin, 0.5)),
        ("deep-notch", OuterProfile.volberg(notch, gamma=3.0, amplitude=1.0)),
        ("cos-half", OuterProfile.cos_half()),
    ]
    singulars = [
        ("none", SingularMeasureSpec()),
        ("atom", SingularMeasureSpec(atoms=((0.7, 0.2),))),
        ("div-inside", SingularMeasureSpec(
            cantor_parts=(CantorMeasurePart(support=div_inside, mass=F(1, 2)),))),
        ("div-far", SingularMeasureSpec(
            cantor_parts=(CantorMeasurePart(support=div_far, mass=F(1, 2)),))),
        ("thin-part", SingularMeasureSpec(
            cantor_parts=(CantorMeasurePart(support=thin, mass=F(1, 4)),))),
    ]
    return outers, singulars


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--grid", type=int, default=2048,
                    help="boundary grid for the log-integrability test")
    ap.add_argument("--out", help="CSV path prefix (writes <out>.csv)")
    args = ap.parse_args()

    outers, singulars = build_grid()
    rows = []
    counts: dict = {}
    hdr = f"{'outer':<12} {'measure':<11} {'verdict':<15} {'trigger':<28} {'gamma'}"
    print(hdr)
    print("-" * len(hdr))
    for oname, outer in outers:
        for sname, singular in singulars:
            spec = SymbolSpec(singular=singular, outer=outer)
            v = corollary_classifier(spec, args.alpha, grid=args.grid)
            counts[v.prediction] = counts.get(v.prediction, 0) + 1
            gamma = "-" if v.gamma_estimate is None else f"{v.gamma_estimate:.3f}"
            print(f"{oname:<12} {sname:<11} {v.prediction:<15} "
                  f"{v.triggered or '-':<28} {gamma}")
            rows.append(
                {
                    "outer": oname,
                    "measure": sname,
                    "prediction": v.prediction,
                    "triggered": v.triggered or "",
                    "gamma_estimate": "" if v.gamma_estimate is None else v.gamma_estimate,
                    "failed_items": ";".join(
                        c.name for c in v.checklist if c.holds is False
                    ),
                }
            )
    total = sum(counts.values())
    print("-" * len(hdr))
    print(f"{total} specs: " + ", ".join(
        f"{k}={v}" for k, v in sorted(counts.items())))

    if args.out:
        path = args.out + ".csv"
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
