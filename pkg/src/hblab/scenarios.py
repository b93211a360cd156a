"""Scenario documents: parse, validate, run, and serialize results.

A scenario is a small JSON document naming a symbol, a smoothness index,
degrees, a grid size, and the experiment kind to run.  Results come back as
a JSON-able report plus CSV tables.  Table bodies are deterministic: the
same scenario re-run writes byte-identical CSV (floats are serialized with
``repr``, which is the shortest round-trip form; wall-clock time lives only
in the JSON report).

Positions, arc lengths, ratios, and masses on the wire may be JSON numbers
or exact fraction strings like ``"1/3"``; fraction strings survive into
exact `Fraction` arithmetic on the other side.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .circlesets import (
    CantorMeasurePart,
    CircleSet,
    RatioSchedule,
    SingularMeasureSpec,
    bc_entropy,
    contains_bc_subset_flag,
)
from .classify import corollary_classifier
from .embedding import (
    division_diagnostic,
    j_embedding_solve,
    kernel_gram,
    kernel_embedding_pair,
)
from .errors import RefusalError, ScenarioFormatError
from .moments import (
    build_mu,
    cyclicity_indicator,
    gram_matrix,
    splitting_indicator,
)
from .symbols import (
    DiskSeries,
    OuterProfile,
    SymbolSpec,
    delta_weight,
    evaluate_symbol,
    symbol_eval,
)
from .xalpha import disk_moment

KINDS = (
    "symbol",
    "moments",
    "splitting",
    "cyclicity",
    "kernel-gram",
    "embed",
    "division",
    "bcset",
    "classify",
)


# --------------------------------------------------------------------------
# number / geometry codecs


def _num_from_wire(value, field_name: str):
    """A JSON number passes through; a string is parsed as an exact fraction."""
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise ScenarioFormatError(
                f"field {field_name!r}: cannot parse {value!r} as a fraction"
            )
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioFormatError(
            f"field {field_name!r}: expected a number or fraction string, "
            f"got {type(value).__name__}"
        )
    return value


def _num_to_wire(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Integral):
        return int(value)
    return float(value)


def _pair(value, field_name: str):
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ScenarioFormatError(f"field {field_name!r}: expected a [a, b] pair")
    return value


def circle_set_from_json(doc: dict, field_name: str = "set") -> CircleSet:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ScenarioFormatError(f"field {field_name!r}: expected an object with 'kind'")
    kind = doc["kind"]
    if kind == "arcs":
        arcs = doc.get("arcs")
        if not isinstance(arcs, list):
            raise ScenarioFormatError(f"field {field_name}.arcs: expected a list")
        return CircleSet.from_arcs(
            [
                (
                    _num_from_wire(_pair(a, f"{field_name}.arcs[{i}]")[0], f"{field_name}.arcs[{i}][0]"),
                    _num_from_wire(a[1], f"{field_name}.arcs[{i}][1]"),
                )
                for i, a in enumerate(arcs)
            ]
        )
    if kind == "cantor":
        base = _pair(doc.get("base_arc", [0, 1]), f"{field_name}.base_arc")
        base_arc = (
            _num_from_wire(base[0], f"{field_name}.base_arc[0]"),
            _num_from_wire(base[1], f"{field_name}.base_arc[1]"),
        )
        depth = doc.get("depth", 8)
        if not isinstance(depth, int) or depth < 0:
            raise ScenarioFormatError(f"field {field_name}.depth: expected a nonnegative int")
        if "schedule" in doc:
            sch = doc["schedule"]
            if not isinstance(sch, dict) or sch.get("kind") != "power":
                raise ScenarioFormatError(
                    f"field {field_name}.schedule: only the 'power' schedule is wire-encodable"
                )
            schedule = RatioSchedule(
                kind="power", c=float(sch.get("c", 0.5)), p=float(sch.get("p", 1.0))
            )
            return CircleSet.cantor(base_arc, depth=depth, schedule=schedule)
        ratio = _num_from_wire(doc.get("ratio", "1/3"), f"{field_name}.ratio")
        return CircleSet.cantor(base_arc, ratio=ratio, depth=depth)
    raise ScenarioFormatError(
        f"field {field_name}.kind: unknown circle-set kind {kind!r}"
    )


def circle_set_to_json(E: CircleSet) -> dict:
    if E.kind == "arcs":
        return {
            "kind": "arcs",
            "arcs": [[_num_to_wire(s), _num_to_wire(l)] for s, l in E.stage_arcs()],
        }
    if E.kind == "cantor":
        doc = {
            "kind": "cantor",
            "base_arc": [_num_to_wire(E.base_arc[0]), _num_to_wire(E.base_arc[1])],
            "depth": E.depth,
        }
        if E.schedule.kind == "fixed":
            doc["ratio"] = _num_to_wire(E.schedule.ratio)
        else:
            doc["schedule"] = {"kind": "power", "c": E.schedule.c, "p": E.schedule.p}
        return doc
    raise ScenarioFormatError(
        f"circle set of kind {E.kind!r} has no wire encoding"
    )


# --------------------------------------------------------------------------
# symbol codec

_OUTER_KEYS = {
    "one": (),
    "constant": ("value",),
    "arc_step": ("pieces", "default"),
    "cos_half": (),
    "smooth_dip": ("center", "halfwidth", "dip"),
    "cantor_step": ("value", "cantor"),
    "volberg": ("gamma", "amplitude", "cantor"),
    "samples": ("samples",),
}


def outer_from_json(doc: dict) -> OuterProfile:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ScenarioFormatError("field 'outer': expected an object with 'kind'")
    kind = doc["kind"]
    if kind not in _OUTER_KEYS:
        raise ScenarioFormatError(f"field 'outer.kind': unknown kind {kind!r}")
    extra = set(doc) - {"kind"} - set(_OUTER_KEYS[kind])
    if extra:
        raise ScenarioFormatError(
            f"field 'outer': unexpected key(s) {sorted(extra)} for kind {kind!r}"
        )
    if kind == "one":
        return OuterProfile.one()
    if kind == "constant":
        return OuterProfile.constant(float(_num_from_wire(doc.get("value", 0.5), "outer.value")))
    if kind == "arc_step":
        pieces = doc.get("pieces", [])
        if not isinstance(pieces, list):
            raise ScenarioFormatError("field 'outer.pieces': expected a list")
        entries = []
        for i, p in enumerate(pieces):
            if not isinstance(p, (list, tuple)) or len(p) != 3:
                raise ScenarioFormatError(
                    f"field 'outer.pieces[{i}]': expected [start, length, value]"
                )
            entries.append(
                (
                    _num_from_wire(p[0], f"outer.pieces[{i}][0]"),
                    _num_from_wire(p[1], f"outer.pieces[{i}][1]"),
                    float(_num_from_wire(p[2], f"outer.pieces[{i}][2]")),
                )
            )
        default = float(_num_from_wire(doc.get("default", 1.0), "outer.default"))
        return OuterProfile.arc_step(tuple(entries), default=default)
    if kind == "cos_half":
        return OuterProfile.cos_half()
    if kind == "smooth_dip":
        return OuterProfile.smooth_dip(
            center=float(_num_from_wire(doc.get("center", 0.5), "outer.center")),
            halfwidth=float(_num_from_wire(doc.get("halfwidth", 0.1), "outer.halfwidth")),
            dip=float(_num_from_wire(doc.get("dip", 0.75), "outer.dip")),
        )
    if kind == "cantor_step":
        cantor = circle_set_from_json(doc.get("cantor", {}), "outer.cantor")
        return OuterProfile.cantor_step(
            cantor, value=float(_num_from_wire(doc.get("value", 0.5), "outer.value"))
        )
    if kind == "volberg":
        cantor = circle_set_from_json(doc.get("cantor", {}), "outer.cantor")
        return OuterProfile.volberg(
            cantor,
            gamma=float(_num_from_wire(doc.get("gamma", 2.0), "outer.gamma")),
            amplitude=float(_num_from_wire(doc.get("amplitude", 1.0), "outer.amplitude")),
        )
    samples = doc.get("samples")
    if not isinstance(samples, list) or len(samples) < 4:
        raise ScenarioFormatError("field 'outer.samples': expected a list of >= 4 values")
    return OuterProfile.from_samples(np.asarray([float(s) for s in samples]))


def outer_to_json(profile: OuterProfile) -> dict:
    kind = profile.kind
    doc = {"kind": kind}
    if kind == "constant":
        doc["value"] = profile.value
    elif kind == "arc_step":
        doc["pieces"] = [
            [_num_to_wire(s), _num_to_wire(l), v] for s, l, v in profile.pieces
        ]
        doc["default"] = profile.default
    elif kind == "smooth_dip":
        doc.update(center=profile.center, halfwidth=profile.halfwidth, dip=profile.dip)
    elif kind == "cantor_step":
        doc["value"] = profile.value
        doc["cantor"] = circle_set_to_json(profile.cantor)
    elif kind == "volberg":
        doc["gamma"] = profile.gamma
        doc["amplitude"] = profile.amplitude
        doc["cantor"] = circle_set_to_json(profile.cantor)
    elif kind == "samples":
        doc["samples"] = [float(s) for s in profile.samples]
    return doc


def symbol_from_json(doc: dict) -> SymbolSpec:
    if not isinstance(doc, dict):
        raise ScenarioFormatError("field 'symbol': expected an object")
    known = {"blaschke_zeros", "atoms", "cantor", "cantor_parts", "outer", "scale"}
    extra = set(doc) - known
    if extra:
        raise ScenarioFormatError(f"field 'symbol': unexpected key(s) {sorted(extra)}")

    zeros = []
    for i, z in enumerate(doc.get("blaschke_zeros", [])):
        if not isinstance(z, (list, tuple)) or len(z) not in (2, 3):
            raise ScenarioFormatError(
                f"field 'symbol.blaschke_zeros[{i}]': expected [re, im] or [re, im, mult]"
            )
        mult = int(z[2]) if len(z) == 3 else 1
        if mult < 1:
            raise ScenarioFormatError(
                f"field 'symbol.blaschke_zeros[{i}]': multiplicity must be >= 1"
            )
        zeros.append((complex(float(z[0]), float(z[1])), mult))

    atoms = []
    for i, a in enumerate(doc.get("atoms", [])):
        pair = _pair(a, f"symbol.atoms[{i}]")
        atoms.append(
            (
                _num_from_wire(pair[0], f"symbol.atoms[{i}][0]"),
                _num_from_wire(pair[1], f"symbol.atoms[{i}][1]"),
            )
        )

    parts = []
    raw_parts = list(doc.get("cantor_parts", []))
    if "cantor" in doc:
        raw_parts.insert(0, doc["cantor"])
    for i, cp in enumerate(raw_parts):
        if not isinstance(cp, dict):
            raise ScenarioFormatError(
                f"field 'symbol.cantor_parts[{i}]': expected an object"
            )
        mass = _num_from_wire(cp.get("mass", 0), f"symbol.cantor_parts[{i}].mass")
        geometry = {k: v for k, v in cp.items() if k != "mass"}
        support = circle_set_from_json(
            geometry if "kind" in geometry else dict(geometry, kind="cantor"),
            f"symbol.cantor_parts[{i}]",
        )
        parts.append(CantorMeasurePart(support=support, mass=mass))

    singular = SingularMeasureSpec.from_parts(
        atoms=tuple(atoms), cantor_parts=tuple(parts)
    )
    outer = (
        outer_from_json(doc["outer"]) if "outer" in doc else OuterProfile.one()
    )
    raw_scale = doc.get("scale", 1.0)
    if isinstance(raw_scale, (list, tuple)):
        pair = _pair(raw_scale, "symbol.scale")
        scale = complex(float(pair[0]), float(pair[1]))
    else:
        scale = complex(float(_num_from_wire(raw_scale, "symbol.scale")))
    return SymbolSpec(
        zeros=tuple(zeros), singular=singular, outer=outer, scale=scale
    )


def symbol_to_json(spec: SymbolSpec) -> dict:
    doc: dict = {}
    if spec.zeros:
        doc["blaschke_zeros"] = [
            [z.real, z.imag, int(m)] for z, m in spec.zeros
        ]
    if spec.singular.atoms:
        doc["atoms"] = [
            [_num_to_wire(p), _num_to_wire(m)] for p, m in spec.singular.atoms
        ]
    if spec.singular.cantor_parts:
        encoded = [
            dict(circle_set_to_json(part.support), mass=_num_to_wire(part.mass))
            for part in spec.singular.cantor_parts
        ]
        if len(encoded) == 1:
            doc["cantor"] = encoded[0]
        else:
            doc["cantor_parts"] = encoded
    doc["outer"] = outer_to_json(spec.outer)
    if spec.scale != 1.0:
        doc["scale"] = (
            spec.scale.real
            if spec.scale.imag == 0.0
            else [spec.scale.real, spec.scale.imag]
        )
    return doc


# --------------------------------------------------------------------------
# scenarios


@dataclass(frozen=True)
class Scenario:
    """One resolved experiment: symbol + parameters + kind."""

    name: str
    kind: str
    symbol: SymbolSpec
    alpha: float = 1.0
    degrees: tuple = (40,)
    grid: int = 1024
    seed: int = 7
    out: Optional[str] = None
    lam: complex = 0.3 - 0.2j
    npoints: int = 8
    radius: float = 0.9
    points: Optional[tuple] = None
    target: str = "carrier"
    f_poly: Optional[tuple] = None
    circle_set: Optional[CircleSet] = None
    depth: Optional[int] = None

    @property
    def degree(self) -> int:
        return max(self.degrees)

    def validate(self) -> "Scenario":
        if self.kind not in KINDS:
            raise ScenarioFormatError(
                f"field 'kind': {self.kind!r} is not one of {', '.join(KINDS)}"
            )
        if not self.name:
            raise ScenarioFormatError("field 'name': must be nonempty")
        if self.alpha <= 0:
            raise ScenarioFormatError(
                f"field 'alpha': must be positive, got {self.alpha}"
            )
        if not self.degrees or any(
            (not isinstance(n, int)) or n < 0 for n in self.degrees
        ):
            raise ScenarioFormatError(
                "field 'degrees': expected a nonempty list of nonnegative ints"
            )
        if self.grid < 4 or self.grid % 2:
            raise ScenarioFormatError(
                f"field 'grid': must be an even integer >= 4, got {self.grid}"
            )
        if self.kind in ("moments", "splitting", "cyclicity"):
            need = 4 * self.degree + 4
            if self.grid < need:
                raise ScenarioFormatError(
                    f"field 'grid': {self.grid} too small for degree "
                    f"{self.degree}; need grid >= {need}"
                )
        if self.kind == "bcset" and self.circle_set is None:
            raise ScenarioFormatError("field 'set': required for kind 'bcset'")
        if not (0 < self.radius < 1):
            raise ScenarioFormatError(
                f"field 'radius': must lie in (0, 1), got {self.radius}"
            )
        if abs(self.lam) >= 1:
            raise ScenarioFormatError(
                f"field 'lam': must lie strictly inside the disk, |lam|={abs(self.lam):.4g}"
            )
        return self


_SCENARIO_KEYS = {
    "name",
    "kind",
    "symbol",
    "alpha",
    "degree",
    "degrees",
    "grid",
    "seed",
    "out",
    "lam",
    "npoints",
    "radius",
    "points",
    "target",
    "f_poly",
    "set",
    "depth",
}


def scenario_from_json(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioFormatError("scenario document must be a JSON object")
    extra = set(doc) - _SCENARIO_KEYS
    if extra:
        raise ScenarioFormatError(f"unexpected scenario key(s): {sorted(extra)}")
    for key in ("name", "kind"):
        if key not in doc:
            raise ScenarioFormatError(f"field {key!r}: required")

    if "degrees" in doc:
        degrees = doc["degrees"]
        if not isinstance(degrees, list):
            raise ScenarioFormatError("field 'degrees': expected a list of ints")
        degrees = tuple(degrees)
    elif "degree" in doc:
        degrees = (doc["degree"],)
    else:
        degrees = (40,)

    lam = doc.get("lam", [0.3, -0.2])
    if isinstance(lam, (list, tuple)):
        pair = _pair(lam, "lam")
        lam = complex(float(pair[0]), float(pair[1]))
    else:
        lam = complex(float(_num_from_wire(lam, "lam")))

    points = None
    if "points" in doc:
        if not isinstance(doc["points"], list):
            raise ScenarioFormatError("field 'points': expected a list of [re, im]")
        points = tuple(
            complex(float(_pair(p, f"points[{i}]")[0]), float(p[1]))
            for i, p in enumerate(doc["points"])
        )

    f_poly = None
    if "f_poly" in doc:
        if not isinstance(doc["f_poly"], list) or not doc["f_poly"]:
            raise ScenarioFormatError("field 'f_poly': expected a nonempty list")
        coeffs = []
        for i, c in enumerate(doc["f_poly"]):
            if isinstance(c, (list, tuple)):
                coeffs.append(complex(float(_pair(c, f"f_poly[{i}]")[0]), float(c[1])))
            else:
                coeffs.append(complex(float(_num_from_wire(c, f"f_poly[{i}]"))))
        f_poly = tuple(coeffs)

    circle_set = (
        circle_set_from_json(doc["set"], "set") if "set" in doc else None
    )

    grid = doc.get("grid", 1024)
    if not isinstance(grid, int):
        raise ScenarioFormatError("field 'grid': expected an int")
    seed = doc.get("seed", 7)
    if not isinstance(seed, int):
        raise ScenarioFormatError("field 'seed': expected an int")
    npoints = doc.get("npoints", 8)
    if not isinstance(npoints, int) or npoints < 1:
        raise ScenarioFormatError("field 'npoints': expected a positive int")
    target = doc.get("target", "carrier")
    if target not in ("carrier", "one"):
        raise ScenarioFormatError(
            f"field 'target': expected 'carrier' or 'one', got {target!r}"
        )
    depth = doc.get("depth")
    if depth is not None and (not isinstance(depth, int) or depth < 0):
        raise ScenarioFormatError("field 'depth': expected a nonnegative int")

    symbol = symbol_from_json(doc.get("symbol", {}))
    return Scenario(
        name=str(doc["name"]),
        kind=str(doc["kind"]),
        symbol=symbol,
        alpha=float(_num_from_wire(doc.get("alpha", 1.0), "alpha")),
        degrees=degrees,
        grid=grid,
        seed=seed,
        out=doc.get("out"),
        lam=lam,
        npoints=npoints,
        radius=float(_num_from_wire(doc.get("radius", 0.9), "radius")),
        points=points,
        target=target,
        f_poly=f_poly,
        circle_set=circle_set,
        depth=depth,
    ).validate()


def scenario_to_json(sc: Scenario) -> dict:
    doc = {
        "name": sc.name,
        "kind": sc.kind,
        "symbol": symbol_to_json(sc.symbol),
        "alpha": sc.alpha,
        "degrees": list(sc.degrees),
        "grid": sc.grid,
        "seed": sc.seed,
    }
    if sc.out is not None:
        doc["out"] = sc.out
    if sc.kind == "embed":
        doc["lam"] = [sc.lam.real, sc.lam.imag]
    if sc.kind == "kernel-gram":
        doc["npoints"] = sc.npoints
        doc["radius"] = sc.radius
        if sc.points is not None:
            doc["points"] = [[p.real, p.imag] for p in sc.points]
    if sc.kind == "splitting":
        doc["target"] = sc.target
    if sc.kind == "division" and sc.f_poly is not None:
        doc["f_poly"] = [[c.real, c.imag] for c in sc.f_poly]
    if sc.circle_set is not None:
        doc["set"] = circle_set_to_json(sc.circle_set)
    if sc.depth is not None:
        doc["depth"] = sc.depth
    return doc


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"{path}: not valid JSON ({exc})")
    except OSError as exc:
        raise ScenarioFormatError(f"{path}: {exc.strerror or exc}")
    return scenario_from_json(doc)


# --------------------------------------------------------------------------
# running


@dataclass(frozen=True)
class Table:
    name: str
    header: tuple
    rows: tuple

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header)
        for row in self.rows:
            writer.writerow([_cell(v) for v in row])
        return buf.getvalue()


def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


@dataclass(frozen=True)
class ScenarioRun:
    scenario: Scenario
    results: dict
    tables: tuple
    headline: str
    wall_time_s: float

    def report(self) -> dict:
        return {
            "tool": "hblab",
            "version": __version__,
            "scenario": scenario_to_json(self.scenario),
            "wall_time_s": self.wall_time_s,
            "headline": self.headline,
            "results": self.results,
        }


def _distance_outputs(seq, degrees) -> tuple:
    values = seq.values
    rows = tuple((int(n), float(values[n])) for n in range(len(values)))
    table = Table("distances", ("n", "d_n"), rows)
    at_degrees = {
        str(n): (float(values[n]) if n < len(values) else None) for n in degrees
    }
    results = {
        "target": seq.target,
        "alpha": seq.alpha,
        "jitter": seq.jitter,
        "fit_rate": _none_if_nan(seq.fit_rate),
        "fit_residual": _none_if_nan(seq.fit_residual),
        "terminal": float(values[-1]),
        "at_degrees": at_degrees,
        "note": seq.note,
    }
    return results, (table,)


def _none_if_nan(x):
    if x is None:
        return None
    x = float(x)
    return None if np.isnan(x) else x


def _boundary_grid_theta(m: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(m) / m


def _run_symbol(sc: Scenario):
    ev = symbol_eval(sc.symbol, sc.grid)
    theta = _boundary_grid_theta(sc.grid)
    values = np.asarray(ev.values)
    delta = np.asarray(ev.delta.values, dtype=float)
    rows = tuple(
        (float(theta[j]), float(values[j].real), float(values[j].imag), float(delta[j]))
        for j in range(sc.grid)
    )
    table = Table("boundary", ("theta", "re", "im", "delta"), rows)
    carrier = ev.delta.carrier
    results = {
        "grid": sc.grid,
        "guarded_nodes": list(map(int, ev.guarded)),
        "max_abs_b": float(np.max(np.abs(values))),
        "delta_sq_mass": float(np.mean(delta**2)),
        "extremality": {
            "integral": ev.extremality.integral,
            "is_extreme": ev.extremality.is_extreme,
            "floored_fraction": ev.extremality.floored_fraction,
        },
        "carrier_arcs": (
            [[float(s), float(l)] for s, l in carrier.stage_arcs()]
            if carrier is not None
            else None
        ),
        "support_full": ev.delta.support_full,
    }
    flag = "extreme" if ev.extremality.is_extreme else "non-extreme"
    headline = (
        f"max|b|={results['max_abs_b']:.6f}, mass(Delta^2)={results['delta_sq_mass']:.6f}, {flag}"
    )
    return results, (table,), headline


def _run_moments(sc: Scenario):
    delta = delta_weight(sc.symbol, sc.grid)
    mu = build_mu(delta, sc.alpha, sc.degree)
    gram = gram_matrix(mu, sc.degree)
    diag = np.real(np.diag(gram.entries))
    rows = []
    for n in range(sc.degree + 1):
        beta = disk_moment(n, sc.alpha)
        ck = mu.chat(n)
        rows.append((int(n), float(beta), float(ck.real), float(ck.imag), float(diag[n])))
    table = Table("moments", ("n", "beta", "chat_re", "chat_im", "gram_diag"), rows)
    eigs = np.linalg.eigvalsh(gram.entries)
    results = {
        "alpha": sc.alpha,
        "degree": sc.degree,
        "boundary_mass": float(mu.chat(0).real),
        "trace": float(np.real(np.trace(gram.entries))),
        "min_eigenvalue": float(eigs[0]),
    }
    headline = (
        f"trace={results['trace']:.6g}, min eig={results['min_eigenvalue']:.3e}, "
        f"boundary mass={results['boundary_mass']:.6g}"
    )
    return results, (table,), headline


def _splitting_target(sc: Scenario, delta) -> np.ndarray:
    if sc.target == "one":
        return np.ones(sc.grid)
    carrier = delta.carrier
    x = np.arange(sc.grid) / sc.grid
    if carrier is None:
        member = np.asarray(delta.values, dtype=float) > 0
    else:
        member = np.zeros(sc.grid, dtype=bool)
        for s, length in carrier.stage_arcs():
            member |= np.mod(x - float(s), 1.0) < float(length)
    return member.astype(float)


def _run_splitting(sc: Scenario):
    delta = delta_weight(sc.symbol, sc.grid)
    mu = build_mu(delta, sc.alpha, sc.degree)
    target = _splitting_target(sc, delta)
    seq = splitting_indicator(mu, target, sc.degree)
    results, tables = _distance_outputs(seq, sc.degrees)
    headline = (
        f"terminal d={results['terminal']:.6g}, fitted rate={results['fit_rate']}"
    )
    return results, tables, headline


def _run_cyclicity(sc: Scenario):
    delta = delta_weight(sc.symbol, sc.grid)
    mu = build_mu(delta, sc.alpha, sc.degree)
    seq = cyclicity_indicator(mu, sc.symbol, sc.degree)
    results, tables = _distance_outputs(seq, sc.degrees)
    headline = (
        f"terminal d={results['terminal']:.6g}, fitted rate={results['fit_rate']}"
    )
    return results, tables, headline


def _run_kernel_gram(sc: Scenario):
    if sc.points is not None:
        points = np.asarray(sc.points, dtype=complex)
    else:
        rng = np.random.default_rng(sc.seed)
        r = sc.radius * np.sqrt(rng.uniform(size=sc.npoints))
        phi = rng.uniform(0.0, 2.0 * np.pi, size=sc.npoints)
        points = r * np.exp(1j * phi)
    gram = kernel_gram(sc.symbol, points)
    rows = tuple(
        (
            int(i),
            float(points[i].real),
            float(points[i].imag),
            float(abs(gram.b_values[i])),
        )
        for i in range(len(points))
    )
    table = Table("points", ("i", "re", "im", "abs_b"), rows)
    trace = gram.trace()
    min_eig = gram.min_eigenvalue()
    results = {
        "npoints": int(len(points)),
        "trace": trace,
        "min_eigenvalue": min_eig,
        "min_eig_over_trace": min_eig / trace if trace else None,
    }
    headline = f"min eig={min_eig:.3e} over trace={trace:.6g}"
    return results, (table,), headline


def _run_embed(sc: Scenario):
    pair, hb_norm2, ev = kernel_embedding_pair(sc.symbol, sc.lam, sc.grid)
    report = j_embedding_solve(
        sc.symbol, pair.f, m=sc.grid, target_hb_norm2=hb_norm2
    )
    coeffs = report.pair.f.coeffs
    rows = tuple(
        (int(k), float(coeffs[k].real), float(coeffs[k].imag))
        for k in range(min(len(coeffs), 2 * report.n_g))
    )
    table = Table("f_coefficients", ("k", "re", "im"), rows)
    delta = np.asarray(ev.delta.values, dtype=float)
    mask = delta > 0
    lemma_gap = float(
        np.sqrt(np.mean(np.abs((report.pair.g - pair.g)[mask]) ** 2))
    ) if mask.any() else 0.0
    results = {
        "lam": [sc.lam.real, sc.lam.imag],
        "grid": sc.grid,
        "n_g": report.n_g,
        "residual": report.residual,
        "rhs_norm": report.rhs_norm,
        "isometry_defect": report.isometry_defect,
        "kernel_norm_sq": hb_norm2,
        "solver_vs_closed_form_g": lemma_gap,
        "g_norm": report.pair.g_norm(),
        "extremality": {
            "integral": report.extremality.integral,
            "is_extreme": report.extremality.is_extreme,
        },
        "warning": report.warning,
    }
    headline = (
        f"residual={report.residual:.3e}, isometry defect={report.isometry_defect:.3e}"
    )
    return results, (table,), headline


def _run_division(sc: Scenario):
    if sc.f_poly is not None:
        poly = DiskSeries(np.asarray(sc.f_poly, dtype=complex))
        theta = _boundary_grid_theta(sc.grid)
        z = np.exp(1j * theta)
        pvals = poly(z)
        f_values = evaluate_symbol(sc.symbol, z) * pvals
        norm = float(np.sqrt(np.mean(np.abs(pvals) ** 2)))
    else:
        f_values = np.ones(sc.grid, dtype=complex)
        norm = 1.0
    rep = division_diagnostic(sc.symbol, f_values)
    results = {
        "value": rep.value,
        "relative": rep.value / norm if norm else None,
        "excluded_nodes": list(map(int, rep.excluded)),
        "proxy_radius": rep.proxy_radius,
        "grid": rep.grid_size,
    }
    table = Table(
        "division",
        ("value", "excluded_count", "proxy_radius", "grid"),
        ((rep.value, len(rep.excluded), rep.proxy_radius, rep.grid_size),),
    )
    headline = f"anti-analytic remainder={rep.value:.3e}"
    return results, (table,), headline


def _run_bcset(sc: Scenario):
    E = sc.circle_set
    report = bc_entropy(E, depth=sc.depth)
    flag = contains_bc_subset_flag(E)
    rows = tuple(
        (int(k), float(report.partial_sums[k]))
        for k in range(len(report.partial_sums))
    )
    table = Table("entropy", ("stage", "partial_sum"), rows)
    results = {
        "classification": report.classification,
        "value": report.value,
        "limit": report.limit,
        "depth": report.depth,
        "term_count": report.term_count,
        "measure": E.measure(),
        "limit_measure": E.limit_measure(),
        "bc_subset_flag": {"answer": flag.answer, "reason": flag.reason},
    }
    headline = f"entropy {report.classification}, value={report.value:.6g}"
    return results, (table,), headline


def _run_classify(sc: Scenario):
    verdict = corollary_classifier(sc.symbol, sc.alpha, grid=sc.grid)
    rows = tuple(
        (item.name, "" if item.holds is None else item.holds, item.detail)
        for item in verdict.checklist
    )
    table = Table("checklist", ("condition", "holds", "detail"), rows)
    results = verdict.to_dict()
    headline = f"prediction: {verdict.prediction}"
    if verdict.triggered:
        headline += f" (via {verdict.triggered})"
    return results, (table,), headline


_RUNNERS = {
    "symbol": _run_symbol,
    "moments": _run_moments,
    "splitting": _run_splitting,
    "cyclicity": _run_cyclicity,
    "kernel-gram": _run_kernel_gram,
    "embed": _run_embed,
    "division": _run_division,
    "bcset": _run_bcset,
    "classify": _run_classify,
}


def run_scenario(sc: Scenario) -> ScenarioRun:
    sc = sc.validate()
    t0 = time.perf_counter()
    results, tables, headline = _RUNNERS[sc.kind](sc)
    wall = time.perf_counter() - t0
    return ScenarioRun(
        scenario=sc,
        results=results,
        tables=tables,
        headline=headline,
        wall_time_s=wall,
    )


def write_outputs(run: ScenarioRun, prefix: str) -> list:
    """Write ``{prefix}.json`` and one CSV per table; returns paths written."""
    import os

    paths = []
    directory = os.path.dirname(prefix)
    if directory:
        os.makedirs(directory, exist_ok=True)
    json_path = prefix + ".json"
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(run.report(), fh, indent=2, sort_keys=False)
        fh.write("\n")
    paths.append(json_path)
    single = len(run.tables) == 1
    for tbl in run.tables:
        csv_path = prefix + (".csv" if single else f"_{tbl.name}.csv")
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(tbl.to_csv())
        paths.append(csv_path)
    return paths


# --------------------------------------------------------------------------
# suites


@dataclass(frozen=True)
class SuiteEntry:
    name: str
    kind: str
    status: str  # ok | refused | error
    headline: str
    message: str = ""


def run_suite(paths: Sequence[str], out_dir: Optional[str] = None) -> tuple:
    """Run every scenario file; a failure never stops the rest.

    Returns ``(entries, n_bad)`` where refusals and internal errors both
    count as bad for the process exit code.
    """
    import os

    entries = []
    for path in paths:
        try:
            sc = load_scenario(path)
        except RefusalError as exc:
            entries.append(
                SuiteEntry(
                    name=os.path.basename(path),
                    kind="?",
                    status="refused",
                    headline="",
                    message=str(exc),
                )
            )
            continue
        try:
            run = run_scenario(sc)
        except RefusalError as exc:
            entries.append(
                SuiteEntry(sc.name, sc.kind, "refused", "", str(exc))
            )
            continue
        except Exception as exc:  # noqa: BLE001 - suite must keep going
            entries.append(
                SuiteEntry(sc.name, sc.kind, "error", "", f"{type(exc).__name__}: {exc}")
            )
            continue
        prefix = None
        if out_dir is not None:
            prefix = os.path.join(out_dir, sc.name)
        elif sc.out is not None:
            prefix = sc.out
        if prefix is not None:
            write_outputs(run, prefix)
        entries.append(SuiteEntry(sc.name, sc.kind, "ok", run.headline))
    n_bad = sum(1 for e in entries if e.status != "ok")
    return entries, n_bad


def suite_table(entries: Sequence[SuiteEntry]) -> Table:
    rows = tuple(
        (e.name, e.kind, e.status, e.headline if e.status == "ok" else e.message)
        for e in entries
    )
    return Table("suite", ("name", "kind", "status", "summary"), rows)
