"""Checklist classifier for density of smooth functions in the symbol space.

Each corollary-style condition the package can actually test becomes a
checklist item over the declared structure of a symbol:

* ``carrier-without-bc-subset`` — the carrier of the boundary weight holds
  no positive-measure set with convergent complement entropy (within the
  parametrized families); predicts NOT dense.
* ``candidate-mass-off-support`` — some entropy-divergent singular part
  carries mass strictly off the closed support of the weight; predicts NOT
  dense.
* ``constructive-recipe`` — the carrier is a finite union of
  positive-measure arcs with convergent entropy, the log of the weight is
  integrable on each piece (quadrature with a refinement doubling check),
  and every entropy-divergent singular part lives inside the carrier;
  predicts dense.

The conditions are structurally disjoint — the recipe needs a carrier piece
that is itself a positive-measure entropy-finite set, which contradicts the
first hypothesis, and it confines candidate parts to the carrier, which
contradicts the second — so no spec can collect contradictory verdicts.
Anything the checklist cannot reach is reported ``indeterminate`` (the
family is supported but no condition resolved) or ``outside-family`` (the
spec's shape is not covered at all).  Verdicts are predictions about the
infinite-dimensional statement, produced from finite certificates; the
checklist always rides along so the basis of the call is auditable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .circlesets import (
    CircleSet,
    bc_entropy,
    carrier_and_support,
    contains_bc_subset_flag,
    decompose_measure,
)
from .errors import DomainError
from .symbols import EPS_FLOOR, SymbolSpec, delta_weight

#: divergence threshold for the per-piece log-weight integral
LOG_INTEGRABILITY_THRESHOLD = -50.0
#: refinement may not raise the value by more than this and still count as
#: divergent; a large rise means the coarse value was a sampling accident
DOUBLING_SLACK = 1.0


@dataclass(frozen=True)
class ChecklistItem:
    name: str
    holds: Optional[bool]  # None when not evaluable
    detail: str

    def to_dict(self) -> dict:
        return {"name": self.name, "holds": self.holds, "detail": self.detail}


@dataclass(frozen=True)
class ClassifierVerdict:
    """Prediction plus the full checklist that produced it."""

    prediction: str  # dense | not-dense | indeterminate | outside-family
    triggered: Optional[str]
    checklist: tuple
    alpha: float
    gamma_estimate: Optional[float] = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "prediction": self.prediction,
            "triggered": self.triggered,
            "alpha": self.alpha,
            "gamma_estimate": self.gamma_estimate,
            "note": self.note,
            "checklist": [item.to_dict() for item in self.checklist],
        }


def _log_weight_integral(delta_sq: np.ndarray, member: np.ndarray) -> float:
    """Grid integral of ``log(Delta^2)`` over the masked nodes (not a mean)."""
    m = delta_sq.shape[0]
    vals = np.log(np.maximum(delta_sq[member], EPS_FLOOR))
    return float(np.sum(vals) / m)


def _arc_member_mask(theta_turns: np.ndarray, start, length) -> np.ndarray:
    rel = np.mod(theta_turns - float(start), 1.0)
    return rel < float(length)


def _log_integrable_on(spec: SymbolSpec, arc, m: int) -> tuple:
    """Divergence test for the log-weight integral over one carrier arc.

    Returns ``(integrable: bool, value_coarse, value_fine)``.  Divergence is
    declared only when the refined value stays below the threshold and does
    not bounce back up under refinement — a coarse grid alone never
    convicts, because a handful of deep-notch nodes can fake a low value
    that doubling corrects.
    """
    results = []
    for grid in (m, 2 * m):
        x = np.arange(grid) / grid
        dsq = np.asarray(delta_weight(spec, grid).values, dtype=float) ** 2
        member = _arc_member_mask(x, arc[0], arc[1])
        results.append(_log_weight_integral(dsq, member))
    coarse, fine = results
    divergent = fine < LOG_INTEGRABILITY_THRESHOLD and fine < coarse + DOUBLING_SLACK
    return (not divergent), coarse, fine


def _arcs_contained(inner_arcs, outer_arcs, tol: float = 1e-12) -> tuple:
    """Split ``inner_arcs`` into (inside, outside, straddling) vs an arc union."""
    inside, outside, straddle = [], [], []
    for s, length in inner_arcs:
        s = float(s) % 1.0
        length = float(length)
        placed = False
        for os, ol in outer_arcs:
            rel = (s - float(os) % 1.0) % 1.0
            if rel <= float(ol) - length + tol:
                inside.append((s, length))
                placed = True
                break
        if placed:
            continue
        mid = (s + length / 2.0) % 1.0
        hit = any(((mid - float(os)) % 1.0) < float(ol) for os, ol in outer_arcs)
        (straddle if hit else outside).append((s, length))
    return inside, outside, straddle


def corollary_classifier(
    spec: SymbolSpec, alpha: float, *, grid: int = 2048
) -> ClassifierVerdict:
    """Run the density checklist for a declared symbol at smoothness ``alpha``.

    The order of evaluation is: candidate-mass-off-support, then
    carrier-without-bc-subset, then the constructive recipe; the first
    condition that holds fixes the prediction.  ``grid`` controls the
    quadrature for the log-integrability test (it is doubled internally).
    """
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    checklist = []

    delta = delta_weight(spec, grid)
    carrier, support = carrier_and_support(delta)
    carrier_arcs = carrier.stage_arcs()
    carrier_measure = carrier.measure()

    if not carrier_arcs:
        checklist.append(
            ChecklistItem(
                "boundary-weight-present",
                False,
                "Delta vanishes identically; the boundary corollaries do not "
                "apply to inner symbols",
            )
        )
        return ClassifierVerdict(
            prediction="outside-family",
            triggered=None,
            checklist=tuple(checklist),
            alpha=float(alpha),
            note="inner symbol: no boundary weight to classify against",
        )
    checklist.append(
        ChecklistItem(
            "boundary-weight-present",
            True,
            f"carrier measure {carrier_measure:.6g} across "
            f"{len(carrier_arcs)} arc(s)",
        )
    )

    decomposition = decompose_measure(spec.singular)
    candidate_parts = decomposition.nu_k.cantor_parts
    support_arcs = support.stage_arcs()

    # hypothesis: entropy-divergent singular mass strictly off the support
    off_mass = 0.0
    for part in candidate_parts:
        inside, outside, straddle = _arcs_contained(
            part.support.stage_arcs(), support_arcs
        )
        if outside:
            off_mass += float(part.mass) * len(outside) / max(
                1, len(part.support.stage_arcs())
            )
    h_off = off_mass > 0
    checklist.append(
        ChecklistItem(
            "candidate-mass-off-support",
            h_off,
            f"entropy-divergent singular mass off supp(Delta): {off_mass:.6g}"
            if h_off
            else "no entropy-divergent part carries mass off supp(Delta)",
        )
    )
    if h_off:
        return ClassifierVerdict(
            prediction="not-dense",
            triggered="candidate-mass-off-support",
            checklist=tuple(checklist),
            alpha=float(alpha),
            note="family-relative: candidacy is certified only within the "
            "parametrized Cantor families",
        )

    flag = contains_bc_subset_flag(carrier)
    checklist.append(
        ChecklistItem(
            "carrier-has-bc-subset",
            {"yes": True, "no": False}.get(flag.answer),
            flag.reason,
        )
    )
    if flag.answer == "no":
        gamma = 0.0
        return ClassifierVerdict(
            prediction="not-dense",
            triggered="carrier-without-bc-subset",
            checklist=tuple(checklist),
            alpha=float(alpha),
            gamma_estimate=gamma,
            note="carrier admits no positive-measure subset of convergent "
            "entropy within its family",
        )
    if flag.answer == "outside-family":
        return ClassifierVerdict(
            prediction="outside-family",
            triggered=None,
            checklist=tuple(checklist),
            alpha=float(alpha),
            note=flag.reason,
        )

    # constructive recipe: finite-arc carrier, entropy, log integrability,
    # candidate confinement
    entropy = bc_entropy(carrier)
    entropy_ok = entropy.classification in ("finite", "convergent")
    checklist.append(
        ChecklistItem(
            "carrier-entropy-finite",
            entropy_ok,
            f"complement entropy {entropy.value:.6g} ({entropy.classification})",
        )
    )

    log_ok = True
    details = []
    for arc in carrier_arcs:
        ok, coarse, fine = _log_integrable_on(spec, arc, grid)
        log_ok = log_ok and ok
        details.append(
            f"arc at {float(arc[0]):.4g}+{float(arc[1]):.4g}: "
            f"{coarse:.4g} -> {fine:.4g} ({'integrable' if ok else 'divergent'})"
        )
    checklist.append(
        ChecklistItem("log-weight-integrable", log_ok, "; ".join(details))
    )

    confined = True
    for part in candidate_parts:
        inside, outside, straddle = _arcs_contained(
            part.support.stage_arcs(), carrier_arcs
        )
        if outside or straddle:
            confined = False
    checklist.append(
        ChecklistItem(
            "candidates-confined-to-carrier",
            confined,
            "every entropy-divergent part lies inside the carrier"
            if confined
            else "an entropy-divergent part leaves the carrier",
        )
    )
    checklist.append(
        ChecklistItem(
            "finite-blaschke-part",
            True,
            f"{len(spec.zeros)} declared zero(s)",
        )
    )

    gamma = carrier_measure if entropy_ok else None
    if entropy_ok and log_ok and confined and carrier_measure > 0:
        return ClassifierVerdict(
            prediction="dense",
            triggered="constructive-recipe",
            checklist=tuple(checklist),
            alpha=float(alpha),
            gamma_estimate=gamma,
            note="carrier pieces are positive-measure convergent-entropy arcs "
            "with integrable log-weight; divergent singular parts confined",
        )
    return ClassifierVerdict(
        prediction="indeterminate",
        triggered=None,
        checklist=tuple(checklist),
        alpha=float(alpha),
        gamma_estimate=gamma,
        note="no tested condition resolved; finite-degree evidence only",
    )
