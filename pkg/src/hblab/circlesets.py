"""Closed subsets of the unit circle and singular measures carried by them.

Angular positions and arc lengths are measured in turns: the full circle has
length 1.  Endpoints produced by dyadic or triadic subdivision are kept as
exact :class:`fractions.Fraction` values, because the entropy functional
``sum |A_k| log(1/|A_k|)`` is evaluated near its convergence boundary and
should not inherit float rounding from the set construction itself.

Two set families are parametrized:

* finite unions of closed arcs;
* stage-``depth`` Cantor constructions driven by a per-stage ratio schedule
  (fixed ratio, or ratios approaching 1/2 like ``r_k = (1 - c k**-p) / 2``).

Raw grid masks are accepted as a third, unclassified kind: operations that
need a family-level answer report ``outside-family`` for them instead of
guessing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import DomainError

ScalarLike = Union[Fraction, int, float]

#: entropy partial-sum depth used when a report does not request another one
DEFAULT_ENTROPY_DEPTH = 40

#: threshold on Delta for grid detection of the carrier
CARRIER_EPS = 1e-9


def _exact(x: ScalarLike) -> Union[Fraction, float]:
    """Keep Fractions and ints exact, pass floats through."""
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    return float(x)


def _to_float(x: ScalarLike) -> float:
    return float(x)


@dataclass(frozen=True)
class RatioSchedule:
    """Per-stage subdivision ratios for Cantor constructions.

    ``fixed``
        every stage keeps two children scaled by ``ratio`` (0 < ratio < 1/2);
        the limit set has measure zero and a convergent complement entropy.
    ``power``
        stage ``k`` keeps ratio ``r_k = (1 - c * k**-p) / 2``.  The gap share
        ``c * k**-p`` controls everything: the limit measure is positive iff
        ``p > 1`` and the complement entropy is finite iff ``p > 2``.
    """

    kind: str
    ratio: Optional[ScalarLike] = None
    c: Optional[float] = None
    p: Optional[float] = None

    def __post_init__(self):
        if self.kind == "fixed":
            if self.ratio is None:
                raise DomainError("fixed schedule requires 'ratio'")
            r = _to_float(self.ratio)
            if not (0.0 < r < 0.5):
                raise DomainError(f"fixed ratio must lie in (0, 1/2), got {r}")
        elif self.kind == "power":
            if self.c is None or self.p is None:
                raise DomainError("power schedule requires 'c' and 'p'")
            if not (0.0 < self.c < 1.0):
                raise DomainError(f"power schedule needs 0 < c < 1, got c={self.c}")
            if self.p <= 0:
                raise DomainError(f"power schedule needs p > 0, got p={self.p}")
        else:
            raise DomainError(f"unknown ratio schedule kind {self.kind!r}")

    def ratio_at(self, k: int) -> Union[Fraction, float]:
        """Child ratio used at stage ``k`` (1-based)."""
        if self.kind == "fixed":
            return _exact(self.ratio)
        return (1.0 - self.c * float(k) ** (-self.p)) / 2.0

    def gap_share_at(self, k: int) -> Union[Fraction, float]:
        """Fraction of a stage-(k-1) arc removed at stage ``k`` (= 1 - 2 r_k)."""
        if self.kind == "fixed":
            return 1 - 2 * _exact(self.ratio)
        return self.c * float(k) ** (-self.p)

    # classification helpers -------------------------------------------------

    def limit_measure_positive(self) -> bool:
        if self.kind == "fixed":
            return False
        return self.p > 1.0

    def entropy_converges(self) -> bool:
        if self.kind == "fixed":
            return True  # geometric: (2r)^k with 2r < 1
        return self.p > 2.0


@dataclass(frozen=True)
class CircleSet:
    """A closed subset of the circle in one of three representations.

    kind ``"arcs"``
        disjoint closed arcs, each ``(start, length)`` in turns.
    kind ``"cantor"``
        the stage-``depth`` approximant of a Cantor construction inside
        ``base_arc``; ``schedule`` drives the per-stage ratios.  Family
        classifications (entropy, subset flags) refer to the limit object.
    kind ``"samples"``
        a raw boolean mask on a uniform grid; carried for grid-detected
        carriers, never classified at family level.
    """

    kind: str
    arcs: tuple = ()
    base_arc: tuple = (Fraction(0), Fraction(1))
    schedule: Optional[RatioSchedule] = None
    depth: int = 0
    mask: Optional[tuple] = None

    # construction -----------------------------------------------------------

    @staticmethod
    def from_arcs(arcs: Iterable[Sequence[ScalarLike]]) -> "CircleSet":
        cleaned = []
        for a in arcs:
            start, length = _exact(a[0]) % 1, _exact(a[1])
            if length <= 0 or length > 1:
                raise DomainError(f"arc length must lie in (0, 1], got {length}")
            cleaned.append((start, length))
        cleaned.sort(key=lambda t: _to_float(t[0]))
        for (s0, l0), (s1, _l1) in zip(cleaned, cleaned[1:]):
            if _to_float(s0) + _to_float(l0) > _to_float(s1) + 1e-15:
                raise DomainError("arcs must be disjoint")
        if len(cleaned) > 1:
            s_last, l_last = cleaned[-1]
            if _to_float(s_last) + _to_float(l_last) > 1.0 + _to_float(cleaned[0][0]) + 1e-15:
                raise DomainError("arcs must be disjoint (wraparound overlap)")
        return CircleSet(kind="arcs", arcs=tuple(cleaned))

    @staticmethod
    def full_circle() -> "CircleSet":
        return CircleSet.from_arcs([(Fraction(0), Fraction(1))])

    @staticmethod
    def cantor(
        base_arc: Sequence[ScalarLike],
        ratio: Optional[ScalarLike] = None,
        depth: int = 8,
        schedule: Optional[RatioSchedule] = None,
    ) -> "CircleSet":
        if (ratio is None) == (schedule is None):
            raise DomainError("give exactly one of 'ratio' or 'schedule'")
        if schedule is None:
            schedule = RatioSchedule(kind="fixed", ratio=ratio)
        if depth < 0:
            raise DomainError("depth must be nonnegative")
        start, length = _exact(base_arc[0]) % 1, _exact(base_arc[1])
        if length <= 0 or length > 1:
            raise DomainError(f"base arc length must lie in (0, 1], got {length}")
        return CircleSet(
            kind="cantor", base_arc=(start, length), schedule=schedule, depth=depth
        )

    @staticmethod
    def from_samples(mask: Sequence[bool]) -> "CircleSet":
        m = tuple(bool(v) for v in mask)
        if len(m) < 4:
            raise DomainError("sample mask needs at least 4 cells")
        return CircleSet(kind="samples", mask=m)

    # geometry ---------------------------------------------------------------

    def stage_arcs(self) -> list:
        """Arcs of the represented (finite-stage) set, as (start, length)."""
        if self.kind == "arcs":
            return list(self.arcs)
        if self.kind == "samples":
            return _arcs_from_mask(np.asarray(self.mask, dtype=bool))
        arcs = [self.base_arc]
        for k in range(1, self.depth + 1):
            r = self.schedule.ratio_at(k)
            nxt = []
            for s, L in arcs:
                child = L * r
                nxt.append((s, child))
                nxt.append((s + L - child, child))
            arcs = nxt
        return arcs

    def measure(self) -> float:
        """Length of the represented finite-stage set."""
        return float(sum(_to_float(L) for _s, L in self.stage_arcs()))

    def limit_measure(self) -> float:
        """Measure of the limit object (0 for thin families)."""
        if self.kind in ("arcs", "samples"):
            return self.measure()
        if not self.schedule.limit_measure_positive():
            return 0.0
        prod = _to_float(self.base_arc[1])
        k = 1
        while True:
            share = _to_float(self.schedule.gap_share_at(k))
            prod *= 1.0 - share
            if share < 1e-14 or k > 10_000:
                break
            k += 1
        # remaining tail shares are summable; bound the leftover factor
        return prod

    def complement_stage_gaps(self, depth: Optional[int] = None) -> list:
        """Complement arcs, ordered stage by stage for Cantor sets.

        Returns a list of ``(stage, count, length)`` aggregates; the arcs-kind
        complement is reported as stage-0 entries, one per gap.
        """
        if self.kind in ("arcs", "samples"):
            return [(0, 1, L) for L in _complement_lengths(self.stage_arcs())]
        depth = self.depth if depth is None else depth
        out = []
        base_len = self.base_arc[1]
        if _to_float(base_len) < 1.0:
            out.append((0, 1, 1 - _exact(base_len)))
        arc_len = _exact(base_len)
        for k in range(1, depth + 1):
            share = self.schedule.gap_share_at(k)
            gap = arc_len * share
            if _to_float(gap) > 0.0:
                out.append((k, 2 ** (k - 1), gap))
            arc_len = arc_len * self.schedule.ratio_at(k)
        return out

    def contains_point(self, position: ScalarLike) -> bool:
        x = _to_float(position) % 1.0
        for s, L in self.stage_arcs():
            s, L = _to_float(s), _to_float(L)
            d = (x - s) % 1.0
            if d <= L + 1e-15:
                return True
        return False


def complement_arcs(arcs: list) -> list:
    """Positioned complement gaps of a disjoint arc union.

    ``arcs`` is a list of ``(start, length)`` pairs in turns; the result is
    the same format, exact when the inputs are Fractions.  The full circle
    has empty complement, the empty union is its own full-circle gap.
    """
    if not arcs:
        return [(Fraction(0), Fraction(1))]
    arcs = sorted(arcs, key=lambda t: _to_float(t[0]))
    gaps = []
    for (s0, l0), (s1, _l1) in zip(arcs, arcs[1:]):
        g = s1 - (s0 + l0)
        if _to_float(g) > 1e-15:
            gaps.append(((s0 + l0) % 1, g))
    s_first, _ = arcs[0]
    s_last, l_last = arcs[-1]
    g = s_first + 1 - (s_last + l_last)
    if _to_float(g) > 1e-15:
        gaps.append(((s_last + l_last) % 1, g))
    return gaps


def _complement_lengths(arcs: list) -> list:
    """Lengths of complement gaps of a disjoint sorted arc union."""
    if not arcs:
        return [Fraction(1)]
    arcs = sorted(arcs, key=lambda t: _to_float(t[0]))
    total = sum(_to_float(L) for _s, L in arcs)
    if total >= 1.0 - 1e-15:
        return []
    gaps = []
    for (s0, l0), (s1, _l1) in zip(arcs, arcs[1:]):
        g = s1 - (s0 + l0)
        if _to_float(g) > 1e-15:
            gaps.append(g)
    s_first, _ = arcs[0]
    s_last, l_last = arcs[-1]
    g = s_first + 1 - (s_last + l_last)
    if _to_float(g) > 1e-15:
        gaps.append(g)
    return gaps


def _arcs_from_mask(mask: np.ndarray) -> list:
    """Cell-centered arc union covering the True runs of a circular mask."""
    m = int(mask.size)
    if mask.all():
        return [(Fraction(0), Fraction(1))]
    if not mask.any():
        return []
    # roll so that index 0 is False, then split runs without wraparound
    first_false = int(np.argmin(mask))
    rolled = np.roll(mask, -first_false)
    arcs = []
    i = 0
    while i < m:
        if rolled[i]:
            j = i
            while j + 1 < m and rolled[j + 1]:
                j += 1
            start = Fraction(2 * (i + first_false) - 1, 2 * m)
            length = Fraction(j - i + 1, m)
            arcs.append((start % 1, length))
            i = j + 1
        else:
            i += 1
    return arcs


# ---------------------------------------------------------------------------
# entropy


@dataclass(frozen=True)
class BCReport:
    """Entropy report for the complement-arc functional."""

    classification: str  # "finite" | "convergent" | "divergent"
    partial_sums: np.ndarray  # indexed by stage (stage 0 = non-staged gaps)
    limit: Optional[float]
    depth: int
    term_count: int
    detail: str = ""

    @property
    def value(self) -> float:
        return float(self.partial_sums[-1]) if self.partial_sums.size else 0.0


def _entropy_term(total_length: float) -> float:
    if total_length <= 0.0:
        return 0.0
    return total_length * math.log(1.0 / total_length)


def bc_entropy(E: CircleSet, depth: Optional[int] = None) -> BCReport:
    """Entropy ``sum |A_k| log(1/|A_k|)`` over complement arcs of ``E``.

    Finite arc unions get the exact finite sum.  Cantor-family sets get
    stagewise partial sums, a convergence classification decided by the ratio
    schedule, and, for fixed ratios, the closed-form limit of the series.
    """
    if E.kind in ("arcs", "samples"):
        gaps = [_to_float(g) for g in _complement_lengths(E.stage_arcs())]
        value = float(sum(_entropy_term(g) for g in gaps))
        return BCReport(
            classification="finite",
            partial_sums=np.array([value]),
            limit=value,
            depth=0,
            term_count=len(gaps),
            detail="exact finite sum over complement arcs",
        )

    depth = (DEFAULT_ENTROPY_DEPTH if depth is None else depth)
    staged = E.complement_stage_gaps(depth)
    sums = []
    running = 0.0
    terms = 0
    # outer complement of the base arc counts as stage 0
    by_stage = {}
    for stage, count, length in staged:
        by_stage.setdefault(stage, []).append((count, length))
    for stage in range(0, depth + 1):
        for count, length in by_stage.get(stage, []):
            glen = _to_float(length)
            if glen > 0.0:
                running += count * _entropy_term(glen)
                terms += count
        sums.append(running)

    sched = E.schedule
    if sched.entropy_converges():
        limit = _fixed_family_entropy_limit(E) if sched.kind == "fixed" else None
        if limit is None:
            # power schedule with p > 2: sum the staged series until it settles
            limit = _power_family_entropy_limit(E)
        cls = "convergent"
        detail = "staged series converges (geometric or p > 2 tail)"
    else:
        limit = None
        cls = "divergent"
        detail = "staged series diverges (gap share not summable against log)"
    return BCReport(
        classification=cls,
        partial_sums=np.asarray(sums),
        limit=limit,
        depth=depth,
        term_count=terms,
        detail=detail,
    )


def _fixed_family_entropy_limit(E: CircleSet) -> float:
    """Closed form of the staged entropy series for a fixed ratio.

    With base length L, ratio r, gap G = L (1 - 2r) and x = 2r the series is
    ``G [ log(1/G)/(1-x) + log(1/r) x/(1-x)^2 ]`` plus the outer complement
    term of the base arc.
    """
    L = _to_float(E.base_arc[1])
    r = _to_float(E.schedule.ratio)
    G = L * (1.0 - 2.0 * r)
    x = 2.0 * r
    outer = _entropy_term(1.0 - L)
    if G <= 0.0:
        return outer
    series = G * (
        math.log(1.0 / G) / (1.0 - x) + math.log(1.0 / r) * x / (1.0 - x) ** 2
    )
    return outer + series


def _power_family_entropy_limit(E: CircleSet, tol: float = 1e-12) -> float:
    # Tracked in aggregate: total_len = 2^(k-1) * arc_len stays bounded by 1,
    # and log_arc replaces arc_len, which underflows (and 2^(k-1) overflows)
    # long before the k^(1-p) log k terms of a p slightly above 2 die out.
    L = _to_float(E.base_arc[1])
    sched = E.schedule
    running = _entropy_term(1.0 - L)
    total_len = L
    log_arc = math.log(L)
    k = 1
    while k <= 100_000:
        share = _to_float(sched.gap_share_at(k))
        if share > 0.0:
            # 2^(k-1) gaps of length arc_len * share at this stage
            term = total_len * share * -(log_arc + math.log(share))
        else:
            term = 0.0
        running += term
        ratio = _to_float(sched.ratio_at(k))
        log_arc += math.log(ratio)
        total_len *= 2.0 * ratio
        if k > 8 and term < tol:
            break
        k += 1
    return running


# ---------------------------------------------------------------------------
# positive-measure entropy-finite subsets


@dataclass(frozen=True)
class BCSubsetFlag:
    answer: str  # "yes" | "no" | "outside-family"
    reason: str
    witness: Optional[CircleSet] = None


def contains_bc_subset_flag(E: CircleSet) -> BCSubsetFlag:
    """Does ``E`` contain a positive-measure subset with finite complement
    entropy?  Answered within the parametrized families only; raw sample
    masks come back ``outside-family``.

    For thin Cantor constructions the answer is ``no`` on measure grounds
    alone.  For thick ones the family criterion decides: summable gap shares
    with convergent entropy mean the set itself qualifies, while schedules
    with divergent entropy are the classical counterexamples and the family
    answer is ``no``.
    """
    if E.kind == "samples":
        return BCSubsetFlag(
            answer="outside-family",
            reason="raw sample mask; no family classification is claimed",
        )
    if E.kind == "arcs":
        if E.measure() > 0:
            return BCSubsetFlag(
                answer="yes",
                reason="a closed arc of positive length qualifies",
                witness=CircleSet.from_arcs([E.arcs[0]]),
            )
        return BCSubsetFlag(answer="no", reason="the union has measure zero")
    sched = E.schedule
    if not sched.limit_measure_positive():
        return BCSubsetFlag(
            answer="no", reason="limit set has measure zero (positive measure required)"
        )
    if sched.entropy_converges():
        return BCSubsetFlag(
            answer="yes",
            reason="thick construction with convergent complement entropy; "
            "the set itself qualifies",
            witness=E,
        )
    return BCSubsetFlag(
        answer="no",
        reason="thick construction with divergent complement entropy; within "
        "this family no positive-measure subset has finite entropy",
    )


# ---------------------------------------------------------------------------
# singular measures


@dataclass(frozen=True)
class CantorMeasurePart:
    """Balanced (stagewise-uniform) measure on a thin Cantor-family set."""

    support: CircleSet
    mass: float

    def __post_init__(self):
        if self.mass <= 0:
            raise DomainError("cantor part mass must be positive")
        if self.support.kind != "cantor":
            raise DomainError("cantor part support must be a cantor-kind set")
        if self.support.schedule.limit_measure_positive():
            raise DomainError(
                "cantor part support has positive limit measure; the balanced "
                "measure on it is not singular, use a thin schedule"
            )


@dataclass(frozen=True)
class SingularMeasureSpec:
    """Finitely parametrized singular measure: atoms plus thin Cantor parts.

    Atom positions are turns in [0, 1); masses are positive.  Total mass is
    exact Fraction arithmetic over the declared part masses.
    """

    atoms: tuple = ()
    cantor_parts: tuple = ()

    def __post_init__(self):
        seen = set()
        for pos, mass in self.atoms:
            if mass <= 0:
                raise DomainError("atom mass must be positive")
            key = float(pos) % 1.0
            if key in seen:
                raise DomainError(f"duplicate atom position {key}")
            seen.add(key)

    @staticmethod
    def from_parts(atoms=(), cantor_parts=()) -> "SingularMeasureSpec":
        return SingularMeasureSpec(
            atoms=tuple((float(p) % 1.0, float(m)) for p, m in atoms),
            cantor_parts=tuple(cantor_parts),
        )

    @property
    def is_empty(self) -> bool:
        return not self.atoms and not self.cantor_parts

    def total_mass_exact(self) -> Fraction:
        total = Fraction(0)
        for _p, m in self.atoms:
            total += Fraction(m)
        for part in self.cantor_parts:
            total += Fraction(part.mass)
        return total

    def total_mass(self) -> float:
        return float(self.total_mass_exact())

    def support_positions(self) -> list:
        """Representative support positions (atoms and stage-arc endpoints)."""
        pos = [p for p, _m in self.atoms]
        for part in self.cantor_parts:
            for s, L in part.support.stage_arcs():
                pos.append(_to_float(s))
                pos.append((_to_float(s) + _to_float(L)) % 1.0)
        return pos


@dataclass(frozen=True)
class DecompositionReport:
    """Split of a singular measure into an entropy-supported part and the
    complementary candidate part.

    ``nu_c`` collects atoms and parts carried by measure-zero sets with
    finite complement entropy; ``nu_k`` collects parts carried by sets whose
    entropy diverges (family-relative classification).  Masses are conserved
    exactly in Fraction arithmetic.
    """

    nu_c: SingularMeasureSpec
    nu_k: SingularMeasureSpec
    assignments: tuple
    note: str = ""

    def mass_conservation_defect_exact(self, total: Fraction) -> Fraction:
        return total - (
            self.nu_c.total_mass_exact() + self.nu_k.total_mass_exact()
        )


def decompose_measure(nu: SingularMeasureSpec) -> DecompositionReport:
    """Assign each declared part of ``nu`` to the entropy-supported component
    or to the candidate complement, inside the parametrized families."""
    nu_c_atoms = list(nu.atoms)
    nu_c_parts = []
    nu_k_parts = []
    assignments = []
    for pos, mass in nu.atoms:
        assignments.append(("atom", pos, mass, "nu_c", "single point set"))
    for part in nu.cantor_parts:
        report = bc_entropy(part.support, depth=min(part.support.depth + 10, 60))
        if report.classification == "convergent":
            nu_c_parts.append(part)
            assignments.append(
                ("cantor", None, part.mass, "nu_c", "measure-zero support with "
                 "convergent complement entropy")
            )
        else:
            nu_k_parts.append(part)
            assignments.append(
                ("cantor", None, part.mass, "nu_k", "support entropy diverges "
                 "within the schedule family")
            )
    return DecompositionReport(
        nu_c=SingularMeasureSpec(atoms=tuple(nu_c_atoms), cantor_parts=tuple(nu_c_parts)),
        nu_k=SingularMeasureSpec(atoms=(), cantor_parts=tuple(nu_k_parts)),
        assignments=tuple(assignments),
        note="classification is family-relative; parts outside the "
        "parametrized families are never silently assigned",
    )


# ---------------------------------------------------------------------------
# carrier and support of a boundary defect weight


def carrier_and_support(delta) -> tuple:
    """Carrier set ``{Delta > eps}`` and its closure.

    ``delta`` is duck-typed: it needs ``values`` (grid samples), and may
    declare ``carrier`` (a :class:`CircleSet`) and ``support_full`` (True when
    the carrier is dense, e.g. the complement of a nowhere dense set).
    Declared structure wins over grid detection.
    """
    declared = getattr(delta, "carrier", None)
    if declared is not None:
        if getattr(delta, "support_full", False):
            return declared, CircleSet.full_circle()
        return declared, declared
    values = np.asarray(getattr(delta, "values"))
    mask = values > CARRIER_EPS
    arcs = _arcs_from_mask(mask)
    if not arcs:
        empty = CircleSet(kind="arcs", arcs=())
        return empty, empty
    detected = CircleSet.from_arcs(arcs)
    return detected, detected
