"""Factored bounded symbols on the unit disk and their boundary sampling.

A symbol is stored in factored form ``scale * B * S * O``: a finite Blaschke
product ``B``, a singular inner factor ``S`` driven by a
:class:`~hblab.circlesets.SingularMeasureSpec`, and an outer factor ``O``
reconstructed from a declared boundary-modulus profile.  Keeping the factors
declared (rather than recovering them from raw samples) is what lets the
boundary weight ``Delta = sqrt(1 - |b|^2)`` be computed from the modulus
profile exactly: on the unit circle ``|B| = |S| = 1`` almost everywhere, so
``|b| = |scale| * omega`` with ``omega`` the declared outer modulus.

Two evaluation routes coexist:

* an *exact* route for profiles whose log-modulus has closed-form Fourier
  data (constant, arc steps, the half-angle cosine, Cantor-stage steps);
  boundary phase then comes from a closed-form conjugate function and the
  interior from a rapidly convergent power series;
* a *grid* route for everything else: trapezoid (FFT) discretization of the
  Herglotz integral of ``log omega`` on the evaluation grid, clamped below
  at ``log(EPS_FLOOR)``.  This is the grid-sense outer function: its modulus
  matches the declared profile exactly at the grid nodes.

Inner factors are never evaluated at grid nodes closer than arc-distance
``2*pi/M`` to the singular support; such nodes are reported as guarded and
filled by a radial proxy evaluated at radius ``1 - 10/M``.

All reductions use ``numpy`` pairwise summation on arrays in a fixed order,
so repeated runs are bit-identical.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .circlesets import (
    CARRIER_EPS,
    CircleSet,
    SingularMeasureSpec,
    _arcs_from_mask,
)
from .errors import (
    ConstructionInconsistencyError,
    DegenerateSymbolError,
    DomainError,
    SingularityError,
)

EPS_FLOOR = 1e-300
LOG_FLOOR = math.log(EPS_FLOOR)
EXTREMALITY_THRESHOLD = -50.0
#: radial proxy for guarded boundary nodes sits at 1 - PROXY_FACTOR / M
PROXY_FACTOR = 10.0
#: Gauss-Legendre nodes per stage arc when integrating against Cantor parts
NODES_PER_ARC = 16

_TAU = 2.0 * math.pi


def _as_turns(theta: np.ndarray) -> np.ndarray:
    return np.mod(np.asarray(theta, dtype=float) / _TAU, 1.0)


def _arc_distance_turns(x: np.ndarray, arcs) -> np.ndarray:
    """Circular distance (in turns) from each point of ``x`` to an arc union.

    ``x`` is in turns; arcs are ``(start, length)`` pairs in turns.  Points
    inside an arc get distance 0.
    """
    x = np.asarray(x, dtype=float)
    best = np.full(x.shape, np.inf)
    for start, length in arcs:
        rel = np.mod(x - float(start), 1.0)
        out = np.minimum(rel - float(length), 1.0 - rel)
        np.minimum(best, np.where(rel < float(length), 0.0, out), out=best)
    return best


def _point_distance_turns(x: np.ndarray, positions) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    best = np.full(x.shape, np.inf)
    for p in positions:
        d = np.abs(np.mod(x - float(p), 1.0))
        np.minimum(best, np.minimum(d, 1.0 - d), out=best)
    return best


# ---------------------------------------------------------------------------
# outer profiles


@dataclass(frozen=True)
class OuterProfile:
    """Declared boundary modulus ``omega`` of the outer factor.

    ``kind`` selects the family; only the fields relevant to that family are
    read.  Positions and lengths are in turns (fractions of the circle);
    ``modulus`` takes angles in radians because that is what evaluation
    grids use.
    """

    kind: str = "one"
    value: float = 1.0
    default: float = 1.0
    pieces: tuple = ()  # arc_step: ((start, length, value), ...) in turns
    center: float = 0.0  # smooth_dip
    halfwidth: float = 0.05  # smooth_dip, in turns
    dip: float = 0.75  # smooth_dip: peak value of 1 - omega^2
    cantor: Optional[CircleSet] = None  # cantor_step / volberg
    gamma: float = 2.0  # volberg decay exponent
    amplitude: float = 0.9  # volberg: peak of 1 - omega^2 in each gap
    samples: Optional[tuple] = None  # grid-aligned modulus samples

    _KINDS = (
        "one",
        "constant",
        "arc_step",
        "cos_half",
        "smooth_dip",
        "cantor_step",
        "volberg",
        "samples",
    )

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise DomainError(f"unknown outer profile kind {self.kind!r}")
        if self.kind == "constant" and not (0.0 < self.value <= 1.0):
            raise DomainError("constant modulus must lie in (0, 1]")
        if self.kind == "arc_step":
            for start, length, val in self.pieces:
                if not (0.0 < float(val) <= 1.0):
                    raise DegenerateSymbolError(
                        "arc-step modulus values must lie in (0, 1]"
                    )
                if not (0.0 < float(length) <= 1.0):
                    raise DomainError("arc-step piece length must lie in (0, 1]")
            if not (0.0 < self.default <= 1.0):
                raise DomainError("arc-step default modulus must lie in (0, 1]")
        if self.kind == "smooth_dip":
            if not (0.0 < self.dip <= 1.0):
                raise DomainError("smooth dip depth must lie in (0, 1]")
            if not (0.0 < self.halfwidth < 0.5):
                raise DomainError("smooth dip halfwidth must lie in (0, 1/2) turns")
        if self.kind == "cantor_step":
            if self.cantor is None:
                raise DomainError("cantor_step profile needs a CircleSet")
            if not (0.0 < self.value <= 1.0):
                raise DomainError("cantor_step modulus must lie in (0, 1]")
        if self.kind == "volberg":
            if self.cantor is None:
                raise DomainError("volberg profile needs a CircleSet")
            if not (0.0 < self.amplitude <= 1.0):
                raise DomainError("volberg amplitude must lie in (0, 1]")
            if self.gamma <= 0:
                raise DomainError("volberg exponent must be positive")
        if self.kind == "samples":
            if self.samples is None or len(self.samples) < 4:
                raise DomainError("sampled profile needs at least 4 samples")

    # -- constructors ------------------------------------------------------

    @classmethod
    def one(cls) -> "OuterProfile":
        return cls(kind="one")

    @classmethod
    def constant(cls, value: float) -> "OuterProfile":
        return cls(kind="constant", value=float(value))

    @classmethod
    def arc_step(cls, pieces, default: float = 1.0) -> "OuterProfile":
        norm = tuple((float(s), float(l), float(v)) for s, l, v in pieces)
        return cls(kind="arc_step", pieces=norm, default=float(default))

    @classmethod
    def cos_half(cls) -> "OuterProfile":
        """``omega(theta) = |cos(theta/2)|`` — the outer factor is (1+z)/2."""
        return cls(kind="cos_half")

    @classmethod
    def smooth_dip(cls, center: float, halfwidth: float, dip: float) -> "OuterProfile":
        return cls(
            kind="smooth_dip",
            center=float(center),
            halfwidth=float(halfwidth),
            dip=float(dip),
        )

    @classmethod
    def cantor_step(cls, cantor: CircleSet, value: float) -> "OuterProfile":
        return cls(kind="cantor_step", cantor=cantor, value=float(value))

    @classmethod
    def volberg(
        cls, cantor: CircleSet, gamma: float = 2.0, amplitude: float = 0.9
    ) -> "OuterProfile":
        return cls(kind="volberg", cantor=cantor, gamma=float(gamma), amplitude=float(amplitude))

    @classmethod
    def from_samples(cls, values: Sequence[float]) -> "OuterProfile":
        return cls(kind="samples", samples=tuple(float(v) for v in values))

    # -- evaluation --------------------------------------------------------

    def modulus(self, theta: np.ndarray) -> np.ndarray:
        """Boundary modulus at angles ``theta`` (radians)."""
        theta = np.asarray(theta, dtype=float)
        if self.kind == "one":
            return np.ones_like(theta)
        if self.kind == "constant":
            return np.full_like(theta, self.value)
        if self.kind == "arc_step":
            x = _as_turns(theta)
            out = np.full_like(theta, self.default)
            for start, length, val in self.pieces:
                rel = np.mod(x - start, 1.0)
                out = np.where(rel < length, val, out)
            return out
        if self.kind == "cos_half":
            return np.abs(np.cos(theta / 2.0))
        if self.kind == "smooth_dip":
            x = _as_turns(theta)
            d = np.mod(x - self.center, 1.0)
            d = np.minimum(d, 1.0 - d) / self.halfwidth
            bump = np.zeros_like(theta)
            inside = d < 1.0
            di = d[inside]
            bump[inside] = np.exp(-di * di / (1.0 - di * di))
            return np.sqrt(np.clip(1.0 - self.dip * bump, 0.0, 1.0))
        if self.kind == "cantor_step":
            x = _as_turns(theta)
            out = np.ones_like(theta)
            for start, length in self._stage_arcs():
                rel = np.mod(x - start, 1.0)
                out = np.where(rel < length, self.value, out)
            return out
        if self.kind == "volberg":
            x = _as_turns(theta)
            dsq = np.zeros_like(theta)
            for gs, gl in self._gap_arcs():
                rel = np.mod(x - gs, 1.0)
                inside = rel < gl
                u = 2.0 * np.minimum(rel[inside], gl - rel[inside]) / gl
                u = np.clip(u, 0.0, 1.0)
                val = np.zeros_like(u)
                pos = u > 0
                val[pos] = self.amplitude * np.exp(1.0 - u[pos] ** (-self.gamma))
                dsq[inside] = val
            return np.sqrt(np.clip(1.0 - dsq, 0.0, 1.0))
        # samples: grid-aligned by construction
        if theta.shape != (len(self.samples),):
            raise DomainError(
                "sampled outer profile is grid-aligned: need exactly "
                f"{len(self.samples)} evaluation angles, got {theta.shape}"
            )
        return np.asarray(self.samples, dtype=float)

    def _stage_arcs(self):
        arcs = [(float(s), float(l)) for s, l in self.cantor.stage_arcs()]
        return arcs

    def _gap_arcs(self):
        from .circlesets import complement_arcs

        stage = self.cantor.stage_arcs()
        return [(float(s), float(l)) for s, l in complement_arcs(stage)]

    # -- exact log-Fourier data -------------------------------------------

    def log_fourier_exact(self, kmax: int) -> Optional[np.ndarray]:
        """Fourier coefficients ``c_k = ∫ log(omega) e^{-ik t} dm`` for k = 0..kmax.

        Returns ``None`` when no closed form is declared for this kind; the
        caller then falls back to the FFT route.
        """
        if self.kind == "one":
            return np.zeros(kmax + 1, dtype=complex)
        if self.kind == "constant":
            out = np.zeros(kmax + 1, dtype=complex)
            out[0] = math.log(self.value)
            return out
        if self.kind == "cos_half":
            out = np.zeros(kmax + 1, dtype=complex)
            out[0] = -math.log(2.0)
            k = np.arange(1, kmax + 1)
            out[1:] = ((-1.0) ** (k + 1)) / (2.0 * k)
            return out
        if self.kind == "arc_step":
            entries = [
                (float(s), float(l), math.log(v) - math.log(self.default))
                for s, l, v in self.pieces
            ]
            out = _arc_log_fourier(entries, kmax)
            out[0] += math.log(self.default)
            return out
        if self.kind == "cantor_step":
            logv = math.log(self.value)
            entries = [(float(s), float(l), logv) for s, l in self._stage_arcs()]
            return _arc_log_fourier(entries, kmax)
        return None

    def conjugate_exact(self, theta: np.ndarray) -> Optional[np.ndarray]:
        """Harmonic conjugate of ``log omega`` (vanishing at the origin)."""
        theta = np.asarray(theta, dtype=float)
        if self.kind in ("one", "constant"):
            return np.zeros_like(theta)
        if self.kind == "cos_half":
            return np.angle(1.0 + np.exp(1j * theta))
        if self.kind == "arc_step":
            entries = [
                (float(s), float(l), math.log(v) - math.log(self.default))
                for s, l, v in self.pieces
            ]
            return _arc_conjugate(entries, theta)
        if self.kind == "cantor_step":
            logv = math.log(self.value)
            entries = [(float(s), float(l), logv) for s, l in self._stage_arcs()]
            return _arc_conjugate(entries, theta)
        return None

    # -- structure for downstream consumers --------------------------------

    def omega_sq_pieces(self):
        """Piecewise-constant description of ``omega^2`` or ``None``.

        A tuple of ``(start, length, omega_sq)`` covering the whole circle,
        in turns.  Only step-type profiles declare one; it is what makes
        exact Fourier data of the boundary weight available downstream.
        """
        from .circlesets import complement_arcs

        if self.kind == "one":
            return ((0.0, 1.0, 1.0),)
        if self.kind == "constant":
            return ((0.0, 1.0, self.value**2),)
        if self.kind == "arc_step":
            arcs = [(Fraction(s).limit_denominator(10**12) if not isinstance(s, Fraction) else s,
                     Fraction(l).limit_denominator(10**12) if not isinstance(l, Fraction) else l)
                    for s, l, _ in self.pieces]
            out = [
                (float(s), float(l), float(v) ** 2) for s, l, v in self.pieces
            ]
            for gs, gl in complement_arcs(arcs):
                out.append((float(gs), float(gl), self.default**2))
            return tuple(out)
        if self.kind == "cantor_step":
            from .circlesets import complement_arcs as _comp

            stage = self.cantor.stage_arcs()
            out = [(float(s), float(l), self.value**2) for s, l in stage]
            for gs, gl in _comp(stage):
                out.append((float(gs), float(gl), 1.0))
            return tuple(out)
        return None

    def carrier_info(self):
        """Where the profile keeps ``omega < 1``: (CircleSet or None, full_flag).

        ``None`` means the carrier is only known through grid samples.
        """
        if self.kind == "one":
            return CircleSet.from_arcs(()), False
        if self.kind == "constant":
            if self.value < 1.0:
                return CircleSet.full_circle(), True
            return CircleSet.from_arcs(()), False
        if self.kind == "arc_step":
            arcs = [
                (Fraction(s).limit_denominator(10**12), Fraction(l).limit_denominator(10**12))
                for s, l, v in self.pieces
                if v < 1.0
            ]
            if self.default < 1.0:
                return CircleSet.full_circle(), True
            return CircleSet.from_arcs(arcs), False
        if self.kind == "cos_half":
            return CircleSet.full_circle(), True
        if self.kind == "smooth_dip":
            start = Fraction(self.center - self.halfwidth).limit_denominator(10**12) % 1
            length = Fraction(2 * self.halfwidth).limit_denominator(10**12)
            return CircleSet.from_arcs([(start, length)]), False
        if self.kind == "cantor_step":
            return self.cantor, False
        if self.kind == "volberg":
            from .circlesets import complement_arcs

            gaps = complement_arcs(self.cantor.stage_arcs())
            return CircleSet.from_arcs(gaps), False
        return None, False


def _arc_log_fourier(entries, kmax: int) -> np.ndarray:
    """Fourier coefficients of a sum of arc indicators with weights.

    ``entries`` is ``(start, length, weight)`` in turns; returns
    ``c_k = sum_i weight_i * e^{-2 pi i k c_i} * sin(pi k l_i) / (pi k)``
    for ``k = 1..kmax`` and the mean at ``k = 0``.
    """
    out = np.zeros(kmax + 1, dtype=complex)
    if kmax >= 1:
        k = np.arange(1, kmax + 1, dtype=float)
    for start, length, weight in entries:
        out[0] += weight * length
        if kmax >= 1:
            c = start + length / 2.0
            out[1:] += weight * np.exp(-2j * math.pi * k * c) * np.sin(
                math.pi * k * length
            ) / (math.pi * k)
    return out


def _arc_conjugate(entries, theta: np.ndarray) -> np.ndarray:
    """Closed-form conjugate function of weighted arc indicators.

    For a single arc from ``a`` to ``b`` (radians) with weight ``w`` the
    conjugate of ``w * 1_arc`` at ``e^{i theta}`` is
    ``(w/pi) * log(|sin((theta-a)/2)| / |sin((theta-b)/2)|)``.
    """
    out = np.zeros_like(np.asarray(theta, dtype=float))
    for start, length, weight in entries:
        a = _TAU * start
        b = _TAU * (start + length)
        num = np.abs(np.sin((theta - a) / 2.0))
        den = np.abs(np.sin((theta - b) / 2.0))
        out += (weight / math.pi) * (
            np.log(np.maximum(num, EPS_FLOOR)) - np.log(np.maximum(den, EPS_FLOOR))
        )
    return out


# ---------------------------------------------------------------------------
# grids and series


@dataclass(frozen=True)
class BoundaryGrid:
    """Samples of a function on the circle of radius ``r`` (uniform angles)."""

    values: np.ndarray
    r: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))
        m = self.values.shape[0]
        if m < 4 or m % 2:
            raise DomainError(f"grid size must be even and >= 4, got {m}")

    @property
    def size(self) -> int:
        return int(self.values.shape[0])

    def theta(self) -> np.ndarray:
        return _TAU * np.arange(self.size) / self.size


@dataclass(frozen=True)
class DiskSeries:
    """Power series on the disk, evaluated by Horner in a fixed order."""

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex))

    @property
    def degree(self) -> int:
        return int(self.coeffs.shape[0]) - 1

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for c in self.coeffs[::-1]:
            out = out * z + c
        return out


def log_outer_series(profile: OuterProfile, grid_hint: int = 4096, kmax: Optional[int] = None) -> DiskSeries:
    """Power series of ``log O`` so that ``O(z) = exp(series(z))``.

    Uses exact log-Fourier data when the profile declares it, otherwise the
    FFT of the clamped log-modulus on a ``grid_hint``-point grid.
    """
    if kmax is None:
        kmax = max(grid_hint // 2, 256)
    exact = profile.log_fourier_exact(kmax)
    if exact is not None:
        coeffs = np.concatenate(([exact[0]], 2.0 * exact[1:]))
        return DiskSeries(coeffs)
    m = grid_hint
    if profile.kind == "samples":
        m = len(profile.samples)
    if m % 2:
        raise DomainError("grid size must be even")
    theta = _TAU * np.arange(m) / m
    w = profile.modulus(theta)
    _check_modulus_bound(w)
    u = np.log(np.maximum(w, EPS_FLOOR))
    if np.max(w) < 1e-150:
        raise DegenerateSymbolError("outer modulus vanishes everywhere on the grid")
    chat = np.fft.fft(u) / m
    half = m // 2
    coeffs = np.zeros(half + 1, dtype=complex)
    coeffs[0] = chat[0]
    coeffs[1:half] = 2.0 * chat[1:half]
    coeffs[half] = chat[half]
    return DiskSeries(coeffs)


def _check_modulus_bound(w: np.ndarray) -> None:
    if np.any(w > 1.0 + 1e-9):
        raise DomainError(
            f"outer modulus exceeds 1 (max {float(np.max(w)):.6g}); symbols "
            "must map into the closed unit disk"
        )
    if np.any(w < 0):
        raise DomainError("outer modulus must be nonnegative")


@dataclass(frozen=True)
class OuterFactor:
    """Outer function pinned to an evaluation grid: boundary values + series."""

    boundary: BoundaryGrid
    log_series: DiskSeries
    method: str  # "exact" or "fft"

    def __call__(self, z):
        return np.exp(self.log_series(z))


def outer_from_modulus(modulus_samples: Sequence[float]) -> OuterFactor:
    """Grid-sense outer function with the given boundary modulus samples.

    Folded-FFT discretization of the Herglotz integral of ``log omega``:
    the boundary modulus of the result reproduces the input samples to
    machine precision at the grid nodes, and the attached series evaluates
    the factor inside the disk.
    """
    w = np.asarray(modulus_samples, dtype=float)
    m = w.shape[0]
    if m < 4 or m % 2:
        raise DomainError(f"grid size must be even and >= 4, got {m}")
    _check_modulus_bound(w)
    if np.max(w) < 1e-150:
        raise DegenerateSymbolError("outer modulus vanishes everywhere on the grid")
    u = np.log(np.maximum(w, EPS_FLOOR))
    chat = np.fft.fft(u) / m
    half = m // 2
    folded = np.zeros(m, dtype=complex)
    folded[0] = chat[0]
    folded[1:half] = 2.0 * chat[1:half]
    folded[half] = chat[half]
    logb = np.fft.ifft(folded * m)
    series_coeffs = folded[: half + 1].copy()
    return OuterFactor(
        boundary=BoundaryGrid(np.exp(logb), r=1.0),
        log_series=DiskSeries(series_coeffs),
        method="fft",
    )


def outer_on_grid(profile: OuterProfile, m: int) -> OuterFactor:
    """Outer factor for a declared profile on an ``m``-point boundary grid.

    Prefers the exact conjugate-function route (boundary phase in closed
    form) and falls back to :func:`outer_from_modulus` on the grid samples.
    """
    if m < 4 or m % 2:
        raise DomainError(f"grid size must be even and >= 4, got {m}")
    theta = _TAU * np.arange(m) / m
    if profile.kind == "samples" and len(profile.samples) != m:
        raise DomainError(
            f"sampled outer profile has {len(profile.samples)} samples; "
            f"evaluation grid wants {m}"
        )
    w = profile.modulus(theta)
    _check_modulus_bound(w)
    conj = profile.conjugate_exact(theta)
    if conj is not None:
        u = np.log(np.maximum(w, EPS_FLOOR))
        values = np.exp(u + 1j * conj)
        return OuterFactor(
            boundary=BoundaryGrid(values, r=1.0),
            log_series=log_outer_series(profile, grid_hint=m),
            method="exact",
        )
    return outer_from_modulus(w)


# ---------------------------------------------------------------------------
# inner factors


def blaschke_eval(zeros, points) -> np.ndarray:
    """Finite Blaschke product with the classical positive normalization.

    ``zeros`` is a sequence of ``(a, multiplicity)`` with ``|a| < 1``; a zero
    at the origin contributes the factor ``z``.  Each nonzero ``a``
    contributes ``(|a|/a) * (a - z) / (1 - conj(a) z)``, which is positive
    at ``z = 0``.
    """
    z = np.asarray(points, dtype=complex)
    out = np.ones_like(z)
    for a, mult in _normalize_zeros(zeros):
        if a == 0:
            out = out * z**mult
        else:
            factor = (abs(a) / a) * (a - z) / (1.0 - np.conj(a) * z)
            out = out * factor**mult
    return out


def _normalize_zeros(zeros):
    norm = []
    for entry in zeros:
        if isinstance(entry, (tuple, list)):
            a, mult = complex(entry[0]), int(entry[1])
        else:
            a, mult = complex(entry), 1
        if abs(a) >= 1.0:
            raise DomainError(f"Blaschke zero {a} must lie strictly inside the disk")
        if mult < 1:
            raise DomainError("zero multiplicity must be a positive integer")
        norm.append((a, mult))
    return norm


def singular_inner_eval(
    nu: SingularMeasureSpec,
    points,
    *,
    nodes_per_arc: int = NODES_PER_ARC,
    support_guard: float = 1e-9,
) -> np.ndarray:
    """Singular inner factor ``exp(-∫ (zeta+z)/(zeta-z) d nu(zeta))``.

    Atomic parts are summed in closed form; Cantor-type parts are integrated
    stage arc by stage arc with Gauss-Legendre nodes against the stagewise
    uniform density.  Points on the unit circle are fine as long as they
    stay ``support_guard`` turns away from the support of ``nu``; closer
    than that the Herglotz kernel blows up and a
    :class:`~hblab.errors.SingularityError` is raised.
    """
    z = np.asarray(points, dtype=complex)
    if np.any(np.abs(z) > 1.0 + 1e-12):
        raise DomainError("singular inner factors are only evaluated on the closed disk")
    if nu.is_empty:
        return np.ones_like(z)

    on_circle = np.abs(z) >= 1.0 - 1e-12
    if np.any(on_circle):
        x = np.angle(z[on_circle]) / _TAU % 1.0
        dist = np.full(x.shape, np.inf)
        atoms_pos = [p for p, _m in nu.atoms]
        if atoms_pos:
            dist = np.minimum(dist, _point_distance_turns(x, atoms_pos))
        for part in nu.cantor_parts:
            dist = np.minimum(dist, _arc_distance_turns(x, part.support.stage_arcs()))
        if np.any(dist < support_guard):
            worst = float(np.min(dist))
            raise SingularityError(
                "boundary point within arc-distance "
                f"{worst:.3g} turns of the singular support; use a radial proxy"
            )

    exponent = np.zeros_like(z)
    for pos, mass in nu.atoms:
        zeta = cmath.exp(2j * math.pi * float(pos))
        exponent += float(mass) * (zeta + z) / (zeta - z)
    if nu.cantor_parts:
        glx, glw = np.polynomial.legendre.leggauss(nodes_per_arc)
        for part in nu.cantor_parts:
            arcs = part.support.stage_arcs()
            per_arc = float(part.mass) / len(arcs)
            for start, length in arcs:
                t = float(start) + float(length) * (glx + 1.0) / 2.0
                zeta = np.exp(2j * math.pi * t)
                # mean of the kernel over the arc, weighted by the arc mass
                kern = (zeta[:, None] + z[None, :]) / (zeta[:, None] - z[None, :])
                exponent += per_arc * np.tensordot(glw / 2.0, kern, axes=1)
    return np.exp(-exponent)


# ---------------------------------------------------------------------------
# symbol specs


_EMPTY_MEASURE = SingularMeasureSpec()


@dataclass(frozen=True)
class SymbolSpec:
    """Symbol in factored form ``scale * B * S * O``."""

    zeros: tuple = ()
    singular: SingularMeasureSpec = field(default_factory=SingularMeasureSpec)
    outer: OuterProfile = field(default_factory=OuterProfile.one)
    scale: complex = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "zeros", tuple(_normalize_zeros(self.zeros)))
        if abs(self.scale) > 1.0 + 1e-12:
            raise DomainError("scale must lie in the closed unit disk")

    @property
    def scale_abs(self) -> float:
        return abs(self.scale)

    def is_inner(self) -> bool:
        """True when the declared boundary modulus is identically 1."""
        return self.outer.kind == "one" and abs(self.scale_abs - 1.0) < 1e-14

    def has_inner_part(self) -> bool:
        return bool(self.zeros) or not self.singular.is_empty


def evaluate_symbol(
    spec: SymbolSpec,
    points,
    *,
    series_grid: int = 4096,
    nodes_per_arc: int = NODES_PER_ARC,
) -> np.ndarray:
    """Evaluate the symbol at arbitrary points of the closed disk.

    Interior evaluation of the outer factor goes through its log series
    (exact coefficients when declared, FFT coefficients on a
    ``series_grid``-point grid otherwise); inner factors use their closed
    forms.  Boundary points must stay off the singular support.
    """
    z = np.asarray(points, dtype=complex)
    out = np.full(z.shape, complex(spec.scale))
    if spec.zeros:
        out = out * blaschke_eval(spec.zeros, z)
    if not spec.singular.is_empty:
        out = out * singular_inner_eval(spec.singular, z, nodes_per_arc=nodes_per_arc)
    if spec.outer.kind != "one":
        series = log_outer_series(spec.outer, grid_hint=series_grid)
        out = out * np.exp(series(z))
    return out


# ---------------------------------------------------------------------------
# boundary evaluation: grids, weights, extremality


@dataclass(frozen=True)
class ExtremalityReport:
    """Numerical proxy for divergence of the log-gap integral of ``|b|``."""

    integral: float
    is_extreme: bool
    threshold: float = EXTREMALITY_THRESHOLD
    floored_fraction: float = 0.0


def extremality_report(boundary_modulus: np.ndarray) -> ExtremalityReport:
    """Trapezoid value of the log-gap integral with a hard floor.

    The integrand ``log(1 - |b|)`` is clamped at ``log(EPS_FLOOR)`` where
    the gap closes; the flag trips when the clamped mean falls below
    ``EXTREMALITY_THRESHOLD``.  Advisory only — nothing downstream refuses
    based on it.
    """
    gap = 1.0 - np.asarray(boundary_modulus, dtype=float)
    floored = gap <= EPS_FLOOR
    vals = np.log(np.maximum(gap, EPS_FLOOR))
    integral = float(np.mean(vals))
    return ExtremalityReport(
        integral=integral,
        is_extreme=integral < EXTREMALITY_THRESHOLD,
        floored_fraction=float(np.mean(floored)),
    )


@dataclass(frozen=True)
class DeltaWeight:
    """Boundary defect weight ``Delta = sqrt(1 - |b|^2)`` on a grid.

    ``carrier`` is the declared (or grid-detected) support of the weight;
    ``delta_sq_pieces`` is a piecewise-constant description of ``Delta^2``
    in turns when the profile admits one — that is what exact moment
    computations key on.
    """

    values: np.ndarray
    carrier: Optional[CircleSet]
    support_full: bool
    delta_sq_pieces: Optional[tuple]
    scale_abs: float

    @property
    def grid_size(self) -> int:
        return int(np.asarray(self.values).shape[0])

    def mass(self) -> float:
        """Mean of ``Delta^2`` over the circle (trapezoid value)."""
        v = np.asarray(self.values, dtype=float)
        return float(np.mean(v * v))


def delta_weight(spec: SymbolSpec, m: int) -> DeltaWeight:
    """Boundary weight of the symbol on an ``m``-point grid.

    Built from the declared modulus, never from radial limits: on the unit
    circle the inner factors are unimodular a.e., so ``|b| = |scale| *
    omega`` exactly where it matters.
    """
    theta = _TAU * np.arange(m) / m
    if spec.outer.kind == "samples" and len(spec.outer.samples) != m:
        raise DomainError(
            f"sampled outer profile has {len(spec.outer.samples)} samples; "
            f"evaluation grid wants {m}"
        )
    omega = spec.outer.modulus(theta)
    _check_modulus_bound(omega)
    s = spec.scale_abs
    dsq = np.clip(1.0 - (s * omega) ** 2, 0.0, 1.0)
    values = np.sqrt(dsq)

    pieces = spec.outer.omega_sq_pieces()
    if pieces is not None:
        pieces = tuple((ps, pl, max(0.0, 1.0 - s * s * pv)) for ps, pl, pv in pieces)

    carrier, support_full = spec.outer.carrier_info()
    if s < 1.0 - 1e-14:
        carrier, support_full = CircleSet.full_circle(), True
    elif carrier is None:
        # grid detection for sampled profiles
        mask = dsq > CARRIER_EPS
        support_full = bool(np.all(mask))
        carrier = CircleSet.full_circle() if support_full else CircleSet.from_arcs(
            _arcs_from_mask(mask)
        )
    return DeltaWeight(
        values=values,
        carrier=carrier,
        support_full=support_full,
        delta_sq_pieces=pieces,
        scale_abs=s,
    )


@dataclass(frozen=True)
class SymbolEvaluation:
    """Output of :func:`symbol_eval`: samples, weight, and diagnostics."""

    grid: BoundaryGrid
    delta: DeltaWeight
    boundary_modulus: np.ndarray  # declared |b| on the boundary grid
    extremality: ExtremalityReport
    guarded: np.ndarray  # indices evaluated via the radial proxy

    @property
    def values(self) -> np.ndarray:
        return self.grid.values

    def theta(self) -> np.ndarray:
        return self.grid.theta()


def symbol_eval(spec: SymbolSpec, m: int, r_eval: float = 1.0) -> SymbolEvaluation:
    """Sample the symbol on the circle of radius ``r_eval``.

    At ``r_eval = 1`` inner factors are evaluated by their boundary closed
    forms, except at grid nodes within arc-distance ``2*pi/m`` of the
    singular support: those are guarded and filled with the full product
    evaluated at radius ``1 - 10/m`` (their indices are reported, never
    silently zeroed).  The boundary weight always comes from the declared
    modulus.
    """
    if m < 4 or m % 2:
        raise DomainError(f"grid size must be even and >= 4, got {m}")
    if not (0.0 < r_eval <= 1.0):
        raise DomainError("evaluation radius must lie in (0, 1]")
    theta = _TAU * np.arange(m) / m
    delta = delta_weight(spec, m)
    modulus = spec.scale_abs * spec.outer.modulus(theta)

    extremality = extremality_report(modulus)

    if r_eval < 1.0:
        values = evaluate_symbol(spec, r_eval * np.exp(1j * theta), series_grid=m)
        guarded = np.zeros(0, dtype=int)
        return SymbolEvaluation(
            grid=BoundaryGrid(values, r=r_eval),
            delta=delta,
            boundary_modulus=modulus,
            extremality=extremality,
            guarded=guarded,
        )

    boundary_points = np.exp(1j * theta)
    values = np.full(m, complex(spec.scale))
    if spec.zeros:
        values = values * blaschke_eval(spec.zeros, boundary_points)

    guard = 1.0 / m  # arc-distance 2*pi/m in turns
    guarded_mask = np.zeros(m, dtype=bool)
    if not spec.singular.is_empty:
        x = theta / _TAU
        dist = np.full(m, np.inf)
        atoms_pos = [p for p, _m in spec.singular.atoms]
        if atoms_pos:
            dist = np.minimum(dist, _point_distance_turns(x, atoms_pos))
        for part in spec.singular.cantor_parts:
            dist = np.minimum(dist, _arc_distance_turns(x, part.support.stage_arcs()))
        guarded_mask = dist < guard
        safe = ~guarded_mask
        if np.any(safe):
            values[safe] = values[safe] * singular_inner_eval(
                spec.singular, boundary_points[safe], support_guard=guard / 4.0
            )

    if spec.outer.kind != "one":
        outer = outer_on_grid(spec.outer, m)
        values = values * outer.boundary.values

    if np.any(guarded_mask):
        r_proxy = 1.0 - PROXY_FACTOR / m
        proxy_points = r_proxy * boundary_points[guarded_mask]
        values[guarded_mask] = evaluate_symbol(spec, proxy_points, series_grid=m)

    worst = float(np.max(np.abs(values)))
    if worst > 1.0 + 1e-8:
        raise ConstructionInconsistencyError(
            f"assembled symbol exceeds the unit bound on the grid (max |b| = {worst:.6g})"
        )

    return SymbolEvaluation(
        grid=BoundaryGrid(values, r=1.0),
        delta=delta,
        boundary_modulus=modulus,
        extremality=extremality,
        guarded=np.nonzero(guarded_mask)[0],
    )
