"""Reproducing kernels and the finite-degree boundary-pair embedding.

The kernel of the symbol space is ``(1 - conj(b(lam)) b(z)) / (1 - conj(lam) z)``.
Elements are probed through pairs ``(f, g)`` with ``f`` analytic (a disk
series) and ``g`` an L² function carried by the set where the boundary
weight ``Delta`` is positive.  A pair belongs to the embedded image exactly
when ``P_plus(conj(b) f) + P_plus(Delta g) = 0``, so the solver below finds
``g`` by least squares on that residual over trigonometric polynomials, and
the annihilator check pairs a given ``(f, g)`` against the orthogonal
complement ``{(b h, Delta h)}``.

The space itself is never represented globally; only elements with closed
forms travel through these functions, and every report carries its raw
residuals.  Non-extreme symbols are not refused — the extremality flag from
the symbol evaluation rides along in the solve report instead.

Grid conventions: ``P_plus`` keeps FFT bins ``0 .. M/2 - 1`` as Taylor
coefficients, ``P_minus`` keeps the rest (Nyquist included), so the two
projections reconstruct grid data exactly.  Singular inner factors are
never evaluated on their support: boundary diagnostics use the radial proxy
``1 - 10/M``, and nodes within arc-distance ``2 pi / M`` of the support are
excluded and reported, never silently zeroed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve, eigh

from .errors import DomainError, NumericalInconsistencyError, SingularityError
from .symbols import (
    DiskSeries,
    BoundaryGrid,
    ExtremalityReport,
    PROXY_FACTOR,
    SymbolSpec,
    _arc_distance_turns,
    _point_distance_turns,
    blaschke_eval,
    evaluate_symbol,
    singular_inner_eval,
    symbol_eval,
)

_TAU = 2.0 * math.pi

#: PSD tolerance for kernel Grams, relative to the trace
KERNEL_PSD_TOL = 1e-8
#: Tikhonov scale for the embedding normal equations
SOLVE_JITTER_SCALE = 1e-12


def hb_kernel(b_lam, b_z, lam, z):
    """Kernel value ``(1 - conj(b(lam)) b(z)) / (1 - conj(lam) z)``.

    Takes the symbol values at the two points as inputs so that callers
    control how ``b`` is evaluated.  Vectorizes over ``z`` / ``b_z``.
    """
    lam = complex(lam)
    z = np.asarray(z, dtype=complex)
    denom = 1.0 - np.conj(lam) * z
    if np.any(np.abs(denom) < 1e-14):
        raise SingularityError(
            "kernel pole: conj(lam) * z = 1; points must pair inside the disk"
        )
    return (1.0 - np.conj(complex(b_lam)) * np.asarray(b_z, dtype=complex)) / denom


@dataclass(frozen=True)
class KernelGram:
    points: np.ndarray
    b_values: np.ndarray
    matrix: np.ndarray

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def min_eigenvalue(self) -> float:
        return float(np.min(eigh(self.matrix, eigvals_only=True)))


def kernel_gram(spec: SymbolSpec, points, *, series_grid: int = 4096) -> KernelGram:
    """Hermitian kernel matrix at interior points, PSD-checked.

    The diagonal is ``(1 - |b|^2) / (1 - |lam|^2)``; positivity within
    ``-1e-8 * trace`` is the operational test that the evaluated symbol is
    consistent with an actual kernel.
    """
    pts = np.asarray(points, dtype=complex)
    if pts.ndim != 1 or pts.shape[0] == 0:
        raise DomainError("need a nonempty 1-D array of points")
    if np.any(np.abs(pts) >= 1.0):
        raise DomainError("kernel Gram points must lie strictly inside the disk")
    diffs = np.abs(pts[:, None] - pts[None, :]) + np.eye(pts.shape[0])
    if np.min(diffs) < 1e-12:
        raise DomainError("kernel Gram points must be pairwise distinct")
    bv = evaluate_symbol(spec, pts, series_grid=series_grid)
    denom = 1.0 - np.conj(pts)[:, None] * pts[None, :]
    mat = (1.0 - np.conj(bv)[:, None] * bv[None, :]) / denom
    mat = 0.5 * (mat + mat.conj().T)
    trace = float(np.real(np.trace(mat)))
    lo = float(np.min(eigh(mat, eigvals_only=True)))
    if lo < -KERNEL_PSD_TOL * max(trace, 1e-30):
        raise NumericalInconsistencyError(
            f"kernel Gram has min eigenvalue {lo:.3e} against trace {trace:.3e}; "
            "the symbol evaluation is inconsistent with positivity"
        )
    return KernelGram(points=pts, b_values=bv, matrix=mat)


# ---------------------------------------------------------------------------
# grid projections


def _grid_values(u) -> np.ndarray:
    if isinstance(u, BoundaryGrid):
        return np.asarray(u.values, dtype=complex)
    return np.asarray(u, dtype=complex)


def hardy_project(u) -> DiskSeries:
    """Keep nonnegative frequencies of grid data as Taylor coefficients."""
    v = _grid_values(u)
    m = v.shape[0]
    if m < 4 or m % 2:
        raise DomainError(f"grid size must be even and >= 4, got {m}")
    chat = np.fft.fft(v) / m
    return DiskSeries(chat[: m // 2])


def hardy_project_minus(u) -> np.ndarray:
    """Strictly negative frequencies: entry ``k`` is the lag ``-(k+1)`` bin.

    Together with :func:`hardy_project` this reconstructs the grid data
    exactly (the Nyquist bin rides with the negative part).
    """
    v = _grid_values(u)
    m = v.shape[0]
    if m < 4 or m % 2:
        raise DomainError(f"grid size must be even and >= 4, got {m}")
    chat = np.fft.fft(v) / m
    return chat[m // 2:][::-1].copy()  # lags -1, -2, ..., -m/2


# ---------------------------------------------------------------------------
# embedding pairs


@dataclass(frozen=True)
class JPair:
    """Analytic component plus boundary component carried by the weight."""

    f: DiskSeries
    g: np.ndarray  # grid samples, zero off the carrier
    grid_size: int

    def g_norm(self) -> float:
        g = np.asarray(self.g, dtype=complex)
        return float(np.sqrt(np.mean(np.abs(g) ** 2)))

    def f_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.f.coeffs) ** 2)))


@dataclass(frozen=True)
class JSolveReport:
    pair: JPair
    residual: float
    rhs_norm: float
    jitter: float
    n_g: int
    grid_size: int
    extremality: ExtremalityReport
    guarded: np.ndarray
    warning: Optional[str] = None
    isometry_defect: Optional[float] = None


def j_embedding_solve(
    spec: SymbolSpec,
    f: DiskSeries,
    n_g: Optional[int] = None,
    *,
    m: Optional[int] = None,
    target_hb_norm2: Optional[float] = None,
) -> JSolveReport:
    """Least-squares boundary component for a given analytic component.

    Minimizes ``|| P_plus(conj(b) f) + P_plus(Delta g) ||`` over
    trigonometric polynomials of degree up to ``n_g`` (default ``m // 4``,
    which keeps the discrete problem 4x oversampled), restricted to the
    carrier of the weight.  Tikhonov regularization picks the minimal-norm
    minimizer; since admissible boundary components are L²-orthogonal to
    the degeneracy directions, that is the right one.

    When the weight is identically zero the boundary component is exactly
    zero and the residual reports ``||P_plus(conj(b) f)||`` as-is.
    """
    if m is None:
        m = 4096 if n_g is None else 4 * n_g
    if n_g is None:
        n_g = m // 4
    if not (0 < n_g <= m // 2):
        raise DomainError(f"boundary truncation {n_g} incompatible with grid {m}")

    ev = symbol_eval(spec, m)
    delta = np.asarray(ev.delta.values, dtype=float)
    theta = ev.theta()
    fvals = f(np.exp(1j * theta))
    rho = (np.fft.fft(np.conj(ev.values) * fvals) / m)[: m // 2]
    rhs_norm = float(np.sqrt(np.sum(np.abs(rho) ** 2)))

    if float(np.max(delta)) < 1e-15:
        pair = JPair(f=f, g=np.zeros(m, dtype=complex), grid_size=m)
        defect = None
        if target_hb_norm2 is not None:
            defect = abs(pair.f_norm() ** 2 - target_hb_norm2)
        return JSolveReport(
            pair=pair,
            residual=rhs_norm,
            rhs_norm=rhs_norm,
            jitter=0.0,
            n_g=n_g,
            grid_size=m,
            extremality=ev.extremality,
            guarded=ev.guarded,
            warning=None,
            isometry_defect=defect,
        )

    dhat = np.fft.fft(delta) / m
    rows = np.arange(m // 2)
    karr = np.arange(-n_g, n_g + 1)
    a = dhat[np.mod(rows[:, None] - karr[None, :], m)]
    normal = a.conj().T @ a
    ncols = normal.shape[0]
    jitter = SOLVE_JITTER_SCALE * float(np.real(np.trace(normal))) / ncols
    normal[np.arange(ncols), np.arange(ncols)] += jitter
    rhs = -(a.conj().T @ rho)
    fac = cho_factor(normal, lower=True)
    coeffs = cho_solve(fac, rhs)
    diag = np.real(np.diag(fac[0]))
    warning = None
    if float(np.min(diag) ** 2) < 10.0 * jitter:
        warning = (
            "normal equations rank-deficient at the regularization scale; "
            "the boundary component is the minimal-norm representative"
        )

    spectrum = np.zeros(m, dtype=complex)
    spectrum[np.mod(karr, m)] = coeffs
    tvals = np.fft.ifft(spectrum * m)
    g = np.where(delta > 0, tvals, 0.0 + 0.0j)

    resid_vec = rho + a @ coeffs
    residual = float(np.sqrt(np.sum(np.abs(resid_vec) ** 2)))
    pair = JPair(f=f, g=g, grid_size=m)
    defect = None
    if target_hb_norm2 is not None:
        defect = abs(pair.f_norm() ** 2 + pair.g_norm() ** 2 - target_hb_norm2)
    return JSolveReport(
        pair=pair,
        residual=residual,
        rhs_norm=rhs_norm,
        jitter=jitter,
        n_g=n_g,
        grid_size=m,
        extremality=ev.extremality,
        guarded=ev.guarded,
        warning=warning,
        isometry_defect=defect,
    )


def kernel_embedding_pair(spec: SymbolSpec, lam: complex, m: int):
    """Closed-form pair for a kernel element, plus its squared norm.

    The boundary component of a kernel at ``lam`` is
    ``-Delta * conj(b(lam)) / (1 - conj(lam) e^{i theta})`` on the carrier;
    the analytic component's coefficients come from projecting the kernel's
    boundary values.  Returns ``(pair, hb_norm2, evaluation)``.
    """
    lam = complex(lam)
    if abs(lam) >= 1.0:
        raise DomainError("kernel point must lie strictly inside the disk")
    ev = symbol_eval(spec, m)
    b_lam = complex(evaluate_symbol(spec, np.array([lam]), series_grid=m)[0])
    theta = ev.theta()
    cayley = 1.0 - np.conj(lam) * np.exp(1j * theta)
    f_vals = (1.0 - np.conj(b_lam) * ev.values) / cayley
    f_series = hardy_project(f_vals)
    g = -np.asarray(ev.delta.values) * np.conj(b_lam) / cayley
    g = np.where(np.asarray(ev.delta.values) > 0, g, 0.0 + 0.0j)
    hb_norm2 = (1.0 - abs(b_lam) ** 2) / (1.0 - abs(lam) ** 2)
    return JPair(f=f_series, g=g, grid_size=m), float(hb_norm2), ev


def annihilator_check(spec: SymbolSpec, pair: JPair, h: DiskSeries) -> complex:
    """Pairing of ``(f, g)`` against the complement element ``(b h, Delta h)``.

    Grid quadrature of ``∫ f conj(b h) dm + ∫ g Delta conj(h) dm``; for
    pairs produced by the least-squares solve this is bounded by the solver
    residual times the norm of ``h``.
    """
    m = pair.grid_size
    ev = symbol_eval(spec, m)
    theta = ev.theta()
    ring = np.exp(1j * theta)
    fvals = pair.f(ring)
    hvals = h(ring)
    term_f = np.mean(fvals * np.conj(ev.values * hvals))
    term_g = np.mean(np.asarray(pair.g) * np.asarray(ev.delta.values) * np.conj(hvals))
    return complex(term_f + term_g)


# ---------------------------------------------------------------------------
# division diagnostic


@dataclass(frozen=True)
class DivisionReport:
    """Antianalytic energy of ``f * conj(theta)`` on the grid.

    ``value`` near zero certifies grid-resolution divisibility of ``f`` by
    the inner factor; ``excluded`` lists nodes too close to the singular
    support, whose contributions were dropped (and reported, never hidden).
    """

    value: float
    excluded: np.ndarray
    proxy_radius: float
    grid_size: int

    def __float__(self) -> float:
        return self.value


def division_diagnostic(theta_spec: SymbolSpec, f_values) -> DivisionReport:
    """Norm of the negative-frequency part of ``f * conj(theta)``.

    The Blaschke part of ``theta`` is evaluated by its analytic boundary
    formula; singular parts by the radial proxy at ``1 - 10/M``.  Nodes
    within arc-distance ``2 pi / M`` of the singular support are excluded
    from the projection and their indices reported.
    """
    if not theta_spec.is_inner():
        raise DomainError("division diagnostic expects an inner-part spec")
    fv = _grid_values(f_values)
    m = fv.shape[0]
    if m < 4 or m % 2:
        raise DomainError(f"grid size must be even and >= 4, got {m}")
    theta = _TAU * np.arange(m) / m
    ring = np.exp(1j * theta)

    tv = np.full(m, complex(theta_spec.scale))
    if theta_spec.zeros:
        tv = tv * blaschke_eval(theta_spec.zeros, ring)

    excluded = np.zeros(0, dtype=int)
    if not theta_spec.singular.is_empty:
        r_proxy = 1.0 - PROXY_FACTOR / m
        tv = tv * singular_inner_eval(theta_spec.singular, r_proxy * ring)
        x = theta / _TAU
        dist = np.full(m, np.inf)
        atoms_pos = [p for p, _mass in theta_spec.singular.atoms]
        if atoms_pos:
            dist = np.minimum(dist, _point_distance_turns(x, atoms_pos))
        for part in theta_spec.singular.cantor_parts:
            dist = np.minimum(dist, _arc_distance_turns(x, part.support.stage_arcs()))
        excluded = np.nonzero(dist < 1.0 / m)[0]

    prod = fv * np.conj(tv)
    if excluded.size:
        prod = prod.copy()
        prod[excluded] = 0.0
    neg = hardy_project_minus(prod)
    value = float(np.sqrt(np.sum(np.abs(neg) ** 2)))
    return DivisionReport(
        value=value,
        excluded=excluded,
        proxy_radius=1.0 - PROXY_FACTOR / m if not theta_spec.singular.is_empty else 1.0,
        grid_size=m,
    )
