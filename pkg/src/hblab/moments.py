"""Measures mixing a radial disk weight with a boundary defect weight.

The central object pairs ``(1-|z|^2)^(alpha-1) dA`` on the open disk (both
``dA`` and ``dm`` normalized to total mass 1) with ``Delta^2 dm`` on the
circle.  Monomials are orthogonal against the radial part, so the full
(N+1) x (N+1) Gram matrix of ``1, z, ..., z^N`` is a diagonal of disk
moments plus a Toeplitz matrix of Fourier coefficients of ``Delta^2``:

    G[n, m] = delta_{nm} * beta_n(alpha) + chat(m - n),
    chat(k) = integral of Delta^2(theta) e^{-ik theta} dm.

Everything downstream is quadratic algebra against ``G``: squared distances
from a target to nested polynomial spans are ``norm^2 - |c|^2`` partial sums
in the Cholesky frame, which makes the reported sequences nonincreasing by
construction rather than by luck.

Fourier data of ``Delta^2`` comes from the closed-form arc transform when
the weight declares piecewise-constant structure, otherwise from the FFT of
its grid samples; the oversampling rule ``M >= 4N + 4`` keeps lag ``2N``
below the grid Nyquist index either way.

Distance sequences are finite-degree evidence, never decisions: the
quantities they approximate are defined by infinite-dimensional closures,
and every report carries its raw sequence alongside the fitted decay rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import cholesky, eigh, solve_triangular
from scipy.special import roots_jacobi

from .errors import (
    DegenerateTargetError,
    DomainError,
    NumericalInconsistencyError,
    RefusalError,
    UndersampledGridError,
)
from .symbols import DeltaWeight, SymbolSpec, SymbolEvaluation, symbol_eval, \
    evaluate_symbol, _arc_log_fourier
from .xalpha import disk_moment

#: diagonal regularization scale for Cholesky solves
JITTER_SCALE = 1e-12
#: PSD tolerance relative to the trace
PSD_TOL = 1e-8
#: relative tolerance before a negative squared distance is an error
NEGATIVE_DSQ_TOL = 1e-6


@dataclass(frozen=True)
class MuMeasure:
    """Mixed measure: radial disk part at exponent ``alpha``, boundary weight.

    ``fourier_delta2[k]`` holds ``chat(k)`` for ``k = 0..max_lag``; negative
    lags follow from Hermitian symmetry because ``Delta^2`` is real.
    """

    alpha: float
    delta: DeltaWeight
    fourier_delta2: np.ndarray
    exact_fourier: bool

    @property
    def max_lag(self) -> int:
        return int(np.asarray(self.fourier_delta2).shape[0]) - 1

    def chat(self, k: int) -> complex:
        if abs(k) > self.max_lag:
            raise DomainError(f"lag {k} beyond computed range {self.max_lag}")
        c = self.fourier_delta2[abs(k)]
        return complex(c) if k >= 0 else complex(np.conj(c))

    def boundary_mass(self) -> float:
        """``chat(0)``, the mean of ``Delta^2`` over the circle."""
        return float(np.real(self.fourier_delta2[0]))


def build_mu(delta: DeltaWeight, alpha: float, degree: int) -> MuMeasure:
    """Assemble the measure with Fourier data of ``Delta^2`` up to lag 2N.

    Requires the grid to oversample the highest lag: ``M >= 4N + 4``.
    Weights that declare piecewise-constant structure get their transform in
    closed form (so moment matrices can be checked against quadrature at
    tight tolerance); sampled weights go through the FFT.
    """
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if degree < 0:
        raise DomainError("degree must be nonnegative")
    m = delta.grid_size
    required = 4 * degree + 4
    if m < required:
        raise UndersampledGridError(m_given=m, m_required=required)
    lags = 2 * degree

    if delta.delta_sq_pieces is not None:
        entries = [(s, l, v) for s, l, v in delta.delta_sq_pieces]
        fourier = _arc_log_fourier(entries, lags)
        exact = True
    else:
        v = np.asarray(delta.values, dtype=float) ** 2
        fourier = (np.fft.fft(v) / m)[: lags + 1].astype(complex)
        exact = False

    c0 = float(np.real(fourier[0]))
    if not (-1e-9 <= c0 <= 1.0 + 1e-9):
        raise NumericalInconsistencyError(
            f"mean of Delta^2 is {c0:.6g}, outside [0, 1]"
        )
    return MuMeasure(
        alpha=float(alpha), delta=delta, fourier_delta2=fourier, exact_fourier=exact
    )


def grid_fourier(mu: MuMeasure) -> MuMeasure:
    """The same measure with boundary lags recomputed from the grid samples.

    Distance solves pair the Gram against grid-sum moments of a target; if
    the Gram used closed-form lags while the moments are grid sums, the two
    sides describe slightly different measures and the mismatch — amplified
    through the inverse Gram — can push projection energies past the target
    norm.  Re-deriving the lags from the same samples restores the exact
    domination ``c* G^{-1} c <= norm^2`` at the discrete level, so distance
    sequences computed from the result are nonnegative by structure.
    """
    if not mu.exact_fourier:
        return mu
    v = np.asarray(mu.delta.values, dtype=float) ** 2
    m = v.shape[0]
    fourier = (np.fft.fft(v) / m)[: mu.max_lag + 1].astype(complex)
    return MuMeasure(
        alpha=mu.alpha, delta=mu.delta, fourier_delta2=fourier, exact_fourier=False
    )


@dataclass(frozen=True)
class MomentMatrix:
    """Gram matrix of the monomials ``1, z, ..., z^N`` in the mixed measure."""

    degree: int
    alpha: float
    entries: np.ndarray

    def leading(self, n: int) -> np.ndarray:
        return self.entries[: n + 1, : n + 1]

    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)))


def gram_matrix(mu: MuMeasure, degree: int) -> MomentMatrix:
    """Diagonal of disk moments plus the Toeplitz boundary block.

    The entry at row ``n``, column ``m`` is the inner product of ``z^n``
    against ``z^m``, whose boundary term is ``chat(m - n)``.  Positive
    semidefiniteness is verified within ``-1e-8 * trace``.
    """
    if degree < 0:
        raise DomainError("degree must be nonnegative")
    if 2 * degree > mu.max_lag:
        raise DomainError(
            f"measure carries Fourier lags to {mu.max_lag}; degree {degree} "
            f"needs {2 * degree} — rebuild with a larger degree"
        )
    n = np.arange(degree + 1)
    beta = disk_moment(n, mu.alpha)
    diff = n[None, :] - n[:, None]  # m - n
    pos = np.abs(diff)
    row = np.asarray(mu.fourier_delta2[: 2 * degree + 1], dtype=complex)
    toep = row[pos]
    toep = np.where(diff >= 0, toep, np.conj(toep))
    entries = np.diag(beta.astype(complex)) + toep
    entries = 0.5 * (entries + entries.conj().T)
    trace = float(np.real(np.trace(entries)))
    lo = float(np.min(eigh(entries, eigvals_only=True)))
    if lo < -PSD_TOL * trace:
        raise NumericalInconsistencyError(
            f"moment matrix not positive semidefinite: min eigenvalue {lo:.3e} "
            f"against trace {trace:.3e}; the boundary weight samples are bad"
        )
    return MomentMatrix(degree=degree, alpha=mu.alpha, entries=entries)


# ---------------------------------------------------------------------------
# distance sequences


@dataclass(frozen=True)
class DistanceSequence:
    """Distances from a fixed target to nested polynomial spans.

    ``values[n]`` is the distance to the span of ``1..z^n``; the sequence is
    nonincreasing and starts at the target norm.  ``fit_rate`` is the slope
    of ``log d`` against ``log n`` over the top half of the degrees (power
    law surrogate for the asymptotic behavior), with its RMS residual.
    """

    values: np.ndarray
    target: str
    alpha: float
    jitter: float
    fit_rate: float
    fit_residual: float
    note: str = ""

    @property
    def degree(self) -> int:
        return int(np.asarray(self.values).shape[0]) - 1

    def terminal(self) -> float:
        return float(self.values[-1])


def _fit_decay_rate(values: np.ndarray):
    d = np.asarray(values, dtype=float)
    n = np.arange(d.shape[0])
    lo = max(1, d.shape[0] // 2)
    sel = (n >= lo) & (d > 1e-200)
    if int(np.sum(sel)) < 2:
        return float("nan"), float("nan")
    x = np.log(n[sel].astype(float))
    y = np.log(d[sel])
    coef = np.polyfit(x, y, 1)
    fit = np.polyval(coef, x)
    resid = float(np.sqrt(np.mean((y - fit) ** 2)))
    return float(coef[0]), resid


def distance_to_poly_span(
    gram: MomentMatrix,
    target_inner_products: Sequence[complex],
    target_norm2: float,
    *,
    target: str = "target",
    note: str = "",
) -> DistanceSequence:
    """Squared distances ``norm^2 - |projection|^2`` over leading blocks.

    ``target_inner_products[n]`` is ``<t, z^n>``.  Writing the normal
    equations for the projection in this convention puts the conjugated
    moment vector against the Gram: the projected energy is
    ``conj(c)* G^{-1} conj(c)`` (for real data the conjugation is
    invisible, which is exactly the case that hides an orientation slip).
    One Cholesky factorization of the jittered Gram gives every nested
    distance at once: with ``L y = conj(c)`` the distance to the
    degree-``n`` span is ``norm^2`` minus the first ``n+1`` terms of
    ``|y|^2``, so the output is nonincreasing by construction.
    """
    c = np.asarray(target_inner_products, dtype=complex)
    if c.ndim != 1 or c.shape[0] != gram.degree + 1:
        raise DomainError(
            f"need {gram.degree + 1} target inner products, got {c.shape}"
        )
    if target_norm2 < 0:
        raise DomainError("target norm squared must be nonnegative")
    n1 = gram.degree + 1
    jitter = JITTER_SCALE * gram.trace() / n1
    g = gram.entries + jitter * np.eye(n1)
    low = cholesky(g, lower=True)
    y = solve_triangular(low, np.conj(c), lower=True)
    reduction = np.cumsum(np.abs(y) ** 2)
    dsq = target_norm2 - reduction
    worst = float(np.min(dsq))
    if worst < -NEGATIVE_DSQ_TOL * max(target_norm2, 1e-30):
        raise NumericalInconsistencyError(
            f"squared distance dipped to {worst:.3e} for target norm^2 "
            f"{target_norm2:.3e}; Gram and moments are inconsistent"
        )
    d = np.sqrt(np.clip(dsq, 0.0, None))
    rate, resid = _fit_decay_rate(d)
    return DistanceSequence(
        values=d,
        target=target,
        alpha=gram.alpha,
        jitter=jitter,
        fit_rate=rate,
        fit_residual=resid,
        note=note,
    )


def splitting_indicator(
    mu: MuMeasure, boundary_target: Sequence[float], degree: int
) -> DistanceSequence:
    """Distance from the boundary-only pair ``(0, t)`` to polynomial spans.

    ``boundary_target`` is sampled on the weight's grid; its pairings with
    monomials see only the boundary part of the measure.  A terminal value
    near zero is finite-degree evidence for an isometric summand carried by
    the weight, a positive stabilizing floor is evidence against — the
    sequence and fitted rate are reported, nothing is decided.
    """
    t = np.asarray(boundary_target, dtype=complex)
    mu = grid_fourier(mu)  # target moments below are grid sums
    m = mu.delta.grid_size
    if t.shape != (m,):
        raise DomainError(f"boundary target must have {m} samples, got {t.shape}")
    w = np.asarray(mu.delta.values, dtype=float) ** 2
    norm2 = float(np.mean(np.abs(t) ** 2 * w))
    if norm2 <= 1e-28:
        raise DegenerateTargetError(
            "boundary target has essentially zero norm against Delta^2"
        )
    v = t * w
    coeffs = np.fft.fft(v) / m  # lag k: mean of v * e^{-ik theta}
    c = coeffs[: degree + 1]
    gram = gram_matrix(mu, degree)
    return distance_to_poly_span(
        gram,
        c,
        norm2,
        target="boundary-splitting",
        note="pair (0, t): disk component zero, boundary component t",
    )


# ---------------------------------------------------------------------------
# cyclicity of inner factors


def _theta_disk_transform(theta_spec: SymbolSpec, alpha: float, degree: int,
                          nr: int, na: int):
    """Disk-part Gram and cross moments of ``theta * z^k`` by quadrature.

    Tensor rule: Gauss-Jacobi in ``s = r^2`` against ``(1-s)^(alpha-1)``,
    uniform trapezoid in angle.  Returns (H_disk, c_disk).
    """
    x, w = roots_jacobi(nr, alpha - 1.0, 0.0)
    s = (x + 1.0) / 2.0
    wq = w * (2.0 ** (-alpha))
    r = np.sqrt(s)
    ang = 2.0 * math.pi * np.arange(na) / na
    ring = np.exp(1j * ang)

    n1 = degree + 1
    h = np.zeros((n1, n1), dtype=complex)
    c = np.zeros(n1, dtype=complex)
    powers = np.arange(n1)
    diff = powers[None, :] - powers[:, None]  # m - k
    for i in range(nr):
        z = r[i] * ring
        tv = evaluate_symbol(theta_spec, z)
        f = np.abs(tv) ** 2
        fc = np.fft.fft(f) / na  # lag d: mean f e^{-id theta}
        # mean over angle of |theta|^2 e^{i(k-m) theta} = fc[(m-k) mod na]
        lagmat = fc[np.mod(diff, na)]
        rad = r[i] ** (powers[:, None] + powers[None, :])
        h += wq[i] * rad * lagmat
        gc = np.fft.fft(np.conj(tv)) / na  # mean conj(theta) e^{-im theta}
        c += wq[i] * (r[i] ** powers) * gc[:n1]
    return h, c


def cyclicity_indicator(
    mu: MuMeasure, theta_spec: SymbolSpec, degree: int,
    *, quad_tol: float = 1e-9
) -> DistanceSequence:
    """Distance from the constant 1 to ``theta * Poly_n`` in the measure.

    The Gram of ``{theta z^k}`` has the same Toeplitz boundary block as the
    monomial Gram (``|theta| = 1`` a.e. on the circle) but its disk block
    needs 2-D quadrature; node counts are doubled until entries move less
    than ``quad_tol``.  Decay of the sequence toward zero is finite-degree
    evidence that the inner factor is cyclic.
    """
    if not theta_spec.is_inner():
        raise DomainError("cyclicity indicator expects an inner-part spec")
    mu = grid_fourier(mu)  # boundary cross moments below are grid sums
    m = mu.delta.grid_size
    # boundary Toeplitz block, shared with the monomial Gram
    gram = gram_matrix(mu, degree)
    beta = disk_moment(np.arange(degree + 1), mu.alpha)
    toep = gram.entries - np.diag(beta.astype(complex))

    nr, na = 32, max(128, 4 * degree + 4)
    h_prev = c_prev = None
    for _ in range(5):
        h_disk, c_disk = _theta_disk_transform(theta_spec, mu.alpha, degree, nr, na)
        if h_prev is not None:
            drift = max(
                float(np.max(np.abs(h_disk - h_prev))),
                float(np.max(np.abs(c_disk - c_prev))),
            )
            if drift < quad_tol:
                break
        h_prev, c_prev = h_disk, c_disk
        nr *= 2
        na *= 2
    else:
        raise RefusalError(
            f"disk quadrature for the inner-factor Gram did not settle below "
            f"{quad_tol:.1e} by {nr} radial x {na} angular nodes"
        )

    h = h_disk + toep
    h = 0.5 * (h + h.conj().T)
    trace = float(np.real(np.trace(h)))
    lo = float(np.min(eigh(h, eigvals_only=True)))
    if lo < -PSD_TOL * max(trace, 1e-30):
        raise RefusalError(
            f"inner-factor Gram not positive semidefinite within tolerance "
            f"(min eigenvalue {lo:.3e}, trace {trace:.3e}) at {nr} x {na} "
            "quadrature nodes; increase the node budget"
        )

    # cross moments <1, theta z^m>: disk part from quadrature, boundary from
    # the sampled unimodular values of theta
    ev = symbol_eval(theta_spec, m)
    w = np.asarray(mu.delta.values, dtype=float) ** 2
    vb = np.conj(ev.values) * w
    cb = (np.fft.fft(vb) / m)[: degree + 1]
    c = c_disk + cb

    norm2 = float(disk_moment(0, mu.alpha)) + mu.boundary_mass()
    hm = MomentMatrix(degree=degree, alpha=mu.alpha, entries=h)
    return distance_to_poly_span(
        hm,
        c,
        norm2,
        target="cyclicity-of-inner-factor",
        note=f"quadrature {nr} radial x {na} angular nodes; "
        f"{len(ev.guarded)} guarded boundary nodes",
    )


def shift_contraction_bound(mu: MuMeasure, degree: int) -> float:
    """Norm of multiplication by ``z`` from degree-N polys into degree-N+1.

    Generalized eigenvalue problem between the shifted Gram and the Gram;
    the measure lives on the closed disk, so the result must not exceed 1
    beyond roundoff.
    """
    if 2 * (degree + 1) > mu.max_lag:
        raise DomainError(
            f"need Fourier lags to {2 * (degree + 1)}; rebuild the measure "
            f"with degree at least {degree + 1}"
        )
    big = gram_matrix(mu, degree + 1).entries
    n1 = degree + 1
    shifted = big[1:, 1:][:n1, :n1]  # <z^{k+1}, z^{m+1}>
    base = big[:n1, :n1]
    jitter = JITTER_SCALE * float(np.real(np.trace(base))) / n1
    vals = eigh(shifted, base + jitter * np.eye(n1), eigvals_only=True)
    return float(np.sqrt(np.max(np.real(vals))))
