"""Weighted coefficient norms and radial disk moments.

The scale of spaces is indexed by a real parameter ``alpha``: a Taylor
series ``f = sum f_n z^n`` has squared norm ``sum (n+1)**alpha |f_n|**2``.
``alpha = 0`` is the unweighted Hardy norm, positive ``alpha`` demands
coefficient decay, negative ``alpha`` is the dual growth scale.

The dual scale is equivalent, coefficient by coefficient, to the moments

    beta_n(alpha) = integral over the unit disk of |z|**(2n) (1-|z|**2)**(alpha-1)

against normalized area measure (total mass 1), which reduce to the Beta
function ``B(n+1, alpha)``.  Everything here is evaluated through log-Gamma
so that degrees in the thousands stay at full relative precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betaln

from .errors import DomainError


def xalpha_norm(coeffs, alpha: float) -> float:
    """Norm ``sqrt(sum (n+1)**alpha |f_n|**2)`` of a coefficient sequence."""
    c = np.asarray(coeffs, dtype=complex)
    if c.ndim != 1:
        raise DomainError("coefficients must form a one-dimensional sequence")
    n = np.arange(c.size, dtype=float)
    return float(np.sqrt(np.sum((n + 1.0) ** float(alpha) * np.abs(c) ** 2)))


def cauchy_pairing(f, g) -> complex:
    """Coefficient pairing ``sum f_n * conj(g_n)`` (shorter sequence pads)."""
    a = np.asarray(f, dtype=complex)
    b = np.asarray(g, dtype=complex)
    m = min(a.size, b.size)
    return complex(np.sum(a[:m] * np.conj(b[:m])))


def disk_moment(n, alpha: float):
    """Radial moment ``beta_n(alpha) = B(n+1, alpha)`` of the weighted disk.

    Parameters
    ----------
    n : int or array of ints
        Moment index, ``n >= 0``.
    alpha : float
        Weight parameter, must be positive (the weight ``(1-|z|^2)**(alpha-1)``
        stops being integrable at ``alpha <= 0``).

    Returns
    -------
    float or ndarray
        ``n! Gamma(alpha) / Gamma(n + 1 + alpha)``, computed via log-Gamma.
        ``beta_0(alpha) = 1/alpha`` and ``beta_n(1) = 1/(n+1)``.
    """
    if alpha <= 0:
        raise DomainError(f"disk moment requires alpha > 0, got {alpha}")
    narr = np.asarray(n)
    if np.any(narr < 0):
        raise DomainError("moment index must be nonnegative")
    a = float(alpha)
    if a == round(a) and a <= 32:
        # small integer alpha: (a-1)! / ((n+1)...(n+a)) as an exact product,
        # which skips the last-ulp noise of the exp(log-gamma) round trip
        out = np.full(narr.shape, float(math.factorial(int(a) - 1)))
        for j in range(1, int(a) + 1):
            out = out / (narr + float(j))
    else:
        out = np.exp(betaln(narr + 1.0, a))
    if np.isscalar(n) or narr.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class NormEquivalenceReport:
    """Comparison of the dual coefficient norm with the disk-moment norm.

    ``ratio`` is (dual norm)^2 / (moment norm)^2 for the given sequence, and
    ``lower``/``upper`` are the sharp coefficientwise bounds
    ``min_n / max_n of (n+1)**-alpha / beta_n(alpha)`` over the degrees
    present, so ``lower <= ratio <= upper`` always holds.
    """

    alpha: float
    dual_sq: float
    moment_sq: float
    ratio: float
    lower: float
    upper: float


def xminus_norm_equiv_check(coeffs, alpha: float) -> NormEquivalenceReport:
    """Evaluate both sides of the dual-norm/moment-norm equivalence.

    Requires ``alpha > 0`` (the comparison is between the ``-alpha``
    coefficient norm and the ``beta_n(alpha)`` moment norm).
    """
    if alpha <= 0:
        raise DomainError(f"equivalence check requires alpha > 0, got {alpha}")
    c = np.asarray(coeffs, dtype=complex)
    if c.size == 0 or not np.any(np.abs(c) > 0):
        raise DomainError("coefficient sequence is identically zero")
    n = np.arange(c.size, dtype=float)
    w_dual = (n + 1.0) ** (-float(alpha))
    w_beta = disk_moment(np.arange(c.size), alpha)
    dual_sq = float(np.sum(w_dual * np.abs(c) ** 2))
    moment_sq = float(np.sum(w_beta * np.abs(c) ** 2))
    factors = w_dual / w_beta
    return NormEquivalenceReport(
        alpha=float(alpha),
        dual_sq=dual_sq,
        moment_sq=moment_sq,
        ratio=dual_sq / moment_sq,
        lower=float(np.min(factors)),
        upper=float(np.max(factors)),
    )
