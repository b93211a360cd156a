"""Moment matrices and distance sequences for the mixed disk/boundary measure.

The headline check here is an independent dense least-squares model of the
splitting distance: build the rectangular design whose rows are weighted
boundary samples of the monomials stacked on the diagonal disk block, and
compare its residual norms with the Cholesky-based sequence entry by entry.
"""

from __future__ import annotations

import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from hblab import disk_moment
from hblab.errors import (
    DegenerateTargetError,
    DomainError,
    UndersampledGridError,
)
from hblab.moments import (
    build_mu,
    cyclicity_indicator,
    distance_to_poly_span,
    gram_matrix,
    grid_fourier,
    shift_contraction_bound,
    splitting_indicator,
)
from hblab.symbols import OuterProfile, SymbolSpec, delta_weight

ARC_SPEC = SymbolSpec(outer=OuterProfile.arc_step(((F(1, 10), F(1, 4), 0.5),)))
HALF_SPEC = SymbolSpec(outer=OuterProfile.constant(0.5))


def arc_mu(alpha: float, degree: int, m: int):
    return build_mu(delta_weight(ARC_SPEC, m), alpha, degree)


def dense_distance_model(mu, target, degree):
    """Residual norms of the stacked boundary/disk least-squares problems."""
    mu = grid_fourier(mu)
    m = mu.delta.grid_size
    w = np.asarray(mu.delta.values, dtype=float) ** 2
    theta = 2 * np.pi * np.arange(m) / m
    scale = np.sqrt(w / m)
    cols = np.exp(1j * np.outer(theta, np.arange(degree + 1)))
    a_boundary = cols * scale[:, None]
    rhs = np.concatenate([target * scale, np.zeros(degree + 1)])
    beta = disk_moment(np.arange(degree + 1), mu.alpha)
    out = []
    for n in range(degree + 1):
        a = np.vstack([a_boundary[:, : n + 1], np.diag(np.sqrt(beta[: n + 1]))])
        b = rhs[: m + n + 1]
        x, *_ = np.linalg.lstsq(a, b, rcond=None)
        out.append(float(np.linalg.norm(b - a @ x)))
    return np.array(out)


# ---------------------------------------------------------------------------
# measure assembly


def test_build_mu_exact_lags_for_piecewise_weight():
    mu = arc_mu(1.0, 8, 512)
    assert mu.exact_fourier
    assert mu.max_lag == 16
    # mean of Delta^2: value 3/4 on a quarter arc
    assert mu.boundary_mass() == pytest.approx(3 / 16, rel=1e-14)
    assert mu.chat(-3) == pytest.approx(np.conj(mu.chat(3)), rel=1e-14)
    with pytest.raises(DomainError):
        mu.chat(17)


def test_build_mu_rejects_bad_parameters():
    dw = delta_weight(ARC_SPEC, 64)
    with pytest.raises(UndersampledGridError, match="4N \\+ 4"):
        build_mu(dw, 1.0, 60)
    with pytest.raises(DomainError):
        build_mu(dw, 0.0, 4)
    with pytest.raises(DomainError):
        build_mu(dw, 1.0, -1)


def test_grid_fourier_close_to_exact_lags_and_idempotent():
    mu = arc_mu(1.0, 10, 2048)
    gmu = grid_fourier(mu)
    assert not gmu.exact_fourier
    # rectangle-rule error on a jump weight is O(1/M)
    np.testing.assert_allclose(
        gmu.fourier_delta2, mu.fourier_delta2, atol=2e-3
    )
    assert grid_fourier(gmu) is gmu


def test_gram_entries_match_direct_quadrature():
    alpha = 1.3
    mu = arc_mu(alpha, 6, 512)
    g = gram_matrix(mu, 6).entries

    def lag(k):
        re, _ = quad(lambda t: 0.75 * math.cos(k * t), 0.2 * np.pi, 0.7 * np.pi)
        im, _ = quad(lambda t: -0.75 * math.sin(k * t), 0.2 * np.pi, 0.7 * np.pi)
        return (re + 1j * im) / (2 * np.pi)

    # off-diagonal entry is the pure boundary lag, diagonal adds disk moment
    assert g[2, 5] == pytest.approx(lag(3), rel=1e-10)
    assert g[4, 4] == pytest.approx(disk_moment(4, alpha) + lag(0), rel=1e-10)


def test_gram_needs_enough_lags():
    mu = arc_mu(1.0, 4, 512)
    with pytest.raises(DomainError):
        gram_matrix(mu, 5)


# ---------------------------------------------------------------------------
# distance sequences


def test_constant_weight_splitting_distance_closed_form():
    # Delta^2 = 3/4 everywhere and target 1: the Gram is diagonal, every
    # degree gives the same distance, and the projection removes exactly
    # (9/16)/(beta_0 + 3/4)
    for alpha, expect in ((1.0, 3 / 7), (2.0, 3 / 10)):
        mu = build_mu(delta_weight(HALF_SPEC, 256), alpha, 12)
        seq = splitting_indicator(mu, np.ones(256), 12)
        np.testing.assert_allclose(
            seq.values, math.sqrt(expect), rtol=1e-6
        )
        assert seq.degree == 12
        assert seq.terminal() == pytest.approx(math.sqrt(expect), rel=1e-6)


def test_splitting_matches_dense_least_squares_model():
    degree, m = 24, 512
    mu = arc_mu(1.0, degree, m)
    theta = 2 * np.pi * np.arange(m) / m
    target = np.exp(1j * theta) + 0.3 * np.exp(-2j * theta) + 0.1j
    seq = splitting_indicator(mu, target, degree)
    ref = dense_distance_model(mu, target, degree)
    np.testing.assert_allclose(seq.values, ref, atol=1e-10)
    assert np.all(np.diff(seq.values) <= 1e-12)


def test_splitting_input_validation():
    mu = arc_mu(1.0, 8, 512)
    with pytest.raises(DomainError):
        splitting_indicator(mu, np.ones(100), 8)
    with pytest.raises(DegenerateTargetError):
        splitting_indicator(mu, np.zeros(512), 8)


def test_distance_to_poly_span_validates_shapes():
    mu = arc_mu(1.0, 4, 512)
    g = gram_matrix(mu, 4)
    with pytest.raises(DomainError):
        distance_to_poly_span(g, np.ones(3), 1.0)
    with pytest.raises(DomainError):
        distance_to_poly_span(g, np.ones(5), -0.5)


def test_cyclicity_of_shift_is_flat_at_disk_norm():
    # theta(z) = z against the pure-disk measure at alpha = 2: the constant
    # is orthogonal to every shifted monomial, so nothing is ever removed
    # and d_n^2 stays at beta_0(2) = 1/2
    shift = SymbolSpec(zeros=((0.0, 1),))
    mu = build_mu(delta_weight(shift, 256), 2.0, 10)
    seq = cyclicity_indicator(mu, shift, 10)
    np.testing.assert_allclose(seq.values, math.sqrt(0.5), rtol=1e-6)


def test_cyclicity_of_unit_symbol_collapses():
    one = SymbolSpec()
    mu = build_mu(delta_weight(one, 256), 1.0, 6)
    seq = cyclicity_indicator(mu, one, 6)
    assert np.all(seq.values <= 1e-5)


def test_cyclicity_rejects_non_inner_spec():
    mu = arc_mu(1.0, 6, 512)
    with pytest.raises(DomainError):
        cyclicity_indicator(mu, ARC_SPEC, 6)


def test_shift_contraction_bound_is_contractive():
    mu = arc_mu(1.5, 12, 512)
    bound = shift_contraction_bound(mu, 10)
    assert bound <= 1.0 + 1e-8
    assert bound > 0.5
    with pytest.raises(DomainError):
        shift_contraction_bound(mu, 12)


@settings(max_examples=25, deadline=None)
@given(
    value=st.floats(min_value=0.1, max_value=0.9),
    start=st.fractions(min_value=0, max_value=F(3, 4)),
    length=st.fractions(min_value=F(1, 16), max_value=F(1, 4)),
    alpha=st.floats(min_value=0.5, max_value=3.0),
)
def test_splitting_sequence_structure(value, start, length, alpha):
    spec = SymbolSpec(outer=OuterProfile.arc_step(((start, length, value),)))
    mu = build_mu(delta_weight(spec, 256), alpha, 10)
    target = np.ones(256)
    seq = splitting_indicator(mu, target, 10)
    d = seq.values
    assert np.all(d >= 0)
    assert np.all(np.diff(d) <= 1e-12)
    # first entry never exceeds the target norm in the boundary measure
    norm = math.sqrt(float(np.mean(np.asarray(mu.delta.values) ** 2)))
    assert d[0] <= norm + 1e-9
