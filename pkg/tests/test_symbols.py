"""Symbol factorizations: outer profiles, inner factors, boundary weights."""

from __future__ import annotations

import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hblab import CircleSet, SingularMeasureSpec
from hblab.errors import DegenerateSymbolError, DomainError, SingularityError
from hblab.symbols import (
    OuterProfile,
    SymbolSpec,
    blaschke_eval,
    delta_weight,
    evaluate_symbol,
    extremality_report,
    outer_from_modulus,
    outer_on_grid,
    singular_inner_eval,
    symbol_eval,
)

ARC_HALF_WEIGHT = SymbolSpec(outer=OuterProfile.arc_step(((F(1, 10), F(1, 4), 0.5),)))


def unit_points(m: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(m) / m)


# ---------------------------------------------------------------------------
# Blaschke products


def test_blaschke_vanishes_at_zero_set_and_is_unimodular():
    zeros = [(0.5, 1), (-0.3 + 0.4j, 2)]
    at_zeros = blaschke_eval(zeros, [0.5, -0.3 + 0.4j])
    np.testing.assert_allclose(np.abs(at_zeros), 0.0, atol=1e-15)
    ring = blaschke_eval(zeros, unit_points(64))
    np.testing.assert_allclose(np.abs(ring), 1.0, rtol=1e-12)


def test_blaschke_positive_normalization_at_origin():
    assert blaschke_eval([(0.5, 1)], [0.0])[0] == pytest.approx(0.5)
    # zero at the origin contributes the plain factor z
    np.testing.assert_allclose(
        blaschke_eval([(0.0, 3)], [0.2j]), [(0.2j) ** 3], rtol=1e-14
    )


def test_blaschke_rejects_bad_zero_data():
    with pytest.raises(DomainError):
        blaschke_eval([(1.0, 1)], [0.0])
    with pytest.raises(DomainError):
        blaschke_eval([(0.5, 0)], [0.0])


# ---------------------------------------------------------------------------
# singular inner factors


def test_atom_inner_closed_form_on_radius():
    # a point mass at angle 0 gives |S(r)| = exp(-mass (1+r)/(1-r)) on (0,1)
    nu = SingularMeasureSpec(atoms=((F(0), 0.3),))
    r = np.array([0.0, 0.25, 0.7])
    vals = singular_inner_eval(nu, r)
    np.testing.assert_allclose(vals, np.exp(-0.3 * (1 + r) / (1 - r)), rtol=1e-13)


def test_atom_inner_unimodular_away_from_support():
    nu = SingularMeasureSpec(atoms=((F(1, 2), 1.0),))
    z = np.exp(2j * np.pi * np.array([0.1, 0.2, 0.9]))
    np.testing.assert_allclose(np.abs(singular_inner_eval(nu, z)), 1.0, rtol=1e-12)


def test_singular_inner_refuses_points_near_support():
    nu = SingularMeasureSpec(atoms=((F(0), 1.0),))
    with pytest.raises(SingularityError):
        singular_inner_eval(nu, [np.exp(2j * np.pi * 1e-12)])
    with pytest.raises(DomainError):
        singular_inner_eval(nu, [1.5])


def test_cantor_inner_stable_under_node_refinement():
    support = CircleSet.cantor((0, F(1, 3)), ratio=F(1, 3), depth=3)
    from hblab import CantorMeasurePart

    nu = SingularMeasureSpec(
        cantor_parts=(CantorMeasurePart(support=support, mass=0.4),)
    )
    z = np.array([0.0, 0.3 - 0.2j, -0.5j, 0.8 * np.exp(2.2j)])
    coarse = singular_inner_eval(nu, z, nodes_per_arc=12)
    fine = singular_inner_eval(nu, z, nodes_per_arc=48)
    np.testing.assert_allclose(coarse, fine, rtol=1e-10)
    assert np.all(np.abs(fine) <= 1.0 + 1e-12)


# ---------------------------------------------------------------------------
# outer factors


def test_cos_half_outer_is_one_plus_z_over_two():
    spec = SymbolSpec(outer=OuterProfile.cos_half())
    z = np.array([0.0, 0.3, -0.4 + 0.2j, 0.6j])
    np.testing.assert_allclose(evaluate_symbol(spec, z), (1 + z) / 2, rtol=1e-10)


def test_arc_outer_value_at_origin_is_geometric_mean():
    # |O(0)| = exp(mean log w) = 0.5^(1/4) for weight 1/2 on a quarter arc
    val = evaluate_symbol(ARC_HALF_WEIGHT, np.array([0.0]))[0]
    assert abs(val) == pytest.approx(0.5 ** 0.25, rel=1e-12)


def test_outer_from_modulus_reproduces_samples():
    m = 256
    theta = 2 * np.pi * np.arange(m) / m
    w = 0.55 + 0.4 * np.cos(theta) ** 2
    fac = outer_from_modulus(w)
    np.testing.assert_allclose(np.abs(fac.boundary.values), w, rtol=1e-10)
    # series evaluation agrees with the boundary values as r -> 1
    inside = fac(0.999 * np.exp(1j * theta[::16]))
    np.testing.assert_allclose(np.abs(inside), w[::16], rtol=2e-3)


def test_outer_from_modulus_refusals():
    with pytest.raises(DegenerateSymbolError):
        outer_from_modulus(np.zeros(16))
    with pytest.raises(DomainError):
        outer_from_modulus(np.full(16, 1.2))
    with pytest.raises(DomainError):
        outer_from_modulus(np.full(15, 0.5))


def test_outer_on_grid_exact_route_matches_fft_route():
    profile = OuterProfile.smooth_dip(0.5, 0.2, 0.75)
    m = 512
    fac = outer_on_grid(profile, m)
    ref = outer_from_modulus(profile.modulus(2 * np.pi * np.arange(m) / m))
    assert fac.method in ("exact", "fft")
    np.testing.assert_allclose(
        np.abs(fac.boundary.values), np.abs(ref.boundary.values), rtol=1e-9
    )


def test_symbol_factors_multiply():
    combined = SymbolSpec(
        zeros=((0.4, 1),),
        outer=OuterProfile.constant(0.8),
        scale=0.9j,
    )
    z = np.array([0.1, -0.2 + 0.3j, 0.5j])
    expect = (
        0.9j
        * blaschke_eval([(0.4, 1)], z)
        * evaluate_symbol(SymbolSpec(outer=OuterProfile.constant(0.8)), z)
    )
    np.testing.assert_allclose(evaluate_symbol(combined, z), expect, rtol=1e-12)


def test_symbol_spec_classification_flags():
    assert SymbolSpec(zeros=((0.5, 1),)).is_inner()
    assert not ARC_HALF_WEIGHT.is_inner()
    assert not SymbolSpec(zeros=((0.5, 1),), scale=0.7).is_inner()
    assert SymbolSpec(zeros=((0.5, 1),)).has_inner_part()
    assert not ARC_HALF_WEIGHT.has_inner_part()
    with pytest.raises(DomainError):
        SymbolSpec(scale=1.2)


# ---------------------------------------------------------------------------
# boundary weight and extremality


def test_delta_weight_on_arc_profile():
    dw = delta_weight(ARC_HALF_WEIGHT, 4096)
    on_arc = np.isclose(dw.values, math.sqrt(3) / 2)
    off_arc = dw.values == 0.0
    assert np.all(on_arc | off_arc)
    # the arc covers a quarter of the circle; Delta^2 = 3/4 there
    assert dw.mass() == pytest.approx(0.25 * 0.75, rel=1e-2)
    assert not dw.support_full
    assert dw.carrier is not None and dw.carrier.measure() == pytest.approx(0.25)
    assert dw.delta_sq_pieces is not None
    _s, _l, value = dw.delta_sq_pieces[0]
    assert value == pytest.approx(0.75)


def test_strict_scale_makes_weight_full_support():
    dw = delta_weight(SymbolSpec(zeros=((0.5, 1),), scale=0.9), 64)
    assert dw.support_full
    np.testing.assert_allclose(dw.values, math.sqrt(1 - 0.81), rtol=1e-12)


def test_extremality_flag_split():
    # the arc weight vanishes on most of the circle: log-gap integral floored
    ev = symbol_eval(ARC_HALF_WEIGHT, 1024)
    assert ev.extremality.is_extreme
    assert ev.extremality.floored_fraction > 0.5
    flat = extremality_report(np.full(1024, 0.9))
    assert not flat.is_extreme
    assert flat.integral == pytest.approx(math.log(0.1), rel=1e-12)


def test_symbol_eval_guards_nodes_on_singular_support():
    spec = SymbolSpec(singular=SingularMeasureSpec(atoms=((F(0), 0.5),)))
    ev = symbol_eval(spec, 16)
    assert list(ev.guarded) == [0]
    assert np.all(np.isfinite(ev.values))
    # guarded node evaluated just inside the circle, so strictly contractive
    assert abs(ev.values[0]) < 1.0
    off = np.delete(np.abs(ev.values), 0)
    np.testing.assert_allclose(off, 1.0, rtol=1e-12)


def test_symbol_eval_grid_validation():
    with pytest.raises(DomainError):
        symbol_eval(ARC_HALF_WEIGHT, 15)
    with pytest.raises(DomainError):
        symbol_eval(ARC_HALF_WEIGHT, 2)
    with pytest.raises(DomainError):
        symbol_eval(ARC_HALF_WEIGHT, 64, r_eval=1.5)


def test_symbol_eval_interior_radius_matches_direct_evaluation():
    spec = SymbolSpec(zeros=((0.3, 1),), outer=OuterProfile.constant(0.7))
    m = 64
    ev = symbol_eval(spec, m, r_eval=0.5)
    direct = evaluate_symbol(spec, 0.5 * unit_points(m), series_grid=m)
    np.testing.assert_allclose(ev.values, direct, rtol=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    value=st.floats(min_value=0.05, max_value=1.0),
    re=st.floats(min_value=-0.6, max_value=0.6),
    im=st.floats(min_value=-0.6, max_value=0.6),
    seed=st.integers(min_value=0, max_value=2**31),
)
def test_symbols_are_contractions_on_the_disk(value, re, im, seed):
    spec = SymbolSpec(zeros=((complex(re, im), 1),), outer=OuterProfile.constant(value))
    rng = np.random.default_rng(seed)
    z = 0.95 * np.sqrt(rng.uniform(size=8)) * np.exp(2j * np.pi * rng.uniform(size=8))
    vals = evaluate_symbol(spec, z)
    assert np.all(np.abs(vals) <= 1.0 + 1e-9)
