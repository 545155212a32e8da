from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from horseshoe_spectra.errors import EmptyPrune, InadmissibleWord
from horseshoe_spectra.geometry import AffineModel, geometric_resolutions
from horseshoe_spectra.spectra import (
    SpectrumSlice,
    TwoSidedPoint,
    block_graph,
    build_table,
    du_curve,
    geometric_table,
    iter_markov_points,
    lagrange_value,
    markov_value,
    markov_value_set,
    periodic_point,
    prune_below,
    random_points,
    select_subhorseshoe,
    slice_dimension,
    spectrum_slice,
    symbol_table,
    threshold_mask,
)
from horseshoe_spectra.symbolic import full_shift, golden_mean_shift, make_orbit, periodic_orbits

LN2_LN3 = math.log(2) / math.log(3)


@pytest.fixture
def indicator(two_shift):
    return symbol_table(two_shift, [0.0, 1.0])


def _pt(sft, left, middle, right, origin=0):
    return TwoSidedPoint(make_orbit(sft, left), tuple(middle), make_orbit(sft, right), origin).validate(sft)


def test_markov_examples(two_shift, indicator):
    assert markov_value(two_shift, indicator, _pt(two_shift, (0,), (1,), (0,))) == 1.0
    assert markov_value(two_shift, indicator, _pt(two_shift, (0,), (), (0,))) == 0.0
    assert markov_value(two_shift, indicator, _pt(two_shift, (0, 1), (), (0, 1))) == 1.0


def test_lagrange_examples(two_shift, indicator):
    x = _pt(two_shift, (0,), (1,), (0,))
    assert lagrange_value(two_shift, indicator, x) == 0.0
    for o in periodic_orbits(two_shift, 5):
        p = periodic_point(o)
        assert lagrange_value(two_shift, indicator, p) == markov_value(two_shift, indicator, p)
    ones = build_table(two_shift, 1, lambda w: sum(w) / 3)
    y = _pt(two_shift, (0,), (), (0, 1, 1))
    assert lagrange_value(two_shift, ones, y) == pytest.approx(2 / 3)


def test_point_validation(golden):
    with pytest.raises(InadmissibleWord):
        _pt(golden, (0, 1), (1,), (0,))


def test_table_requires_all_windows(two_shift):
    t = build_table(two_shift, 1, lambda w: float(w[1]))
    assert t.width == 3 and len(t.windows()) == 8
    assert t[(1, 0, 1)] == 0.0
    assert t.reversed()[(1, 0, 0)] == t[(0, 0, 1)]


def test_prune_examples(two_shift, indicator, middle_third):
    p = prune_below(two_shift, middle_third, indicator, 0.5)
    assert [p.graph.vertices[v] for v in p.selected.vertices] == [(0,)]
    assert p.dimension == pytest.approx(0.0, abs=1e-9)
    full = prune_below(two_shift, middle_third, indicator, 1.0)
    assert full.dimension == pytest.approx(LN2_LN3, abs=1e-6)
    with pytest.raises(EmptyPrune):
        prune_below(two_shift, middle_third, indicator, -1.0)


def test_du_curve_examples(two_shift, indicator, middle_third):
    c = du_curve(two_shift, middle_third, middle_third, indicator, [0.5, 1.0, 5.0])
    assert [s.d_u for s in c.samples] == pytest.approx([0.0, LN2_LN3, LN2_LN3], abs=1e-6)
    assert all(s.d_u == pytest.approx(s.d_s, abs=1e-12) for s in c.samples)
    assert c.is_monotone()
    with pytest.raises(ValueError):
        du_curve(two_shift, middle_third, middle_third, indicator, [1.0, 0.5])


def test_du_curve_below_minimum_is_zero(two_shift, indicator, middle_third):
    c = du_curve(two_shift, middle_third, middle_third, indicator, [-1.0])
    assert c.samples[0].d_u == 0.0 and c.samples[0].d_s == 0.0


def test_spectrum_examples(two_shift, indicator):
    assert spectrum_slice(two_shift, indicator, "markov", 2.0, 2).values == (0.0, 1.0)
    assert spectrum_slice(two_shift, indicator, "lagrange", 0.5, 2).values == (0.0,)
    with pytest.raises(ValueError):
        spectrum_slice(two_shift, indicator, "other", 1.0, 2)
    with pytest.raises(ValueError):
        spectrum_slice(two_shift, indicator, "markov", 1.0, 0)


def test_markov_value_set_matches_pointwise(golden):
    tab = build_table(golden, 1, lambda w: 0.3 * w[0] + 0.7 * w[1] + 0.11 * w[2])
    fast = np.sort(markov_value_set(golden, tab, 5, 2))
    slow = np.sort([markov_value(golden, tab, x) for x in iter_markov_points(golden, 5, 2)])
    assert np.array_equal(fast, slow)


def test_slice_dimension_examples():
    assert slice_dimension(SpectrumSlice("markov", 1.0, (0.0,), 1), geometric_resolutions(2, 6)).value == 0.0
    vals = tuple(np.linspace(0, 1, 1000))
    assert abs(slice_dimension(SpectrumSlice("markov", 1.0, vals, 1), geometric_resolutions(4, 8)).value - 1) <= 0.05


def test_select_subhorseshoe_examples(two_shift, indicator, middle_third):
    p = prune_below(two_shift, middle_third, indicator, 1.0)
    same, loss = select_subhorseshoe(p, [], 8)
    assert same.selected.vertices == p.selected.vertices and loss == 0.0
    sub, loss = select_subhorseshoe(p, [(1,)], 8)
    assert [p.graph.vertices[v] for v in sub.selected.vertices] == [(0,)]
    assert loss > 0
    s3 = full_shift(3)
    m3 = AffineModel((0.2,) * 3, (0, 0.4, 0.8))
    t3 = symbol_table(s3, [0.0, 0.0, 0.0])
    p3 = prune_below(s3, m3, t3, 0.0)
    assert p3.dimension == pytest.approx(math.log(3) / math.log(5), abs=1e-6)
    q3, _ = select_subhorseshoe(p3, [(2,)], 6)
    assert q3.dimension == pytest.approx(math.log(2) / math.log(5), abs=1e-6)


def test_geometric_table_is_sum_of_coordinates(two_shift, middle_third):
    tab = geometric_table(two_shift, middle_third, middle_third, 1)
    assert tab[(0, 0, 0)] == pytest.approx(1 / 18 + 1 / 18)
    assert tab.reversed()[(0, 1, 1)] == tab[(1, 1, 0)]


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0, 1, allow_nan=False), min_size=8, max_size=8), st.integers(0, 2**31 - 1))
def test_lagrange_below_markov_and_shift_invariance(values, seed):
    sft = full_shift(2)
    tab = build_table(sft, 1, lambda w: values[4 * w[0] + 2 * w[1] + w[2]])
    for x in random_points(sft, np.random.default_rng(seed), 20, 4, 3):
        l, m = lagrange_value(sft, tab, x), markov_value(sft, tab, x)
        assert l <= m
        assert lagrange_value(sft, tab, x.shifted(7)) == l
        assert markov_value(sft, tab, x.shifted(-3)) == m


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0, 1, allow_nan=False), min_size=8, max_size=8),
       st.lists(st.floats(-0.1, 1.1, allow_nan=False), min_size=2, max_size=6))
def test_masks_nested_and_curve_monotone(values, ts):
    sft = full_shift(2)
    model = AffineModel((1 / 3, 1 / 3), (0, 2 / 3))
    tab = build_table(sft, 1, lambda w: values[4 * w[0] + 2 * w[1] + w[2]])
    ts = sorted(ts)
    g = block_graph(sft, tab.width)
    masks = [threshold_mask(tab, g, t) for t in ts]
    for a, b in zip(masks, masks[1:]):
        assert not np.any(a & ~b)
    assert du_curve(sft, model, model, tab, ts).is_monotone()


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(0, 1, allow_nan=False), min_size=8, max_size=8), st.floats(0, 1.2))
def test_spectrum_inclusions(values, t):
    sft = full_shift(2)
    tab = build_table(sft, 1, lambda w: values[4 * w[0] + 2 * w[1] + w[2]])
    lag = set(spectrum_slice(sft, tab, "lagrange", t, 5).values)
    mar = set(spectrum_slice(sft, tab, "markov", t, 5, 1).values)
    assert lag <= mar <= set(float(v) for v in tab.distinct_values())


def test_spectrum_dedup_resolution(two_shift):
    tab = symbol_table(two_shift, [0.0, 1e-6])
    assert len(spectrum_slice(two_shift, tab, "markov", 1.0, 2).values) == 2
    assert spectrum_slice(two_shift, tab, "markov", 1.0, 2, resolution=1e-3).values == (0.0,)


def test_du_step_structure(two_shift):
    model = AffineModel((0.25, 1 / 6), (0, 5 / 6))
    tab = geometric_table(two_shift, model, model, 1)
    vals = [float(v) for v in tab.distinct_values()]
    g = block_graph(two_shift, tab.width)
    for lo, hi in zip(vals, vals[1:]):
        inner = list(np.linspace(lo, hi, 6)[:-1])
        curve = du_curve(two_shift, model, model, tab, inner)
        assert len({s.d_u for s in curve.samples}) == 1
        masks = [threshold_mask(tab, g, t) for t in inner]
        assert all(np.array_equal(masks[0], m) for m in masks)


def test_select_subhorseshoe_idempotent(two_shift, indicator, middle_third):
    p = prune_below(two_shift, middle_third, indicator, 1.0)
    once, _ = select_subhorseshoe(p, [], 6)
    twice, _ = select_subhorseshoe(once, [], 6)
    assert np.array_equal(once.mask, twice.mask) and twice.selected.vertices == p.selected.vertices
