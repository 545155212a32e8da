from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from horseshoe_spectra.errors import DegenerateSet, DomainError, InadmissibleWord, NoCycle
from horseshoe_spectra.geometry import (
    AffineModel,
    GaussModel,
    box_count_dimension,
    cylinder_interval,
    dimension_counting,
    dimension_pressure,
    front_counts,
    gauss_endpoints_exact,
    geometric_resolutions,
    projection_dimension_experiment,
    scale_front,
    unstable_scale,
)
from horseshoe_spectra.spectra import block_graph
from horseshoe_spectra.symbolic import enumerate_words, full_shift, golden_mean_shift, validate_sft

# Frozen oracle values (scripts/compute_oracles.py).
LN2_LN3 = 0.6309297535714574
HALF_QUARTER = 0.6942419136306172
GAUSS12_BOX_ORACLE = 0.530721355264272


def test_affine_cylinder_example(middle_third):
    iv = cylinder_interval(middle_third, (0, 1))
    assert iv.length == pytest.approx(1 / 9, abs=1e-15)
    assert iv.left == pytest.approx(2 / 9)


def test_gauss_cylinder_example(gauss12):
    iv = cylinder_interval(gauss12, (0, 0))
    assert (iv.left, iv.right) == pytest.approx((1 / 2, 2 / 3), abs=1e-15)
    assert iv.length == pytest.approx(1 / 6, abs=1e-15)
    assert gauss_endpoints_exact((1, 1)) == (Fraction(1, 2), Fraction(2, 3))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=12))
def test_gauss_cylinder_matches_exact(word):
    model = GaussModel((1, 2))
    iv = cylinder_interval(model, word)
    a, b = gauss_endpoints_exact([model.digits[i] for i in word])
    assert iv.left == pytest.approx(float(a), rel=1e-12)
    assert iv.right == pytest.approx(float(b), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=10), st.integers(0, 1))
def test_cylinders_nest(word, a):
    for model in (AffineModel((0.5, 0.25), (0, 0.75)), GaussModel((1, 2))):
        outer = cylinder_interval(model, word)
        inner = cylinder_interval(model, tuple(word) + (a,))
        assert outer.left - 1e-15 <= inner.left <= inner.right <= outer.right + 1e-15


def test_cylinder_rejects_bad_words(middle_third, golden):
    with pytest.raises(InadmissibleWord):
        cylinder_interval(middle_third, ())
    with pytest.raises(InadmissibleWord):
        cylinder_interval(middle_third, (0, 2))
    with pytest.raises(InadmissibleWord):
        cylinder_interval(middle_third, (1, 1), golden)


def test_unstable_scale_examples():
    assert unstable_scale(math.exp(-5.2)) == 5
    assert unstable_scale(1 / 9) == 2
    assert unstable_scale(1.0) == 0
    for bad in (0.0, -1.0, 1.5):
        with pytest.raises(DomainError):
            unstable_scale(bad)


def test_model_validation():
    with pytest.raises(ValueError):
        AffineModel((0.6, 0.6), (0.0, 0.4))
    with pytest.raises(ValueError):
        AffineModel((1.0,), (0.0,))
    with pytest.raises(ValueError):
        GaussModel((0, 1))
    with pytest.raises(ValueError):
        GaussModel((1, 1))


def test_scale_front_examples(middle_third, two_shift):
    g = block_graph(two_shift, 1)
    assert scale_front(middle_third, g, 2) == enumerate_words(two_shift, 2)
    assert scale_front(middle_third, g, 7) == enumerate_words(two_shift, 7)
    assert scale_front(middle_third, g, 0) == [(0,), (1,)]
    assert scale_front(GaussModel((1, 2)), g, 0) == [(0,), (1,)]


def test_front_counts_match_scale_front(two_shift):
    for model in (AffineModel((0.5, 0.25), (0, 0.75)), GaussModel((1, 2))):
        g = block_graph(two_shift, 1)
        counts = front_counts(model, g, 8)
        assert [len(scale_front(model, g, r)) for r in range(9)] == list(counts)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 9))
def test_scale_front_is_a_cover(r):
    # Fronts are antichains whose cylinders tile the unit interval's Cantor set.
    model = AffineModel((0.5, 0.25), (0, 0.75))
    g = block_graph(full_shift(2), 1)
    words = scale_front(model, g, r)
    total = sum(cylinder_interval(model, w).length ** HALF_QUARTER for w in words)
    assert total == pytest.approx(1.0, rel=1e-9)
    for w in words:
        assert cylinder_interval(model, w).scale >= r > cylinder_interval(model, w[:-1]).scale if len(w) > 1 else True


def test_pressure_closed_forms(middle_third, two_shift):
    g = block_graph(two_shift, 1)
    assert dimension_pressure(middle_third, g).value == pytest.approx(LN2_LN3, abs=1e-6)
    assert dimension_pressure(AffineModel((0.5, 0.25), (0, 0.75)), g).value == pytest.approx(HALF_QUARTER, abs=1e-6)
    e = dimension_pressure(AffineModel((0.2,) * 3, (0, 0.4, 0.8)), block_graph(full_shift(3), 1))
    assert e.value == pytest.approx(math.log(3) / math.log(5), abs=1e-6)


def test_pressure_golden_mean_closed_form():
    # Golden-mean shift with equal ratios 1/3: dimension ln(phi)/ln 3.
    phi = (1 + math.sqrt(5)) / 2
    m = AffineModel((1 / 3, 1 / 3), (0, 2 / 3))
    e = dimension_pressure(m, block_graph(golden_mean_shift(), 1))
    assert e.value == pytest.approx(math.log(phi) / math.log(3), abs=1e-6)


def test_pressure_gauss_against_oracle(gauss12, two_shift):
    e = dimension_pressure(gauss12, block_graph(two_shift, 1))
    assert abs(e.value - GAUSS12_BOX_ORACLE) < 2e-3
    assert e.error_bound < 1e-3


def test_pressure_masked_fixed_point(middle_third, two_shift):
    g = block_graph(two_shift, 1)
    assert dimension_pressure(middle_third, g, g.mask_of([(0,)])).value == pytest.approx(0.0, abs=1e-9)
    gg = block_graph(golden_mean_shift(), 2)
    with pytest.raises(NoCycle):
        dimension_pressure(middle_third, gg, gg.mask_of([(0, 1)]))


def test_counting_examples(middle_third, two_shift):
    g = block_graph(two_shift, 1)
    e = dimension_counting(middle_third, g, 4, 12)
    assert abs(e.value - LN2_LN3) <= 0.02
    e0 = dimension_counting(middle_third, g, 4, 12, g.mask_of([(0,)]))
    assert e0.value == 0.0
    with pytest.raises(ValueError):
        dimension_counting(middle_third, g, 5, 5)


def test_box_count_examples(middle_third, two_shift):
    pts = np.linspace(0, 1, 1000)
    assert abs(box_count_dimension(pts, geometric_resolutions(4, 8)).value - 1.0) <= 0.05
    ends = []
    for w in enumerate_words(two_shift, 10):
        iv = cylinder_interval(middle_third, w)
        ends += [iv.left, iv.right]
    assert abs(box_count_dimension(ends, geometric_resolutions(4, 14)).value - 0.63) <= 0.05
    assert box_count_dimension([0.3], geometric_resolutions(2, 5)).value == 0.0


def test_box_count_intervals_and_errors():
    iv = np.array([[0.0, 0.999]])
    assert box_count_dimension(intervals=iv, resolutions=geometric_resolutions(2, 8)).value == pytest.approx(1.0, abs=0.02)
    with pytest.raises(DegenerateSet):
        box_count_dimension([0.1, 0.2], [0.5])
    with pytest.raises(DegenerateSet):
        box_count_dimension([], geometric_resolutions(1, 3))
    with pytest.raises(DegenerateSet):
        box_count_dimension([0.1, np.nan], geometric_resolutions(1, 3))


def test_box_count_two_dimensional():
    g = np.linspace(0, 1, 200, endpoint=False)
    pts = np.stack(np.meshgrid(g, g), axis=-1).reshape(-1, 2)
    assert box_count_dimension(pts, geometric_resolutions(2, 6)).value == pytest.approx(2.0, abs=0.03)


def test_projection_examples():
    mt = AffineModel((1 / 3, 1 / 3), (0, 2 / 3))
    e = projection_dimension_experiment(mt, mt, 10, geometric_resolutions(6, 14))
    assert abs(e.value - 1.0) <= 0.03
    single = AffineModel((0.5,), (0.25,))
    e1 = projection_dimension_experiment(single, mt, 10, geometric_resolutions(4, 10))
    ref = projection_dimension_experiment(AffineModel((0.5,), (0.0,)), mt, 10, geometric_resolutions(4, 10))
    assert abs(e1.value - LN2_LN3) < 0.06 and abs(ref.value - LN2_LN3) < 0.06
    with pytest.raises(ValueError):
        projection_dimension_experiment(mt, mt, 7)
    with pytest.raises(ValueError):
        projection_dimension_experiment(mt, mt, 8, height=lambda x, y: x)


def test_gauss_endpoint_parity_exact():
    for k in range(1, 11):
        for word in enumerate_words(full_shift(2), k):
            digits = [(1, 2)[a] for a in word]
            p_prev, p, q_prev, q = 1, 0, 0, 1
            for a in digits:
                p_prev, p = p, a * p + p_prev
                q_prev, q = q, a * q + q_prev
            lo, hi = gauss_endpoints_exact(digits)
            pk, alt = Fraction(p, q), Fraction(p + p_prev, q + q_prev)
            assert (lo, hi) == ((pk, alt) if k % 2 == 0 else (alt, pk))
            if k > 3:
                break


def test_scale_front_prefix_free_and_covering(golden):
    model = AffineModel((0.5, 0.25), (0, 0.75))
    g = block_graph(golden, 1)
    for r in range(0, 7):
        front = scale_front(model, g, r)
        fs = set(front)
        for a in front:
            assert not any(a[:k] in fs for k in range(1, len(a)))
        for w in enumerate_words(golden, 12):
            if cylinder_interval(model, w).scale >= r:
                assert sum(w[:k] in fs for k in range(1, 13)) == 1


def test_pressure_monotone_under_mask_shrinking():
    sft = full_shift(3)
    model = AffineModel((0.2, 0.25, 0.3), (0.0, 0.3, 0.65))
    g = block_graph(sft, 2)
    rng = np.random.default_rng(4)
    mask = g.full_mask()
    prev = dimension_pressure(model, g, mask).value
    for v in rng.permutation(g.size)[:6]:
        mask = mask.copy()
        mask[v] = False
        try:
            cur = dimension_pressure(model, g, mask).value
        except NoCycle:
            break
        assert cur <= prev + 1e-12
        prev = cur
