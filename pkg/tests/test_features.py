import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from bmatrack import Frame, Region, clamp_region
from bmatrack.errors import LengthMismatch, RegionTooSmall
from bmatrack.features import (
    bhattacharyya_coefficient,
    bhattacharyya_distance,
    color_bin,
    color_distances,
    extract_color_histogram,
    extract_lbp_histogram,
    gray_image,
    kernel_weight,
    lbp_distances,
    lbp_label,
    lbp_label_map,
)
from conftest import random_frame, solid_frame


@pytest.mark.parametrize("rgb, expected", [((0, 0, 0), 0), ((255, 255, 255), 511), ((64, 200, 30), 176)])
def test_color_bin(rgb, expected):
    assert color_bin(*rgb) == expected


@pytest.mark.parametrize("r, expected", [(0, 1), (1, 0), (0.5, 0.75), (2.0, 0)])
def test_kernel_weight(r, expected):
    assert kernel_weight(r) == expected


def test_uniform_frame_is_point_mass():
    h = extract_color_histogram(solid_frame((255, 0, 0)), Region(10, 10, 7, 5))
    assert h[color_bin(255, 0, 0)] == 1.0 and h.sum() == 1.0


def test_symmetric_halves_split_evenly():
    px = np.zeros((10, 10, 3), dtype=np.uint8)
    px[:, :5] = (255, 0, 0)
    px[:, 5:] = (0, 0, 255)
    h = extract_color_histogram(Frame(px), Region(5, 5, 10, 10))
    assert h[color_bin(255, 0, 0)] == pytest.approx(0.5, abs=1e-15)
    assert h[color_bin(0, 0, 255)] == pytest.approx(0.5, abs=1e-15)


def test_three_by_three_by_hand():
    # nine distinct colours; weights 1 - r^2 with r = dist / sqrt(18)
    px = np.array([[(32 * ((3 * r + c) % 8), 32 * ((3 * r + c) // 8), 0) for c in range(3)] for r in range(3)], dtype=np.uint8)
    h = extract_color_histogram(Frame(px), Region(1.5, 1.5, 3, 3))
    raw = {}
    for r in range(3):
        for c in range(3):
            raw[color_bin(*px[r, c])] = 1 - ((r - 1) ** 2 + (c - 1) ** 2) / 18
    total = sum(raw.values())
    for b, v in raw.items():
        assert h[b] == pytest.approx(v / total, abs=1e-15)


@given(st.integers(0, 2**32 - 1))
def test_color_histogram_matches_double_loop(seed):
    rng = np.random.default_rng(seed)
    f = random_frame(rng, 20, 15)
    r = Region(*rng.uniform(-2, 22, 2), *rng.uniform(1, 16, 2))
    c = clamp_region(r, f.width, f.height)
    expected = oracles.color_histogram(f.pixels, c.cx, c.cy, c.w, c.h)
    np.testing.assert_allclose(extract_color_histogram(f, r), expected, rtol=0, atol=1e-12)


def test_color_histogram_sums_to_one(rng):
    for _ in range(50):
        f = random_frame(rng)
        h = extract_color_histogram(f, Region(*rng.uniform(0, 20, 2), *rng.uniform(1, 20, 2)))
        assert abs(h.sum() - 1) < 1e-9 and h.min() >= 0


def test_color_histogram_channel_relabel_covariant(rng):
    # swapping the R and B channels permutes bins (r, g, b) -> (b, g, r)
    f = random_frame(rng)
    region = Region(11, 8, 13, 9)
    h = extract_color_histogram(f, region)
    hs = extract_color_histogram(Frame(f.pixels[..., ::-1].copy()), region)
    perm = np.arange(512).reshape(8, 8, 8).transpose(2, 1, 0).ravel()
    np.testing.assert_allclose(hs, h[perm], atol=1e-15)


def test_lbp_constant_patch():
    assert lbp_label(np.full((3, 3), 7)) == 255


def test_lbp_hand_example():
    # neighbours clockwise from top-left: 120, 90, 90, 90, 90, 90, 90, 120
    patch = [[120, 90, 90], [120, 100, 90], [90, 90, 90]]
    assert lbp_label(patch) == 0b10000001 == 129


def test_lbp_bit_order():
    for i, (dr, dc) in enumerate([(-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1)]):
        p = np.zeros((3, 3))
        p[1, 1] = 1
        p[1 + dr, 1 + dc] = 2
        assert lbp_label(p) == 1 << (7 - i)


@given(arrays(np.int64, (3, 3), elements=st.integers(0, 200)), st.integers(-50, 50))
def test_lbp_shift_invariant(patch, c):
    assert lbp_label(patch + c) == lbp_label(patch)


@given(arrays(np.int64, (3, 3), elements=st.integers(0, 100)))
def test_lbp_monotone_transform_invariant(patch):
    assert lbp_label(patch**3 + 2 * patch) == lbp_label(patch)


def test_lbp_constant_region():
    h = extract_lbp_histogram(solid_frame((10, 200, 30)), Region(10, 10, 8, 6))
    assert h[255] == 1.0


def test_lbp_too_small():
    with pytest.raises(RegionTooSmall):
        extract_lbp_histogram(solid_frame((0, 0, 0)), Region(10, 10, 2, 2))


def test_lbp_checkerboard_matches_loop():
    px = np.zeros((5, 5, 3), dtype=np.uint8)
    px[(np.add.outer(np.arange(5), np.arange(5)) % 2) == 1] = (200, 200, 200)
    expected = oracles.lbp_histogram(px, 2.5, 2.5, 5, 5)
    np.testing.assert_allclose(extract_lbp_histogram(Frame(px), Region(2.5, 2.5, 5, 5)), expected, atol=1e-15)


@given(st.integers(0, 2**32 - 1))
def test_lbp_histogram_matches_loop(seed):
    rng = np.random.default_rng(seed)
    f = random_frame(rng, 14, 11, levels=4)
    r = Region(*rng.uniform(2, 12, 2), *rng.uniform(3, 12, 2))
    c = clamp_region(r, f.width, f.height)
    if len(oracles.covered(c.cx - c.w / 2, c.cx + c.w / 2, f.width)) < 3 or len(
        oracles.covered(c.cy - c.h / 2, c.cy + c.h / 2, f.height)
    ) < 3:
        return
    np.testing.assert_allclose(extract_lbp_histogram(f, r), oracles.lbp_histogram(f.pixels, c.cx, c.cy, c.w, c.h), atol=1e-15)


def test_gray_rounding(rng):
    f = random_frame(rng)
    g = gray_image(f)
    for row, col in zip(rng.integers(0, f.height, 30), rng.integers(0, f.width, 30)):
        assert g[row, col] == oracles.gray(f.pixels[row, col])


def test_label_map_border():
    labels = lbp_label_map(solid_frame((1, 2, 3), 6, 5))
    assert (labels[0] == -1).all() and (labels[:, -1] == -1).all()
    assert (labels[1:-1, 1:-1] == 255).all()


def test_bhattacharyya_examples():
    assert bhattacharyya_distance([0.25, 0.75], [0.25, 0.75]) == 0.0
    assert bhattacharyya_distance([1, 0], [0, 1]) == 1.0
    assert bhattacharyya_coefficient([0.5, 0.5], [1, 0]) == pytest.approx(math.sqrt(0.5))
    assert bhattacharyya_distance([0.5, 0.5], [1, 0]) == pytest.approx(0.54120, abs=1e-5)


def test_bhattacharyya_length_mismatch():
    with pytest.raises(LengthMismatch):
        bhattacharyya_distance([1.0], [0.5, 0.5])


simplex = st.lists(st.floats(0, 1), min_size=2, max_size=12).filter(lambda v: sum(v) > 1e-3)


def _norm(v):
    v = np.asarray(v)
    return v / v.sum()


@given(simplex, st.data())
def test_bhattacharyya_properties(p, data):
    p = _norm(p)
    q = _norm(data.draw(st.lists(st.floats(0, 1), min_size=len(p), max_size=len(p)).filter(lambda v: sum(v) > 1e-3)))
    d = bhattacharyya_distance(p, q)
    assert 0 <= d <= 1
    assert d == bhattacharyya_distance(q, p)
    assert bhattacharyya_distance(p, p) == 0.0
    assert d == pytest.approx(oracles.bhattacharyya(p, q), abs=1e-7)


def test_batched_distances_match_scalar(rng):
    f = random_frame(rng, 40, 30, levels=4)
    ref_c = extract_color_histogram(f, Region(20, 15, 12, 9))
    ref_t = extract_lbp_histogram(f, Region(20, 15, 12, 9))
    boxes = []
    for _ in range(40):
        boxes.append(tuple(clamp_region(Region(*rng.uniform(0, 40, 2), *rng.integers(1, 20, 2)), 40, 30).__dict__.values()))
    boxes = np.array(boxes, dtype=float)
    dc, dt = color_distances(f, boxes, ref_c), lbp_distances(f, boxes, ref_t)
    for b, a, t in zip(boxes, dc, dt):
        r = Region(*b)
        assert a == pytest.approx(bhattacharyya_distance(extract_color_histogram(f, r), ref_c), abs=1e-12)
        try:
            expected = bhattacharyya_distance(extract_lbp_histogram(f, r), ref_t)
        except RegionTooSmall:
            assert math.isnan(t)
        else:
            assert t == pytest.approx(expected, abs=1e-12)
