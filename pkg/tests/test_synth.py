import dataclasses

import numpy as np
import pytest

from bmatrack import Region, generate, scenario_preset
from bmatrack.errors import InvalidScenario, UnknownScenario
from bmatrack.features import lbp_label_map
from bmatrack.synth import (
    BACKGROUND,
    OBJECT_COLORS,
    OBJECT_RINGS,
    PRESETS,
    SWAPPED_COLORS,
    SWAPPED_RINGS,
    Appearance,
    object_mask,
    occluded_rows,
    render_frame,
)


def clean(name, **kw):
    return dataclasses.replace(scenario_preset(name, noise_std=0.0), **kw)


@pytest.mark.parametrize("name", PRESETS)
def test_preset_shape(name):
    sc = scenario_preset(name)
    assert (sc.frame_count, sc.frame_w, sc.frame_h) == (100, 320, 240)
    p = sc.object_path
    assert (p[0].w, p[0].h) == (40, 30)
    assert all(b.cx - a.cx == 2 and b.cy == a.cy for a, b in zip(p, p[1:]))


def test_constant_path_is_straight():
    frames, truth = generate(scenario_preset("constant"))
    assert len(frames) == 100 and truth == list(scenario_preset("constant").object_path)
    assert {r.cy for r in truth} == {120.0}


def test_scale_change_endpoint():
    truth = scenario_preset("scale-change").object_path
    assert (truth[99].w, truth[99].h) == pytest.approx((80, 60))


def test_unknown_preset():
    with pytest.raises(UnknownScenario):
        scenario_preset("fog")


def test_path_outside_frame_is_invalid():
    sc = clean("constant")
    path = list(sc.object_path)
    path[10] = Region(-100, 120, 40, 30)
    with pytest.raises(InvalidScenario):
        generate(dataclasses.replace(sc, object_path=tuple(path)))


def test_length_mismatch_is_invalid():
    sc = clean("constant")
    with pytest.raises(InvalidScenario):
        generate(dataclasses.replace(sc, object_path=sc.object_path[:50]))


def test_noise_free_background_is_static():
    sc = clean("constant")
    frames, _ = generate(sc)
    for t in (0, 30, 98):
        outside = ~(object_mask(sc, t) | object_mask(sc, t + 1))
        np.testing.assert_array_equal(frames[t].pixels[outside], frames[t + 1].pixels[outside])
        assert (frames[t].pixels[outside] == BACKGROUND).all()


def test_same_seed_same_bytes_and_seeds_differ():
    a, _ = generate(scenario_preset("confusing-color", seed=3))
    b, _ = generate(scenario_preset("confusing-color", seed=3))
    c, _ = generate(scenario_preset("confusing-color", seed=4))
    assert all(x.pixels.tobytes() == y.pixels.tobytes() for x, y in zip(a, b))
    assert a[0].pixels.tobytes() != c[0].pixels.tobytes()


def test_frames_depend_only_on_seed_and_index():
    sc = scenario_preset("constant", seed=9)
    frames, _ = generate(sc)
    assert render_frame(sc, 42) == frames[42]


def test_abrupt_change_swaps_fill_at_60():
    sc = clean("abrupt-color-change")
    frames, truth = generate(sc)
    inner = Region(truth[60].cx, truth[60].cy, 10, 8).pixel_slices()
    assert not np.array_equal(frames[59].pixels[inner], frames[60].pixels[inner])
    assert truth[60].cx - truth[59].cx == 2
    assert sc.object_appearance[59].colors == OBJECT_COLORS
    assert sc.object_appearance[60].colors == SWAPPED_COLORS


def luma(rgb):
    r, g, b = rgb
    return 0.299 * r + 0.587 * g + 0.114 * b


def test_swap_preserves_brightness_order():
    before = [luma(c) for c in OBJECT_COLORS + OBJECT_RINGS + (BACKGROUND,)]
    after = [luma(c) for c in SWAPPED_COLORS + SWAPPED_RINGS + (BACKGROUND,)]
    assert np.array_equal(np.argsort(before), np.argsort(after))


def test_swap_preserves_texture():
    sc = clean("abrupt-color-change")
    swapped = dataclasses.replace(sc, object_appearance=(sc.object_appearance[60],) * 100)
    a, b = render_frame(sc, 30), render_frame(swapped, 30)
    assert not np.array_equal(a.pixels, b.pixels)
    np.testing.assert_array_equal(lbp_label_map(a), lbp_label_map(b))


def test_colors_sit_on_bin_centres():
    for rgb in OBJECT_COLORS + SWAPPED_COLORS + OBJECT_RINGS + SWAPPED_RINGS + (BACKGROUND,):
        assert all(v % 32 == 16 for v in rgb)


def test_occlusion_hides_forty_percent_at_frame_47():
    sc = clean("partial-occlusion")
    frame = render_frame(sc, 47)
    mask = object_mask(sc, 47)
    hidden = (frame.pixels[mask] == BACKGROUND).all(axis=1).mean()
    row_share = 1 / 30
    assert abs(hidden - 0.4) <= row_share
    assert occluded_rows(sc, 39) == 0 and occluded_rows(sc, 56) == 0
    assert occluded_rows(sc, 40) > 0 and occluded_rows(sc, 55) > 0


def _expected_pixel(region, app, col, row):
    """Colour the appearance description assigns to pixel ``(col, row)``."""
    u = abs(col + 0.5 - region.cx) / (region.w / 2)
    v = abs(row + 0.5 - region.cy) / (region.h / 2)
    radius = (u**4 + v**4) ** 0.25
    if radius > 1:
        return BACKGROUND
    band = int(np.floor((1 - radius) / app.ring_width))
    if band < len(app.rings):
        return app.rings[band]
    x0, y0 = region.cx - region.w / 2, region.cy - region.h / 2
    return app.colors[(int(np.floor(col + 0.5 - x0)) + int(np.floor(row + 0.5 - y0))) % 2]


@pytest.mark.parametrize("name, t", [("constant", 0), ("constant", 77), ("scale-change", 63), ("abrupt-color-change", 80)])
def test_in_box_pixels_follow_appearance(name, t):
    sc = clean(name)
    frame, region, app = render_frame(sc, t), sc.object_path[t], sc.object_appearance[t]
    assert app.shape == "rounded"
    rows, cols = region.pixel_slices()
    match = [
        tuple(frame.pixels[r, c]) == tuple(_expected_pixel(region, app, c, r))
        for r in range(rows.start, rows.stop)
        for c in range(cols.start, cols.stop)
    ]
    assert np.mean(match) >= 0.95


def test_unknown_shape_rejected():
    sc = clean("constant")
    bad = dataclasses.replace(sc, object_appearance=(Appearance(OBJECT_COLORS, shape="star"),) * 100)
    with pytest.raises(InvalidScenario):
        render_frame(bad, 0)


def test_confusing_patches_use_object_colour():
    sc = scenario_preset("confusing-color")
    assert sc.background_spec.patches
    assert all(rgb in OBJECT_COLORS for *_, rgb in sc.background_spec.patches)
