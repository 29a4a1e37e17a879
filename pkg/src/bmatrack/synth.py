"""Deterministic synthetic scenes with exact ground-truth boxes.

Each preset moves a 40x30 object 2 px/frame across a 320x240 frame for 100
frames and stresses one failure mode of single-feature trackers.  The
object is a rounded rectangle (superellipse of exponent 4) whose outer part
is three concentric colour bands around a 1-px two-colour checker.  The
bands make the colour histogram of any box other than the true one differ
from the template, so the colour likelihood peaks sharply in position and
in both size axes.  The presets:

``constant``
    nothing but the moving object.
``confusing-color``
    background patches painted in one of the object colours.
``abrupt-color-change``
    every object colour swaps to a new hue at frame 60; the brightness
    order is kept, so the LBP texture is unchanged.
``partial-occlusion``
    a background-coloured bar over the top of the object hides 40% of its
    pixels for frames 40-55.
``scale-change``
    the box grows linearly from 40x30 to 80x60.

Colour channel values sit at the centres of the 32-level histogram bins so
that the default pixel noise (std 2) never moves a pixel to another bin.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import Frame, Region
from .errors import InvalidScenario, UnknownScenario

RGB = tuple[int, int, int]

BACKGROUND: RGB = (80, 112, 80)
OBJECT_COLORS: tuple[RGB, RGB] = ((208, 48, 48), (240, 208, 48))
SWAPPED_COLORS: tuple[RGB, RGB] = ((48, 80, 208), (112, 240, 240))
OBJECT_RINGS: tuple[RGB, ...] = ((48, 48, 176), (240, 144, 208), (48, 176, 48))
SWAPPED_RINGS: tuple[RGB, ...] = ((16, 80, 112), (208, 208, 16), (176, 112, 144))
DEFAULT_NOISE_STD = 2.0
# superellipse exponents |u|^p + |v|^p <= 1 of the curved outlines
SHAPE_EXPONENTS = {"ellipse": 2.0, "rounded": 4.0}
PRESETS = ("constant", "confusing-color", "abrupt-color-change", "partial-occlusion", "scale-change")


@dataclass(frozen=True)
class Appearance:
    """Object fill: one colour, or a two-colour checker of ``cell`` pixels.

    With ``cells`` set instead, the checker has that many ``(columns, rows)``
    of cells across the box and scales with it.  ``shape`` is ``"box"`` (the
    object fills its ground-truth box), ``"ellipse"`` or ``"rounded"`` (the
    inscribed superellipse; the box corners show background).  ``rings``
    paints bands of further colours inward from the outline, following
    its shape.
    """

    colors: tuple
    cell: Optional[tuple[float, float]] = (1, 1)
    cells: Optional[tuple[int, int]] = None
    shape: str = "box"
    # concentric bands, outermost first, each ``ring_width`` of the half-size
    rings: tuple = ()
    ring_width: float = 0.15

    @property
    def solid(self) -> bool:
        return len(self.colors) == 1


@dataclass(frozen=True)
class Background:
    color: RGB = BACKGROUND
    # (x0, y0, x1, y1, rgb) rectangles in pixel indices, end-exclusive
    patches: tuple = ()


@dataclass(frozen=True)
class Scenario:
    name: str
    frame_count: int
    frame_w: int
    frame_h: int
    object_path: tuple
    object_appearance: tuple
    background_spec: Background = field(default_factory=Background)
    noise_std: float = DEFAULT_NOISE_STD
    seed: int = 0
    # per frame: None or the fraction of object pixels hidden by a bar from the top
    occlusion: tuple = ()

    def validate(self) -> None:
        if len(self.object_path) != self.frame_count or len(self.object_appearance) != self.frame_count:
            raise InvalidScenario("object_path and object_appearance need one entry per frame")
        if self.occlusion and len(self.occlusion) != self.frame_count:
            raise InvalidScenario("occlusion needs one entry per frame")
        for t, r in enumerate(self.object_path):
            x0, x1, y0, y1 = r.bounds
            if x1 <= 0 or y1 <= 0 or x0 >= self.frame_w or y0 >= self.frame_h:
                raise InvalidScenario(f"frame {t}: object {r} lies outside the {self.frame_w}x{self.frame_h} frame")


def _object_mask_colors(region: Region, app: Appearance, frame_w: int, frame_h: int):
    """Clipped slices of ``region``, per-pixel palette index and outline mask."""
    rows, cols = region.pixel_slices()
    r0, r1 = max(rows.start, 0), min(rows.stop, frame_h)
    c0, c1 = max(cols.start, 0), min(cols.stop, frame_w)
    rr, cc = np.mgrid[r0:r1, c0:c1]
    u = np.abs(cc + 0.5 - region.cx) / (region.w / 2)
    v = np.abs(rr + 0.5 - region.cy) / (region.h / 2)
    if app.shape in SHAPE_EXPONENTS:
        p = SHAPE_EXPONENTS[app.shape]
        radius = (u**p + v**p) ** (1.0 / p)
    elif app.shape == "box":
        radius = np.maximum(u, v)
    else:
        raise InvalidScenario(f"unknown object shape {app.shape!r}")
    inside = radius <= 1.0

    if app.solid:
        idx = np.zeros(rr.shape, dtype=np.int64)
    else:
        x0, _, y0, _ = region.bounds
        if app.cells is not None:
            cw, ch = region.w / app.cells[0], region.h / app.cells[1]
        else:
            cw, ch = app.cell
        idx = (np.floor((cc + 0.5 - x0) / cw) + np.floor((rr + 0.5 - y0) / ch)).astype(np.int64) % 2
    if app.rings:
        band = np.floor((1.0 - radius) / app.ring_width).astype(np.int64)
        ring = (band >= 0) & (band < len(app.rings))
        idx[ring] = len(app.colors) + band[ring]
    return (slice(r0, r1), slice(c0, c1)), idx, inside


def object_mask(sc: "Scenario", t: int) -> np.ndarray:
    """Boolean ``(height, width)`` mask of the pixels painted with the object."""
    mask = np.zeros((sc.frame_h, sc.frame_w), dtype=bool)
    (rs, cs), _, inside = _object_mask_colors(sc.object_path[t], sc.object_appearance[t], sc.frame_w, sc.frame_h)
    mask[rs, cs] = inside
    return mask


def occluded_rows(sc: "Scenario", t: int) -> int:
    """Rows hidden from the top of the object box so that the hidden share
    of object pixels is as close as possible to the scheduled fraction."""
    fraction = sc.occlusion[t] if sc.occlusion else None
    if not fraction:
        return 0
    (rs, cs), _, inside = _object_mask_colors(sc.object_path[t], sc.object_appearance[t], sc.frame_w, sc.frame_h)
    share = np.cumsum(inside.sum(axis=1)) / inside.sum()
    return int(np.argmin(np.abs(share - fraction))) + 1


def render_frame(sc: Scenario, t: int) -> Frame:
    bg = sc.background_spec
    img = np.empty((sc.frame_h, sc.frame_w, 3), dtype=np.float64)
    img[:] = bg.color
    for x0, y0, x1, y1, rgb in bg.patches:
        img[y0:y1, x0:x1] = rgb

    region = sc.object_path[t]
    app = sc.object_appearance[t]
    (rs, cs), idx, inside = _object_mask_colors(region, app, sc.frame_w, sc.frame_h)
    palette = np.asarray(tuple(app.colors) + tuple(app.rings), dtype=np.float64)
    view = img[rs, cs]
    view[inside] = palette[idx[inside]]

    n_rows = occluded_rows(sc, t)
    if n_rows:
        img[rs.start : rs.start + n_rows, cs] = bg.color

    if sc.noise_std > 0:
        rng = np.random.default_rng([sc.seed, t])
        img += rng.normal(0.0, sc.noise_std, img.shape)
    return Frame(np.clip(np.rint(img), 0, 255).astype(np.uint8), index=t)


def generate(sc: Scenario) -> tuple[list[Frame], list[Region]]:
    """Render every frame of ``sc``; frame ``t`` depends only on ``(seed, t)``."""
    sc.validate()
    return [render_frame(sc, t) for t in range(sc.frame_count)], list(sc.object_path)


def _linear_path(n: int, start=(60.0, 120.0), velocity=(2.0, 0.0), size=(40.0, 30.0), end_size=None):
    end_size = size if end_size is None else end_size
    path = []
    for t in range(n):
        f = t / (n - 1) if n > 1 else 0.0
        path.append(
            Region(
                start[0] + velocity[0] * t,
                start[1] + velocity[1] * t,
                size[0] + (end_size[0] - size[0]) * f,
                size[1] + (end_size[1] - size[1]) * f,
            )
        )
    return tuple(path)


def scenario_preset(name: str, seed: int = 0, noise_std: float = DEFAULT_NOISE_STD) -> Scenario:
    if name not in PRESETS:
        raise UnknownScenario(f"unknown scenario {name!r}; choose from {', '.join(PRESETS)}")
    n, w, h = 100, 320, 240
    checker = Appearance(OBJECT_COLORS, shape="rounded", rings=OBJECT_RINGS)
    common = dict(frame_count=n, frame_w=w, frame_h=h, noise_std=noise_std, seed=seed)

    if name == "constant":
        return Scenario(name, object_path=_linear_path(n), object_appearance=(checker,) * n, **common)

    if name == "confusing-color":
        red = OBJECT_COLORS[0]
        patches = ((110, 60, 170, 96, red), (200, 144, 260, 180, red), (20, 150, 70, 200, red))
        return Scenario(
            name,
            object_path=_linear_path(n),
            object_appearance=(checker,) * n,
            background_spec=Background(patches=patches),
            **common,
        )

    if name == "abrupt-color-change":
        swapped = Appearance(SWAPPED_COLORS, shape="rounded", rings=SWAPPED_RINGS)
        return Scenario(name, object_path=_linear_path(n), object_appearance=(checker,) * 60 + (swapped,) * (n - 60), **common)

    if name == "partial-occlusion":
        occlusion = tuple(0.4 if 40 <= t <= 55 else None for t in range(n))
        return Scenario(
            name, object_path=_linear_path(n), object_appearance=(checker,) * n, occlusion=occlusion, **common
        )

    # scale-change
    return Scenario(
        name,
        object_path=_linear_path(n, end_size=(80.0, 60.0)),
        object_appearance=(checker,) * n,
        **common,
    )
