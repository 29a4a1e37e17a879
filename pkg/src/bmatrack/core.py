"""Shared value types, region arithmetic and tracker configuration.

Coordinates are continuous: the frame spans ``[0, width] x [0, height]`` and
pixel ``(col, row)`` covers the unit square whose centre is
``(col + 0.5, row + 0.5)``.  A region is an axis-aligned box centred at
``(cx, cy)``; it covers every pixel whose centre lies in the half-open box
``[cx - w/2, cx + w/2) x [cy - h/2, cy + h/2)``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .errors import ConfigError

FUSION_MODES = ("bma", "fixed-equal", "color-only", "texture-only")
DEFAULT_SIGMA_DIAG = (4.0, 4.0, 1.0, 1.0, 1.5, 1.5)


def round_half_away(x):
    """Round to the nearest integer, ties away from zero (scalar or array)."""
    x = np.asarray(x, dtype=np.float64)
    out = np.where(x >= 0, np.floor(x + 0.5), np.ceil(x - 0.5))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class StateVector:
    """Object state: centroid, velocity and box size, all in pixels."""

    x: float
    y: float
    vx: float = 0.0
    vy: float = 0.0
    hx: float = 1.0
    hy: float = 1.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.as_array()):
            raise ValueError(f"non-finite state {self!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.vx, self.vy, self.hx, self.hy], dtype=np.float64)

    @classmethod
    def from_array(cls, a) -> "StateVector":
        a = np.asarray(a, dtype=np.float64).ravel()
        if a.shape != (6,):
            raise ValueError(f"state needs 6 components, got {a.shape}")
        return cls(*(float(v) for v in a))


@dataclass(frozen=True)
class Region:
    cx: float
    cy: float
    w: float
    h: float

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        """``(x0, x1, y0, y1)`` of the box."""
        return (self.cx - self.w / 2, self.cx + self.w / 2, self.cy - self.h / 2, self.cy + self.h / 2)

    def pixel_slices(self) -> tuple[slice, slice]:
        """Row and column slices of the pixels covered by the region."""
        x0, x1, y0, y1 = self.bounds
        return (
            slice(_first_pixel(y0), _first_pixel(y1)),
            slice(_first_pixel(x0), _first_pixel(x1)),
        )


def _first_pixel(edge: float) -> int:
    # index of the first pixel whose centre is >= edge
    return int(math.ceil(edge - 0.5))


@dataclass(frozen=True, eq=False)
class Frame:
    """An 8-bit RGB raster, ``pixels`` has shape ``(height, width, 3)``."""

    pixels: np.ndarray
    index: int = 0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"expected (height, width, 3) pixels, got {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("frame must have at least one pixel")
        if px.dtype != np.uint8:
            raise ValueError(f"expected uint8 pixels, got {px.dtype}")
        px = np.ascontiguousarray(px)
        if px is self.pixels:
            px = px.copy()
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape[:2]

    def with_index(self, index: int) -> "Frame":
        return Frame(self.pixels, index)

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return self.index == other.index and np.array_equal(self.pixels, other.pixels)


def region_from_state(s: StateVector) -> Region:
    return Region(
        s.x,
        s.y,
        max(1.0, round_half_away(s.hx)),
        max(1.0, round_half_away(s.hy)),
    )


def _clamp_interval(lo: float, hi: float, limit: int) -> tuple[float, float]:
    a, b = max(lo, 0.0), min(hi, float(limit))
    if b - a >= 1.0:
        return a, b
    # empty or sub-pixel intersection: snap to the nearest pixel inside
    mid = min(max((lo + hi) / 2, 0.5), limit - 0.5)
    p = float(math.floor(mid))
    return p, p + 1.0


def clamp_region(r: Region, frame_w: int, frame_h: int) -> Region:
    """Intersect ``r`` with the frame.

    An empty (or thinner than one pixel) intersection collapses onto the
    nearest pixel inside the frame along that axis.
    """
    if frame_w < 1 or frame_h < 1:
        raise ValueError("frame dimensions must be >= 1")
    x0, x1, y0, y1 = r.bounds
    eps = 1e-9
    # tolerance absorbs the rounding of re-deriving edges from (cx, w)
    if (
        r.w >= 1 and r.h >= 1
        and x0 >= -eps and y0 >= -eps
        and x1 <= frame_w + eps and y1 <= frame_h + eps
    ):
        return r
    x0, x1 = _clamp_interval(x0, x1, frame_w)
    y0, y1 = _clamp_interval(y0, y1, frame_h)
    return Region((x0 + x1) / 2, (y0 + y1) / 2, x1 - x0, y1 - y0)


def clamp_boxes(states: np.ndarray, frame_w: int, frame_h: int) -> np.ndarray:
    """Vectorised ``clamp_region(region_from_state(s))`` for an ``(N, 6)`` array.

    Returns an ``(N, 4)`` array of clamped ``(cx, cy, w, h)`` rows, bitwise
    identical to the fields of the scalar result.
    """
    states = np.asarray(states, dtype=np.float64)
    eps = 1e-9
    sizes = (
        np.maximum(1.0, round_half_away(states[:, 4])),
        np.maximum(1.0, round_half_away(states[:, 5])),
    )
    edges, inside = [], np.ones(states.shape[0], dtype=bool)
    for c, size, limit in ((states[:, 0], sizes[0], frame_w), (states[:, 1], sizes[1], frame_h)):
        lo, hi = c - size / 2, c + size / 2
        inside &= (lo >= -eps) & (hi <= limit + eps)
        a, b = np.maximum(lo, 0.0), np.minimum(hi, float(limit))
        snap = np.floor(np.clip((lo + hi) / 2, 0.5, limit - 0.5))
        thin = (b - a) < 1.0
        edges.append((np.where(thin, snap, a), np.where(thin, snap + 1.0, b)))
    out = np.empty((states.shape[0], 4))
    for k, ((a, b), c, size) in enumerate(zip(edges, (states[:, 0], states[:, 1]), sizes)):
        out[:, k] = np.where(inside, c, (a + b) / 2)
        out[:, k + 2] = np.where(inside, size, b - a)
    return out


@dataclass(frozen=True)
class TrackerConfig:
    n_particles: int = 200
    sigma_diag: tuple[float, ...] = DEFAULT_SIGMA_DIAG
    sigma_color: float = 0.1
    sigma_texture: float = 0.1
    alpha: float = 0.9
    fusion_mode: str = "bma"
    slump_threshold: float = 0.15
    ess_fraction: float = 0.5
    rng_seed: int = 0
    # off by default: the transition mean is the previous state itself
    constant_velocity: bool = False
    slump_cooldown: int = 10

    def __post_init__(self):
        object.__setattr__(self, "sigma_diag", tuple(float(s) for s in self.sigma_diag))
        problems = []
        if len(self.sigma_diag) != 6 or any(not (s >= 0 and math.isfinite(s)) for s in self.sigma_diag):
            problems.append("sigma_diag must be 6 finite non-negative numbers")
        if not 0 < self.alpha < 1:
            problems.append("alpha must lie in (0, 1)")
        if not self.sigma_color > 0:
            problems.append("sigma_color must be > 0")
        if not self.sigma_texture > 0:
            problems.append("sigma_texture must be > 0")
        if self.n_particles < 1:
            problems.append("n_particles must be >= 1")
        if not 0 < self.slump_threshold < 1:
            problems.append("slump_threshold must lie in (0, 1)")
        if not 0 < self.ess_fraction <= 1:
            problems.append("ess_fraction must lie in (0, 1]")
        if self.fusion_mode not in FUSION_MODES:
            problems.append(f"fusion_mode must be one of {', '.join(FUSION_MODES)}")
        if self.slump_cooldown < 0:
            problems.append("slump_cooldown must be >= 0")
        if problems:
            raise ConfigError("; ".join(problems))

    @property
    def models(self) -> tuple[str, ...]:
        """Observation models driven by this configuration, in weight-row order."""
        if self.fusion_mode == "color-only":
            return ("color",)
        if self.fusion_mode == "texture-only":
            return ("texture",)
        return ("color", "texture")

    def replace(self, **changes) -> "TrackerConfig":
        return dataclasses.replace(self, **changes)


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_CONFIG_PARSERS = {
    "n_particles": int,
    "sigma_diag": lambda s: tuple(float(v) for v in s.split(",")),
    "sigma_color": float,
    "sigma_texture": float,
    "alpha": float,
    "fusion_mode": str.strip,
    "slump_threshold": float,
    "ess_fraction": float,
    "rng_seed": int,
    "constant_velocity": _parse_bool,
    "slump_cooldown": int,
}


def parse_config(text: str) -> TrackerConfig:
    """Parse a flat ``key = value`` configuration.

    Blank lines and lines starting with ``#`` are ignored.  Unknown or
    repeated keys raise :class:`ConfigError`.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        if key not in _CONFIG_PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _CONFIG_PARSERS[key](value.strip())
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    return TrackerConfig(**values)


def load_config(path: Union[str, Path]) -> TrackerConfig:
    return parse_config(Path(path).read_text())


def format_config(cfg: TrackerConfig) -> str:
    """Inverse of :func:`parse_config`."""
    lines = []
    for f in dataclasses.fields(cfg):
        v = getattr(cfg, f.name)
        if f.name == "sigma_diag":
            v = ",".join(repr(s) for s in v)
        elif isinstance(v, bool):
            v = "true" if v else "false"
        lines.append(f"{f.name}={v}")
    return "\n".join(lines) + "\n"
