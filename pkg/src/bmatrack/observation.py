"""Likelihood models and the versioned object template."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Frame, Region
from .errors import AllZeroWeights, RegionTooSmall
from .features import (
    bhattacharyya_distance,
    color_distances,
    extract_color_histogram,
    extract_lbp_histogram,
    lbp_distances,
)

# keeps degenerate regions from zeroing a whole weight row
LIKELIHOOD_FLOOR = 1e-12
FEATURES = ("color", "texture")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Template:
    """Reference colour distribution and LBP histogram of the tracked object.

    ``origin_frame`` is the frame of the most recent (re)build and
    ``updated_at`` maps a feature name to the frame where it was last
    refreshed after initialisation.
    """

    color_ref: np.ndarray
    texture_ref: np.ndarray
    version: int = 0
    origin_frame: int = 0
    updated_at: tuple = (None, None)

    def __post_init__(self):
        object.__setattr__(self, "color_ref", _frozen(self.color_ref))
        object.__setattr__(self, "texture_ref", _frozen(self.texture_ref))
        object.__setattr__(self, "updated_at", tuple(self.updated_at))

    def reference(self, feature: str) -> np.ndarray:
        if feature == "color":
            return self.color_ref
        if feature == "texture":
            return self.texture_ref
        raise ValueError(f"unknown feature {feature!r}")

    def last_update(self, feature: str) -> Optional[int]:
        return self.updated_at[FEATURES.index(feature)]


def gaussian_likelihood(d, sigma: float):
    """Gaussian kernel of a distance, floored at :data:`LIKELIHOOD_FLOOR`.

    NaN distances (regions the extractor rejected) map to the floor.
    """
    d = np.asarray(d, dtype=np.float64)
    lik = np.exp(-(d * d) / (2.0 * sigma * sigma)) / (math.sqrt(2.0 * math.pi) * sigma)
    lik = np.where(np.isnan(lik), LIKELIHOOD_FLOOR, np.maximum(lik, LIKELIHOOD_FLOOR))
    return lik if lik.ndim else float(lik)


def color_likelihood(frame: Frame, region: Region, template: Template, sigma_color: float) -> float:
    try:
        hist = extract_color_histogram(frame, region)
    except (AllZeroWeights, RegionTooSmall):
        return LIKELIHOOD_FLOOR
    return gaussian_likelihood(bhattacharyya_distance(hist, template.color_ref), sigma_color)


def texture_likelihood(frame: Frame, region: Region, template: Template, sigma_texture: float) -> float:
    try:
        hist = extract_lbp_histogram(frame, region)
    except (AllZeroWeights, RegionTooSmall):
        return LIKELIHOOD_FLOOR
    return gaussian_likelihood(bhattacharyya_distance(hist, template.texture_ref), sigma_texture)


def batch_likelihood(frame: Frame, boxes: np.ndarray, template: Template, feature: str, sigma: float) -> np.ndarray:
    """Likelihood of each clamped ``(cx, cy, w, h)`` box under one feature model."""
    if feature == "color":
        d = color_distances(frame, boxes, template.color_ref)
    elif feature == "texture":
        d = lbp_distances(frame, boxes, template.texture_ref)
    else:
        raise ValueError(f"unknown feature {feature!r}")
    return gaussian_likelihood(d, sigma)


def build_template(frame: Frame, region: Region) -> Template:
    return Template(
        color_ref=extract_color_histogram(frame, region),
        texture_ref=extract_lbp_histogram(frame, region),
        version=0,
        origin_frame=frame.index,
    )


def update_template_feature(template: Template, frame: Frame, region: Region, which: str) -> Template:
    """Rebuild one reference histogram from ``region``; the other is kept."""
    if which == "color":
        changes = {"color_ref": extract_color_histogram(frame, region)}
    elif which == "texture":
        changes = {"texture_ref": extract_lbp_histogram(frame, region)}
    else:
        raise ValueError(f"unknown feature {which!r}")
    updated_at = list(template.updated_at)
    updated_at[FEATURES.index(which)] = frame.index
    return dataclasses.replace(
        template,
        version=template.version + 1,
        origin_frame=frame.index,
        updated_at=tuple(updated_at),
        **changes,
    )
