"""Floodwater depth from paired pre/post-flood pole measurements.

The visible pole length in each photo, divided by that photo's pixel
scale, gives a physical length; the pre/post difference is the water
depth. Negative raw differences (photo misalignment) clamp to zero.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from datetime import datetime

from .errors import ValidationError
from .geo import GeoPoint

METERS_PER_INCH = 0.0254


class ObservationSource(enum.Enum):
    POLE_PAIR = "pole_pair"
    DIRECT = "direct"


@dataclass(frozen=True)
class PolePairMeasurement:
    """Pre/post-flood visible pole lengths with per-photo pixel scales.

    pre length below post length is legal input (the estimate clamps);
    scales must be strictly positive.
    """

    id: str
    location: GeoPoint
    pre_len_px: float
    pre_scale_px_per_m: float
    post_len_px: float
    post_scale_px_per_m: float
    timestamp: datetime

    def __post_init__(self):
        if not (math.isfinite(self.pre_len_px) and self.pre_len_px > 0):
            raise ValidationError(f"pre_len_px must be > 0, got {self.pre_len_px}")
        if not (math.isfinite(self.post_len_px) and self.post_len_px >= 0):
            raise ValidationError(f"post_len_px must be >= 0, got {self.post_len_px}")
        for name in ("pre_scale_px_per_m", "post_scale_px_per_m"):
            scale = getattr(self, name)
            if not (math.isfinite(scale) and scale > 0):
                raise ValidationError(f"{name} must be > 0, got {scale}")


@dataclass(frozen=True)
class DepthObservation:
    """A georeferenced floodwater depth point."""

    id: str
    location: GeoPoint
    depth_m: float
    timestamp: datetime
    source: ObservationSource = ObservationSource.DIRECT

    def __post_init__(self):
        if not (math.isfinite(self.depth_m) and self.depth_m >= 0):
            raise ValidationError(f"depth_m must be finite and >= 0, got {self.depth_m}")


def estimate_depth(m: PolePairMeasurement) -> DepthObservation:
    """Depth observation from a pole pair.

    depth = max(0, pre_len_px/pre_scale - post_len_px/post_scale), in
    meters; location and timestamp carry through.
    """
    if m.pre_scale_px_per_m <= 0 or m.post_scale_px_per_m <= 0:
        raise ValidationError("pixel scales must be strictly positive")
    raw = m.pre_len_px / m.pre_scale_px_per_m - m.post_len_px / m.post_scale_px_per_m
    return DepthObservation(
        id=m.id,
        location=m.location,
        depth_m=max(0.0, raw),
        timestamp=m.timestamp,
        source=ObservationSource.POLE_PAIR,
    )


def rmse(estimates: list[float], truths: list[float]) -> float:
    """Root mean square error between paired estimate/truth values."""
    if len(estimates) != len(truths):
        raise ValidationError(
            f"length mismatch: {len(estimates)} estimates vs {len(truths)} truths")
    if not estimates:
        raise ValidationError("rmse needs at least one pair")
    total = 0.0
    for e, t in zip(estimates, truths):
        total += (e - t) ** 2
    return math.sqrt(total / len(estimates))


def inches_to_meters(inches: float) -> float:
    return inches * METERS_PER_INCH


def meters_to_inches(meters: float) -> float:
    return meters / METERS_PER_INCH
