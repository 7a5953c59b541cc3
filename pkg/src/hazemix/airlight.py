"""Global atmospheric light estimation via the dark channel prior.

The dark channel of a haze-free outdoor image is close to zero almost
everywhere (some channel in every patch contains a very dark pixel), so in a
hazy image the dark channel is dominated by airlight and its brightest pixels
point at the most haze-opaque regions. The airlight color is the mean of the
hazy image over those pixels.

The alignment solver divides by ``airlight_brightness - hazy_brightness``, so
the estimate is lifted uniformly (hue-preserving) until its brightness covers
the brightest hazy pixel. Real estimates occasionally violate that bound;
after the lift, per-pixel violations are impossible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import minimum_filter

from .image import BrightnessImage, RgbImage

DEFAULT_PATCH = 15

TOP_PIXEL_DIVISOR = 1000  # top 0.1% of pixels by dark-channel value


@dataclass(frozen=True)
class AtmosphericLight:
    """Global airlight color; brightness is its channel maximum."""

    rgb: tuple[int, int, int]

    def __post_init__(self) -> None:
        rgb = tuple(int(v) for v in self.rgb)
        if len(rgb) != 3 or any(v < 0 or v > 255 for v in rgb):
            raise ValueError(f"airlight must be three levels in 0..255, got {self.rgb}")
        object.__setattr__(self, "rgb", rgb)

    @property
    def brightness(self) -> int:
        return max(self.rgb)


def dark_channel(img: RgbImage, patch: int = DEFAULT_PATCH) -> BrightnessImage:
    """Per-pixel minimum over channels and a patch neighborhood.

    The window is clamped at image borders (edge replication by the minimum
    filter is equivalent: replicated values duplicate in-window pixels).
    """
    if patch < 1 or patch % 2 == 0:
        raise ValueError(f"patch size must be odd and >= 1, got {patch}")
    channel_min = img.data.min(axis=2)
    return BrightnessImage(minimum_filter(channel_min, size=patch, mode="nearest"))


def estimate_airlight(
    hazy: RgbImage,
    patch: int = DEFAULT_PATCH,
    enforce_feasibility: bool = True,
) -> AtmosphericLight:
    """Estimate the airlight color of a hazy image.

    Selects the top 0.1% of pixels (at least one) by dark-channel value,
    breaking ties by raster order, and averages the hazy image over them
    per channel. With ``enforce_feasibility`` the result is then raised
    componentwise by the minimal uniform amount so that its brightness is at
    least the maximum brightness found in the image.
    """
    dark = dark_channel(hazy, patch).data.ravel()
    keep = max(1, dark.size // TOP_PIXEL_DIVISOR)
    # Stable sort on the negated values: descending, raster order on ties.
    chosen = np.argsort(-dark.astype(np.int16), kind="stable")[:keep]
    mean_rgb = hazy.data.reshape(-1, 3)[chosen].mean(axis=0, dtype=np.float64)
    rgb = np.floor(mean_rgb + 0.5).astype(np.int64)
    if enforce_feasibility:
        lift = int(hazy.data.max()) - int(rgb.max())
        if lift > 0:
            rgb = rgb + lift
    return AtmosphericLight((int(rgb[0]), int(rgb[1]), int(rgb[2])))
