"""8-bit raster images, brightness extraction, file I/O and haze synthesis.

Hazy images follow the atmospheric scattering model: each pixel of the hazy
image is a convex blend of the clean scene radiance and a global airlight
color, ``hazy = clean * t + airlight * (1 - t)``, where ``t`` is the per-pixel
transmission (the fraction of scene light that survives scattering). The
synthesizer here is the ground-truth generator used by tests and demos; the
augmentation pipeline only ever manipulates that blend, so its outputs stay
valid hazy images.

All pixel data is 8-bit, row-major, top-left origin, channel order R,G,B.
Intermediate arithmetic is done in double precision on the [0, 255] scale and
quantized only when an image is materialized (round half away from zero).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

LEVELS = 256

SUPPORTED_LOAD_FORMATS = ("PNG", "JPEG")


class ImageFormatError(Exception):
    """The file is not in a supported image format (PNG or JPEG)."""


class ImageDecodeError(Exception):
    """The file looks like a supported format but its data is corrupt."""


def quantize(values: np.ndarray) -> np.ndarray:
    """Quantize real-valued intensities to levels 0..255.

    Rounds half away from zero (inputs are nonnegative here, so this is
    ``floor(x + 0.5)``) and clamps to the 8-bit range.
    """
    return np.clip(np.floor(np.asarray(values, dtype=np.float64) + 0.5), 0, 255).astype(np.uint8)


def _freeze(data: np.ndarray) -> np.ndarray:
    out = np.array(data, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class RgbImage:
    """Immutable 8-bit RGB raster with shape (height, width, 3)."""

    data: np.ndarray

    def __post_init__(self) -> None:
        data = np.asarray(self.data)
        if data.ndim != 3 or data.shape[2] != 3:
            raise ValueError(f"expected an (H, W, 3) array, got shape {data.shape}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError("image must contain at least one pixel")
        if data.dtype != np.uint8:
            raise ValueError(f"expected uint8 pixel data, got {data.dtype}")
        object.__setattr__(self, "data", _freeze(data))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def pixel_count(self) -> int:
        return self.data.shape[0] * self.data.shape[1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RgbImage):
            return NotImplemented
        return np.array_equal(self.data, other.data)


@dataclass(frozen=True, eq=False)
class BrightnessImage:
    """Immutable single-channel 8-bit raster with shape (height, width)."""

    data: np.ndarray

    def __post_init__(self) -> None:
        data = np.asarray(self.data)
        if data.ndim != 2:
            raise ValueError(f"expected an (H, W) array, got shape {data.shape}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError("image must contain at least one pixel")
        if data.dtype != np.uint8:
            raise ValueError(f"expected uint8 pixel data, got {data.dtype}")
        object.__setattr__(self, "data", _freeze(data))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def pixel_count(self) -> int:
        return self.data.shape[0] * self.data.shape[1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BrightnessImage):
            return NotImplemented
        return np.array_equal(self.data, other.data)


@dataclass(frozen=True, eq=False)
class SyntheticHazeParams:
    """Airlight color plus a per-pixel transmission map in [0, 1]."""

    airlight: tuple[int, int, int]
    transmission: np.ndarray

    def __post_init__(self) -> None:
        airlight = tuple(int(v) for v in self.airlight)
        if len(airlight) != 3 or any(v < 0 or v > 255 for v in airlight):
            raise ValueError(f"airlight must be three levels in 0..255, got {self.airlight}")
        t = np.asarray(self.transmission, dtype=np.float64)
        if t.ndim != 2:
            raise ValueError(f"transmission must be an (H, W) map, got shape {t.shape}")
        if np.any(t < 0.0) or np.any(t > 1.0):
            raise ValueError("transmission values must lie in [0, 1]")
        object.__setattr__(self, "airlight", airlight)
        object.__setattr__(self, "transmission", _freeze(t))

    @classmethod
    def from_depth(
        cls,
        airlight: tuple[int, int, int],
        scatter_coefficient: float,
        depth: np.ndarray,
    ) -> "SyntheticHazeParams":
        """Build transmission from scene depth: ``t = exp(-scatter * depth)``."""
        if scatter_coefficient < 0:
            raise ValueError("scatter_coefficient must be nonnegative")
        depth = np.asarray(depth, dtype=np.float64)
        if np.any(depth < 0):
            raise ValueError("depth values must be nonnegative")
        return cls(airlight, np.exp(-scatter_coefficient * depth))


def to_brightness(img: RgbImage) -> BrightnessImage:
    """Per-pixel max over R,G,B (the HSV value channel)."""
    return BrightnessImage(img.data.max(axis=2))


def synthesize_hazy(clean: RgbImage, params: SyntheticHazeParams) -> RgbImage:
    """Blend a clean image with airlight through a transmission map.

    Output is ``round(clean * t + airlight * (1 - t))`` per pixel and channel,
    computed in double precision then quantized. ``t = 1`` returns the clean
    image unchanged; ``t = 0`` returns a constant airlight image.
    """
    t = params.transmission
    if t.shape != (clean.height, clean.width):
        raise ValueError(
            f"transmission shape {t.shape} does not match image {clean.height}x{clean.width}"
        )
    scene = clean.data.astype(np.float64)
    light = np.array(params.airlight, dtype=np.float64)
    blended = scene * t[:, :, None] + light * (1.0 - t[:, :, None])
    return RgbImage(quantize(blended))


def load_image(path) -> RgbImage:
    """Load a PNG or JPEG file as an 8-bit RGB image.

    Grayscale inputs are replicated across channels. 16-bit PNGs are reduced
    to 8 bits by keeping the high byte of each sample. Alpha channels, color
    management and other formats are unsupported and rejected.
    """
    try:
        handle = Image.open(path)
    except UnidentifiedImageError as exc:
        raise ImageFormatError(f"{path}: not a recognizable PNG or JPEG file") from exc
    with handle as im:
        if im.format not in SUPPORTED_LOAD_FORMATS:
            raise ImageFormatError(f"{path}: unsupported format {im.format!r}")
        try:
            im.load()
        except (OSError, SyntaxError) as exc:
            raise ImageDecodeError(f"{path}: corrupt {im.format} data ({exc})") from exc
        if im.mode in ("RGBA", "LA", "PA", "P"):
            raise ImageFormatError(f"{path}: alpha/palette images are unsupported (mode {im.mode})")
        arr = np.asarray(im)
    if arr.dtype == np.uint16:
        arr = (arr >> 8).astype(np.uint8)
    elif arr.dtype == np.int32:
        # Pillow exposes some 16-bit grayscale PNGs as 32-bit integer rasters.
        arr = (np.clip(arr, 0, 65535).astype(np.uint16) >> 8).astype(np.uint8)
    if arr.dtype != np.uint8:
        raise ImageFormatError(f"{path}: unsupported sample type {arr.dtype}")
    if arr.ndim == 2:
        arr = np.repeat(arr[:, :, None], 3, axis=2)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ImageFormatError(f"{path}: expected 1 or 3 channels, got shape {arr.shape}")
    return RgbImage(arr)


def save_image(img: RgbImage, path) -> None:
    """Write an image as PNG. Saving then loading is a lossless round trip."""
    if str(path).lower().endswith((".jpg", ".jpeg")):
        raise ValueError("only PNG output is supported")
    Image.fromarray(np.asarray(img.data), mode="RGB").save(path, format="PNG")
