"""Shared builders for the test suite."""

import hashlib
from pathlib import Path

import numpy as np

import hazemix as hm


def gray_image(values: np.ndarray) -> hm.RgbImage:
    """RGB image with identical channels, from a 2-D uint8 array."""
    values = np.asarray(values, dtype=np.uint8)
    return hm.RgbImage(np.repeat(values[:, :, None], 3, axis=2))


def dirac(level: int) -> hm.DensityHistogram:
    bins = np.zeros(256)
    bins[level] = 1.0
    return hm.DensityHistogram(bins, 1)


def hist_of_values(values) -> hm.DensityHistogram:
    """Density of an explicit list/array of levels (independent of the library
    counting path only in shape; used for fixture construction)."""
    values = np.asarray(values, dtype=np.uint8).ravel()
    return hm.estimate_density(hm.BrightnessImage(values.reshape(1, -1)))


def random_histogram(rng: np.random.Generator) -> hm.DensityHistogram:
    bins = rng.random(256)
    return hm.DensityHistogram(bins / bins.sum(), 1)


def synthetic_pair(
    rng: np.random.Generator,
    shape=(16, 16),
    clean_low=10,
    clean_high=100,
    t_low=0.25,
    t_high=0.85,
    light_low=210,
    light_high=255,
):
    """Channel-aligned synthetic instance: gray clean scene, gray airlight.

    Guarantees airlight brightness > hazy brightness > clean brightness
    strictly at every pixel for the default ranges.
    """
    clean_b = rng.integers(clean_low, clean_high, shape).astype(np.uint8)
    clean = gray_image(clean_b)
    t = rng.uniform(t_low, t_high, shape)
    level = int(rng.integers(light_low, light_high))
    light = hm.AtmosphericLight((level, level, level))
    hazy = hm.synthesize_hazy(clean, hm.SyntheticHazeParams(light.rgb, t))
    return hazy, clean, light, t


def color_synthetic_pair(rng: np.random.Generator, shape=(16, 16)):
    """ASM-consistent instance with a colorful clean image and gray airlight."""
    clean = hm.RgbImage(rng.integers(0, 160, (*shape, 3)).astype(np.uint8))
    t = rng.uniform(0.2, 0.9, shape)
    level = int(rng.integers(200, 256))
    light = hm.AtmosphericLight((level, level, level))
    hazy = hm.synthesize_hazy(clean, hm.SyntheticHazeParams(light.rgb, t))
    return hazy, clean, light, t


def tree_digest(root) -> dict:
    """Map of relative path -> sha256 of file bytes, for whole-tree equality."""
    root = Path(root)
    out = {}
    for path in sorted(root.rglob("*")):
        if path.is_file():
            out[str(path.relative_to(root))] = hashlib.sha256(path.read_bytes()).hexdigest()
    return out
