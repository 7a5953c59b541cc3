"""Haze density alignment: reshape a hazy image's brightness distribution.

Given a hazy image, its haze-free counterpart and the airlight, any per-pixel
convex mix of the three is again a valid hazy image with a modified
transmission map. Alignment picks the mix that pushes the hazy image's
brightness histogram onto a requested target histogram:

1. Order the pixels strictly (value, then means over growing windows, the
   exact-histogram-specification recipe) so each rank can be assigned a level.
2. Apportion the target histogram into integer per-level pixel counts and
   hand the levels out in rank order, producing a brightness prototype whose
   histogram matches the target exactly.
3. Solve for per-pixel mix weights in closed form: darken toward the clean
   image where the prototype sits below the hazy brightness, brighten toward
   the airlight where it sits above. Weights are clamped to the feasible set
   and at most one direction is active per pixel.
4. Compose the output image channelwise with the solved weights.

The scalar variants at the end collapse the same idea to one global mix
ratio chosen from mean brightness alone; they exist for ablation comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .airlight import AtmosphericLight
from .density import (
    DEFAULT_GRID,
    DensityHistogram,
    estimate_density,
    scalar_density,
    wasserstein,
)
from .image import BrightnessImage, LEVELS, RgbImage, _freeze, quantize, to_brightness

ORDERING_WINDOWS = (3, 5, 7, 9, 11)

_SUM_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class PixelRanking:
    """Strict total order over pixel indices (ascending brightness rank)."""

    order: np.ndarray
    key_depth: int

    def __post_init__(self) -> None:
        order = np.asarray(self.order)
        if order.ndim != 1:
            raise ValueError("order must be a flat index vector")
        check = np.zeros(order.size, dtype=bool)
        check[order] = True
        if not check.all():
            raise ValueError("order must be a permutation of all pixel indices")
        object.__setattr__(self, "order", _freeze(order.astype(np.intp)))
        object.__setattr__(self, "key_depth", int(self.key_depth))


@dataclass(frozen=True, eq=False)
class MixWeights:
    """Per-pixel mix coefficients toward the clean image (alpha) and airlight (beta).

    Feasibility: both maps in [0, 1] with alpha + beta <= 1 pointwise. The
    closed-form solver additionally never activates both directions at one
    pixel; iterative solvers may.
    """

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self) -> None:
        alpha = np.asarray(self.alpha, dtype=np.float64)
        beta = np.asarray(self.beta, dtype=np.float64)
        if alpha.ndim != 2 or alpha.shape != beta.shape:
            raise ValueError("alpha and beta must be (H, W) maps of equal shape")
        if np.any(alpha < 0) or np.any(beta < 0):
            raise ValueError("mix weights must be nonnegative")
        if np.any(alpha + beta > 1.0 + _SUM_TOLERANCE):
            raise ValueError("alpha + beta must not exceed 1")
        object.__setattr__(self, "alpha", _freeze(alpha))
        object.__setattr__(self, "beta", _freeze(beta))

    @property
    def exclusive(self) -> bool:
        """True when no pixel mixes toward clean and airlight at once."""
        return not np.any((self.alpha > 0) & (self.beta > 0))


@dataclass(frozen=True, eq=False)
class DamixSample:
    """One augmented image with the weights and densities that produced it."""

    image: RgbImage
    weights: MixWeights
    achieved_density: DensityHistogram
    target_density: DensityHistogram
    residual_distance: float


def _window_means(values: np.ndarray) -> list[np.ndarray]:
    # Integer window sums via a padded integral image keep the means exact
    # (int64 sums, one correctly-rounded division); windows clamp at borders.
    h, w = values.shape
    integral = np.zeros((h + 1, w + 1), dtype=np.int64)
    integral[1:, 1:] = values.astype(np.int64).cumsum(axis=0).cumsum(axis=1)
    rows = np.arange(h)[:, None]
    cols = np.arange(w)[None, :]
    means = []
    for size in ORDERING_WINDOWS:
        reach = size // 2
        r0 = np.clip(rows - reach, 0, h)
        r1 = np.clip(rows + reach + 1, 0, h)
        c0 = np.clip(cols - reach, 0, w)
        c1 = np.clip(cols + reach + 1, 0, w)
        sums = integral[r1, c1] - integral[r0, c1] - integral[r1, c0] + integral[r0, c0]
        area = (r1 - r0) * (c1 - c0)
        means.append(sums / area)
    return means


def rank_pixels(b: BrightnessImage) -> PixelRanking:
    """Strictly order pixels by value, then local means over growing windows.

    Residual ties (constant regions) fall back to raster order, so the order
    is a deterministic total order on every input.
    """
    means = _window_means(b.data)
    # lexsort: last key is primary; stability supplies the raster tie-break.
    keys = tuple(m.ravel() for m in reversed(means)) + (b.data.ravel(),)
    order = np.lexsort(keys)
    return PixelRanking(order, key_depth=1 + len(ORDERING_WINDOWS))


def apportion_counts(bins: np.ndarray, total: int) -> np.ndarray:
    """Integer per-level pixel counts for a histogram, summing exactly to total.

    Largest-remainder rule: floor the real quotas, then hand the remaining
    pixels to the largest fractional parts (ties to the lower level). This
    minimizes per-bin mass error; in transport distance the apportioned
    histogram can sit a few levels away from a smooth target when the pixel
    budget is small (256 levels sharing ~total fractional quotas), which
    bounds how closely any alignment of `total` pixels can approach such a
    target.
    """
    bins = np.asarray(bins, dtype=np.float64)
    quotas = bins / bins.sum() * total
    counts = np.floor(quotas).astype(np.int64)
    remainder = int(total - counts.sum())
    if remainder > 0:
        fractional = quotas - counts
        take = np.lexsort((np.arange(bins.size), -fractional))[:remainder]
        counts[take] += 1
    return counts


def build_prototype(
    b: BrightnessImage,
    ranking: PixelRanking,
    target: DensityHistogram,
) -> BrightnessImage:
    """Brightness image with exactly the target histogram (integer-apportioned).

    The lowest-ranked pixels receive level 0's quota, the next block level 1's,
    and so on; the output histogram equals the apportioned counts exactly.
    """
    if ranking.order.size != b.pixel_count:
        raise ValueError(
            f"ranking covers {ranking.order.size} pixels but image has {b.pixel_count}"
        )
    counts = apportion_counts(target.bins, b.pixel_count)
    levels = np.repeat(np.arange(LEVELS, dtype=np.uint8), counts)
    flat = np.empty(b.pixel_count, dtype=np.uint8)
    flat[ranking.order] = levels
    return BrightnessImage(flat.reshape(b.data.shape))


def solve_mix_weights(
    hazy_b: BrightnessImage,
    clean_b: BrightnessImage,
    airlight_b: int,
    prototype: BrightnessImage,
) -> MixWeights:
    """Closed-form feasible weights moving hazy brightness onto the prototype.

    Where the prototype is not above the hazy brightness, darken toward the
    clean image: ``alpha = min((hazy - proto) / (hazy - clean), 1)``.
    Otherwise brighten toward the airlight:
    ``beta = min((proto - hazy) / (airlight - hazy), 1)``. A zero or negative
    denominator means the pixel cannot move in that direction, so its weight
    is forced to 0.
    """
    if hazy_b.data.shape != clean_b.data.shape or hazy_b.data.shape != prototype.data.shape:
        raise ValueError("brightness images must share one shape")
    hazy = hazy_b.data.astype(np.float64)
    clean = clean_b.data.astype(np.float64)
    proto = prototype.data.astype(np.float64)
    alpha = np.zeros_like(hazy)
    beta = np.zeros_like(hazy)

    darken = hazy >= proto
    headroom = hazy - clean
    movable = darken & (headroom > 0)
    alpha[movable] = np.minimum((hazy - proto)[movable] / headroom[movable], 1.0)

    brighten = ~darken
    headroom = float(airlight_b) - hazy
    movable = brighten & (headroom > 0)
    beta[movable] = np.minimum((proto - hazy)[movable] / headroom[movable], 1.0)
    return MixWeights(alpha, beta)


def compose_damix(
    hazy: RgbImage,
    clean: RgbImage,
    airlight: AtmosphericLight,
    w: MixWeights,
) -> RgbImage:
    """Blend hazy, clean and airlight images with per-pixel weights.

    ``out = (1 - alpha - beta) * hazy + alpha * clean + beta * airlight`` per
    channel, in double precision, quantized at the end. The output is always
    another valid hazy rendering of the same scene: the blend only reshapes
    the transmission map.
    """
    if hazy.data.shape != clean.data.shape:
        raise ValueError("hazy and clean images must share one shape")
    if w.alpha.shape != (hazy.height, hazy.width):
        raise ValueError("weight maps must match the image shape")
    alpha = w.alpha[:, :, None]
    beta = w.beta[:, :, None]
    light = np.array(airlight.rgb, dtype=np.float64)
    blended = (
        (1.0 - alpha - beta) * hazy.data.astype(np.float64)
        + alpha * clean.data.astype(np.float64)
        + beta * light
    )
    return RgbImage(quantize(blended))


def damix(
    hazy: RgbImage,
    clean: RgbImage,
    airlight: AtmosphericLight,
    target: DensityHistogram,
    p: float = 1.0,
    grid_size: int = DEFAULT_GRID,
) -> DamixSample:
    """Full alignment: rank, build the prototype, solve weights, compose.

    Returns the augmented image together with the achieved density and its
    remaining transport distance to the target. The residual never exceeds
    the input's own distance to the target by more than twice the integer
    apportionment error, and strictly improves on it whenever the input sits
    more than a few levels away (every realistic augmentation target does).
    """
    if hazy.data.shape != clean.data.shape:
        raise ValueError("hazy and clean images must share one shape")
    hazy_b = to_brightness(hazy)
    clean_b = to_brightness(clean)
    ranking = rank_pixels(hazy_b)
    prototype = build_prototype(hazy_b, ranking, target)
    weights = solve_mix_weights(hazy_b, clean_b, airlight.brightness, prototype)
    image = compose_damix(hazy, clean, airlight, weights)
    achieved = estimate_density(to_brightness(image))
    residual = wasserstein(achieved, target, p, grid_size)
    return DamixSample(image, weights, achieved, target, residual)


def _write_pfm(path, values: np.ndarray) -> None:
    # Grayscale portable float map: "Pf" header, then float32 scanlines
    # bottom-to-top; negative scale marks little-endian data.
    data = np.asarray(values, dtype="<f4")
    with open(path, "wb") as handle:
        handle.write(f"Pf\n{data.shape[1]} {data.shape[0]}\n-1.0\n".encode("ascii"))
        handle.write(data[::-1].tobytes())


def save_debug_dump(sample: DamixSample, directory, stem: str) -> None:
    """Write a sample's diagnostics next to its image.

    Produces ``<stem>.alpha.pfm`` / ``<stem>.beta.pfm`` (32-bit float
    grayscale maps of the mix weights) and ``<stem>.achieved.density.json`` /
    ``<stem>.target.density.json`` sidecars.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    _write_pfm(directory / f"{stem}.alpha.pfm", sample.weights.alpha)
    _write_pfm(directory / f"{stem}.beta.pfm", sample.weights.beta)
    sample.achieved_density.save(directory / f"{stem}.achieved.density.json")
    sample.target_density.save(directory / f"{stem}.target.density.json")


def scalar_mixup(
    hazy: RgbImage,
    clean: RgbImage,
    airlight: AtmosphericLight,
    lam: float,
    mode: str,
) -> RgbImage:
    """Global mix with one scalar ratio: thinner blends toward the clean
    image, thicker toward a constant airlight image."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    if mode not in ("thinner", "thicker"):
        raise ValueError(f"mode must be 'thinner' or 'thicker', got {mode!r}")
    if hazy.data.shape != clean.data.shape:
        raise ValueError("hazy and clean images must share one shape")
    base = hazy.data.astype(np.float64)
    if mode == "thinner":
        other = clean.data.astype(np.float64)
    else:
        other = np.broadcast_to(np.array(airlight.rgb, dtype=np.float64), base.shape)
    return RgbImage(quantize(lam * base + (1.0 - lam) * other))


def scalar_damix(
    hazy: RgbImage,
    clean: RgbImage,
    airlight: AtmosphericLight,
    target_mean: float,
) -> RgbImage:
    """Scalar ablation of the alignment: match mean brightness only.

    Solves the one-dimensional mixing ratio that moves the mean brightness of
    the hazy image onto ``target_mean``, thinning below the current mean and
    thickening above it. Equal-mean degenerate denominators keep the image
    unchanged (ratio 1).
    """
    if not 0.0 <= target_mean <= 255.0:
        raise ValueError(f"target_mean must lie in [0, 255], got {target_mean}")
    hazy_mean = scalar_density(to_brightness(hazy))
    if target_mean < hazy_mean:
        clean_mean = scalar_density(to_brightness(clean))
        if hazy_mean == clean_mean:
            lam = 1.0
        else:
            lam = float(np.clip((target_mean - clean_mean) / (hazy_mean - clean_mean), 0.0, 1.0))
        return scalar_mixup(hazy, clean, airlight, lam, "thinner")
    light = float(airlight.brightness)
    if light == hazy_mean:
        lam = 1.0
    else:
        lam = float(np.clip((light - target_mean) / (light - hazy_mean), 0.0, 1.0))
    return scalar_mixup(hazy, clean, airlight, lam, "thicker")
