"""Target haze densities: interpolation sets over a domain and randomization.

A target domain is a set of K densities, one per hazy image from the domain
we want to imitate. Mixing their quantile functions with simplex weights
sweeps out every Wasserstein interpolation of the members, so sampling
weights and averaging quantiles yields an unlimited family of realistic
density targets. When no target domain is available at all, targets are
randomized instead: a handful of sorted uniform control points defines a
monotone piecewise-linear quantile function, which is rediscretized to a
histogram. The randomized scheme is a pragmatic stand-in chosen for this
toolkit, not a published recipe.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .density import (
    DEFAULT_GRID,
    DensityHistogram,
    QuantileFunction,
    estimate_density,
    quantile_to_density,
    to_quantile,
)
from .image import BrightnessImage, _freeze

_WEIGHT_TOLERANCE = 1e-9

DOMAIN_MANIFEST_NAME = "target_domain.json"

DOMAIN_MANIFEST_VERSION = 1


@dataclass(frozen=True, eq=False)
class SimplexWeights:
    """Nonnegative weights summing to 1."""

    theta: np.ndarray

    def __post_init__(self) -> None:
        theta = np.asarray(self.theta, dtype=np.float64)
        if theta.ndim != 1 or theta.size < 1:
            raise ValueError("theta must be a nonempty vector")
        if np.any(theta < 0):
            raise ValueError("theta components must be nonnegative")
        if abs(float(theta.sum()) - 1.0) > _WEIGHT_TOLERANCE:
            raise ValueError(f"theta must sum to 1, got {theta.sum()!r}")
        object.__setattr__(self, "theta", _freeze(theta))

    def __len__(self) -> int:
        return self.theta.size


@dataclass(frozen=True, eq=False)
class TargetDomain:
    """Quantile functions of the target-domain densities, one per image."""

    quantiles: tuple[QuantileFunction, ...]
    source_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        quantiles = tuple(self.quantiles)
        source_ids = tuple(str(s) for s in self.source_ids)
        if len(quantiles) < 1:
            raise ValueError("a target domain needs at least one member")
        if len(source_ids) != len(quantiles):
            raise ValueError("source_ids and quantiles must match in length")
        grids = {q.grid_size for q in quantiles}
        if len(grids) != 1:
            raise ValueError(f"members must share one quantile grid, got sizes {sorted(grids)}")
        object.__setattr__(self, "quantiles", quantiles)
        object.__setattr__(self, "source_ids", source_ids)

    @property
    def size(self) -> int:
        return len(self.quantiles)

    @property
    def grid_size(self) -> int:
        return self.quantiles[0].grid_size


def build_target_domain(
    brightness_images,
    source_ids=None,
    grid_size: int = DEFAULT_GRID,
) -> TargetDomain:
    """Estimate each image's density and keep its quantile function."""
    images = list(brightness_images)
    if not images:
        raise ValueError("cannot build a target domain from zero images")
    if source_ids is None:
        source_ids = [str(i) for i in range(len(images))]
    quantiles = tuple(to_quantile(estimate_density(b), grid_size) for b in images)
    return TargetDomain(quantiles, tuple(source_ids))


def interpolate_target(domain: TargetDomain, w: SimplexWeights) -> DensityHistogram:
    """Wasserstein interpolation of the domain members.

    The result's quantile function is the theta-weighted average of the
    member quantile functions; it is rediscretized back to 256 levels so the
    alignment path can consume it.
    """
    if len(w) != domain.size:
        raise ValueError(f"got {len(w)} weights for a domain of {domain.size} members")
    stacked = np.stack([q.values for q in domain.quantiles])
    combined = np.clip(w.theta @ stacked, 0.0, 255.0)
    # Exact arithmetic keeps the weighted average monotone; undo float jitter.
    combined = np.maximum.accumulate(combined)
    return quantile_to_density(QuantileFunction(domain.grid_size, combined))


def sample_theta(count: int, seed) -> SimplexWeights:
    """Uniform draw from the (count-1)-simplex (flat Dirichlet), seeded."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    return SimplexWeights(rng.dirichlet(np.ones(count)))


def target_from_control_points(
    points,
    grid_size: int = DEFAULT_GRID,
) -> DensityHistogram:
    """Density whose quantile function linearly interpolates sorted anchors.

    ``points`` are nondecreasing values in [0, 255] placed at equally spaced
    grid positions; the quantile between anchors is linear.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 1 or points.size < 2:
        raise ValueError("need at least two control points")
    if np.any(np.diff(points) < 0):
        raise ValueError("control points must be nondecreasing")
    if points[0] < 0 or points[-1] > 255:
        raise ValueError("control points must lie in [0, 255]")
    anchors = np.linspace(0.0, grid_size - 1.0, points.size)
    values = np.interp(np.arange(grid_size, dtype=np.float64), anchors, points)
    return quantile_to_density(QuantileFunction(grid_size, values))


def random_target(
    seed,
    control_points: int = 8,
    grid_size: int = DEFAULT_GRID,
) -> DensityHistogram:
    """Randomized density target from sorted uniform control points."""
    points = draw_control_points(seed, control_points)
    return target_from_control_points(points, grid_size)


def draw_control_points(seed, control_points: int) -> np.ndarray:
    """Sorted uniform draws in [0, 255] used to randomize a target."""
    if control_points < 2:
        raise ValueError("control_points must be >= 2")
    rng = np.random.default_rng(seed)
    return np.sort(rng.uniform(0.0, 255.0, size=control_points))


def save_target_domain(directory, histograms, source_ids, grid_size: int = DEFAULT_GRID) -> None:
    """Persist a domain as per-image histogram sidecars plus an index manifest."""
    histograms = list(histograms)
    source_ids = [str(s) for s in source_ids]
    if len(histograms) != len(source_ids):
        raise ValueError("histograms and source_ids must match in length")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    sidecars = []
    for sid, hist in zip(source_ids, histograms):
        name = f"{sid}.density.json"
        hist.save(directory / name)
        sidecars.append(name)
    manifest = {
        "version": DOMAIN_MANIFEST_VERSION,
        "grid_size": grid_size,
        "source_ids": source_ids,
        "sidecars": sidecars,
    }
    (directory / DOMAIN_MANIFEST_NAME).write_text(json.dumps(manifest, sort_keys=True, indent=2))


def load_target_domain(directory) -> TargetDomain:
    """Rebuild a persisted domain by re-quantiling its histogram sidecars."""
    directory = Path(directory)
    manifest = json.loads((directory / DOMAIN_MANIFEST_NAME).read_text())
    if manifest.get("version") != DOMAIN_MANIFEST_VERSION:
        raise ValueError(f"unsupported domain manifest version {manifest.get('version')!r}")
    grid_size = int(manifest["grid_size"])
    quantiles = tuple(
        to_quantile(DensityHistogram.load(directory / name), grid_size)
        for name in manifest["sidecars"]
    )
    return TargetDomain(quantiles, tuple(manifest["source_ids"]))
