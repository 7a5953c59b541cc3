"""Haze-density-aware mixup augmentation for paired dehazing datasets."""

from .image import (
    BrightnessImage,
    ImageDecodeError,
    ImageFormatError,
    RgbImage,
    SyntheticHazeParams,
    load_image,
    quantize,
    save_image,
    synthesize_hazy,
    to_brightness,
)
from .density import (
    DEFAULT_GRID,
    DensityHistogram,
    QuantileFunction,
    estimate_density,
    quantile_to_density,
    scalar_density,
    to_quantile,
    wasserstein,
)
from .airlight import AtmosphericLight, dark_channel, estimate_airlight
from .targets import (
    SimplexWeights,
    TargetDomain,
    build_target_domain,
    draw_control_points,
    interpolate_target,
    load_target_domain,
    random_target,
    sample_theta,
    save_target_domain,
    target_from_control_points,
)
from .alignment import (
    DamixSample,
    MixWeights,
    PixelRanking,
    apportion_counts,
    build_prototype,
    compose_damix,
    damix,
    rank_pixels,
    save_debug_dump,
    scalar_damix,
    scalar_mixup,
    solve_mix_weights,
)
from .pgd import SolverConfig, pgd_solve
from .pipeline import (
    DatasetManifest,
    DatasetPair,
    RunConfig,
    cached_density,
    discover_pairs,
    load_pairs_file,
    pair_rng,
    run_augment,
)

__version__ = "0.1.0"

__all__ = [
    "AtmosphericLight",
    "BrightnessImage",
    "DamixSample",
    "DatasetManifest",
    "DatasetPair",
    "DensityHistogram",
    "DEFAULT_GRID",
    "ImageDecodeError",
    "ImageFormatError",
    "MixWeights",
    "PixelRanking",
    "QuantileFunction",
    "RgbImage",
    "RunConfig",
    "SimplexWeights",
    "SolverConfig",
    "SyntheticHazeParams",
    "TargetDomain",
    "apportion_counts",
    "build_prototype",
    "build_target_domain",
    "cached_density",
    "compose_damix",
    "damix",
    "dark_channel",
    "discover_pairs",
    "draw_control_points",
    "estimate_airlight",
    "estimate_density",
    "interpolate_target",
    "load_image",
    "load_pairs_file",
    "load_target_domain",
    "pair_rng",
    "pgd_solve",
    "quantile_to_density",
    "quantize",
    "random_target",
    "rank_pixels",
    "run_augment",
    "sample_theta",
    "save_debug_dump",
    "save_image",
    "save_target_domain",
    "scalar_damix",
    "scalar_density",
    "scalar_mixup",
    "solve_mix_weights",
    "synthesize_hazy",
    "target_from_control_points",
    "to_brightness",
    "to_quantile",
    "wasserstein",
]
