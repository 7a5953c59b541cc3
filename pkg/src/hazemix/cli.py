"""Command-line surface.

Subcommands:
  density   print (and optionally save) an image's 256-bin density sidecar
  airlight  print the estimated global atmospheric light as "R,G,B"
  distance  p-Wasserstein distance between two images' brightness densities
  synth     render a hazy image from a clean one (constant t, or depth + beta)
  augment   generate density-aligned samples for a paired dataset

Exit codes: 0 success, 2 I/O error (missing/corrupt/unwritable files),
3 validation error (bad flag values, inconsistent inputs).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .airlight import DEFAULT_PATCH, estimate_airlight
from .density import DEFAULT_GRID, estimate_density, wasserstein
from .image import (
    ImageDecodeError,
    ImageFormatError,
    SyntheticHazeParams,
    load_image,
    save_image,
    synthesize_hazy,
    to_brightness,
)
from .pipeline import RunConfig, discover_pairs, load_pairs_file, run_augment

IO_EXIT = 2
VALIDATION_EXIT = 3


def _parse_rgb(text: str) -> tuple[int, int, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"expected R,G,B, got {text!r}")
    values = tuple(int(p) for p in parts)
    if any(v < 0 or v > 255 for v in values):
        raise ValueError(f"channel values must lie in 0..255, got {text!r}")
    return values


def _cmd_density(args: argparse.Namespace) -> int:
    hist = estimate_density(to_brightness(load_image(args.image)))
    text = json.dumps(hist.to_json(), sort_keys=True)
    print(text)
    if args.json:
        Path(args.json).write_text(text)
    return 0


def _cmd_airlight(args: argparse.Namespace) -> int:
    light = estimate_airlight(load_image(args.image), patch=args.patch)
    print(",".join(str(v) for v in light.rgb))
    return 0


def _cmd_distance(args: argparse.Namespace) -> int:
    a = estimate_density(to_brightness(load_image(args.image_a)))
    b = estimate_density(to_brightness(load_image(args.image_b)))
    print(f"{wasserstein(a, b, args.p):.17g}")
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    clean = load_image(args.clean)
    airlight = _parse_rgb(args.airlight)
    if args.t is not None:
        if not 0.0 <= args.t <= 1.0:
            raise ValueError(f"--t must lie in [0, 1], got {args.t}")
        params = SyntheticHazeParams(
            airlight, np.full((clean.height, clean.width), args.t)
        )
    else:
        if args.depth is None:
            raise ValueError("either --t or --depth with --beta is required")
        if args.beta is None:
            raise ValueError("--depth requires --beta")
        if args.depth == "ramp":
            depth = np.tile(
                np.linspace(0.0, 1.0, clean.height)[:, None], (1, clean.width)
            )
        else:
            depth = to_brightness(load_image(args.depth)).data / 255.0
            if depth.shape != (clean.height, clean.width):
                raise ValueError("depth map dimensions must match the clean image")
        params = SyntheticHazeParams.from_depth(airlight, args.beta, depth)
    save_image(synthesize_hazy(clean, params), args.out)
    return 0


def _cmd_augment(args: argparse.Namespace) -> int:
    config = RunConfig(
        mode=args.mode,
        seed=args.seed,
        output_dir=Path(args.out),
        samples_per_pair=args.samples_per_pair,
        p=args.p,
        airlight_override=_parse_rgb(args.airlight) if args.airlight else None,
        subset_k=args.subset,
        control_points=args.control_points,
        oracle=args.oracle,
        debug=args.debug,
        target_hist_path=Path(args.target_hist) if args.target_hist else None,
    )
    if args.pairs:
        manifest = load_pairs_file(args.pairs)
    else:
        if not args.source:
            raise ValueError("either --source or --pairs is required")
        manifest = discover_pairs(args.source)
    run_augment(manifest, config, target_dir=args.target)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hazemix",
        description="Haze-density-aware mixup augmentation for paired dehazing datasets.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_density = sub.add_parser("density", help="brightness density of an image")
    p_density.add_argument("image")
    p_density.add_argument("--json", help="also write the sidecar JSON here")
    p_density.set_defaults(func=_cmd_density)

    p_air = sub.add_parser("airlight", help="estimate the global atmospheric light")
    p_air.add_argument("image")
    p_air.add_argument("--patch", type=int, default=DEFAULT_PATCH,
                       help="dark-channel window size (odd)")
    p_air.set_defaults(func=_cmd_airlight)

    p_dist = sub.add_parser("distance", help="Wasserstein distance between two images")
    p_dist.add_argument("image_a")
    p_dist.add_argument("image_b")
    p_dist.add_argument("--p", type=float, default=1.0, help="transport order (>= 1)")
    p_dist.set_defaults(func=_cmd_distance)

    p_synth = sub.add_parser("synth", help="render a hazy image from a clean one")
    p_synth.add_argument("--clean", required=True)
    p_synth.add_argument("--airlight", required=True, metavar="R,G,B")
    p_synth.add_argument("--t", type=float, help="constant transmission in [0, 1]")
    p_synth.add_argument("--depth", help="depth map image path, or 'ramp'")
    p_synth.add_argument("--beta", type=float, help="scattering coefficient for --depth")
    p_synth.add_argument("--out", required=True)
    p_synth.set_defaults(func=_cmd_synth)

    p_aug = sub.add_parser("augment", help="generate density-aligned samples")
    p_aug.add_argument("--source", help="directory of <id>_hazy/<id>_GT pairs")
    p_aug.add_argument("--target", help="directory of target-domain hazy images")
    p_aug.add_argument("--out", required=True)
    p_aug.add_argument("--seed", type=int, required=True)
    p_aug.add_argument("--samples-per-pair", type=int, default=1)
    p_aug.add_argument("--mode", choices=("adapt", "generalize"), default="adapt")
    p_aug.add_argument("--subset", type=int, help="restrict each draw to k target members")
    p_aug.add_argument("--airlight", metavar="R,G,B", help="skip estimation, use this light")
    p_aug.add_argument("--oracle", action="store_true",
                       help="also run the projected-gradient oracle (images <= 64x64)")
    p_aug.add_argument("--debug", action="store_true",
                       help="dump weight maps (PFM) and density sidecars per sample")
    p_aug.add_argument("--pairs", help="explicit pair list JSON instead of --source scan")
    p_aug.add_argument("--p", type=float, default=1.0, help="transport order (>= 1)")
    p_aug.add_argument("--control-points", type=int, default=8,
                       help="control points per randomized target (generalize mode)")
    p_aug.add_argument("--target-hist", help="density sidecar JSON used as every sample's target")
    p_aug.set_defaults(func=_cmd_augment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ImageFormatError, ImageDecodeError, OSError, json.JSONDecodeError) as exc:
        print(f"hazemix: {exc}", file=sys.stderr)
        return IO_EXIT
    except (ValueError, KeyError) as exc:
        print(f"hazemix: {exc}", file=sys.stderr)
        return VALIDATION_EXIT


if __name__ == "__main__":
    sys.exit(main())
