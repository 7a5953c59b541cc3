"""Render hazy images from a clean scene with the scattering blend.

A hazy image is a per-pixel convex combination of the scene radiance and a
global airlight color, weighted by the transmission map t. This script builds
a toy checkerboard scene, hazes it three ways (thin uniform, thick uniform,
and a depth ramp where the top of the frame is "far away"), and writes the
results next to each other.
"""

from pathlib import Path

import numpy as np

import hazemix as hm

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)


def checkerboard(side=128, tile=16):
    ramp = np.linspace(40, 180, side).astype(np.uint8)
    base = np.minimum.outer(ramp, ramp)
    checks = ((np.indices((side, side)).sum(axis=0) // tile) % 2) * 40
    gray = np.clip(base + checks, 0, 255).astype(np.uint8)
    rgb = np.stack([gray, np.roll(gray, tile, axis=0), np.roll(gray, tile, axis=1)], axis=2)
    return hm.RgbImage(rgb)


def main():
    clean = checkerboard()
    hm.save_image(clean, OUT / "scene_clean.png")
    airlight = (215, 220, 228)

    for name, t_value in (("thin", 0.75), ("thick", 0.25)):
        params = hm.SyntheticHazeParams(airlight, np.full((clean.height, clean.width), t_value))
        hazy = hm.synthesize_hazy(clean, params)
        hm.save_image(hazy, OUT / f"scene_{name}_haze.png")
        print(f"{name:>5} haze: t = {t_value:.2f}, mean brightness "
              f"{hm.scalar_density(hm.to_brightness(hazy)):6.1f}")

    # Depth ramp: top rows are far (deep haze), bottom rows near (clear).
    depth = np.tile(np.linspace(1.0, 0.0, clean.height)[:, None], (1, clean.width))
    params = hm.SyntheticHazeParams.from_depth(airlight, scatter_coefficient=1.6, depth=depth)
    hazy = hm.synthesize_hazy(clean, params)
    hm.save_image(hazy, OUT / "scene_ramp_haze.png")
    print(f" ramp haze: t spans [{params.transmission.min():.2f}, "
          f"{params.transmission.max():.2f}], wrote {OUT / 'scene_ramp_haze.png'}")


if __name__ == "__main__":
    main()
