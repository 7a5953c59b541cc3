"""Recover the global atmospheric light from a hazy image.

The dark channel (min over channels and a window) of a clear outdoor scene is
near zero; haze fills it with airlight, so the brightest dark-channel pixels
mark where the haze is densest and their average color approximates the
airlight. The estimate is then lifted so its brightness covers the brightest
pixel, which the alignment solver requires.
"""

from pathlib import Path

import numpy as np

import hazemix as hm

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)


def main():
    rng = np.random.default_rng(7)
    clean = hm.RgbImage(rng.integers(140, 241, (128, 128, 3)).astype(np.uint8))
    true_light = (201, 186, 172)
    t = np.tile(np.linspace(0.12, 0.55, 128)[:, None], (1, 128))
    hazy = hm.synthesize_hazy(clean, hm.SyntheticHazeParams(true_light, t))
    hm.save_image(hazy, OUT / "airlight_scene.png")

    dark = hm.dark_channel(hazy)
    print(f"dark channel range: [{dark.data.min()}, {dark.data.max()}]")

    raw = hm.estimate_airlight(hazy, enforce_feasibility=False)
    final = hm.estimate_airlight(hazy)
    print(f"true airlight      : {true_light}")
    print(f"raw estimate       : {raw.rgb}  (error "
          f"{tuple(e - a for e, a in zip(raw.rgb, true_light))})")
    print(f"after feasibility  : {final.rgb}  (brightness {final.brightness} >= "
          f"max image brightness {int(hazy.data.max())})")


if __name__ == "__main__":
    main()
