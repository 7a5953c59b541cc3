"""Haze density as a histogram, its quantile function, and transport distance.

The haze density of an image is the normalized histogram of its brightness
channel. Comparing two images' haze then becomes one-dimensional optimal
transport: the 1-Wasserstein distance is the area between their quantile
functions. This script builds a thin-haze and a thick-haze rendering of the
same scene, plots both views, and prints the distances.

Needs matplotlib (pre-installed in most scientific environments).
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import hazemix as hm

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)


def main():
    rng = np.random.default_rng(1)
    gray = rng.integers(20, 140, (96, 96)).astype(np.uint8)
    clean = hm.RgbImage(np.repeat(gray[:, :, None], 3, axis=2))
    airlight = (225, 225, 225)

    densities = {}
    for name, t_value in (("thin", 0.8), ("thick", 0.35)):
        params = hm.SyntheticHazeParams(airlight, np.full((96, 96), t_value))
        hazy = hm.synthesize_hazy(clean, params)
        densities[name] = hm.estimate_density(hm.to_brightness(hazy))

    w1 = hm.wasserstein(densities["thin"], densities["thick"], 1.0)
    w2 = hm.wasserstein(densities["thin"], densities["thick"], 2.0)
    print(f"W1(thin, thick) = {w1:.3f} levels, W2 = {w2:.3f} levels")

    fig, (ax_hist, ax_quant) = plt.subplots(1, 2, figsize=(10, 4))
    levels = np.arange(256)
    u = (np.arange(hm.DEFAULT_GRID) + 0.5) / hm.DEFAULT_GRID
    for name, hist in densities.items():
        ax_hist.plot(levels, hist.bins, label=name, lw=1)
        ax_quant.plot(u, hm.to_quantile(hist).values, label=name, lw=1)
    ax_hist.set_xlabel("brightness level")
    ax_hist.set_ylabel("mass")
    ax_hist.set_title("haze densities")
    ax_hist.legend()
    ax_quant.set_xlabel("u")
    ax_quant.set_ylabel("level")
    ax_quant.set_title("quantile functions (area between = W1)")
    ax_quant.legend()
    fig.tight_layout()
    fig.savefig(OUT / "density_and_quantiles.png", dpi=120)
    print(f"wrote {OUT / 'density_and_quantiles.png'}")


if __name__ == "__main__":
    main()
