"""Sweeping the interpolation set of a target domain.

With K target-domain images on hand, averaging their quantile functions under
simplex weights traces every Wasserstein interpolation of their densities, so
one small domain yields an unlimited family of realistic targets. Without any
target domain, randomized targets come from sorted uniform control points
interpolated into a quantile function.

Plots the members, a few interpolates, and a few randomized targets.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import hazemix as hm

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)


def hazy_density(rng, t_range):
    gray = rng.integers(10, 120, (64, 64)).astype(np.uint8)
    clean = hm.RgbImage(np.repeat(gray[:, :, None], 3, axis=2))
    t = rng.uniform(*t_range, (64, 64))
    hazy = hm.synthesize_hazy(clean, hm.SyntheticHazeParams((230, 230, 230), t))
    return hm.estimate_density(hm.to_brightness(hazy))


def main():
    rng = np.random.default_rng(5)
    members = [hazy_density(rng, r) for r in ((0.7, 0.95), (0.4, 0.6), (0.1, 0.3))]
    domain = hm.TargetDomain(
        tuple(hm.to_quantile(h) for h in members), ("light", "medium", "dense")
    )

    u = (np.arange(domain.grid_size) + 0.5) / domain.grid_size
    fig, (ax_members, ax_random) = plt.subplots(1, 2, figsize=(10, 4))
    for name, q in zip(domain.source_ids, domain.quantiles):
        ax_members.plot(u, q.values, lw=2, label=f"member: {name}")
    for seed in range(4):
        theta = hm.sample_theta(3, seed)
        mixed = hm.interpolate_target(domain, theta)
        label = "interpolates" if seed == 0 else None
        ax_members.plot(u, hm.to_quantile(mixed).values, lw=0.8, ls="--",
                        color="gray", label=label)
        print(f"theta = {np.round(theta.theta, 3)} -> mean level "
              f"{float(np.arange(256) @ mixed.bins):6.1f}")
    ax_members.set_title("domain members and sampled interpolates")
    ax_members.set_xlabel("u")
    ax_members.set_ylabel("level")
    ax_members.legend()

    for seed in range(5):
        hist = hm.random_target(seed, control_points=6)
        ax_random.plot(u, hm.to_quantile(hist).values, lw=1)
    ax_random.set_title("randomized targets (no domain needed)")
    ax_random.set_xlabel("u")
    fig.tight_layout()
    fig.savefig(OUT / "target_interpolation.png", dpi=120)
    print(f"wrote {OUT / 'target_interpolation.png'}")


if __name__ == "__main__":
    main()
