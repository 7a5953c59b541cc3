"""Full density alignment on one hazy/clean pair.

Given a hazy image, its clean counterpart and the airlight, the aligner
reshapes the hazy image's brightness histogram onto any requested target:
rank the pixels strictly, apportion the target into per-level pixel counts,
hand out levels in rank order, and solve the per-pixel mix toward either the
clean image (thinner) or the airlight (thicker). The output is still a valid
hazy image of the same scene.

This script aligns one scene onto the density of a *different*, much thicker
scene and reports how far the result remains from the request.
"""

from pathlib import Path

import numpy as np

import hazemix as hm

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)


def scene(rng, t_range, side=96):
    gray = rng.integers(15, 130, (side, side)).astype(np.uint8)
    clean = hm.RgbImage(np.repeat(gray[:, :, None], 3, axis=2))
    t = rng.uniform(*t_range, (side, side))
    hazy = hm.synthesize_hazy(clean, hm.SyntheticHazeParams((222, 222, 222), t))
    return hazy, clean


def main():
    rng = np.random.default_rng(3)
    hazy, clean = scene(rng, (0.55, 0.9))      # light haze
    other_hazy, _ = scene(rng, (0.15, 0.4))    # dense haze, different scene

    light = hm.estimate_airlight(hazy)
    target = hm.estimate_density(hm.to_brightness(other_hazy))
    before = hm.wasserstein(hm.estimate_density(hm.to_brightness(hazy)), target)

    sample = hm.damix(hazy, clean, light, target)

    print(f"airlight          : {light.rgb}")
    print(f"distance to target: {before:.3f} levels before, "
          f"{sample.residual_distance:.3f} after")
    active = (sample.weights.alpha > 0).mean(), (sample.weights.beta > 0).mean()
    print(f"pixels thinned    : {active[0]:.1%}, thickened: {active[1]:.1%}")

    hm.save_image(hazy, OUT / "align_input.png")
    hm.save_image(other_hazy, OUT / "align_target_style.png")
    hm.save_image(sample.image, OUT / "align_output.png")
    print(f"wrote input/target-style/output PNGs to {OUT}")

    # The scalar ablation: one global ratio can match a mean, not a shape.
    mean_target = float(np.arange(256) @ target.bins)
    scalar = hm.scalar_damix(hazy, clean, light, mean_target)
    scalar_dist = hm.wasserstein(
        hm.estimate_density(hm.to_brightness(scalar)), target
    )
    print(f"scalar ablation   : mean matched to {mean_target:.1f}, "
          f"but W1 to target is still {scalar_dist:.3f}")


if __name__ == "__main__":
    main()
