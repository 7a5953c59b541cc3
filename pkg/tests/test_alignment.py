from fractions import Fraction

import numpy as np
import pytest

import hazemix as hm
from helpers import dirac, gray_image, random_histogram, synthetic_pair


def ranking_oracle(values: np.ndarray):
    # Nested-loop lexicographic sort key: value, then clamped-window means
    # over 3..11, then raster index.
    h, w = values.shape
    keys = []
    for r in range(h):
        for c in range(w):
            key = [int(values[r, c])]
            for size in (3, 5, 7, 9, 11):
                reach = size // 2
                r0, r1 = max(0, r - reach), min(h, r + reach + 1)
                c0, c1 = max(0, c - reach), min(w, c + reach + 1)
                window = values[r0:r1, c0:c1]
                key.append(int(window.sum(dtype=np.int64)) / window.size)
            key.append(r * w + c)
            keys.append(tuple(key))
    return sorted(range(h * w), key=lambda i: keys[i])


def apportion_oracle(bins: np.ndarray, total: int) -> np.ndarray:
    # Independent largest-remainder count with exact rational quotas.
    mass = [Fraction(float(b)) for b in bins]
    total_mass = sum(mass)
    quotas = [q / total_mass * total for q in mass]
    counts = [int(q) for q in quotas]
    deficit = total - sum(counts)
    order = sorted(range(256), key=lambda v: (-(quotas[v] - counts[v]), v))
    for v in order[:deficit]:
        counts[v] += 1
    return np.array(counts)


class TestRankPixels:
    def test_constant_image_is_raster_order(self):
        ranking = hm.rank_pixels(hm.BrightnessImage(np.full((4, 5), 9, np.uint8)))
        assert np.array_equal(ranking.order, np.arange(20))
        assert ranking.key_depth == 6

    def test_distinct_values_sort_by_value(self):
        rng = np.random.default_rng(137)
        flat = rng.permutation(64).astype(np.uint8)
        img = hm.BrightnessImage(flat.reshape(8, 8))
        ranking = hm.rank_pixels(img)
        assert np.array_equal(flat[ranking.order], np.sort(flat))
        assert np.array_equal(ranking.order, np.argsort(flat))

    def test_tie_broken_by_3x3_mean(self):
        # Two 50-valued pixels; the one surrounded by darker neighbors must
        # rank first. Hand-computed 3x3 clamped means: corner (0,0) has
        # (50+0+0+0)/4 = 12.5, corner (2,2) has (50+90+90+90)/4 = 80.
        img = hm.BrightnessImage(np.array(
            [[50, 0, 0],
             [0, 0, 90],
             [0, 90, 50]], np.uint8))
        ranking = hm.rank_pixels(img)
        flat_ranks = {idx: rank for rank, idx in enumerate(ranking.order)}
        assert flat_ranks[0] < flat_ranks[8]

    def test_matches_nested_loop_oracle(self):
        rng = np.random.default_rng(139)
        for shape in ((6, 6), (5, 9), (1, 12)):
            # Few distinct levels force heavy reliance on the deeper keys.
            values = rng.integers(0, 4, shape).astype(np.uint8) * 37
            ranking = hm.rank_pixels(hm.BrightnessImage(values))
            assert list(ranking.order) == ranking_oracle(values)

    def test_order_is_permutation(self):
        rng = np.random.default_rng(149)
        img = hm.BrightnessImage(rng.integers(0, 256, (9, 7)).astype(np.uint8))
        order = hm.rank_pixels(img).order
        assert sorted(order) == list(range(63))


class TestBuildPrototype:
    def test_two_level_split(self):
        img = hm.BrightnessImage(np.array([[5, 200], [100, 30]], np.uint8))
        ranking = hm.rank_pixels(img)
        bins = np.zeros(256)
        bins[10] = 0.5
        bins[20] = 0.5
        proto = hm.build_prototype(img, ranking, hm.DensityHistogram(bins, 4))
        flat = proto.data.ravel()
        assert flat[ranking.order[0]] == 10 and flat[ranking.order[1]] == 10
        assert flat[ranking.order[2]] == 20 and flat[ranking.order[3]] == 20

    def test_self_target_keeps_histogram(self):
        rng = np.random.default_rng(151)
        img = hm.BrightnessImage(rng.integers(0, 256, (8, 8)).astype(np.uint8))
        hist = hm.estimate_density(img)
        proto = hm.build_prototype(img, hm.rank_pixels(img), hist)
        assert hm.estimate_density(proto) == hist

    def test_histogram_equals_apportioned_counts(self):
        rng = np.random.default_rng(157)
        for _ in range(10):
            img = hm.BrightnessImage(rng.integers(0, 256, (8, 8)).astype(np.uint8))
            target = random_histogram(rng)
            proto = hm.build_prototype(img, hm.rank_pixels(img), target)
            achieved = np.bincount(proto.data.ravel(), minlength=256)
            assert np.array_equal(achieved, apportion_oracle(target.bins, 64))

    def test_size_mismatch(self):
        img = hm.BrightnessImage(np.zeros((4, 4), np.uint8))
        other = hm.BrightnessImage(np.zeros((2, 2), np.uint8))
        with pytest.raises(ValueError):
            hm.build_prototype(img, hm.rank_pixels(other), dirac(0))


def solve_single(hazy, proto, clean, light):
    w = hm.solve_mix_weights(
        hm.BrightnessImage(np.array([[hazy]], np.uint8)),
        hm.BrightnessImage(np.array([[clean]], np.uint8)),
        light,
        hm.BrightnessImage(np.array([[proto]], np.uint8)),
    )
    return float(w.alpha[0, 0]), float(w.beta[0, 0])


class TestSolveMixWeights:
    def test_darken_half_way(self):
        assert solve_single(100, 80, 60, 250) == (0.5, 0.0)

    def test_brighten_toward_airlight(self):
        alpha, beta = solve_single(100, 160, 60, 250)
        assert alpha == 0.0
        assert beta == pytest.approx(0.4)

    def test_identity_target(self):
        rng = np.random.default_rng(163)
        img = hm.BrightnessImage(rng.integers(30, 200, (6, 6)).astype(np.uint8))
        clean = hm.BrightnessImage((img.data - 20).astype(np.uint8))
        w = hm.solve_mix_weights(img, clean, 255, img)
        assert np.all(w.alpha == 0) and np.all(w.beta == 0)

    def test_clamped_to_full_dehaze(self):
        alpha, beta = solve_single(100, 0, 60, 250)
        assert (alpha, beta) == (1.0, 0.0)

    def test_zero_denominator_guards(self):
        # Clean as bright as hazy: cannot darken.
        assert solve_single(100, 80, 100, 250) == (0.0, 0.0)
        # Airlight as bright as hazy: cannot brighten.
        assert solve_single(100, 160, 100, 100) == (0.0, 0.0)

    def test_invariants_on_random_solves(self):
        rng = np.random.default_rng(167)
        for _ in range(50):
            hazy, clean, light, _ = synthetic_pair(rng, (8, 8))
            proto = hm.BrightnessImage(rng.integers(0, 256, (8, 8)).astype(np.uint8))
            w = hm.solve_mix_weights(
                hm.to_brightness(hazy), hm.to_brightness(clean), light.brightness, proto
            )
            assert np.all(w.alpha >= 0) and np.all(w.alpha <= 1)
            assert np.all(w.beta >= 0) and np.all(w.beta <= 1)
            assert np.all(w.alpha + w.beta <= 1)
            assert w.exclusive


class TestComposeDamix:
    def test_zero_weights_identity(self):
        rng = np.random.default_rng(173)
        hazy, clean, light, _ = synthetic_pair(rng, (8, 8))
        zeros = hm.MixWeights(np.zeros((8, 8)), np.zeros((8, 8)))
        assert hm.compose_damix(hazy, clean, light, zeros) == hazy

    def test_full_alpha_returns_clean(self):
        rng = np.random.default_rng(179)
        hazy, clean, light, _ = synthetic_pair(rng, (8, 8))
        ones = hm.MixWeights(np.ones((8, 8)), np.zeros((8, 8)))
        assert hm.compose_damix(hazy, clean, light, ones) == clean

    def test_hand_case_and_transmission_identity(self):
        # J = 50 gray, A = 200 gray, t = 0.5 so I = 125; beta = 0.2 gives 140,
        # matching the modified transmission t*(1-beta) = 0.4.
        clean = gray_image(np.full((4, 4), 50, np.uint8))
        light = hm.AtmosphericLight((200, 200, 200))
        hazy = hm.synthesize_hazy(clean, hm.SyntheticHazeParams(light.rgb, np.full((4, 4), 0.5)))
        w = hm.MixWeights(np.zeros((4, 4)), np.full((4, 4), 0.2))
        out = hm.compose_damix(hazy, clean, light, w)
        assert np.all(out.data == 140)
        resynth = hm.synthesize_hazy(clean, hm.SyntheticHazeParams(light.rgb, np.full((4, 4), 0.4)))
        assert out == resynth

    def test_asm_identity_random_weights(self):
        rng = np.random.default_rng(181)
        for _ in range(20):
            clean = hm.RgbImage(rng.integers(0, 256, (8, 8, 3)).astype(np.uint8))
            light = hm.AtmosphericLight(tuple(int(v) for v in rng.integers(0, 256, 3)))
            t = rng.uniform(0, 1, (8, 8))
            hazy = hm.synthesize_hazy(clean, hm.SyntheticHazeParams(light.rgb, t))
            alpha = rng.uniform(0, 1, (8, 8))
            beta = (1 - alpha) * rng.uniform(0, 1, (8, 8))
            w = hm.MixWeights(alpha, beta)
            out = hm.compose_damix(hazy, clean, light, w)
            t_hat = (1 - t) * alpha + t * (1 - beta)
            resynth = hm.synthesize_hazy(clean, hm.SyntheticHazeParams(light.rgb, t_hat))
            diff = np.abs(out.data.astype(int) - resynth.data.astype(int))
            assert diff.max() <= 1

    def test_weight_shape_mismatch(self):
        rng = np.random.default_rng(191)
        hazy, clean, light, _ = synthetic_pair(rng, (4, 4))
        with pytest.raises(ValueError):
            hm.compose_damix(hazy, clean, light, hm.MixWeights(np.zeros((2, 2)), np.zeros((2, 2))))


class TestMixWeightsType:
    def test_feasibility_validation(self):
        with pytest.raises(ValueError):
            hm.MixWeights(np.full((2, 2), 0.7), np.full((2, 2), 0.7))
        with pytest.raises(ValueError):
            hm.MixWeights(-np.ones((2, 2)), np.zeros((2, 2)))

    def test_exclusive_property(self):
        w = hm.MixWeights(np.array([[0.3, 0.0]]), np.array([[0.0, 0.4]]))
        assert w.exclusive
        w = hm.MixWeights(np.array([[0.3]]), np.array([[0.4]]))
        assert not w.exclusive


class TestDamix:
    def test_self_target_fixed_point(self):
        rng = np.random.default_rng(193)
        hazy, clean, light, _ = synthetic_pair(rng, (16, 16))
        target = hm.estimate_density(hm.to_brightness(hazy))
        sample = hm.damix(hazy, clean, light, target)
        assert np.all(sample.weights.alpha == 0) and np.all(sample.weights.beta == 0)
        assert sample.image == hazy
        assert sample.residual_distance == 0.0

    def test_reaches_clean_histogram_target(self):
        # Gray pair with clean exactly 30 levels below hazy everywhere:
        # within-tie rank blocks make every pixel's assigned level its own
        # clean value, so the output histogram matches the clean one exactly.
        rng = np.random.default_rng(197)
        base = rng.integers(40, 200, (12, 12)).astype(np.uint8)
        hazy = gray_image(base)
        clean = gray_image((base - 30).astype(np.uint8))
        light = hm.AtmosphericLight((255, 255, 255))
        target = hm.estimate_density(hm.to_brightness(clean))
        sample = hm.damix(hazy, clean, light, target)
        assert sample.achieved_density == target
        assert sample.residual_distance == 0.0

    def test_feasible_target_hits_apportioned_counts(self):
        # Strict light > hazy > clean brightness with a target whose support
        # sits inside the reachable band: no clamp fires and the achieved
        # histogram matches the integer apportionment within 2 pixels per bin.
        rng = np.random.default_rng(409)
        for _ in range(20):
            clean_b = rng.integers(10, 40, (12, 12)).astype(np.uint8)
            hazy_b = (clean_b + rng.integers(60, 120, (12, 12))).astype(np.uint8)
            hazy, clean = gray_image(hazy_b), gray_image(clean_b)
            light = hm.AtmosphericLight((250, 250, 250))
            target_values = rng.integers(45, 245, (12, 12)).astype(np.uint8)
            target = hm.estimate_density(hm.BrightnessImage(target_values))
            sample = hm.damix(hazy, clean, light, target)
            counts = hm.apportion_counts(target.bins, 144)
            gap = np.abs(sample.achieved_density.bins - counts / 144)
            assert gap.max() <= 2.0 / 144

    def test_never_worsens_transport_distance(self):
        rng = np.random.default_rng(199)
        for _ in range(100):
            hazy, clean, light, _ = synthetic_pair(rng, (24, 24))
            target = random_histogram(rng)
            sample = hm.damix(hazy, clean, light, target)
            baseline = hm.wasserstein(
                hm.estimate_density(hm.to_brightness(hazy)), target
            )
            assert sample.residual_distance <= baseline + 1e-9

    def test_residual_matches_recomputation(self):
        rng = np.random.default_rng(211)
        hazy, clean, light, _ = synthetic_pair(rng, (10, 10))
        target = random_histogram(rng)
        sample = hm.damix(hazy, clean, light, target)
        assert sample.residual_distance == hm.wasserstein(sample.achieved_density, target)

    def test_bit_identical_reruns(self):
        rng = np.random.default_rng(223)
        hazy, clean, light, _ = synthetic_pair(rng, (10, 10))
        target = random_histogram(rng)
        a = hm.damix(hazy, clean, light, target)
        b = hm.damix(hazy, clean, light, target)
        assert a.image == b.image
        assert np.array_equal(a.weights.alpha, b.weights.alpha)
        assert a.residual_distance == b.residual_distance


def read_pfm_oracle(path):
    # Independent minimal PFM parser: header lines, then little-endian
    # float32 scanlines stored bottom-to-top.
    with open(path, "rb") as handle:
        assert handle.readline().strip() == b"Pf"
        width, height = map(int, handle.readline().split())
        scale = float(handle.readline())
        assert scale < 0  # little-endian marker
        raw = np.frombuffer(handle.read(), dtype="<f4")
    return raw.reshape(height, width)[::-1]


class TestDebugDump:
    def test_dump_round_trips(self, tmp_path):
        rng = np.random.default_rng(241)
        hazy, clean, light, _ = synthetic_pair(rng, (9, 7))
        target = random_histogram(rng)
        sample = hm.damix(hazy, clean, light, target)
        hm.save_debug_dump(sample, tmp_path, "probe")
        alpha = read_pfm_oracle(tmp_path / "probe.alpha.pfm")
        beta = read_pfm_oracle(tmp_path / "probe.beta.pfm")
        assert np.array_equal(alpha, sample.weights.alpha.astype(np.float32))
        assert np.array_equal(beta, sample.weights.beta.astype(np.float32))
        achieved = hm.DensityHistogram.load(tmp_path / "probe.achieved.density.json")
        wanted = hm.DensityHistogram.load(tmp_path / "probe.target.density.json")
        assert achieved == sample.achieved_density
        assert wanted == sample.target_density


class TestScalarPaths:
    def test_scalar_mixup_endpoints(self):
        rng = np.random.default_rng(227)
        hazy, clean, light, _ = synthetic_pair(rng, (6, 6))
        assert hm.scalar_mixup(hazy, clean, light, 1.0, "thinner") == hazy
        assert hm.scalar_mixup(hazy, clean, light, 1.0, "thicker") == hazy
        assert hm.scalar_mixup(hazy, clean, light, 0.0, "thinner") == clean
        thick = hm.scalar_mixup(hazy, clean, light, 0.0, "thicker")
        assert np.all(thick.data == np.array(light.rgb, np.uint8))

    def test_scalar_mixup_validation(self):
        rng = np.random.default_rng(229)
        hazy, clean, light, _ = synthetic_pair(rng, (4, 4))
        with pytest.raises(ValueError):
            hm.scalar_mixup(hazy, clean, light, 1.5, "thinner")
        with pytest.raises(ValueError):
            hm.scalar_mixup(hazy, clean, light, 0.5, "thickest")

    def test_scalar_damix_thinner_linear_solve(self):
        hazy = gray_image(np.full((5, 5), 100, np.uint8))
        clean = gray_image(np.full((5, 5), 40, np.uint8))
        light = hm.AtmosphericLight((250, 250, 250))
        out = hm.scalar_damix(hazy, clean, light, 70.0)
        assert np.all(out.data == 70)  # lambda = 0.5 thinner

    def test_scalar_damix_fixed_point(self):
        rng = np.random.default_rng(233)
        hazy, clean, light, _ = synthetic_pair(rng, (8, 8))
        mean = hm.scalar_density(hm.to_brightness(hazy))
        assert hm.scalar_damix(hazy, clean, light, mean) == hazy

    def test_scalar_damix_thicker_hits_target_mean(self):
        hazy = gray_image(np.full((5, 5), 100, np.uint8))
        clean = gray_image(np.full((5, 5), 40, np.uint8))
        light = hm.AtmosphericLight((200, 200, 200))
        out = hm.scalar_damix(hazy, clean, light, 150.0)
        achieved = hm.scalar_density(hm.to_brightness(out))
        assert abs(achieved - 150.0) <= 1.0  # lambda = 0.5 thicker

    def test_scalar_damix_range_validation(self):
        rng = np.random.default_rng(239)
        hazy, clean, light, _ = synthetic_pair(rng, (4, 4))
        with pytest.raises(ValueError):
            hm.scalar_damix(hazy, clean, light, 300.0)
