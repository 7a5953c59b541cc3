"""Dataset-level orchestration: pair discovery, caching, seeded augmentation.

A source dataset is a directory of ``<id>_hazy.png`` / ``<id>_GT.png`` pairs
(JPEG accepted on input); a target dataset is any directory of hazy images.
Every run is a pure function of (input files, flags, seed): per-sample RNG
substreams are derived from the seed, the pair id and the sample index, so
results do not depend on directory iteration order or on how many workers
process the pairs. Output files are written atomically (temp file + rename)
and each run emits a versioned JSON manifest that fully reconstructs its
samples.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .airlight import AtmosphericLight, estimate_airlight
from .alignment import damix, save_debug_dump
from .density import DEFAULT_GRID, DensityHistogram, estimate_density, to_quantile
from .image import RgbImage, load_image, save_image, to_brightness
from .pgd import SolverConfig, pgd_solve
from .targets import (
    SimplexWeights,
    TargetDomain,
    draw_control_points,
    interpolate_target,
    sample_theta,
    target_from_control_points,
)

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")

RUN_MANIFEST_VERSION = 1

RUN_MANIFEST_NAME = "manifest.json"

THREADS_ENV_VAR = "HAZEMIX_THREADS"


@dataclass(frozen=True)
class DatasetPair:
    pair_id: str
    hazy_path: Path
    clean_path: Path


@dataclass(frozen=True)
class DatasetManifest:
    """Resolved hazy/clean pairs, unique ids, sorted for determinism."""

    pairs: tuple[DatasetPair, ...]

    def __post_init__(self) -> None:
        ids = [p.pair_id for p in self.pairs]
        if len(set(ids)) != len(ids):
            raise ValueError("pair ids must be unique")
        object.__setattr__(self, "pairs", tuple(sorted(self.pairs, key=lambda p: p.pair_id)))


@dataclass(frozen=True)
class RunConfig:
    mode: str
    seed: int
    output_dir: Path
    samples_per_pair: int = 1
    p: float = 1.0
    airlight_override: tuple[int, int, int] | None = None
    subset_k: int | None = None
    control_points: int = 8
    grid_size: int = DEFAULT_GRID
    oracle: bool = False
    debug: bool = False
    target_hist_path: Path | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("adapt", "generalize"):
            raise ValueError(f"mode must be 'adapt' or 'generalize', got {self.mode!r}")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.samples_per_pair < 1:
            raise ValueError("samples_per_pair must be >= 1")
        if self.subset_k is not None and self.subset_k < 1:
            raise ValueError("subset size must be >= 1")


def _find_counterpart(hazy_path: Path) -> Path | None:
    pair_id = hazy_path.stem[: -len("_hazy")]
    for suffix in IMAGE_SUFFIXES:
        candidate = hazy_path.with_name(f"{pair_id}_GT{suffix}")
        if candidate.exists():
            return candidate
    return None


def discover_pairs(source_dir) -> DatasetManifest:
    """Scan a directory for ``<id>_hazy`` / ``<id>_GT`` image pairs."""
    source_dir = Path(source_dir)
    if not source_dir.is_dir():
        raise FileNotFoundError(f"source directory not found: {source_dir}")
    pairs = []
    for path in sorted(source_dir.iterdir()):
        if path.suffix.lower() not in IMAGE_SUFFIXES or not path.stem.endswith("_hazy"):
            continue
        clean = _find_counterpart(path)
        if clean is None:
            raise ValueError(f"{path.name} has no matching ground-truth image")
        pairs.append(DatasetPair(path.stem[: -len("_hazy")], path, clean))
    if not pairs:
        raise ValueError(f"no <id>_hazy/<id>_GT pairs found in {source_dir}")
    return DatasetManifest(tuple(pairs))


def load_pairs_file(path) -> DatasetManifest:
    """Explicit pair list: JSON ``{"pairs": [{"id", "hazy", "clean"}, ...]}``.

    Relative paths resolve against the file's directory.
    """
    path = Path(path)
    obj = json.loads(path.read_text())
    base = path.parent
    pairs = tuple(
        DatasetPair(str(e["id"]), base / e["hazy"], base / e["clean"]) for e in obj["pairs"]
    )
    if not pairs:
        raise ValueError(f"no pairs listed in {path}")
    return DatasetManifest(pairs)


def list_images(directory) -> list[Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"directory not found: {directory}")
    return sorted(p for p in directory.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)


def density_sidecar_path(image_path: Path) -> Path:
    return image_path.with_name(image_path.name + ".density.json")


def cached_density(image_path) -> DensityHistogram:
    """Density of an image file, cached in a sidecar next to it.

    The cache is invalidated when the image's size or mtime changes.
    """
    image_path = Path(image_path)
    stat = image_path.stat()
    source = {"size": stat.st_size, "mtime_ns": stat.st_mtime_ns}
    sidecar = density_sidecar_path(image_path)
    if sidecar.exists():
        try:
            obj = json.loads(sidecar.read_text())
            if obj.get("source") == source:
                return DensityHistogram.from_json(obj)
        except (ValueError, KeyError):
            pass
    hist = estimate_density(to_brightness(load_image(image_path)))
    payload = hist.to_json()
    payload["source"] = source
    _atomic_write_text(sidecar, json.dumps(payload, sort_keys=True))
    return hist


def build_domain_from_dir(target_dir, grid_size: int = DEFAULT_GRID) -> TargetDomain:
    """Target domain from every image in a directory (cached densities)."""
    images = list_images(target_dir)
    if not images:
        raise ValueError(f"target directory {target_dir} contains no images")
    quantiles = tuple(to_quantile(cached_density(p), grid_size) for p in images)
    return TargetDomain(quantiles, tuple(p.name for p in images))


def pair_rng(seed: int, pair_id: str, sample_index: int) -> np.random.Generator:
    """Deterministic per-sample RNG substream, independent of scan order."""
    digest = hashlib.blake2b(pair_id.encode("utf-8"), digest_size=8).digest()
    id_key = int.from_bytes(digest, "big")
    return np.random.default_rng(np.random.SeedSequence([seed, id_key, sample_index]))


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None:
        return min(8, os.cpu_count() or 1)
    value = int(raw)
    if value < 1:
        raise ValueError(f"{THREADS_ENV_VAR} must be >= 1, got {raw!r}")
    return value


def _atomic_write_text(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_save_image(img: RgbImage, path: Path) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp.png")
    os.close(fd)
    try:
        save_image(img, tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _resolve_target(config: RunConfig, domain: TargetDomain | None,
                    explicit: DensityHistogram | None,
                    rng: np.random.Generator) -> tuple[DensityHistogram, dict]:
    if explicit is not None:
        return explicit, {"kind": "explicit", "bins": [float(v) for v in explicit.bins]}
    if config.mode == "adapt":
        assert domain is not None
        if config.subset_k is not None and config.subset_k < domain.size:
            members = np.sort(rng.choice(domain.size, size=config.subset_k, replace=False))
            partial = sample_theta(config.subset_k, rng).theta
            theta = np.zeros(domain.size)
            theta[members] = partial
        else:
            theta = sample_theta(domain.size, rng).theta
        target = interpolate_target(domain, SimplexWeights(theta))
        return target, {"kind": "interpolated", "theta": [float(v) for v in theta]}
    points = draw_control_points(rng, config.control_points)
    target = target_from_control_points(points, config.grid_size)
    return target, {"kind": "randomized", "control_points": [float(v) for v in points]}


@dataclass
class _PairContext:
    pair: DatasetPair
    hazy: RgbImage
    clean: RgbImage
    airlight: AtmosphericLight


def _load_pair(pair: DatasetPair, override: tuple[int, int, int] | None) -> _PairContext:
    hazy = load_image(pair.hazy_path)
    clean = load_image(pair.clean_path)
    if hazy.data.shape != clean.data.shape:
        raise ValueError(
            f"pair {pair.pair_id!r}: hazy is {hazy.height}x{hazy.width} but "
            f"ground truth is {clean.height}x{clean.width}"
        )
    light = AtmosphericLight(override) if override else estimate_airlight(hazy)
    return _PairContext(pair, hazy, clean, light)


def run_augment(manifest: DatasetManifest, config: RunConfig,
                target_dir=None) -> dict:
    """Generate augmented samples for every pair and write the run manifest.

    Returns the manifest dictionary that was written to ``manifest.json``.
    """
    explicit = None
    domain = None
    if config.target_hist_path is not None:
        explicit = DensityHistogram.load(config.target_hist_path)
    elif config.mode == "adapt":
        if target_dir is None:
            raise ValueError("adapt mode needs a target directory or an explicit target")
        domain = build_domain_from_dir(target_dir, config.grid_size)

    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    contexts = [_load_pair(pair, config.airlight_override) for pair in manifest.pairs]
    if config.oracle:
        for ctx in contexts:
            if ctx.hazy.height > 64 or ctx.hazy.width > 64:
                raise ValueError(
                    f"--oracle needs images of at most 64x64, pair {ctx.pair.pair_id!r} "
                    f"is {ctx.hazy.height}x{ctx.hazy.width}"
                )

    def produce(ctx: _PairContext, sample_index: int) -> dict:
        rng = pair_rng(config.seed, ctx.pair.pair_id, sample_index)
        target, target_record = _resolve_target(config, domain, explicit, rng)
        sample = damix(ctx.hazy, ctx.clean, ctx.airlight, target, config.p, config.grid_size)
        name = f"{ctx.pair.pair_id}_damix{sample_index}.png"
        _atomic_save_image(sample.image, out_dir / name)
        if config.debug:
            save_debug_dump(sample, out_dir, f"{ctx.pair.pair_id}_damix{sample_index}")
        record = {
            "id": ctx.pair.pair_id,
            "sample_index": sample_index,
            "output": name,
            "gt": f"{ctx.pair.pair_id}_GT.png",
            "airlight": list(ctx.airlight.rgb),
            "target": target_record,
            "residual_distance": sample.residual_distance,
        }
        if config.oracle:
            _, objective = pgd_solve(
                to_brightness(ctx.hazy), to_brightness(ctx.clean),
                ctx.airlight.brightness, target, SolverConfig(p=config.p), config.grid_size,
            )
            record["pgd_objective"] = objective
        return record

    # Ground truths land first so no emitted sample ever lacks its pair.
    for ctx in contexts:
        _atomic_save_image(ctx.clean, out_dir / f"{ctx.pair.pair_id}_GT.png")

    tasks = [(ctx, k) for ctx in contexts for k in range(config.samples_per_pair)]
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        futures = [pool.submit(produce, ctx, k) for ctx, k in tasks]
        records = [f.result() for f in futures]

    records.sort(key=lambda r: (r["id"], r["sample_index"]))
    run_manifest = {
        "version": RUN_MANIFEST_VERSION,
        "mode": config.mode,
        "seed": config.seed,
        "p": config.p,
        "grid_size": config.grid_size,
        "samples_per_pair": config.samples_per_pair,
        "target_domain": {"source_ids": list(domain.source_ids)} if domain else None,
        "samples": records,
    }
    _atomic_write_text(out_dir / RUN_MANIFEST_NAME, json.dumps(run_manifest, sort_keys=True, indent=2))
    return run_manifest
