"""Dataset manifests: tab-separated patch/site/split triples plus a
key = value sidecar for generation provenance."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .pairing import pair_with_ground_truth, temporal_split
from .patch import validate_patch, write_patch
from .records import write_site_csv
from .synth import SynthConfig, synth_scene

MANIFEST_NAME = "manifest.tsv"
SITES_NAME = "sites.csv"
META_NAME = "dataset.meta"
PATCH_DIR = "patches"


@dataclass(frozen=True)
class ManifestEntry:
    patch_path: str
    site_id: str
    split: str


@dataclass
class DatasetManifest:
    entries: list[ManifestEntry]
    seed: int
    class_counts: dict[str, int]

    def __post_init__(self):
        seen = set()
        for e in self.entries:
            if e.patch_path in seen:
                raise ValueError(f"patch listed twice in manifest: {e.patch_path}")
            seen.add(e.patch_path)


def write_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    lines = [f"{e.patch_path}\t{e.site_id}\t{e.split}" for e in manifest.entries]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_manifest(path: str | Path, seed: int = 0) -> DatasetManifest:
    entries = []
    counts: dict[str, int] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        patch_path, site_id, split = line.split("\t")
        entries.append(ManifestEntry(patch_path, site_id, split))
        counts[split] = counts.get(split, 0) + 1
    return DatasetManifest(entries=entries, seed=seed, class_counts=counts)


def write_meta(meta: dict, path: str | Path) -> None:
    lines = [f"{k} = {v}" for k, v in meta.items()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_meta(path: str | Path) -> dict[str, str]:
    meta = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        meta[key.strip()] = value.strip()
    return meta


def generate_dataset(out_dir: str | Path, seed: int, n_sites: int,
                     positive_rate: float, signal_strength: float = 4.0,
                     config: SynthConfig | None = None,
                     train_years=(2017, 2018), test_years=(2019,),
                     nodata_threshold: float = 0.10) -> DatasetManifest:
    """Generate, validate, pair, split, and persist a synthetic dataset.

    Layout under `out_dir`: patches/<site>.mgtp, sites.csv, manifest.tsv,
    dataset.meta. Patches failing NoData validation are dropped and
    counted in the metadata.
    """
    config = config or SynthConfig()
    out_dir = Path(out_dir)
    patch_dir = out_dir / PATCH_DIR
    patch_dir.mkdir(parents=True, exist_ok=True)

    patches, records = synth_scene(seed, n_sites, positive_rate, signal_strength, config)
    kept = [p for p in patches if validate_patch(p, nodata_threshold).accepted]
    n_rejected = len(patches) - len(kept)

    samples, n_unpaired = pair_with_ground_truth(kept, records)
    train, test = temporal_split(samples, train_years, test_years)
    split_of = {id(s): "train" for s in train}
    split_of.update({id(s): "test" for s in test})

    entries = []
    counts = {"positive": 0, "negative": 0}
    for sample in samples:
        tag = split_of.get(id(sample))
        if tag is None:
            continue
        rel = f"{PATCH_DIR}/{sample.site_id}.mgtp"
        write_patch(sample.patch, out_dir / rel)
        entries.append(ManifestEntry(rel, sample.site_id, tag))
        counts["positive" if sample.label == 1 else "negative"] += 1

    write_site_csv(records, out_dir / SITES_NAME)
    manifest = DatasetManifest(entries=entries, seed=seed, class_counts=counts)
    write_manifest(manifest, out_dir / MANIFEST_NAME)
    write_meta({
        "seed": seed,
        "n_sites": n_sites,
        "positive_rate": positive_rate,
        "signal_strength": signal_strength,
        "patch_side": config.patch_side,
        "resolution": config.resolution,
        "train_years": ",".join(str(y) for y in train_years),
        "test_years": ",".join(str(y) for y in test_years),
        "n_train": len(train),
        "n_test": len(test),
        "n_rejected_nodata": n_rejected,
        "n_unpaired": n_unpaired,
        "count_positive": counts["positive"],
        "count_negative": counts["negative"],
    }, out_dir / META_NAME)
    return manifest
