"""Patch-level data plane: resampling, validation, pairing, splitting,
and the synthetic scene generator."""

from .manifest import (DatasetManifest, ManifestEntry, generate_dataset,
                       read_manifest, read_meta, write_manifest, write_meta)
from .pairing import (DEFAULT_MAX_GAP_DAYS, LabeledSample,
                      pair_with_ground_truth, temporal_split)
from .patch import (BAND_ORDER, N_BANDS, NODATA_THRESHOLD, NODATA_VALUE,
                    RGB_BANDS, SPECTRAL_BANDS, PatchTensor, ValidationResult,
                    band_indices, read_patch, resample_band, resample_patch,
                    validate_patch, write_patch)
from .records import SiteRecord, read_site_csv, write_site_csv
from .synth import SynthConfig, synth_scene

__all__ = [
    "PatchTensor", "ValidationResult", "validate_patch",
    "resample_band", "resample_patch", "read_patch", "write_patch",
    "BAND_ORDER", "N_BANDS", "RGB_BANDS", "SPECTRAL_BANDS",
    "NODATA_VALUE", "NODATA_THRESHOLD", "band_indices",
    "SiteRecord", "read_site_csv", "write_site_csv",
    "LabeledSample", "pair_with_ground_truth", "temporal_split",
    "DEFAULT_MAX_GAP_DAYS",
    "SynthConfig", "synth_scene",
    "DatasetManifest", "ManifestEntry", "generate_dataset",
    "read_manifest", "write_manifest", "read_meta", "write_meta",
]
