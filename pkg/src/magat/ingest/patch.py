"""Multi-band raster patches: container, binary file format, resampling,
and NoData validation.

The seven bands are the set shared by the two satellite families this
pipeline targets, in fixed order B1, B2, B3, B4, B8A, B11, B12. Invalid
pixels carry the sentinel value -1 alongside a boolean mask; band values
themselves are reflectance-like and non-negative, so the sentinel is
unambiguous.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path

import numpy as np

BAND_ORDER = ("B1", "B2", "B3", "B4", "B8A", "B11", "B12")
N_BANDS = len(BAND_ORDER)
RGB_BANDS = ("B2", "B3", "B4")
SPECTRAL_BANDS = ("B1", "B8A", "B11", "B12")
NODATA_VALUE = -1.0
DEFAULT_RESOLUTION_M = 20.0
NODATA_THRESHOLD = 0.10

MAGIC = b"MGTP"
VERSION = 1
_EPOCH = date(1970, 1, 1)


def band_indices(names) -> tuple[int, ...]:
    return tuple(BAND_ORDER.index(b) for b in names)


@dataclass
class PatchTensor:
    """C x H x W multi-band patch with NoData mask and acquisition metadata."""

    bands: np.ndarray            # (7, H, W) float32
    nodata_mask: np.ndarray      # (H, W) bool
    resolution: float            # meters per pixel
    acquisition_date: date
    center: tuple[float, float]  # (lat, lon) degrees

    def __post_init__(self):
        self.bands = np.asarray(self.bands, dtype=np.float32)
        self.nodata_mask = np.asarray(self.nodata_mask, dtype=bool)
        if self.bands.ndim != 3 or self.bands.shape[0] != N_BANDS:
            raise ValueError(f"bands must be ({N_BANDS}, H, W), got {self.bands.shape}")
        if self.bands.shape[1] != self.bands.shape[2]:
            raise ValueError(f"patches must be square, got {self.bands.shape[1:]}")
        if self.nodata_mask.shape != self.bands.shape[1:]:
            raise ValueError("mask shape does not match band shape")
        if self.resolution <= 0:
            raise ValueError(f"resolution must be positive, got {self.resolution}")
        self.bands[:, self.nodata_mask] = NODATA_VALUE

    @property
    def side(self) -> int:
        return self.bands.shape[1]

    def nodata_fraction(self) -> float:
        return float(self.nodata_mask.mean())

    def month(self) -> int:
        return self.acquisition_date.month


@dataclass
class ValidationResult:
    accepted: bool
    nodata_fraction: float
    reason: str | None = None


def validate_patch(patch: PatchTensor, threshold: float = NODATA_THRESHOLD) -> ValidationResult:
    """Accept unless the NoData fraction strictly exceeds the threshold."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {threshold}")
    fraction = patch.nodata_fraction()
    if fraction > threshold:
        return ValidationResult(False, fraction,
                                f"NoData fraction {fraction:.3f} exceeds {threshold:.3f}")
    return ValidationResult(True, fraction)


# -- resampling ----------------------------------------------------------------


def _axis_weights(n_src: int, n_dst: int, src_res: float, dst_res: float) -> np.ndarray:
    """(n_dst, n_src) interpolation weights along one axis.

    Upsampling uses bilinear weights between source pixel centers;
    downsampling averages by fractional pixel-area overlap.
    """
    w = np.zeros((n_dst, n_src))
    if dst_res < src_res:  # upsampling
        for i in range(n_dst):
            pos = (i + 0.5) * dst_res / src_res - 0.5
            lo = int(np.floor(pos))
            frac = pos - lo
            lo_c = min(max(lo, 0), n_src - 1)
            hi_c = min(max(lo + 1, 0), n_src - 1)
            w[i, lo_c] += 1.0 - frac
            w[i, hi_c] += frac
    else:  # downsampling by area overlap
        for i in range(n_dst):
            start, end = i * dst_res, (i + 1) * dst_res
            s_lo = int(np.floor(start / src_res))
            s_hi = min(int(np.ceil(end / src_res)), n_src)
            for s in range(s_lo, s_hi):
                overlap = min(end, (s + 1) * src_res) - max(start, s * src_res)
                if overlap > 0:
                    w[i, s] = overlap / dst_res
    return w


def resample_band(band: np.ndarray, src_res: float, dst_res: float,
                  mask: np.ndarray | None = None) -> np.ndarray:
    """Resample one band to a new ground resolution.

    NoData pixels (sentinel or explicit mask) are excluded from the
    interpolation weights; a destination pixel with no valid source gets
    the sentinel. Output side = round(side * src_res / dst_res).
    """
    if src_res <= 0 or dst_res <= 0:
        raise ValueError("resolutions must be positive")
    band = np.asarray(band, dtype=np.float64)
    if band.size == 0:
        raise ValueError("cannot resample an empty band")
    if mask is None:
        mask = band == NODATA_VALUE
    valid = (~np.asarray(mask, dtype=bool)).astype(np.float64)
    if not valid.any():
        raise ValueError("cannot resample an all-NoData band")
    if src_res == dst_res:
        out = band.copy()
        out[~valid.astype(bool)] = NODATA_VALUE
        return out

    h, w_in = band.shape
    h_out = int(round(h * src_res / dst_res))
    w_out = int(round(w_in * src_res / dst_res))
    wr = _axis_weights(h, h_out, src_res, dst_res)
    wc = _axis_weights(w_in, w_out, src_res, dst_res)
    num = wr @ (band * valid) @ wc.T
    den = wr @ valid @ wc.T
    out = np.full((h_out, w_out), NODATA_VALUE)
    covered = den > 1e-12
    out[covered] = num[covered] / den[covered]
    return out


def resample_patch(patch: PatchTensor, dst_res: float) -> PatchTensor:
    """Resample all bands of a patch to a common destination resolution."""
    bands = np.stack([resample_band(b, patch.resolution, dst_res, patch.nodata_mask)
                      for b in patch.bands])
    mask = bands[0] == NODATA_VALUE
    return PatchTensor(bands=bands.astype(np.float32), nodata_mask=mask,
                       resolution=dst_res, acquisition_date=patch.acquisition_date,
                       center=patch.center)


# -- binary patch files ----------------------------------------------------------


def write_patch(patch: PatchTensor, path: str | Path) -> None:
    days = (patch.acquisition_date - _EPOCH).days
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<HHBfi", VERSION, patch.side, N_BANDS,
                             patch.resolution, days))
        fh.write(struct.pack("<dd", patch.center[0], patch.center[1]))
        fh.write(np.ascontiguousarray(patch.bands, dtype="<f4").tobytes())
        fh.write(patch.nodata_mask.astype(np.uint8).tobytes())


def read_patch(path: str | Path) -> PatchTensor:
    blob = Path(path).read_bytes()
    if blob[:4] != MAGIC:
        raise ValueError(f"{path}: not a patch file (bad magic)")
    version, side, n_bands, resolution, days = struct.unpack_from("<HHBfi", blob, 4)
    if version != VERSION:
        raise ValueError(f"{path}: unsupported patch version {version}")
    if n_bands != N_BANDS:
        raise ValueError(f"{path}: expected {N_BANDS} bands, found {n_bands}")
    offset = 4 + struct.calcsize("<HHBfi")
    lat, lon = struct.unpack_from("<dd", blob, offset)
    offset += 16
    n = n_bands * side * side
    bands = np.frombuffer(blob, dtype="<f4", count=n, offset=offset)
    bands = bands.reshape(n_bands, side, side).copy()
    offset += 4 * n
    mask = np.frombuffer(blob, dtype=np.uint8, count=side * side, offset=offset)
    mask = mask.reshape(side, side).astype(bool)
    return PatchTensor(bands=bands, nodata_mask=mask, resolution=resolution,
                       acquisition_date=_EPOCH + timedelta(days=int(days)),
                       center=(lat, lon))
