"""Synthetic scene generator with a planted, graph-aware signal.

Replaces the institutional ground-truth database with a seeded world
whose statistics mirror it: ~2264 sites, roughly one third positive.
Three latent environmental surfaces (temperature, moisture, vegetation)
are smooth mixtures of Gaussian bumps plus a per-site idiosyncratic
component. A site's infection risk blends its own latent state with the
mean of its ten nearest neighbours, so neighbourhood aggregation is
genuinely informative: the idiosyncratic share of a neighbour's state is
visible only in that neighbour's own patch.

Band values are deterministic functions of the latents, corrupted by a
month-dependent gain and offset. The label depends on the annual latent,
so undoing the seasonal corruption (what a month-conditioned normalizer
can learn) recovers signal that an unconditioned one cannot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date, timedelta

import numpy as np

from ..graphbuild.geo import knn_indices
from .patch import BAND_ORDER, N_BANDS, PatchTensor
from .records import SiteRecord

# band = BASE + MIX @ (temperature, moisture, vegetation); fixed "sensor model"
BAND_BASE = np.array([0.42, 0.38, 0.45, 0.40, 0.62, 0.55, 0.48])
BAND_MIX = np.array([
    [0.050, -0.060, 0.010],   # B1
    [-0.040, 0.080, 0.020],   # B2
    [0.030, 0.050, -0.070],   # B3
    [0.080, -0.030, -0.050],  # B4
    [-0.060, 0.040, 0.090],   # B8A
    [0.090, 0.070, 0.030],    # B11
    [-0.050, -0.080, 0.060],  # B12
])
MONTH_PHASE = np.array([0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 1.0])  # per band


@dataclass(frozen=True)
class SynthConfig:
    lat_range: tuple[float, float] = (43.0, 46.0)
    lon_range: tuple[float, float] = (9.0, 13.0)
    patch_side: int = 32
    resolution: float = 20.0
    n_bumps: int = 40
    bump_scale_range: tuple[float, float] = (0.08, 0.35)   # degrees
    idiosyncratic_weight: float = 1.0
    self_weight: float = 0.35
    neighbour_weight: float = 0.65
    k_label: int = 10
    years: tuple[int, ...] = (2017, 2018, 2019)
    year_weights: tuple[float, ...] = (0.35, 0.35, 0.30)
    texture_noise: float = 0.02
    covariate_noise: float = 0.4
    month_gain_amp: float = 0.30
    month_offset_amp: float = 0.08
    nodata_patch_rate: float = 0.10
    nodata_reject_rate: float = 0.01


@dataclass
class BumpField:
    """Smooth scalar surface: mixture of isotropic Gaussian bumps."""

    centers: np.ndarray    # (K, 2) lat/lon
    scales: np.ndarray     # (K,)
    amplitudes: np.ndarray  # (K,)

    @staticmethod
    def random(rng: np.random.Generator, config: SynthConfig) -> "BumpField":
        k = config.n_bumps
        lat0, lat1 = config.lat_range
        lon0, lon1 = config.lon_range
        margin_lat = 0.1 * (lat1 - lat0)
        margin_lon = 0.1 * (lon1 - lon0)
        centers = np.column_stack([
            rng.uniform(lat0 - margin_lat, lat1 + margin_lat, k),
            rng.uniform(lon0 - margin_lon, lon1 + margin_lon, k)])
        scales = rng.uniform(*config.bump_scale_range, k)
        amplitudes = rng.standard_normal(k)
        return BumpField(centers, scales, amplitudes)

    def __call__(self, lat: np.ndarray, lon: np.ndarray) -> np.ndarray:
        d2 = ((lat[:, None] - self.centers[None, :, 0]) ** 2
              + (lon[:, None] - self.centers[None, :, 1]) ** 2)
        return np.sum(self.amplitudes[None, :] * np.exp(-d2 / (2.0 * self.scales[None, :] ** 2)),
                      axis=1)


def _standardize(x: np.ndarray) -> np.ndarray:
    spread = x.std()
    if spread < 1e-12:
        return np.zeros_like(x)
    return (x - x.mean()) / spread


def _month_gain(months: np.ndarray, band: int, config: SynthConfig) -> np.ndarray:
    phase = 2.0 * math.pi * (months - 1 - MONTH_PHASE[band]) / 12.0
    return 1.0 + config.month_gain_amp * np.sin(phase)


def _month_offset(months: np.ndarray, band: int, config: SynthConfig) -> np.ndarray:
    phase = 2.0 * math.pi * (months - 1 - MONTH_PHASE[band] - 3.0) / 12.0
    return config.month_offset_amp * np.sin(phase)


def _calibrate_intercept(risk: np.ndarray, strength: float, rate: float) -> float:
    """Intercept c such that mean(sigmoid(c + strength * risk)) == rate."""
    lo, hi = -40.0, 40.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.mean(1.0 / (1.0 + np.exp(-(mid + strength * risk)))) < rate:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _region_capacity(config: SynthConfig) -> int:
    lat0, lat1 = config.lat_range
    lon0, lon1 = config.lon_range
    mean_lat = math.radians(0.5 * (lat0 + lat1))
    area_km2 = (lat1 - lat0) * 111.0 * (lon1 - lon0) * 111.0 * math.cos(mean_lat)
    return int(area_km2 / 4.0)  # one site per 2 km x 2 km cell


def synth_scene(seed: int, n_sites: int, positive_rate: float,
                signal_strength: float = 4.0,
                config: SynthConfig | None = None
                ) -> tuple[list[PatchTensor], list[SiteRecord]]:
    """Generate one patch and one ground-truth record per synthetic site."""
    config = config or SynthConfig()
    if n_sites < 20:
        raise ValueError(f"need at least 20 sites, got {n_sites}")
    if not 0.0 < positive_rate < 1.0:
        raise ValueError(f"positive_rate must lie in (0, 1), got {positive_rate}")
    capacity = _region_capacity(config)
    if n_sites > capacity:
        raise ValueError(f"region too small for {n_sites} sites (capacity {capacity})")

    rng = np.random.default_rng(seed)
    lat = rng.uniform(*config.lat_range, n_sites)
    lon = rng.uniform(*config.lon_range, n_sites)

    surfaces = [BumpField.random(rng, config) for _ in range(3)]
    idio = rng.standard_normal((n_sites, 3)) * config.idiosyncratic_weight
    latents = np.column_stack([_standardize(_standardize(f(lat, lon)) + idio[:, i])
                               for i, f in enumerate(surfaces)])
    temperature, moisture, vegetation = latents.T

    # planted risk: own state blended with the mean over the ten nearest sites
    z = _standardize(0.5 * temperature + 0.5 * moisture)
    neighbours = knn_indices(lat, lon, config.k_label)
    risk = _standardize(config.self_weight * z
                        + config.neighbour_weight * z[neighbours].mean(axis=1))
    if signal_strength == 0.0:
        probs = np.full(n_sites, positive_rate)
    else:
        c = _calibrate_intercept(risk, signal_strength, positive_rate)
        probs = 1.0 / (1.0 + np.exp(-(c + signal_strength * risk)))
    labels = (rng.random(n_sites) < probs).astype(int)

    # observation calendar
    years = rng.choice(np.asarray(config.years), size=n_sites,
                       p=np.asarray(config.year_weights))
    months = rng.integers(1, 13, size=n_sites)
    days = rng.integers(1, 29, size=n_sites)
    patch_offsets = rng.integers(-7, 8, size=n_sites)

    # seasonal site covariates
    season = np.sin(2.0 * math.pi * (months - 4) / 12.0)
    noise = rng.standard_normal((n_sites, 3)) * config.covariate_noise
    lst_day = 288.0 + 8.0 * temperature + 3.0 * season + noise[:, 0]
    lst_night = 278.0 + 6.0 * temperature + 2.0 * season + noise[:, 1]
    ssm = np.clip(45.0 + 14.0 * moisture - 4.0 * season + noise[:, 2], 0.0, 100.0)

    records = []
    patches = []
    side = config.patch_side
    for i in range(n_sites):
        obs_date = date(int(years[i]), int(months[i]), int(days[i]))
        site_id = f"site{i:05d}"
        records.append(SiteRecord(
            id=site_id, lat=float(lat[i]), lon=float(lon[i]),
            observation_date=obs_date, label=int(labels[i]),
            lst_day=float(lst_day[i]), lst_night=float(lst_night[i]),
            ssm=float(ssm[i])))

        acq_date = obs_date + timedelta(days=int(patch_offsets[i]))
        month = acq_date.month
        base = BAND_BASE + BAND_MIX @ latents[i]
        bands = np.empty((N_BANDS, side, side), dtype=np.float64)
        ramp = rng.standard_normal(2) * config.texture_noise
        gy, gx = np.mgrid[0:side, 0:side] / max(side - 1, 1)
        for b in range(N_BANDS):
            texture = rng.standard_normal((side, side)) * config.texture_noise
            value = base[b] + ramp[0] * (gy - 0.5) + ramp[1] * (gx - 0.5) + texture
            value = value * _month_gain(np.array([month]), b, config)[0] \
                + _month_offset(np.array([month]), b, config)[0]
            bands[b] = np.maximum(value, 0.0)

        mask = np.zeros((side, side), dtype=bool)
        roll = rng.random()
        if roll < config.nodata_reject_rate:
            mask = _cloud_blob(rng, side, target=rng.uniform(0.12, 0.25))
        elif roll < config.nodata_reject_rate + config.nodata_patch_rate:
            mask = _cloud_blob(rng, side, target=rng.uniform(0.01, 0.09))

        patches.append(PatchTensor(
            bands=bands.astype(np.float32), nodata_mask=mask,
            resolution=config.resolution, acquisition_date=acq_date,
            center=(float(lat[i]), float(lon[i]))))
    return patches, records


def _cloud_blob(rng: np.random.Generator, side: int, target: float) -> np.ndarray:
    """Elliptical mask blob covering roughly `target` of the patch."""
    cy, cx = rng.uniform(0.2, 0.8, 2) * side
    area = target * side * side
    ry = math.sqrt(area / math.pi) * rng.uniform(0.7, 1.4)
    rx = area / (math.pi * ry)
    yy, xx = np.mgrid[0:side, 0:side]
    return ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 <= 1.0
