"""Great-circle geometry and brute-force nearest-neighbour search."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

EARTH_RADIUS_KM = 6371.0


def _check_coord(lat: float, lon: float) -> None:
    if not -90.0 <= lat <= 90.0:
        raise ValueError(f"latitude out of range: {lat}")
    if not -180.0 <= lon <= 180.0:
        raise ValueError(f"longitude out of range: {lon}")


def haversine(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Great-circle distance in kilometers between (lat, lon) pairs in degrees."""
    _check_coord(*a)
    _check_coord(*b)
    phi1, phi2 = math.radians(a[0]), math.radians(b[0])
    dphi = phi2 - phi1
    dlam = math.radians(b[1] - a[1])
    h = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def haversine_matrix(lat: np.ndarray, lon: np.ndarray) -> np.ndarray:
    """Pairwise great-circle distances (km) for degree-valued coordinate arrays."""
    phi = np.radians(np.asarray(lat, dtype=np.float64))
    lam = np.radians(np.asarray(lon, dtype=np.float64))
    dphi = phi[:, None] - phi[None, :]
    dlam = lam[:, None] - lam[None, :]
    h = np.sin(dphi / 2.0) ** 2 + np.cos(phi)[:, None] * np.cos(phi)[None, :] * np.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * np.arcsin(np.minimum(1.0, np.sqrt(h)))


def knn_indices(lat: np.ndarray, lon: np.ndarray, k: int,
                chunk: int = 512) -> np.ndarray:
    """(n, k) nearest-neighbour index table over all sites, self excluded.

    Distance ties break toward the lower index, matching
    `knn_neighbourhood` when site ids are ordered like the arrays.
    Chunked so the full pairwise matrix never materializes.
    """
    n = lat.shape[0]
    if n < k + 1:
        raise ValueError(f"need at least {k + 1} sites, found {n}")
    out = np.empty((n, k), dtype=np.int64)
    order_rank = np.arange(n)
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        d = haversine_matrix_block(lat[start:stop], lon[start:stop], lat, lon)
        rows = np.arange(start, stop)
        d[np.arange(stop - start), rows] = np.inf
        idx = np.lexsort((np.broadcast_to(order_rank, d.shape), d), axis=1)
        out[start:stop] = idx[:, :k]
    return out


def haversine_matrix_block(lat_a: np.ndarray, lon_a: np.ndarray,
                           lat_b: np.ndarray, lon_b: np.ndarray) -> np.ndarray:
    """Cross distances (km) between two coordinate sets, shaped (len(a), len(b))."""
    phi_a, phi_b = np.radians(lat_a), np.radians(lat_b)
    lam_a, lam_b = np.radians(lon_a), np.radians(lon_b)
    h = (np.sin((phi_b[None, :] - phi_a[:, None]) / 2.0) ** 2
         + np.cos(phi_a)[:, None] * np.cos(phi_b)[None, :]
         * np.sin((lam_b[None, :] - lam_a[:, None]) / 2.0) ** 2)
    return 2.0 * EARTH_RADIUS_KM * np.arcsin(np.minimum(1.0, np.sqrt(h)))


def knn_neighbourhood(pivot, sites: Sequence, k: int = 10) -> list:
    """Pivot followed by its k nearest sites by great-circle distance.

    Candidates sharing the pivot's id are excluded; distance ties are
    broken toward the smaller site id so the ordering is total.
    """
    candidates = [s for s in sites if s.id != pivot.id]
    if len(candidates) < k:
        raise ValueError(f"need at least {k} candidate sites, found {len(candidates)}")
    lat = np.array([s.lat for s in candidates])
    lon = np.array([s.lon for s in candidates])
    phi0, lam0 = math.radians(pivot.lat), math.radians(pivot.lon)
    phi, lam = np.radians(lat), np.radians(lon)
    h = np.sin((phi - phi0) / 2.0) ** 2 + math.cos(phi0) * np.cos(phi) * np.sin((lam - lam0) / 2.0) ** 2
    dist = 2.0 * EARTH_RADIUS_KM * np.arcsin(np.minimum(1.0, np.sqrt(h)))
    order = sorted(range(len(candidates)), key=lambda i: (dist[i], candidates[i].id))
    return [pivot] + [candidates[i] for i in order[:k]]
