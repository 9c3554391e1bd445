"""Multi-relation affinities for a geographic neighbourhood.

Three relations are stacked in fixed order: great-circle distance, land
surface temperature, and soil moisture. Pairwise distances are scaled to
unit spread per relation (kilometers, kelvin, and percent are not
commensurable), passed through a Gaussian kernel, and made doubly
stochastic with alternating row/column normalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ..numcore.tensor import Tensor
from .geo import haversine_matrix, knn_neighbourhood

RELATION_NAMES = ("haversine", "lst", "ssm")
N_RELATIONS = len(RELATION_NAMES)
DEFAULT_SIGMA = 1.0
DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 100


class SinkhornError(RuntimeError):
    """Raised when alternating normalization fails to converge."""

    def __init__(self, deviation: float, iterations: int):
        self.deviation = deviation
        self.iterations = iterations
        super().__init__(
            f"no convergence after {iterations} iterations; "
            f"worst row/column-sum deviation {deviation:.3e}")


def _values(x) -> np.ndarray:
    return x.data if isinstance(x, Tensor) else np.asarray(x)


def sinkhorn_normalize(M, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER):
    """Doubly stochastic scaling of non-negative matrices.

    Accepts a numpy array or an autodiff Tensor shaped (..., N, N);
    leading axes are normalized independently. Zero entries stay exactly
    zero. Raises on negative input, on an all-zero row or column, and —
    with the deviation achieved — on non-convergence.
    """
    raw = _values(M)
    if raw.ndim < 2 or raw.shape[-1] != raw.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {raw.shape}")
    if raw.min() < 0:
        raise ValueError("matrix entries must be non-negative")
    if np.any(raw.sum(axis=-1) == 0) or np.any(raw.sum(axis=-2) == 0):
        raise ValueError("matrix has an all-zero row or column (no total support)")

    x = M
    deviation = np.inf
    for iteration in range(1, max_iter + 1):
        x = x / x.sum(axis=-1, keepdims=True)
        x = x / x.sum(axis=-2, keepdims=True)
        v = _values(x)
        deviation = max(np.abs(v.sum(axis=-1) - 1.0).max(),
                        np.abs(v.sum(axis=-2) - 1.0).max())
        if deviation < tol:
            return x
    raise SinkhornError(deviation, max_iter)


def edge_distances(nodes: Sequence) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pairwise relation distances. LST averages the day and night bands."""
    for s in nodes:
        if s.lst_day is None or s.lst_night is None or s.ssm is None:
            raise ValueError(f"site {s.id!r} is missing an environmental covariate")
    lat = np.array([s.lat for s in nodes])
    lon = np.array([s.lon for s in nodes])
    d_geo = haversine_matrix(lat, lon)
    lst_day = np.array([s.lst_day for s in nodes], dtype=np.float64)
    lst_night = np.array([s.lst_night for s in nodes], dtype=np.float64)
    ssm = np.array([s.ssm for s in nodes], dtype=np.float64)
    d_lst = (np.abs(lst_day[:, None] - lst_day[None, :])
             + np.abs(lst_night[:, None] - lst_night[None, :])) / 2.0
    d_ssm = np.abs(ssm[:, None] - ssm[None, :])
    np.fill_diagonal(d_geo, 0.0)
    return d_geo, d_lst, d_ssm


def standardize_distances(D: np.ndarray) -> np.ndarray:
    """Scale to unit standard deviation of the off-diagonal entries.

    A degenerate neighbourhood (all off-diagonal distances equal) is left
    unscaled; the kernel then assigns it a uniform similarity anyway.
    """
    n = D.shape[0]
    off = D[~np.eye(n, dtype=bool)]
    spread = off.std()
    if spread < 1e-12:
        return D.copy()
    return D / spread


def gaussian_similarity(D: np.ndarray, sigma: float = DEFAULT_SIGMA) -> np.ndarray:
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    D = np.asarray(D, dtype=np.float64)
    if D.min() < 0:
        raise ValueError("distances must be non-negative")
    return np.exp(-(D * D) / (2.0 * sigma * sigma))


@dataclass
class AffinityStack:
    """N x N x G relation similarities; `normalized` marks the stack doubly stochastic."""

    matrices: np.ndarray
    normalized: bool = False

    def normalize(self, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> "AffinityStack":
        slices = np.moveaxis(self.matrices, -1, 0)          # (G, N, N)
        normalized = sinkhorn_normalize(slices, tol, max_iter)
        return AffinityStack(np.moveaxis(normalized, 0, -1), normalized=True)


@dataclass
class NeighbourhoodGraph:
    """Pivot-centred node features plus the relation affinity stack."""

    node_features: np.ndarray            # (N, F0)
    affinities: np.ndarray               # (N, N, G), doubly stochastic per slice
    node_site_ids: list
    pivot_index: int = 0
    relation_names: tuple = field(default=RELATION_NAMES)


def affinity_stack(nodes: Sequence, sigma: float = DEFAULT_SIGMA,
                   standardize: bool = True, self_loops: bool = True) -> AffinityStack:
    """Unnormalized similarity stack for an ordered node list."""
    stack = []
    for D in edge_distances(nodes):
        if standardize:
            D = standardize_distances(D)
        S = gaussian_similarity(D, sigma)
        if not self_loops:
            np.fill_diagonal(S, 0.0)
        stack.append(S)
    return AffinityStack(np.stack(stack, axis=-1), normalized=False)


def build_graph(pivot, sites: Sequence, features: dict, k: int = 10,
                sigma: float = DEFAULT_SIGMA, standardize: bool = True,
                self_loops: bool = True, tol: float = DEFAULT_TOL,
                max_iter: int = DEFAULT_MAX_ITER) -> NeighbourhoodGraph:
    """k-nearest neighbourhood around a pivot with normalized affinities.

    `features` maps site id to its node feature vector; the pivot sits at
    node index 0.
    """
    nodes = knn_neighbourhood(pivot, sites, k)
    missing = [s.id for s in nodes if s.id not in features]
    if missing:
        raise ValueError(f"missing node features for sites: {missing}")
    stack = affinity_stack(nodes, sigma, standardize, self_loops).normalize(tol, max_iter)
    node_features = np.stack([np.asarray(features[s.id]) for s in nodes])
    return NeighbourhoodGraph(node_features=node_features,
                              affinities=stack.matrices,
                              node_site_ids=[s.id for s in nodes])


def write_graph_dump(graph: NeighbourhoodGraph, path: str | Path) -> None:
    """Debug dump: header `N G`, then one `i j g weight` line per nonzero edge."""
    n, _, g = graph.affinities.shape
    lines = [f"{n} {g}"]
    for gi in range(g):
        for i in range(n):
            for j in range(n):
                w = graph.affinities[i, j, gi]
                if w != 0.0:
                    lines.append(f"{i} {j} {gi} {w:.10g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
