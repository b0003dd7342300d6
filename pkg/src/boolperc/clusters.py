"""Origin cluster of the union of balls and its statistics D, M, N."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .model import Realization

# balls above this radius quantile bypass the grid (heavy-tailed laws)
LARGE_QUANTILE = 0.99
_KEY_LIMIT = 1 << 62


@dataclass(frozen=True)
class ClusterSummary:
    covered: bool
    N: int
    D: float
    M: float
    boundary_hit: bool
    seed: int = 0
    trunc_err: float = 0.0

    def csv_row(self) -> str:
        return (f"{self.seed},{int(self.covered)},{self.N},{self.D:.17g},{self.M:.17g},"
                f"{int(self.boundary_hit)},{self.trunc_err:.17g}")

    CSV_HEADER = "seed,covered,N,D,M,boundary_hit,trunc_err"


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        parent = self.parent
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(self, i: int, j: int):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            if ri < rj:
                ri, rj = rj, ri
            self.parent[ri] = rj


def _grid_pairs(centers: np.ndarray, idx: np.ndarray, reach: float, side: float):
    """Candidate pairs (i < j) among `idx` whose cells are within `reach`."""
    pts = centers[idx]
    d = pts.shape[1]
    while True:
        m = max(1, math.ceil(reach / side))
        cells = np.floor(pts / side).astype(np.int64)
        cells -= cells.min(axis=0) - m
        shape = cells.max(axis=0) + m + 1
        if float(np.prod(shape.astype(float))) < _KEY_LIMIT:
            break
        side *= 2.0
    strides = np.cumprod(np.concatenate([[1], shape[:-1]])).astype(np.int64)
    keys = cells @ strides
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    offsets = np.array(list(itertools.product(range(-m, m + 1), repeat=d)), dtype=np.int64)
    probe = (keys[:, None] + (offsets @ strides)[None, :]).ravel()
    left = np.searchsorted(sorted_keys, probe, "left")
    counts = np.searchsorted(sorted_keys, probe, "right") - left
    owner = np.repeat(np.repeat(np.arange(len(idx)), len(offsets)), counts)
    starts = np.repeat(left, counts)
    within = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    other = order[starts + within]
    keep = owner < other
    return idx[owner[keep]], idx[other[keep]]


def intersecting_pairs(centers: np.ndarray, radii: np.ndarray, cell_size: float | None = None):
    """All index pairs (i, j), i < j, of intersecting open balls."""
    n = len(radii)
    if n < 2:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    large = radii > np.quantile(radii, LARGE_QUANTILE)
    small_idx = np.flatnonzero(~large)
    parts_i, parts_j = [], []
    if len(small_idx) > 1:
        rmax = float(radii[small_idx].max())
        side = cell_size if cell_size is not None else 2.0 * rmax
        i, j = _grid_pairs(centers, small_idx, 2.0 * rmax, side)
        parts_i.append(i)
        parts_j.append(j)
    for b in np.flatnonzero(large):
        others = np.flatnonzero(~large | (np.arange(n) > b))
        others = others[others != b]
        parts_i.append(np.full(len(others), b))
        parts_j.append(others)
    i = np.concatenate(parts_i) if parts_i else np.zeros(0, dtype=np.int64)
    j = np.concatenate(parts_j) if parts_j else np.zeros(0, dtype=np.int64)
    diff = centers[i] - centers[j]
    dist2 = np.einsum("ij,ij->i", diff, diff)
    hit = np.sqrt(dist2) < radii[i] + radii[j]
    a, b = np.minimum(i[hit], j[hit]), np.maximum(i[hit], j[hit])
    return a, b


def component_labels(centers: np.ndarray, radii: np.ndarray, cell_size: float | None = None) -> np.ndarray:
    """Union-find root of every ball; equal labels mean same component."""
    uf = UnionFind(len(radii))
    for a, b in zip(*intersecting_pairs(centers, radii, cell_size)):
        uf.union(int(a), int(b))
    labels = np.array(uf.parent, dtype=np.int64)
    while True:
        jumped = labels[labels]
        if np.array_equal(jumped, labels):
            return labels
        labels = jumped


def component_of(centers: np.ndarray, radii: np.ndarray, seeds: np.ndarray,
                 cell_size: float | None = None) -> np.ndarray:
    """Indices of every ball connected to one of the `seeds` indices."""
    if len(seeds) == 0:
        return np.zeros(0, dtype=np.int64)
    labels = component_labels(centers, radii, cell_size)
    return np.flatnonzero(np.isin(labels, labels[seeds]))


def _origin_balls(centers: np.ndarray, radii: np.ndarray) -> np.ndarray:
    return np.flatnonzero(np.linalg.norm(centers, axis=1) < radii)


def origin_cluster(real: Realization, cell_size: float | None = None) -> list[int]:
    """Indices of the balls forming S, the component of the union holding 0."""
    seeds = _origin_balls(real.centers, real.radii)
    return component_of(real.centers, real.radii, seeds, cell_size).tolist()


def union_diameter(centers: np.ndarray, radii: np.ndarray) -> float:
    """max over pairs (i, j), i = j allowed, of |c_i - c_j| + r_i + r_j."""
    best = 0.0
    block = max(1, (1 << 21) // max(1, centers.size))
    for s in range(0, len(radii), block):
        c, r = centers[s:s + block], radii[s:s + block]
        diff = c[:, None, :] - centers[None, :, :]
        span = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff)) + r[:, None] + radii[None, :]
        best = max(best, float(span.max()))
    return best


def summarize(real: Realization, members) -> ClusterSummary:
    members = np.asarray(members, dtype=np.int64)
    if len(members) == 0:
        return ClusterSummary(False, 0, 0.0, 0.0, False, real.seed, real.truncation_error)
    c, r = real.centers[members], real.radii[members]
    M = float(np.max(np.linalg.norm(c, axis=1) + r))
    D = union_diameter(c, r)
    boundary = bool(np.any(np.max(np.abs(c), axis=1) + r > real.window.half_width))
    return ClusterSummary(True, len(members), D, M, boundary, real.seed, real.truncation_error)


def cluster_stats(real: Realization, cell_size: float | None = None) -> ClusterSummary:
    return summarize(real, origin_cluster(real, cell_size))
