"""Euclidean primitives: open balls, ball volumes and certified sphere nets."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree


class DimensionMismatch(ValueError):
    pass


class GridTooCoarse(ValueError):
    """The candidate grid cannot certify a cover at the requested spacing."""


@functools.lru_cache(maxsize=None)
def unit_ball_volume(k: int) -> float:
    """Lebesgue volume of the unit ball in R^k."""
    if k < 0:
        raise ValueError(f"dimension must be nonnegative, got {k}")
    if k == 0:
        return 1.0
    if k == 1:
        return 2.0
    return unit_ball_volume(k - 2) * 2.0 * math.pi / k


def ball_volume(d: int, r: float) -> float:
    return unit_ball_volume(d) * r**d


@dataclass(frozen=True)
class Ball:
    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if len(self.center) == 0:
            raise ValueError("center needs at least one coordinate")

    @property
    def dimension(self) -> int:
        return len(self.center)

    def contains(self, x) -> bool:
        return _dist(self.center, x) < self.radius


def _dist(a, b) -> float:
    return math.sqrt(sum((p - q) ** 2 for p, q in zip(a, b)))


def _check_dims(a: Ball, b: Ball):
    if a.dimension != b.dimension:
        raise DimensionMismatch(f"balls live in R^{a.dimension} and R^{b.dimension}")


def balls_intersect(a: Ball, b: Ball) -> bool:
    # open balls: tangency is not intersection
    _check_dims(a, b)
    return _dist(a.center, b.center) < a.radius + b.radius


def pair_span(a: Ball, b: Ball) -> float:
    """sup of |x - y| over x in a, y in b."""
    _check_dims(a, b)
    return _dist(a.center, b.center) + (a.radius + b.radius)


@dataclass(frozen=True, eq=False)
class SphereNet:
    """Finite subset of the sphere S_radius whose `spacing`-balls cover it.

    `grid_delta` is the certified covering radius of the candidate grid the
    net was picked from; every candidate lies within `spacing - grid_delta`
    (strictly) of a net point, which gives the cover.
    """

    radius: float
    spacing: float
    points: np.ndarray
    dimension: int
    grid_delta: float

    def __len__(self):
        return len(self.points)

    def max_gap(self, samples: np.ndarray) -> float:
        """Largest distance from a sample point to its nearest net point."""
        dist, _ = cKDTree(self.points).query(samples)
        return float(np.max(dist))


# Candidate grid covering radius as a fraction of the spacing. The fine value
# is used where affordable; higher dimensions fall back to coarser grids.
_GRID_FRACTION = {2: 0.1, 3: 0.25}
_CANDIDATE_BUDGET = 5_000_000


def _face_count(d: int, radius: float, delta: float) -> int:
    # cube-surface grid with step h = 2/n has covering radius sqrt(d-1)*h/2 on
    # the unit cube; radial projection onto the sphere is 1-Lipschitz there
    return max(1, math.ceil(radius * math.sqrt(d - 1) / delta))


def _cube_surface_grid(d: int, n: int) -> np.ndarray:
    """Integer points of {0..n}^d with some coordinate in {0, n}, sorted."""
    free = np.stack(
        np.meshgrid(*([np.arange(n + 1)] * (d - 1)), indexing="ij"), axis=-1
    ).reshape(-1, d - 1)
    faces = []
    for axis in range(d):
        for side in (0, n):
            face = np.insert(free, axis, side, axis=1)
            faces.append(face)
    return np.unique(np.concatenate(faces), axis=0)


def sphere_candidates(d: int, radius: float, delta: float) -> np.ndarray:
    """Deterministic points on S_radius within `delta` of every sphere point."""
    n = _face_count(d, radius, delta)
    idx = _cube_surface_grid(d, n)
    cube = -1.0 + 2.0 * idx / n
    return radius * cube / np.linalg.norm(cube, axis=1, keepdims=True)


def grid_net_size(d: int, radius: float, spacing: float) -> int:
    """Cardinality of the projected cube-surface grid used directly as a net.

    This is a valid (non-greedy) cover whenever its covering radius is below
    `spacing`; it is used for dimensions too large to run the greedy pass.
    """
    if d == 1:
        return 2
    n = math.floor(radius * math.sqrt(d - 1) / spacing) + 1
    return (n + 1) ** d - (n - 1) ** d


def build_sphere_net(d: int, radius: float, spacing: float = 1.0) -> SphereNet:
    """Greedy cover of S_radius in R^d by balls of radius `spacing`.

    Candidates come from a projected cube-surface grid. The greedy pass takes
    the first uncovered candidate, then places a net point at whichever
    candidate in its neighbourhood covers the most still-uncovered
    candidates. Deterministic for fixed inputs.
    """
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if not radius > spacing > 0:
        raise ValueError("need radius > spacing > 0")
    if d == 1:
        pts = np.array([[-radius], [radius]])
        return SphereNet(radius, spacing, pts, 1, 0.0)
    fraction = _GRID_FRACTION.get(d, 0.45)
    delta = fraction * spacing
    n = _face_count(d, radius, delta)
    expected = (n + 1) ** d - (n - 1) ** d
    if expected > _CANDIDATE_BUDGET:
        raise GridTooCoarse(
            f"d={d}, radius={radius}: {expected} candidates exceed the budget; "
            "a grid fine enough to certify the cover is not affordable"
        )
    cands = sphere_candidates(d, radius, delta)
    true_delta = radius * math.sqrt(d - 1) / n
    reach = spacing - true_delta
    if reach <= 0:
        raise GridTooCoarse("increase grid density")
    tree = cKDTree(cands)
    covered = np.zeros(len(cands), dtype=bool)
    chosen = []
    for q in range(len(cands)):
        if covered[q]:
            continue
        # shrink slightly so the strict inequality survives rounding
        options = tree.query_ball_point(cands[q], reach * (1 - 1e-12))
        options.sort()
        best, best_gain, best_ball = q, -1, None
        for idx, ball in zip(options, tree.query_ball_point(cands[options], reach * (1 - 1e-12))):
            gain = int(np.count_nonzero(~covered[ball]))
            if gain > best_gain:
                best, best_gain, best_ball = idx, gain, ball
        covered[best_ball] = True
        chosen.append(best)
    return SphereNet(radius, spacing, cands[chosen], d, true_delta)


@functools.lru_cache(maxsize=None)
def sphere_net_size(d: int, radius: float, spacing: float = 1.0) -> tuple[int, str]:
    """Net cardinality and the construction that produced it."""
    try:
        return len(build_sphere_net(d, radius, spacing)), "greedy"
    except GridTooCoarse:
        return grid_net_size(d, radius, spacing), "grid"


def uniform_on_sphere(rng: np.random.Generator, n: int, d: int, radius: float) -> np.ndarray:
    x = rng.standard_normal((n, d))
    return radius * x / np.linalg.norm(x, axis=1, keepdims=True)
