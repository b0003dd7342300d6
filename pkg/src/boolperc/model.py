"""Finite-window sampling of the marked Poisson process of balls.

Two samplers share one Realization type:

* halo mode: every center in the box [-(L + r_cut), L + r_cut]^d, full
  (untruncated) radii;
* hitting mode: only the balls that meet the window [-L, L]^d, with centers
  restricted to the same halo box. `r_cut = inf` then gives the exact law of
  the window-hitting balls whenever E(R^d) is finite.

In both modes the probability that some omitted ball meets the window is at
most `truncation_error_bound`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .geometry import Ball
from .radius_laws import RadiusLaw, parse_law, tail_moment

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
DEFAULT_MAX_EXPECTED = 2e7


class MemoryBudgetError(ValueError):
    pass


@dataclass(frozen=True)
class ModelParams:
    dimension: int
    intensity: float
    law: RadiusLaw

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if not self.intensity > 0:
            raise ValueError("intensity must be positive")


@dataclass(frozen=True)
class Window:
    half_width: float

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("window half-width must be positive")


@dataclass(frozen=True, eq=False)
class Realization:
    centers: np.ndarray
    radii: np.ndarray
    params: ModelParams
    window: Window
    r_cut: float
    seed: int
    truncation_error: float
    hitting: bool = False

    def __len__(self):
        return len(self.radii)

    @property
    def balls(self) -> list[Ball]:
        return [Ball(tuple(c), float(r)) for c, r in zip(self.centers, self.radii)]

    @property
    def halo(self) -> float:
        return self.window.half_width + self.r_cut

    def with_balls(self, centers, radii) -> "Realization":
        """Same metadata, different ball list (used for derived configurations)."""
        centers = np.asarray(centers, dtype=float).reshape(-1, self.params.dimension)
        return Realization(centers, np.asarray(radii, dtype=float), self.params, self.window,
                           self.r_cut, self.seed, self.truncation_error, self.hitting)


def make_realization(params: ModelParams, window: Window, centers, radii,
                     r_cut: float = 0.0, seed: int = 0) -> Realization:
    """Wrap a hand-built ball list (tests, replay of dumped files)."""
    d = params.dimension
    centers = np.asarray(centers, dtype=float).reshape(-1, d)
    radii = np.asarray(radii, dtype=float).reshape(-1)
    if len(centers) != len(radii):
        raise ValueError("centers and radii disagree in length")
    return Realization(centers, radii, params, window, r_cut, seed,
                       truncation_error_bound(params, window, r_cut))


def stream_seed(master_seed: int, index: int) -> int:
    """Seed of stream `index`: master xor (index+1)*golden, then the
    splitmix64 finalizer (two xor-shift-multiply rounds with multipliers
    0xBF58476D1CE4E5B9 and 0x94D049BB133111EB)."""
    z = (master_seed ^ ((index + 1) * GOLDEN)) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & MASK64))


def _cube_mass_terms(d: int, L: float, law: RadiusLaw, lo: float, hi: float) -> list[float]:
    # integral over [lo, hi[ of (2L + 2r)^d nu(dr), split by powers of r
    return [math.comb(d, j) * (2 * L) ** (d - j) * 2**j * law.moment_between(j, lo, hi)
            for j in range(d + 1)]


@lru_cache(maxsize=256)
def truncation_error_bound(params: ModelParams, window: Window, r_cut: float) -> float:
    """Upper bound on P(some center outside the halo box carries a ball meeting
    the window): lambda * int_{]r_cut, inf[} (2L + 2r)^d nu(dr), capped at 1.
    Such a center is more than r_cut from the window, so only radii strictly
    above r_cut matter."""
    if r_cut < 0:
        raise ValueError("r_cut must be nonnegative")
    if r_cut == math.inf:
        return 0.0
    d, L = params.dimension, window.half_width
    total = sum(math.comb(d, j) * (2 * L) ** (d - j) * 2**j * tail_moment(params.law, j, r_cut, strict=True)
                for j in range(d + 1))
    return min(1.0, params.intensity * total)


def expected_count(params: ModelParams, window: Window, r_cut: float, hitting: bool = False) -> float:
    d, L, lam = params.dimension, window.half_width, params.intensity
    if not hitting:
        return lam * (2 * (L + r_cut)) ** d
    small, _, big = _hitting_plan(params, L, r_cut)
    return small + big


def _dist_to_box(centers: np.ndarray, L: float) -> np.ndarray:
    excess = np.maximum(np.abs(centers) - L, 0.0)
    return np.sqrt(np.einsum("ij,ij->i", excess, excess))


@lru_cache(maxsize=64)
def _hitting_plan(params: ModelParams, L: float, r_cut: float):
    """Poisson means and power-mixture weights; fixed per (params, L, r_cut)."""
    d, lam, law = params.dimension, params.intensity, params.law
    terms = np.array(_cube_mass_terms(d, L, law, 0.0, r_cut))
    total = float(terms.sum())
    cdf = np.cumsum(terms) / total if total > 0 else None
    big = 0.0
    if r_cut < math.inf:
        tail = law.tail_prob(r_cut)
        big = lam * (2 * (L + r_cut)) ** d * tail if tail > 0 else 0.0
    return lam * total, cdf, big


def _sample_hitting(rng, params: ModelParams, L: float, r_cut: float):
    d, law = params.dimension, params.law
    small_mean, cdf, big_mean = _hitting_plan(params, L, r_cut)
    # small radii: every center of a ball meeting the window is in [-(L+r), L+r]^d,
    # so draw r from the mixture over j of r^j nu(dr) weighted by the cube volume
    n_small = rng.poisson(small_mean) if small_mean > 0 else 0
    radii_small = np.empty(n_small)
    if n_small:
        powers = np.minimum(np.searchsorted(cdf, rng.random(n_small), side="right"), d)
        for j in np.unique(powers):
            mask = powers == j
            radii_small[mask] = law.sample_between(rng, int(j), 0.0, r_cut, int(mask.sum()))
    half = (L + radii_small)[:, None]
    centers_small = half * (2.0 * rng.random((n_small, d)) - 1.0)
    # large radii: the halo box itself bounds the centers
    if r_cut < math.inf:
        H = L + r_cut
        n_big = rng.poisson(big_mean) if big_mean > 0 else 0
        radii_big = law.sample_between(rng, 0, r_cut, math.inf, n_big)
        centers_big = H * (2.0 * rng.random((n_big, d)) - 1.0)
        radii = np.concatenate([radii_small, radii_big])
        centers = np.concatenate([centers_small, centers_big])
    else:
        radii, centers = radii_small, centers_small
    keep = _dist_to_box(centers, L) < radii
    return centers[keep], radii[keep]


def sample_realization(params: ModelParams, window: Window, r_cut: float, seed: int, *,
                       hitting: bool = False,
                       max_expected: float = DEFAULT_MAX_EXPECTED) -> Realization:
    """Draw one realization; a pure function of its arguments."""
    if r_cut < 0 or (r_cut == math.inf and not hitting):
        raise ValueError("r_cut must be finite and nonnegative in halo mode")
    mean = expected_count(params, window, r_cut, hitting)
    if not mean <= max_expected:
        raise MemoryBudgetError(
            f"expected {mean:.3g} balls exceeds the budget {max_expected:.3g}; "
            "shrink the window, r_cut or lambda")
    rng = _generator(seed)
    d, L = params.dimension, window.half_width
    if hitting:
        centers, radii = _sample_hitting(rng, params, L, r_cut)
    else:
        H = L + r_cut
        n = rng.poisson(mean)
        centers = H * (2.0 * rng.random((n, d)) - 1.0)
        radii = params.law.sample(rng, n)
    return Realization(centers, radii, params, window, r_cut, seed,
                       truncation_error_bound(params, window, r_cut), hitting)


def _g17(x: float) -> str:
    return f"{x:.17g}"


def dump_realization(real: Realization) -> str:
    p = real.params
    lines = [f"# d={p.dimension} lambda={_g17(p.intensity)} L={_g17(real.window.half_width)} "
             f"rcut={_g17(real.r_cut)} seed={real.seed} trunc_err={_g17(real.truncation_error)}"]
    for c, r in zip(real.centers, real.radii):
        lines.append(",".join(_g17(v) for v in (*c, r)))
    return "\n".join(lines) + "\n"


def load_realization(text: str, law: RadiusLaw | str) -> Realization:
    if isinstance(law, str):
        law = parse_law(law)
    rows = text.strip().splitlines()
    header = dict(tok.split("=", 1) for tok in rows[0].lstrip("# ").split())
    d = int(header["d"])
    params = ModelParams(d, float(header["lambda"]), law)
    data = np.array([[float(v) for v in row.split(",")] for row in rows[1:]]).reshape(-1, d + 1)
    return Realization(data[:, :d].copy(), data[:, d].copy(), params, Window(float(header["L"])),
                       float(header["rcut"]), int(header["seed"]), float(header["trunc_err"]))


def smallest_r_cut(params: ModelParams, window: Window, tol: float) -> float | None:
    """Smallest r_cut (to ~1e-6 relative) whose truncation bound is <= tol,
    or None when no finite r_cut works (E(R^d) infinite)."""
    f = lambda r: truncation_error_bound(params, window, r)  # noqa: E731
    if f(0.0) <= tol:
        return 0.0
    hi = max(1.0, window.half_width)
    for _ in range(200):
        if f(hi) <= tol:
            break
        hi *= 2.0
    else:
        return None
    lo = 0.0
    while hi - lo > 1e-6 * hi:
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if f(mid) <= tol else (mid, hi)
    return hi


def iter_streams(master_seed: int, start: int, stop: int) -> Iterator[tuple[int, int]]:
    for i in range(start, stop):
        yield i, stream_seed(master_seed, i)
