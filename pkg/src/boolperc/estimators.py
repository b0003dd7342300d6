"""Seeded Monte Carlo estimates with Wilson intervals, and Hill tail fits.

Trial i of a run with master seed s always uses `stream_seed(s, i)`, and
runs are split into fixed-size chunks, so results do not depend on the
number of worker processes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .clusters import ClusterSummary, cluster_stats
from .events import EventSpec, decide
from .radius_laws import tail_moment
from .model import (ModelParams, Window, sample_realization, smallest_r_cut, stream_seed,
                    truncation_error_bound)

Z95 = 1.959963984540054
CHUNK = 4000


class MetadataMismatch(ValueError):
    pass


class ToleranceError(ValueError):
    """The truncation tolerance cannot be met."""


class InsufficientSamples(ValueError):
    pass


def wilson_interval(successes: int, n: int, z: float = Z95) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = successes / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p + z2 / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom
    low = 0.0 if successes == 0 else max(0.0, min(p, center - half))
    high = 1.0 if successes == n else min(1.0, max(p, center + half))
    return low, high


def _coalesce(ranges):
    out = []
    for a, b in sorted(ranges):
        if out and out[-1][1] == a:
            out[-1] = (out[-1][0], b)
        else:
            out.append((a, b))
    return tuple(out)


@dataclass(frozen=True)
class Estimate:
    kind: str
    scale: float
    intensity: float
    dimension: int
    law: str
    trials: int
    successes: int
    master_seed: int
    censored: int = 0
    trunc_bias_bound: float = 0.0
    streams: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        if not 0 <= self.successes <= self.trials:
            raise ValueError("successes must lie in [0, trials]")

    @property
    def p_hat(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    @property
    def ci(self) -> tuple[float, float]:
        return wilson_interval(self.successes, self.trials)

    @property
    def ci_low(self) -> float:
        return self.ci[0]

    @property
    def ci_high(self) -> float:
        return self.ci[1]

    @property
    def half_width(self) -> float:
        lo, hi = self.ci
        return (hi - lo) / 2

    @property
    def censored_fraction(self) -> float:
        return self.censored / self.trials if self.trials else 0.0

    def empty(self) -> "Estimate":
        return replace(self, trials=0, successes=0, censored=0, streams=())

    def _meta(self):
        return (self.kind, self.scale, self.intensity, self.dimension, self.law,
                self.master_seed, self.trunc_bias_bound)

    CSV_HEADER = ("kind,alpha_or_t,lambda,d,law,n,successes,p_hat,ci_low,ci_high,"
                  "censored_fraction,trunc_bias,master_seed")

    def csv_row(self) -> str:
        g = lambda v: f"{v:.17g}"  # noqa: E731
        return ",".join([self.kind, g(self.scale), g(self.intensity), str(self.dimension), self.law,
                         str(self.trials), str(self.successes), g(self.p_hat), g(self.ci_low),
                         g(self.ci_high), g(self.censored_fraction), g(self.trunc_bias_bound),
                         str(self.master_seed)])


def merge(a: Estimate, b: Estimate) -> Estimate:
    """Pool two estimates of the same estimand over disjoint streams."""
    if a._meta() != b._meta():
        raise MetadataMismatch("estimates disagree on their estimand")
    for s0, s1 in a.streams:
        for t0, t1 in b.streams:
            if s0 < t1 and t0 < s1:
                raise MetadataMismatch(f"stream ranges {(s0, s1)} and {(t0, t1)} overlap")
    return replace(a, trials=a.trials + b.trials, successes=a.successes + b.successes,
                   censored=a.censored + b.censored, streams=_coalesce(a.streams + b.streams))


def map_chunks(func, tasks, workers: int = 1):
    """Ordered map over tasks, optionally across processes."""
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, tasks))


def _chunks(start: int, n: int):
    return [(s, min(s + CHUNK, start + n)) for s in range(start, start + n, CHUNK)]


def default_window(spec: EventSpec, dimension: int) -> Window:
    if spec.kind == "G":
        shift = max((abs(v) for v in spec.x), default=0.0) if spec.x else 0.0
        return Window(shift + 10 * spec.alpha)
    if spec.kind == "Htilde":
        return Window(100 * spec.alpha)
    if spec.kind == "H":
        return Window(10 * spec.alpha)
    if spec.kind == "Cover":
        return Window(spec.threshold if spec.threshold > 0 else 1.0)
    return Window(10 * spec.threshold)


def resolve_truncation(params: ModelParams, spec: EventSpec, window: Window, r_cut, tol: float,
                       allow_divergent: bool, hitting: bool) -> tuple[float, float]:
    """(r_cut, additive truncation bias bound) for one estimand."""
    if spec.window_only:
        return (0.0 if r_cut is None else r_cut), 0.0
    if r_cut is None:
        if hitting and _finite_moment(params):
            r_cut = math.inf
        else:
            r_cut = smallest_r_cut(params, window, tol)
            if r_cut is None:
                if not allow_divergent:
                    raise ToleranceError(
                        f"truncation tolerance {tol} is unmeetable: E(R^{params.dimension}) is "
                        "infinite; acknowledge with allow_divergent")
                r_cut = 10.0 * window.half_width
    bound = truncation_error_bound(params, window, r_cut)
    if bound > tol and not allow_divergent:
        raise ToleranceError(f"truncation bound {bound:.3g} at r_cut={r_cut} exceeds tolerance {tol}")
    return r_cut, bound


def _finite_moment(params: ModelParams) -> bool:
    return tail_moment(params.law, params.dimension, 0.0) < math.inf


def _event_chunk(task):
    params, spec, window, r_cut, hitting, master_seed, start, stop = task
    successes = censored = 0
    for i in range(start, stop):
        real = sample_realization(params, window, r_cut, stream_seed(master_seed, i), hitting=hitting)
        hit, cens = decide(real, spec)
        successes += hit
        censored += cens
    return successes, censored


def estimate_event(params: ModelParams, spec: EventSpec, n: int, master_seed: int, *,
                   window: Window | None = None, r_cut: float | None = None, tol: float = 1e-4,
                   allow_divergent: bool = False, hitting: bool = False, workers: int = 1,
                   start: int = 0) -> Estimate:
    """Estimate P(event) from trials on streams start .. start + n - 1."""
    window = window or default_window(spec, params.dimension)
    r_cut, bias = resolve_truncation(params, spec, window, r_cut, tol, allow_divergent, hitting)
    tasks = [(params, spec, window, r_cut, hitting, master_seed, a, b) for a, b in _chunks(start, n)]
    parts = map_chunks(_event_chunk, tasks, workers)
    successes = sum(p[0] for p in parts)
    censored = sum(p[1] for p in parts) if spec.uses_cluster else 0
    return Estimate(spec.kind, float(spec.scale), params.intensity, params.dimension, str(params.law),
                    n, successes, master_seed, censored, bias, ((start, start + n),) if n else ())


def _cluster_chunk(task):
    params, window, r_cut, hitting, master_seed, start, stop = task
    return [cluster_stats(sample_realization(params, window, r_cut, stream_seed(master_seed, i),
                                             hitting=hitting))
            for i in range(start, stop)]


def sample_cluster_statistics(params: ModelParams, window: Window, r_cut: float, n: int,
                              master_seed: int, *, hitting: bool = False,
                              workers: int = 1) -> list[ClusterSummary]:
    tasks = [(params, window, r_cut, hitting, master_seed, a, b) for a, b in _chunks(0, n)]
    return [row for part in map_chunks(_cluster_chunk, tasks, workers) for row in part]


@dataclass(frozen=True)
class TailFit:
    exponent_hat: float
    ci_half_width: float
    k_order_stats: int
    sample_size: int

    def as_dict(self) -> dict:
        return {"exponent_hat": self.exponent_hat, "ci_half_width": self.ci_half_width,
                "k_order_stats": self.k_order_stats, "sample_size": self.sample_size}


def fit_tail_exponent(samples, k: int | None = None) -> TailFit:
    """Hill estimator on the k largest samples."""
    x = np.sort(np.asarray(samples, dtype=float))[::-1]
    n = len(x)
    if k is None:
        k = int(math.isqrt(n))
    if k < 1 or n < k + 1 or not x[k] > 0:
        raise InsufficientSamples(f"need at least {k + 1} positive samples")
    total = float(np.sum(np.log(x[:k] / x[k])))
    if total <= 0:
        raise InsufficientSamples("top order statistics are all equal")
    gamma = k / total
    return TailFit(gamma, 1.96 * gamma / math.sqrt(k), k, n)
