"""Deciders for the crossing event G(x, a), the large-ball events H(a) and
H~(a), and the tail events built on the origin cluster."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clusters import cluster_stats, component_of
from .model import Realization

KINDS = ("G", "H", "Htilde", "MReach", "DTail", "Cover")


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class EventSpec:
    """One estimand.

    G, H, Htilde take `alpha`; MReach takes `alpha` and `threshold`
    (default 9 * alpha); DTail takes `threshold` t; Cover takes
    `threshold` rho >= 0 and asks for a single ball containing B(0, rho)
    (rho = 0 means the origin itself is covered).
    """

    kind: str
    alpha: float | None = None
    threshold: float | None = None
    x: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")
        if self.kind in ("G", "H", "Htilde", "MReach"):
            if self.alpha is None or not self.alpha > 0:
                raise ValueError(f"{self.kind} needs alpha > 0")
        if self.kind == "MReach" and self.threshold is None:
            object.__setattr__(self, "threshold", 9.0 * self.alpha)
        if self.kind == "DTail" and (self.threshold is None or not self.threshold > 0):
            raise ValueError("DTail needs a positive threshold")
        if self.kind == "Cover" and (self.threshold is None or self.threshold < 0):
            raise ValueError("Cover needs threshold rho >= 0")
        if self.x is not None:
            object.__setattr__(self, "x", tuple(float(v) for v in self.x))

    @property
    def scale(self) -> float:
        """The number reported as `alpha_or_t`."""
        return self.alpha if self.kind in ("G", "H", "Htilde", "MReach") else self.threshold

    @property
    def uses_cluster(self) -> bool:
        return self.kind in ("MReach", "DTail")

    @property
    def window_only(self) -> bool:
        # deciders that only read centers inside the window ignore the halo
        return self.kind in ("G", "Htilde")


def _norms(real: Realization, x=None) -> np.ndarray:
    c = real.centers if x is None else real.centers - np.asarray(x, dtype=float)
    return np.sqrt(np.einsum("ij,ij->i", c, c))


def event_G(real: Realization, x, alpha: float) -> bool:
    """The component of Sigma(B(x, 10a)) u B(x, a) holding x leaves B(x, 8a)."""
    x = np.zeros(real.params.dimension) if x is None else np.asarray(x, dtype=float)
    if np.any(np.abs(x) + 10 * alpha > real.window.half_width):
        raise PreconditionError(f"window {real.window.half_width} does not contain B(x, {10 * alpha})")
    dist = _norms(real, x)
    inner = dist < 10 * alpha
    if not inner.any():
        return False
    centers = np.vstack([real.centers[inner], x[None, :]])
    radii = np.append(real.radii[inner], alpha)
    reach = np.append(dist[inner], 0.0) + radii
    members = component_of(centers, radii, np.array([len(radii) - 1]))
    return bool(np.any(reach[members] >= 8 * alpha))


def event_H(real: Realization, alpha: float) -> bool:
    """Some center outside B(0, 10a) carries a ball meeting B(0, 9a)."""
    dist = _norms(real)
    return bool(np.any((dist >= 10 * alpha) & (dist < real.radii + 9 * alpha)))


def event_H_tilde(real: Realization, alpha: float) -> bool:
    """Some center in B(0, 100a) carries a radius >= a."""
    if 100 * alpha > real.window.half_width:
        raise PreconditionError(f"window {real.window.half_width} does not contain B(0, {100 * alpha})")
    dist = _norms(real)
    return bool(np.any((dist < 100 * alpha) & (real.radii >= alpha)))


def event_cover(real: Realization, rho: float) -> bool:
    dist = _norms(real)
    if rho == 0:
        return bool(np.any(dist < real.radii))
    return bool(np.any(dist + rho <= real.radii))


def decide(real: Realization, spec: EventSpec) -> tuple[bool, bool]:
    """(event occurred, trial censored by the window boundary)."""
    kind = spec.kind
    if kind == "G":
        return event_G(real, spec.x, spec.alpha), False
    if kind == "H":
        return event_H(real, spec.alpha), False
    if kind == "Htilde":
        return event_H_tilde(real, spec.alpha), False
    if kind == "Cover":
        return event_cover(real, spec.threshold), False
    stats = cluster_stats(real)
    value = stats.M if kind == "MReach" else stats.D
    # a censored value is a lower bound, so reaching the threshold is still decisive
    return value >= spec.threshold, stats.boundary_hit
