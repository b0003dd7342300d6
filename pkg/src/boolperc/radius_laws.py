"""Radius distributions with exact sampling and closed-form tail moments.

Every law supports truncated, size-biased sampling (density proportional to
r^q nu(dr) on an interval), which the window-hitting sampler in
`boolperc.model` relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import beta as beta_fn

INF = math.inf


def _fmt(x: float) -> str:
    r = repr(float(x))
    return r[:-2] if r.endswith(".0") else r


class LawSpecError(ValueError):
    pass


@dataclass(frozen=True)
class Constant:
    rho: float

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("Constant radius must be positive")

    def __str__(self):
        return f"constant:{_fmt(self.rho)}"

    def sample(self, rng, size):
        return np.full(size, float(self.rho))

    def tail_prob(self, alpha):
        return 1.0 if self.rho >= alpha else 0.0

    def moment_between(self, q, lo, hi, lo_open=False):
        inside = (self.rho > lo if lo_open else self.rho >= lo) and self.rho < hi
        return float(self.rho) ** q if inside else 0.0

    def sample_between(self, rng, q, lo, hi, size):
        return np.full(size, float(self.rho))

    def positive_part_moment(self, shift, d):
        return max(self.rho - shift, 0.0) ** d


@dataclass(frozen=True)
class Uniform:
    a: float
    b: float

    def __post_init__(self):
        if not 0 < self.a < self.b:
            raise ValueError("Uniform law needs 0 < a < b")

    def __str__(self):
        return f"uniform:{_fmt(self.a)}:{_fmt(self.b)}"

    def sample(self, rng, size):
        return self.a + (self.b - self.a) * rng.random(size)

    def tail_prob(self, alpha):
        return min(1.0, max(0.0, (self.b - alpha) / (self.b - self.a)))

    def _clip(self, lo, hi):
        return max(lo, self.a), min(hi, self.b)

    def moment_between(self, q, lo, hi, lo_open=False):
        l, h = self._clip(lo, hi)
        if h <= l:
            return 0.0
        return (h ** (q + 1) - l ** (q + 1)) / ((q + 1) * (self.b - self.a))

    def sample_between(self, rng, q, lo, hi, size):
        l, h = self._clip(lo, hi)
        u = rng.random(size)
        p = q + 1.0
        return (l**p + u * (h**p - l**p)) ** (1.0 / p)

    def positive_part_moment(self, shift, d):
        l = max(self.a, shift)
        if self.b <= l:
            return 0.0
        return ((self.b - shift) ** (d + 1) - (l - shift) ** (d + 1)) / ((d + 1) * (self.b - self.a))


@dataclass(frozen=True)
class Pareto:
    """Tail nu(]r, inf[) = (r / r_min)^-gamma for r >= r_min."""

    gamma: float
    r_min: float = 1.0

    def __post_init__(self):
        if not (self.gamma > 0 and self.r_min > 0):
            raise ValueError("Pareto law needs gamma > 0 and r_min > 0")

    def __str__(self):
        return f"pareto:{_fmt(self.gamma)}:{_fmt(self.r_min)}"

    def sample(self, rng, size):
        # 1 - u lies in ]0, 1], so draws are finite
        return self.r_min * (1.0 - rng.random(size)) ** (-1.0 / self.gamma)

    def tail_prob(self, alpha):
        if alpha <= self.r_min:
            return 1.0
        return (alpha / self.r_min) ** (-self.gamma)

    def moment_between(self, q, lo, hi, lo_open=False):
        l = max(lo, self.r_min)
        if hi <= l:
            return 0.0
        e = q - self.gamma
        scale = self.gamma * self.r_min**self.gamma
        if e == 0:
            return INF if hi == INF else scale * math.log(hi / l)
        if hi == INF:
            return INF if e > 0 else -scale * l**e / e
        return scale * (hi**e - l**e) / e

    def sample_between(self, rng, q, lo, hi, size):
        l = max(lo, self.r_min)
        e = q - self.gamma
        u = rng.random(size)
        if e == 0:
            return l * (hi / l) ** u
        if hi == INF:
            return l * (1.0 - u) ** (1.0 / e)
        return (l**e + u * (hi**e - l**e)) ** (1.0 / e)

    def positive_part_moment(self, shift, d):
        if self.gamma <= d:
            return INF
        if shift <= self.r_min:
            # binomial expansion; every term is a finite full moment
            return sum(
                math.comb(d, j) * (-shift) ** (d - j) * self.gamma * self.r_min**j / (self.gamma - j)
                for j in range(d + 1)
            )
        # substitute r = shift / t to reach a complete beta integral
        scale = self.gamma * self.r_min**self.gamma
        return scale * shift ** (d - self.gamma) * beta_fn(self.gamma - d, d + 1)


@dataclass(frozen=True)
class Mixture:
    weights: tuple[float, ...]
    laws: tuple["RadiusLaw", ...]

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if len(w) != len(self.laws) or not w:
            raise ValueError("mixture needs one weight per component")
        if any(x <= 0 for x in w):
            raise ValueError("mixture weights must be positive")
        total = sum(w)
        object.__setattr__(self, "weights", tuple(x / total for x in w))
        object.__setattr__(self, "laws", tuple(self.laws))

    def __str__(self):
        return "mix:" + ",".join(f"{_fmt(w)}*{law}" for w, law in zip(self.weights, self.laws))

    def _pick(self, rng, probs, size):
        probs = np.asarray(probs, dtype=float)
        probs = probs / probs.sum()
        return rng.choice(len(self.laws), size=size, p=probs)

    def sample(self, rng, size):
        which = self._pick(rng, self.weights, size)
        out = np.empty(size)
        for i, law in enumerate(self.laws):
            mask = which == i
            out[mask] = law.sample(rng, int(mask.sum()))
        return out

    def tail_prob(self, alpha):
        return sum(w * law.tail_prob(alpha) for w, law in zip(self.weights, self.laws))

    def moment_between(self, q, lo, hi, lo_open=False):
        return sum(w * law.moment_between(q, lo, hi, lo_open) for w, law in zip(self.weights, self.laws))

    def sample_between(self, rng, q, lo, hi, size):
        masses = [w * law.moment_between(q, lo, hi) for w, law in zip(self.weights, self.laws)]
        which = self._pick(rng, masses, size)
        out = np.empty(size)
        for i, law in enumerate(self.laws):
            mask = which == i
            if mask.any():
                out[mask] = law.sample_between(rng, q, lo, hi, int(mask.sum()))
        return out

    def positive_part_moment(self, shift, d):
        return sum(w * law.positive_part_moment(shift, d) for w, law in zip(self.weights, self.laws))


RadiusLaw = Union[Constant, Uniform, Pareto, Mixture]


def sample_radius(law: RadiusLaw, rng: np.random.Generator) -> float:
    return float(law.sample(rng, 1)[0])


def tail_moment(law: RadiusLaw, q: float, alpha: float, strict: bool = False) -> float:
    """Integral of r^q over [alpha, inf[ (or ]alpha, inf[ when `strict`).

    Returns math.inf when the integral diverges; alpha = 0 gives E(R^q).
    """
    if q < 0 or alpha < 0:
        raise ValueError("need q >= 0 and alpha >= 0")
    return law.moment_between(q, alpha, INF, lo_open=strict)


def tail_prob(law: RadiusLaw, alpha: float) -> float:
    """nu([alpha, inf[)."""
    return law.tail_prob(alpha)


def capped_moment(law: RadiusLaw, q: float, cap: float) -> float:
    """E[min(R, cap)^q]."""
    return law.moment_between(q, 0.0, cap) + cap**q * law.tail_prob(cap)


def parse_law(spec: str) -> RadiusLaw:
    """Parse `constant:RHO`, `uniform:A:B`, `pareto:GAMMA:RMIN` or
    `mix:W1*SPEC1,W2*SPEC2,...`."""
    spec = spec.strip()
    kind, _, rest = spec.partition(":")
    try:
        if kind == "mix":
            weights, laws = [], []
            for part in rest.split(","):
                w, star, sub = part.partition("*")
                if not star:
                    raise LawSpecError(f"mixture component {part!r} lacks 'W*'")
                weights.append(float(w))
                laws.append(parse_law(sub))
            return Mixture(tuple(weights), tuple(laws))
        args = [float(x) for x in rest.split(":")] if rest else []
        if kind == "constant" and len(args) == 1:
            return Constant(*args)
        if kind == "uniform" and len(args) == 2:
            return Uniform(*args)
        if kind == "pareto" and len(args) in (1, 2):
            return Pareto(*args)
    except LawSpecError:
        raise
    except ValueError as exc:
        raise LawSpecError(f"bad law spec {spec!r}: {exc}") from None
    raise LawSpecError(f"bad law spec {spec!r}")
